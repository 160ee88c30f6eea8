"""Scan the toy-bit state space along every pair of pure states and show
where the two-copy guessing probability peaks."""

from __future__ import annotations

from fractions import Fraction
import math
from itertools import combinations

from gnst.randomness import certified_bits, guessing_probability, product_process
from gnst.theories import PolytopeState, builtin


def main() -> None:
    toy = builtin("toy")
    best = (Fraction(0), None)
    for u, v in combinations(range(len(toy.labels)), 2):
        for k in range(0, 9):
            t = Fraction(k, 8)
            c = [Fraction(0)] * len(toy.labels)
            c[u], c[v] = 1 - t, t
            g = guessing_probability(product_process(toy, PolytopeState(tuple(c)), "Z", "X"))
            if g > best[0]:
                best = (g, (toy.labels[u], toy.labels[v], t))
    g, (a, b, t) = best
    print("pure states alone: guessing probability 1/2 (1 bit)")
    print(f"largest on segments: {g} at {1 - t}*{{{a}}} + {t}*{{{b}}}")
    print(f"min-entropy there: {-math.log2(g):.6f} bits; "
          f"floor from zeta = 3/4: {certified_bits(Fraction(3, 4)):.6f} bits")


if __name__ == "__main__":
    main()
