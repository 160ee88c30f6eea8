"""Print zeta, the certified floor and the worst/best cases for every built-in theory."""

from __future__ import annotations

from gnst.randomness import worst_case_analysis
from gnst.serialize import num
from gnst.theories import builtin

PAIRS = {"classical": ("m1", "m2"), "qubit": ("z", "x"), "gbit": ("m1", "m2"),
         "toy": ("Z", "X"), "bellmermin": ("z", "x")}


def main() -> None:
    print(f"{'theory':<11} {'zeta':>14} {'floor':>14} {'worst':>14} {'best':>6}  genuine")
    for name, (m1, m2) in PAIRS.items():
        rep = worst_case_analysis(builtin(name), m1, m2)
        print(f"{name:<11} {str(num(rep.zeta)):>14} {num(rep.certified_bits):>14} "
              f"{num(rep.worst_case_bits):>14} {num(rep.best_case_bits):>6}  {rep.genuine_source}")


if __name__ == "__main__":
    main()
