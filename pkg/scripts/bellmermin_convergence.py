"""Monte Carlo error of the hidden-variable marginal against the Born rule
as the sample count grows."""

from __future__ import annotations

import argparse
import math

import numpy as np

from gnst.bellmermin import Preparation, marginal_prob
from gnst.theories import MeasurementDirection


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pairs", type=int, default=10)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    dirs = rng.normal(size=(args.pairs, 2, 3))
    dirs /= np.linalg.norm(dirs, axis=2, keepdims=True)
    print(f"{'N':>9} {'rms error':>11} {'rms z-score':>12}")
    for n in (10**3, 10**4, 10**5, 10**6):
        errs, zs = [], []
        for i, (psi, phi) in enumerate(dirs):
            p = (1 + psi @ phi) / 2
            est = marginal_prob(Preparation(tuple(psi)), MeasurementDirection(tuple(phi)), n, seed=args.seed + i)
            errs.append(est - p)
            zs.append((est - p) / math.sqrt(max(p * (1 - p), 1e-12) / n))
        print(f"{n:>9} {np.sqrt(np.mean(np.square(errs))):>11.2e} {np.sqrt(np.mean(np.square(zs))):>12.3f}")


if __name__ == "__main__":
    main()
