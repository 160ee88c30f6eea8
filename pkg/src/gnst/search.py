"""Deterministic search primitives shared by the oracle paths: a Fibonacci
sphere grid, tangent-plane refinement on the sphere, barycentric lattices
on simplices and pairwise-transfer refinement over convex weights."""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np
from scipy.optimize import minimize_scalar

REFINE_ITERS = 50


def fibonacci_sphere(n: int) -> np.ndarray:
    """``n`` nearly uniform unit vectors, shape (n, 3)."""
    i = np.arange(n, dtype=float) + 0.5
    z = 1 - 2 * i / n
    phi = np.pi * (1 + math.sqrt(5)) * i
    s = np.sqrt(np.maximum(0.0, 1 - z * z))
    return np.column_stack([s * np.cos(phi), s * np.sin(phi), z])


def fibonacci_spacing(n: int) -> float:
    """Upper bound on the chord distance from any unit vector to the grid.

    Measured covering radii sit near 0.76 * sqrt(4 pi / n) for n >= 1e3;
    the bound drops the 0.76.
    """
    return math.sqrt(4 * math.pi / n)


def tangent_basis(r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    r = r / np.linalg.norm(r)
    helper = np.array([1.0, 0.0, 0.0]) if abs(r[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(r, helper)
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(r, e1)


def refine_on_sphere(f, r0: np.ndarray, radius: float, sweeps: int = 4) -> tuple[np.ndarray, float]:
    """Maximize ``f`` over unit vectors near ``r0`` by alternating 1D searches
    along the two tangent directions. Never returns a worse point than ``r0``."""
    best = np.asarray(r0, dtype=float) / np.linalg.norm(r0)
    best_val = f(best)
    for _ in range(sweeps):
        for axis in range(2):
            e = tangent_basis(best)[axis]

            def neg(t, base=best, e=e):
                r = base + t * e
                return -f(r / np.linalg.norm(r))

            res = minimize_scalar(neg, bounds=(-radius, radius), method="bounded",
                                  options={"maxiter": REFINE_ITERS, "xatol": 1e-13})
            if -res.fun > best_val:
                r = best + res.x * e
                best, best_val = r / np.linalg.norm(r), -res.fun
        radius = max(radius / 4, 1e-9)
    return best, best_val


def lattice_size(dim: int, k: int) -> int:
    return math.comb(k + dim - 1, dim - 1)


def lattice_resolution(dim: int, budget: int) -> int:
    """Largest lattice denominator whose point count fits the budget (at least 1)."""
    k = 1
    while lattice_size(dim, k + 1) <= budget:
        k += 1
    return k


def simplex_lattice(dim: int, k: int) -> np.ndarray:
    """All barycentric points with denominators ``k``; vertices come first."""
    if dim == 1:
        return np.ones((1, 1))
    pts = []
    for bars in combinations(range(k + dim - 1), dim - 1):
        edges = (-1,) + bars + (k + dim - 1,)
        pts.append([edges[i + 1] - edges[i] - 1 for i in range(dim)])
    P = np.array(pts, dtype=float) / k
    order = np.argsort(-P.max(axis=1), kind="stable")
    return P[order]


def refine_weights(f, c0: np.ndarray, sweeps: int = 3) -> tuple[np.ndarray, float]:
    """Maximize ``f`` over convex weights by moving mass between vertex pairs."""
    c = np.asarray(c0, dtype=float).copy()
    best_val = f(c)
    n = len(c)
    for _ in range(sweeps):
        improved = False
        for a, b in combinations(range(n), 2):
            lo, hi = -c[a], c[b]
            if hi - lo <= 0:
                continue

            def neg(t, a=a, b=b, base=c):
                d = base.copy()
                d[a] += t
                d[b] -= t
                return -f(d)

            res = minimize_scalar(neg, bounds=(lo, hi), method="bounded",
                                  options={"maxiter": REFINE_ITERS, "xatol": 1e-13})
            for t, val in ((res.x, -res.fun), (lo, -neg(lo)), (hi, -neg(hi))):
                if val > best_val + 1e-15:
                    c[a] += t
                    c[b] -= t
                    c = np.clip(c, 0.0, None)
                    c /= c.sum()
                    best_val = f(c)
                    improved = True
                    break
        if not improved:
            break
    return c, best_val
