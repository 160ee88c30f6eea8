"""Guessing probability, min-entropy and certification of the two-copy process.

Measuring ``m1`` on one copy and ``m2`` on a second, identically prepared
copy gives a four-outcome product distribution. Its guessing probability is
at most zeta**2, so every state yields at least -2 log2(zeta) bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Any

import numpy as np
from scipy.optimize import minimize_scalar

from .core import (
    EXACT_TOL,
    OPT_TOL,
    DomainError,
    GnstError,
    MeasurementDistribution,
    OutcomeDistribution,
    TheoryModel,
    ValidationError,
    is_exact,
)
from .search import lattice_resolution, refine_weights, simplex_lattice, tangent_basis
from .theories import BlochVector, PolytopeState, PolytopeTheory, QubitTheory
from .uncertainty import zeta_by_string

GENUINE_THRESHOLD = 1e-9
ANGLE_GRID = 1 << 16
ORACLE_BUDGET = 20_000


class TheoremViolation(GnstError, AssertionError):
    """A computed quantity contradicts the min-entropy floor; indicates a bug."""


def _probs(d) -> tuple:
    if isinstance(d, (OutcomeDistribution, ProductProcessDistribution)):
        return tuple(d.p if isinstance(d, ProductProcessDistribution) else d.probs)
    return OutcomeDistribution(tuple(d)).probs


def guessing_probability(d):
    """Largest outcome probability."""
    return max(_probs(d))


def _bits(g) -> float:
    g = float(g)
    return 0.0 if g >= 1 else -math.log2(g)


def min_entropy(d) -> float:
    """-log2 of the guessing probability, in bits."""
    return _bits(guessing_probability(d))


@dataclass(frozen=True)
class ProductProcessDistribution:
    """Joint distribution of (j, k), ordered (0,0), (0,1), (1,0), (1,1)."""

    p: tuple
    factors: tuple

    def __post_init__(self):
        f1, f2 = self.factors
        expected = tuple(a * b for a in f1.probs for b in f2.probs)
        if len(self.p) != len(expected) or any(abs(x - y) > EXACT_TOL for x, y in zip(self.p, expected)):
            raise ValidationError("joint probabilities do not factorize")
        if abs(sum(self.p) - 1) > EXACT_TOL:
            raise ValidationError("joint probabilities are not normalized")

    @property
    def probs(self) -> tuple:
        return self.p

    def __getitem__(self, jk):
        j, k = jk
        return self.p[j * len(self.factors[1]) + k]


def product_process(theory: TheoryModel, state, m1, m2) -> ProductProcessDistribution:
    """Independent measurements of ``m1`` and ``m2`` on two copies of ``state``."""
    for m in (m1, m2):
        if theory.arity(m) != 2:
            raise DomainError(f"measurement {m} is not binary")
    f1 = theory.distribution(state, m1)
    f2 = theory.distribution(state, m2)
    return ProductProcessDistribution(tuple(a * b for a in f1.probs for b in f2.probs), (f1, f2))


def certified_bits(zeta) -> float:
    """Guaranteed min-entropy -2 log2(zeta) of the two-copy process."""
    if zeta <= 0 or zeta > 1 + EXACT_TOL:
        raise DomainError(f"zeta must lie in (0, 1], got {zeta!r}")
    return 0.0 if zeta >= 1 else -2 * math.log2(float(zeta))


@dataclass(frozen=True)
class ChainLink:
    claim: str
    lhs: float
    rhs: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs + EXACT_TOL


@dataclass(frozen=True)
class AmGmChain:
    p1: float
    p2: float
    zeta: float
    links: tuple

    @property
    def holds(self) -> bool:
        return all(link.holds for link in self.links)


def amgm_chain(p1, p2, zeta) -> AmGmChain:
    """Evaluate the three inequalities that bound p1 * p2 by zeta**2."""
    if not (0 <= p1 <= 1 and 0 <= p2 <= 1):
        raise DomainError("p1 and p2 must be probabilities")
    if (p1 + p2) / 2 > zeta + EXACT_TOL:
        raise DomainError(f"(p1 + p2)/2 = {(p1 + p2) / 2} exceeds zeta = {zeta}")
    p1, p2, zeta = float(p1), float(p2), float(zeta)
    links = (
        ChainLink("2 sqrt(p1 p2) <= p1 + p2", 2 * math.sqrt(p1 * p2), p1 + p2),
        ChainLink("p1 p2 <= (p1 + p2)^2 / 4", p1 * p2, (p1 + p2) ** 2 / 4),
        ChainLink("p1 p2 <= zeta^2", p1 * p2, zeta * zeta),
    )
    for link in links:
        if not link.holds:
            raise TheoremViolation(f"{link.claim} fails: {link.lhs} > {link.rhs}")
    return AmGmChain(p1, p2, zeta, links)


@dataclass(frozen=True)
class CertificationReport:
    theory: str
    measurements: tuple
    zeta: Any
    zeta_string: tuple
    certified_bits: float
    worst_case_bits: float
    worst_case_state: Any
    best_case_bits: float
    best_case_state: Any
    genuine_source: bool
    method: str
    certified_tolerance: float = 0.0
    certified: bool = True
    # min over extreme states only; differs from worst_case_bits when the
    # product peaks inside a face of the state polytope
    vertex_worst_case_bits: float | None = None
    zeta_table: dict = field(default_factory=dict)


# --- worst/best case searches ------------------------------------------------


def _qubit_extremes(theory: QubitTheory, m1, m2):
    n1 = theory.resolve(m1).as_array()
    n2 = theory.resolve(m2).as_array()
    e1 = n1
    perp = n2 - (n2 @ n1) * n1
    e2 = perp / np.linalg.norm(perp) if np.linalg.norm(perp) > 1e-9 else tangent_basis(n1)[0]

    def guess(theta):
        r = np.cos(theta) * e1 + np.sin(theta) * e2
        return (1 + abs(r @ n1)) / 2 * (1 + abs(r @ n2)) / 2

    thetas = np.arange(ANGLE_GRID) * (2 * np.pi / ANGLE_GRID)
    R = np.outer(np.cos(thetas), e1) + np.outer(np.sin(thetas), e2)
    G = (1 + np.abs(R @ n1)) / 2 * (1 + np.abs(R @ n2)) / 2
    i = int(np.flatnonzero(G >= G.max() - 1e-12)[0])  # lowest angle wins ties
    step = 2 * np.pi / ANGLE_GRID
    res = minimize_scalar(lambda t: -guess(t), bounds=(thetas[i] - step, thetas[i] + step),
                          method="bounded", options={"xatol": 1e-13, "maxiter": 200})
    theta, g = (res.x, -res.fun) if -res.fun >= G[i] else (thetas[i], G[i])
    worst = np.cos(theta) * e1 + np.sin(theta) * e2
    # each factor has |d/dtheta| <= 1/2 and size <= 1, so the grid misses at most step/2
    tol_g = step / 2
    tol_bits = -math.log2(1 - tol_g / g)

    cross = np.cross(n1, n2)
    best = cross / np.linalg.norm(cross) if np.linalg.norm(cross) > 1e-9 else tangent_basis(n1)[0]
    return (BlochVector(tuple(worst / np.linalg.norm(worst))), float(g), tol_bits,
            BlochVector(tuple(best)))


def _polytope_extremes(theory: PolytopeTheory, m1, m2):
    xs = theory.vertex_values(m1, 0)
    ys = theory.vertex_values(m2, 0)
    V = len(xs)
    exact = all(map(is_exact, xs + ys))
    half = Fraction(1, 2) if exact else 0.5

    def coeffs(u, v, t):
        c = [Fraction(0) if exact else 0.0] * V
        c[u] += 1 - t
        c[v] += t
        return c

    def G(x, y):
        return max(x, 1 - x) * max(y, 1 - y)

    # worst case: maximize X_j * Y_k along every vertex pair segment
    worst_val, worst_c = None, None
    for u, v in combinations_with_replacement(range(V), 2):
        dx, dy = xs[v] - xs[u], ys[v] - ys[u]
        for sx in (1, -1):
            for sy in (1, -1):
                X0 = xs[u] if sx == 1 else 1 - xs[u]
                Y0 = ys[u] if sy == 1 else 1 - ys[u]
                a, b = sx * dx, sy * dy
                ts = [0, 1]
                if a * b < 0:
                    t = -(X0 * b + Y0 * a) / (2 * a * b)
                    if 0 < t < 1:
                        ts.append(t)
                for t in ts:
                    val = (X0 + t * a) * (Y0 + t * b)
                    if worst_val is None or val > worst_val:
                        worst_val, worst_c = val, coeffs(u, v, t)
    vertex_worst = max(G(x, y) for x, y in zip(xs, ys))

    # best case: G is quasi-concave on each quadrant around (1/2, 1/2), so the
    # minimum sits at a vertex, a crossing of x = 1/2 or y = 1/2, or the centre
    cands = [(G(x, y), coeffs(i, i, 0)) for i, (x, y) in enumerate(zip(xs, ys))]
    on_half_x = []
    for u, v in combinations_with_replacement(range(V), 2):
        for coord, store in ((xs, on_half_x), (ys, None)):
            d = coord[v] - coord[u]
            if d == 0:
                continue
            t = (half - coord[u]) / d
            if 0 <= t <= 1:
                x = xs[u] + t * (xs[v] - xs[u])
                y = ys[u] + t * (ys[v] - ys[u])
                cands.append((G(x, y), coeffs(u, v, t)))
                if store is not None:
                    store.append((y, coeffs(u, v, t)))
        for i in (u, v):
            if xs[i] == half:
                on_half_x.append((ys[i], coeffs(i, i, 0)))
    if on_half_x:
        lo = min(on_half_x, key=lambda e: e[0])
        hi = max(on_half_x, key=lambda e: e[0])
        if lo[0] <= half <= hi[0]:
            lam = 0 if hi[0] == lo[0] else (half - lo[0]) / (hi[0] - lo[0])
            c = [(1 - lam) * a + lam * b for a, b in zip(lo[1], hi[1])]
            cands.append((G(half, half), c))
    best_val, best_c = min(cands, key=lambda e: e[0])

    # certifying oracle: dense barycentric lattice + pairwise refinement
    xa = np.array([float(x) for x in xs])
    ya = np.array([float(y) for y in ys])

    def g_of(c):
        x, y = float(c @ xa), float(c @ ya)
        return max(x, 1 - x) * max(y, 1 - y)

    k = lattice_resolution(V, ORACLE_BUDGET)
    C = simplex_lattice(V, k)
    X, Y = C @ xa, C @ ya
    vals = np.maximum(X, 1 - X) * np.maximum(Y, 1 - Y)
    _, oracle = refine_weights(g_of, C[int(np.argmax(vals))])
    if oracle > float(worst_val) + 1e-9:
        raise TheoremViolation(f"hull oracle found guess {oracle} above exact maximum {float(worst_val)}")

    return (PolytopeState(tuple(worst_c)), worst_val, vertex_worst,
            PolytopeState(tuple(best_c)), best_val)


def _sampled_extremes(theory: TheoryModel, m1, m2, n: int = 20_000):
    states = theory.sample(n, seed=0)
    p = theory.prob_many(states, m1, 0)
    q = theory.prob_many(states, m2, 0)
    G = np.maximum(p, 1 - p) * np.maximum(q, 1 - q)
    i, j = int(np.argmax(G)), int(np.argmin(G))
    return states[i], float(G[i]), states[j], float(G[j])


def worst_case_analysis(theory: TheoryModel, m1=None, m2=None,
                        meas_dist: MeasurementDistribution | None = None) -> CertificationReport:
    """Minimize and maximize the two-copy min-entropy over all states, and
    check the minimum against the certified floor -2 log2(zeta)."""
    if m1 is None or m2 is None:
        m1, m2 = theory.default_pair
    for m in (m1, m2):
        if theory.arity(m) != 2:
            raise DomainError(f"measurement {m} is not binary")
    table = zeta_by_string(theory, m1, m2, meas_dist)
    zkey = max(table, key=lambda o: (table[o].zeta, tuple(-x for x in o)))
    z = table[zkey]
    floor = certified_bits(max(z.zeta, 1e-300))
    certified = all(r.certified for r in table.values())
    vertex_worst = None

    if isinstance(theory, QubitTheory):
        worst_state, g, tol, best_state = _qubit_extremes(theory, m1, m2)
        worst_bits, best_bits = _bits(g), 2.0
        method = "angle-search"
    elif isinstance(theory, PolytopeTheory):
        worst_state, g, vg, best_state, bg = _polytope_extremes(theory, m1, m2)
        worst_bits, best_bits, vertex_worst = _bits(g), _bits(bg), _bits(vg)
        tol = 0.0
        method = "vertex-edge-enumeration"
    else:
        worst_state, g, best_state, bg = _sampled_extremes(theory, m1, m2)
        worst_bits, best_bits = _bits(g), _bits(bg)
        # min-entropy is nonnegative: a point mass settles the worst case exactly
        tol = worst_bits
        certified = certified and tol == 0.0
        method = "sampled-search"

    if worst_bits < floor - OPT_TOL:
        raise TheoremViolation(f"worst case {worst_bits} bits is below the floor {floor}")
    genuine = worst_bits > GENUINE_THRESHOLD
    if genuine != (float(z.zeta) < 1 - GENUINE_THRESHOLD):
        raise TheoremViolation(f"verdict {genuine} disagrees with zeta = {z.zeta}")
    names = tuple(str(theory.resolve(m).id) for m in (m1, m2))
    return CertificationReport(
        theory=theory.name, measurements=names, zeta=z.zeta, zeta_string=zkey,
        certified_bits=floor, worst_case_bits=worst_bits, worst_case_state=worst_state,
        best_case_bits=best_bits, best_case_state=best_state, genuine_source=genuine,
        method=method, certified_tolerance=tol, certified=certified,
        vertex_worst_case_bits=vertex_worst, zeta_table=table,
    )


def genuine_source_verdict(theory: TheoryModel, m1=None, m2=None) -> tuple[bool, CertificationReport]:
    """True when every state of the theory leaves strictly positive min-entropy."""
    report = worst_case_analysis(theory, m1, m2)
    return report.genuine_source, report
