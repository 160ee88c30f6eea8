"""Fine-grained, entropic and Robertson uncertainty quantities.

``zeta`` is the largest weighted success probability P_cert that any state
of a theory reaches for a fixed outcome string. It is computed in closed
form for the qubit, by exact vertex enumeration for polytope theories, and
by a certified grid/lattice search that serves as the independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Any, Sequence

import numpy as np

from .core import (
    EXACT_TOL,
    DomainError,
    MeasurementDistribution,
    OutcomeDistribution,
    TheoryModel,
    UncertaintySpec,
    ValidationError,
    clamp01,
)
from .search import (
    fibonacci_sphere,
    fibonacci_spacing,
    lattice_resolution,
    refine_on_sphere,
    refine_weights,
    simplex_lattice,
)
from .theories import BlochVector, MeasurementDirection, PolytopeState, PolytopeTheory, QubitTheory

__all__ = [
    "UncertaintySpec", "ZetaResult", "EntropicBound", "QubitObservable",
    "p_cert", "zeta", "zeta_qubit_analytic", "zeta_polytope", "zeta_numeric",
    "zeta_by_string", "zeta_max", "shannon_entropy", "avg_entropy",
    "entropic_bound_estimate", "robertson_terms",
]

SPHERE_POINTS = 1_000_000
LATTICE_BUDGET = 100_000
ONTIC_SAMPLES = 20_000
P_CERT_LIPSCHITZ = 0.5  # |grad| of (1 + r.v)/2 with |v| <= 1


@dataclass(frozen=True)
class ZetaResult:
    zeta: Any  # Fraction on exact paths, float otherwise
    maximizing_state: Any
    method: str  # "analytic" | "vertex-enumeration" | "numeric-search"
    certified_tolerance: float = 0.0
    certified: bool = True

    def __post_init__(self):
        if not 0 <= self.zeta <= 1 + EXACT_TOL:
            raise ValidationError(f"zeta {self.zeta!r} outside [0, 1]")

    @property
    def value(self) -> float:
        return float(self.zeta)


@dataclass(frozen=True)
class EntropicBound:
    bits: float
    minimizing_state: Any
    method: str
    certified_tolerance: float = 0.0
    certified: bool = True


@dataclass(frozen=True)
class QubitObservable:
    """A = a . sigma, eigenvalues +-|a|."""

    a: tuple

    def __post_init__(self):
        a = tuple(float(x) for x in self.a)
        if len(a) != 3 or not any(a):
            raise ValidationError(f"observable vector must be a nonzero 3-vector, got {a}")
        object.__setattr__(self, "a", a)


def p_cert(theory: TheoryModel, state, spec: UncertaintySpec):
    """Weighted probability sum_m p(m) p_state(o^(m) | m)."""
    spec.check(theory)
    total = sum(w * theory.prob(state, m, o)
                for w, m, o in zip(spec.meas_dist.weights, spec.measurements, spec.outcome_string))
    return clamp01(total)


def _effect_vector(n1, n2, o1, o2, w) -> np.ndarray:
    s1 = 1.0 if o1 == 0 else -1.0
    s2 = 1.0 if o2 == 0 else -1.0
    return float(w) * s1 * np.asarray(n1.n) + (1 - float(w)) * s2 * np.asarray(n2.n)


def zeta_qubit_analytic(n1: MeasurementDirection, n2: MeasurementDirection, o1: int, o2: int,
                        meas_dist: MeasurementDistribution | None = None) -> ZetaResult:
    """Closed form 1/2 + |w s1 n1 + (1-w) s2 n2| / 2, maximized at that vector's direction."""
    w = (meas_dist or MeasurementDistribution.uniform()).weights[0]
    v = _effect_vector(n1, n2, o1, o2, w)
    norm = float(np.linalg.norm(v))
    r = v / norm if norm > EXACT_TOL else np.array([0.0, 0.0, 1.0])
    return ZetaResult(0.5 + norm / 2, BlochVector(tuple(r)), "analytic")


def zeta_polytope(theory: PolytopeTheory, spec: UncertaintySpec) -> ZetaResult:
    """Exact maximum over vertices; P_cert is affine so a vertex attains it."""
    if not theory.extreme_states:
        raise DomainError(f"{theory.name} has no extreme states")
    spec.check(theory)
    w1, w2 = spec.meas_dist.weights
    (m1, m2), (o1, o2) = spec.measurements, spec.outcome_string
    values = [w1 * a + w2 * b for a, b in zip(theory.vertex_values(m1, o1), theory.vertex_values(m2, o2))]
    best = max(range(len(values)), key=lambda i: (values[i], -i))
    return ZetaResult(values[best], theory.extreme_states[best], "vertex-enumeration")


def _binary_entropy(p: float) -> float:
    if p <= 0 or p >= 1:
        return 0.0
    return -(p * math.log2(p) + (1 - p) * math.log2(1 - p))


def zeta_numeric(theory: TheoryModel, spec: UncertaintySpec, resolution: int | None = None,
                 tolerance: float | None = None) -> ZetaResult:
    """Brute-force maximization of P_cert with an honest error bound.

    Qubit: Fibonacci grid on the sphere (an affine function on the ball
    peaks on the sphere) plus tangent-plane refinement; the bound is the
    Lipschitz constant 1/2 times the grid spacing. Polytope: barycentric
    lattice plus pairwise refinement; bound = vertex spread * V / (2k).
    Ontic and other theories: sampled states; bound = gap to 1.

    ``certified`` is False when the bound exceeds ``tolerance``.
    """
    spec.check(theory)
    w1, w2 = (float(x) for x in spec.meas_dist.weights)
    (m1, m2), (o1, o2) = spec.measurements, spec.outcome_string

    if isinstance(theory, QubitTheory):
        n = resolution or SPHERE_POINTS
        grid = fibonacci_sphere(n)
        vals = w1 * theory.prob_many(grid, m1, o1) + w2 * theory.prob_many(grid, m2, o2)
        i = int(np.argmax(vals))

        def f(r):
            return float(w1 * theory.prob_many(r, m1, o1)[0] + w2 * theory.prob_many(r, m2, o2)[0])

        spacing = fibonacci_spacing(n)
        r, val = refine_on_sphere(f, grid[i], 2 * spacing)
        tol = P_CERT_LIPSCHITZ * spacing
        state = BlochVector(tuple(r))
    elif isinstance(theory, PolytopeTheory):
        V = len(theory.labels)
        k = lattice_resolution(V, resolution or LATTICE_BUDGET)
        C = simplex_lattice(V, k)
        a = np.array([float(x) for x in theory.vertex_values(m1, o1)])
        b = np.array([float(x) for x in theory.vertex_values(m2, o2)])
        coef = w1 * a + w2 * b
        vals = C @ coef
        i = int(np.argmax(vals))
        c, val = refine_weights(lambda c: float(c @ coef), C[i])
        tol = float(coef.max() - coef.min()) * V / (2 * k)
        state = PolytopeState(tuple(c))
    else:
        states = theory.sample(resolution or ONTIC_SAMPLES, seed=0)
        vals = w1 * theory.prob_many(states, m1, o1) + w2 * theory.prob_many(states, m2, o2)
        i = int(np.argmax(vals))
        val, state = float(vals[i]), states[i]
        tol = 1.0 - val
    val = min(1.0, max(0.0, val))
    ok = tolerance is None or tol <= tolerance
    return ZetaResult(val, state, "numeric-search", tol, ok)


def zeta(theory: TheoryModel, spec: UncertaintySpec, **kwargs) -> ZetaResult:
    """Best available method: analytic (qubit), exact (polytope), else numeric."""
    if isinstance(theory, QubitTheory):
        spec.check(theory)
        n1, n2 = (theory.resolve(m) for m in spec.measurements)
        return zeta_qubit_analytic(n1, n2, *spec.outcome_string, spec.meas_dist)
    if isinstance(theory, PolytopeTheory):
        return zeta_polytope(theory, spec)
    return zeta_numeric(theory, spec, **kwargs)


def zeta_by_string(theory: TheoryModel, m1, m2,
                   meas_dist: MeasurementDistribution | None = None, **kwargs) -> dict:
    """zeta for every outcome string of a measurement pair, keyed by (o1, o2)."""
    dist = meas_dist or MeasurementDistribution.uniform()
    arities = (theory.arity(m1), theory.arity(m2))
    return {o: zeta(theory, UncertaintySpec((m1, m2), o, dist), **kwargs)
            for o in product(range(arities[0]), range(arities[1]))}


def zeta_max(theory: TheoryModel, m1, m2, meas_dist=None, **kwargs) -> tuple[tuple, ZetaResult]:
    """The binding outcome string (largest zeta; lowest string on ties) and its result."""
    table = zeta_by_string(theory, m1, m2, meas_dist, **kwargs)
    key = max(table, key=lambda o: (table[o].zeta, tuple(-x for x in o)))
    return key, table[key]


def shannon_entropy(d) -> float:
    """-sum p log2 p in bits, with 0 log 0 = 0."""
    probs = d.probs if isinstance(d, OutcomeDistribution) else OutcomeDistribution(tuple(d)).probs
    return float(-sum(float(p) * math.log2(float(p)) for p in probs if p > 0))


def avg_entropy(theory: TheoryModel, state, measurements: Sequence | UncertaintySpec,
                meas_dist: MeasurementDistribution | None = None) -> float:
    """sum_m p(m) H_state(m)."""
    if isinstance(measurements, UncertaintySpec):
        meas_dist = measurements.meas_dist
        measurements = measurements.measurements
    dist = meas_dist or MeasurementDistribution.uniform(len(measurements))
    if len(dist) != len(measurements):
        raise DomainError("one weight per measurement is required")
    return sum(float(w) * shannon_entropy(theory.distribution(state, m))
               for w, m in zip(dist.weights, measurements))


def entropic_bound_estimate(theory: TheoryModel, measurements: Sequence,
                            meas_dist: MeasurementDistribution | None = None,
                            resolution: int | None = None,
                            tolerance: float | None = None) -> EntropicBound:
    """Smallest average entropy over states: an empirical estimate of the
    best constant in an entropic uncertainty relation.

    Average entropy is concave in the state, so the minimum sits on extreme
    points: exact vertex enumeration for polytopes, the pure-state sphere
    for the qubit (bound = binary entropy of half the grid spacing).
    """
    measurements = list(measurements)
    dist = meas_dist or MeasurementDistribution.uniform(len(measurements))

    def H(state):
        return avg_entropy(theory, state, measurements, dist)

    if isinstance(theory, PolytopeTheory):
        vals = [H(v) for v in theory.extreme_states]
        i = int(np.argmin(vals))
        return EntropicBound(vals[i], theory.extreme_states[i], "vertex-enumeration")
    if isinstance(theory, QubitTheory):
        n = resolution or 200_000
        grid = fibonacci_sphere(n)
        total = np.zeros(n)
        for w, m in zip(dist.weights, measurements):
            p = np.clip(theory.prob_many(grid, m, 0), 0.0, 1.0)
            with np.errstate(divide="ignore", invalid="ignore"):
                h = -(np.where(p > 0, p * np.log2(p), 0.0) + np.where(p < 1, (1 - p) * np.log2(1 - p), 0.0))
            total += float(w) * h
        i = int(np.argmin(total))
        spacing = fibonacci_spacing(n)
        r, neg = refine_on_sphere(lambda r: -H(BlochVector(tuple(r))), grid[i], 2 * spacing)
        tol = _binary_entropy(min(0.5, spacing / 2))
        ok = tolerance is None or tol <= tolerance
        return EntropicBound(-neg, BlochVector(tuple(r)), "numeric-search", tol, ok)
    states = theory.sample(resolution or ONTIC_SAMPLES, seed=0)
    vals = [H(s) for s in states]
    i = int(np.argmin(vals))
    tol = vals[i]  # entropies are nonnegative
    ok = tolerance is None or tol <= tolerance
    return EntropicBound(vals[i], states[i], "numeric-search", tol, ok)


def robertson_terms(state: BlochVector, A: QubitObservable, B: QubitObservable) -> tuple[float, float]:
    """(Delta A * Delta B, |<[A, B]>| / 2) for a qubit state."""
    r = np.asarray(state.r)
    a, b = np.asarray(A.a), np.asarray(B.a)
    dA = math.sqrt(max(0.0, a @ a - (a @ r) ** 2))
    dB = math.sqrt(max(0.0, b @ b - (b @ r) ** 2))
    return dA * dB, abs(float(np.cross(a, b) @ r))
