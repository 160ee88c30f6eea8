import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st
from scipy.spatial import cKDTree
from scipy.stats import entropy as scipy_entropy

from gnst.core import DomainError, MeasurementDistribution, UncertaintySpec
from gnst.search import fibonacci_sphere, fibonacci_spacing, simplex_lattice, lattice_size
from gnst.theories import BlochVector, MeasurementDirection, PolytopeTheory, builtin
from gnst.uncertainty import (
    QubitObservable,
    avg_entropy,
    entropic_bound_estimate,
    p_cert,
    robertson_terms,
    shannon_entropy,
    zeta,
    zeta_by_string,
    zeta_max,
    zeta_numeric,
    zeta_polytope,
    zeta_qubit_analytic,
)

from conftest import bloch_vectors, directions, polytope_theories, weights

ZETA_Q = 0.5 + 1 / (2 * math.sqrt(2))
DIAG = BlochVector((1 / math.sqrt(2), 0, 1 / math.sqrt(2)))
ZX = UncertaintySpec(("z", "x"), (0, 0))


def test_p_cert_examples(qubit, toy):
    assert p_cert(qubit, BlochVector((0, 0, 1)), ZX) == pytest.approx(0.75, abs=1e-15)
    assert p_cert(qubit, DIAG, ZX) == pytest.approx(0.853553, abs=1e-6)
    assert p_cert(toy, toy.vertex("12"), UncertaintySpec(("Z", "X"), (0, 0))) == Fraction(3, 4)


def test_p_cert_rejects_unknown_measurement(qubit):
    with pytest.raises(DomainError):
        p_cert(qubit, DIAG, UncertaintySpec(("z", "w"), (0, 0)))


def test_qubit_analytic_examples(qubit):
    z, x = qubit.resolve("z"), qubit.resolve("x")
    r = zeta_qubit_analytic(z, x, 0, 0)
    assert abs(r.zeta - ZETA_Q) <= 1e-15
    assert np.allclose(r.maximizing_state.r, DIAG.r, atol=1e-15)
    assert zeta_qubit_analytic(z, z, 0, 0).zeta == 1.0
    assert zeta_qubit_analytic(z, MeasurementDirection((0, 0, -1)), 0, 0).zeta == 0.5


def test_polytope_examples(classical, gbit, toy):
    for o in ((0, 0), (0, 1), (1, 0), (1, 1)):
        res = zeta_polytope(classical, UncertaintySpec(("m1", "m2"), o))
        assert res.zeta == (1 if o[0] == o[1] else Fraction(1, 2))
    assert zeta_polytope(gbit, UncertaintySpec(("m1", "m2"), (0, 0))).zeta == 1
    res = zeta_polytope(toy, UncertaintySpec(("Z", "X"), (0, 0)))
    assert res.zeta == Fraction(3, 4) and isinstance(res.zeta, Fraction)
    with pytest.raises(DomainError):
        zeta_polytope(PolytopeTheory("empty", toy.measurements, [], []), UncertaintySpec(("Z", "X")))


def test_numeric_qubit_matches_analytic(qubit):
    res = zeta_numeric(qubit, ZX, resolution=1_000_000)
    assert abs(res.zeta - ZETA_Q) <= 1e-4
    assert res.certified_tolerance == pytest.approx(0.5 * math.sqrt(4 * math.pi / 1_000_000))
    res = zeta_numeric(qubit, UncertaintySpec(("z", "y"), (0, 1)), resolution=1_000_000)
    assert abs(res.zeta - ZETA_Q) <= 1e-4


def test_numeric_toy_matches_enumeration(toy):
    res = zeta_numeric(toy, UncertaintySpec(("Z", "X"), (0, 0)))
    assert abs(res.zeta - 0.75) <= 1e-6


def test_numeric_flags_coarse_grids(qubit, toy):
    coarse = zeta_numeric(qubit, ZX, resolution=100, tolerance=1e-6)
    assert not coarse.certified and coarse.certified_tolerance > 1e-6
    assert zeta_numeric(qubit, ZX, resolution=100, tolerance=1.0).certified
    assert not zeta_numeric(toy, UncertaintySpec(("Z", "X")), resolution=10, tolerance=1e-9).certified


def test_numeric_never_overshoots_and_bound_is_honest(qubit):
    for n in (50, 500, 5000):
        res = zeta_numeric(qubit, ZX, resolution=n)
        assert res.zeta <= ZETA_Q + 1e-12
        assert ZETA_Q - res.zeta <= res.certified_tolerance


def test_fibonacci_covering_radius():
    for n in (1000, 10_000, 100_000):
        grid = fibonacci_sphere(n)
        probe = np.random.default_rng(n).normal(size=(20_000, 3))
        probe /= np.linalg.norm(probe, axis=1, keepdims=True)
        dist, _ = cKDTree(grid).query(probe)
        assert dist.max() <= fibonacci_spacing(n)


def test_simplex_lattice_shape():
    C = simplex_lattice(4, 5)
    assert len(C) == lattice_size(4, 5) == math.comb(8, 3)
    assert np.allclose(C.sum(axis=1), 1) and (C >= 0).all()
    assert {tuple(r) for r in C[:4]} == {tuple(r) for r in np.eye(4)}


def test_zeta_dispatch_and_tables(qubit, toy, bellmermin):
    assert zeta(qubit, ZX).method == "analytic"
    assert zeta(toy, UncertaintySpec(("Z", "X"))).method == "vertex-enumeration"
    assert zeta(bellmermin, ZX).method == "numeric-search"
    assert zeta(bellmermin, ZX).zeta == 1.0
    key, res = zeta_max(toy, "Z", "X")
    assert key == (0, 0) and res.zeta == Fraction(3, 4)
    assert set(zeta_by_string(qubit, "z", "x")) == {(0, 0), (0, 1), (1, 0), (1, 1)}


# --- entropies ------------------------------------------------------------------


@pytest.mark.parametrize("d,expected", [((0.5, 0.5), 1.0), ((1, 0), 0.0)])
def test_shannon_examples(d, expected):
    assert shannon_entropy(d) == expected


def test_shannon_against_scipy():
    assert abs(shannon_entropy((0.25, 0.75)) - scipy_entropy([0.25, 0.75], base=2)) <= 1e-15
    assert abs(shannon_entropy((0.25, 0.75)) - 0.811278) <= 1e-6


def test_avg_entropy_examples(qubit, classical):
    assert avg_entropy(qubit, BlochVector((0, 0, 1)), ("z", "x")) == 0.5
    assert avg_entropy(qubit, BlochVector((0, 1, 0)), ZX) == 1.0
    for v in classical.extreme_states:
        assert avg_entropy(classical, v, ("m1", "m2")) == 0.0
    with pytest.raises(DomainError):
        avg_entropy(qubit, DIAG, ("z", "x"), MeasurementDistribution.uniform(3))


def test_entropic_bound_examples(qubit, classical, toy):
    q = entropic_bound_estimate(qubit, ("z", "x"))
    assert abs(q.bits - 0.5) <= max(q.certified_tolerance, 1e-6)
    assert q.bits >= 0.5 - 1e-9
    assert entropic_bound_estimate(classical, ("m1", "m2")).bits == 0.0
    assert entropic_bound_estimate(toy, ("Z", "X")).bits == 0.5


# --- Robertson -------------------------------------------------------------------


def test_robertson_examples():
    a, b = QubitObservable((0, 0, 1)), QubitObservable((1, 0, 0))
    assert robertson_terms(BlochVector((0, 1, 0)), a, b) == (1.0, 1.0)
    assert robertson_terms(BlochVector((0, 0, 1)), a, b) == (0.0, 0.0)
    assert robertson_terms(DIAG, a, a)[1] == 0.0


def _pauli_oracle(r, a, b):
    """Robertson terms from explicit 2x2 matrices."""
    s = [np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.array([[1, 0], [0, -1]])]
    rho = (np.eye(2) + sum(ri * si for ri, si in zip(r, s))) / 2
    A = sum(x * si for x, si in zip(a, s))
    B = sum(x * si for x, si in zip(b, s))
    ev = lambda M: np.trace(rho @ M)
    dA = math.sqrt(max(0.0, (ev(A @ A) - ev(A) ** 2).real))
    dB = math.sqrt(max(0.0, (ev(B @ B) - ev(B) ** 2).real))
    return dA * dB, abs(ev(A @ B - B @ A)) / 2


@given(bloch_vectors(), st.lists(st.floats(-2, 2), min_size=6, max_size=6))
def test_robertson_matches_matrix_oracle(r, ab):
    a, b = ab[:3], ab[3:]
    if not any(a) or not any(b):
        return
    lhs, rhs = robertson_terms(r, QubitObservable(a), QubitObservable(b))
    olhs, orhs = _pauli_oracle(r.r, a, b)
    assert lhs == pytest.approx(olhs, abs=1e-9)
    assert rhs == pytest.approx(orhs, abs=1e-9)
    assert lhs >= rhs - 1e-12


# --- invariants --------------------------------------------------------------------


@given(polytope_theories(), st.sampled_from([(0, 0), (0, 1), (1, 0), (1, 1)]), st.data())
def test_vertex_optimality(th, o, data):
    spec = UncertaintySpec(("a", "b"), o)
    z = zeta_polytope(th, spec).zeta
    for s in th.sample(20, seed=data.draw(st.integers(0, 999))):
        assert p_cert(th, s, spec) <= z + 1e-12
    assert max(p_cert(th, v, spec) for v in th.extreme_states) == z


@given(directions(), directions(), st.sampled_from([(0, 0), (0, 1), (1, 0), (1, 1)]),
       st.fractions(Fraction(1, 20), Fraction(19, 20)))
def test_qubit_analytic_vs_grid_oracle(n1, n2, o, w):
    q = builtin("qubit")
    dist = MeasurementDistribution((w, 1 - w))
    an = zeta_qubit_analytic(n1, n2, *o, dist)
    grid = fibonacci_sphere(20_000)
    vals = float(w) * q.prob_many(grid, n1, o[0]) + float(1 - w) * q.prob_many(grid, n2, o[1])
    assert vals.max() <= an.zeta + 1e-12
    assert an.zeta - vals.max() <= 0.5 * fibonacci_spacing(20_000)
    assert abs(p_cert(q, an.maximizing_state, UncertaintySpec((n1, n2), o, dist)) - an.zeta) <= 1e-12


@given(bloch_vectors(), directions(), directions())
def test_per_state_bound(r, n1, n2):
    q = builtin("qubit")
    for o, res in zeta_by_string(q, n1, n2).items():
        assert p_cert(q, r, UncertaintySpec((n1, n2), o)) <= res.zeta + 1e-12


@given(directions(), directions())
def test_zeta_at_least_half_and_at_most_one(n1, n2):
    q = builtin("qubit")
    assert 0.5 - 1e-12 <= zeta_max(q, n1, n2)[1].zeta <= 1 + 1e-12
