import math
from fractions import Fraction
from itertools import product

import mpmath
import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st

from gnst.bellmermin import Preparation, sample_ontic
from gnst.core import DomainError, ValidationError
from gnst.randomness import (
    TheoremViolation,
    amgm_chain,
    certified_bits,
    genuine_source_verdict,
    guessing_probability,
    min_entropy,
    product_process,
    worst_case_analysis,
)
from gnst.theories import BlochVector, PolytopeState, builtin, load_polytope_theory
from gnst.uncertainty import zeta_by_string

from conftest import bloch_vectors, directions, polytope_theories

mpmath.mp.dps = 30
ZETA_Q = 0.5 + 1 / (2 * math.sqrt(2))
# independent high-precision oracle for -2 log2(zeta_Q)
QUBIT_FLOOR = float(-2 * mpmath.log(mpmath.mpf(1) / 2 + 1 / (2 * mpmath.sqrt(2)), 2))
TOY_FLOOR = float(-2 * mpmath.log(mpmath.mpf(3) / 4, 2))


def test_oracle_constants():
    assert abs(QUBIT_FLOOR - 0.456893393673) <= 1e-12
    assert abs(TOY_FLOOR - 0.830074998558) <= 1e-12


def test_guessing_probability_examples():
    assert guessing_probability((0.25,) * 4) == 0.25
    assert guessing_probability((1, 0)) == 1
    q = (ZETA_Q, 1 - ZETA_Q)
    joint = [a * b for a in q for b in q]
    assert abs(guessing_probability(joint) - 0.728553) <= 1e-6


def test_min_entropy_examples():
    assert min_entropy((0.25,) * 4) == 2.0
    assert min_entropy((1, 0)) == 0.0
    q = (ZETA_Q, 1 - ZETA_Q)
    assert abs(min_entropy([a * b for a in q for b in q]) - QUBIT_FLOOR) <= 1e-12
    with pytest.raises(ValidationError):
        min_entropy((0.5, 0.6))


def test_product_process_examples(qubit, classical):
    assert product_process(qubit, BlochVector((0, 1, 0)), "z", "x").probs == (0.25,) * 4
    diag = BlochVector((1 / math.sqrt(2), 0, 1 / math.sqrt(2)))
    assert abs(max(product_process(qubit, diag, "z", "x").probs) - ZETA_Q ** 2) <= 1e-15
    for v in classical.extreme_states:
        assert sorted(product_process(classical, v, "m1", "m2").probs) == [0, 0, 0, 1]


def test_product_process_rejects_nonbinary():
    doc = {"name": "tri", "measurements": [{"id": "a", "arity": 3}, {"id": "b", "arity": 2}],
           "vertices": [{"label": "v", "table": {"a": [1, 0, 0], "b": [1, 0]}}]}
    tri = load_polytope_theory(doc)
    with pytest.raises(DomainError):
        product_process(tri, tri.extreme_states[0], "a", "b")


def test_certified_bits_examples():
    assert certified_bits(1) == 0.0
    assert abs(certified_bits(ZETA_Q) - QUBIT_FLOOR) <= 1e-12
    assert abs(certified_bits(Fraction(3, 4)) - TOY_FLOOR) <= 1e-12
    assert abs(certified_bits(Fraction(3, 4)) - 0.830075) <= 1e-6
    for bad in (0, -0.1, 1.01):
        with pytest.raises(DomainError):
            certified_bits(bad)


def test_amgm_examples():
    c = amgm_chain(ZETA_Q, ZETA_Q, ZETA_Q)
    assert c.holds
    assert c.links[0].lhs == pytest.approx(c.links[0].rhs, abs=1e-15)
    assert c.links[1].lhs == pytest.approx(c.links[1].rhs, abs=1e-15)
    c = amgm_chain(1, 0, 0.5)
    assert c.links[-1].lhs == 0 and c.links[-1].rhs == 0.25
    c = amgm_chain(0.9, 0.5, 0.7)
    assert c.links[-1].lhs == pytest.approx(0.45) and c.links[-1].rhs == pytest.approx(0.49)
    with pytest.raises(DomainError):
        amgm_chain(0.9, 0.9, 0.7)


@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_amgm_chain_holds_whenever_precondition_does(p1, p2, slack):
    z = min(1.0, (p1 + p2) / 2 + slack * (1 - (p1 + p2) / 2))
    if z <= 0:
        return
    c = amgm_chain(p1, p2, z)
    assert c.holds and p1 * p2 <= z * z + 1e-12


# --- worst case ---------------------------------------------------------------------


def test_qubit_worst_case(qubit):
    rep = worst_case_analysis(qubit, "z", "x")
    assert abs(rep.certified_bits - QUBIT_FLOOR) <= 1e-12
    assert abs(rep.worst_case_bits - QUBIT_FLOOR) <= 1e-9
    target = np.array([1, 0, 1]) / math.sqrt(2)
    assert math.acos(min(1.0, float(np.dot(rep.worst_case_state.r, target)))) <= 1e-4
    assert rep.best_case_bits == 2.0
    assert np.allclose(np.abs(rep.best_case_state.r), (0, 1, 0))
    assert rep.genuine_source and rep.certified


def test_toy_worst_case(toy):
    rep = worst_case_analysis(toy, "Z", "X")
    assert rep.zeta == Fraction(3, 4)
    assert abs(rep.certified_bits - TOY_FLOOR) <= 1e-12
    # pure states alone give one bit; a mixture of two of them reaches the floor
    assert rep.vertex_worst_case_bits == 1.0
    assert abs(rep.worst_case_bits - TOY_FLOOR) <= 1e-12
    w = toy.to_ontic(rep.worst_case_state)
    assert sorted(w.ontic_weights) == [0, Fraction(1, 4), Fraction(1, 4), Fraction(1, 2)]
    assert rep.genuine_source


def test_toy_mixture_reaching_floor(toy):
    half = Fraction(1, 2)
    s = PolytopeState((half, 0, half, 0, 0, 0))  # {1,2} and {1,3} in equal parts
    assert toy.to_ontic(s).ontic_weights == (half, Fraction(1, 4), Fraction(1, 4), 0)
    assert toy.prob(s, "Z", 0) == toy.prob(s, "X", 0) == Fraction(3, 4)
    assert guessing_probability(product_process(toy, s, "Z", "X")) == Fraction(9, 16)


def test_classical_and_gbit_not_genuine(classical, gbit):
    rep = worst_case_analysis(classical)
    assert rep.worst_case_bits == 0.0 and rep.certified_bits == 0.0 and not rep.genuine_source
    ok, rep = genuine_source_verdict(gbit, "m1", "m2")
    assert ok is False and rep.zeta == 1


def test_verdicts(qubit, bellmermin):
    assert genuine_source_verdict(qubit, "z", "x")[0] is True
    for pair in (("z", "x"), ("x", "y"), ("z", "z")):
        ok, rep = genuine_source_verdict(bellmermin, *pair)
        assert ok is False and rep.worst_case_bits == 0.0


def test_compatible_qubit_pair_is_not_genuine(qubit):
    ok, rep = genuine_source_verdict(qubit, "z", "z")
    assert not ok and rep.zeta == 1.0


# --- properties -----------------------------------------------------------------------


@given(bloch_vectors(), directions(), directions())
def test_theorem_on_qubit_states(r, n1, n2):
    q = builtin("qubit")
    table = zeta_by_string(q, n1, n2)
    floor = certified_bits(max(v.zeta for v in table.values()))
    assert min_entropy(product_process(q, r, n1, n2)) >= floor - 1e-9


@given(st.lists(st.floats(0.01, 1), min_size=2, max_size=4), st.lists(st.floats(0.01, 1), min_size=2, max_size=4))
def test_min_entropy_additive_on_products(a, b):
    a, b = np.array(a) / sum(a), np.array(b) / sum(b)
    joint = np.outer(a, b).ravel()
    joint = joint / joint.sum()
    assert min_entropy(joint) == pytest.approx(min_entropy(a) + min_entropy(b), abs=1e-9)


@given(st.floats(0.01, 1), st.floats(0.01, 1))
def test_certified_bits_monotone(z1, z2):
    lo, hi = sorted((z1, z2))
    assert certified_bits(lo) >= certified_bits(hi)


@given(directions(), directions())
def test_report_is_self_consistent(n1, n2):
    q = builtin("qubit")
    rep = worst_case_analysis(q, n1, n2)
    assert rep.certified_bits - 1e-6 <= rep.worst_case_bits <= rep.best_case_bits + 1e-12
    assert rep.genuine_source == (rep.zeta < 1 - 1e-9)
    assert abs(min_entropy(product_process(q, rep.worst_case_state, n1, n2)) - rep.worst_case_bits) <= 1e-9
    assert abs(min_entropy(product_process(q, rep.best_case_state, n1, n2)) - rep.best_case_bits) <= 1e-9


def _lattice_guess(th, k):
    """Independent brute force: every composition of k into len(labels) parts."""
    V = len(th.labels)
    xs = np.array([float(x) for x in th.vertex_values("a", 0)])
    ys = np.array([float(y) for y in th.vertex_values("b", 0)])
    best, worst = 1.0, 0.0
    for comp in product(range(k + 1), repeat=V - 1):
        if sum(comp) > k:
            continue
        c = np.array(comp + (k - sum(comp),)) / k
        x, y = c @ xs, c @ ys
        g = max(x, 1 - x) * max(y, 1 - y)
        best, worst = min(best, g), max(worst, g)
    return best, worst


@given(polytope_theories(max_vertices=4))
def test_polytope_extremes_match_brute_force(th):
    rep = worst_case_analysis(th, "a", "b")
    g_worst, g_best = 2 ** -rep.worst_case_bits, 2 ** -rep.best_case_bits
    k = 24
    lat_best, lat_worst = _lattice_guess(th, k)
    # exact optimum bounds the lattice; the lattice comes within its mesh of it
    assert lat_worst <= g_worst + 1e-12
    assert lat_best >= g_best - 1e-12
    assert g_worst - lat_worst <= 2 / k
    assert lat_best - g_best <= 2 / k
    # reported states realize the reported values
    assert abs(guessing_probability(product_process(th, rep.worst_case_state, "a", "b")) - g_worst) <= 1e-12
    assert abs(guessing_probability(product_process(th, rep.best_case_state, "a", "b")) - g_best) <= 1e-12
    assert rep.worst_case_bits >= rep.certified_bits - 1e-9
    assert rep.vertex_worst_case_bits >= rep.worst_case_bits


def test_sampled_ontic_state_is_deterministic(bellmermin):
    pair = sample_ontic(Preparation((0, 0, 1)), seed=9)
    assert min_entropy(product_process(bellmermin, pair, "z", "x")) == 0.0


def test_theorem_violation_is_an_assertion():
    assert issubclass(TheoremViolation, AssertionError)
