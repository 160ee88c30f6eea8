from fractions import Fraction

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import settings

from gnst.core import MeasurementId
from gnst.theories import BlochVector, MeasurementDirection, PolytopeTheory, builtin

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(scope="session")
def qubit():
    return builtin("qubit")


@pytest.fixture(scope="session")
def toy():
    return builtin("toy")


@pytest.fixture(scope="session")
def classical():
    return builtin("classical")


@pytest.fixture(scope="session")
def gbit():
    return builtin("gbit")


@pytest.fixture(scope="session")
def bellmermin():
    return builtin("bellmermin")


@st.composite
def unit_vectors(draw):
    v = np.array(draw(st.lists(st.floats(-1, 1), min_size=3, max_size=3)))
    if np.linalg.norm(v) < 1e-3:
        v = np.array([0.0, 0.0, 1.0])
    return v / np.linalg.norm(v)


@st.composite
def directions(draw):
    return MeasurementDirection(tuple(draw(unit_vectors())))


@st.composite
def bloch_vectors(draw):
    r = draw(unit_vectors()) * draw(st.floats(0, 1))
    return BlochVector(tuple(r))


@st.composite
def polytope_theories(draw, max_vertices=7, denominator=12):
    """Random rational polytope theory with two binary measurements a, b."""
    n = draw(st.integers(2, max_vertices))
    tables = []
    for _ in range(n):
        row = {}
        for m in ("a", "b"):
            p = Fraction(draw(st.integers(0, denominator)), denominator)
            row[m] = (p, 1 - p)
        tables.append(row)
    return PolytopeTheory("random", [MeasurementId("a"), MeasurementId("b")],
                          [f"v{i}" for i in range(n)], tables)


@st.composite
def weights(draw, n):
    w = np.array(draw(st.lists(st.floats(0.01, 1), min_size=n, max_size=n)))
    return tuple(w / w.sum())
