"""Built-in theories: qubit, finite polytope theories (classical bit, gbit,
toy bit) and the ingestion path for user-defined polytope theories."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import rng
from .core import (
    EXACT_TOL,
    DomainError,
    IngestionError,
    MeasurementId,
    TheoryModel,
    ValidationError,
    is_exact,
    validate_distribution,
)

# ---------------------------------------------------------------------------
# Qubit
# ---------------------------------------------------------------------------


def _vec3(v) -> tuple:
    t = tuple(float(x) for x in v)
    if len(t) != 3:
        raise ValidationError(f"expected a 3-vector, got {len(t)} components")
    return t


@dataclass(frozen=True)
class BlochVector:
    r: tuple

    def __post_init__(self):
        r = _vec3(self.r)
        if math.sqrt(sum(x * x for x in r)) > 1 + EXACT_TOL:
            raise ValidationError(f"Bloch vector {r} has norm > 1")
        object.__setattr__(self, "r", r)

    @property
    def norm(self) -> float:
        return math.sqrt(sum(x * x for x in self.r))

    def as_array(self) -> np.ndarray:
        return np.array(self.r)

    @classmethod
    def mixture(cls, states, weights):
        r = sum(float(w) * s.as_array() for s, w in zip(states, weights))
        n = np.linalg.norm(r)
        if n > 1:  # rounding only; convex combinations stay in the ball
            r = r / n
        return cls(tuple(r))


@dataclass(frozen=True)
class MeasurementDirection:
    """Projective qubit measurement along ``n``; outcome 0 is the +n outcome."""

    n: tuple
    label: str | None = None

    def __post_init__(self):
        n = _vec3(self.n)
        if abs(math.sqrt(sum(x * x for x in n)) - 1) > EXACT_TOL:
            raise ValidationError(f"measurement direction {n} is not a unit vector")
        object.__setattr__(self, "n", n)

    arity = 2

    @property
    def id(self) -> str:
        return self.label or ",".join(f"{x:.12g}" for x in self.n)

    def __str__(self):
        return self.id

    def as_array(self) -> np.ndarray:
        return np.array(self.n)

    @classmethod
    def from_vector(cls, v, label=None) -> "MeasurementDirection":
        a = np.asarray(v, dtype=float)
        norm = np.linalg.norm(a)
        if norm == 0:
            raise ValidationError("zero vector has no direction")
        return cls(tuple(a / norm), label)


AXES = {
    "x": MeasurementDirection((1.0, 0.0, 0.0), "x"),
    "y": MeasurementDirection((0.0, 1.0, 0.0), "y"),
    "z": MeasurementDirection((0.0, 0.0, 1.0), "z"),
}


def parse_direction(ref) -> MeasurementDirection:
    """Accept a MeasurementDirection, an axis name, "a,b,c" text or a 3-sequence."""
    if isinstance(ref, MeasurementDirection):
        return ref
    if isinstance(ref, str):
        key = ref.strip().lower()
        if key in AXES:
            return AXES[key]
        try:
            parts = [float(x) for x in key.split(",")]
        except ValueError:
            raise DomainError(f"unknown qubit measurement {ref!r}") from None
        if len(parts) != 3:
            raise DomainError(f"unknown qubit measurement {ref!r}")
        return MeasurementDirection.from_vector(parts)
    try:
        return MeasurementDirection.from_vector(ref)
    except (TypeError, ValidationError) as exc:
        raise DomainError(f"unknown qubit measurement {ref!r}") from exc


def born_prob(state: BlochVector, meas: MeasurementDirection, o: int) -> float:
    """Two-level Born rule: (1 + r.n)/2 for outcome 0, (1 - r.n)/2 for outcome 1."""
    if o not in (0, 1):
        raise DomainError(f"qubit outcome must be 0 or 1, got {o}")
    dot = sum(a * b for a, b in zip(state.r, meas.n))
    return (1 + dot) / 2 if o == 0 else (1 - dot) / 2


class QubitTheory(TheoryModel):
    name = "qubit"
    state_kind = "ball"
    measurements = (AXES["x"], AXES["y"], AXES["z"])

    @property
    def default_pair(self):
        return (AXES["z"], AXES["x"])

    def resolve(self, m) -> MeasurementDirection:
        return parse_direction(m)

    def check_state(self, state) -> None:
        if not isinstance(state, BlochVector):
            raise DomainError(f"qubit theory expects a BlochVector, got {type(state).__name__}")

    def _prob(self, state, meas, o):
        return born_prob(state, meas, o)

    def prob_many(self, states, m, o):
        R = np.asarray(states, dtype=float).reshape(-1, 3)
        sign = 1.0 if o == 0 else -1.0
        return (1 + sign * (R @ self.resolve(m).as_array())) / 2

    def sample(self, n, seed=0):
        u = [rng.uniform(seed, s, 0, n) for s in range(3)]
        z = 2 * u[0] - 1
        phi = 2 * np.pi * u[1]
        s = np.sqrt(1 - z * z)
        radius = np.cbrt(u[2])
        pts = radius[:, None] * np.c_[s * np.cos(phi), s * np.sin(phi), z]
        return [BlochVector(tuple(p)) for p in pts]


# ---------------------------------------------------------------------------
# Finite polytope theories
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PolytopeState:
    """Convex weights over a polytope theory's extreme states."""

    coeffs: tuple

    def __post_init__(self):
        c = tuple(self.coeffs)
        if not c or any(x < -EXACT_TOL for x in c) or abs(sum(c) - 1) > EXACT_TOL:
            raise ValidationError(f"polytope coefficients {c} are not convex weights")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def vertex(cls, i: int, n: int) -> "PolytopeState":
        return cls(tuple(Fraction(int(k == i)) for k in range(n)))

    @classmethod
    def mixture(cls, states, weights):
        n = len(states[0].coeffs)
        if any(len(s.coeffs) != n for s in states):
            raise DomainError("polytope states belong to theories with different vertex counts")
        return cls(tuple(sum(w * s.coeffs[k] for s, w in zip(states, weights)) for k in range(n)))

    def as_array(self) -> np.ndarray:
        return np.array([float(x) for x in self.coeffs])


class PolytopeTheory(TheoryModel):
    """A theory whose state space is the convex hull of finitely many vertices.

    ``tables[v][m]`` is the outcome distribution of measurement ``m`` on
    vertex ``v``; entries are Fractions when the source document gave them
    as text, floats otherwise.
    """

    state_kind = "polytope"

    def __init__(self, name: str, measurements: Sequence[MeasurementId],
                 labels: Sequence[str], tables: Sequence[Mapping[str, tuple]]):
        if not labels:
            raise DomainError("a polytope theory needs at least one vertex")
        self.name = name
        self.measurements = tuple(measurements)
        self.labels = tuple(labels)
        self.tables = tuple(dict(t) for t in tables)
        self._by_id = {m.id: m for m in self.measurements}

    @property
    def extreme_states(self):
        n = len(self.labels)
        return tuple(PolytopeState.vertex(i, n) for i in range(n))

    def resolve(self, m) -> MeasurementId:
        key = m.id if isinstance(m, MeasurementId) else str(m)
        try:
            return self._by_id[key]
        except KeyError:
            raise DomainError(f"{self.name}: unknown measurement {m!r}") from None

    def check_state(self, state) -> None:
        if not isinstance(state, PolytopeState):
            raise DomainError(f"{self.name} expects a PolytopeState, got {type(state).__name__}")
        if len(state.coeffs) != len(self.labels):
            raise DomainError(f"{self.name}: state has {len(state.coeffs)} weights, "
                              f"theory has {len(self.labels)} vertices")

    def vertex_values(self, m, o: int) -> tuple:
        """p(o|m) on every vertex, in vertex order."""
        meas = self.resolve(m)
        return tuple(t[meas.id][o] for t in self.tables)

    def _prob(self, state, meas, o):
        vals = self.vertex_values(meas, o)
        return sum(c * v for c, v in zip(state.coeffs, vals))

    def prob_many(self, states, m, o):
        C = np.array([s.as_array() if isinstance(s, PolytopeState) else np.asarray(s, float)
                      for s in states]) if len(states) else np.zeros((0, len(self.labels)))
        return np.clip(C @ np.array([float(v) for v in self.vertex_values(m, o)]), 0.0, 1.0)

    def sample(self, n, seed=0):
        V = len(self.labels)
        e = np.column_stack([-np.log1p(-rng.uniform(seed, s, 0, n)) for s in range(V)])
        C = e / e.sum(axis=1, keepdims=True)
        return [PolytopeState(tuple(row)) for row in C]

    def vertex(self, label: str) -> PolytopeState:
        return PolytopeState.vertex(self.labels.index(label), len(self.labels))


# ---------------------------------------------------------------------------
# Theory-definition documents
# ---------------------------------------------------------------------------


def _parse_prob(value, where: str):
    if isinstance(value, bool):
        raise IngestionError("probability must be a number or numeric string", where)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise IngestionError(f"cannot parse probability {value!r}", where) from None
    raise IngestionError(f"probability must be a number or numeric string, got {value!r}", where)


def _require(doc, key, kind, where):
    if not isinstance(doc, dict) or key not in doc:
        raise IngestionError(f"missing field {key!r}", where)
    if not isinstance(doc[key], kind):
        raise IngestionError(f"field {key!r} has wrong type", f"{where}.{key}")
    return doc[key]


def load_polytope_theory(document, cls: type = PolytopeTheory) -> PolytopeTheory:
    """Build a polytope theory from a theory-definition document.

    ``document`` is a parsed JSON mapping, JSON text, or a path to a JSON file.
    """
    if isinstance(document, Path) or (isinstance(document, str) and not document.lstrip().startswith("{")):
        try:
            document = Path(document).read_text()
        except OSError as exc:
            raise IngestionError(f"cannot read theory document: {exc}") from None
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise IngestionError(f"invalid JSON: {exc}") from None
    if not isinstance(document, dict):
        raise IngestionError("document must be a JSON object")

    name = _require(document, "name", str, "$")
    raw_meas = _require(document, "measurements", list, "$")
    measurements = []
    for i, m in enumerate(raw_meas):
        where = f"$.measurements[{i}]"
        mid = _require(m, "id", str, where)
        arity = _require(m, "arity", int, where)
        if arity < 2:
            raise IngestionError(f"arity {arity} < 2", f"{where}.arity")
        if any(x.id == mid for x in measurements):
            raise IngestionError(f"duplicate measurement id {mid!r}", f"{where}.id")
        measurements.append(MeasurementId(mid, arity))
    if not measurements:
        raise IngestionError("no measurements", "$.measurements")

    raw_vertices = _require(document, "vertices", list, "$")
    if not raw_vertices:
        raise IngestionError("no vertices", "$.vertices")
    labels, tables = [], []
    for i, v in enumerate(raw_vertices):
        where = f"$.vertices[{i}]"
        label = str(v.get("label", i)) if isinstance(v, dict) else None
        table = _require(v, "table", dict, where)
        parsed = {}
        for m in measurements:
            row_where = f"{where}.table.{m.id}"
            row = table.get(m.id)
            if not isinstance(row, list) or len(row) != m.arity:
                raise IngestionError(f"expected {m.arity} outcome probabilities", row_where)
            probs = tuple(_parse_prob(p, f"{row_where}[{k}]") for k, p in enumerate(row))
            bad = validate_distribution(probs, tol=0 if all(map(is_exact, probs)) else EXACT_TOL)
            if bad:
                raise IngestionError("; ".join(b.detail for b in bad), row_where)
            parsed[m.id] = probs
        extra = set(table) - {m.id for m in measurements}
        if extra:
            raise IngestionError(f"unknown measurement ids {sorted(extra)}", f"{where}.table")
        labels.append(label)
        tables.append(parsed)
    return cls(name, measurements, labels, tables)


def _bundled(filename: str) -> dict:
    return json.loads(resources.files("gnst").joinpath("data", filename).read_text())


def classical_bit() -> PolytopeTheory:
    return load_polytope_theory(_bundled("classical_bit.json"))


# ---------------------------------------------------------------------------
# Box world: gbit and the PR box
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GbitState:
    """A point of the gbit square: outcome-0 probabilities of the two fiducials."""

    p0_m1: float
    p0_m2: float

    def __post_init__(self):
        for p in (self.p0_m1, self.p0_m2):
            if not -EXACT_TOL <= p <= 1 + EXACT_TOL:
                raise ValidationError(f"gbit coordinate {p!r} outside [0, 1]")

    @property
    def is_vertex(self) -> bool:
        return self.p0_m1 in (0, 1) and self.p0_m2 in (0, 1)

    @classmethod
    def mixture(cls, states, weights):
        return cls(sum(w * s.p0_m1 for s, w in zip(states, weights)),
                   sum(w * s.p0_m2 for s, w in zip(states, weights)))


class GbitTheory(PolytopeTheory):
    """Square state space; also accepts :class:`GbitState` directly."""

    def check_state(self, state):
        if not isinstance(state, GbitState):
            super().check_state(state)

    def _prob(self, state, meas, o):
        if isinstance(state, GbitState):
            p0 = state.p0_m1 if meas.id == self.measurements[0].id else state.p0_m2
            return p0 if o == 0 else 1 - p0
        return super()._prob(state, meas, o)

    def to_polytope(self, state: GbitState) -> PolytopeState:
        """Bilinear decomposition over the vertices 00, 01, 10, 11 (label = outcomes)."""
        a, b = state.p0_m1, state.p0_m2
        w = {"00": a * b, "01": a * (1 - b), "10": (1 - a) * b, "11": (1 - a) * (1 - b)}
        return PolytopeState(tuple(w[label] for label in self.labels))


def gbit() -> GbitTheory:
    return load_polytope_theory(_bundled("gbit.json"), cls=GbitTheory)


def pr_joint_prob(a: int, b: int, A: int, B: int) -> Fraction:
    """PR-box correlation P(ab|AB): 1/2 when a xor b = A and B, else 0."""
    return Fraction(1, 2) if (a ^ b) == (A & B) else Fraction(0)


def pr_conditional_state(A: int, a: int) -> GbitState:
    """Bob's collapsed gbit state after Alice inputs ``A`` and obtains ``a``."""
    cond = []
    for B in (0, 1):
        marginal = sum(pr_joint_prob(a, b, A, B) for b in (0, 1))
        cond.append(pr_joint_prob(a, 0, A, B) / marginal)
    return GbitState(cond[0], cond[1])


# ---------------------------------------------------------------------------
# Spekkens toy bit
# ---------------------------------------------------------------------------

# outcome-0 cell of each toy measurement (ontic states numbered 1..4)
TOY_CELLS = {"Z": ({1, 2}, {3, 4}), "X": ({1, 3}, {2, 4}), "Y": ({1, 4}, {2, 3})}


@dataclass(frozen=True)
class ToyBitState:
    """Epistemic state: a probability distribution over the four ontic states.

    Valid states are the convex hull of the six knowledge-balanced pure
    states, i.e. normalized vectors with every entry at most 1/2.
    """

    ontic_weights: tuple

    def __post_init__(self):
        w = tuple(self.ontic_weights)
        if len(w) != 4:
            raise ValidationError("toy bit has four ontic states")
        bad = validate_distribution(w)
        if bad:
            raise ValidationError("; ".join(v.detail for v in bad))
        if any(x > Fraction(1, 2) + EXACT_TOL for x in w):
            raise ValidationError(f"{w} violates knowledge balance (an ontic weight exceeds 1/2)")
        object.__setattr__(self, "ontic_weights", w)

    @classmethod
    def pure(cls, support) -> "ToyBitState":
        support = set(support)
        if len(support) != 2 or not support <= {1, 2, 3, 4}:
            raise ValidationError(f"pure toy states are pairs of ontic states, got {support}")
        return cls(tuple(Fraction(1, 2) if k in support else Fraction(0) for k in (1, 2, 3, 4)))

    @property
    def is_pure(self) -> bool:
        return sorted(self.ontic_weights) == [0, 0, Fraction(1, 2), Fraction(1, 2)]

    @classmethod
    def mixture(cls, states, weights):
        return cls(tuple(sum(w * s.ontic_weights[k] for s, w in zip(states, weights)) for k in range(4)))


def toy_prob(state: ToyBitState, meas: str, o: int):
    """Total ontic weight inside the outcome cell of a toy measurement."""
    key = str(meas).upper()
    if key not in TOY_CELLS:
        raise DomainError(f"unknown toy measurement {meas!r}")
    if o not in (0, 1):
        raise DomainError(f"toy outcome must be 0 or 1, got {o}")
    cell = TOY_CELLS[key][o]
    return sum(w for k, w in zip((1, 2, 3, 4), state.ontic_weights) if k in cell)


class ToyTheory(PolytopeTheory):
    """Toy bit as a six-vertex polytope; also accepts :class:`ToyBitState`."""

    def check_state(self, state):
        if not isinstance(state, ToyBitState):
            super().check_state(state)

    def _prob(self, state, meas, o):
        if isinstance(state, ToyBitState):
            return toy_prob(state, meas.id, o)
        return super()._prob(state, meas, o)

    def to_ontic(self, state: PolytopeState) -> ToyBitState:
        pures = [ToyBitState.pure(int(ch) for ch in label) for label in self.labels]
        return ToyBitState.mixture(pures, state.coeffs)


def toy_bit() -> ToyTheory:
    return load_polytope_theory(_bundled("toy_bit.json"), cls=ToyTheory)


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

BUILTINS = ("classical", "qubit", "gbit", "toy", "bellmermin")


def builtin(name: str) -> TheoryModel:
    """Instantiate a built-in theory by selector name."""
    key = name.strip().lower()
    if key == "classical":
        return classical_bit()
    if key == "qubit":
        return QubitTheory()
    if key == "gbit":
        return gbit()
    if key == "toy":
        return toy_bit()
    if key == "bellmermin":
        from .bellmermin import BellMerminTheory

        return BellMerminTheory()
    raise DomainError(f"unknown theory {name!r}; built-ins are {', '.join(BUILTINS)}")


def select(selector: str) -> TheoryModel:
    """A built-in name, or a path to a theory-definition document."""
    if selector.strip().lower() in BUILTINS:
        return builtin(selector)
    return load_polytope_theory(Path(selector))
