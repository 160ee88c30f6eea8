"""Foundational types and the theory-model contract.

Every concrete theory (qubit, finite polytope, ontic model) implements
:class:`TheoryModel`; the uncertainty and randomness code is written
against this contract only.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from typing import Any, Sequence

import numpy as np

EXACT_TOL = 1e-12
OPT_TOL = 1e-6


class GnstError(Exception):
    """Base class for library errors."""


class DomainError(GnstError, ValueError):
    """Argument outside the operation's domain (unknown measurement, bad outcome, ...)."""


class ValidationError(GnstError, ValueError):
    """A value object violates its invariants."""


class IngestionError(GnstError, ValueError):
    """A theory-definition document is malformed."""

    def __init__(self, message: str, location: str = "$"):
        super().__init__(f"{location}: {message}")
        self.location = location


class UncertifiedError(GnstError, RuntimeError):
    """A numerical search could not certify the requested tolerance."""


def is_exact(x: Any) -> bool:
    return isinstance(x, (Fraction, int)) and not isinstance(x, bool)


def clamp01(p):
    """Clamp a probability to [0, 1]; exact rationals pass through untouched."""
    if is_exact(p):
        return p
    return min(1.0, max(0.0, float(p)))


@dataclass(frozen=True)
class Violation:
    invariant: str
    detail: str
    amount: float


def validate_distribution(probs: Sequence[Real], tol: float = EXACT_TOL) -> list[Violation]:
    """Check the outcome-distribution invariants. An empty list means the vector is valid."""
    probs = list(probs)
    if not probs:
        return [Violation("nonempty", "no entries", 1.0)]
    out = []
    for i, p in enumerate(probs):
        if p < -tol:
            out.append(Violation("range", f"entry {i} = {float(p)!r} < 0", float(-p)))
        elif p > 1 + tol:
            out.append(Violation("range", f"entry {i} = {float(p)!r} > 1", float(p - 1)))
    total = sum(probs)
    if abs(total - 1) > tol:
        out.append(Violation("normalization", f"sum = {float(total):.12g}", float(abs(total - 1))))
    return out


@dataclass(frozen=True)
class OutcomeDistribution:
    """Normalized probability vector over a finite outcome set."""

    probs: tuple
    labels: tuple = ()

    def __post_init__(self):
        probs = tuple(self.probs)
        bad = validate_distribution(probs)
        if bad:
            raise ValidationError("; ".join(v.detail for v in bad))
        object.__setattr__(self, "probs", tuple(clamp01(p) for p in probs))
        labels = tuple(self.labels) or tuple(range(len(probs)))
        if len(labels) != len(probs):
            raise ValidationError("labels and probs differ in length")
        object.__setattr__(self, "labels", labels)

    def __len__(self):
        return len(self.probs)

    def __getitem__(self, i):
        return self.probs[i]

    def as_array(self) -> np.ndarray:
        return np.array([float(p) for p in self.probs])


@dataclass(frozen=True)
class MeasurementId:
    id: str
    arity: int = 2

    def __post_init__(self):
        if self.arity < 2:
            raise ValidationError(f"measurement {self.id!r}: arity {self.arity} < 2")

    def __str__(self):
        return self.id


@dataclass(frozen=True)
class MeasurementDistribution:
    """Weights D = {p(m)} over an ordered list of measurements."""

    weights: tuple = (0.5, 0.5)

    def __post_init__(self):
        w = tuple(self.weights)
        if any(x < 0 for x in w) or abs(sum(w) - 1) > EXACT_TOL:
            raise ValidationError(f"measurement weights {w} are not a probability vector")
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, n: int = 2) -> "MeasurementDistribution":
        return cls(tuple(Fraction(1, n) for _ in range(n)))

    def __len__(self):
        return len(self.weights)

    def __getitem__(self, i):
        return self.weights[i]


class TheoryModel(abc.ABC):
    """A convex state space together with a probability rule p_state(o|m).

    Subclasses implement ``resolve`` (map a user-facing measurement
    reference to the internal measurement object), ``check_state`` and
    ``_prob``; the public :meth:`prob` adds validation and clamping.
    """

    name: str
    state_kind: str  # "ball" | "polytope" | "ontic"
    measurements: tuple

    @property
    def extreme_states(self) -> tuple | None:
        return None

    @property
    def default_pair(self) -> tuple:
        return (self.measurements[0], self.measurements[1])

    @abc.abstractmethod
    def resolve(self, m) -> Any:
        """Return the internal measurement for ``m`` or raise DomainError."""

    @abc.abstractmethod
    def check_state(self, state) -> None:
        """Raise ValidationError/DomainError when ``state`` is not a state of this theory."""

    @abc.abstractmethod
    def _prob(self, state, meas, o: int):
        ...

    @abc.abstractmethod
    def sample(self, n: int, seed: int = 0) -> list:
        """Deterministically draw ``n`` valid states."""

    def arity(self, m) -> int:
        return self.resolve(m).arity

    def prob(self, state, m, o: int):
        meas = self.resolve(m)
        if not 0 <= o < meas.arity:
            raise DomainError(f"outcome {o} out of range for arity {meas.arity}")
        self.check_state(state)
        p = self._prob(state, meas, o)
        if not is_exact(p) and not (-EXACT_TOL <= p <= 1 + EXACT_TOL):
            raise ValidationError(f"probability {p!r} outside [0, 1]")
        return clamp01(p)

    def distribution(self, state, m) -> OutcomeDistribution:
        meas = self.resolve(m)
        return OutcomeDistribution(tuple(self.prob(state, meas, o) for o in range(meas.arity)))

    def prob_many(self, states: Sequence, m, o: int) -> np.ndarray:
        """Vectorised ``prob`` over a batch of states (floats)."""
        return np.array([float(self.prob(s, m, o)) for s in states])

    def __repr__(self):
        return f"<{type(self).__name__} {self.name!r}>"


def prob(theory: TheoryModel, state, m, o: int):
    """Probability of outcome ``o`` when measurement ``m`` is applied to ``state``."""
    return theory.prob(state, m, o)


def mix(states: Sequence, weights: Sequence):
    """Convex mixture of states of one theory.

    All states must share a concrete type; the type's ``mixture``
    classmethod does the combination.
    """
    states = list(states)
    weights = tuple(weights)
    if not states or len(states) != len(weights):
        raise DomainError("mix needs as many weights as states (at least one)")
    if any(w < 0 for w in weights) or abs(sum(weights) - 1) > EXACT_TOL:
        raise ValidationError(f"mixing weights {weights} are not normalized")
    kind = type(states[0])
    if any(type(s) is not kind for s in states):
        raise DomainError("cannot mix states of different theory kinds")
    combine = getattr(kind, "mixture", None)
    if combine is None:
        raise DomainError(f"{kind.__name__} states cannot be mixed")
    return combine(states, weights)


@dataclass(frozen=True)
class UncertaintySpec:
    """A measurement pair, an outcome string and a distribution over the pair."""

    measurements: tuple
    outcome_string: tuple = (0, 0)
    meas_dist: MeasurementDistribution = field(default_factory=MeasurementDistribution.uniform)

    def __post_init__(self):
        if len(self.measurements) != 2 or len(self.outcome_string) != 2:
            raise DomainError("exactly two measurements and two outcomes are supported")
        if len(self.meas_dist) != 2:
            raise DomainError("measurement distribution must have two weights")
        object.__setattr__(self, "outcome_string", tuple(int(o) for o in self.outcome_string))

    def check(self, theory: TheoryModel) -> None:
        for m, o in zip(self.measurements, self.outcome_string):
            if not 0 <= o < theory.arity(m):
                raise DomainError(f"outcome {o} out of range for measurement {m}")
