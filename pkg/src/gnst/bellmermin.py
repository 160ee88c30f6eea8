"""Bell-Mermin hidden-variable model for a two-level system.

An ontic state is a pair of unit vectors (lambda1, lambda2). Preparing the
pure state psi fixes lambda1 = psi and draws lambda2 uniformly from the
sphere; a projective measurement along phi yields outcome 0 exactly when
phi . (lambda1 + lambda2) > 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng
from .core import EXACT_TOL, DomainError, TheoryModel, ValidationError
from .theories import MeasurementDirection, parse_direction

# rng streams used for the two sphere coordinates of lambda2
Z_STREAM, AZIMUTH_STREAM = 0, 1


def _unit(v, what: str) -> tuple:
    t = tuple(float(x) for x in v)
    if len(t) != 3 or abs(math.sqrt(sum(x * x for x in t)) - 1) > EXACT_TOL:
        raise ValidationError(f"{what} must be a unit 3-vector, got {t}")
    return t


@dataclass(frozen=True)
class OnticPair:
    lambda1: tuple
    lambda2: tuple

    def __post_init__(self):
        object.__setattr__(self, "lambda1", _unit(self.lambda1, "lambda1"))
        object.__setattr__(self, "lambda2", _unit(self.lambda2, "lambda2"))


@dataclass(frozen=True)
class Preparation:
    """Pure-state preparation with Bloch direction ``psi``."""

    psi: tuple

    def __post_init__(self):
        object.__setattr__(self, "psi", _unit(self.psi, "psi"))


def ontic_outcome(phi: MeasurementDirection, ontic: OnticPair) -> int:
    """Deterministic response: 0 iff phi.(lambda1 + lambda2) > 0 (ties give 1)."""
    arg = sum(p * (a + b) for p, a, b in zip(phi.n, ontic.lambda1, ontic.lambda2))
    return 0 if arg > 0 else 1


def _sphere_points(seed: int, start: int, count: int) -> np.ndarray:
    z = 2 * rng.uniform(seed, Z_STREAM, start, count) - 1
    az = 2 * np.pi * rng.uniform(seed, AZIMUTH_STREAM, start, count)
    s = np.sqrt(np.maximum(0.0, 1 - z * z))
    return np.column_stack([s * np.cos(az), s * np.sin(az), z])


def sample_lambda2(seed: int, count: int, start: int = 0, workers: int | None = None) -> np.ndarray:
    """Uniform unit vectors ``start .. start+count-1`` of the seed's stream, shape (count, 3)."""
    parts = rng.partitioned(lambda a, n: _sphere_points(seed, start + a, n), count, workers)
    return np.concatenate(parts) if parts else np.zeros((0, 3))


def sample_ontic(prep: Preparation, seed: int, index: int = 0) -> OnticPair:
    lam2 = _sphere_points(seed, index, 1)[0]
    lam2 = lam2 / np.linalg.norm(lam2)
    return OnticPair(prep.psi, tuple(lam2))


def marginal_prob(prep: Preparation, phi: MeasurementDirection, samples: int,
                  seed: int, workers: int | None = None) -> float:
    """Monte Carlo frequency of outcome 0 over ``samples`` ontic draws."""
    if samples < 1:
        raise DomainError("samples must be at least 1")
    psi = np.array(prep.psi)
    n = phi.as_array()

    def count(start, k):
        lam2 = _sphere_points(seed, start, k)
        return int(np.count_nonzero((lam2 + psi) @ n > 0))

    return sum(rng.partitioned(count, samples, workers)) / samples


def ontic_guessing_probability(phi: MeasurementDirection, ontic: OnticPair) -> float:
    """Always 1: the ontic state fixes the outcome."""
    dist = [0.0, 0.0]
    dist[ontic_outcome(phi, ontic)] = 1.0
    return max(dist)


class BellMerminTheory(TheoryModel):
    """Bell-Mermin model viewed as a theory over ontic pairs.

    Ontic pairs give point-mass statistics. A :class:`Preparation` is also
    accepted and yields the model's averaged statistics, which equal the
    Born rule (1 + psi.phi)/2; :func:`marginal_prob` checks this by sampling.
    """

    name = "bellmermin"
    state_kind = "ontic"
    measurements = tuple(parse_direction(a) for a in "xyz")

    @property
    def default_pair(self):
        return (parse_direction("z"), parse_direction("x"))

    def resolve(self, m) -> MeasurementDirection:
        return parse_direction(m)

    def check_state(self, state):
        if not isinstance(state, (OnticPair, Preparation)):
            raise DomainError(f"bellmermin expects an OnticPair or Preparation, got {type(state).__name__}")

    def _prob(self, state, meas, o):
        if isinstance(state, Preparation):
            dot = sum(a * b for a, b in zip(state.psi, meas.n))
            return (1 + dot) / 2 if o == 0 else (1 - dot) / 2
        return 1.0 if ontic_outcome(meas, state) == o else 0.0

    def sample(self, n, seed=0):
        lam1 = sample_lambda2(seed + 1, n)
        lam2 = sample_lambda2(seed, n)
        out = []
        for a, b in zip(lam1, lam2):
            out.append(OnticPair(tuple(a / np.linalg.norm(a)), tuple(b / np.linalg.norm(b))))
        return out

    def prob_many(self, states, m, o):
        n = self.resolve(m).as_array()
        out = np.empty(len(states))
        ontic = [i for i, s in enumerate(states) if isinstance(s, OnticPair)]
        if ontic:
            S = np.array([np.add(states[i].lambda1, states[i].lambda2) for i in ontic])
            zero = S @ n > 0
            out[ontic] = np.where(zero == (o == 0), 1.0, 0.0)
        for i, s in enumerate(states):
            if not isinstance(s, OnticPair):
                out[i] = float(self.prob(s, m, o))
        return out
