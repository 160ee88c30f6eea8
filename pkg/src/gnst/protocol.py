"""Simulation of the repeated two-copy measurement process.

Each round measures ``m1`` on one copy and ``m2`` on a fresh copy of the
same preparation; the run records the symbol pairs (j, k) and compares the
plug-in min-entropy against the certified floor.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from . import rng
from .core import DomainError, TheoryModel
from .randomness import CertificationReport, product_process, worst_case_analysis
from .serialize import SCHEMA_VERSION, num, report_doc, state_doc

ADVERSARIAL = "adversarial"
J_STREAM, K_STREAM = 16, 17
SIGMAS = 4.0


@dataclass(frozen=True)
class ProtocolConfig:
    theory: TheoryModel
    state: Any  # a state of ``theory`` or ADVERSARIAL
    m1: Any
    m2: Any
    rounds: int
    seed: int = 0
    workers: int | None = None

    def __post_init__(self):
        if self.rounds < 1:
            raise DomainError("rounds must be at least 1")
        for m in (self.m1, self.m2):
            if self.theory.arity(m) != 2:
                raise DomainError(f"measurement {m} is not binary")

    def describe(self, state=None) -> dict:
        state = self.state if state is None else state
        return {
            "theory": self.theory.name,
            "state": ADVERSARIAL if isinstance(state, str) else state_doc(state),
            "m1": str(self.theory.resolve(self.m1).id),
            "m2": str(self.theory.resolve(self.m2).id),
            "rounds": self.rounds,
            "seed": self.seed,
        }

    def digest(self) -> str:
        blob = json.dumps(self.describe(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


@dataclass(frozen=True)
class ProtocolRun:
    symbols: np.ndarray  # shape (rounds, 2), uint8
    counts: tuple  # occurrences of (0,0), (0,1), (1,0), (1,1)
    config: ProtocolConfig
    state: Any
    report: CertificationReport | None = None

    @property
    def rounds(self) -> int:
        return len(self.symbols)

    @property
    def frequencies(self) -> np.ndarray:
        return np.array(self.counts) / self.rounds


def run_protocol(cfg: ProtocolConfig) -> ProtocolRun:
    """Draw ``cfg.rounds`` independent symbol pairs; deterministic in the seed."""
    report = None
    state = cfg.state
    if isinstance(state, str):
        if state != ADVERSARIAL:
            raise DomainError(f"unknown state sentinel {state!r}")
        report = worst_case_analysis(cfg.theory, cfg.m1, cfg.m2)
        state = report.worst_case_state
    proc = product_process(cfg.theory, state, cfg.m1, cfg.m2)
    p0 = float(proc.factors[0][0])
    q0 = float(proc.factors[1][0])

    def chunk(start, n):
        j = (rng.uniform(cfg.seed, J_STREAM, start, n) >= p0).astype(np.uint8)
        k = (rng.uniform(cfg.seed, K_STREAM, start, n) >= q0).astype(np.uint8)
        return np.column_stack([j, k])

    symbols = np.concatenate(rng.partitioned(chunk, cfg.rounds, cfg.workers))
    counts = np.bincount(2 * symbols[:, 0] + symbols[:, 1], minlength=4)
    return ProtocolRun(symbols, tuple(int(c) for c in counts), cfg, state, report)


def empirical_min_entropy(run: ProtocolRun) -> float:
    """Plug-in estimate -log2(max count / rounds)."""
    top = max(run.counts) / run.rounds
    return 0.0 if top >= 1 else -math.log2(top)


@dataclass(frozen=True)
class FloorVerdict:
    passed: bool
    empirical_bits: float
    floor_bits: float
    slack_bits: float
    margin_bits: float


def floor_check(run: ProtocolRun, report: CertificationReport) -> FloorVerdict:
    """Empirical min-entropy against the certified floor, allowing a 4-sigma
    delta-method band for the plug-in estimator evaluated at q = zeta**2."""
    q = float(report.zeta) ** 2
    slack = SIGMAS * math.sqrt(q * (1 - q) / run.rounds) / (q * math.log(2))
    emp = empirical_min_entropy(run)
    floor = report.certified_bits
    return FloorVerdict(emp >= floor - slack, emp, floor, slack, emp - floor)


def write_csv(run: ProtocolRun, path: str | Path) -> None:
    """One row per round: round, j, k."""
    rows = np.column_stack([np.arange(run.rounds), run.symbols])
    np.savetxt(path, rows, fmt="%d", delimiter=",", header="round,j,k", comments="")


def summary(run: ProtocolRun, report: CertificationReport, verdict: FloorVerdict | None = None) -> dict:
    verdict = verdict or floor_check(run, report)
    return {
        "schema_version": SCHEMA_VERSION,
        "config": run.config.describe(),
        "config_hash": run.config.digest(),
        "seed": run.config.seed,
        "state": state_doc(run.state),
        "counts": {s: c for s, c in zip(("00", "01", "10", "11"), run.counts)},
        "empirical_min_entropy": num(verdict.empirical_bits),
        "floor": num(verdict.floor_bits),
        "slack": num(verdict.slack_bits),
        "margin": num(verdict.margin_bits),
        "verdict": "pass" if verdict.passed else "fail",
        "certification": report_doc(report),
    }


def write_summary(doc: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
