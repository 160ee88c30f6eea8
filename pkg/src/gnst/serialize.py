"""JSON-friendly rendering of numbers and states (12 significant digits,
exact rationals as "a/b")."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

SCHEMA_VERSION = 1
DIGITS = 12


def num(x):
    if isinstance(x, bool):
        return x
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    if isinstance(x, (int, np.integer)):
        return int(x)
    v = float(x)
    v = float(f"{v:.{DIGITS}g}")
    return 0.0 if v == 0 else v


def state_doc(state) -> dict:
    from .bellmermin import OnticPair, Preparation
    from .theories import BlochVector, GbitState, PolytopeState, ToyBitState

    if isinstance(state, BlochVector):
        return {"bloch": [num(x) for x in state.r]}
    if isinstance(state, PolytopeState):
        return {"coeffs": [num(x) for x in state.coeffs]}
    if isinstance(state, ToyBitState):
        return {"ontic_weights": [num(x) for x in state.ontic_weights]}
    if isinstance(state, GbitState):
        return {"p0_m1": num(state.p0_m1), "p0_m2": num(state.p0_m2)}
    if isinstance(state, OnticPair):
        return {"lambda1": [num(x) for x in state.lambda1], "lambda2": [num(x) for x in state.lambda2]}
    if isinstance(state, Preparation):
        return {"psi": [num(x) for x in state.psi]}
    raise TypeError(f"cannot serialize {type(state).__name__}")


def report_doc(report) -> dict:
    """Plain-dict form of a CertificationReport."""
    return {
        "theory": report.theory,
        "measurements": list(report.measurements),
        "zeta": num(report.zeta),
        "zeta_string": "".join(map(str, report.zeta_string)),
        "zeta_by_string": {"".join(map(str, k)): num(v.zeta) for k, v in report.zeta_table.items()},
        "certified_bits": num(report.certified_bits),
        "worst_case_bits": num(report.worst_case_bits),
        "worst_case_state": state_doc(report.worst_case_state),
        "best_case_bits": num(report.best_case_bits),
        "best_case_state": state_doc(report.best_case_state),
        "vertex_worst_case_bits": None if report.vertex_worst_case_bits is None
        else num(report.vertex_worst_case_bits),
        "genuine_source": report.genuine_source,
        "method": report.method,
        "certified_tolerance": num(report.certified_tolerance),
        "certified": report.certified,
    }
