"""Command-line interface: ``gnst zeta | certify | simulate | verify``.

Exit codes: 0 success, 1 computation failure, 2 uncertified numeric result,
3 input or schema error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import acceptance
from .bellmermin import BellMerminTheory, Preparation, sample_ontic
from .core import (
    DomainError,
    GnstError,
    IngestionError,
    MeasurementDistribution,
    UncertaintySpec,
    UncertifiedError,
    ValidationError,
)
from .protocol import ADVERSARIAL, ProtocolConfig, floor_check, run_protocol, summary, write_csv, write_summary
from .randomness import worst_case_analysis
from .rng import default_workers
from .serialize import SCHEMA_VERSION, num, report_doc, state_doc
from .theories import BlochVector, PolytopeState, PolytopeTheory, QubitTheory, select
from .uncertainty import zeta, zeta_numeric

EXIT_OK, EXIT_FAIL, EXIT_UNCERTIFIED, EXIT_INPUT = 0, 1, 2, 3


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        return [float(Fraction(x)) for x in text.split(",")]
    except (ValueError, ZeroDivisionError):
        raise InputError(f"expected comma-separated numbers, got {text!r}") from None


def _pair(theory, args):
    d1, d2 = theory.default_pair
    return (args.m1 or d1, args.m2 or d2)


def _parse_state(theory, text: str):
    if isinstance(theory, QubitTheory):
        return BlochVector(tuple(_floats(text)))
    if isinstance(theory, BellMerminTheory):
        return Preparation(tuple(_floats(text)))
    if isinstance(theory, PolytopeTheory):
        if text in theory.labels:
            return theory.vertex(text)
        parts = [Fraction(x) for x in text.split(",")]
        return PolytopeState(tuple(parts))
    raise InputError(f"cannot parse a state for {theory.name}")


def _document(command: str, inputs: dict, results: dict, provenance: dict) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command, "inputs": inputs,
            "results": results, "provenance": provenance}


def _emit(doc: dict, as_json: bool, lines: list[str]) -> None:
    if as_json:
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print("\n".join(lines))


def cmd_zeta(args) -> int:
    theory = select(args.theory)
    m1, m2 = _pair(theory, args)
    outcomes = tuple(int(c) for c in args.outcomes)
    weights = MeasurementDistribution(tuple(Fraction(x) for x in args.weights.split(",")))
    spec = UncertaintySpec((m1, m2), outcomes, weights)
    if args.numeric:
        res = zeta_numeric(theory, spec, resolution=args.resolution, tolerance=args.tolerance)
    else:
        res = zeta(theory, spec, resolution=args.resolution, tolerance=args.tolerance)
    doc = _document(
        "zeta",
        {"theory": theory.name, "m1": str(theory.resolve(m1).id), "m2": str(theory.resolve(m2).id),
         "outcomes": args.outcomes, "weights": [num(w) for w in weights.weights]},
        {"zeta": num(res.zeta), "maximizing_state": state_doc(res.maximizing_state)},
        {"method": res.method, "certified_tolerance": num(res.certified_tolerance), "certified": res.certified},
    )
    _emit(doc, args.json, [
        f"zeta = {num(res.zeta)}",
        f"method = {res.method} (tolerance {num(res.certified_tolerance)})",
        f"maximizer = {json.dumps(state_doc(res.maximizing_state))}",
    ] + ([] if res.certified else ["UNCERTIFIED: requested tolerance not reached"]))
    return EXIT_OK if res.certified else EXIT_UNCERTIFIED


def cmd_certify(args) -> int:
    theory = select(args.theory)
    m1, m2 = _pair(theory, args)
    rep = worst_case_analysis(theory, m1, m2)
    body = report_doc(rep)
    doc = _document("certify", {"theory": theory.name, "m1": body["measurements"][0],
                                "m2": body["measurements"][1]},
                    body, {"method": rep.method, "certified_tolerance": num(rep.certified_tolerance)})
    lines = [
        f"zeta = {num(rep.zeta)} (outcome string {body['zeta_string']})",
        f"certified_bits = {num(rep.certified_bits)}",
        f"worst_case_bits = {num(rep.worst_case_bits)} at {json.dumps(body['worst_case_state'])}",
        f"best_case_bits = {num(rep.best_case_bits)} at {json.dumps(body['best_case_state'])}",
    ]
    if rep.vertex_worst_case_bits is not None:
        lines.append(f"vertex_worst_case_bits = {num(rep.vertex_worst_case_bits)}")
    lines.append(f"genuine_source = {str(rep.genuine_source).lower()}")
    _emit(doc, args.json, lines)
    return EXIT_OK if rep.certified else EXIT_UNCERTIFIED


def cmd_simulate(args) -> int:
    theory = select(args.theory)
    m1, m2 = _pair(theory, args)
    if args.ontic is not None:
        if not isinstance(theory, BellMerminTheory):
            raise InputError("--ontic applies to the bellmermin theory only")
        psi = Preparation(tuple(_floats(args.ontic or args.state or "0,0,1")))
        state = sample_ontic(psi, seed=args.seed)
    elif args.adversarial:
        state = ADVERSARIAL
    elif args.state:
        state = _parse_state(theory, args.state)
    else:
        raise InputError("give --adversarial, --state or --ontic")
    cfg = ProtocolConfig(theory, state, m1, m2, args.rounds, args.seed, args.workers)
    run = run_protocol(cfg)
    report = run.report or worst_case_analysis(theory, m1, m2)
    verdict = floor_check(run, report)
    doc = summary(run, report, verdict)
    if args.csv:
        write_csv(run, args.csv)
    if args.summary:
        write_summary(doc, args.summary)
    _emit(_document("simulate", cfg.describe(), doc, {"seed": args.seed, "config_hash": cfg.digest()}),
          args.json, [
              f"counts (00, 01, 10, 11) = {run.counts}",
              f"empirical_min_entropy = {num(verdict.empirical_bits)}",
              f"certified floor = {num(verdict.floor_bits)} (slack {num(verdict.slack_bits)})",
              f"verdict = {'pass' if verdict.passed else 'fail'}",
          ])
    return EXIT_OK if verdict.passed else EXIT_FAIL


def cmd_verify(args) -> int:
    rows = acceptance.run_all()
    failed = sorted({r.criterion for r in rows if not r.passed})
    if args.json:
        print(json.dumps({"schema_version": SCHEMA_VERSION, "rows": [r.__dict__ for r in rows],
                          "failed_criteria": failed, "passed": not failed}, indent=2, sort_keys=True))
    else:
        header = ("#", "quantity", "target", "computed", "tolerance", "status")
        table = [header] + [(str(r.criterion), r.quantity, r.expected, r.computed, r.tolerance,
                             "PASS" if r.passed else "FAIL") for r in rows]
        widths = [max(len(t[i]) for t in table) for i in range(len(header))]
        for t in table:
            print("  ".join(c.ljust(w) for c, w in zip(t, widths)).rstrip())
        print("all criteria pass" if not failed else f"FAILED criteria: {', '.join(map(str, failed))}")
    return EXIT_OK if not failed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gnst", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--theory", default="qubit",
                        help="classical | qubit | gbit | toy | bellmermin | path to a theory JSON")
        sp.add_argument("--m1", help="first measurement (qubit: x, y, z or 'a,b,c')")
        sp.add_argument("--m2", help="second measurement")
        sp.add_argument("--json", action="store_true", help="print the JSON report document")

    z = sub.add_parser("zeta", help="fine-grained uncertainty constant")
    common(z)
    z.add_argument("--outcomes", default="00")
    z.add_argument("--weights", default="1/2,1/2", help="measurement distribution")
    z.add_argument("--numeric", action="store_true", help="force the grid/lattice oracle")
    z.add_argument("--resolution", type=int)
    z.add_argument("--tolerance", type=float, help="required certified tolerance (numeric paths)")
    z.set_defaults(func=cmd_zeta)

    c = sub.add_parser("certify", help="certified bits and worst/best-case analysis")
    common(c)
    c.set_defaults(func=cmd_certify)

    s = sub.add_parser("simulate", help="run the two-copy measurement process")
    common(s)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--adversarial", action="store_true", help="use the worst-case state")
    g.add_argument("--ontic", nargs="?", const="", metavar="PSI",
                   help="bellmermin: fix one sampled ontic pair for preparation PSI (default 0,0,1)")
    s.add_argument("--state", help="Bloch vector, vertex label, or convex weights")
    s.add_argument("--rounds", type=int, default=100_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=default_workers())
    s.add_argument("--csv", type=Path, help="per-round dump")
    s.add_argument("--summary", type=Path, help="summary JSON")
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", help="run the acceptance checks")
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, IngestionError, DomainError, ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except UncertifiedError as exc:
        print(f"uncertified: {exc}", file=sys.stderr)
        return EXIT_UNCERTIFIED
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except GnstError as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
