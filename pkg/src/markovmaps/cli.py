"""Command-line front end.

Exit codes: 0 success, 1 refusal (a witness precondition is not met),
2 validation failure, 64 usage or I/O error, 65 malformed document.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from fractions import Fraction

from .core import (
    SpecError,
    check_proper_parametrization,
    fmt,
    graph_pieces,
    parse_spec,
    rational,
    validate_definition,
)
from .dynamics import (
    AnalysisError,
    PreconditionError,
    classify,
    connect_witness,
    periodic_witness,
    sample_forward,
    specification_witness,
)
from .sft import build_transition_matrix, components, iter_language

EXIT_OK, EXIT_REFUSED, EXIT_INVALID, EXIT_USAGE, EXIT_PARSE = 0, 1, 2, 64, 65


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise CliError(EXIT_USAGE, f"{self.prog}: error: {message}")


# --------------------------------------------------------------------------
# input

def read_document(path: str) -> dict:
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise CliError(EXIT_USAGE, f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_PARSE, f"{path}: invalid JSON: {exc}") from None


def load(path: str):
    try:
        return parse_spec(read_document(path))
    except SpecError as exc:
        raise CliError(EXIT_PARSE, f"{path}: {exc}") from None


def parse_points(text: str, what: str) -> tuple:
    try:
        return tuple(rational(v.strip(), what) for v in text.split(",") if v.strip())
    except SpecError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from None


def parse_rational(text: str) -> Fraction:
    try:
        return rational(text, "--epsilon")
    except SpecError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from None


# --------------------------------------------------------------------------
# rendering

def _jsonable(value):
    if isinstance(value, Fraction):
        return fmt(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def verdict_doc(v) -> dict:
    doc = {"status": v.status}
    if v.basis:
        doc["basis"] = v.basis
    if v.witness is not None:
        doc["witness"] = _jsonable(v.witness)
    if v.caveat:
        doc["caveat"] = v.caveat
    return doc


def report_doc(report) -> dict:
    ess = report.essential
    status = {}
    for a, s in ess.status.items():
        entry = {"kind": s.kind}
        if s.word:
            entry["word"] = list(s.word)
        status[a] = entry
    W = report.eventual
    return {
        "alphabet": list(report.matrix.alphabet),
        "essential": {"symbols": [a for a in report.matrix.alphabet if a in ess.essential],
                      "status": status, "bound": ess.bound},
        "components": [
            {"symbols": list(c.symbols), "period": c.period,
             "irreducible": c.irreducible, "mixing": c.mixing}
            for c in report.decomposition.components
        ],
        "conditions": {k: verdict_doc(v) for k, v in report.conditions.items()},
        "forward": {k: verdict_doc(v) for k, v in report.forward.items()},
        "inverse": {k: verdict_doc(v) for k, v in report.inverse.items()},
        "eventual_range": {
            "intervals": [[fmt(iv.lo), fmt(iv.hi)] for iv in W.intervals],
            "iterations": W.iterations,
            "invariant": W.invariant,
        },
        "N2": report.N2,
        "caveat": bool(report.caveats),
        "caveats": list(report.caveats),
    }


def report_text(doc: dict) -> str:
    lines = [f"alphabet: {' '.join(doc['alphabet'])}",
             f"essential: {' '.join(doc['essential']['symbols'])} (bound {doc['essential']['bound']})"]
    for c in doc["components"]:
        tag = "mixing" if c["mixing"] else "irreducible"
        lines.append(f"component {{{', '.join(c['symbols'])}}} period={c['period']} {tag}")
    for section in ("conditions", "forward", "inverse"):
        lines.append(f"[{section}]")
        for name, v in doc[section].items():
            line = f"  {name}: {v['status']}"
            if "basis" in v:
                line += f"  ({v['basis']})"
            if "caveat" in v:
                line += f"  caveat: {v['caveat']}"
            lines.append(line)
    W = doc["eventual_range"]
    lines.append("W: " + " U ".join(f"[{lo}, {hi}]" for lo, hi in W["intervals"])
                 + f" after {W['iterations']} iterations")
    if doc["N2"] is not None:
        lines.append(f"N2: {doc['N2']}")
    for c in doc["caveats"]:
        lines.append(f"caveat: {c}")
    return "\n".join(lines)


def emit(args, doc, text: str):
    if args.format == "json":
        print(json.dumps(doc, indent=2))
    else:
        print(text)


# --------------------------------------------------------------------------
# commands

def cmd_validate(args) -> int:
    mm = load(args.path)
    violations = validate_definition(mm)
    lines = [str(v) for v in violations]
    param = None
    if not violations:
        param = check_proper_parametrization(mm)
        if not param:
            lines.append(f"proper-parametrization: {param.describe()}")
    ok = not lines
    doc = {
        "valid": ok,
        "violations": [{"condition": v.condition, "symbol": v.symbol, "message": v.message}
                       for v in violations],
        "proper_parametrization": None if param is None else param.describe(),
    }
    emit(args, doc, "valid" if ok else "\n".join(lines))
    return EXIT_OK if ok else EXIT_INVALID


def _analyze(args, mm):
    try:
        return classify(mm, args.bound)
    except AnalysisError as exc:
        for v in exc.violations:
            print(str(v), file=sys.stderr)
        raise CliError(EXIT_INVALID, str(exc)) from None


def cmd_analyze(args) -> int:
    report = _analyze(args, load(args.path))
    doc = report_doc(report)
    emit(args, doc, report_text(doc))
    return EXIT_OK


def _sampled(mm, rnd: random.Random, length: int = 3) -> tuple:
    x0 = Fraction(rnd.randrange(0, 1025), 1024)
    return sample_forward(mm, x0, length, rnd.randrange(2 ** 32))


def _points_doc(pts) -> list:
    return [fmt(p) for p in pts]


def cmd_witness(args) -> int:
    mm = load(args.path)
    report = _analyze(args, mm)
    eps = parse_rational(args.epsilon)
    if eps <= 0:
        raise CliError(EXIT_USAGE, "--epsilon must be positive")
    rnd = random.Random(args.seed)
    head = parse_points(args.head, "--head") if args.head else _sampled(mm, rnd)
    try:
        if args.kind == "connect":
            tail = parse_points(args.tail, "--tail") if args.tail else _sampled(mm, rnd)
            w = connect_witness(report, head, tail, eps)
            body = {"x": _points_doc(head), "y": _points_doc(tail), "offset": w.offset}
        elif args.kind == "periodic":
            w = periodic_witness(report, head, eps)
            body = {"x": _points_doc(head)}
        else:
            if args.segment:
                segs = [parse_points(s, "--segment") for s in args.segment]
            else:
                segs = [head, _sampled(mm, rnd)]
            gaps = args.gap or [report.N2 or 1] * len(segs)
            if len(gaps) != len(segs):
                raise CliError(EXIT_USAGE, "give one --gap per segment")
            w = specification_witness(report, segs, gaps, eps)
            body = {"segments": [_points_doc(s) for s in segs], "gaps": list(gaps),
                    "offsets": list(w.offsets), "N2": w.N2}
    except PreconditionError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        if args.format == "json":
            print(json.dumps({"refused": str(exc)}, indent=2))
        return EXIT_REFUSED
    except ValueError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from None
    checks = {k: "passed" if v else "failed" for k, v in w.self_check(mm).items()}
    doc = {"kind": args.kind, "epsilon": fmt(eps), **body,
           "word": list(w.word), "z": _points_doc(w.z), "self_check": checks}
    text = "\n".join([f"{args.kind} witness, epsilon {fmt(eps)}",
                      "word: " + " ".join(w.word),
                      "z: " + " ".join(doc["z"])]
                     + [f"{k}: {v}" for k, v in checks.items()])
    emit(args, doc, text)
    return EXIT_OK if all(v == "passed" for v in checks.values()) else EXIT_REFUSED


def _validated(mm):
    violations = validate_definition(mm)
    if violations:
        for v in violations:
            print(str(v), file=sys.stderr)
        raise CliError(EXIT_INVALID, "invalid Markov multi-map")
    return mm


def cmd_export_graph(args) -> int:
    mm = _validated(load(args.path))
    rows = [[g.kind, fmt(g.start[0]), fmt(g.start[1]), fmt(g.end[0]), fmt(g.end[1])]
            for g in graph_pieces(mm)]
    if args.format == "json":
        doc = [{"owner": g.owner, "kind": r[0], "x0": r[1], "y0": r[2], "x1": r[3], "y1": r[4]}
               for g, r in zip(graph_pieces(mm), rows)]
        print(json.dumps(doc, indent=2))
        return EXIT_OK
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if args.header:
        writer.writerow(["kind", "x0", "y0", "x1", "y1"])
    writer.writerows(rows)
    sys.stdout.write(buf.getvalue())
    return EXIT_OK


def cmd_language(args) -> int:
    mm = _validated(load(args.path))
    M = build_transition_matrix(mm)
    restrict = None
    if args.restrict:
        restrict = [a.strip() for a in args.restrict.split(",") if a.strip()]
        unknown = [a for a in restrict if a not in M.alphabet]
        if unknown:
            raise CliError(EXIT_USAGE, f"unknown symbol {unknown[0]!r}")
    if args.n < 1:
        raise CliError(EXIT_USAGE, "word length must be positive")
    words = [list(w) for w in iter_language(M, args.n, restrict)]
    emit(args, {"n": args.n, "restrict": restrict, "words": words},
         "\n".join(" ".join(w) for w in words))
    return EXIT_OK


def cmd_components(args) -> int:
    mm = _validated(load(args.path))
    decomp = components(build_transition_matrix(mm))
    doc = [{"symbols": list(c.symbols), "period": c.period,
            "irreducible": c.irreducible, "mixing": c.mixing} for c in decomp.components]
    text = "\n".join(
        f"{{{', '.join(c['symbols'])}}} period={c['period']} "
        + ("mixing" if c["mixing"] else "irreducible")
        for c in doc)
    emit(args, doc, text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="text")
    common.add_argument("--bound", type=int, default=None,
                        help="essentiality search bound (default: alphabet size + 1)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--epsilon", default="1/10")

    parser = _Parser(prog="markovmaps", description="Analyze piecewise-affine Markov multi-maps.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", parents=[common], help="classify the forward and inverse systems")
    p.add_argument("path")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("validate", parents=[common], help="check the axioms and proper parametrization")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("witness", parents=[common], help="construct and self-check a witness trajectory")
    p.add_argument("path")
    p.add_argument("kind", choices=("connect", "periodic", "spec"))
    p.add_argument("--head", help="comma-separated rationals; sampled from --seed when omitted")
    p.add_argument("--tail", help="target trajectory for connect")
    p.add_argument("--segment", action="append", help="segment for spec (repeatable)")
    p.add_argument("--gap", type=int, action="append", help="gap after each segment (repeatable)")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("export-graph", parents=[common], help="graph pieces as CSV rows")
    p.add_argument("path")
    p.add_argument("--header", action="store_true")
    p.set_defaults(func=cmd_export_graph)

    p = sub.add_parser("language", parents=[common], help="list the words of a given length")
    p.add_argument("path")
    p.add_argument("n", type=int)
    p.add_argument("--restrict", help="comma-separated symbols")
    p.set_defaults(func=cmd_language)

    p = sub.add_parser("components", parents=[common], help="irreducible and mixing components")
    p.add_argument("path")
    p.set_defaults(func=cmd_components)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.bound is not None and args.bound < 1:
            raise CliError(EXIT_USAGE, "--bound must be positive")
        return args.func(args)
    except CliError as exc:
        print(str(exc), file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
