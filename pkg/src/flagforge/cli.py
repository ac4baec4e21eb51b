"""Command-line front end.

Exit codes: 0 on success, 2 when the computation ran but its verdict is
negative, 3 when the input could not be read or does not fit its schema.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from importlib import resources

import mpmath

from . import asymptotics, charts, cluster, holonomy, pants, tropical
from .errors import FlagforgeError, HypothesisError, SchemaError
from .linalg import FlagTuple, as_scalar, flag_from_json, format_rational

SCHEMA = "flagforge/v1"
PRECISION_ENV = "FLAGFORGE_PRECISION_BITS"
OK, VERDICT_FALSE, BAD_INPUT = 0, 2, 3
CSV_COLUMNS = ("n", "scaled_log_tr", "scaled_log_tr_inv", "target", "delta")
FIXTURES = ("genus2_tree_type", "quadrilateral_m3", "synthetic_word_m3", "holonomy_word_m3")


class InputError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    input: str | None = None
    fixture: str | None = None
    output: str | None = None
    precision_bits: int = asymptotics.DEFAULT_BITS
    samples: tuple = (10, 20, 40)
    tolerance: float = 0.05
    format: str = "json"
    diagonal: int | None = None

    def __post_init__(self):
        if not self.tolerance > 0:
            raise InputError("tolerance must be positive")
        if any(b <= a for a, b in zip(self.samples, self.samples[1:])) or any(n < 1 for n in self.samples):
            raise InputError("samples must be positive and strictly increasing")
        if self.precision_bits < 53:
            raise InputError("precision must be at least 53 bits")


def load_fixture(name: str) -> dict:
    if name not in FIXTURES:
        raise InputError(f"unknown fixture {name!r}; available: {', '.join(FIXTURES)}")
    text = resources.files("flagforge.data").joinpath(f"{name}.json").read_text()
    return json.loads(text)


def _read_input(cfg: RunConfig) -> dict:
    if cfg.fixture:
        return load_fixture(cfg.fixture)
    if not cfg.input:
        raise InputError("give --input or --fixture")
    try:
        with open(cfg.input) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{cfg.input}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    except OSError as exc:
        raise InputError(str(exc)) from exc
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object")
    if doc.get("schema") not in (None, SCHEMA):
        raise SchemaError(f"unknown schema {doc.get('schema')!r}", "schema")
    return doc


def _dump(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


# -- subcommands -------------------------------------------------------------
# Each returns (exit code, output text).


def cmd_ratios(doc, cfg):
    poly = charts.TriangulatedPolygon.from_json(doc.get("polygon", {}))
    try:
        flags = FlagTuple(tuple(flag_from_json(f) for f in doc["flags"]))
    except (KeyError, TypeError) as exc:
        raise SchemaError("need a list 'flags'", "flags") from exc
    c = charts.chart_coordinates(flags, poly)
    positive = c.is_positive()
    return (OK if positive else VERDICT_FALSE), _dump({"schema": SCHEMA, **c.to_json(), "positive": positive})


def cmd_flip(doc, cfg):
    c = charts.ChartCoordinates.from_json(doc)
    e = cfg.diagonal if cfg.diagonal is not None else int(doc.get("diagonal", 0))
    if not 0 <= e < len(c.polygon.diagonals):
        raise SchemaError(f"no diagonal {e}", "diagonal")
    by_mutation = cluster.flip_via_mutations(c, e)
    flags = charts.reconstruct_configuration(c)
    direct = charts.direct_flip_coordinates(flags, c.polygon, e)
    agree = by_mutation == direct
    out = {
        "schema": SCHEMA,
        "diagonal": e,
        "agreement": "exact" if agree else "mismatch",
        "mutations": by_mutation.to_json(),
        "direct": direct.to_json(),
    }
    return (OK if agree else VERDICT_FALSE), _dump(out)


def cmd_tree_type(doc, cfg):
    v = pants.check_tree_type(pants.surface_from_json(doc))
    return (OK if v.is_tree_type else VERDICT_FALSE), _dump(v.to_json())


def cmd_lambda_plus(doc, cfg):
    pcs = pants.surface_from_json(doc)
    v = pants.check_tree_type(pcs)
    try:
        lam = pants.preferred_lamination(pcs, v)
    except HypothesisError as exc:
        return VERDICT_FALSE, _dump({"schema": SCHEMA, "error": str(exc), "verdict": v.to_json()})
    return OK, _dump(lam.to_json())


def cmd_validate(doc, cfg):
    pcs = pants.surface_from_json(doc)
    gaps = pants.gap_table(pcs)
    violations = pants.validate_length_relations(pcs)
    out = {
        "schema": SCHEMA,
        "gaps": {f"{g}[{a}]": repr(p) for (g, a), p in sorted(gaps.items())},
        "violations": [x.to_json() for x in violations],
    }
    return (VERDICT_FALSE if violations else OK), _dump(out)


def word_from_json(doc) -> list:
    """``[{"edge": {"D": [...]}, "triangle": {"abc": T}, "side": ..., "case": ...}, ...]``."""
    try:
        items = list(doc["word"])
    except (KeyError, TypeError) as exc:
        raise SchemaError("need a list 'word'", "word") from exc
    word = []
    for i, item in enumerate(items):
        try:
            doubles = [as_scalar(x) for x in item["edge"]["D"]]
            raw = item.get("triangle", {})
            m = len(doubles) + 1
            triples = {abc: as_scalar(raw["".join(map(str, abc))]) for abc in charts.triple_indices(m)}
            side, case = item.get("side", "left"), item.get("case", "upper")
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad word factor: {exc}", f"word[{i}]") from exc
        if side not in ("left", "right") or case not in ("upper", "lower"):
            raise SchemaError("side is left|right and case is upper|lower", f"word[{i}]")
        word.append(holonomy.WordFactor.make(doubles, triples, side, case))
    return word


def cmd_holonomy(doc, cfg):
    word = word_from_json(doc)
    a = holonomy.holonomy_product(word)
    positive = holonomy.total_positivity_check(a, "triangular")
    moduli = holonomy.eigenvalue_moduli(a, cfg.precision_bits)
    digits = min(30, max(15, int(cfg.precision_bits * 0.30103) - 10))
    with mpmath.workprec(cfg.precision_bits):
        length = holonomy.hilbert_length(moduli)
    out = {
        "schema": SCHEMA,
        "matrix": [[format_rational(x) for x in row] for row in a],
        "trace_invariant": format_rational(holonomy.trace_invariant(a)),
        "hilbert_length": mpmath.nstr(length, digits),
        "totally_positive": positive,
        "precision_bits": cfg.precision_bits,
    }
    return (OK if positive else VERDICT_FALSE), _dump(out)


def emit_csv(report: asymptotics.AsymptoticReport, stream, bits: int, digits: int = 12) -> None:
    """Write the report rows in a fixed column order, with a precision footer."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in report.rows(digits):
        writer.writerow(row)
    stream.write(f"# precision: {bits} bits, values rounded to {digits} significant digits\n")


def cmd_asymptotics(doc, cfg):
    w = asymptotics.build_crossing_word(doc)
    r = tropical.ScalingSequence(int(doc.get("scaling", {}).get("k", 1)))
    try:
        rep = asymptotics.asymptotic_report(w, r, cfg.samples, cfg.precision_bits, cfg.tolerance)
    except HypothesisError as exc:
        return VERDICT_FALSE, _dump({"schema": SCHEMA, "error": str(exc)})
    code = OK if rep.within_tolerance() else VERDICT_FALSE
    if cfg.format == "csv":
        buf = io.StringIO()
        emit_csv(rep, buf, cfg.precision_bits)
        return code, buf.getvalue()
    return code, _dump(rep.to_json())


COMMANDS = {
    "ratios": cmd_ratios,
    "flip": cmd_flip,
    "tree-type": cmd_tree_type,
    "lambda-plus": cmd_lambda_plus,
    "holonomy": cmd_holonomy,
    "asymptotics": cmd_asymptotics,
    "validate": cmd_validate,
}


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        doc = _read_input(cfg)
        code, text = COMMANDS[cfg.subcommand](doc, cfg)
    except (InputError, FlagforgeError) as exc:
        stderr.write(f"flagforge {cfg.subcommand}: {exc}\n")
        return BAD_INPUT
    if cfg.output:
        with open(cfg.output, "w", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(BAD_INPUT, f"{self.prog}: error: {message}\n")


def _samples(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad sample list {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    default_bits = int(os.environ.get(PRECISION_ENV, asymptotics.DEFAULT_BITS))
    parser = _Parser(prog="flagforge", description="Flag charts, flips, tree-type checks and holonomy asymptotics.")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--input", help="input JSON file")
        src.add_argument("--fixture", choices=FIXTURES, help="use a bundled fixture")
        p.add_argument("--output", help="write the report here instead of stdout")
        p.add_argument("--precision-bits", type=int, default=default_bits, help=f"big-float precision (env {PRECISION_ENV})")
        p.add_argument("--samples", type=_samples, default=(10, 20, 40), help="comma separated n values")
        p.add_argument("--tolerance", type=float, default=0.05)
        p.add_argument("--format", choices=("json", "csv") if name == "asymptotics" else ("json",), default="json")
        if name == "flip":
            p.add_argument("--diagonal", type=int, help="index of the diagonal to flip")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(
            subcommand=args.subcommand,
            input=args.input,
            fixture=args.fixture,
            output=args.output,
            precision_bits=args.precision_bits,
            samples=args.samples,
            tolerance=args.tolerance,
            format=args.format,
            diagonal=getattr(args, "diagonal", None),
        )
    except InputError as exc:
        sys.stderr.write(f"flagforge: {exc}\n")
        return BAD_INPUT
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
