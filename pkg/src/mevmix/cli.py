"""Command line front end: ``mevmix {validate,eval,sample,taildep,verify}``.

Every failure exits nonzero and writes one JSON object
``{"error": ..., "message": ..., "exit_code": ...}`` to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigurationError, MevMixError, ModelValidationError, SpecError
from .model import default_threads, model_cdf, model_exponent, sample_model, validate_model
from .specio import load_model
from .subsets import SubsetMask, all_nonempty_subsets
from .taildep import CSV_FIELDS, empirical_lambda, orthant_lambda, report_csv_row

EXIT_OK = 0
EXIT_INVALID_MODEL = 1
EXIT_USAGE = 2
EXIT_SPEC = 3
EXIT_DOMAIN = 4
EXIT_VERIFY_FAILED = 5
EXIT_IO = 6


class CliError(Exception):
    def __init__(self, code: int, kind: str, message: str, **extra):
        super().__init__(message)
        self.code, self.kind, self.extra = code, kind, extra


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(EXIT_USAGE, "UsageError", message)


def _fmt(v: float) -> str:
    return repr(float(v))


def _write_text(text: str, out):
    if out is None or str(out) == "-":
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text, encoding="utf-8", newline="")
    except OSError as exc:
        raise CliError(EXIT_IO, "IOError", f"cannot write {out}: {exc}") from exc


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _parse_J(spec: str, d: int) -> SubsetMask:
    try:
        coords = [int(tok) for tok in spec.replace(" ", "").split(",") if tok]
    except ValueError as exc:
        raise CliError(EXIT_USAGE, "UsageError", f"--J expects comma-separated integers, got {spec!r}") from exc
    if not coords:
        raise CliError(EXIT_USAGE, "UsageError", "--J must name at least one coordinate")
    bad = [c for c in coords if not 1 <= c <= d]
    if bad:
        raise CliError(EXIT_DOMAIN, "DomainError", f"--J coordinates {bad} outside 1..{d}")
    return SubsetMask.from_indices([c - 1 for c in coords], d)


def _load(path):
    if path is None:
        raise CliError(EXIT_USAGE, "UsageError", "--model is required")
    try:
        return load_model(path)
    except OSError as exc:
        raise CliError(EXIT_IO, "IOError", f"cannot read {path}: {exc}") from exc


def _load_valid(path):
    m = _load(path)
    problems = validate_model(m)
    if problems:
        raise CliError(EXIT_INVALID_MODEL, "ModelValidationError", "; ".join(problems), violations=problems)
    return m


def _read_grid(path, d: int) -> np.ndarray:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(EXIT_IO, "IOError", f"cannot read {path}: {exc}") from exc
    rows = []
    for k, rec in enumerate(csv.reader(io.StringIO(text))):
        if not rec or rec[0].lstrip().startswith("#"):
            continue
        try:
            rows.append([float(v) for v in rec])
        except ValueError:
            if k == 0 and not rows:
                continue  # header
            raise CliError(EXIT_SPEC, "SpecError", f"{path}: non-numeric grid row {k + 1}")
    grid = np.array(rows, dtype=float)
    if grid.ndim != 2 or grid.shape[1] != d:
        raise CliError(EXIT_SPEC, "SpecError", f"{path}: grid rows must have {d} columns")
    if (grid < 0).any() or (grid > 1).any():
        raise CliError(EXIT_DOMAIN, "DomainError", f"{path}: grid points must lie in [0,1]^{d}")
    return grid


def cmd_validate(args) -> int:
    m = _load(args.model)
    problems = validate_model(m)
    if problems:
        raise CliError(EXIT_INVALID_MODEL, "ModelValidationError", "; ".join(problems), violations=problems)
    _write_text(json.dumps({"valid": True, "d": m.d, "q": m.q}) + "\n", args.out)
    return EXIT_OK


def cmd_eval(args) -> int:
    m = _load_valid(args.model)
    if args.grid_file:
        grid = _read_grid(args.grid_file, m.d)
    else:
        levels = np.round(np.linspace(0.1, 0.9, 9), 10)
        grid = np.repeat(levels[:, None], m.d, axis=1)
    with np.errstate(divide="ignore"):
        ell = model_exponent(m, -np.log(grid))
    cdf = model_cdf(m, grid)
    header = [f"u{i}" for i in range(1, m.d + 1)] + ["cdf", "exponent"]
    rows = [[_fmt(v) for v in g] + [_fmt(c), _fmt(e)] for g, c, e in zip(grid, cdf, ell)]
    _write_text(_csv_text(header, rows), args.out)
    return EXIT_OK


def _need_seed(args, what):
    if args.seed is None:
        raise CliError(EXIT_USAGE, "UsageError", f"--seed is required for {what}")


def cmd_sample(args) -> int:
    m = _load_valid(args.model)
    _need_seed(args, "sample")
    if args.n is None or args.n < 1:
        raise CliError(EXIT_USAGE, "UsageError", "--n must be a positive sample count")
    y = sample_model(m, args.n, seed=args.seed, threads=args.threads)
    header = [f"y{i}" for i in range(1, m.d + 1)]
    cols = y
    if args.uniform:
        with np.errstate(divide="ignore"):
            cols = np.hstack([y, np.exp(-1.0 / y)])
        header += [f"u{i}" for i in range(1, m.d + 1)]
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    np.savetxt(buf, cols, fmt="%.17g", delimiter=",")
    _write_text(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_taildep(args) -> int:
    m = _load_valid(args.model)
    if args.J:
        masks = [_parse_J(j, m.d) for j in args.J]
    else:
        masks = all_nonempty_subsets(m.d)
    reports = [orthant_lambda(m, J) for J in masks]
    if args.n is not None:
        _need_seed(args, "empirical tail dependence")
        y = sample_model(m, args.n, seed=args.seed, threads=args.threads)
        reports += [empirical_lambda(y, J, args.u) for J in masks]
    if args.format == "csv":
        rows = [[report_csv_row(r)[k] for k in CSV_FIELDS] for r in reports]
        text = _csv_text(CSV_FIELDS, [["" if v is None else v for v in row] for row in rows])
    else:
        text = json.dumps({"d": m.d, "q": m.q, "reports": [r.to_dict() for r in reports]}, indent=2) + "\n"
    _write_text(text, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import format_table, run_all

    seed = 42 if args.seed is None else args.seed
    user = _load_valid(args.model) if args.model else None
    n = args.n or 1_000_000
    checks = run_all(seed=seed, n=n, model=user,
                     log=lambda c: print(f"{'PASS' if c.passed else 'FAIL'} {c.name}", file=sys.stderr))
    _write_text(format_table(checks) + "\n", args.out)
    if not all(c.passed for c in checks):
        failed = [c.name for c in checks if not c.passed]
        raise CliError(EXIT_VERIFY_FAILED, "VerificationFailed", f"{len(failed)} check(s) failed", failed=failed)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mevmix", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"mevmix {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, model_required=True):
        sp.add_argument("--model", required=model_required, help="model-spec JSON file")
        sp.add_argument("--out", help="output path (default: stdout)")
        sp.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: $MEVMIX_THREADS or 1); never changes results")
        return sp

    common(sub.add_parser("validate", help="check model constraints"))
    sp = common(sub.add_parser("eval", help="evaluate copula and exponent on a grid"))
    sp.add_argument("--grid-file", help="CSV of points in [0,1]^d, one per row")
    sp = common(sub.add_parser("sample", help="draw from the model"))
    sp.add_argument("--n", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--uniform", action="store_true", help="also emit u_i = exp(-1/y_i)")
    sp = common(sub.add_parser("taildep", help="orthant tail dependence coefficients"))
    sp.add_argument("--J", action="append", help="1-based coordinates, e.g. 1,3 (repeatable; default: all)")
    sp.add_argument("--n", type=int, help="also estimate empirically from n draws")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--u", type=float, default=0.99, help="empirical threshold (default 0.99)")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp = common(sub.add_parser("verify", help="run the self-verification suite"), model_required=False)
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--n", type=int, default=1_000_000)
    return p


COMMANDS = {"validate": cmd_validate, "eval": cmd_eval, "sample": cmd_sample,
            "taildep": cmd_taildep, "verify": cmd_verify}


def _emit_error(code: int, kind: str, message: str, **extra) -> int:
    payload = {"error": kind, "message": message, "exit_code": code, **extra}
    sys.stderr.write(json.dumps(payload) + "\n")
    return code


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise CliError(EXIT_USAGE, "UsageError", "missing command; choose one of " + ", ".join(COMMANDS))
        if args.threads is None:
            args.threads = default_threads()
        if args.threads < 1:
            raise CliError(EXIT_USAGE, "UsageError", "--threads must be >= 1")
        return COMMANDS[args.command](args)
    except CliError as exc:
        return _emit_error(exc.code, exc.kind, str(exc), **exc.extra)
    except SpecError as exc:
        return _emit_error(EXIT_SPEC, "SpecError", str(exc))
    except ModelValidationError as exc:
        return _emit_error(EXIT_INVALID_MODEL, "ModelValidationError", str(exc), violations=exc.violations)
    except (ConfigurationError, MevMixError) as exc:
        return _emit_error(EXIT_DOMAIN, type(exc).__name__, str(exc))


if __name__ == "__main__":
    sys.exit(main())
