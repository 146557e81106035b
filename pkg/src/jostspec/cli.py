"""Command line interface: spectra, verify, resonances, bounds."""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib import resources

import jsonschema

from . import report
from .bounds import check_bounds
from .corpus import random_corpus
from .interval import FAMILIES, PERIODIC, SpectrumError, interval_eigenvalues, periodic_spectrum
from .potential import Potential, PotentialParseError
from .resonances import DEFAULT_RECT, WindingAmbiguity, check_consistency, check_localization, find_resonances
from .transfer import ConvergenceError
from .verify import SOLVER_ERRORS, verify

EXIT_OK, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def load_schema(name: str) -> dict:
    text = resources.files("jostspec").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def load_potential(path: str) -> Potential:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"potential: cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"potential: invalid JSON ({exc})") from None
    try:
        jsonschema.validate(data, load_schema("potential"))
    except jsonschema.ValidationError as exc:
        where = next((str(p) for p in exc.absolute_path if isinstance(p, str)), None)
        if where is None:
            # missing required properties name the field in the message
            where = exc.message.split("'")[1] if exc.validator == "required" else "potential"
        raise InputError(f"{where}: {exc.message}") from None
    try:
        return Potential.from_dict(data)
    except PotentialParseError as exc:
        raise InputError(str(exc)) from None


def parse_rect(text: str):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise InputError(f"rect: expected x0,x1,y0,y1, got {text!r}") from None
    if len(vals) != 4:
        raise InputError(f"rect: expected four numbers, got {len(vals)}")
    x0, x1, y0, y1 = vals
    if not (x0 < x1 and y0 < y1):
        raise InputError("rect: need x0 < x1 and y0 < y1")
    return tuple(vals)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("SPECTRAL_THREADS", "1")))
    except ValueError:
        return 1


def _write(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([f"{v:.17g}" if isinstance(v, float) else v for v in r])
    return buf.getvalue()


# commands ---------------------------------------------------------------------


def cmd_spectra(args) -> int:
    p = load_potential(args.potential)
    fams = _families(args.families)
    tables = {}
    for fam in fams:
        tables[fam] = periodic_spectrum(p, args.n_max) if fam == PERIODIC else interval_eigenvalues(p, fam, args.n_max)
    if args.format == "csv":
        rows = []
        for fam, t in tables.items():
            for e in t.values:
                # periodic rows are labelled 0+, 1-, 1+, ...
                rows.append((fam, e.label if fam == PERIODIC else e.index, e.value, e.residual))
        _write(_csv(rows, ["family", "index", "eigenvalue", "residual"]), args.out)
    else:
        _write(report.dumps({"potential": p.to_dict(), "spectra": {f: t.to_dict() for f, t in tables.items()}}) + "\n",
               args.out)
    return EXIT_OK


def _families(text: str | None):
    if not text:
        return list(FAMILIES)
    fams = [f.strip() for f in text.split(",") if f.strip()]
    bad = [f for f in fams if f not in FAMILIES]
    if bad:
        raise InputError(f"families: unknown {bad}; choose from {list(FAMILIES)}")
    return fams


def _verify_one(job):
    p, kw = job
    return verify(p, **kw)


def cmd_verify(args) -> int:
    if bool(args.potential) == bool(args.random):
        raise InputError("potential: give exactly one of --potential or --random SEED COUNT")
    rect = parse_rect(args.rect) if args.rect else DEFAULT_RECT
    if rect[3] > 0:
        raise InputError("rect: verification rectangles must lie in Im k <= 0")
    kw = dict(n_max=args.n_max, rect=rect, oracle=args.oracle, tol=args.tol, timings=args.timings)
    if args.potential:
        pots = [load_potential(args.potential)]
    else:
        seed, count = args.random
        if count < 1:
            raise InputError("random: COUNT must be >= 1")
        pots = random_corpus(seed, count)
    jobs = [(p, kw) for p in pots]
    n = min(_threads(), len(jobs))
    if n > 1:
        with ProcessPoolExecutor(max_workers=n) as ex:
            reports = list(ex.map(_verify_one, jobs))
    else:
        reports = [_verify_one(j) for j in jobs]
    for i, r in enumerate(reports):
        r.metadata["seed"] = args.seed
        if args.random:
            r.metadata["corpus"] = {"seed": args.random[0], "index": i}
    if args.format == "csv":
        rows = [(i, e.theorem, e.statement, e.left, e.right, e.margin, e.status, e.tolerance, e.note)
                for i, r in enumerate(reports) for e in r.entries]
        _write(_csv(rows, ["potential", "theorem", "statement", "left", "right", "margin", "status",
                           "tolerance", "note"]), args.out)
    else:
        doc = reports[0].to_dict() if args.potential else {"reports": [r.to_dict() for r in reports]}
        _write(report.dumps(doc) + "\n", args.out)
    if any(r.metadata.get("solver_error") for r in reports):
        return EXIT_SOLVER
    return EXIT_OK if all(r.ok for r in reports) else 1


def cmd_resonances(args) -> int:
    p = load_potential(args.potential)
    rect = parse_rect(args.rect) if args.rect else DEFAULT_RECT
    if rect[3] > 0 and not args.upper:
        raise InputError("rect: reaches into Im k > 0; pass --upper to include eigen-momenta")
    rset = find_resonances(p, rect, upper=args.upper)
    checks = check_localization(p, rset) + check_consistency(p, rset)
    if args.format == "csv":
        rows = [(z.k.real, z.k.imag, z.multiplicity, z.residual, z.on_axis) for z in rset.zeros]
        _write(_csv(rows, ["re", "im", "multiplicity", "residual", "axis"]), args.out)
    else:
        doc = rset.to_dict()
        doc["checks"] = [e.to_dict() for e in checks]
        _write(report.dumps(doc) + "\n", args.out)
    return EXIT_OK if not any(e.status == report.FAIL for e in checks) else 1


def cmd_bounds(args) -> int:
    p = load_potential(args.potential)
    with report.tolerance(args.tol if args.tol is not None else report.STRICT_TOL):
        b = check_bounds(p)
    if args.format == "csv":
        rows = [(e.theorem, e.statement, e.left, e.right, e.margin, e.status, e.note) for e in b.entries]
        _write(_csv(rows, ["theorem", "statement", "left", "right", "margin", "status", "note"]), args.out)
    else:
        _write(report.dumps({"entries": [e.to_dict() for e in b.entries], "inputs": b.inputs}) + "\n", args.out)
    return EXIT_OK if not any(e.status == report.FAIL for e in b.entries) else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="write here instead of standard output")
    common.add_argument("--seed", type=int, default=0, help="recorded in report metadata")
    common.add_argument("--tol", type=float, default=None, help="margin tolerance for inequalities")

    ap = _Parser(prog="jostspec", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("spectra", parents=[common], help="interval and periodic eigenvalues")
    s.add_argument("--potential", required=True, metavar="FILE")
    s.add_argument("--families", help=f"comma separated subset of {','.join(FAMILIES)}")
    s.add_argument("--n-max", type=int, default=10)
    s.set_defaults(func=cmd_spectra)

    v = sub.add_parser("verify", parents=[common], help="run every check and emit a report")
    v.add_argument("--potential", metavar="FILE")
    v.add_argument("--random", nargs=2, type=int, metavar=("SEED", "COUNT"))
    v.add_argument("--n-max", type=int, default=10)
    v.add_argument("--rect", help="x0,x1,y0,y1 in the k plane")
    v.add_argument("--oracle", action="store_true", help="add finite-difference cross-checks")
    v.add_argument("--timings", action="store_true", help="record stage timings (breaks byte-identity)")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("resonances", parents=[common], help="zeros of the Jost function")
    r.add_argument("--potential", required=True, metavar="FILE")
    r.add_argument("--rect", help="x0,x1,y0,y1 in the k plane")
    r.add_argument("--upper", action="store_true", help="allow Im k > 0")
    r.set_defaults(func=cmd_resonances)

    b = sub.add_parser("bounds", parents=[common], help="counting and eigenvalue-sum bounds")
    b.add_argument("--potential", required=True, metavar="FILE")
    b.set_defaults(func=cmd_bounds)
    return ap


def _join_rect(argv: list[str]) -> list[str]:
    """Let ``--rect -1,1,-2,0`` through; argparse would take the value for an option."""
    out, i = [], 0
    while i < len(argv):
        if argv[i] == "--rect" and i + 1 < len(argv):
            out.append(f"--rect={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_join_rect(argv))
    if getattr(args, "n_max", 1) < 1:
        print("jostspec: error: n-max: must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except InputError as exc:
        print(f"jostspec: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except WindingAmbiguity as exc:
        print(f"jostspec: solver failure: {exc} (leaf {exc.rect})", file=sys.stderr)
        return EXIT_SOLVER
    except SOLVER_ERRORS + (ConvergenceError, SpectrumError) as exc:
        print(f"jostspec: solver failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
