"""Command-line front end: ``pgl <solve|ess|poa|curve|verify>``.

Exit codes: 0 success, 2 bad input, 3 solver failure, 4 certificate
failure, 5 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from . import __version__
from .analysis import altruistic_poa_growth, selfish_poa
from .epidemic import DomainError, GameParams, SingularityError, SolverError, final_size
from .equilibrium import (
    DEFAULT_N_MAX,
    altruistic_ess_threshold,
    altruistic_stability_interval,
    enumerate_uniform_ess,
    max_selfish_support,
)
from .figure import DEFAULT_QUARTET, curve_series
from .verify import DEFAULT_GRID, run_verification

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_SOLVER = 3
EXIT_CERTIFICATE = 4
EXIT_IO = 5


class _ParseError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ParseError(message)


def _clean(value):
    """Make a value JSON-safe: numpy scalars to Python, NaN to None."""
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return None if math.isnan(value) else value
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def render_json(meta: dict, data) -> str:
    return json.dumps({"meta": _clean(meta), "data": _clean(data)}, indent=2) + "\n"


def render_csv(meta: dict, rows: Sequence[dict], fields: Optional[Sequence[str]] = None) -> str:
    """CSV with ``# key=value`` metadata lines ahead of the header row."""
    buf = io.StringIO()
    for key, value in _clean(meta).items():
        buf.write(f"# {key}={json.dumps(value)}\n")
    rows = [_clean(r) for r in rows]
    if fields is None:
        fields = list(rows[0]) if rows else []
    writer = csv.DictWriter(buf, fieldnames=list(fields), lineterminator="\r\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if row.get(k) is None else row.get(k)) for k in fields})
    return buf.getvalue()


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _meta(command: str, args, **extra) -> dict:
    meta = {"command": command, "version": __version__}
    for key in ("r0", "eta", "c", "x", "type", "n_max", "k", "grid", "format"):
        if hasattr(args, key):
            meta[key] = getattr(args, key)
    meta.update(extra)
    return meta


def _params(args) -> GameParams:
    missing = [name for name in ("r0", "eta", "c") if getattr(args, name) is None]
    if missing:
        raise DomainError("missing parameter(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))
    return GameParams(args.r0, args.eta, args.c)


def cmd_solve(args) -> int:
    params = _params(args)
    if args.x is None:
        raise DomainError("solve needs --x")
    sol = final_size(args.x, params)
    record = {
        "x": sol.x,
        "r_inf": sol.r_inf,
        "p": sol.p,
        "r_prime": sol.r_prime,
        "r_double_prime": sol.r_double_prime,
        "residual": sol.residual,
    }
    meta = _meta("solve", args)
    text = render_json(meta, record) if args.format == "json" else render_csv(meta, [record])
    _emit(text, args.out)
    return EXIT_OK


def cmd_ess(args) -> int:
    params = _params(args)
    records = enumerate_uniform_ess(params, args.type, args.n_max)
    rows = [
        {
            "n": rec.support_size,
            "density": rec.density,
            "location_cost": rec.location_cost,
            "social": rec.social,
            "stability_margin": rec.stability_margin,
        }
        for rec in records
    ]
    if args.type == "selfish":
        bound = max_selfish_support(params)
        summary = {"m_g": bound.m_g, "x_bar": bound.x_bar}
    elif params.eta < 1.0:
        summary = {
            "stability_interval": altruistic_stability_interval(params),
            "threshold_n": altruistic_ess_threshold(params),
        }
    else:
        summary = {"stability_interval": None, "threshold_n": None}
    meta = _meta("ess", args, **summary)
    if args.format == "json":
        text = render_json(meta, {"summary": summary, "records": rows})
    else:
        text = render_csv(meta, rows, ["n", "density", "location_cost", "social", "stability_margin"])
    _emit(text, args.out)
    return EXIT_OK


def _parse_k(text: Optional[str]) -> List[int]:
    if not text:
        raise DomainError("altruistic poa needs --k, e.g. --k 100,200,400")
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise DomainError(f"--k must be a comma-separated list of integers, got {text!r}") from None


def cmd_poa(args) -> int:
    params = _params(args)
    meta = _meta("poa", args)
    if args.type == "selfish":
        n_max = args.n_max if args.n_max is not None else None
        report = selfish_poa(params, n_max)
        data = report.as_dict()
        data["certified"] = report.certified
        ok = report.certified
        if args.format == "json":
            text = render_json(meta, data)
        else:
            row = dict(data, ess_support_sizes=" ".join(map(str, report.ess_support_sizes)))
            text = render_csv(meta, [row])
    else:
        ks = _parse_k(args.k)
        n_max = args.n_max if args.n_max is not None else DEFAULT_N_MAX
        entries = altruistic_poa_growth(params, ks, n_max)
        ok = all(e.ratio >= e.floor for e in entries if e.is_ess)
        rows = [e.as_dict() for e in entries]
        if args.format == "json":
            text = render_json(meta, {"entries": rows})
        else:
            text = render_csv(meta, rows, ["k", "is_ess", "social", "opt_upper", "ratio", "floor", "error"])
    _emit(text, args.out)
    if not ok:
        print("pgl: price-of-anarchy certificate failed", file=sys.stderr)
        return EXIT_CERTIFICATE
    return EXIT_OK


def _series_path(out: Path, index: int, count: int) -> Path:
    if count == 1:
        return out
    return out.with_name(f"{out.stem}-{index}{out.suffix}")


def cmd_curve(args) -> int:
    if args.out is None:
        raise DomainError("curve needs --out")
    given = [args.r0, args.eta, args.c]
    if all(v is None for v in given):
        param_sets = list(DEFAULT_QUARTET)
        source = "implementation default quartet"
    else:
        param_sets = [_params(args)]
        source = "command line"
    grid = args.grid if args.grid is not None else 500
    n_max = args.n_max if args.n_max is not None else DEFAULT_N_MAX
    out = Path(args.out)
    for index, params in enumerate(param_sets):
        series = curve_series(params, points=grid, n_max=n_max)
        meta = _meta("curve", args, parameters=params.as_dict(), parameter_source=source,
                     series_index=index, grid=grid, n_max=n_max)
        path = _series_path(out, index, len(param_sets))
        if args.format == "json":
            text = render_json(meta, {"samples": series.samples, "markers": series.markers})
            path.write_text(text, encoding="utf-8")
        else:
            path.write_text(render_csv(meta, series.samples), encoding="utf-8")
            markers = Path(str(path) + ".markers")
            markers.write_text(
                render_csv(meta, series.markers, ["type", "n", "density", "selfish_cost", "altruistic_cost"]),
                encoding="utf-8",
            )
    return EXIT_OK


def _threads() -> Optional[int]:
    value = os.environ.get("PGL_THREADS")
    if not value:
        return None
    try:
        threads = int(value)
    except ValueError:
        raise DomainError(f"PGL_THREADS must be a positive integer, got {value!r}") from None
    if threads < 1:
        raise DomainError(f"PGL_THREADS must be a positive integer, got {value!r}")
    return threads


def cmd_verify(args) -> int:
    grid = DEFAULT_GRID
    if args.r0 is not None or args.eta is not None or args.c is not None:
        grid = {
            "r0": [args.r0] if args.r0 is not None else DEFAULT_GRID["r0"],
            "eta": [args.eta] if args.eta is not None else DEFAULT_GRID["eta"],
            "c": [args.c] if args.c is not None else DEFAULT_GRID["c"],
        }
        for r0 in grid["r0"]:
            for eta in grid["eta"]:
                for c in grid["c"]:
                    GameParams(r0, eta, c)
    samples = args.grid if args.grid is not None else 100
    results = run_verification(grid, samples=samples, threads=_threads())
    rows = [r.as_dict() for r in results]
    failed = [r for r in results if not r.passed]
    meta = _meta("verify", args, parameter_grid=grid, samples=samples,
                 checks=len(results), failed=len(failed))
    if args.format == "json":
        text = render_json(meta, {"checks": rows})
    else:
        text = render_csv(meta, rows, ["check", "r0", "eta", "c", "passed", "value", "tolerance", "detail"])
    _emit(text, args.out)
    for r in failed:
        print(f"pgl: FAILED {r.check} at (r0={r.r0}, eta={r.eta}, c={r.c}): {r.detail}", file=sys.stderr)
    return EXIT_CERTIFICATE if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pgl", description="Pandemic location game solver and certificate suite.")
    parser.add_argument("--version", action="version", version=f"pgl {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, need_type=False):
        p.add_argument("--r0", type=float)
        p.add_argument("--eta", type=float)
        p.add_argument("--c", type=float)
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out")
        if need_type:
            p.add_argument("--type", choices=("selfish", "altruistic"), default="selfish")

    p = sub.add_parser("solve", help="final size and derivatives at one density")
    common(p)
    p.add_argument("--x", type=float)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("ess", help="uniform evolutionarily stable states")
    common(p, need_type=True)
    p.add_argument("--n-max", type=int, default=DEFAULT_N_MAX)
    p.set_defaults(func=cmd_ess)

    p = sub.add_parser("poa", help="price-of-anarchy report")
    common(p, need_type=True)
    p.add_argument("--n-max", type=int)
    p.add_argument("--k")
    p.set_defaults(func=cmd_poa)

    p = sub.add_parser("curve", help="location-cost curves with equilibrium markers")
    common(p)
    p.add_argument("--grid", type=int)
    p.add_argument("--n-max", type=int)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("verify", help="run the numerical certificate suite")
    common(p)
    p.add_argument("--grid", type=int, help="density samples per check (default 100)")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _ParseError as exc:
        print(f"pgl: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    try:
        for name in ("n_max", "grid"):
            value = getattr(args, name, None)
            if value is not None and value < 1:
                raise DomainError(f"--{name.replace('_', '-')} must be at least 1")
        return args.func(args)
    except (DomainError, ValueError) as exc:
        print(f"pgl: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except SolverError as exc:
        print(f"pgl: solver failure: {exc} (bracket {exc.bracket})", file=sys.stderr)
        return EXIT_SOLVER
    except SingularityError as exc:
        print(f"pgl: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"pgl: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
