"""Command-line front end.

Subcommands: ``figure two-class``, ``figure three-class``, ``verify``,
``flow``.  Exit codes: 0 on success, 1 when a verified property fails or
a flow does not converge, 2 on usage errors (bad flags, bad ranges).

Outputs are deterministic: the same command line with the same seed
produces byte-identical CSV.  Use ``--range=-6:6`` (with the equals
sign) when a range starts with a minus.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .dual_core import Probabilities, softmax
from .errors import SoftseamError
from .figures import (
    AxisSpec,
    FigureDataset,
    GridSpec,
    flow_trace_dataset,
    three_class_grid,
    two_class_grid,
)
from .flows import flow_to_equilibrium
from .io_formats import format_csv, format_json, write_dataset
from .verify import run_verify

__all__ = ["main", "build_parser"]


class UsageError(SoftseamError):
    pass


def _parse_range(text: str) -> tuple[float, float]:
    parts = text.split(":")
    if len(parts) != 2:
        raise UsageError(f"range must look like MIN:MAX, got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise UsageError(f"range endpoints must be numbers, got {text!r}") from None
    return lo, hi


def _parse_vector(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",")], dtype=float)
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _parse_override(text: str) -> tuple[str, float]:
    name, _, value = text.partition("=")
    if not name or not value:
        raise UsageError(f"override must look like NAME=VALUE, got {text!r}")
    try:
        return name, float(value)
    except ValueError:
        raise UsageError(f"override value must be a number, got {text!r}") from None


def _grid_from_args(args, defaults: list[AxisSpec]) -> GridSpec:
    ranges = [_parse_range(r) for r in (args.range or [])]
    if len(ranges) > len(defaults):
        raise UsageError(
            f"too many --range flags: expected at most {len(defaults)}"
        )
    resolutions = list(args.resolution or [])
    if len(resolutions) == 1:
        resolutions = resolutions * len(defaults)
    if len(resolutions) > len(defaults):
        raise UsageError(
            f"too many --resolution flags: expected at most {len(defaults)}"
        )
    axes = []
    for i, dflt in enumerate(defaults):
        lo, hi = ranges[i] if i < len(ranges) else (dflt.lo, dflt.hi)
        res = resolutions[i] if i < len(resolutions) else dflt.resolution
        axes.append(AxisSpec(lo, hi, res))
    return GridSpec(tuple(axes))


def _emit(ds: FigureDataset, out: str | None, fmt: str) -> None:
    if out is None:
        if fmt == "csv":
            sys.stdout.write(format_csv(ds))
            return
        if fmt == "json":
            sys.stdout.write(format_json(ds))
            return
        raise UsageError("--format svg requires --out PATH")
    write_dataset(ds, Path(out), fmt)


def _cmd_figure_two_class(args) -> int:
    grid = _grid_from_args(
        args, [AxisSpec(-6.0, 6.0, 201), AxisSpec(0.001, 0.999, 201)]
    )
    ds = two_class_grid(grid, seam_tol=args.tol, seed=args.seed)
    _emit(ds, args.out, args.format)
    return 0


def _cmd_figure_three_class(args) -> int:
    grid = _grid_from_args(args, [AxisSpec(-4.0, 4.0, 41), AxisSpec(-4.0, 4.0, 41)])
    ds = three_class_grid(grid, seed=args.seed)
    _emit(ds, args.out, args.format)
    return 0


def _cmd_verify(args) -> int:
    overrides = dict(_parse_override(t) for t in (args.tol_override or []))
    report = run_verify(
        suite=args.suite,
        samples=args.samples,
        seed=args.seed,
        tol_overrides=overrides or None,
    )
    for line in report.format_lines():
        print(line)
    if args.out is not None:
        Path(args.out).write_text(
            json.dumps(report.to_json_dict(), indent=2) + "\n",
            encoding="ascii",
            newline="\n",
        )
    elif not report.passed:
        # serialize failing samples for replay even without --out
        Path("verify_failures.json").write_text(
            json.dumps(report.to_json_dict(), indent=2) + "\n",
            encoding="ascii",
            newline="\n",
        )
        print("failing samples written to verify_failures.json", file=sys.stderr)
    return 0 if report.passed else 1


def _cmd_flow(args) -> int:
    rng = np.random.default_rng(args.seed)
    if args.logits is not None:
        z = _parse_vector(args.logits)
        if args.dim is not None and args.dim != z.size:
            raise UsageError(f"--dim {args.dim} contradicts --logits of length {z.size}")
    else:
        d = args.dim if args.dim is not None else 3
        z = rng.standard_normal(d)
    d = int(z.size)
    if not 2 <= d <= 64:
        raise UsageError(f"dimension must be in [2, 64], got {d}")

    if args.y0 == "uniform":
        y0 = Probabilities(np.full(d, 1.0 / d))
    else:
        y0 = Probabilities(_parse_vector(args.y0))

    trace = flow_to_equilibrium(y0, z, tol=args.tol, max_steps=args.max_steps)
    params = {
        "dim": d,
        "logits": z.tolist(),
        "y0": y0.values.tolist(),
        "tol": args.tol,
        "max_steps": args.max_steps,
    }
    ds = flow_trace_dataset(trace, seed=args.seed, parameters=params)
    _emit(ds, args.out, args.format)
    print(
        f"flow: d={d} converged={trace.converged} steps={trace.steps_taken} "
        f"final_gap={trace.final_gap:.3e} target={np.array2string(softmax(z).values, precision=6)}",
        file=sys.stderr,
    )
    return 0 if trace.converged else 1


def _add_common_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    p.add_argument(
        "--format",
        choices=("csv", "json", "svg"),
        default="csv",
        help="output format (default csv; svg renders a plot)",
    )
    p.add_argument("--seed", type=int, default=0, metavar="U64",
                   help="seed recorded in metadata / used for sampling")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="softseam",
        description="Softmax duality geometry: figures, verification, flows.",
    )
    parser.add_argument("--version", action="version", version=f"softseam {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    fig = sub.add_parser("figure", help="reproduce the two figures")
    figsub = fig.add_subparsers(dest="which", required=True)

    f1 = figsub.add_parser("two-class", help="gap heatmap over (Delta, p) with the seam")
    _add_common_output_flags(f1)
    f1.add_argument("--resolution", type=int, action="append", metavar="N",
                    help="grid resolution per axis (repeatable; default 201)")
    f1.add_argument("--range", action="append", metavar="MIN:MAX",
                    help="axis range, Delta then p (repeatable; use --range=-6:6)")
    f1.add_argument("--tol", type=float, default=1e-9, metavar="REAL",
                    help="seam tolerance in nats for the on_seam column")
    f1.set_defaults(func=_cmd_figure_two_class)

    f2 = figsub.add_parser("three-class", help="softmax image of a centered-logit grid")
    _add_common_output_flags(f2)
    f2.add_argument("--resolution", type=int, action="append", metavar="N",
                    help="grid resolution per axis (repeatable; default 41)")
    f2.add_argument("--range", action="append", metavar="MIN:MAX",
                    help="axis range, a then b (repeatable; default -4:4)")
    f2.set_defaults(func=_cmd_figure_three_class)

    v = sub.add_parser("verify", help="run the property suites")
    v.add_argument("suite", nargs="?", default="all",
                   choices=("duality", "geometry", "flows", "all"))
    v.add_argument("--samples", type=int, default=1000, metavar="N")
    v.add_argument("--seed", type=int, default=0, metavar="U64")
    v.add_argument("--out", metavar="PATH", help="write the JSON report here")
    v.add_argument("--tol-override", action="append", metavar="NAME=VALUE",
                   help="override one property tolerance (repeatable)")
    v.set_defaults(func=_cmd_verify)

    fl = sub.add_parser("flow", help="integrate a replicator flow to equilibrium")
    _add_common_output_flags(fl)
    fl.add_argument("--dim", type=int, default=None, metavar="D",
                    help="dimension for seeded random logits (default 3)")
    fl.add_argument("--logits", metavar="Z1,Z2,...",
                    help="explicit logits (otherwise seeded standard normals)")
    fl.add_argument("--y0", default="uniform", metavar="P1,P2,...|uniform",
                    help="start distribution (default uniform)")
    fl.add_argument("--tol", type=float, default=1e-8, metavar="REAL",
                    help="convergence tolerance in nats (default 1e-8)")
    fl.add_argument("--max-steps", type=int, default=1_000_000, metavar="N")
    fl.set_defaults(func=_cmd_flow)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"softseam: {exc}", file=sys.stderr)
        return 2
    except SoftseamError as exc:
        print(f"softseam: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
