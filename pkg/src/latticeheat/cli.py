"""Command-line surface: lattice-heat <subcommand> ... --out PATH.

CSV-first outputs with deterministic float formatting (shortest
round-trip repr), optional SVG plots, and sidecar JSON metadata next to
report files.  All computation happens before any file is written, so a
failing run never leaves partial output.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

from . import analysis, moments, solver
from .kernel import heat_kernel, read_sequence_csv, write_sequence_csv
from .solver import ForcingSpec

__all__ = ["run", "main"]


def _parse_p(text: str) -> float:
    if text == "inf":
        return math.inf
    value = float(text)
    if value < 1.0:
        raise argparse.ArgumentTypeError(f"p must be >= 1 or 'inf', got {text!r}")
    return value


def _parse_grid(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) != 3 or parts[0] != "dyadic":
        raise argparse.ArgumentTypeError(f"grid must look like dyadic:A:B, got {text!r}")
    a, b = float(parts[1]), float(parts[2])
    if not (0.0 < a <= b):
        raise argparse.ArgumentTypeError(f"grid bounds must satisfy 0 < A <= B, got {text!r}")
    return analysis.dyadic_grid(a, b)


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(c) if isinstance(c, float) else c for c in row])


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _sidecar(path: Path) -> Path:
    return path.with_name(path.name + ".json")


def _write_svg(path: Path, xs: list[float], ys: list[float], title: str, loglog: bool) -> None:
    width, height, pad = 640, 480, 50
    if loglog:
        xs = [math.log10(x) for x in xs]
        ys = [math.log10(y) for y in ys]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    sx = lambda x: pad + (width - 2 * pad) * ((x - x0) / (x1 - x0) if x1 > x0 else 0.5)
    sy = lambda y: height - pad - (height - 2 * pad) * ((y - y0) / (y1 - y0) if y1 > y0 else 0.5)
    pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys))
    svg = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">\n'
        f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
        'fill="none" stroke="black" stroke-width="1"/>\n'
        f'<text x="{width // 2}" y="30" text-anchor="middle" font-family="monospace" '
        f'font-size="14">{title}</text>\n'
        f'<polyline points="{pts}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>\n'
        "</svg>\n"
    )
    path.write_text(svg, encoding="utf-8")


def _report_outputs(report: analysis.DecayReport, out: Path, plot: bool) -> list[tuple]:
    rows = [[t, v] for t, v in report.pairs]
    meta = {
        "label": report.label,
        "slope": report.slope,
        "intercept": report.intercept,
        "max_residual": report.max_residual,
        "t_range": list(report.t_range),
        "dropped": [list(p) for p in report.dropped],
    }
    meta.update({k: v for k, v in report.extras.items() if not isinstance(v, tuple)})
    outputs = [
        ("csv", out, ["t", "value"], rows),
        ("json", _sidecar(out), meta),
    ]
    if plot:
        xs = [t for t, _ in report.pairs]
        ys = [v for _, v in report.pairs]
        outputs.append(("svg", out.with_name(out.name + ".svg"), xs, ys, report.label, True))
    return outputs


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lattice-heat", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, grid=False, t=False, pnorm=False):
        p.add_argument("--eps", type=float, default=1e-12)
        p.add_argument("--plot", action="store_true")
        p.add_argument("--out", type=Path, required=True)
        if grid:
            p.add_argument("--grid", type=_parse_grid, default=analysis.dyadic_grid())
        if t:
            p.add_argument("--t", type=float, required=True)
        if pnorm:
            p.add_argument("--p", type=_parse_p, default=2.0)

    p = sub.add_parser("kernel", help="evaluate G(t, .) to a sequence CSV")
    common(p, t=True)

    p = sub.add_parser("evolve", help="mild solution from initial data (optional forcing)")
    common(p, t=True)
    p.add_argument("--f", type=Path, required=True)
    p.add_argument("--g", type=Path)

    p = sub.add_parser("duhamel", help="forced part of the mild solution")
    common(p, t=True)
    p.add_argument("--g", type=Path, required=True)

    p = sub.add_parser("moments", help="kernel moments against the moment polynomials")
    common(p, t=True)
    p.add_argument("--kmax", type=int, default=6)

    p = sub.add_parser("poly", help="moment polynomial coefficient or root tables")
    common(p)
    p.add_argument("--kmax", type=int, default=6)
    p.add_argument("--roots", action="store_true")

    p = sub.add_parser("decay", help="kernel decay slope report")
    common(p, grid=True, pnorm=True)
    p.add_argument("--quantity", choices=analysis.KERNEL_QUANTITIES, default="G")

    p = sub.add_parser("converge", help="large-time convergence profile")
    common(p, grid=True, pnorm=True)
    p.add_argument("--f", type=Path)
    p.add_argument("--g", type=Path)

    p = sub.add_parser("fourier", help="Fourier symbol verification")
    common(p, t=True)
    p.add_argument("--grid-size", type=int, default=64)

    p = sub.add_parser("diffdecay", help="iterated-difference decay experiment")
    common(p, grid=True, pnorm=True)
    p.add_argument("--order", type=int, default=1)

    return parser


def _snapshot_outputs(snap: solver.SolutionSnapshot, out: Path) -> list[tuple]:
    rows = [[n, float(v)] for n, v in zip(snap.u.indices(), snap.u.values)]
    meta = {"t": snap.t, "quad_error": snap.quad_error, "trunc_error": snap.trunc_error}
    return [("csv", out, ["n", "value"], rows), ("json", _sidecar(out), meta)]


def _execute(args: argparse.Namespace) -> list[tuple]:
    cmd = args.subcommand
    if cmd == "kernel":
        kernel = heat_kernel(args.t, args.eps)
        seq = kernel.to_sequence()
        outputs = [("csv", args.out, ["n", "value"], [[n, float(v)] for n, v in zip(seq.indices(), seq.values)])]
        if args.plot:
            outputs.append(
                ("svg", args.out.with_name(args.out.name + ".svg"),
                 [float(n) for n in seq.indices()], list(map(float, seq.values)),
                 f"G(t={args.t})", False)
            )
        return outputs

    if cmd == "evolve":
        f = read_sequence_csv(args.f)
        g = ForcingSpec.from_json(args.g) if args.g else ForcingSpec.none()
        snap = solver.solve(f, g, args.t, eps=args.eps)
        return _snapshot_outputs(snap, args.out)

    if cmd == "duhamel":
        g = ForcingSpec.from_json(args.g)
        snap = solver.duhamel(g, args.t, eps=args.eps)
        return _snapshot_outputs(snap, args.out)

    if cmd == "moments":
        polys = moments.moment_polynomials(args.kmax)
        rows = []
        for k, poly in enumerate(polys):
            expected = moments.poly_eval(poly, 2.0 * args.t)
            kernel = moments.heat_kernel_for_moment(args.t, 2 * k, max(1e-12, 1e-10 * expected))
            rows.append([k, moments.kernel_moment(kernel, 2 * k), expected, moments.kernel_moment(kernel, 2 * k + 1)])
        return [("csv", args.out, ["k", "even_moment", "poly_value", "odd_moment"], rows)]

    if cmd == "poly":
        polys = moments.moment_polynomials(args.kmax)
        if args.roots:
            rows = []
            for k, poly in enumerate(polys):
                if k < 2:
                    continue
                for i, root in enumerate(moments.poly_real_roots(poly, 1e-12)):
                    rows.append([k, i, root])
            return [("csv", args.out, ["k", "root_index", "root"], rows)]
        rows = [[k] + [poly.degree] + list(poly.coeffs) for k, poly in enumerate(polys)]
        header = ["k", "degree"] + [f"c{i}" for i in range(args.kmax + 1)]
        return [("csv", args.out, header, rows)]

    if cmd == "decay":
        report = analysis.kernel_decay(args.p, args.quantity, args.grid, eps=args.eps)
        return _report_outputs(report, args.out, args.plot)

    if cmd == "converge":
        if (args.f is None) == (args.g is None):
            raise SystemExit2("converge needs exactly one of --f or --g")
        f = read_sequence_csv(args.f) if args.f else None
        g = ForcingSpec.from_json(args.g) if args.g else None
        report = analysis.large_time_profile(f, g, args.p, args.grid, eps=args.eps)
        return _report_outputs(report, args.out, args.plot)

    if cmd == "fourier":
        kernel = heat_kernel(args.t, args.eps)
        import numpy as np

        n = np.arange(1, kernel.window + 1)
        rows = []
        worst = 0.0
        for j in range(args.grid_size):
            theta = -math.pi + 2.0 * math.pi * (j + 1) / args.grid_size
            transform = float(kernel.values[0] + 2.0 * math.fsum(kernel.values[1:] * np.cos(n * theta)))
            symbol = math.exp(-4.0 * args.t * math.sin(theta / 2.0) ** 2)
            worst = max(worst, abs(transform - symbol))
            rows.append([theta, transform, symbol])
        return [
            ("csv", args.out, ["theta", "transform", "symbol"], rows),
            ("json", _sidecar(args.out), {"t": args.t, "max_abs_error": worst}),
        ]

    if cmd == "diffdecay":
        report = analysis.higher_difference_decay(args.order, args.p, args.grid, eps=args.eps)
        return _report_outputs(report, args.out, args.plot)

    raise AssertionError(f"unhandled subcommand {cmd!r}")


class SystemExit2(Exception):
    """Usage error detected after argument parsing."""


def run(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        outputs = _execute(args)
    except SystemExit2 as exc:
        print(f"lattice-heat: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"lattice-heat: invalid arguments: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, OSError) as exc:
        print(f"lattice-heat: computation failed: {exc}", file=sys.stderr)
        return 1
    for spec in outputs:
        kind = spec[0]
        if kind == "csv":
            _, path, header, rows = spec
            _write_csv(path, header, rows)
        elif kind == "json":
            _, path, payload = spec
            _write_json(path, payload)
        elif kind == "svg":
            _, path, xs, ys, title, loglog = spec
            _write_svg(path, xs, ys, title, loglog)
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))
