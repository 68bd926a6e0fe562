"""Command-line runner for the edge-response experiments.

Exit codes: 0 success, 2 config or usage error, 3 numeric or geometry error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .config import ExperimentConfig, bundled_config, load_config
from .edge_theory import edge_profile, genericity_report, remote_convergence_check
from .errors import ConfigError, InputError, RadonEdgeError
from .expr import compile_function
from .kernel import build_kernel, verify_assumptions
from .phantom import jump_params
from .plot import emit_plot, write_profile_csv
from .reconstruct import AnalyticProvider, TableProvider, build_sinogram, read_sinogram, write_sinogram
from .ud_diag import discrepancy_2d, frac_points, shear_map, star_discrepancy_1d, weyl_sum

__all__ = ["main", "build_parser", "run_profile"]

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def _config(args) -> ExperimentConfig:
    if not args.config:
        raise ConfigError("this subcommand needs --config PATH (or a bundled name: fig1, fig2a, fig2b, remote)")
    path = Path(args.config)
    if not path.exists() and not path.suffix:
        path = bundled_config(args.config)
    return load_config(path)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _fmt_row(values) -> str:
    return ",".join("%.17g" % v if isinstance(v, float) else str(v) for v in values)


# -- subcommands ----------------------------------------------------------------

def cmd_kernel_check(args) -> int:
    kernel = build_kernel()
    report = verify_assumptions(kernel)
    for line in report.lines():
        print(line)
    out = _out_dir(args)
    path = _config(args).output_path("kernel_csv", out) if args.config else out / "kernel.csv"
    rows = kernel.phi.to_rows()
    n_coef = len(rows[0]) - 1
    with open(path, "w") as fh:
        fh.write(",".join(["breakpoint"] + [f"c{i}" for i in range(n_coef)]) + "\n")
        for row in rows:
            fh.write(",".join(str(v) for v in row) + "\n")
    print(f"coefficients: {path}")
    return EXIT_OK if report.all_pass else EXIT_NUMERIC


def cmd_simulate(args) -> int:
    cfg = _config(args)
    path = cfg.output_path("sinogram", _out_dir(args))
    sino = build_sinogram(cfg.phantom, cfg.grid)
    write_sinogram(path, sino)
    print(f"sinogram: {path} ({cfg.grid.n_directions} directions x {cfg.grid.n_p} offsets)")
    return EXIT_OK


def run_profile(cfg: ExperimentConfig, threads: int = 1, sinogram=None):
    """Edge profile for a parsed config, from analytic data or a stored sinogram."""
    x0, theta0 = cfg.require_probe()
    kernel = build_kernel()
    if sinogram is not None:
        sino = read_sinogram(sinogram)
        if sino.grid != cfg.grid:
            raise ConfigError(f"sinogram grid {sino.grid} does not match the config grid {cfg.grid}")
        provider = TableProvider(sino)
    else:
        provider = AnalyticProvider(cfg.phantom, cfg.grid)
    jump = jump_params(cfg.phantom, x0, theta0)
    return edge_profile(provider, kernel, cfg.grid, x0, theta0, cfg.h_values, jump, threads)


def cmd_profile(args) -> int:
    cfg = _config(args)
    out = _out_dir(args)
    prof = run_profile(cfg, args.threads, args.sinogram)
    path = cfg.output_path("profile_csv", out)
    write_profile_csv(path, prof.rows())
    print(f"max_abs_dev = {prof.max_abs_dev:.17g}")
    print(f"l2_dev = {prof.l2_dev:.17g}")
    print(f"profile: {path}")
    if args.svg:
        svg = emit_plot(path, cfg.output_path("svg", out))
        print(f"plot: {svg}")
    return EXIT_OK


def cmd_genericity(args) -> int:
    cfg = _config(args)
    x0, theta0 = cfg.require_probe()
    report = genericity_report(cfg.phantom, cfg.grid, x0, theta0)
    text = "\n".join(report.lines()) + "\n"
    sys.stdout.write(text)
    path = cfg.output_path("report", _out_dir(args))
    path.write_text(text)
    return EXIT_OK


def cmd_remote_check(args) -> int:
    cfg = _config(args)
    x0, theta0 = cfg.require_probe()
    grids = cfg.remote_grids()
    rows = remote_convergence_check(cfg.remote_phantom(), grids, build_kernel(), x0, theta0,
                                    cfg.h_values, args.threads)
    path = cfg.output_path("remote_csv", _out_dir(args))
    with open(path, "w") as fh:
        fh.write("eps,n_theta,n_gamma,max_abs\n")
        for grid, (eps, m) in zip(grids, rows):
            line = _fmt_row((float(eps), grid.n_theta, grid.n_gamma, float(m)))
            fh.write(line + "\n")
            print(line)
    maxima = [m for _, m in sorted(rows, reverse=True)]
    decreasing = all(b < a for a, b in zip(maxima, maxima[1:]))
    print(f"strictly decreasing as eps shrinks: {decreasing}")
    print(f"remote: {path}")
    return EXIT_OK


def cmd_ud(args) -> int:
    f = compile_function(args.f)
    g = compile_function(args.g) if args.g else None
    if args.d2 and g is None:
        raise InputError("--d2 needs --g EXPR for the second coordinate")
    header = ["eps", "n", "star_discrepancy"]
    if args.weyl is not None:
        header.append(f"weyl_{args.weyl}")
    if args.d2:
        header += ["discrepancy_2d", "discrepancy_2d_bound"]
    lines = [",".join(header)]
    for eps in args.eps:
        seq = frac_points(f, args.a, args.b, eps)
        row = [float(eps), len(seq), star_discrepancy_1d(seq)]
        if args.weyl is not None:
            row.append(weyl_sum(seq, args.weyl))
        if args.d2:
            pts = np.column_stack([seq.points, frac_points(g, args.a, args.b, eps).points])
            if args.shear is not None:
                pts = shear_map(pts, args.shear)
            row += list(discrepancy_2d(pts, args.resolution))
        lines.append(_fmt_row(row))
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.csv:
        path = Path(args.csv)
        if not path.is_absolute():
            path = _out_dir(args) / path
        path.write_text(text)
    return EXIT_OK


def cmd_plot(args) -> int:
    out = _out_dir(args)
    if args.csv:
        csv_path = Path(args.csv)
        svg_path = Path(args.svg) if args.svg else csv_path.with_suffix(".svg")
    else:
        cfg = _config(args)
        csv_path = cfg.output_path("profile_csv", out)
        svg_path = cfg.output_path("svg", out)
    print(f"plot: {emit_plot(csv_path, svg_path)}")
    return EXIT_OK


# -- parser ---------------------------------------------------------------------

def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    kw = {"default": argparse.SUPPRESS} if suppress else {}
    parser.add_argument("--threads", type=int, help="worker threads (results never depend on it)",
                        **(kw or {"default": 1}))
    parser.add_argument("--config", help="experiment config path or bundled name", **(kw or {"default": None}))
    parser.add_argument("--out", help="output directory", **(kw or {"default": "."}))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="radonedge", description=__doc__.splitlines()[0])
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        _global_flags(p, suppress=True)
        p.set_defaults(func=fn)
        return p

    add("kernel-check", cmd_kernel_check, "verify kernel axioms and write its coefficients")
    add("simulate", cmd_simulate, "write the sinogram of the config phantom")
    p = add("profile", cmd_profile, "reconstruct across the edge and compare with the prediction")
    p.add_argument("--sinogram", help="use stored samples instead of analytic data")
    p.add_argument("--svg", action="store_true", help="also render the profile plot")
    add("genericity", cmd_genericity, "report the genericity conditions at the probe point")
    add("remote-check", cmd_remote_check, "profile maxima with the probed ball removed")
    p = add("ud", cmd_ud, "fractional-part sequence diagnostics")
    p.add_argument("--f", required=True, help="expression in t")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--eps", type=float, nargs="+", required=True, help="one or more steps (sweep)")
    p.add_argument("--weyl", type=int, metavar="M", help="also report the Weyl sum at frequency M")
    p.add_argument("--d2", action="store_true", help="2-D discrepancy of ({f/eps}, {g/eps}) pairs")
    p.add_argument("--g", help="second coordinate expression for --d2")
    p.add_argument("--shear", type=float, metavar="A", help="apply (x, y) -> ({x + A y}, y) before --d2")
    p.add_argument("--resolution", type=int, default=100, help="box grid resolution for --d2")
    p.add_argument("--csv", help="also write the table to this file")
    p = add("plot", cmd_plot, "render a profile CSV as SVG")
    p.add_argument("--csv", help="profile CSV (default: the config's profile_csv)")
    p.add_argument("--svg", help="output SVG (default: next to the CSV)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be at least 1")
    try:
        return args.func(args)
    except (ConfigError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (RadonEdgeError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
