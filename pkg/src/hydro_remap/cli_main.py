"""
Lagrange-remap hydrodynamics driver.

Subcommands:
    run <config>                 Run one case from a configuration file
    converge <case> <schemes>    Convergence study over several meshes
    analyze table|singlenode|linadv
                                 Print the closed-form analyses
    case-list                    List the benchmark cases

Main entry point for the application.
"""

from __future__ import annotations

import argparse
import sys
from collections.abc import Sequence
from dataclasses import replace
from pathlib import Path
from typing import NoReturn

import pandas as pd
from loguru import logger

from .analysis import (
    bbc_stability_bound,
    bbc_vs_glace_crossover,
    first_order_remap_gap,
    ratio_table,
    single_node_corner_mass,
    single_node_lag_volume,
)
from .cases import build_case, case_names
from .config import load_config
from .errors import UsageError
from .harness import HydroEngine, convergence_study
from .models import RemapKind, RunConfig, State
from .output import write_convergence_table, write_fields


def configure_logging(level: str = "INFO", log_file: Path | None = None) -> None:
    """Route package logs to stderr (and optionally a file)."""
    logger.enable("hydro_remap")
    logger.remove()
    logger.add(sys.stderr, level=level, format="{time:HH:mm:ss} | {level: <7} | {message}")
    if log_file is not None:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        logger.add(log_file, level="DEBUG", mode="w", format="{time:YYYY-MM-DD HH:mm:ss.SSS} | {level} | {message}")


def _parse_schemes(text: str) -> list[RemapKind]:
    schemes = []
    for name in text.split(","):
        match = [k for k in RemapKind if k.value.lower() == name.strip().lower()]
        if not match:
            valid = ", ".join(k.value for k in RemapKind)
            raise argparse.ArgumentTypeError(f"invalid scheme '{name}', expected one of: {valid}")
        schemes.append(match[0])
    return schemes


def _parse_ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",")]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'") from e


class _Parser(argparse.ArgumentParser):
    """Argument parser that raises instead of printing usage and exiting."""

    def error(self, message: str) -> NoReturn:
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="hydro-remap", description="2D Lagrange-remap multi-material hydrodynamics"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run one case from a configuration file")
    run.add_argument("config", type=Path, help="key = value configuration file")
    run.add_argument("--max-steps", type=int, default=None, help="Stop after this many steps")
    run.add_argument("--ledger", action="store_true", help="Print the conservation ledger")

    converge = sub.add_parser("converge", help="Convergence study of a case")
    converge.add_argument("case", choices=case_names())
    converge.add_argument("schemes", type=_parse_schemes, help="Comma-separated remaps, e.g. AD,Direct")
    converge.add_argument("--meshes", type=_parse_ints, default=[50, 100, 200], help="Cell counts along x")
    converge.add_argument("--face-order", type=int, choices=(1, 2), default=2)
    converge.add_argument("--end-time", type=float, default=None)
    converge.add_argument("--out", type=Path, default=None, help="Table path (.csv or .xlsx)")

    analyze = sub.add_parser("analyze", help="Closed-form analyses")
    analyze.add_argument("what", choices=("table", "singlenode", "linadv"))
    analyze.add_argument("--a0dt", type=float, default=0.01, help="alpha0 dt")
    analyze.add_argument("--cfl", type=float, default=0.34, help="c0 dt / dx")
    analyze.add_argument("--seed", type=int, default=0)
    analyze.add_argument("--samples", type=int, default=10)

    sub.add_parser("case-list", help="List the benchmark cases")
    parser.add_argument("--log-level", default="WARNING", help="stderr log level (run uses its config)")
    return parser


# =============================================================================
# Subcommands
# =============================================================================


def _dump_name(config: RunConfig, state: State, tag: str = "") -> str:
    suffix = "vtk" if config.output_format.value == "vtk" else "csv"
    return f"{config.case}_{tag or f'step{state.step:06d}'}.{suffix}"


def cmd_run(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    out_dir = Path(config.output_dir)
    configure_logging(config.log_level, out_dir / "diagnostics.log")

    case = build_case(config.case, config.divisor, config.resolution)
    if config.end_time is not None:
        case = replace(case, end_time=config.end_time)
    engine = HydroEngine(
        case, scheme=config.scheme, recon=config.recon, viscosity=config.viscosity, cfl=config.cfl
    )

    def dump(state: State) -> None:
        if config.output_every and state.step % config.output_every == 0:
            write_fields(state, out_dir / _dump_name(config, state), config.output_format)

    report = engine.run(hooks=[dump], max_steps=args.max_steps)
    assert report.final_state is not None
    final = write_fields(
        report.final_state, out_dir / _dump_name(config, report.final_state, "final"), config.output_format
    )
    for when, state in report.snapshots.items():
        write_fields(state, out_dir / _dump_name(config, state, f"t{when * 1e3:g}ms"), config.output_format)

    if args.ledger:
        engine.print_ledger()
    engine.print_summary(report)
    print(f"\nFinal fields written to: {final}")
    return 0


def cmd_converge(args: argparse.Namespace) -> int:
    configure_logging(args.log_level)
    recon = replace(build_case(args.case).recon, face_order=args.face_order)
    study = convergence_study(args.case, args.meshes, args.schemes, recon=recon, end_time=args.end_time)

    print("\n" + "=" * 78)
    print(f"CONVERGENCE STUDY: {study.case_name}")
    print("=" * 78)
    print(f"{'Scheme':<10} {'Mesh':>10} {'dx':>12} {'L2(rho)':>16} {'L2(k1)':>16} {'Steps':>8}")
    print("-" * 78)
    for row in study.table.itertuples(index=False):
        l2_k = f"{row.l2_k:>16.6e}" if pd.notna(row.l2_k) else f"{'-':>16}"
        print(
            f"{row.scheme:<10} {f'{row.nx}x{row.ny}':>10} {row.dx:>12.4e} "
            f"{row.l2_rho:>16.6e} {l2_k} {row.steps:>8}"
        )
    print("-" * 78)
    for scheme, slope in study.slopes.items():
        print(f"  Fitted slope {scheme:<10} {slope:>8.3f}")
    print("=" * 78)
    if args.out is not None:
        print(f"\nTable written to: {write_convergence_table(study, args.out)}")
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    configure_logging(args.log_level)
    if args.what == "table":
        table = ratio_table(args.a0dt, args.cfl)
        print(f"\nOne-step curl ratios at alpha0 dt = {args.a0dt:g}, c0 dt/dx = {args.cfl:g}")
        print("=" * 48)
        print(f"{'Scheme':<8} {'Layout':<8} {'Point vortex':>14} {'Ideal vortex':>14}")
        print("-" * 48)
        for row in table.itertuples(index=False):
            print(f"{row.scheme:<8} {row.layout:<8} {row.point:>14.8f} {row.ideal:>14.8f}")
        print("=" * 48)
        print(f"BBC stability bound (alpha0 dt):     {bbc_stability_bound():.8f}")
        print(f"Centred/BBC crossover CFL:           {bbc_vs_glace_crossover(args.a0dt):.8f}")
    elif args.what == "singlenode":
        print("\nOne moving node: Lagrangian volume / dx^2 and corner mass dm/m")
        print("=" * 86)
        print(f"{'eps':>6} {'Exact':>12} {'AD':>12} {'Direct':>12} {'DirectCF':>12} {'dm Exact':>14} {'dm DirectCF':>14}")
        print("-" * 86)
        for eps in (0.2, 0.1, 0.05):
            print(
                f"{eps:>6.3f} {single_node_lag_volume(None, eps):>12.8f} "
                f"{single_node_lag_volume(RemapKind.AD, eps):>12.8f} "
                f"{single_node_lag_volume(RemapKind.DIRECT, eps):>12.8f} "
                f"{single_node_lag_volume(RemapKind.DIRECT_CF, eps):>12.8f} "
                f"{single_node_corner_mass(None, eps):>14.10f} "
                f"{single_node_corner_mass(RemapKind.DIRECT_CF, eps):>14.10f}"
            )
        print("=" * 86)
    else:
        print("\nFirst-order AD vs DirectCF on random periodic fields")
        print("=" * 40)
        worst = 0.0
        for k in range(args.samples):
            gap = first_order_remap_gap(seed=args.seed + k)
            worst = max(worst, gap)
            print(f"  seed {args.seed + k:>4}: max |diff| = {gap:.3e}")
        print("-" * 40)
        print(f"  worst: {worst:.3e}")
    return 0


def cmd_case_list(_: argparse.Namespace) -> int:
    for name in case_names():
        case = build_case(name)
        print(f"{name:<20} {case.mesh.nx}x{case.mesh.ny:<6} T={case.end_time:<8g} {case.description}")
    return 0


_COMMANDS = {
    "run": cmd_run,
    "converge": cmd_converge,
    "analyze": cmd_analyze,
    "case-list": cmd_case_list,
}


def cli_main(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv`` and run the subcommand; returns the exit code."""
    try:
        args = build_parser().parse_args(argv)
        return _COMMANDS[args.command](args)
    except (ValueError, OSError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
