"""Command-line front end.

Subcommands load games or noisy-game descriptions, run the analyses, and
write CSV/JSON files plus optional line plots.  All data goes to stdout or
the requested output file; diagnostics go to stderr; the exit code is zero
exactly when no error occurred.  Numbers are written with 17 significant
digits so files are reproducible byte-for-byte under a fixed seed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from .games import (
    Bimatrix2x2,
    UndefinedRatioError,
    classify_player,
    enumerate_nash,
    load_game,
    optimal_welfare,
    price_of_anarchy,
    shift_game,
    utility_gain,
)
from .misinfo import NoiseSpec, load_noisy_spec, welfare_ratio_plane
from .montecarlo import SWEEP_COLUMNS, McConfig, SweepRow, sweep
from .probability import (
    QuadratureConfig,
    consistency_probabilities,
    noise_threshold_scan,
)

DEFAULT_D_GRID = [0.001] + [0.5 * k for k in range(1, 21)]

REFERENCE_GAME = Bimatrix2x2(((3, 0), (0, 2)), ((2, 0), (0, 3)))


def fmt(value: float) -> str:
    """Full-precision decimal rendering used for all emitted numbers."""
    return f"{value:.17g}"


def _fmt_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    if value == float("inf"):
        return "inf"
    return fmt(value)


def parse_d_grid(text: str) -> list[float]:
    """Grid spec: either ``start:step:stop`` (inclusive) or a comma list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError("grid spec must be start:step:stop or a comma list")
        start, step, stop = (float(p) for p in parts)
        if step <= 0.0:
            raise ValueError("grid step must be positive")
        n = int(round((stop - start) / step))
        grid = [start + k * step for k in range(n + 1) if start + k * step <= stop + 1e-12]
    else:
        grid = [float(p) for p in text.split(",") if p.strip()]
    if not grid:
        raise ValueError("empty grid spec")
    return grid


def sweep_csv_text(rows: Sequence[SweepRow]) -> str:
    lines = [",".join(SWEEP_COLUMNS)]
    for row in rows:
        lines.append(
            ",".join(_fmt_cell(getattr(row, col)) for col in SWEEP_COLUMNS)
        )
    return "\n".join(lines) + "\n"


def write_sweep_csv(rows: Sequence[SweepRow], path) -> None:
    Path(path).write_text(sweep_csv_text(rows), encoding="utf-8")


def read_sweep_csv(path) -> list[dict]:
    """Parse a sweep CSV back into records (round-trip of write_sweep_csv)."""
    lines = Path(path).read_text(encoding="utf-8").strip().splitlines()
    header = lines[0].split(",")
    records = []
    for line in lines[1:]:
        rec = {}
        for key, cell in zip(header, line.split(",")):
            if cell == "":
                rec[key] = None
            elif key == "degenerate_resamples":
                rec[key] = int(cell)
            else:
                rec[key] = float(cell)
        records.append(rec)
    return records


def write_plane_csv(plane: np.ndarray, path) -> None:
    lines = [",".join(_fmt_cell(float(v)) for v in row) for row in plane]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_plane_csv(path) -> np.ndarray:
    rows = []
    for line in Path(path).read_text(encoding="utf-8").strip().splitlines():
        rows.append([float(cell) for cell in line.split(",")])
    return np.array(rows)


def _plot_sweep(rows: Sequence[SweepRow], path: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ds = [row.d for row in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    if rows[0].p_mis_theory is not None:
        ax.plot(ds, [r.p_mis_theory for r in rows], "-", label="p_mis (theory)")
        ax.plot(ds, [r.p_inv_theory for r in rows], "-", label="p_inv (theory)")
    if rows[0].freq_mis is not None:
        ax.errorbar(
            ds,
            [r.freq_mis for r in rows],
            yerr=[4 * r.se_mis for r in rows],
            fmt="o",
            ms=3,
            label="freq_mis (MC)",
        )
        ax.errorbar(
            ds,
            [r.freq_inv for r in rows],
            yerr=[4 * r.se_inv for r in rows],
            fmt="s",
            ms=3,
            label="freq_inv (MC)",
        )
    ax.set_xlabel("noise scale d")
    ax.set_ylabel("probability")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def _strategy_str(s) -> str:
    return f"({fmt(s.p)}, {fmt(1.0 - s.p)})"


def _profile_str(profile) -> str:
    return f"({_strategy_str(profile.row)}, {_strategy_str(profile.col)})"


def _profile_sort_key(profile):
    return (-profile.row.p, -profile.col.p)


def cmd_solve(args) -> int:
    game = load_game(args.game)
    out = []
    for x in ("r", "c"):
        cls = classify_player(game, x)
        out.append(f"class[{x}]: {json.dumps(cls.to_dict())}")
    for ne in sorted(enumerate_nash(game), key=_profile_sort_key):
        out.append(f"nash: {_profile_str(ne)}")
    profile, opt = optimal_welfare(game)
    out.append(f"optimal_welfare: {fmt(opt)} at {_profile_str(profile)}")
    try:
        out.append(f"poa: {fmt(price_of_anarchy(game))}")
    except UndefinedRatioError as exc:
        out.append(f"poa: undefined ({exc})")
    print("\n".join(out))
    return 0


def _quad_config(args) -> QuadratureConfig:
    if getattr(args, "quad_abs_tol", None):
        return QuadratureConfig(abs_tol=args.quad_abs_tol)
    return QuadratureConfig()


def cmd_analyze(args) -> int:
    spec = load_noisy_spec(args.noisy)
    epsilon = args.epsilon if args.epsilon is not None else spec.epsilon
    report = consistency_probabilities(
        spec.game, spec.noise, epsilon, _quad_config(args), args.ratio_mode
    )
    text = json.dumps(report.to_dict(), indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return 0


def cmd_mc(args) -> int:
    spec = load_noisy_spec(args.noisy)
    epsilon = args.epsilon if args.epsilon is not None else spec.epsilon
    rows = sweep(
        spec.game,
        spec.noise,
        epsilon,
        [1.0],
        McConfig(reps=args.reps, seed=args.seed),
        mode="mc",
    )
    if args.out:
        write_sweep_csv(rows, args.out)
    else:
        print(sweep_csv_text(rows), end="")
    return 0


def _shape_for(args) -> tuple[Bimatrix2x2, NoiseSpec, float | None]:
    """Game + noise shape from --game (unit noise) or --noisy-shape."""
    if args.noisy_shape:
        spec = load_noisy_spec(args.noisy_shape)
        return spec.game, spec.noise, spec.epsilon
    if not args.game:
        raise ValueError("provide --game or --noisy-shape")
    return load_game(args.game), NoiseSpec.uniform(1.0), None


def cmd_sweep(args) -> int:
    game, shape, file_eps = _shape_for(args)
    epsilon = args.epsilon if args.epsilon is not None else file_eps
    if epsilon is None:
        raise ValueError("no tolerance: pass --epsilon or put one in the shape file")
    grid = parse_d_grid(args.d_grid) if args.d_grid else DEFAULT_D_GRID
    mode = "both" if args.mc else "theory"
    rows = sweep(
        game,
        shape,
        epsilon,
        grid,
        McConfig(reps=args.mc or 3000, seed=args.seed),
        mode=mode,
        ratio_mode=args.ratio_mode,
        quad=_quad_config(args),
    )
    write_sweep_csv(rows, args.out)
    if args.svg:
        _plot_sweep(rows, args.svg)
    return 0


def cmd_pom_plane(args) -> int:
    game = load_game(args.game)
    if args.shift:
        game = shift_game(game, args.shift)
    plane = welfare_ratio_plane(game, args.resolution)
    write_plane_csv(plane, args.out)
    return 0


def cmd_threshold(args) -> int:
    spec = load_noisy_spec(args.noisy_shape)
    epsilon = args.epsilon if args.epsilon is not None else spec.epsilon
    grid = parse_d_grid(args.d_grid) if args.d_grid else DEFAULT_D_GRID
    crossings = noise_threshold_scan(
        spec.game, spec.noise, epsilon, args.target, grid, _quad_config(args),
        args.ratio_mode,
    )
    payload = {
        "epsilon": epsilon,
        "target": args.target,
        "d_grid": grid,
        "crossings": [[lo, hi] for lo, hi in crossings],
    }
    text = json.dumps(payload, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return 0


def _annotated(label: str, computed: float, reference: float) -> str:
    return (
        f"{label}: {fmt(computed)}  "
        f"(reference {reference}, deviation {fmt(computed - reference)})"
    )


def cmd_example(args) -> int:
    """Worked reference example: a coordination game under unit noise at
    tolerance 0.1, each quantity annotated with its previously reported
    reference value and the deviation of the computed number from it."""
    game = REFERENCE_GAME
    spec = NoiseSpec.uniform(1.0)
    epsilon = 0.1
    lines = []
    gains = [utility_gain(game, x, i) for x in ("r", "c") for i in (1, 2)]
    lines.append(
        "utility gains (r1, r2, c1, c2): " + ", ".join(fmt(g) for g in gains)
    )
    report = consistency_probabilities(game, spec, epsilon, _quad_config(args))
    pr = report.players["r"]
    lines.append(
        "F values (r view; own1, own2, opp1, opp2): "
        + _annotated("own1", pr.f_own[0], 0.017)
    )
    lines.append("  " + _annotated("own2", pr.f_own[1], 0.921))
    lines.append("  " + _annotated("opp1", pr.f_opp[0], 0.078))
    lines.append("  " + _annotated("opp2", pr.f_opp[1], 0.983))
    lines.append(_annotated("p_op1[r]", pr.p_op1, 0.091))
    lines.append(_annotated("p_op2[r]", pr.p_op2, 0.085))
    lines.append(_annotated("p_rom[r](0.5,0.7)", pr.p_rom, 0.001))
    lines.append(_annotated("p_rpm[r](0.5,0.7)", pr.p_rpm, 0.207))
    pc = report.players["c"]
    lines.append(_annotated("p_rpm[c](0.3,0.5)", pc.p_rpm, 0.171))
    lines.append(_annotated("factor_mis[r]", pr.factor_mis, 0.386))
    lines.append(_annotated("factor_inv[r]", pr.factor_inv, 0.207))
    lines.append(_annotated("factor_mis[c]", pc.factor_mis, 0.349))
    lines.append(_annotated("factor_inv[c]", pc.factor_inv, 0.171))
    lines.append(_annotated("p_mis", report.p_mis, 0.135))
    lines.append(_annotated("p_inv", report.p_inv, 0.035))
    lines.append(
        "note: reference values downstream of the ratio-band integral are not "
        "reproduced by either evaluation mode; the computed values are the "
        "Monte Carlo confirmed ones (see README)."
    )
    print("\n".join(lines))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noisygames",
        description="Equilibrium analysis of 2x2 games under Gaussian payoff noise",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_quad(p):
        p.add_argument(
            "--quad-abs-tol",
            type=float,
            default=None,
            help="absolute quadrature tolerance (default 1e-10 or "
            "NOISYGAMES_QUAD_ABS_TOL)",
        )
        p.add_argument(
            "--ratio-mode",
            choices=("corrected", "literal"),
            default="corrected",
            help="ratio-band integrand variant (corrected is canonical)",
        )

    p = sub.add_parser("solve", help="classify a game, list equilibria, report welfare")
    p.add_argument("--game", required=True, help="built-in name or JSON file")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("analyze", help="closed-form consistency report as JSON")
    p.add_argument("--noisy", required=True, help="noisy-game JSON file")
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--out", default=None)
    add_quad(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("mc", help="Monte Carlo estimate at the file's noise level")
    p.add_argument("--noisy", required=True)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--reps", type=int, default=3000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("sweep", help="theory/MC table over a noise-scale grid")
    p.add_argument("--game", default=None, help="built-in name or JSON file")
    p.add_argument("--noisy-shape", default=None, help="noisy-game file giving the noise shape")
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--d-grid", default=None, help="start:step:stop or comma list")
    p.add_argument("--mc", type=int, default=0, help="MC repetitions per row (0 = theory only)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--svg", default=None, help="also render a line plot to this file")
    add_quad(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("pom-plane", help="optimal-to-realized welfare ratio grid")
    p.add_argument("--game", required=True)
    p.add_argument("--shift", type=float, default=0.0, help="add a constant to all payoffs first")
    p.add_argument("--resolution", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_pom_plane)

    p = sub.add_parser("threshold", help="noise scales where p_mis crosses a target")
    p.add_argument("--noisy-shape", required=True)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--target", type=float, required=True)
    p.add_argument("--d-grid", default=None)
    p.add_argument("--out", default=None)
    add_quad(p)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("example", help="worked reference example with annotations")
    add_quad(p)
    p.set_defaults(func=cmd_example)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        return 0
    except Exception as exc:  # keep data and diagnostics streams separate
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
