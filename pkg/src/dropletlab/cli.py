"""Command-line entry point: ``dropletlab {e0,partition,minimize-f,ansatz,sweep}``.

Exit codes: 0 on success, 2 for invalid arguments or configs, 3 when a
numerical procedure fails to converge.  Output files go to ``--output-dir``,
else ``$DROPLETLAB_OUTPUT_DIR``, else ``./dropletlab-output``.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from .ansatz import CSV_COLUMNS, AnsatzSpec, breakdown_row, delta_rule, evaluate_ansatz, expansion_residual
from .config import ConfigError, ExperimentConfig
from .errors import ConvergenceError
from .interaction import DropletConfig, minimize_interaction, virial_check
from .liquid_drop import (
    BINARY_SPLIT_MASS,
    CONCAVITY_THRESHOLD,
    DEFAULT_ADMISSIBLE_CAP,
    e0_ball,
    e0_ball_derivative,
    e0_ball_second_derivative,
    kkt_residual,
    optimal_partition,
)
from .scaling import SWEEP_COLUMNS, SweepPlan, run_sweep, summarize

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3
OUTPUT_ENV = "DROPLETLAB_OUTPUT_DIR"
E0_COLUMNS = ("mass", "e0", "e0_prime", "e0_second", "concave", "at_inflection")

log = logging.getLogger("dropletlab")


def output_dir(args) -> Path:
    path = Path(args.output_dir or os.environ.get(OUTPUT_ENV) or "dropletlab-output")
    path.mkdir(parents=True, exist_ok=True)
    return path


def config_digest(cfg: ExperimentConfig) -> str:
    return hashlib.sha256(cfg.canonical().encode()).hexdigest()[:12]


def write_csv(stream, columns, rows, cfg: ExperimentConfig | None = None):
    if cfg is not None:
        if "seed" not in cfg.data:
            stream.write(f"# seed = {cfg.seed}\n")
        for line in cfg.canonical().splitlines():
            stream.write(f"# {line}\n")
    writer = csv.DictWriter(stream, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _fmt(v) for k, v in row.items()})


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def _save_csv(path: Path, columns, rows, cfg):
    buf = io.StringIO()
    write_csv(buf, columns, rows, cfg)
    path.write_text(buf.getvalue())


def cmd_e0(args) -> int:
    if args.range is not None:
        start, stop, num = args.range
        if not (start > 0 and stop > start) or num < 1 or num != int(num):
            raise ConfigError("--range needs 0 < START < STOP and a positive integer NUM")
        masses = np.linspace(start, stop, int(num))
    else:
        masses = np.asarray(args.mass, dtype=float)
    if np.any(~(masses > 0)):
        raise ConfigError("masses must be positive")
    rows = []
    for m in masses:
        rows.append({
            "mass": float(m),
            "e0": e0_ball(m),
            "e0_prime": e0_ball_derivative(m),
            "e0_second": e0_ball_second_derivative(m),
            "concave": m < CONCAVITY_THRESHOLD,
            "at_inflection": abs(m - CONCAVITY_THRESHOLD) <= 1e-6 * CONCAVITY_THRESHOLD,
        })
    write_csv(sys.stdout, E0_COLUMNS, rows)
    print(f"# inflection of e0 at m = 2 pi = {CONCAVITY_THRESHOLD!r}")
    return EXIT_OK


def cmd_partition(args) -> int:
    try:
        part = optimal_partition(args.total, args.n_max, args.cap)
    except ValueError as err:
        raise ConfigError(str(err)) from err
    print(f"total        {args.total!r}")
    print(f"droplets     {part.n}")
    print("masses       " + " ".join(repr(m) for m in part.masses))
    print(f"objective    {part.objective!r}")
    print(f"single       {e0_ball(args.total)!r}")
    print(f"kkt_residual {kkt_residual(part, args.cap):.3e}")
    print(f"# equal binary split first beats one droplet at M = {BINARY_SPLIT_MASS!r}")
    return EXIT_OK


def cmd_minimize_f(args) -> int:
    cfg = ExperimentConfig.from_file(args.config)
    profile = cfg.profile()
    masses = cfg.masses()
    restarts = cfg.get("minimize", "restarts", int, 32)
    if restarts < 1:
        raise cfg.error("minimize", "restarts", "must be at least 1")
    opt = minimize_interaction(masses, profile, restarts, cfg.seed)
    R, Q, virial = virial_check(opt.config, profile)
    x = opt.config.positions.tolist()
    print(f"energy          {opt.energy!r}")
    print(f"repulsion       {R!r}")
    print(f"confinement     {Q!r}")
    print(f"virial_residual {virial:.3e}")
    print(f"gradient_norm   {opt.gradient_norm:.3e}")
    print(f"restart         {opt.restart_index}")
    print(f"distinct_minima {len(opt.local_minima)}")
    for i, (m, p) in enumerate(zip(masses, x)):
        print(f"droplet {i}  mass {m!r}  position {p[0]!r} {p[1]!r} {p[2]!r}")
    if len(masses) > 1:
        print(f"min_separation  {opt.config.min_pair_distance()!r}")
    return EXIT_OK


def _ansatz_spec(cfg: ExperimentConfig) -> AnsatzSpec:
    profile = cfg.profile()
    masses = cfg.masses()
    positions = cfg.get("droplets", "positions", "points")
    if len(positions) != len(masses):
        raise cfg.error("droplets", "positions", f"expected {len(masses)} points, got {len(positions)}")
    eta = cfg.get("ansatz", "eta", float)
    raw_delta = cfg.data.get("ansatz", {}).get("delta", "rule")
    if raw_delta == "rule":
        delta = delta_rule(eta, profile) if 0 < eta < 1 else eta
    else:
        delta = cfg.get("ansatz", "delta", float)
    order = cfg.get("ansatz", "quad_order", int, 16)
    try:
        return AnsatzSpec(eta, delta, DropletConfig(masses, positions), profile, quad_order=order)
    except ValueError as err:
        raise cfg.error("ansatz", "eta", str(err)) from err


def cmd_ansatz(args) -> int:
    cfg = ExperimentConfig.from_file(args.config)
    spec = _ansatz_spec(cfg)
    b = evaluate_ansatz(spec)
    try:
        residual = expansion_residual(spec, b)
    except ValueError:
        residual = math.nan
    row = breakdown_row(spec, b, residual)
    write_csv(sys.stdout, CSV_COLUMNS, [row], cfg)
    path = output_dir(args) / f"ansatz-{config_digest(cfg)}.csv"
    _save_csv(path, CSV_COLUMNS, [row], cfg)
    log.info("wrote %s", path)
    return EXIT_OK


def sweep_plan(cfg: ExperimentConfig) -> SweepPlan:
    try:
        return SweepPlan(
            eta_values=tuple(cfg.get("sweep", "eta_values", "floats")),
            mode=cfg.get("sweep", "mode", str, "fixed_delta_rule"),
            profile=cfg.profile(),
            masses=tuple(cfg.masses()),
            restarts=cfg.get("sweep", "restarts", int, 32),
            seed=cfg.seed,
            quad_order=cfg.get("sweep", "quad_order", int, 16),
        )
    except ConfigError:
        raise
    except ValueError as err:
        key = "mode" if "mode" in str(err) else "eta_values"
        raise cfg.error("sweep", key, str(err)) from err


def format_fits(fits) -> str:
    lines = []
    for name, fit in fits.items():
        lo, hi = fit.ci95
        lines.append(
            f"{name}: exponent {fit.exponent:.6f}  ci95 [{lo:.6f}, {hi:.6f}]  "
            f"r2 {fit.r_squared:.6f}  points {fit.n_points}"
            + ("  (largest eta dropped)" if fit.dropped_largest else "")
        )
    return "\n".join(lines) if lines else "no fit (fewer than 3 points)"


def cmd_sweep(args) -> int:
    cfg = ExperimentConfig.from_file(args.config)
    plan = sweep_plan(cfg)
    result = run_sweep(plan)
    digest = config_digest(cfg)
    out = output_dir(args)
    _save_csv(out / f"sweep-{digest}.csv", SWEEP_COLUMNS, result.rows, cfg)
    summary = format_fits(summarize(result))
    for eta, reason in result.skipped:
        summary += f"\nskipped eta={eta!r}: {reason}"
    (out / f"sweep-{digest}-fit.txt").write_text(summary + "\n")
    write_csv(sys.stdout, SWEEP_COLUMNS, result.rows, cfg)
    print(summary)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dropletlab", description=__doc__.splitlines()[0])
    parser.add_argument("--output-dir", help=f"output directory (overrides ${OUTPUT_ENV})")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("e0", help="ball liquid-drop energy and its derivatives")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--mass", type=float, action="append")
    g.add_argument("--range", type=float, nargs=3, metavar=("START", "STOP", "NUM"))
    p.set_defaults(func=cmd_e0)

    p = sub.add_parser("partition", help="optimal split of a total mass into balls")
    p.add_argument("--total", type=float, required=True)
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--cap", type=float, default=DEFAULT_ADMISSIBLE_CAP)
    p.set_defaults(func=cmd_partition)

    for name, func, text in (
        ("minimize-f", cmd_minimize_f, "minimise the droplet interaction energy"),
        ("ansatz", cmd_ansatz, "full energy breakdown of a droplet configuration"),
        ("sweep", cmd_sweep, "eta sweep and exponent fits"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("config", help="TOML config file")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
