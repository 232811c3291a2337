"""The `simulate` and `check` commands."""

from __future__ import annotations

import logging
import sys
from pathlib import Path

import numpy as np

from src.cli_runner.config import SimConfig, load_config
from src.cli_runner.exporter import InvariantExporter
from src.cli_runner.initial_conditions import initial_state
from src.cli_runner.snapshot import write_snapshot
from src.errors import BlowUpError, ConfigError, MLSpinError
from src.hamiltonian_core.state import Particle, State
from src.integrator.runge_kutta import evolve
from src.momentum_map.invariants import InvariantObserver, relative_drift
from src.momentum_map.verification import ResidualReport, run_all_checks

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_BAD_CONFIG = 2
EXIT_BLOW_UP = 3


def _prepare(
    config_path: str | Path, seed: int | None
) -> tuple[SimConfig, Particle, State] | None:
    """Load the config and build the particle and initial state; None after reporting errors."""
    try:
        cfg = load_config(config_path)
        if seed is not None:
            cfg = cfg.with_seed(seed)
        particle = cfg.build_particle()
        Y0 = initial_state(cfg, particle)
    except ConfigError as exc:
        where = f"{config_path}:{exc.line}" if exc.line is not None else str(config_path)
        print(f"{where}: {exc.args[0]}", file=sys.stderr)
        return None
    except MLSpinError as exc:
        print(f"{config_path}: {exc}", file=sys.stderr)
        return None
    return cfg, particle, Y0


def simulate_command(config_path: str | Path, out_dir: str | Path, seed: int | None = None) -> int:
    """
    Evolve the configured system and write invariants.csv (and snapshots) to `out_dir`.

    Returns:
        int: 0 on success, 2 for an invalid config, 3 on blow-up
    """
    prepared = _prepare(config_path, seed)
    if prepared is None:
        return EXIT_BAD_CONFIG
    cfg, particle, Y0 = prepared
    out_dir = Path(out_dir)
    run_cfg = cfg.run_config()

    snapshot_every = cfg.run.snapshot_every

    def on_step(step: int, t: float, Y: State) -> None:
        if snapshot_every and step % snapshot_every == 0:
            write_snapshot(Y, out_dir / f"snapshot_{step}.bin")

    if snapshot_every:
        write_snapshot(Y0, out_dir / "snapshot_0.bin")
    try:
        observer = InvariantObserver(particle)
        rows = evolve(Y0, run_cfg, particle, observers=(observer,), on_step=on_step)
    except BlowUpError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_BLOW_UP

    records = [row[0] for row in rows]
    csv_path = out_dir / "invariants.csv"
    InvariantExporter.export_records(records, csv_path)
    drift = relative_drift(records)
    logger.info("Relative drift: H=%.3e, P=%.3e, J=%.3e", drift["H"], drift["P"], drift["J"])
    logger.info("Wrote %d rows to %s", len(rows), csv_path)
    return EXIT_OK


def format_report_table(reports: list[ResidualReport], tolerances) -> tuple[list[str], bool]:
    """Rows `name.key  value  tolerance  status`; informational entries carry no tolerance."""
    lines = [f"{'check':<36} {'value':>12} {'tolerance':>12}  status"]
    all_passed = True
    for report in reports:
        tol = getattr(tolerances, report.name)
        for key, value in report.residuals.items():
            ok = value <= tol
            all_passed &= ok
            status = "pass" if ok else "FAIL"
            lines.append(f"{report.name + '.' + key:<36} {value:>12.3e} {tol:>12.1e}  {status}")
        for key, value in report.info.items():
            lines.append(f"{report.name + '.' + key:<36} {value:>12.3e} {'-':>12}  info")
    return lines, all_passed


def check_command(config_path: str | Path, seed: int | None = None) -> int:
    """
    Run the invariant audit on the configured initial state and print the residual table.

    Returns:
        int: 0 if every check passes, 1 if any fails, 2 for an invalid config
    """
    prepared = _prepare(config_path, seed)
    if prepared is None:
        return EXIT_BAD_CONFIG
    cfg, particle, Y0 = prepared
    reports = run_all_checks(Y0, particle, np.random.default_rng(cfg.fields.seed))
    lines, all_passed = format_report_table(reports, cfg.checks.tolerances)
    print("\n".join(lines))
    if not all_passed:
        logger.warning("At least one invariant check failed")
        return EXIT_CHECK_FAILED
    return EXIT_OK
