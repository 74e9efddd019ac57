"""Command-line interface: one-shot estimation, Monte Carlo sweeps, the
adaptive-matching capacity scenario, and a golden-value self check.

Exit codes: 0 success, 2 configuration error, 3 degenerate-dominated run
(more than half of all trials flagged degenerate).
"""

from __future__ import annotations

import json
import sys

import click
import numpy as np

from . import estimators as est
from .exceptions import ConfigError, ImpedanceLabError
from .fading import ChannelSpec, clarke_correlation, doppler_hz
from .frontend import compute_F, recover_ZA
from .harness import (ExperimentConfig, capacity_csv, load_config,
                      run_capacity, run_sweep, sweep_csv)
from .numerics import herm_eig_n
from .signalpath import SufficientStats

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DEGENERATE = 3
DEGENERATE_FRACTION = 0.5


@click.group()
def main() -> None:
    """Antenna impedance estimation toolkit."""


def _load_cfg(config, seed, trials, output) -> ExperimentConfig:
    cfg = load_config(config) if config else ExperimentConfig()
    if seed is not None:
        cfg.seed = seed
    if trials is not None:
        cfg.trials = trials
    if output is not None:
        cfg.output_path = output
    return cfg.validate()


@main.command()
@click.option("--stats", "stats_path", required=True, type=click.Path(exists=True),
              help="NPZ file with arrays Y1, Y2 and scalar sigma2.")
@click.option("--method", default="mm",
              type=click.Choice(["ml1", "ml", "ml_ff", "mm"]))
@click.option("--z1", default=None, help="Known load Z1 (complex, ohms).")
@click.option("--z2", default=None, help="Known load Z2 (complex, ohms).")
@click.option("--f-d-ts", default=None, type=float,
              help="Normalized Doppler f_d*T_s for the ml method's Clarke C_H.")
def estimate(stats_path, method, z1, z2, f_d_ts) -> None:
    """One-shot estimate from a saved sufficient-statistics file."""
    try:
        data = np.load(stats_path)
        for key in ("Y1", "Y2", "sigma2"):
            if key not in data:
                raise ConfigError(f"stats: missing array {key!r} in {stats_path}")
        Y1 = np.atleast_2d(np.asarray(data["Y1"], dtype=complex))
        Y2 = np.atleast_2d(np.asarray(data["Y2"], dtype=complex))
        stats = SufficientStats(Y1=Y1, Y2=Y2, sigma2=float(data["sigma2"]))
        L, N = Y1.shape
        if method == "ml1":
            rep = est.ml_single_packet(Y1[0], Y2[0], stats.sigma2)
        elif method == "ml":
            if f_d_ts is None:
                raise ConfigError("f_d_ts: required for the ml method")
            C = clarke_correlation(L, f_d_ts, 1.0)
            spec = ChannelSpec(N=N, L=L, sigma_h2=1.0, C_H=C)
            rep = est.ml_multi_packet(stats, spec)
        elif method == "ml_ff":
            rep = est.ml_fast_fading(stats)
        else:
            rep = est.mm_estimator(stats)
        out = {
            "method": rep.method,
            "degenerate": rep.degenerate,
            "F_hat": [rep.F_hat.real, rep.F_hat.imag] if rep.F_hat is not None else None,
            "sigma_h2_hat": rep.sigma_h2_hat,
        }
        if z1 is not None and z2 is not None and rep.F_hat is not None:
            Z_A_hat = recover_ZA(rep.F_hat, complex(z1), complex(z2))
            out["Z_A_hat"] = [Z_A_hat.real, Z_A_hat.imag]
        click.echo(json.dumps(out))
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    except ImpedanceLabError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    sys.exit(EXIT_DEGENERATE if rep.degenerate else EXIT_OK)


@main.command()
@click.option("--config", default=None, type=click.Path())
@click.option("--seed", default=None, type=int)
@click.option("--trials", default=None, type=int)
@click.option("--output", default=None, type=click.Path())
@click.option("--format", "fmt", default="csv", type=click.Choice(["csv"]))
def sweep(config, seed, trials, output, fmt) -> None:
    """Run an RMSE-vs-SNR Monte Carlo sweep and write a CSV."""
    try:
        cfg = _load_cfg(config, seed, trials, output)
        rows = run_sweep(cfg)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    text = sweep_csv(rows)
    with open(cfg.output_path, "w") as fh:
        fh.write(text)
    total = sum(r.trials for r in rows)
    bad = sum(r.trials_degenerate for r in rows)
    click.echo(f"wrote {cfg.output_path}: {len(rows)} cells, "
               f"{bad}/{total} degenerate trials")
    sys.exit(EXIT_DEGENERATE if bad > DEGENERATE_FRACTION * total else EXIT_OK)


@main.command()
@click.option("--config", default=None, type=click.Path())
@click.option("--seed", default=None, type=int)
@click.option("--trials", default=None, type=int)
@click.option("--output", default=None, type=click.Path())
@click.option("--format", "fmt", default="csv", type=click.Choice(["csv"]))
def capacity(config, seed, trials, output, fmt) -> None:
    """Run the adaptive-matching capacity scenario and write a CSV."""
    try:
        cfg = _load_cfg(config, seed, trials, output)
        points = run_capacity(cfg)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    text = capacity_csv(cfg, points)
    with open(cfg.output_path, "w") as fh:
        fh.write(text)
    total = sum(p.trials_ok + p.trials_degenerate for p in points)
    bad = sum(p.trials_degenerate for p in points)
    click.echo(f"wrote {cfg.output_path}: {len(points)} points, "
               f"{bad}/{total} degenerate trials")
    sys.exit(EXIT_DEGENERATE if bad > DEGENERATE_FRACTION * total else EXIT_OK)


@main.command()
def validate() -> None:
    """Check built-in golden constants and report pass/fail per item."""
    checks = []

    F = compute_F(73 + 42.5j, 50 + 0j, 60 + 20j)
    checks.append(("F(dipole, 50, 60+j20) = 0.9646 - j0.1032",
                   abs(F.real - 0.9646) < 5e-4 and abs(F.imag + 0.1032) < 5e-4,
                   f"{F.real:.5f}{F.imag:+.5f}j"))

    f_d = doppler_hz(50.0, 2.1e9)
    checks.append(("Doppler(50 km/h, 2.1 GHz) = 97.2 Hz",
                   abs(f_d - 97.2) < 0.15, f"{f_d:.2f} Hz"))

    C = clarke_correlation(5, 97.2, 1e-3)
    row = C[0].real
    ref = np.array([1.0, 0.9089, 0.6602, 0.3210, -0.0199])
    checks.append(("Clarke row (L=5) matches reference",
                   bool(np.all(np.abs(row - ref) < 5e-4)),
                   np.array2string(row, precision=4)))

    lam, _ = herm_eig_n(C)
    ref_top = np.array([3.5757, 1.3589, 0.0646])
    ok = bool(np.all(np.abs(lam[:3] / ref_top - 1.0) < 1e-3))
    checks.append(("top-3 eigenvalues of C_H match reference", ok,
                   np.array2string(lam[:3], precision=4)))

    C_slow = clarke_correlation(5, doppler_hz(5.0, 2.1e9), 1e-3)
    lam_s, _ = herm_eig_n(C_slow)
    checks.append(("slow-fading top eigenvalue = 4.981",
                   abs(lam_s[0] / 4.981 - 1.0) < 1e-3, f"{lam_s[0]:.4f}"))

    failed = 0
    for name, ok, detail in checks:
        status = "PASS" if ok else "FAIL"
        if not ok:
            failed += 1
        click.echo(f"[{status}] {name}  ({detail})")
    sys.exit(EXIT_OK if failed == 0 else 1)


if __name__ == "__main__":
    main()
