"""Experiment configuration, Monte Carlo execution, aggregation and CSV
persistence.

Determinism contract: every trial draws from an RNG substream that is a pure
function of (seed, cell index, trial index); reductions run in trial order,
so a given (seed, config) always produces byte-identical CSV output,
independent of the worker count.
"""

from __future__ import annotations

import configparser
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from . import estimators as est
from .bounds import bayesian_crb_H, capacity_scenario, crb
from .exceptions import ConfigError
from .fading import ChannelSpec, clarke_correlation, doppler_hz
from .frontend import compute_F, find_mismatched_load, sigma_h2_from_gain
from .signalpath import dft_training, sufficient_stats, synthesize

CSV_SCHEMA = "schema=1"
SWEEP_COLUMNS = [
    "scenario", "estimator", "N", "L", "T", "snr_db", "trials",
    "trials_ok", "trials_degenerate", "rmse_F_rel", "rmse_sigma_h2_rel",
    "crb_F_rel", "crb_sigma_h2_rel", "rmse_H", "bcrb_H",
]
CAPACITY_COLUMNS = [
    "scenario", "estimator", "N", "L", "T", "snr_db", "loss_db",
    "trials_ok", "trials_degenerate", "C_mismatched", "C_adapted", "C_upper",
]

SCENARIOS = ("iid", "moderate", "slow", "custom")
ESTIMATOR_TAGS = ("ml1", "ml", "ml_ff", "mm")
_SCENARIO_SPEED = {"moderate": 50.0, "slow": 5.0}


@dataclass
class ExperimentConfig:
    """Full description of one sweep or capacity experiment."""

    scenario: str = "iid"
    N: int = 4
    L: int = 5
    T: int = 64
    P: float = 1.0
    f_c_hz: float = 2.1e9
    v_kmh: float = 50.0
    T_s: float = 1e-3
    Z_A: complex = 73 + 42.5j
    Z1: complex = 50 + 0j
    Z2: complex = 60 + 20j
    sigma_g2: float = 1.0
    snr_grid_db: tuple = (0.0, 10.0, 20.0)
    trials: int = 1000
    seed: int = 1
    estimators: tuple = ("mm",)
    loss_db: float | None = None
    output_path: str = "sweep.csv"

    def validate(self) -> "ExperimentConfig":
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"scenario: unknown tag {self.scenario!r}, "
                              f"expected one of {SCENARIOS}")
        if self.trials < 1:
            raise ConfigError(f"trials: must be >= 1, got {self.trials}")
        if not self.snr_grid_db:
            raise ConfigError("snr_grid_db: must be nonempty")
        for tag in self.estimators:
            if tag not in ESTIMATOR_TAGS:
                raise ConfigError(f"estimators: unknown tag {tag!r}, "
                                  f"expected one of {ESTIMATOR_TAGS}")
        for name in ("N", "L", "T"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name}: must be >= 1")
        if self.P <= 0:
            raise ConfigError(f"P: must be > 0, got {self.P}")
        return self

    def doppler(self) -> float:
        v = _SCENARIO_SPEED.get(self.scenario, self.v_kmh)
        return doppler_hz(v, self.f_c_hz)

    def channel_spec(self) -> ChannelSpec:
        sigma_h2 = sigma_h2_from_gain(self.sigma_g2, self.Z_A, self.Z1)
        if self.scenario == "iid":
            C = np.eye(self.L, dtype=complex)
        else:
            C = clarke_correlation(self.L, self.doppler(), self.T_s)
        return ChannelSpec(N=self.N, L=self.L, sigma_h2=sigma_h2, C_H=C)


def _parse_value(name: str, raw: str, kind):
    try:
        if kind is complex:
            return complex(raw.replace(" ", ""))
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        return raw
    except ValueError as exc:
        raise ConfigError(f"{name}: cannot parse {raw!r} as {kind.__name__}") from exc


def load_config(path: str) -> ExperimentConfig:
    """Parse an INI-style config file ([experiment] section, flat key/value)."""
    if not os.path.exists(path):
        raise ConfigError(f"config: file not found: {path}")
    parser = configparser.ConfigParser()
    parser.optionxform = str  # field names are case-sensitive (N, L, T, P)
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"config: parse failure: {exc}") from exc
    if "experiment" not in parser:
        raise ConfigError("config: missing [experiment] section")
    section = parser["experiment"]
    known = {f.name: f for f in fields(ExperimentConfig)}
    kwargs = {}
    for key, raw in section.items():
        if key not in known:
            raise ConfigError(f"{key}: unknown config field")
        if key == "snr_grid_db":
            kwargs[key] = tuple(_parse_value(key, v, float) for v in raw.split(","))
        elif key == "estimators":
            kwargs[key] = tuple(v.strip() for v in raw.split(","))
        elif key in ("Z_A", "Z1", "Z2"):
            kwargs[key] = _parse_value(key, raw, complex)
        elif key in ("N", "L", "T", "trials", "seed"):
            kwargs[key] = _parse_value(key, raw, int)
        elif key in ("P", "f_c_hz", "v_kmh", "T_s", "sigma_g2", "loss_db"):
            kwargs[key] = _parse_value(key, raw, float)
        else:
            kwargs[key] = raw
    return ExperimentConfig(**kwargs).validate()


@dataclass
class SweepRow:
    """Aggregated results for one (snr, estimator) cell."""

    scenario: str
    estimator: str
    N: int
    L: int
    T: int
    snr_db: float
    trials: int
    trials_ok: int
    trials_degenerate: int
    rmse_F_rel: float | None
    rmse_sigma_h2_rel: float | None
    crb_F_rel: float
    crb_sigma_h2_rel: float
    rmse_H: float | None
    bcrb_H: float


def _run_estimator(tag: str, stats, spec: ChannelSpec):
    if tag == "ml1":
        return est.ml_single_packet(stats.Y1[0], stats.Y2[0], stats.sigma2)
    if tag == "ml":
        return est.ml_multi_packet(stats, spec)
    if tag == "ml_ff":
        return est.ml_fast_fading(stats)
    return est.mm_estimator(stats)


def _run_cell(cfg: ExperimentConfig, spec: ChannelSpec, train, F_true: complex,
              cell_index: int, snr_db: float, tag: str) -> SweepRow:
    gamma = 10.0 ** (snr_db / 10.0)
    sigma_n2 = cfg.P * spec.sigma_h2 / gamma
    err_F = []
    err_s = []
    err_H = []
    degenerate = 0
    for trial in range(cfg.trials):
        rng = np.random.default_rng(
            np.random.SeedSequence(cfg.seed, spawn_key=(cell_index, trial)))
        obs = synthesize(spec, train, F_true, sigma_n2, rng)
        stats = sufficient_stats(obs, train, sigma_n2)
        rep = _run_estimator(tag, stats, spec)
        if rep.degenerate or rep.F_hat is None:
            degenerate += 1
            continue
        err_F.append(abs(rep.F_hat - F_true) ** 2)
        if rep.sigma_h2_hat is not None:
            err_s.append((rep.sigma_h2_hat - spec.sigma_h2) ** 2)
        if tag != "ml1":
            sig = rep.sigma_h2_hat if rep.sigma_h2_hat else spec.sigma_h2
            H_hat = est.mmse_channel(stats, rep.F_hat, sig, spec)
            err_H.append(float(np.mean(np.abs(H_hat - obs.truth.H) ** 2)))
    ok = cfg.trials - degenerate
    sigma2 = 2.0 * cfg.N * sigma_n2 / (cfg.P * cfg.T)
    if sigma2 > 0.0:
        # ml1 sees a single packet, so its reference bound is the L=1 CRB
        lambdas = np.ones(1) if tag == "ml1" else spec.lambdas
        bounds = crb(F_true, spec.sigma_h2, sigma2, cfg.N, lambdas)
        crb_F, crb_s = bounds.crb_F, bounds.crb_sigma_h2
        bcrb = bayesian_crb_H(F_true, spec.sigma_h2, sigma2, spec)
    else:
        crb_F = crb_s = bcrb = 0.0
    return SweepRow(
        scenario=cfg.scenario, estimator=tag, N=cfg.N, L=cfg.L, T=cfg.T,
        snr_db=snr_db, trials=cfg.trials, trials_ok=ok,
        trials_degenerate=degenerate,
        rmse_F_rel=(np.sqrt(np.mean(err_F)) / abs(F_true)) if err_F else None,
        rmse_sigma_h2_rel=(np.sqrt(np.mean(err_s)) / spec.sigma_h2) if err_s else None,
        crb_F_rel=np.sqrt(crb_F) / abs(F_true),
        crb_sigma_h2_rel=np.sqrt(crb_s) / spec.sigma_h2,
        rmse_H=np.sqrt(np.mean(err_H)) if err_H else None,
        bcrb_H=np.sqrt(bcrb),
    )


def worker_count() -> int:
    env = os.environ.get("IMPEDANCE_LAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"IMPEDANCE_LAB_THREADS: cannot parse {env!r}")
    return os.cpu_count() or 1


def run_sweep(cfg: ExperimentConfig) -> list[SweepRow]:
    """Run the RMSE-vs-SNR Monte Carlo sweep described by cfg."""
    cfg.validate()
    spec = cfg.channel_spec()
    train = dft_training(cfg.N, cfg.T, cfg.P)
    F_true = compute_F(cfg.Z_A, cfg.Z1, cfg.Z2)
    cells = [(ci, snr, tag)
             for ci, (snr, tag) in enumerate(
                 (s, t) for s in cfg.snr_grid_db for t in cfg.estimators)]
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        rows = list(pool.map(
            lambda c: _run_cell(cfg, spec, train, F_true, *c), cells))
    return rows


def run_capacity(cfg: ExperimentConfig):
    """Run the adaptive-matching capacity scenario described by cfg."""
    cfg.validate()
    if cfg.loss_db is None:
        raise ConfigError("loss_db: required for capacity scenarios")
    spec = cfg.channel_spec()
    train = dft_training(cfg.N, cfg.T, cfg.P)
    Z_L0 = find_mismatched_load(cfg.Z_A, cfg.loss_db)
    points = capacity_scenario(
        cfg.Z_A, Z_L0, cfg.snr_grid_db, spec, train,
        estimator=cfg.estimators[0] if cfg.estimators else "mm",
        sigma_g2=cfg.sigma_g2, trials=cfg.trials, seed=cfg.seed)
    return points


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def sweep_csv(rows: list[SweepRow]) -> str:
    lines = [CSV_SCHEMA, ",".join(SWEEP_COLUMNS)]
    for r in rows:
        lines.append(",".join(_fmt(getattr(r, c)) for c in SWEEP_COLUMNS))
    return "\n".join(lines) + "\n"


def capacity_csv(cfg: ExperimentConfig, points) -> str:
    lines = [CSV_SCHEMA, ",".join(CAPACITY_COLUMNS)]
    tag = cfg.estimators[0] if cfg.estimators else "mm"
    for snr_db, p in zip(cfg.snr_grid_db, points):
        row = {
            "scenario": cfg.scenario, "estimator": tag, "N": cfg.N,
            "L": cfg.L, "T": cfg.T, "snr_db": snr_db, "loss_db": cfg.loss_db,
            "trials_ok": p.trials_ok, "trials_degenerate": p.trials_degenerate,
            "C_mismatched": p.C_mismatched, "C_adapted": p.C_adapted,
            "C_upper": p.C_upper,
        }
        lines.append(",".join(_fmt(row[c]) for c in CAPACITY_COLUMNS))
    return "\n".join(lines) + "\n"
