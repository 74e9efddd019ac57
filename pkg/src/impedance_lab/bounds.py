"""Fisher information, Cramér-Rao bounds (classical and Bayesian),
effective-SNR ergodic-capacity lower bounds, and adaptive-matching capacity
evaluation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, SingularFIM
from .fading import ChannelSpec
from .frontend import (compute_F, conjugate_match, mismatch_loss, recover_ZA,
                       sigma_h2_from_gain)
from .numerics import expint_en_scaled
from .signalpath import TrainingSpec, sufficient_stats, synthesize
from . import estimators as est


@dataclass(frozen=True)
class BoundReport:
    """MSE lower bounds for the F / sigma_h^2 estimates."""

    crb_F: float
    crb_sigma_h2: float
    fim: np.ndarray


@dataclass(frozen=True)
class CapacityPoint:
    """Capacity evaluation at one SNR grid point (bits/s/Hz)."""

    gamma: float
    C_mismatched: float
    C_adapted: float
    C_upper: float
    trials_ok: int
    trials_degenerate: int


def fim_multi(F: complex, sigma_h2: float, sigma2: float, N: int,
              lambdas: np.ndarray) -> np.ndarray:
    """Fisher information matrix for theta = [F, sigma_h^2] from L correlated
    packets with correlation eigenvalues lambdas."""
    if sigma_h2 <= 0 or sigma2 <= 0:
        raise DomainError("fim_multi requires sigma_h2 > 0 and sigma2 > 0")
    lam = np.asarray(lambdas, dtype=float)
    aF2 = abs(F) ** 2
    coef = N * (1.0 + aF2) * (lam ** 2 / (lam * sigma_h2 * (1.0 + aF2) + sigma2) ** 2)
    block = np.array([
        [sigma_h2 ** 2, F * sigma_h2],
        [np.conj(F) * sigma_h2, 1.0 + aF2],
    ], dtype=complex)
    # only the (1,1) entry carries the per-mode lambda*sigma_h2/sigma2 factor
    fim = np.zeros((2, 2), dtype=complex)
    for lk, ck in zip(lam, coef):
        b = block.copy()
        b[0, 0] *= lk * sigma_h2 / sigma2 + 1.0
        fim += ck * b
    return fim


def crb(F: complex, sigma_h2: float, sigma2: float, N: int,
        lambdas: np.ndarray) -> BoundReport:
    """MSE lower bounds for unbiased estimators of F and sigma_h^2: the
    diagonal of the inverse Fisher information matrix."""
    fim = fim_multi(F, sigma_h2, sigma2, N, lambdas)
    det = fim[0, 0] * fim[1, 1] - fim[0, 1] * fim[1, 0]
    if abs(det) < 1e-300 or not np.isfinite(abs(det)):
        raise SingularFIM(f"FIM determinant {det} is not invertible")
    inv = np.array([[fim[1, 1], -fim[0, 1]], [-fim[1, 0], fim[0, 0]]]) / det
    return BoundReport(crb_F=float(inv[0, 0].real),
                       crb_sigma_h2=float(inv[1, 1].real), fim=fim)


def bayesian_crb_H(F: complex, sigma_h2: float, sigma2: float,
                   spec: ChannelSpec) -> float:
    """Per-entry Bayesian CRB for MMSE channel estimation with known F:
    (1/L) Tr[(sigma_h^2 (1+|F|^2)/sigma^2 C_H + I)^-1 sigma_h^2 C_H].

    Carries an explicit sigma_h^2 on the trailing C_H so the bound has
    variance units for any normalization.
    """
    if sigma_h2 < 0 or sigma2 < 0:
        raise DomainError("variances must be >= 0")
    L = spec.L
    lam = spec.lambdas
    if sigma2 == 0.0:
        return 0.0
    aF2 = abs(F) ** 2
    return float(np.sum(sigma_h2 * lam / (sigma_h2 * (1.0 + aF2) * lam / sigma2 + 1.0)) / L)


def gamma_eff(gamma: float, N: int, T: int) -> float:
    """Effective SNR after pilot-based MMSE channel estimation:
    gamma / (1 + (1 + 1/gamma) * N/T)."""
    if gamma <= 0:
        raise DomainError(f"gamma must be > 0, got {gamma}")
    return gamma / (1.0 + (1.0 + 1.0 / gamma) * N / T)


def j1_mmse(sigma_h2: float, sigma_n2: float, P: float, T: int, N: int) -> float:
    """Scalar per-coefficient MMSE after training:
    J1 = sigma_h^2 sigma_n^2 / (sigma_n^2 + T P sigma_h^2 / N)."""
    return sigma_h2 * sigma_n2 / (sigma_n2 + T * P * sigma_h2 / N)


def capacity_lb(gamma_eff_val: float, N: int) -> float:
    """Ergodic-capacity lower bound log2(e) e^a sum_{k=1..N} E_k(a),
    a = N/gamma_eff, evaluated with the overflow-safe scaled recursion."""
    if gamma_eff_val <= 0:
        raise DomainError(f"gamma_eff must be > 0, got {gamma_eff_val}")
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    a = N / gamma_eff_val
    e = expint_en_scaled(1, a)
    total = e
    for k in range(2, N + 1):
        e = (1.0 - a * e) / (k - 1)
        total += e
    return float(np.log2(np.e) * total)


def capacity_tau_form(gamma_eff_val: float) -> float:
    """Alternative N=4 expression using tau(x) = 2 - x(2 + x^2 - x).

    Kept verbatim for cross-checking. Expanding the E_n recursion by hand
    gives e^a*sum E_k = (1 - a + a^2/2 - a^3/6) e^a E_1(a) + 11/6 - 2a/3
    + a^2/6, which differs from this expression, and only the recursion
    form agrees with direct Monte Carlo evaluation of the underlying
    expectation. capacity_lb is therefore the authoritative evaluator; this
    function exists so the disagreement stays measurable."""
    x = 4.0 / gamma_eff_val
    tau = 2.0 - x * (2.0 + x ** 2 - x)
    e1s = expint_en_scaled(1, x)
    return float(np.log2(np.e) / 2.0 * ((x - 1.0) ** 2 + 8.0 / 3.0 + tau * e1s))


def capacity_scenario(Z_A: complex, Z_L_initial: complex,
                      snr_grid_db, spec: ChannelSpec, train: TrainingSpec,
                      Z2: complex | None = None, estimator: str = "mm",
                      sigma_g2: float = 1.0, trials: int = 2000,
                      seed: int = 0) -> list[CapacityPoint]:
    """Adaptive-matching capacity evaluation.

    For each grid SNR gamma (referenced to a conjugate-matched receiver):
    C_mismatched / C_upper evaluate the capacity lower bound at gamma*M and
    gamma, M the initial mismatch power factor. C_adapted runs `trials`
    training rounds at the mismatched load, recovers Z_A from the estimated
    F, conjugate-matches, and averages the bound at gamma*M_hat.
    """
    if Z2 is None:
        # The error amplification from F_hat to Z_A_hat is
        # sqrt(R1/R2) |Z2+Z_A|^2 / |Z2-Z1|; a large resistive second load
        # with the reactance of the initial one keeps it small.
        Z2 = complex(6.0 * Z_A.real, Z_L_initial.imag)
    N, T, L = train.N, train.T, spec.L
    M0 = mismatch_loss(Z_A, Z_L_initial)
    sigma_h2_matched = sigma_g2 / (4.0 * Z_A.real)
    sigma_h2_train = sigma_h2_from_gain(sigma_g2, Z_A, Z_L_initial)
    F_true = compute_F(Z_A, Z_L_initial, Z2)
    train_spec = ChannelSpec(N=N, L=L, sigma_h2=sigma_h2_train, C_H=spec.C_H)

    points = []
    for gi, snr_db in enumerate(snr_grid_db):
        gamma = 10.0 ** (snr_db / 10.0)
        sigma_n2 = train.P * sigma_h2_matched / gamma
        C_up = capacity_lb(gamma_eff(gamma, N, T), N)
        C_mis = capacity_lb(gamma_eff(gamma * M0, N, T), N)
        total = 0.0
        ok = 0
        degenerate = 0
        for trial in range(trials):
            rng = np.random.default_rng(
                np.random.SeedSequence(seed, spawn_key=(gi, trial)))
            obs = synthesize(train_spec, train, F_true, sigma_n2, rng)
            stats = sufficient_stats(obs, train, sigma_n2)
            if estimator == "mm":
                rep = est.mm_estimator(stats)
            elif estimator == "ml":
                rep = est.ml_multi_packet(stats, train_spec)
            else:
                rep = est.ml_fast_fading(stats)
            if rep.degenerate or rep.F_hat is None:
                degenerate += 1
                continue
            try:
                Z_A_hat = recover_ZA(rep.F_hat, Z_L_initial, Z2)
                Z_L_hat = conjugate_match(Z_A_hat)
            except Exception:
                degenerate += 1
                continue
            M_hat = mismatch_loss(Z_A, Z_L_hat)
            total += capacity_lb(gamma_eff(gamma * M_hat, N, T), N)
            ok += 1
        C_ad = total / ok if ok else float("nan")
        points.append(CapacityPoint(gamma=gamma, C_mismatched=C_mis,
                                    C_adapted=C_ad, C_upper=C_up,
                                    trials_ok=ok, trials_degenerate=degenerate))
    return points
