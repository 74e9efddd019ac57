"""Estimators for the bilinear load-switching parameter F, the channel power
sigma_h^2 and the channel matrix H.

Functional core plus thin scikit-learn style wrappers (fit / get_params) so
the estimators compose with the wider ecosystem.

Convention trap: the single-packet sample covariance places y2^H y1 / N at
position (1,2), while the multi-packet trace matrix places Tr[Y1 Y2^H] / N
there. For row-vector statistics the two agree entrywise; both are computed
with numpy's vdot (which conjugates its first argument).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .exceptions import ShapeMismatch, SingularSystem
from .fading import ChannelSpec
from .frontend import recover_ZA
from .numerics import herm_eig2, maximize_scalar
from .signalpath import SufficientStats

DEGENERACY_RTOL = 1e-14


@dataclass(frozen=True)
class EstimateReport:
    """Point estimates from one of the F estimators.

    F_hat / sigma_h2_hat are None when the estimate is degenerate (the
    cross-statistic vanished) or, for sigma_h2_hat, when the method does not
    produce one (method of moments).
    """

    method: str
    F_hat: complex | None
    sigma_h2_hat: float | None
    mu_hat: float | None = None
    Z_A_hat: complex | None = None
    degenerate: bool = False

    def with_impedances(self, Z1: complex, Z2: complex) -> "EstimateReport":
        """Attach the recovered antenna impedance via the bilinear inverse."""
        if self.degenerate or self.F_hat is None:
            return self
        return EstimateReport(
            method=self.method, F_hat=self.F_hat, sigma_h2_hat=self.sigma_h2_hat,
            mu_hat=self.mu_hat, Z_A_hat=recover_ZA(self.F_hat, Z1, Z2),
            degenerate=False)


def _closed_form(s11: float, s22: float, s12: complex, sigma2: float,
                 method: str, estimate_power: bool = True,
                 packets: int = 1) -> EstimateReport:
    """Principal-component closed form shared by the single-packet and
    fast-fading estimators.

    F_hat is scale-invariant and computed from the raw entries; the power
    estimate divides the top eigenvalue by `packets`, since each packet row
    contributes one independent realization of the same 2x2 covariance and
    mu = sigma_h^2 (1 + |F|^2) is a per-packet quantity.
    """
    if abs(s12) < DEGENERACY_RTOL * (s11 + s22):
        return EstimateReport(method=method, F_hat=None, sigma_h2_hat=None,
                              degenerate=True)
    disc = np.sqrt((s22 - s11) ** 2 + 4.0 * abs(s12) ** 2)
    F_hat = (s22 - s11 + disc) / (2.0 * s12)
    if not estimate_power:
        return EstimateReport(method=method, F_hat=F_hat, sigma_h2_hat=None)
    eta1 = (s11 + s12 * F_hat).real / packets  # imaginary part is rounding noise
    mu_hat = max(eta1 - sigma2, 0.0)
    # sigma_h^2 = mu / (1 + |F|^2) = |E1|^2 * mu, from the covariance
    # eigensystem; the printed closed form with |F|^2/(1+|F|^2) does not
    # solve mu = sigma_h^2 (1+|F|^2) and loses to this one in likelihood.
    sigma_h2_hat = mu_hat / (abs(F_hat) ** 2 + 1.0)
    return EstimateReport(method=method, F_hat=F_hat, sigma_h2_hat=sigma_h2_hat,
                          mu_hat=mu_hat)


def ml_single_packet(y1: np.ndarray, y2: np.ndarray, sigma2: float) -> EstimateReport:
    """Single-packet ML estimate of (F, sigma_h^2) from the principal
    component of the 2x2 sample covariance of (y1, y2)."""
    y1 = np.asarray(y1, dtype=complex).ravel()
    y2 = np.asarray(y2, dtype=complex).ravel()
    if y1.shape != y2.shape:
        raise ShapeMismatch(f"y1 and y2 lengths differ: {y1.shape} vs {y2.shape}")
    if sigma2 < 0:
        raise ValueError(f"sigma2 must be >= 0, got {sigma2}")
    N = y1.size
    s11 = float(np.vdot(y1, y1).real) / N
    s22 = float(np.vdot(y2, y2).real) / N
    s12 = complex(np.vdot(y2, y1)) / N  # y2^H y1 at position (1,2)
    return _closed_form(s11, s22, s12, sigma2, method="ML1")


def build_T(stats: SufficientStats) -> np.ndarray:
    """Trace statistics T_ij = Tr[Y_i Y_j^H] / N as a 2x2 Hermitian matrix."""
    Y1, Y2 = stats.Y1, stats.Y2
    if Y1.shape != Y2.shape:
        raise ShapeMismatch(f"Y1 and Y2 shapes differ: {Y1.shape} vs {Y2.shape}")
    N = Y1.shape[1]
    t11 = float(np.vdot(Y1, Y1).real) / N
    t22 = float(np.vdot(Y2, Y2).real) / N
    t12 = complex(np.vdot(Y2, Y1)) / N  # Tr[Y1 Y2^H]
    return np.array([[t11, t12], [np.conj(t12), t22]])


def ml_fast_fading(stats: SufficientStats) -> EstimateReport:
    """Closed-form ML estimate valid for temporally uncorrelated fading
    (C_H = I); applies the principal-component formulas to the trace matrix."""
    T = build_T(stats)
    return _closed_form(T[0, 0].real, T[1, 1].real, T[0, 1], stats.sigma2,
                        method="ML_FF", packets=stats.Y1.shape[0])


def mm_estimator(stats: SufficientStats) -> EstimateReport:
    """Method-of-moments estimate of F: the fast-fading closed form applied
    to the trace matrix, valid under any temporal correlation. Produces no
    sigma_h^2 estimate."""
    T = build_T(stats)
    rep = _closed_form(T[0, 0].real, T[1, 1].real, T[0, 1], stats.sigma2,
                       method="MM", estimate_power=False)
    return rep


def _mode_stats(stats: SufficientStats, spec: ChannelSpec):
    """Per-eigenmode 2x2 sample covariances S_k from the rows of V Y_i."""
    W1 = spec.V @ stats.Y1
    W2 = spec.V @ stats.Y2
    N = stats.Y1.shape[1]
    a = np.einsum("kn,kn->k", W1, W1.conj()).real / N
    d = np.einsum("kn,kn->k", W2, W2.conj()).real / N
    c = np.einsum("kn,kn->k", W1, W2.conj()) / N  # w_k1 w_k2^H at (1,2)
    return a, d, c


def ml_multi_packet(stats: SufficientStats, spec: ChannelSpec,
                    mu_tol_rel: float = 1e-9) -> EstimateReport:
    """Multi-packet ML estimate under known temporal correlation C_H.

    Profiles the likelihood down to a scalar search over
    mu = sigma_h^2 (1 + |F|^2): maximize eta(mu) - sigma^2 * sum_k
    ln(mu*lambda_k + sigma^2), where eta(mu) is the top eigenvalue of the
    mode-weighted sample covariance S(mu). A coarse grid plus golden-section
    refinement is used since unimodality is not guaranteed.
    """
    if stats.Y1.shape != stats.Y2.shape:
        raise ShapeMismatch(f"Y1 and Y2 shapes differ: {stats.Y1.shape} vs {stats.Y2.shape}")
    if stats.Y1.shape[0] != spec.L:
        raise ShapeMismatch(f"stats have {stats.Y1.shape[0]} packets, spec.L = {spec.L}")
    sigma2 = stats.sigma2
    a, d, c = _mode_stats(stats, spec)
    lam = spec.lambdas

    if sigma2 == 0.0:
        # noiseless limit: S(mu) is the trace matrix for any mu > 0
        s11, s22, s12 = a.sum(), d.sum(), c.sum()
        return _closed_form(s11, s22, s12, 0.0, method="ML_MP", packets=spec.L)

    def S_entries(mu: float):
        w = mu * lam / (mu * lam + sigma2)
        return float(w @ a), float(w @ d), complex(w @ c)

    def objective(mu: float) -> float:
        s11, s22, s12 = S_entries(mu)
        eta = 0.5 * (s11 + s22 + np.sqrt((s11 - s22) ** 2 + 4.0 * abs(s12) ** 2))
        return eta - sigma2 * float(np.log(mu * lam + sigma2).sum())

    trace = a.sum() + d.sum()
    mu_max = 10.0 * max(trace, sigma2)
    mu_hat, _ = maximize_scalar(objective, 0.0, mu_max, tol=mu_tol_rel * mu_max)

    if mu_hat <= 0.0:
        # sigma_h^2 = 0 branch: eigenvector taken in the mu -> 0+ limit
        s11 = float(lam @ a)
        s22 = float(lam @ d)
        s12 = complex(lam @ c)
        rep = _closed_form(s11, s22, s12, 0.0, method="ML_MP")
        return EstimateReport(method="ML_MP", F_hat=rep.F_hat, sigma_h2_hat=0.0,
                              mu_hat=0.0, degenerate=rep.degenerate)

    s11, s22, s12 = S_entries(mu_hat)
    if abs(s12) < DEGENERACY_RTOL * (s11 + s22):
        return EstimateReport(method="ML_MP", F_hat=None, sigma_h2_hat=None,
                              degenerate=True)
    eig = herm_eig2(np.array([[s11, s12], [np.conj(s12), s22]]))
    E1, E2 = eig.e1
    F_hat = E2 / E1
    return EstimateReport(method="ML_MP", F_hat=complex(F_hat),
                          sigma_h2_hat=float(abs(E1) ** 2 * mu_hat),
                          mu_hat=float(mu_hat))


def mp_log_likelihood(stats: SufficientStats, spec: ChannelSpec, F: complex,
                      sigma_h2: float) -> float:
    """Multi-packet log-likelihood of (F, sigma_h^2) up to a constant, for
    dominance checks and oracle tests."""
    sigma2 = stats.sigma2
    a, d, c = _mode_stats(stats, spec)
    lam = spec.lambdas
    N = stats.Y1.shape[1]
    mu = sigma_h2 * (1.0 + abs(F) ** 2)
    e1 = np.array([1.0, F]) / np.sqrt(1.0 + abs(F) ** 2)
    quad = (abs(e1[0]) ** 2 * a + abs(e1[1]) ** 2 * d
            + 2.0 * (np.conj(e1[0]) * e1[1] * c).real)
    w = mu * lam / (mu * lam + sigma2)
    return float(N / sigma2 * ((w * quad).sum()
                               - sigma2 * np.log(mu * lam + sigma2).sum()))


def mmse_channel(stats: SufficientStats, F: complex, sigma_h2: float,
                 spec: ChannelSpec) -> np.ndarray:
    """MMSE estimate of H given F:
    H_hat = [(1+|F|^2) C_H + (sigma^2/sigma_h^2) I]^-1 C_H (Y1 + F* Y2).

    The regularizer carries the noise-to-signal ratio sigma^2/sigma_h^2 (the
    orientation that actually minimizes MSE for the jointly Gaussian model).
    """
    if sigma_h2 <= 0:
        raise ValueError(f"sigma_h2 must be > 0, got {sigma_h2}")
    A = (1.0 + abs(F) ** 2) * spec.C_H + (stats.sigma2 / sigma_h2) * np.eye(spec.L)
    if np.linalg.cond(A) > 1e12:
        raise SingularSystem("regularized MMSE system is ill-conditioned")
    return np.linalg.solve(A, spec.C_H @ (stats.Y1 + np.conj(F) * stats.Y2))


# --------------------------------------------------------------------------
# scikit-learn style wrappers


def _check_pair(Y1, Y2) -> tuple[np.ndarray, np.ndarray]:
    Y1 = np.atleast_2d(np.asarray(Y1, dtype=complex))
    Y2 = np.atleast_2d(np.asarray(Y2, dtype=complex))
    if Y1.shape != Y2.shape:
        raise ShapeMismatch(f"Y1 and Y2 shapes differ: {Y1.shape} vs {Y2.shape}")
    return Y1, Y2


class _FEstimatorBase(BaseEstimator):
    """fit(Y1, Y2) ingests the two sufficient-statistic blocks (packets x
    antennas) and exposes F_, sigma_h2_, mu_, degenerate_ and report_."""

    def __init__(self, sigma2: float = 0.0):
        self.sigma2 = sigma2

    def _estimate(self, stats: SufficientStats) -> EstimateReport:
        raise NotImplementedError

    def fit(self, Y1, Y2):
        Y1, Y2 = _check_pair(Y1, Y2)
        stats = SufficientStats(Y1=Y1, Y2=Y2, sigma2=self.sigma2)
        report = self._estimate(stats)
        self.report_ = report
        self.F_ = report.F_hat
        self.sigma_h2_ = report.sigma_h2_hat
        self.mu_ = report.mu_hat
        self.degenerate_ = report.degenerate
        return self

    def predict_impedance(self, Z1: complex, Z2: complex) -> complex:
        """Recover the antenna impedance from the fitted F."""
        if getattr(self, "F_", None) is None:
            raise ValueError("estimator is not fitted or the fit was degenerate")
        return recover_ZA(self.F_, Z1, Z2)


class SinglePacketML(_FEstimatorBase):
    """Closed-form single-packet ML estimator (first packet row is used)."""

    def _estimate(self, stats: SufficientStats) -> EstimateReport:
        return ml_single_packet(stats.Y1[0], stats.Y2[0], stats.sigma2)


class FastFadingML(_FEstimatorBase):
    """Closed-form multi-packet ML estimator for uncorrelated fading."""

    def _estimate(self, stats: SufficientStats) -> EstimateReport:
        return ml_fast_fading(stats)


class MethodOfMoments(_FEstimatorBase):
    """Correlation-agnostic method-of-moments estimator of F."""

    def _estimate(self, stats: SufficientStats) -> EstimateReport:
        return mm_estimator(stats)


class MultiPacketML(_FEstimatorBase):
    """Scalar-optimization ML estimator under known temporal correlation."""

    def __init__(self, sigma2: float = 0.0, C_H: np.ndarray | None = None):
        super().__init__(sigma2=sigma2)
        self.C_H = C_H

    def fit(self, Y1, Y2):
        Y1, Y2 = _check_pair(Y1, Y2)
        L, N = Y1.shape
        C_H = np.eye(L, dtype=complex) if self.C_H is None else np.asarray(self.C_H)
        self._spec = ChannelSpec(N=N, L=L, sigma_h2=1.0, C_H=C_H)
        return super().fit(Y1, Y2)

    def _estimate(self, stats: SufficientStats) -> EstimateReport:
        return ml_multi_packet(stats, self._spec)


class MMSEChannel(BaseEstimator):
    """MMSE channel estimator: fit(Y1, Y2) stores the filtered H_ given
    (F, sigma_h2, C_H, sigma2)."""

    def __init__(self, F: complex = 1.0 + 0j, sigma_h2: float = 1.0,
                 sigma2: float = 0.0, C_H: np.ndarray | None = None):
        self.F = F
        self.sigma_h2 = sigma_h2
        self.sigma2 = sigma2
        self.C_H = C_H

    def fit(self, Y1, Y2):
        Y1, Y2 = _check_pair(Y1, Y2)
        L, N = Y1.shape
        C_H = np.eye(L, dtype=complex) if self.C_H is None else np.asarray(self.C_H)
        spec = ChannelSpec(N=N, L=L, sigma_h2=self.sigma_h2, C_H=C_H)
        stats = SufficientStats(Y1=Y1, Y2=Y2, sigma2=self.sigma2)
        self.H_ = mmse_channel(stats, self.F, self.sigma_h2, spec)
        return self

    def transform(self, Y1, Y2=None):
        return self.fit(Y1, Y2).H_
