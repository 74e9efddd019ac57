"""Antenna/load impedance algebra: the F <-> Z_A bijection, conjugate
matching, SNR/noise bookkeeping and mismatch power loss."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .exceptions import NonPassive, SingularCircuit, SingularInversion

_SINGULAR_TOL = 1e-12


def _require_passive(name: str, Z: complex) -> complex:
    Z = complex(Z)
    if Z.real <= 0:
        raise NonPassive(f"{name} must have positive real part, got {Z}")
    return Z


def compute_F(Z_A: complex, Z1: complex, Z2: complex) -> complex:
    """Bilinear parameter F = sqrt(R2)*(Z1+Z_A) / (sqrt(R1)*(Z2+Z_A)) induced
    by switching the receiver load from Z1 to Z2."""
    Z_A = _require_passive("Z_A", Z_A)
    Z1 = _require_passive("Z1", Z1)
    Z2 = _require_passive("Z2", Z2)
    if abs(Z2 + Z_A) < _SINGULAR_TOL:
        raise SingularCircuit(f"|Z2 + Z_A| = {abs(Z2 + Z_A):.3e} is numerically zero")
    return np.sqrt(Z2.real) * (Z1 + Z_A) / (np.sqrt(Z1.real) * (Z2 + Z_A))


def recover_ZA(F: complex, Z1: complex, Z2: complex) -> complex:
    """Invert the bilinear map: Z_A = (Z2*sqrt(R1/R2)*F - Z1) / (1 - sqrt(R1/R2)*F)."""
    Z1 = _require_passive("Z1", Z1)
    Z2 = _require_passive("Z2", Z2)
    r = np.sqrt(Z1.real / Z2.real)
    denom = 1.0 - r * F
    if abs(denom) < _SINGULAR_TOL:
        raise SingularInversion(f"|1 - sqrt(R1/R2)*F| = {abs(denom):.3e} is numerically zero")
    return (Z2 * r * F - Z1) / denom


def conjugate_match(Z_A: complex) -> complex:
    """Load impedance maximizing power transfer: the complex conjugate of Z_A."""
    Z_A = _require_passive("Z_A", Z_A)
    return Z_A.conjugate()


def mismatch_loss(Z_A: complex, Z_L: complex) -> float:
    """Power delivered to Z_L relative to a conjugate match:
    M = 4*R_A*R_L / |Z_A + Z_L|^2, in (0, 1]."""
    Z_A = _require_passive("Z_A", Z_A)
    Z_L = _require_passive("Z_L", Z_L)
    return 4.0 * Z_A.real * Z_L.real / abs(Z_A + Z_L) ** 2


def find_mismatched_load(Z_A: complex, loss_db: float) -> complex:
    """Find a load whose mismatch power loss equals loss_db (> 0) dB.

    Searches along the reactance-matched line X_L = -X_A, reducing R_L below
    R_A until M = 10^(-loss_db/10).
    """
    Z_A = _require_passive("Z_A", Z_A)
    if loss_db <= 0:
        return conjugate_match(Z_A)
    target = 10.0 ** (-loss_db / 10.0)
    R_A = Z_A.real
    X_L = -Z_A.imag

    def gap(R_L: float) -> float:
        return mismatch_loss(Z_A, complex(R_L, X_L)) - target

    # M is monotone in R_L on (0, R_A], M(R_A) = 1, M(0+) = 0
    lo = R_A * 1e-12
    R_L = brentq(gap, lo, R_A, xtol=1e-15, rtol=1e-14)
    return complex(R_L, X_L)


def sigma_h2_from_gain(sigma_g2: float, Z_A: complex, Z1: complex) -> float:
    """Variance of the detection-referred channel coefficient:
    sigma_h^2 = R_1 * sigma_g^2 / |Z_A + Z1|^2."""
    Z_A = _require_passive("Z_A", Z_A)
    Z1 = _require_passive("Z1", Z1)
    if sigma_g2 < 0:
        raise ValueError(f"sigma_g2 must be >= 0, got {sigma_g2}")
    return Z1.real * sigma_g2 / abs(Z_A + Z1) ** 2


def effective_sigma2(sigma_n2: float, N: int, P: float, T: int) -> float:
    """Per-entry noise variance of the sufficient statistics:
    sigma^2 = 2*N*sigma_n^2 / (P*T)."""
    if sigma_n2 < 0 or N <= 0 or P <= 0 or T <= 0:
        raise ValueError("effective_sigma2 requires sigma_n2 >= 0 and N, P, T > 0")
    return 2.0 * N * sigma_n2 / (P * T)


@dataclass(frozen=True)
class ImpedanceSet:
    """Antenna impedance plus the two switched load impedances."""

    Z_A: complex
    Z1: complex
    Z2: complex

    def __post_init__(self):
        _require_passive("Z_A", self.Z_A)
        _require_passive("Z1", self.Z1)
        _require_passive("Z2", self.Z2)
        if self.Z1 == self.Z2:
            raise ValueError("Z1 == Z2 makes Z_A unidentifiable (F is constant)")

    @property
    def R_A(self) -> float:
        return complex(self.Z_A).real

    @property
    def R_1(self) -> float:
        return complex(self.Z1).real

    @property
    def R_2(self) -> float:
        return complex(self.Z2).real

    @property
    def F(self) -> complex:
        return compute_F(self.Z_A, self.Z1, self.Z2)


@dataclass(frozen=True)
class LinkBudget:
    """Power/noise bookkeeping for one operating point.

    gamma is the post-detection SNR P*sigma_h2/sigma_n2; sigma2 the effective
    per-entry noise variance of the sufficient statistics.
    """

    sigma_h2: float
    sigma_n2: float
    P: float
    gamma: float
    sigma2: float
    sigma_g2: float = field(default=float("nan"))

    def __post_init__(self):
        for name in ("sigma_h2", "sigma_n2", "P", "gamma", "sigma2"):
            v = getattr(self, name)
            if v < 0:
                raise ValueError(f"{name} must be >= 0, got {v}")

    @classmethod
    def from_snr(cls, gamma_db: float, sigma_h2: float, P: float, N: int, T: int,
                 sigma_g2: float = float("nan")) -> "LinkBudget":
        """Fix (P, sigma_h2) and derive sigma_n2 from the target SNR in dB."""
        gamma = 10.0 ** (gamma_db / 10.0)
        sigma_n2 = P * sigma_h2 / gamma
        return cls(sigma_h2=sigma_h2, sigma_n2=sigma_n2, P=P, gamma=gamma,
                   sigma2=effective_sigma2(sigma_n2, N, P, T), sigma_g2=sigma_g2)
