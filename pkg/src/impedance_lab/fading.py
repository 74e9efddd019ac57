"""Temporal correlation models and correlated Rayleigh block-fading synthesis."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import toeplitz

from .numerics import bessel_j0, crandn, herm_eig_n

SPEED_OF_LIGHT = 299_792_458.0


def doppler_hz(v_kmh: float, f_c_hz: float) -> float:
    """Maximum Doppler frequency f_d = v / wavelength."""
    if v_kmh < 0:
        raise ValueError(f"speed must be >= 0, got {v_kmh}")
    if f_c_hz <= 0:
        raise ValueError(f"carrier frequency must be > 0, got {f_c_hz}")
    return (v_kmh / 3.6) * f_c_hz / SPEED_OF_LIGHT


def clarke_correlation(L: int, f_d: float, T_s: float) -> np.ndarray:
    """Clarke-model temporal correlation: [C]_{kl} = J0(2*pi*f_d*T_s*|k-l|).

    Real symmetric Toeplitz with unit diagonal.
    """
    if L < 1:
        raise ValueError(f"L must be >= 1, got {L}")
    if f_d < 0 or T_s <= 0:
        raise ValueError("need f_d >= 0 and T_s > 0")
    row = bessel_j0(2.0 * np.pi * f_d * T_s * np.arange(L))
    return toeplitz(row).astype(complex)


@dataclass
class ChannelSpec:
    """Block-fading channel: N transmit antennas, L packets, per-entry power
    sigma_h2 and temporal correlation C_H (Hermitian PSD, unit diagonal)."""

    N: int
    L: int
    sigma_h2: float
    C_H: np.ndarray
    lambdas: np.ndarray = field(init=False, repr=False)
    V: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.N < 1 or self.L < 1:
            raise ValueError("N and L must be >= 1")
        if self.sigma_h2 < 0:
            raise ValueError(f"sigma_h2 must be >= 0, got {self.sigma_h2}")
        self.C_H = np.asarray(self.C_H, dtype=complex)
        if self.C_H.shape != (self.L, self.L):
            raise ValueError(f"C_H shape {self.C_H.shape} != ({self.L}, {self.L})")
        if np.abs(np.diag(self.C_H) - 1.0).max() > 1e-12:
            raise ValueError("C_H must have unit diagonal")
        self.lambdas, self.V = herm_eig_n(self.C_H)

    @classmethod
    def clarke(cls, N: int, L: int, sigma_h2: float, f_d: float, T_s: float) -> "ChannelSpec":
        return cls(N=N, L=L, sigma_h2=sigma_h2, C_H=clarke_correlation(L, f_d, T_s))

    @classmethod
    def iid(cls, N: int, L: int, sigma_h2: float) -> "ChannelSpec":
        return cls(N=N, L=L, sigma_h2=sigma_h2, C_H=np.eye(L, dtype=complex))


@dataclass(frozen=True)
class FadingDraw:
    """One realization of the LxN path-coefficient matrix H."""

    H: np.ndarray
    seed_path: tuple | None = None


def sample_H(spec: ChannelSpec, rng: np.random.Generator,
             seed_path: tuple | None = None) -> FadingDraw:
    """Draw H with i.i.d. columns CN(0, sigma_h2 * C_H) by exact covariance
    factorization: H = sqrt(sigma_h2) * V^H diag(sqrt(lambda)) G."""
    G = crandn(rng, (spec.L, spec.N))
    root = np.sqrt(spec.sigma_h2) * (spec.V.conj().T * np.sqrt(spec.lambdas))
    return FadingDraw(H=root @ G, seed_path=seed_path)


def sos_sequence(L: int, f_d: float, T_s: float, M_sin: int = 16,
                 rng: np.random.Generator | None = None) -> np.ndarray:
    """Unit-variance correlated fading sequence by the Zheng-Xiao
    sum-of-sinusoids construction (random arrival angles and phases).

    The ensemble autocorrelation at lag tau converges to J0(2*pi*f_d*T_s*tau)
    as M_sin grows.
    """
    if M_sin < 8:
        raise ValueError(f"M_sin must be >= 8, got {M_sin}")
    if rng is None:
        rng = np.random.default_rng()
    n = np.arange(1, M_sin + 1)
    theta = rng.uniform(-np.pi, np.pi)
    phi = rng.uniform(-np.pi, np.pi, M_sin)
    psi = rng.uniform(-np.pi, np.pi, M_sin)
    alpha = (2.0 * np.pi * n - np.pi + theta) / (4.0 * M_sin)
    w = 2.0 * np.pi * f_d
    t = np.arange(L)[:, None] * T_s
    re = np.cos(w * t * np.cos(alpha)[None, :] + phi[None, :]).sum(axis=1)
    im = np.cos(w * t * np.sin(alpha)[None, :] + psi[None, :]).sum(axis=1)
    return (re + 1j * im) / np.sqrt(M_sin)
