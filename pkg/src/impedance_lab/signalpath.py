"""Training-sequence construction, observation synthesis under load switching,
and sufficient-statistic reduction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InfeasibleTraining, ShapeMismatch
from .fading import ChannelSpec, sample_H
from .frontend import effective_sigma2
from .numerics import crandn


@dataclass(frozen=True)
class TrainingSpec:
    """Orthogonal equal-energy training split at K = T/2: X1 X1^H = X2 X2^H
    = (P*T/2N) * I_N."""

    N: int
    T: int
    K: int
    P: float
    X1: np.ndarray
    X2: np.ndarray


def dft_training(N: int, T: int, P: float = 1.0) -> TrainingSpec:
    """Build the two training blocks from rows of a normalized K-point DFT
    matrix, K = T/2. X1 takes rows 0..N-1; X2 the next N rows (wrapping when
    N <= K < 2N, in which case the blocks are individually orthogonal but
    not disjoint)."""
    if T % 2 != 0:
        raise InfeasibleTraining(f"training length T must be even, got {T}")
    K = T // 2
    if K < N:
        raise InfeasibleTraining(f"T/2 = {K} < N = {N}: orthogonality infeasible")
    if P <= 0:
        raise ValueError(f"P must be > 0, got {P}")
    t = np.arange(K)
    scale = np.sqrt(P * T / (2.0 * N)) / np.sqrt(K)

    def rows(idx: np.ndarray) -> np.ndarray:
        return scale * np.exp(-2j * np.pi * np.outer(idx, t) / K)

    X1 = rows(np.arange(N))
    X2 = rows((np.arange(N) + N) % K)
    return TrainingSpec(N=N, T=T, K=K, P=P, X1=X1, X2=X2)


@dataclass(frozen=True)
class Truth:
    """Ground truth recorded at synthesis time, for harness scoring only."""

    F: complex
    H: np.ndarray
    sigma_h2: float


@dataclass(frozen=True)
class Observations:
    """Raw received blocks U1 (load Z1) and U2 (load Z2)."""

    U1: np.ndarray
    U2: np.ndarray
    truth: Truth | None = None


def synthesize(spec: ChannelSpec, train: TrainingSpec, F: complex,
               sigma_n2: float, rng: np.random.Generator) -> Observations:
    """Forward model: U1 = H X1 + N1, U2 = F H X2 + N2 with i.i.d.
    CN(0, sigma_n2) noise and H drawn from the channel spec."""
    if spec.N != train.N:
        raise ShapeMismatch(f"channel N = {spec.N} != training N = {train.N}")
    if sigma_n2 < 0:
        raise ValueError(f"sigma_n2 must be >= 0, got {sigma_n2}")
    H = sample_H(spec, rng).H
    s = np.sqrt(sigma_n2)
    U1 = H @ train.X1 + s * crandn(rng, (spec.L, train.K))
    U2 = F * (H @ train.X2) + s * crandn(rng, (spec.L, train.T - train.K))
    return Observations(U1=U1, U2=U2, truth=Truth(F=F, H=H, sigma_h2=spec.sigma_h2))


@dataclass(frozen=True)
class SufficientStats:
    """Reduced observations: Y1 - H and Y2 - F*H have i.i.d. CN(0, sigma2)
    entries, sigma2 = 2*N*sigma_n2/(P*T)."""

    Y1: np.ndarray
    Y2: np.ndarray
    sigma2: float


def sufficient_stats(obs: Observations, train: TrainingSpec,
                     sigma_n2: float) -> SufficientStats:
    """Correlate the raw blocks against the known training sequences:
    Y_i = (2N/PT) U_i X_i^H."""
    scale = 2.0 * train.N / (train.P * train.T)
    if obs.U1.ndim != 2 or obs.U2.ndim != 2:
        raise ShapeMismatch("U1/U2 must be 2-D (packets x symbols)")
    if obs.U1.shape[1] != train.K or obs.U2.shape[1] != train.T - train.K:
        raise ShapeMismatch(
            f"U1/U2 symbol counts {obs.U1.shape[1]}/{obs.U2.shape[1]} do not "
            f"match training split {train.K}/{train.T - train.K}")
    if obs.U1.shape[0] != obs.U2.shape[0]:
        raise ShapeMismatch("U1 and U2 must have the same packet count")
    Y1 = scale * (obs.U1 @ train.X1.conj().T)
    Y2 = scale * (obs.U2 @ train.X2.conj().T)
    return SufficientStats(Y1=Y1, Y2=Y2,
                           sigma2=effective_sigma2(sigma_n2, train.N, train.P, train.T))
