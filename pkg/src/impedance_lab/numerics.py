"""Small numerical kernel: Hermitian eigensystems, Bessel J0, exponential
integrals and a robust scalar maximizer.

Everything here is a pure function on immutable inputs; safe to call from
concurrent workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from .exceptions import BadBracket, DomainError, IndefiniteMatrix, NonHermitian

HERMITIAN_RTOL = 1e-12
_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def check_hermitian(A: np.ndarray, rtol: float = HERMITIAN_RTOL) -> np.ndarray:
    """Return A as a complex ndarray, raising NonHermitian if max|A - A^H|
    exceeds rtol * max|A|."""
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NonHermitian(f"expected a square matrix, got shape {A.shape}")
    scale = np.abs(A).max() if A.size else 0.0
    if np.abs(A - A.conj().T).max() > rtol * scale:
        raise NonHermitian("matrix is not Hermitian within tolerance")
    return A


@dataclass(frozen=True)
class EigSys2:
    """Eigensystem of a 2x2 Hermitian matrix, eigenvalues in descending order."""

    eta1: float
    eta2: float
    e1: np.ndarray  # unit eigenvector for eta1, entries (E1, E2)
    e2: np.ndarray


def herm_eig2(S: np.ndarray) -> EigSys2:
    """Closed-form eigensystem of a 2x2 Hermitian matrix.

    The top eigenvector is the explicit form (S12, eta1 - S11)^T normalized,
    falling back to a basis vector when that vector vanishes (diagonal S).
    """
    S = check_hermitian(S)
    if S.shape != (2, 2):
        raise NonHermitian(f"expected a 2x2 matrix, got shape {S.shape}")
    s11 = S[0, 0].real
    s22 = S[1, 1].real
    s12 = S[0, 1]
    disc = np.sqrt((s11 - s22) ** 2 + 4.0 * abs(s12) ** 2)
    eta1 = 0.5 * (s11 + s22 + disc)
    eta2 = 0.5 * (s11 + s22 - disc)
    v = np.array([s12, eta1 - s11], dtype=complex)
    norm = np.linalg.norm(v)
    if norm > 1e-300 and norm > 1e-16 * max(abs(eta1), abs(eta2), 1e-300):
        e1 = v / norm
    elif s11 >= s22:  # (near-)diagonal matrix
        e1 = np.array([1.0 + 0j, 0.0 + 0j])
    else:
        e1 = np.array([0.0 + 0j, 1.0 + 0j])
    e2 = np.array([-np.conj(e1[1]), np.conj(e1[0])])
    return EigSys2(eta1=eta1, eta2=eta2, e1=e1, e2=e2)


def herm_eig_n(C: np.ndarray, clamp_rtol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of an LxL Hermitian PSD matrix.

    Returns (lambdas, V) with lambdas sorted descending and V such that
    V @ C @ V^H is diagonal (rows of V are conjugated eigenvectors).
    Small negative eigenvalues (|lam| <= clamp_rtol * lam_max) are clamped
    to zero; larger ones raise IndefiniteMatrix.
    """
    C = check_hermitian(C)
    L = C.shape[0]
    if L > 512:
        raise DomainError(f"matrix size {L} exceeds supported limit 512")
    w, W = np.linalg.eigh(C)  # ascending, C = W diag(w) W^H
    w = w[::-1].copy()
    W = W[:, ::-1]
    lam_max = max(w[0], 0.0)
    neg = w < 0.0
    if np.any(neg):
        if np.any(-w[neg] > clamp_rtol * lam_max):
            raise IndefiniteMatrix(
                f"negative eigenvalue {w.min():.3e} beyond clamp tolerance"
            )
        w[neg] = 0.0
    return w, W.conj().T


def bessel_j0(x: float) -> float:
    """Bessel function of the first kind, order zero."""
    if not np.all(np.isfinite(x)):
        raise DomainError("bessel_j0 requires finite arguments")
    return special.j0(x)


def expint_en(n: int, a: float) -> float:
    """Exponential integral E_n(a) for integer n >= 1, a > 0.

    E_1 comes from scipy; higher orders follow the recursion
    E_n(a) = [exp(-a) - a*E_{n-1}(a)] / (n - 1).
    """
    if a <= 0:
        raise DomainError(f"expint_en requires a > 0, got {a}")
    if n < 1:
        raise DomainError(f"expint_en requires n >= 1, got {n}")
    e = special.exp1(a)
    ema = np.exp(-a)
    for k in range(2, n + 1):
        e = (ema - a * e) / (k - 1)
    return float(e)


def _exp1_scaled(a: float) -> float:
    """exp(a) * E_1(a), overflow-safe for large a.

    Uses the continued fraction
    E_1(a) = e^{-a} / (a + 1/(1 + 1/(a + 2/(1 + 2/(a + ...)))))
    evaluated with the modified Lentz algorithm.
    """
    if a <= 600.0:
        return float(np.exp(a) * special.exp1(a))
    tiny = 1e-300
    f = a  # b_0
    c = f
    d = 0.0
    for j in range(1, 200):
        k = (j + 1) // 2
        aj = float(k)  # partial numerators: 1,1,2,2,3,3,...
        bj = 1.0 if j % 2 == 1 else a
        d = bj + aj * d
        if d == 0.0:
            d = tiny
        c = bj + aj / c
        if c == 0.0:
            c = tiny
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return 1.0 / f


def expint_en_scaled(n: int, a: float) -> float:
    """exp(a) * E_n(a), computed by the scaled recursion to avoid underflow."""
    if a <= 0:
        raise DomainError(f"expint_en_scaled requires a > 0, got {a}")
    if n < 1:
        raise DomainError(f"expint_en_scaled requires n >= 1, got {n}")
    e = _exp1_scaled(a)
    for k in range(2, n + 1):
        e = (1.0 - a * e) / (k - 1)
    return float(e)


def maximize_scalar(f, lo: float, hi: float, tol: float = 1e-10):
    """Maximize f on [lo, hi]: coarse scan over 64 log-spaced points (plus lo
    itself), then golden-section refinement around the best point.

    Returns (x_best, f(x_best)). Unimodality is not assumed; the coarse scan
    guards against secondary maxima.
    """
    if lo >= hi:
        raise BadBracket(f"need lo < hi, got [{lo}, {hi}]")
    if tol <= 0:
        raise BadBracket(f"need tol > 0, got {tol}")
    if lo > 0:
        xs = np.geomspace(lo, hi, 64)
        xs = np.concatenate(([lo], xs))
    elif lo == 0:
        xs = np.concatenate(([0.0], np.geomspace(hi * 1e-12, hi, 64)))
    else:
        xs = np.linspace(lo, hi, 65)
    fs = np.array([f(x) for x in xs])
    i = int(np.argmax(fs))
    a = xs[max(i - 1, 0)]
    b = xs[min(i + 1, len(xs) - 1)]
    x_best, f_best = xs[i], fs[i]

    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    for x, fx in ((c, fc), (d, fd), ((a + b) / 2, f((a + b) / 2))):
        if fx > f_best:
            x_best, f_best = x, fx
    return float(x_best), float(f_best)


def crandn(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard circularly-symmetric complex Gaussian CN(0, 1) samples:
    independent real/imaginary parts each N(0, 1/2)."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
