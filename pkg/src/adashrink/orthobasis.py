"""Orthonormal coefficient-domain transforms.

Everything downstream (thresholding, scaling, risk estimation) operates on
coefficients in a single orthonormal domain: for an orthogonal design G with
G'G = n*I and a sample vector y, the coefficient vector is

    z = G'y / sqrt(n),

so that ||z|| = ||y|| (Parseval) and, for y = h + e with e ~ N(0, sigma^2*I),
the z_j are independent N(zeta_j, sigma^2) where zeta is the coefficient
vector of the noiseless signal.  Wavelet coefficients (``wavelet`` module)
live in the same domain, so shrinkage and model selection code is shared
between both transforms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DesignMatrix",
    "CoeffSet",
    "coeff_set",
    "trig_basis_column",
    "trig_design_matrix",
    "forward",
    "inverse",
    "orthonormality_defect",
]


@dataclass(frozen=True)
class DesignMatrix:
    """Orthogonal design matrix: ``entries[i, j] = g_{j+1}(x_i)`` with G'G = n*I."""

    n: int
    entries: np.ndarray


@dataclass(frozen=True)
class CoeffSet:
    """Coefficient vector in the orthonormal domain.

    ``order`` sorts coordinates by decreasing ``|z|`` (ties broken toward the
    smaller index so results are reproducible), ``signs`` holds ``sign(z_j)``,
    and ``sigma`` is the per-coefficient noise standard deviation when known
    or estimated (``None`` otherwise).
    """

    z: np.ndarray
    order: np.ndarray
    signs: np.ndarray
    sigma: float | None = None

    @property
    def n(self) -> int:
        return self.z.shape[0]


def coeff_set(z, sigma: float | None = None) -> CoeffSet:
    """Build a :class:`CoeffSet` from raw coefficients."""
    z = np.asarray(z, dtype=float)
    if z.ndim != 1:
        raise ValueError("coefficients must form a 1-D vector")
    order = np.argsort(-np.abs(z), kind="stable")
    return CoeffSet(z=z, order=order, signs=np.sign(z), sigma=sigma)


def trig_basis_column(n: int, j: int) -> np.ndarray:
    """Basis function number ``j`` (1-based) sampled on x_i = 2*pi*(i-1)/n.

    Layout: j = 1 is the constant 1; even j < n is sqrt(2)*cos((j/2)*x);
    odd 1 < j < n is sqrt(2)*sin(((j-1)/2)*x); j = n is cos((n/2)*x) without
    the sqrt(2) factor.  The sin column at odd j carries integer frequency
    (j-1)/2, pairing it with the cos column at j-1; equal integer frequencies
    on this grid are what make G'G = n*I hold exactly.
    """
    if n < 4 or n % 2:
        raise ValueError(f"n must be an even integer >= 4, got {n}")
    if not 1 <= j <= n:
        raise ValueError(f"basis index must lie in [1, {n}], got {j}")
    x = 2.0 * np.pi * np.arange(n) / n
    if j == 1:
        return np.ones(n)
    if j == n:
        return np.cos(0.5 * n * x)
    if j % 2 == 0:
        return np.sqrt(2.0) * np.cos((j // 2) * x)
    return np.sqrt(2.0) * np.sin(((j - 1) // 2) * x)


def trig_design_matrix(n: int) -> DesignMatrix:
    """Trigonometric orthogonal design on the grid x_i = 2*pi*(i-1)/n.

    Requires even ``n >= 4``; columns follow :func:`trig_basis_column`.
    """
    if n < 4 or n % 2:
        raise ValueError(f"n must be an even integer >= 4, got {n}")
    x = 2.0 * np.pi * np.arange(n) / n
    m = np.arange(1, n // 2)
    phases = np.outer(x, m)
    g = np.empty((n, n))
    g[:, 0] = 1.0
    g[:, 2 * m - 1] = np.sqrt(2.0) * np.cos(phases)
    g[:, 2 * m] = np.sqrt(2.0) * np.sin(phases)
    g[:, n - 1] = np.cos(0.5 * n * x)
    return DesignMatrix(n=n, entries=g)


def forward(design: DesignMatrix, y) -> CoeffSet:
    """Orthonormal-domain coefficients z = G'y / sqrt(n) of a sample vector."""
    y = np.asarray(y, dtype=float)
    if y.shape != (design.n,):
        raise ValueError(
            f"sample vector has shape {y.shape}, expected ({design.n},)"
        )
    z = design.entries.T @ y / np.sqrt(design.n)
    return coeff_set(z)


def inverse(design: DesignMatrix, z) -> np.ndarray:
    """Reconstruct samples from orthonormal-domain coefficients: G z / sqrt(n)."""
    z = np.asarray(z, dtype=float)
    if z.shape != (design.n,):
        raise ValueError(
            f"coefficient vector has shape {z.shape}, expected ({design.n},)"
        )
    return design.entries @ z / np.sqrt(design.n)


def orthonormality_defect(design: DesignMatrix) -> float:
    """max |(G'G)/n - I|, zero for an exactly orthogonal design."""
    gram = design.entries.T @ design.entries / design.n
    return float(np.max(np.abs(gram - np.eye(design.n))))
