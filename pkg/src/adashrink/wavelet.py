"""Orthogonal discrete wavelet transform with periodic boundaries.

The analysis cascade filters and downsamples from the finest level J
(``n = 2**J`` samples) to a user-chosen coarsest level ``J0``.  Circular
convolution keeps every level exactly orthonormal for any even signal
length, including lengths shorter than the filter, so the flattened
coefficients live in the same orthonormal domain as the trigonometric
coefficients (:mod:`adashrink.orthobasis`): norms are preserved and white
Gaussian noise stays white with unchanged variance.

Flattening order is fixed to (approximation block, then detail blocks from
coarse to fine) so that order statistics over coefficient magnitudes are
reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .orthobasis import CoeffSet, coeff_set

__all__ = [
    "WaveletFilter",
    "WaveletCoeffs",
    "wavelet_filter",
    "daubechies8",
    "dwt_decompose",
    "dwt_reconstruct",
    "flatten",
    "unflatten",
    "to_coeff_set",
    "finest_details",
]

# Standard 8-tap orthogonal Daubechies (extremal phase) low-pass filter.
# Correctness is pinned by unit tests on the filter identities (sum sqrt(2),
# orthonormal even shifts, four vanishing moments), not by trusting the
# transcription.
_DB8_LOWPASS = (
    0.2303778133088965,
    0.7148465705529157,
    0.6308807679298589,
    -0.027983769416859854,
    -0.18703481171909309,
    0.030841381835560764,
    0.0328830116668852,
    -0.010597401785069032,
)


@dataclass(frozen=True)
class WaveletFilter:
    """Orthogonal filter pair: low-pass ``taps`` h and quadrature-mirror
    high-pass ``highpass`` with g_i = (-1)^i * h_{L-1-i}."""

    taps: np.ndarray
    highpass: np.ndarray


def wavelet_filter(taps) -> WaveletFilter:
    """Build a :class:`WaveletFilter` from low-pass taps (even count)."""
    taps = np.asarray(taps, dtype=float)
    if taps.ndim != 1 or taps.size < 2 or taps.size % 2:
        raise ValueError("low-pass filter needs an even number of taps (>= 2)")
    alternating = np.where(np.arange(taps.size) % 2 == 0, 1.0, -1.0)
    return WaveletFilter(taps=taps, highpass=alternating * taps[::-1])


def daubechies8() -> WaveletFilter:
    """The 8-coefficient orthogonal Daubechies filter pair."""
    return wavelet_filter(_DB8_LOWPASS)


@dataclass(frozen=True)
class WaveletCoeffs:
    """Coefficients of a level-``J0`` decomposition of ``2**J`` samples.

    ``approx`` has length ``2**J0``; ``details[i]`` is the detail block at
    level ``J0 + i`` with length ``2**(J0 + i)``, ordered coarse to fine.
    """

    approx: np.ndarray
    details: tuple[np.ndarray, ...]
    J: int
    J0: int


def _dyadic_level(n: int) -> int:
    if n < 1 or n & (n - 1):
        raise ValueError(f"signal length must be a power of two, got {n}")
    return n.bit_length() - 1


def _analysis_step(c: np.ndarray, filt: WaveletFilter):
    nn = c.shape[0]
    taps = filt.taps.size
    idx = (2 * np.arange(nn // 2)[:, None] + np.arange(taps)[None, :]) % nn
    windows = c[idx]
    return windows @ filt.taps, windows @ filt.highpass


def _synthesis_step(a: np.ndarray, d: np.ndarray, filt: WaveletFilter) -> np.ndarray:
    nn = 2 * a.shape[0]
    taps = filt.taps.size
    idx = (2 * np.arange(a.shape[0])[:, None] + np.arange(taps)[None, :]) % nn
    c = np.zeros(nn)
    # Adjoint of the analysis step; np.add.at accumulates wrapped overlaps.
    np.add.at(c, idx, a[:, None] * filt.taps[None, :])
    np.add.at(c, idx, d[:, None] * filt.highpass[None, :])
    return c


def dwt_decompose(y, filt: WaveletFilter, J0: int) -> WaveletCoeffs:
    """Cascade decomposition of ``y`` down to level ``J0``.

    ``len(y)`` must be a power of two ``2**J`` with ``0 <= J0 <= J``.
    """
    y = np.asarray(y, dtype=float)
    if y.ndim != 1:
        raise ValueError("signal must be a 1-D vector")
    J = _dyadic_level(y.shape[0])
    if not 0 <= J0 <= J:
        raise ValueError(f"J0 must lie in [0, {J}], got {J0}")
    c = y
    fine_to_coarse = []
    for _ in range(J, J0, -1):
        c, d = _analysis_step(c, filt)
        fine_to_coarse.append(d)
    return WaveletCoeffs(
        approx=c, details=tuple(reversed(fine_to_coarse)), J=J, J0=J0
    )


def dwt_reconstruct(w: WaveletCoeffs, filt: WaveletFilter) -> np.ndarray:
    """Exact inverse of :func:`dwt_decompose` (the cascade is orthonormal)."""
    if w.approx.shape != (2**w.J0,):
        raise ValueError("malformed level structure: approximation block size")
    if len(w.details) != w.J - w.J0:
        raise ValueError("malformed level structure: detail block count")
    c = w.approx
    for d in w.details:
        if d.shape != c.shape:
            raise ValueError("malformed level structure: detail block size")
        c = _synthesis_step(c, d, filt)
    return c


def flatten(w: WaveletCoeffs) -> np.ndarray:
    """Concatenate (approx, details coarse to fine) into one n-vector."""
    return np.concatenate([w.approx, *w.details]) if w.details else w.approx.copy()


def unflatten(vec, J: int, J0: int) -> WaveletCoeffs:
    """Split a flattened coefficient vector back into level blocks."""
    vec = np.asarray(vec, dtype=float)
    if vec.shape != (2**J,):
        raise ValueError(f"expected {2**J} coefficients, got {vec.shape}")
    if not 0 <= J0 <= J:
        raise ValueError(f"J0 must lie in [0, {J}], got {J0}")
    approx = vec[: 2**J0]
    details = []
    start = 2**J0
    for level in range(J0, J):
        details.append(vec[start : start + 2**level])
        start += 2**level
    return WaveletCoeffs(approx=approx, details=tuple(details), J=J, J0=J0)


def to_coeff_set(w: WaveletCoeffs, sigma: float | None = None) -> CoeffSet:
    """Flattened coefficients as a :class:`~adashrink.orthobasis.CoeffSet`."""
    return coeff_set(flatten(w), sigma=sigma)


def finest_details(w: WaveletCoeffs) -> np.ndarray:
    """Finest-scale detail block (level J-1), the noise-dominated one."""
    if not w.details:
        raise ValueError("decomposition has no detail blocks (J0 == J)")
    return w.details[-1]
