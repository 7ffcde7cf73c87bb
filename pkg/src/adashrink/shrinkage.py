"""Thresholding estimators and scaling variants.

The threshold path is parameterized by the number of surviving components:
at step ``k`` the threshold is the (k+1)-th largest coefficient magnitude,
so exactly ``k`` coordinates survive soft thresholding.  Scaling re-adjusts
only the shrinkage of surviving coordinates and never changes the active
set:

* ``none``      -- the plain soft-threshold fit;
* ``ssp``       -- one common scaling factor estimated from the data;
* ``adaptive``  -- per-component factor alpha_j = 1 + t_k/|z_j|, which undoes
  the shrinkage shift approximately and satisfies the closed form
  ``alpha_j * b_j = z_j - t_k**2 / z_j`` on the active set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .orthobasis import CoeffSet

__all__ = [
    "LstFit",
    "ScaledFit",
    "soft_threshold",
    "hard_threshold",
    "lst_fit",
    "lst_path",
    "adaptive_scale",
    "ssp_scale",
    "fixed_scale",
    "universal_fit",
]


def soft_threshold(z, theta: float) -> np.ndarray:
    """sign(z_j) * (|z_j| - theta)_+ for a nonnegative threshold."""
    if theta < 0:
        raise ValueError(f"threshold must be nonnegative, got {theta}")
    z = np.asarray(z, dtype=float)
    return np.sign(z) * np.maximum(np.abs(z) - theta, 0.0)


def hard_threshold(z, theta: float) -> np.ndarray:
    """z_j where |z_j| > theta, zero otherwise."""
    if theta < 0:
        raise ValueError(f"threshold must be nonnegative, got {theta}")
    z = np.asarray(z, dtype=float)
    return np.where(np.abs(z) > theta, z, 0.0)


@dataclass(frozen=True)
class LstFit:
    """One step of the order-statistic soft-threshold path.

    ``k`` is the step (number of surviving components), ``threshold`` the
    applied value t_k, ``active`` the surviving indices ordered by
    decreasing magnitude, and ``b`` the shrunk coefficient vector.
    """

    k: int
    threshold: float
    active: np.ndarray
    b: np.ndarray

    @property
    def n(self) -> int:
        return self.b.shape[0]


@dataclass(frozen=True)
class ScaledFit:
    """A threshold fit plus per-component scaling.

    ``alphas`` is 1 on inactive coordinates for every variant;
    ``scaled = alphas * base.b``; ``variant`` is "none", "ssp" or "adaptive".
    """

    base: LstFit
    alphas: np.ndarray
    scaled: np.ndarray
    variant: str


def _active_head(order: np.ndarray, ordered_abs: np.ndarray, k: int, t: float):
    head = order[:k]
    # Exact ties with the threshold cannot survive; with continuous noise
    # this branch never drops anything.
    return head[ordered_abs[:k] > t]


def lst_fit(z: CoeffSet, k: int) -> LstFit:
    """Threshold fit at step ``k``: t_k is the (k+1)-th largest ``|z|``."""
    n = z.n
    if not 0 <= k <= n - 1:
        raise ValueError(f"k must lie in [0, {n - 1}], got {k}")
    ordered_abs = np.abs(z.z[z.order])
    t = float(ordered_abs[k])
    return LstFit(
        k=k,
        threshold=t,
        active=_active_head(z.order, ordered_abs, k, t),
        b=soft_threshold(z.z, t),
    )


def lst_path(z: CoeffSet, kmax: int) -> list[LstFit]:
    """Fits for k = 0..kmax sharing a single sort of ``|z|``."""
    n = z.n
    if not 0 <= kmax <= n - 1:
        raise ValueError(f"kmax must lie in [0, {n - 1}], got {kmax}")
    ordered_abs = np.abs(z.z[z.order])
    fits = []
    for k in range(kmax + 1):
        t = float(ordered_abs[k])
        fits.append(
            LstFit(
                k=k,
                threshold=t,
                active=_active_head(z.order, ordered_abs, k, t),
                b=soft_threshold(z.z, t),
            )
        )
    return fits


def _check_pairing(fit: LstFit, z: CoeffSet) -> None:
    if fit.n != z.n:
        raise ValueError("fit and coefficient set have different lengths")
    if fit.active.size and not np.all(
        np.abs(z.z[fit.active]) > fit.threshold
    ):
        raise ValueError("fit does not match the coefficient set")


def adaptive_scale(fit: LstFit, z: CoeffSet, fallback: float = 1.0) -> ScaledFit:
    """Per-component scaling alpha_j = 1 + t_k/|z_j| on the active set.

    Active coordinates satisfy |z_j| > t_k >= 0, so the ratio is always
    defined and every active alpha exceeds 1 whenever t_k > 0.  ``fallback``
    is the inert constant reserved for the zero-coefficient branch of the
    scaling rule, which can never intersect the active set; inactive
    coordinates keep alpha = 1.
    """
    _check_pairing(fit, z)
    del fallback  # can never apply to an active coordinate
    alphas = np.ones(z.n)
    act = fit.active
    if act.size:
        alphas[act] = 1.0 + fit.threshold / np.abs(z.z[act])
    return ScaledFit(
        base=fit, alphas=alphas, scaled=alphas * fit.b, variant="adaptive"
    )


def fixed_scale(fit: LstFit, alpha: float, variant: str = "ssp") -> ScaledFit:
    """Scale all active coordinates by one common factor."""
    alphas = np.ones(fit.n)
    alphas[fit.active] = alpha
    return ScaledFit(base=fit, alphas=alphas, scaled=alphas * fit.b, variant=variant)


def ssp_scale(
    fit: LstFit,
    z: CoeffSet,
    sigma2_hat: float,
    formula: str = "consistent",
) -> ScaledFit:
    """Single scaling factor estimated from the data.

    The "consistent" formula is the orthonormal-domain estimate

        alpha = (sum_active b_j z_j + sigma2_hat * k) / sum_active b_j**2,

    the empirical version of the risk-minimizing common factor.  The
    "paper-literal" formula transcribes the same estimate with the shrunk
    coefficients left in per-sample units against unit-variance coefficients
    (a dimensionally inconsistent mix kept only for comparison runs; it
    requires sigma2_hat > 0).

    At k = 0 the scaling factor is undefined and the unscaled zero fit is
    returned with variant "none".
    """
    _check_pairing(fit, z)
    if sigma2_hat < 0:
        raise ValueError(f"noise variance must be nonnegative, got {sigma2_hat}")
    if fit.k == 0 or fit.active.size == 0:
        return ScaledFit(
            base=fit, alphas=np.ones(z.n), scaled=fit.b.copy(), variant="none"
        )
    act = fit.active
    b = fit.b[act]
    zz = z.z[act]
    denom = float(b @ b)
    if denom == 0.0:
        raise ValueError("zero denominator in the scaling estimate")
    if formula == "consistent":
        alpha = (float(b @ zz) + sigma2_hat * fit.k) / denom
    elif formula == "paper-literal":
        if sigma2_hat <= 0:
            raise ValueError("paper-literal scaling needs a positive variance")
        sigma_hat = float(np.sqrt(sigma2_hat))
        alpha = (
            float(b @ zz) * np.sqrt(z.n) / sigma_hat + sigma2_hat * fit.k
        ) / denom
    else:
        raise ValueError(f"unknown scaling formula: {formula!r}")
    return fixed_scale(fit, alpha)


def universal_fit(z: CoeffSet, sigma2_hat: float) -> LstFit:
    """Soft threshold at the universal level sqrt(2 * sigma2_hat * log n)."""
    n = z.n
    if n < 2:
        raise ValueError(f"universal threshold needs n >= 2, got {n}")
    if sigma2_hat <= 0:
        raise ValueError(f"noise variance must be positive, got {sigma2_hat}")
    theta = float(np.sqrt(2.0 * sigma2_hat * np.log(n)))
    ordered_abs = np.abs(z.z[z.order])
    k = int(np.count_nonzero(ordered_abs > theta))
    return LstFit(
        k=k,
        threshold=theta,
        active=z.order[:k],
        b=soft_threshold(z.z, theta),
    )
