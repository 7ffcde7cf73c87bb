"""Synthetic targets, noise generation and the plain-text signal format."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .orthobasis import trig_basis_column

__all__ = [
    "TRIG_TRUE_COMPONENTS",
    "BLOCKS_KNOTS",
    "BLOCKS_HEIGHTS",
    "TargetSpec",
    "trig_target",
    "trig_coefficients",
    "heavisine",
    "blocks",
    "test_signal",
    "rescale_to_snr",
    "add_noise",
    "target_samples",
    "write_signal",
    "read_signal",
]

# True components of the trigonometric target: basis index (1-based) -> weight.
TRIG_TRUE_COMPONENTS: dict[int, float] = {2: 2.0, 4: -1.5, 6: 1.0, 8: -0.5}

# Standard Donoho-Johnstone "blocks" knot/height table (WaveLab's makesig).
BLOCKS_KNOTS = (0.1, 0.13, 0.15, 0.23, 0.25, 0.40, 0.44, 0.65, 0.76, 0.78, 0.81)
BLOCKS_HEIGHTS = (4.0, -5.0, 3.0, -4.0, 5.0, -4.2, 2.1, 4.3, -3.1, 2.1, -4.2)


@dataclass(frozen=True)
class TargetSpec:
    """Reproducible description of a synthetic (or file-backed) target.

    ``kind`` is one of "trig", "heavisine", "blocks" or "file"; ``snr``
    requests rescaling so that sd(signal)/sigma equals the given ratio.
    """

    kind: str
    n: int
    sigma2: float = 1.0
    snr: float | None = None
    path: str | None = None

    def __post_init__(self):
        if self.kind not in ("trig", "heavisine", "blocks", "file"):
            raise ValueError(f"unknown target kind: {self.kind!r}")
        if self.sigma2 < 0:
            raise ValueError(f"noise variance must be nonnegative, got {self.sigma2}")
        if self.snr is not None and self.snr <= 0:
            raise ValueError(f"snr must be positive, got {self.snr}")
        if self.kind == "file" and not self.path:
            raise ValueError("file targets need a path")


def trig_target(n: int, components: dict[int, float] | None = None) -> np.ndarray:
    """Sparse trigonometric target on the design grid x_i = 2*pi*(i-1)/n."""
    comps = TRIG_TRUE_COMPONENTS if components is None else dict(components)
    if n < 10 or n % 2:
        raise ValueError(f"n must be even and >= 10, got {n}")
    if max(comps) > n - 2:
        raise ValueError("component index exceeds the usable basis range")
    h = np.zeros(n)
    for j, beta in comps.items():
        h += beta * trig_basis_column(n, j)
    return h


def trig_coefficients(n: int, components: dict[int, float] | None = None) -> np.ndarray:
    """Exact orthonormal-domain coefficients of the trigonometric target:
    sqrt(n)*beta_j on the true components, zero elsewhere."""
    comps = TRIG_TRUE_COMPONENTS if components is None else dict(components)
    zeta = np.zeros(n)
    for j, beta in comps.items():
        zeta[j - 1] = np.sqrt(n) * beta
    return zeta


def heavisine(t) -> np.ndarray:
    """4*sin(4*pi*t) - sign(t - 0.3) - sign(0.72 - t)."""
    t = np.asarray(t, dtype=float)
    return 4.0 * np.sin(4.0 * np.pi * t) - np.sign(t - 0.3) - np.sign(0.72 - t)


def blocks(t) -> np.ndarray:
    """Piecewise-constant test signal: sum_j h_j * (1 + sign(t - t_j)) / 2."""
    t = np.asarray(t, dtype=float)
    y = np.zeros_like(t)
    for knot, height in zip(BLOCKS_KNOTS, BLOCKS_HEIGHTS):
        y += height * (1.0 + np.sign(t - knot)) / 2.0
    return y


def test_signal(kind: str, n: int) -> np.ndarray:
    """Benchmark signal sampled on t_i = (i-1)/(n-1); n must be a power of two."""
    if n < 2 or n & (n - 1):
        raise ValueError(f"n must be a power of two, got {n}")
    t = np.arange(n) / (n - 1)
    if kind == "heavisine":
        return heavisine(t)
    if kind == "blocks":
        return blocks(t)
    raise ValueError(f"unknown test signal kind: {kind!r}")


def rescale_to_snr(h, sigma2: float, snr: float) -> np.ndarray:
    """Rescale so that sd(output)/sigma = snr (population standard deviation)."""
    h = np.asarray(h, dtype=float)
    if sigma2 <= 0:
        raise ValueError(f"noise variance must be positive, got {sigma2}")
    if snr <= 0:
        raise ValueError(f"snr must be positive, got {snr}")
    sd = float(np.std(h))
    if sd == 0:
        raise ValueError("cannot rescale a constant signal")
    return h * (snr * np.sqrt(sigma2) / sd)


def add_noise(h, sigma2: float, seed: int) -> np.ndarray:
    """h plus i.i.d. N(0, sigma2) noise; a fixed seed gives identical output."""
    if sigma2 < 0:
        raise ValueError(f"noise variance must be nonnegative, got {sigma2}")
    h = np.asarray(h, dtype=float)
    if sigma2 == 0:
        return h.copy()
    rng = np.random.default_rng(seed)
    return h + np.sqrt(sigma2) * rng.standard_normal(h.shape[0])


def target_samples(spec: TargetSpec) -> np.ndarray:
    """Noiseless samples of the target described by ``spec``."""
    if spec.kind == "trig":
        h = trig_target(spec.n)
    elif spec.kind in ("heavisine", "blocks"):
        h = test_signal(spec.kind, spec.n)
    else:
        h = read_signal(spec.path)
        if h.shape[0] != spec.n:
            raise ValueError(
                f"file target has {h.shape[0]} samples, spec says {spec.n}"
            )
    if spec.snr is not None:
        h = rescale_to_snr(h, spec.sigma2, spec.snr)
    return h


def write_signal(path, values, header=()) -> None:
    """One ASCII float per line (17 significant digits), '#' comment header."""
    values = np.asarray(values, dtype=float)
    with open(path, "w", encoding="ascii") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        for v in values:
            fh.write(f"{v:.17g}\n")


def read_signal(path) -> np.ndarray:
    """Parse a plain-text signal file, skipping blank and '#' comment lines."""
    values = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                values.append(float(line))
            except ValueError as exc:
                raise ValueError(
                    f"{path}: line {lineno} is not a decimal float: {line!r}"
                ) from exc
    if not values:
        raise ValueError(f"{path}: no samples found")
    return np.array(values, dtype=float)
