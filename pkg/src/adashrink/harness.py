"""Monte Carlo experiment driver and statistical verification oracles.

Replications are embarrassingly parallel: replication ``r`` draws its noise
from a generator seeded with ``base_seed + r`` and every per-replication
quantity is computed with row-independent array operations, so results are
bit-identical for any worker count.  Aggregation reduces the stacked
per-replication arrays in replication order.
"""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace

import numpy as np

from . import risk, signals, wavelet
from .orthobasis import coeff_set, orthonormality_defect, trig_design_matrix

__all__ = [
    "PATH_METHODS",
    "ExperimentConfig",
    "McSummary",
    "CheckResult",
    "VerificationReport",
    "path_tables",
    "universal_table",
    "run_experiment",
    "risk_curve",
    "write_curves_csv",
    "write_selection_csv",
    "config_json",
    "table1_config",
    "wavelet_config",
    "named_experiment_config",
    "check_trig_orthogonality",
    "check_filter_identities",
    "check_dwt_exactness",
    "check_stein_identity",
    "check_sure_unbiasedness",
    "check_scaling_trend",
    "check_loss_gap_at_true_size",
    "check_true_component_recovery",
    "verify_all",
]

PATH_METHODS = ("lst", "ssp", "adaptive")

CURVES_HEADER = ("method", "k", "mean_criterion", "sd_criterion", "mean_loss", "sd_loss")
SELECTION_HEADER = (
    "method",
    "mean_selected_k",
    "sd_selected_k",
    "mean_loss_at_selected",
    "sd_loss_at_selected",
    "reps",
    "seed",
)


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    """Reproducible Monte Carlo run description."""

    target: signals.TargetSpec
    kmax: int
    reps: int
    methods: tuple[str, ...] = PATH_METHODS
    base_seed: int = 0
    noise_method: str = "known"  # "known" | "mad" | "residual-regression"
    residual_span_size: int = 0
    dwt_level: int = 2  # coarsest decomposition level for wavelet targets
    df_convention: str = "k"  # "k" | "paper-literal"
    ssp_formula: str = "consistent"  # "consistent" | "paper-literal"

    def __post_init__(self):
        if self.reps < 1:
            raise ValueError(f"reps must be >= 1, got {self.reps}")
        if not 0 <= self.kmax <= self.target.n - 1:
            raise ValueError(
                f"kmax must lie in [0, {self.target.n - 1}], got {self.kmax}"
            )
        for m in self.methods:
            if m not in PATH_METHODS + ("universal",):
                raise ValueError(f"unknown method: {m!r}")
        if self.noise_method not in ("known", "mad", "residual-regression"):
            raise ValueError(f"unknown noise method: {self.noise_method!r}")
        if self.noise_method == "residual-regression" and not (
            0 < self.residual_span_size < self.target.n
        ):
            raise ValueError("residual span size must lie in (0, n)")
        if self.df_convention not in ("k", "paper-literal"):
            raise ValueError(f"unknown df convention: {self.df_convention!r}")
        if self.ssp_formula not in ("consistent", "paper-literal"):
            raise ValueError(f"unknown ssp formula: {self.ssp_formula!r}")

    @property
    def transform(self) -> str:
        if self.target.kind == "trig":
            return "trig"
        if self.target.kind in ("heavisine", "blocks"):
            return "dwt"
        # file targets: dyadic lengths go through the wavelet transform
        n = self.target.n
        return "dwt" if n >= 2 and not (n & (n - 1)) else "trig"


def table1_config(reps: int = 1000, seed: int = 0, **overrides) -> ExperimentConfig:
    """Trigonometric study: n=500, kmax=50, residual-regression noise
    estimate over the first 250 components."""
    config = ExperimentConfig(
        target=signals.TargetSpec(kind="trig", n=500, sigma2=1.0),
        kmax=50,
        reps=reps,
        methods=PATH_METHODS,
        base_seed=seed,
        noise_method="residual-regression",
        residual_span_size=250,
    )
    return replace(config, **overrides) if overrides else config


def wavelet_config(
    kind: str, reps: int = 500, seed: int = 0, **overrides
) -> ExperimentConfig:
    """Wavelet denoising study: n=1024, SNR 7, coarsest level 2, kmax=300,
    MAD noise estimate, universal-threshold baseline included."""
    config = ExperimentConfig(
        target=signals.TargetSpec(kind=kind, n=1024, sigma2=1.0, snr=7.0),
        kmax=300,
        reps=reps,
        methods=PATH_METHODS + ("universal",),
        base_seed=seed,
        noise_method="mad",
        dwt_level=2,
    )
    return replace(config, **overrides) if overrides else config


def named_experiment_config(name: str, reps: int | None = None, seed: int = 0):
    if name == "trig-table1":
        return table1_config(reps=1000 if reps is None else reps, seed=seed)
    if name == "wavelet-heavisine":
        return wavelet_config("heavisine", reps=500 if reps is None else reps, seed=seed)
    if name == "wavelet-blocks":
        return wavelet_config("blocks", reps=500 if reps is None else reps, seed=seed)
    raise ValueError(f"unknown experiment name: {name!r}")


# ---------------------------------------------------------------------------
# Vectorized path evaluation
# ---------------------------------------------------------------------------


class _SortedStats:
    """Sorted views and prefix/suffix sums shared by all per-k formulas.

    Prefix arrays have length n+1 along the last axis; entry i is the sum
    over the i largest-magnitude coordinates (entry 0 is zero).  All
    operations act row-wise, so batch results match single-row results
    bitwise -- the property the multi-worker determinism contract rests on.
    """

    def __init__(self, z, zeta):
        z = np.asarray(z, dtype=float)
        self.n = z.shape[-1]
        order = np.argsort(-np.abs(z), axis=-1, kind="stable")
        self.zs = np.take_along_axis(z, order, -1)
        self.a = np.abs(self.zs)
        self.s = np.sign(self.zs)
        self.a2_total = np.sum(self.a * self.a, axis=-1, keepdims=True)
        self.A1 = self._prefix(self.a)
        self.A2 = self._prefix(self.a * self.a)
        self.Z2_suffix = self.a2_total - self.A2
        # Guarded reciprocals: zero entries only matter where the threshold
        # is zero, and there every term that uses them carries a factor t.
        safe = np.where(self.a > 0, self.zs, 1.0)
        self.inv2 = self._prefix(np.where(self.a > 0, 1.0 / safe**2, 0.0))
        if zeta is None:
            self.has_truth = False
        else:
            self.has_truth = True
            zeta = np.broadcast_to(np.asarray(zeta, dtype=float), z.shape)
            zetas = np.take_along_axis(zeta, order, -1)
            dev = self.zs - zetas
            self.D2 = self._prefix(dev * dev)
            self.SD = self._prefix(self.s * dev)
            self.E1 = self._prefix(np.where(self.a > 0, dev / safe, 0.0))
            self.ZZ = self._prefix(self.zs * zetas)
            self.SZ = self._prefix(self.s * zetas)
            self.T2 = self._prefix(zetas * zetas)
            self.T2_suffix = np.sum(zetas * zetas, -1, keepdims=True) - self.T2

    @staticmethod
    def _prefix(v):
        out = np.cumsum(v, axis=-1)
        zero = np.zeros_like(out[..., :1])
        return np.concatenate([zero, out], axis=-1)


def _ssp_alpha(st, t, ks, sig2, upto, formula):
    bz = st.A2[..., :upto] - t * st.A1[..., :upto]
    bb = st.A2[..., :upto] - 2.0 * t * st.A1[..., :upto] + ks * t * t
    usable = (ks > 0) & (bb > 0)
    bb_safe = np.where(usable, bb, 1.0)
    if formula == "consistent":
        alpha = (bz + sig2 * ks) / bb_safe
    else:
        if np.any(sig2 <= 0):
            raise ValueError("paper-literal scaling needs a positive variance")
        alpha = (np.sqrt(st.n) * bz / np.sqrt(sig2) + sig2 * ks) / bb_safe
    return np.where(usable, alpha, 1.0), bz, bb


def path_tables(
    z,
    zeta,
    kmax: int,
    sigma2,
    *,
    df_convention: str = "k",
    ssp_formula: str = "consistent",
    methods=PATH_METHODS,
    ssp_fixed_alpha: float | None = None,
):
    """Per-k criterion and loss tables along the threshold path.

    ``z`` has shape (..., n); ``zeta`` is the matching truth (or None, in
    which case losses are None); ``sigma2`` is the variance plugged into the
    criteria, a scalar or one value per row.  Returns a dict mapping each
    requested path method to a dict with "criterion" and "loss" arrays of
    shape (..., kmax+1); the "ssp" entry also carries the per-k "alpha".
    """
    z = np.asarray(z, dtype=float)
    n = z.shape[-1]
    if not 0 <= kmax <= n - 1:
        raise ValueError(f"kmax must lie in [0, {n - 1}], got {kmax}")
    if df_convention not in ("k", "paper-literal"):
        raise ValueError(f"unknown df convention: {df_convention!r}")
    if ssp_formula not in ("consistent", "paper-literal"):
        raise ValueError(f"unknown ssp formula: {ssp_formula!r}")
    st = _SortedStats(z, zeta)
    sig2 = np.broadcast_to(np.asarray(sigma2, dtype=float), z.shape[:-1])[..., None]
    upto = kmax + 1
    ks = np.arange(upto, dtype=float)
    t = st.a[..., :upto]
    out = {}

    def lst_tables():
        resid = ks * t * t + st.Z2_suffix[..., :upto]
        df = 2.0 * sig2 * (ks if df_convention == "k" else 1.0) / n
        criterion = resid / n - sig2 + df
        loss = None
        if st.has_truth:
            loss = (
                st.D2[..., :upto]
                - 2.0 * t * st.SD[..., :upto]
                + ks * t * t
                + st.T2_suffix[..., :upto]
            ) / n
        return {"criterion": criterion, "loss": loss}

    def adaptive_tables():
        inv2 = st.inv2[..., :upto]
        expansion = t * t * inv2  # sum over active of (alpha_j - 1)^2
        resid = t**4 * inv2 + st.Z2_suffix[..., :upto]
        criterion = (
            resid / n - sig2 + 2.0 * sig2 * ks / n + 2.0 * sig2 * expansion / n
        )
        loss = None
        if st.has_truth:
            loss = (
                st.D2[..., :upto]
                - 2.0 * t * t * st.E1[..., :upto]
                + t**4 * inv2
                + st.T2_suffix[..., :upto]
            ) / n
        return {"criterion": criterion, "loss": loss}

    def ssp_tables():
        if ssp_fixed_alpha is None:
            alpha, bz, bb = _ssp_alpha(st, t, ks, sig2, upto, ssp_formula)
        else:
            bz = st.A2[..., :upto] - t * st.A1[..., :upto]
            bb = st.A2[..., :upto] - 2.0 * t * st.A1[..., :upto] + ks * t * t
            alpha = np.where(ks > 0, float(ssp_fixed_alpha), 1.0)
            alpha = np.broadcast_to(alpha, bz.shape)
        resid = alpha**2 * bb - 2.0 * alpha * bz + st.A2[..., :upto]
        df = 2.0 * sig2 * alpha * (ks if df_convention == "k" else 1.0) / n
        criterion = (resid + st.Z2_suffix[..., :upto]) / n - sig2 + df
        loss = None
        if st.has_truth:
            bzeta = st.ZZ[..., :upto] - t * st.SZ[..., :upto]
            loss = (
                alpha**2 * bb
                - 2.0 * alpha * bzeta
                + st.T2[..., :upto]
                + st.T2_suffix[..., :upto]
            ) / n
        return {"criterion": criterion, "loss": loss, "alpha": alpha}

    builders = {"lst": lst_tables, "ssp": ssp_tables, "adaptive": adaptive_tables}
    for method in methods:
        if method == "universal":
            continue
        out[method] = builders[method]()
    return out


def universal_table(z, zeta, sigma2, *, df_convention: str = "k"):
    """Fit at the universal threshold sqrt(2*sigma2*log n), per row.

    Returns arrays "k" (surviving count), "theta", "criterion" and "loss"
    with one entry per row of ``z``.
    """
    z = np.asarray(z, dtype=float)
    n = z.shape[-1]
    if n < 2:
        raise ValueError(f"universal threshold needs n >= 2, got {n}")
    sig2 = np.broadcast_to(np.asarray(sigma2, dtype=float), z.shape[:-1])
    if np.any(sig2 <= 0):
        raise ValueError("universal threshold needs a positive variance")
    st = _SortedStats(z, zeta)
    theta = np.sqrt(2.0 * sig2 * np.log(n))
    ku = np.sum(st.a > theta[..., None], axis=-1)
    kf = ku.astype(float)

    def gather(prefix):
        return np.take_along_axis(prefix, ku[..., None], -1)[..., 0]

    resid = kf * theta * theta + gather(st.Z2_suffix)
    df = 2.0 * sig2 * (kf if df_convention == "k" else 1.0) / n
    criterion = resid / n - sig2 + df
    loss = None
    if st.has_truth:
        loss = (
            gather(st.D2)
            - 2.0 * theta * gather(st.SD)
            + kf * theta * theta
            + gather(st.T2_suffix)
        ) / n
    return {"k": ku, "theta": theta, "criterion": criterion, "loss": loss}


# ---------------------------------------------------------------------------
# Experiment driver
# ---------------------------------------------------------------------------


class _Context:
    """Per-experiment precomputation shared by every replication."""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.h = signals.target_samples(config.target)
        if config.transform == "trig":
            self.design = trig_design_matrix(config.target.n)
            self.scale = np.sqrt(config.target.n)
            self.zeta = self.design.entries.T @ self.h / self.scale
        else:
            self.filter = wavelet.daubechies8()
            truth = wavelet.dwt_decompose(self.h, self.filter, config.dwt_level)
            self.zeta = wavelet.flatten(truth)

    def coefficients(self, y):
        """Coefficients plus the finest detail block (None for trig)."""
        if self.config.transform == "trig":
            return self.design.entries.T @ y / self.scale, None
        w = wavelet.dwt_decompose(y, self.filter, self.config.dwt_level)
        return wavelet.flatten(w), wavelet.finest_details(w)

    def noise_variance(self, z, finest):
        method = self.config.noise_method
        if method == "known":
            return self.config.target.sigma2
        if method == "mad":
            return risk.mad_sigma(finest).sigma2
        span = np.arange(self.config.residual_span_size)
        return risk.residual_sigma(coeff_set(z), span).sigma2


def _simulate(config: ExperimentConfig, rep_start: int, rep_stop: int):
    """Per-replication tables for replications [rep_start, rep_stop)."""
    ctx = _Context(config)
    n = config.target.n
    count = rep_stop - rep_start
    rows = np.empty((count, n))
    sig2 = np.empty(count)
    valid = np.ones(count, dtype=bool)
    for i in range(count):
        y = signals.add_noise(
            ctx.h, config.target.sigma2, config.base_seed + rep_start + i
        )
        z, finest = ctx.coefficients(y)
        rows[i] = z
        try:
            sig2[i] = ctx.noise_variance(z, finest)
        except ValueError:
            valid[i] = False
            sig2[i] = np.nan

    zv = rows[valid]
    sv = sig2[valid]
    result = {"valid": valid, "sigma2": sig2, "methods": {}}
    path_methods = tuple(m for m in config.methods if m != "universal")
    if path_methods:
        tables = path_tables(
            zv,
            ctx.zeta,
            config.kmax,
            sv,
            df_convention=config.df_convention,
            ssp_formula=config.ssp_formula,
            methods=path_methods,
        )
        for method in path_methods:
            criterion = tables[method]["criterion"]
            loss = tables[method]["loss"]
            selected = np.argmin(criterion, axis=-1)
            pick = selected[..., None]
            result["methods"][method] = {
                "criterion": criterion,
                "loss": loss,
                "selected": selected,
                "loss_at_selected": np.take_along_axis(loss, pick, -1)[..., 0],
            }
    if "universal" in config.methods:
        uni = universal_table(
            zv, ctx.zeta, sv, df_convention=config.df_convention
        )
        result["methods"]["universal"] = {
            "criterion": None,
            "loss": None,
            "selected": uni["k"],
            "loss_at_selected": uni["loss"],
        }
    return result


def _simulate_star(args):
    return _simulate(*args)


@dataclass(frozen=True)
class McSummary:
    """Aggregated Monte Carlo results.

    ``curves`` maps each path method to per-k arrays (mean/sd of criterion
    and loss, length kmax+1); ``selection`` maps every method to scalar
    summaries of the selected model; ``selected_counts`` holds the selected-k
    histogram over 0..kmax (counts above kmax are clipped into the last bin,
    which can happen only for the universal baseline).
    """

    config: ExperimentConfig
    k: np.ndarray
    curves: dict
    selection: dict
    selected_counts: dict
    reps_used: int
    reps_skipped: int
    runtime_seconds: float


def _sd(arr, axis=0):
    if arr.shape[axis] < 2:
        return np.zeros_like(np.take(arr, 0, axis=axis), dtype=float)
    return np.std(arr, axis=axis, ddof=1)


def run_experiment(config: ExperimentConfig, workers: int = 1) -> McSummary:
    """Run all replications, aggregate in replication order.

    ``workers`` only splits the replication range across processes; results
    are bit-identical for any worker count.
    """
    start_time = time.perf_counter()
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    workers = min(workers, config.reps)
    if workers == 1:
        parts = [_simulate(config, 0, config.reps)]
    else:
        bounds = np.linspace(0, config.reps, workers + 1).astype(int)
        jobs = [
            (config, int(bounds[i]), int(bounds[i + 1]))
            for i in range(workers)
            if bounds[i] < bounds[i + 1]
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_simulate_star, jobs))

    def concat(key, method):
        pieces = [p["methods"][method][key] for p in parts]
        return np.concatenate(pieces, axis=0)

    reps_used = int(sum(np.count_nonzero(p["valid"]) for p in parts))
    reps_skipped = config.reps - reps_used
    if reps_used == 0:
        raise ValueError("every replication was skipped (degenerate variance)")

    curves = {}
    selection = {}
    selected_counts = {}
    for method in config.methods:
        selected = concat("selected", method)
        loss_sel = concat("loss_at_selected", method)
        selection[method] = {
            "mean_selected_k": float(np.mean(selected)),
            "sd_selected_k": float(_sd(selected.astype(float))),
            "mean_loss_at_selected": float(np.mean(loss_sel)),
            "sd_loss_at_selected": float(_sd(loss_sel)),
        }
        selected_counts[method] = np.bincount(
            np.minimum(selected, config.kmax), minlength=config.kmax + 1
        )
        if method != "universal":
            criterion = concat("criterion", method)
            loss = concat("loss", method)
            curves[method] = {
                "mean_criterion": np.mean(criterion, axis=0),
                "sd_criterion": _sd(criterion),
                "mean_loss": np.mean(loss, axis=0),
                "sd_loss": _sd(loss),
            }
    return McSummary(
        config=config,
        k=np.arange(config.kmax + 1),
        curves=curves,
        selection=selection,
        selected_counts=selected_counts,
        reps_used=reps_used,
        reps_skipped=reps_skipped,
        runtime_seconds=time.perf_counter() - start_time,
    )


def risk_curve(config: ExperimentConfig, method: str, workers: int = 1) -> np.ndarray:
    """Per-k table (k, mean criterion, mean loss) for one path method."""
    if method not in PATH_METHODS:
        raise ValueError(f"risk curves exist only for path methods, got {method!r}")
    summary = run_experiment(replace(config, methods=(method,)), workers=workers)
    curve = summary.curves[method]
    return np.column_stack(
        [summary.k.astype(float), curve["mean_criterion"], curve["mean_loss"]]
    )


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def write_curves_csv(summary: McSummary, path) -> None:
    """Per-k aggregates: (method, k, mean_criterion, sd_criterion,
    mean_loss, sd_loss), path methods only."""
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(CURVES_HEADER)
        for method in summary.config.methods:
            if method not in summary.curves:
                continue
            curve = summary.curves[method]
            for i, k in enumerate(summary.k):
                writer.writerow(
                    [
                        method,
                        int(k),
                        _fmt(curve["mean_criterion"][i]),
                        _fmt(curve["sd_criterion"][i]),
                        _fmt(curve["mean_loss"][i]),
                        _fmt(curve["sd_loss"][i]),
                    ]
                )


def write_selection_csv(summary: McSummary, path) -> None:
    """Selected-model summaries: (method, mean_selected_k, sd_selected_k,
    mean_loss_at_selected, sd_loss_at_selected, reps, seed)."""
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(SELECTION_HEADER)
        for method in summary.config.methods:
            sel = summary.selection[method]
            writer.writerow(
                [
                    method,
                    _fmt(sel["mean_selected_k"]),
                    _fmt(sel["sd_selected_k"]),
                    _fmt(sel["mean_loss_at_selected"]),
                    _fmt(sel["sd_loss_at_selected"]),
                    summary.reps_used,
                    summary.config.base_seed,
                ]
            )


def config_json(config: ExperimentConfig) -> str:
    """Deterministic JSON echo of a full experiment configuration."""
    payload = asdict(config)
    payload["transform"] = config.transform
    return json.dumps(payload, sort_keys=True, indent=2)


# ---------------------------------------------------------------------------
# Verification checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    details: dict


@dataclass(frozen=True)
class VerificationReport:
    seed: int
    df_convention: str
    results: tuple[CheckResult, ...]

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_json(self) -> str:
        payload = {
            "seed": self.seed,
            "df_convention": self.df_convention,
            "all_passed": self.all_passed,
            "checks": [asdict(r) for r in self.results],
        }
        return json.dumps(payload, sort_keys=True, indent=2)


def _noise_rows(zeta: np.ndarray, sigma: float, reps: int, base_seed: int):
    """Rows zeta + sigma*N(0, I); row r is seeded with base_seed + r."""
    n = zeta.shape[0]
    rows = np.empty((reps, n))
    for r in range(reps):
        rows[r] = sigma * np.random.default_rng(base_seed + r).standard_normal(n)
    rows += zeta
    return rows


def check_trig_orthogonality(ns=(4, 100, 500), tol: float = 1e-9) -> CheckResult:
    defects = {int(n): float(orthonormality_defect(trig_design_matrix(n))) for n in ns}
    return CheckResult(
        name="trig-orthogonality",
        passed=all(d <= tol for d in defects.values()),
        details={"tolerance": tol, "max_defect_by_n": defects},
    )


def check_filter_identities(tol: float = 1e-12) -> CheckResult:
    filt = wavelet.daubechies8()
    h = filt.taps
    sum_err = abs(float(np.sum(h)) - np.sqrt(2.0))
    shift_errs = [abs(float(h @ h) - 1.0)]
    for m in range(1, h.size // 2):
        shift_errs.append(abs(float(h[: -2 * m] @ h[2 * m :])))
    cross = max(
        abs(float(filt.highpass[: h.size - 2 * m] @ h[2 * m :]))
        for m in range(0, h.size // 2)
    )
    worst = max([sum_err] + shift_errs + [cross])
    return CheckResult(
        name="wavelet-filter-identities",
        passed=worst <= tol,
        details={
            "tolerance": tol,
            "sum_error": sum_err,
            "max_shift_orthogonality_error": max(shift_errs),
            "max_cross_correlation": cross,
        },
    )


def check_dwt_exactness(
    seed: int = 0, n: int = 1024, n_signals: int = 100, level: int = 2
) -> CheckResult:
    filt = wavelet.daubechies8()
    rng = np.random.default_rng(seed)
    worst_roundtrip = 0.0
    worst_parseval = 0.0
    for _ in range(n_signals):
        y = rng.standard_normal(n)
        w = wavelet.dwt_decompose(y, filt, level)
        back = wavelet.dwt_reconstruct(w, filt)
        worst_roundtrip = max(worst_roundtrip, float(np.max(np.abs(back - y))))
        energy = float(np.sum(wavelet.flatten(w) ** 2))
        worst_parseval = max(
            worst_parseval, abs(energy - float(y @ y)) / float(y @ y)
        )
    return CheckResult(
        name="dwt-roundtrip-parseval",
        passed=worst_roundtrip <= 1e-10 and worst_parseval <= 1e-9,
        details={
            "n": n,
            "signals": n_signals,
            "max_roundtrip_error": worst_roundtrip,
            "max_parseval_relative_error": worst_parseval,
            "roundtrip_tolerance": 1e-10,
            "parseval_tolerance": 1e-9,
        },
    )


def check_stein_identity(
    seed: int = 0,
    n: int = 32,
    k: int = 5,
    reps: int = 100_000,
    variant: str = "adaptive",
) -> CheckResult:
    zeta = signals.trig_coefficients(n)
    report = risk.stein_identity_check(
        n, k, zeta, 1.0, reps, variant=variant, base_seed=seed
    )
    return CheckResult(
        name=f"stein-identity-{variant}",
        passed=report.passed,
        details={
            "n": n,
            "k": k,
            "reps": reps,
            "lhs_mean": report.lhs_mean,
            "lhs_se": report.lhs_se,
            "rhs_mean": report.rhs_mean,
            "rhs_se": report.rhs_se,
            "diff_mean": report.diff_mean,
            "diff_se": report.diff_se,
        },
    )


def check_sure_unbiasedness(
    seed: int = 0,
    variant: str = "lst",
    n: int = 64,
    ks=tuple(range(1, 13)),
    reps: int = 10_000,
    sigma2: float = 1.0,
    df_convention: str = "k",
    fixed_alpha: float | None = None,
) -> CheckResult:
    """Mean criterion vs mean realized loss, per k, within 3 paired SEs.

    ``variant`` is "lst", "adaptive" or "ssp-fixed" (the latter scales by the
    data-independent ``fixed_alpha``, for which the criterion is exactly
    unbiased)."""
    ks = tuple(int(k) for k in ks)
    kmax = max(ks)
    zeta = signals.trig_coefficients(n)
    rows = _noise_rows(zeta, np.sqrt(sigma2), reps, seed)
    if variant == "ssp-fixed":
        if fixed_alpha is None:
            raise ValueError("ssp-fixed needs fixed_alpha")
        tables = path_tables(
            rows,
            zeta,
            kmax,
            sigma2,
            df_convention=df_convention,
            methods=("ssp",),
            ssp_fixed_alpha=fixed_alpha,
        )["ssp"]
    elif variant in ("lst", "adaptive"):
        method = "lst" if variant == "lst" else "adaptive"
        tables = path_tables(
            rows, zeta, kmax, sigma2, df_convention=df_convention, methods=(method,)
        )[method]
    else:
        raise ValueError(f"unknown variant: {variant!r}")
    diff = tables["criterion"] - tables["loss"]
    diff_mean = np.mean(diff, axis=0)
    diff_se = np.std(diff, axis=0, ddof=1) / np.sqrt(reps)
    per_k = {}
    for k in ks:
        per_k[k] = {
            "diff_mean": float(diff_mean[k]),
            "diff_se": float(diff_se[k]),
            "passed": bool(abs(diff_mean[k]) <= 3.0 * diff_se[k]),
        }
    return CheckResult(
        name=f"sure-unbiasedness-{variant}",
        passed=all(v["passed"] for v in per_k.values()),
        details={
            "n": n,
            "reps": reps,
            "df_convention": df_convention,
            "fixed_alpha": fixed_alpha,
            "per_k": {str(k): v for k, v in per_k.items()},
        },
    )


def check_scaling_trend(
    seed: int = 0,
    ns=(2**8, 2**12, 2**16),
    reps: int = 1000,
    extra: int = 4,
) -> CheckResult:
    """Large-sample behavior of the adaptive factors at step k* + extra.

    On true components the mean deviation |alpha_j - 1| must shrink as n
    grows; on surviving pure-noise components the frequency of alpha_j < 1.9
    must shrink (their factors approach 2 from below in the limit).
    """
    true_idx = np.array([j - 1 for j in signals.TRIG_TRUE_COMPONENTS])
    betas = np.array(list(signals.TRIG_TRUE_COMPONENTS.values()))
    k = true_idx.size + extra
    mean_dev_true = []
    freq_small_noise = []
    for step, n in enumerate(ns):
        zeta = np.zeros(n)
        zeta[true_idx] = np.sqrt(n) * betas
        noise_mask = np.ones(n, dtype=bool)
        noise_mask[true_idx] = False
        devs = []
        small = 0
        total = 0
        chunk = max(1, int(2**23 // n))
        base = seed + step * reps
        for start in range(0, reps, chunk):
            stop = min(start + chunk, reps)
            rows = _noise_rows(zeta, 1.0, stop - start, base + start)
            az = np.abs(rows)
            t = np.partition(az, n - 1 - k, axis=1)[:, n - 1 - k : n - k]
            devs.append(t / az[:, true_idx])
            active_noise = (az > t) & noise_mask
            alphas = 1.0 + t / np.where(active_noise, az, 1.0)
            small += int(np.sum(active_noise & (alphas < 1.9)))
            total += int(np.sum(active_noise))
        mean_dev_true.append(float(np.mean(np.concatenate(devs))))
        freq_small_noise.append(small / total if total else 0.0)
    dev_decreasing = all(
        mean_dev_true[i + 1] < mean_dev_true[i] for i in range(len(ns) - 1)
    )
    freq_decreasing = all(
        freq_small_noise[i + 1] < freq_small_noise[i] for i in range(len(ns) - 1)
    )
    return CheckResult(
        name="scaling-trend-large-n",
        passed=dev_decreasing and freq_decreasing,
        details={
            "ns": [int(n) for n in ns],
            "reps": reps,
            "k": int(k),
            "mean_abs_alpha_minus_1_true": mean_dev_true,
            "freq_alpha_below_1p9_noise": freq_small_noise,
            "true_trend_decreasing": dev_decreasing,
            "noise_trend_decreasing": freq_decreasing,
        },
    )


def check_loss_gap_at_true_size(
    seed: int = 0, n: int = 500, reps: int = 1000, sigma2: float = 1.0
) -> CheckResult:
    """At the true component count, plain thresholding must lose to
    adaptive scaling by more than 3 paired SEs; the asymptotic gap bound
    2*sigma^2*k*log(n)/n is reported but not asserted (it holds only for
    sufficiently large n)."""
    zeta = signals.trig_coefficients(n)
    k_true = len(signals.TRIG_TRUE_COMPONENTS)
    rows = _noise_rows(zeta, np.sqrt(sigma2), reps, seed)
    tables = path_tables(
        rows, zeta, k_true, sigma2, methods=("lst", "adaptive")
    )
    gap = tables["lst"]["loss"][:, k_true] - tables["adaptive"]["loss"][:, k_true]
    gap_mean = float(np.mean(gap))
    gap_se = float(np.std(gap, ddof=1)) / np.sqrt(reps)
    bound = 2.0 * sigma2 * k_true * np.log(n) / n
    return CheckResult(
        name="loss-gap-at-true-size",
        passed=bool(gap_mean > 3.0 * gap_se),
        details={
            "n": n,
            "k": k_true,
            "reps": reps,
            "gap_mean": gap_mean,
            "gap_se": gap_se,
            "asymptotic_bound": float(bound),
            "gap_minus_bound": float(gap_mean - bound),
        },
    )


def check_true_component_recovery(
    seed: int = 0, n: int = 500, reps: int = 1000, ks=(4, 12), threshold: float = 0.99
) -> CheckResult:
    """All true components survive at steps k >= k* with high frequency."""
    zeta = signals.trig_coefficients(n)
    true_idx = np.array([j - 1 for j in signals.TRIG_TRUE_COMPONENTS])
    rows = _noise_rows(zeta, 1.0, reps, seed)
    az = np.abs(rows)
    freqs = {}
    for k in ks:
        t = np.partition(az, n - 1 - k, axis=1)[:, n - 1 - k : n - k]
        all_in = np.all(az[:, true_idx] > t, axis=1)
        freqs[int(k)] = float(np.mean(all_in))
    return CheckResult(
        name="true-component-recovery",
        passed=all(f > threshold for f in freqs.values()),
        details={"n": n, "reps": reps, "threshold": threshold, "frequency_by_k": freqs},
    )


def verify_all(
    seed: int = 0, *, df_convention: str = "k", scale: float = 1.0
) -> VerificationReport:
    """Bundle every statistical and exactness check into one report.

    ``scale`` multiplies the Monte Carlo replication counts (floored at 50)
    for quick smoke runs; the defaults match the documented full suite.
    Fixed ``seed`` gives byte-identical reports.
    """

    def reps(base):
        return max(50, int(base * scale))

    results = (
        check_trig_orthogonality(),
        check_filter_identities(),
        check_dwt_exactness(seed=seed, n_signals=max(5, int(100 * scale))),
        check_stein_identity(seed=seed + 1, reps=reps(100_000), variant="adaptive"),
        check_stein_identity(seed=seed + 2, reps=reps(100_000), variant="none"),
        check_sure_unbiasedness(
            seed=seed + 3, variant="lst", reps=reps(10_000), df_convention=df_convention
        ),
        check_sure_unbiasedness(seed=seed + 4, variant="adaptive", reps=reps(10_000)),
        check_sure_unbiasedness(
            seed=seed + 5, variant="ssp-fixed", reps=reps(10_000), fixed_alpha=1.5
        ),
        check_scaling_trend(seed=seed + 6, reps=reps(1000)),
        check_loss_gap_at_true_size(seed=seed + 7, reps=reps(1000)),
        check_true_component_recovery(seed=seed + 8, reps=reps(1000)),
    )
    return VerificationReport(
        seed=seed, df_convention=df_convention, results=results
    )
