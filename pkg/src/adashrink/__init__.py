"""Sparse orthogonal-regression denoising toolkit.

Order-statistic soft-thresholding over an orthonormal coefficient domain
(trigonometric or wavelet), with three scaling variants (none, single
factor, per-component adaptive), unbiased-risk model selection and a
reproducible Monte Carlo harness.
"""

from .harness import (
    ExperimentConfig,
    McSummary,
    VerificationReport,
    path_tables,
    risk_curve,
    run_experiment,
    table1_config,
    universal_table,
    verify_all,
    wavelet_config,
)
from .orthobasis import (
    CoeffSet,
    DesignMatrix,
    coeff_set,
    forward,
    inverse,
    trig_design_matrix,
)
from .risk import (
    NoiseEstimate,
    RiskRecord,
    mad_sigma,
    residual_sigma,
    select_k,
    stein_identity_check,
    sure_as,
    sure_lst,
    sure_ssp,
)
from .shrinkage import (
    LstFit,
    ScaledFit,
    adaptive_scale,
    fixed_scale,
    hard_threshold,
    lst_fit,
    lst_path,
    soft_threshold,
    ssp_scale,
    universal_fit,
)
from .signals import (
    TargetSpec,
    add_noise,
    read_signal,
    rescale_to_snr,
    test_signal,
    trig_coefficients,
    trig_target,
    write_signal,
)
from .wavelet import (
    WaveletCoeffs,
    WaveletFilter,
    daubechies8,
    dwt_decompose,
    dwt_reconstruct,
    flatten,
    to_coeff_set,
    unflatten,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
