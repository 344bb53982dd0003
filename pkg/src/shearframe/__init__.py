"""Shearlet frames from B-splines and type-II pseudo-splines."""

from .cartoon import DEFAULT_SPEC, CartoonSpec, curvature_check, generate
from .pseudospline import (
    BoundConstants,
    MaskOrder,
    constants,
    decay_rate,
    distribution_factor,
    expanded_mask,
    identity_residual,
    mask_eval,
    p_poly,
    table1,
)
from .refinable import (
    RefinableEvaluator,
    TruncationError,
    bound_suite,
    bspline_fourier,
    phi_hat,
    verify_sandwich,
)
from .shearlet import (
    EXAMPLE1,
    EXAMPLE2,
    ConeRegion,
    ShearSystemConfig,
    cone_frame_scan,
    decay_condition_check,
    psi_hat,
    theta,
    warp,
)
from .transform import (
    FilterBank,
    analyze,
    build_filter_bank,
    build_wavelet_bank,
    nterm_approx,
    nterm_curve,
    synthesize,
    wavelet_baseline,
)
from .trigpoly import TrigPoly, bspline_mask, highpass_from_lowpass

__version__ = "0.1.0"
