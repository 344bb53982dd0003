"""Fourier transforms of refinable functions.

``phi_hat(xi) = prod_{j>=1} a(2^-j xi)`` is evaluated as a finite product
whose depth is picked so the neglected factors are certified to lie within
``tail_tolerance`` of one.  B-splines also have the closed form
``e^{-i m xi/2} (sin(xi/2)/(xi/2))^m`` which serves as an oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .pseudospline import MaskOrder, constants, mask_eval
from .trigpoly import TrigPoly

__all__ = [
    "TruncationError",
    "RefinableEvaluator",
    "bspline_fourier",
    "phi_hat",
    "SandwichReport",
    "verify_sandwich",
    "bound_suite",
]

DEFAULT_TAIL_TOLERANCE = 1e-12
DEFAULT_DEPTH_CAP = 64


class TruncationError(ValueError):
    """No product depth under the cap certifies the requested tail."""


def bspline_fourier(m: int, xi):
    """Closed-form transform of the B-spline of order m supported on [0, m]."""
    if m < 1:
        raise ValueError(f"B-spline order must be >= 1, got {m}")
    x = np.asarray(xi, dtype=np.float64)
    out = np.exp(-0.5j * m * x) * np.sinc(x / (2 * np.pi)) ** m
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class RefinableEvaluator:
    """Truncated-product evaluator for one mask.

    ``mask`` is either a :class:`TrigPoly` (any lowpass with ``a(0) = 1``) or
    a :class:`MaskOrder` (closed-form type-II mask).
    """

    mask: Union[TrigPoly, MaskOrder]
    tail_tolerance: float = DEFAULT_TAIL_TOLERANCE
    depth_cap: int = DEFAULT_DEPTH_CAP

    def __post_init__(self):
        if self.tail_tolerance <= 0:
            raise ValueError("tail_tolerance must be positive")
        if isinstance(self.mask, TrigPoly):
            if abs(self.mask.eval(0.0) - 1) > 1e-12:
                raise ValueError("lowpass mask must satisfy a(0) = 1")

    def tail_bound(self) -> tuple[float, float]:
        """``(C, p)`` with ``|a(x) - 1| <= C |x|^p`` for ``|x| <= pi``."""
        if isinstance(self.mask, MaskOrder):
            return constants(self.mask, J=2).C1, 2.0 * self.mask.l + 2.0
        ks, cs = self.mask.as_arrays()
        first = complex(np.sum(ks * cs))
        if abs(first) < 1e-15:
            # |e^{-ix} - 1 + ix| <= x^2 / 2
            return float(np.sum(ks.astype(float) ** 2 * np.abs(cs))) / 2, 2.0
        return float(np.sum(np.abs(ks) * np.abs(cs))), 1.0

    def depth(self, xi_max: float) -> int:
        """Smallest depth whose neglected tail sum is <= tail_tolerance."""
        C, p = self.tail_bound()
        xi_max = abs(float(xi_max))
        if xi_max == 0.0 or C == 0.0:
            return 1
        for D in range(1, self.depth_cap + 1):
            if xi_max * 2.0**-D > np.pi:
                continue
            tail = C * xi_max**p * 2.0 ** (-D * p) / (2.0**p - 1)
            if tail <= self.tail_tolerance:
                return D
        raise TruncationError(
            f"no depth <= {self.depth_cap} certifies tail {self.tail_tolerance:g} "
            f"at |xi| = {xi_max:g}"
        )

    def mask_value(self, x):
        if isinstance(self.mask, MaskOrder):
            return mask_eval(self.mask, x)
        return self.mask.eval(x)


def phi_hat(ev: RefinableEvaluator, xi, depth: int | None = None):
    """``prod_{j=1}^{D} a(2^-j xi)`` with D certified by ``ev``.

    Returns real values for :class:`MaskOrder` masks and complex values for
    :class:`TrigPoly` masks.
    """
    x = np.asarray(xi, dtype=np.float64)
    if depth is None:
        depth = ev.depth(np.max(np.abs(x)) if x.size else 0.0)
    out = None
    for j in range(1, depth + 1):
        f = ev.mask_value(x * 2.0**-j)
        out = f if out is None else out * f
    if out is None:
        out = np.ones_like(x)
    out = np.asarray(out)
    return out[()] if out.ndim == 0 else out


@dataclass
class SandwichReport:
    order: MaskOrder
    K: float
    J: int
    log_C3: float
    C4: float
    exponent: float
    lower_violation: float
    upper_violation: float
    n_lower: int
    n_upper: int

    @property
    def ok(self) -> bool:
        return self.lower_violation <= 1e-9 and self.upper_violation <= 1e-9


def verify_sandwich(order: MaskOrder, K: float = np.pi, grid: int = 4096,
                    J: int = 10, xi_max: float = 2**10 * np.pi) -> SandwichReport:
    """Check ``C4 <= |phi_hat|`` on [-K, K] and the ``C3`` decay bound on
    ``[-xi_max, xi_max]``; violations are reported as positive excesses."""
    if K > np.pi:
        raise ValueError(f"window bound K must be <= pi, got {K}")
    bc = constants(order, J=J, K=K)
    ev = RefinableEvaluator(order)

    xl = np.linspace(-K, K, grid)
    lower_gap = bc.C4 - np.abs(phi_hat(ev, xl))

    # log-dense in |xi| so every dyadic band gets samples
    xu = np.concatenate([np.linspace(-np.pi, np.pi, grid),
                         np.geomspace(np.pi, xi_max, 8 * grid)])
    xu = np.concatenate([xu, -xu])
    ph = np.abs(phi_hat(ev, xu))
    e = bc.upper_exponent
    with np.errstate(divide="ignore"):
        log_bound = np.minimum(0.0, bc.log_C3 + e * np.log(np.abs(xu)))
    upper_gap = ph - np.exp(log_bound)
    return SandwichReport(
        order=order, K=K, J=J, log_C3=bc.log_C3, C4=bc.C4, exponent=e,
        lower_violation=max(0.0, float(lower_gap.max())),
        upper_violation=max(0.0, float(upper_gap.max())),
        n_lower=xl.size, n_upper=xu.size,
    )


def bound_suite(order: MaskOrder, grid: int = 2048, K: float = np.pi, J: int = 10,
                sandwich_grid: int = 4096) -> dict[str, float]:
    """Largest excess of each explicit inequality on sampled grids.

    Keys: ``mask_origin`` (``1 - a <= C1 |x|^(2l+2)``), ``factor_growth``
    (``|L| <= 1 + C2 x^2``), ``highpass_upper`` / ``highpass_lower`` (the
    highpass sandwich, highpass taken from the expanded Laurent mask),
    ``factor_inner`` / ``factor_outer`` (``|L|`` against ``|L(2 pi/3)|``)
    and the two ``phi_hat`` bounds.  Every
    value is ``max(0, lhs - rhs)``.
    """
    from .pseudospline import distribution_factor, expanded_mask
    from .trigpoly import highpass_from_lowpass

    bc = constants(order, J=J, K=K)
    x = np.linspace(-np.pi, np.pi, grid)
    ax = np.abs(x)
    out = {}
    out["mask_origin"] = float(np.max(1 - mask_eval(order, x) - bc.C1 * ax ** (2 * order.l + 2)))
    L = distribution_factor(order, x)
    out["factor_growth"] = float(np.max(L - (1 + bc.C2 * x**2)))

    b = np.abs(highpass_from_lowpass(expanded_mask(order)).eval(x))
    out["highpass_upper"] = float(np.max(b - np.minimum(1.0, bc.Cb * ax ** (2 * order.N))))
    # lower half: |b(alpha)| <= |b(xi)| whenever alpha <= |xi| <= pi
    v = b[np.argsort(ax, kind="stable")]
    lower = v - np.minimum.accumulate(v[::-1])[::-1]
    out["highpass_lower"] = float(np.max(lower))

    L0 = float(distribution_factor(order, 2 * np.pi / 3))
    inner = ax <= 2 * np.pi / 3
    out["factor_inner"] = float(np.max(L[inner] - L0))
    outer = ~inner
    prod = L[outer] * distribution_factor(order, 2 * x[outer])
    out["factor_outer"] = float(np.max(prod - L0**2)) if outer.any() else 0.0

    rep = verify_sandwich(order, K=K, grid=sandwich_grid, J=J)
    out["sandwich_lower"] = rep.lower_violation
    out["sandwich_upper"] = rep.upper_violation
    return {k: max(0.0, v) for k, v in out.items()}
