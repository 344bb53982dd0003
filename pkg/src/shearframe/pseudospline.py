"""Pseudo-spline masks of type II and their explicit bound constants.

For an order ``(N, l)`` with ``0 <= l < N`` the type-II mask is

    a(xi) = cos^{2N}(xi/2) * P_{N,l}(sin^2(xi/2)),
    P_{N,l}(x) = sum_{j=0}^{l} C(N-1+j, j) x^j.

``l = 0`` gives the centred B-spline of order 2N, ``l = N-1`` the
interpolatory refinable function.  Everything here is closed form; the
truncated infinite products live in :mod:`shearframe.refinable`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .trigpoly import TrigPoly

__all__ = [
    "MaskOrder",
    "BoundConstants",
    "p_poly",
    "mask_eval",
    "identity_residual",
    "distribution_factor",
    "expanded_mask",
    "highpass_modulus",
    "constants",
    "decay_rate",
    "table1",
    "window_constant",
]

MAX_ORDER = 32


@dataclass(frozen=True)
class MaskOrder:
    N: int
    l: int = 0

    def __post_init__(self):
        if self.N < 1:
            raise ValueError(f"N must be positive, got {self.N}")
        if not 0 <= self.l < self.N:
            raise ValueError(f"need 0 <= l < N, got (N, l) = ({self.N}, {self.l})")
        if self.N > MAX_ORDER:
            raise ValueError(f"N = {self.N} exceeds the supported maximum {MAX_ORDER}")

    def __str__(self):
        return f"({self.N},{self.l})"


@dataclass(frozen=True)
class BoundConstants:
    """Explicit constants attached to one pseudo-spline order.

    ``C1``/``C2`` bound the mask near the origin and the distribution
    factor, ``Cb`` the highpass, ``C3`` the Fourier decay (for block length
    ``J``) and ``C4`` the lower bound of ``|phi_hat|`` on ``[-K, K]``.
    """

    N: int
    C1: float
    C2: float
    Cb: float
    q1: float
    q2: float
    kappa: float
    beta: float
    J: int
    log_C3: float
    C4: float
    k0: int
    K: float

    @property
    def upper_exponent(self) -> float:
        """Exponent ``e`` in ``|phi_hat(xi)| <= C3 |xi|^e``."""
        return -2 * self.N + math.log2(self.q1) / (self.J - 1) + math.log2(self.q2)

    @property
    def C3(self) -> float:
        """``4^N exp(C2/3) q1 q2^(J-1)``; ``inf`` when it exceeds double range."""
        return math.exp(self.log_C3) if self.log_C3 < 709.0 else math.inf


def _coeff_row(order: MaskOrder) -> list[int]:
    return [comb(order.N - 1 + j, j) for j in range(order.l + 1)]


def p_poly(order: MaskOrder, x):
    """``P_{N,l}(x)`` for ``x`` in [0, 1] (scalar or array)."""
    xa = np.asarray(x, dtype=np.float64)
    if np.any(xa < 0) or np.any(xa > 1):
        raise ValueError("p_poly is defined for 0 <= x <= 1")
    out = np.zeros_like(xa)
    for c in reversed(_coeff_row(order)):
        out = out * xa + c
    return out[()] if out.ndim == 0 else out


def _p_unchecked(order: MaskOrder, x):
    out = np.zeros_like(x)
    for c in reversed(_coeff_row(order)):
        out = out * x + c
    return out


def mask_eval(order: MaskOrder, xi):
    """Type-II mask ``cos^{2N}(xi/2) P_{N,l}(sin^2(xi/2))``."""
    x = np.asarray(xi, dtype=np.float64)
    s = np.sin(x / 2) ** 2
    c = np.cos(x / 2) ** 2
    out = c**order.N * _p_unchecked(order, s)
    return out[()] if out.ndim == 0 else out


def highpass_modulus(order: MaskOrder, xi, reduce_power: float = 0.0):
    """``|b(xi)| = |a(xi + pi)| = sin^{2N}(xi/2) P(cos^2(xi/2))``.

    With ``reduce_power = G`` returns ``|b(xi)| / |sin(xi/2)|^G`` with the
    removable zero cancelled (``G <= 2N``).
    """
    x = np.asarray(xi, dtype=np.float64)
    s = np.sin(x / 2) ** 2
    c = np.cos(x / 2) ** 2
    out = s ** (order.N - reduce_power / 2) * _p_unchecked(order, c)
    return out[()] if out.ndim == 0 else out


def identity_residual(order: MaskOrder, xi):
    """|LHS - RHS| of the truncated binomial identity

    ``sum_{j<=l} C(N-1+j, j) s^j = sum_{j<=l} C(N+l, j) s^j c^{l-j}``
    with ``s = sin^2(xi/2)``, ``c = cos^2(xi/2)``.

    Both sides reach ~2e4 for N = 9, so float64 rounding alone is a few
    1e-12; the sums are formed in ``longdouble`` (80-bit on x86).
    """
    x = np.asarray(xi, dtype=np.longdouble)
    s = np.sin(x / 2) ** 2
    c = np.cos(x / 2) ** 2
    N, l = order.N, order.l
    lhs = np.zeros_like(x)
    rhs = np.zeros_like(x)
    for j in range(l + 1):
        lhs = lhs + np.longdouble(comb(N - 1 + j, j)) * s**j
        rhs = rhs + np.longdouble(comb(N + l, j)) * s**j * c ** (l - j)
    out = np.abs(lhs - rhs).astype(np.float64)
    return out[()] if out.ndim == 0 else out


def distribution_factor(order: MaskOrder, xi):
    """``|L(xi)| = P_{N,l}(sin^2(xi/2))``, the non-B-spline part of the mask."""
    x = np.asarray(xi, dtype=np.float64)
    out = _p_unchecked(order, np.sin(x / 2) ** 2)
    return out[()] if out.ndim == 0 else out


def expanded_mask(order: MaskOrder) -> TrigPoly:
    """The type-II mask as an exact Laurent polynomial.

    Uses ``cos^2(xi/2) = (2 + e^{i xi} + e^{-i xi})/4`` and
    ``sin^2(xi/2) = (2 - e^{i xi} - e^{-i xi})/4``.
    """
    q = Fraction(1, 4)
    cos2 = TrigPoly({-1: q, 0: 2 * q, 1: q})
    sin2 = TrigPoly({-1: -q, 0: 2 * q, 1: -q})
    tail = TrigPoly({})
    s_pow = TrigPoly({0: 1})
    for j, cj in enumerate(_coeff_row(order)):
        if j:
            s_pow = s_pow * sin2
        tail = tail + s_pow * cj
    return cos2**order.N * tail


def window_constant(mask_abs, C1: float, p: float, K: float) -> tuple[float, int]:
    """Lower bound of ``|phi_hat|`` on ``[-K, K]`` for a refinable function.

    ``mask_abs`` is ``|a|`` (nonincreasing on [0, pi]) and ``1 - |a(x)| <=
    C1 |x|^p`` near the origin.  Returns ``(C4, k0)`` with k0 the smallest
    positive integer such that ``2^-k0 C1 K^p < 1/2``.
    """
    if not 0 < K <= math.pi:
        raise ValueError(f"window bound K must lie in (0, pi], got {K}")
    k0 = 1
    while 2.0**-k0 * C1 * K**p >= 0.5:
        k0 += 1
    head = 1.0
    for k in range(1, k0 + 1):
        head *= float(mask_abs(2.0**-k * K))
    return head * math.exp(-C1 * 2.0 ** (-k0 + 1) * K**p), k0


def constants(order: MaskOrder, J: int = 10, K: float = math.pi) -> BoundConstants:
    """All explicit constants for ``order``; ``K`` is the lower-bound window."""
    if J < 2:
        raise ValueError("block length J must be >= 2")
    if K > math.pi:
        raise ValueError(f"window bound K must be <= pi, got {K}")
    N, l = order.N, order.l
    C1 = sum(comb(N + l, j) for j in range(l + 1, N + l + 1)) / 2 ** (2 * l + 2)
    C2 = sum(comb(N - 1 + j, j) for j in range(1, l + 1)) / 4
    Cb = sum(comb(N + l, j) for j in range(l + 1)) / 2 ** (2 * N)
    q1 = float(sum(_coeff_row(order)))
    q2 = float(p_poly(order, 0.75))
    kappa = math.log2(q2)
    # exp(C2/3) alone overflows for orders like (9, 8)
    log_C3 = N * math.log(4.0) + C2 / 3 + math.log(q1) + (J - 1) * math.log(q2)
    C4, k0 = window_constant(lambda x: mask_eval(order, x), C1, 2 * l + 2, K)
    return BoundConstants(
        N=N, C1=C1, C2=C2, Cb=Cb, q1=q1, q2=q2, kappa=kappa, beta=2 * N - kappa,
        J=J, log_C3=log_C3, C4=C4, k0=k0, K=K,
    )


def decay_rate(order: MaskOrder) -> float:
    """``beta_{N,l} = 2N - log2 P_{N,l}(3/4)``."""
    return 2 * order.N - math.log2(float(p_poly(order, 0.75)))


def table1(n_min: int = 2, n_max: int = 9) -> list[tuple[int, int, float]]:
    """Rows ``(N, l, beta)`` for ``n_min <= N <= n_max`` and ``0 <= l < N``."""
    return [(N, l, decay_rate(MaskOrder(N, l)))
            for N in range(n_min, n_max + 1) for l in range(N)]
