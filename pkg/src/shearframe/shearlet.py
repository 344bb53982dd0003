"""Cone-adapted shearlet generators and frame diagnostics in frequency.

The horizontal-cone shearlet is separable in frequency,

    psi_hat(xi) = b(xi1/2) phi_hat(xi1/2) phi_hat(xi2/2),

with ``b`` the highpass built from a lowpass mask and ``phi_hat`` a
refinable function (a B-spline or a type-II pseudo spline).  The vertical
cone uses the coordinate swap ``psi~(x1, x2) = psi(x2, x1)`` and the
low-frequency part ``phi(x) = phi(x1) phi(x2)``.

Frame diagnostics:

* :func:`theta` sums the overlap function over scales and shears.
* :func:`cone_frame_scan` estimates the ess-inf/sup of the cone sum and
  checks that warped copies of the rectangle pair ``Omega`` tile the cone.
* :func:`decay_condition_check` checks the two decay conditions used for
  sparse approximation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .pseudospline import MaskOrder, constants, highpass_modulus, mask_eval, window_constant
from .refinable import RefinableEvaluator, bspline_fourier, phi_hat
from .trigpoly import bspline_mask, highpass_from_lowpass

__all__ = [
    "ShearSystemConfig",
    "EXAMPLE1",
    "EXAMPLE2",
    "ConeRegion",
    "shear_range",
    "warp",
    "warp_inverse",
    "highpass_hat",
    "phi1_hat",
    "psi_hat",
    "psi_hat_generic",
    "psi_tilde_hat",
    "scaling_hat",
    "theta",
    "ConeScanReport",
    "CoverageError",
    "omega_cover",
    "phi_window_constant",
    "decay_exponents",
    "decay_constant",
    "psi_abs",
    "highpass_abs",
    "phi1_abs",
    "cone_frame_scan",
    "theory_lower_bound",
    "DecayConditionReport",
    "decay_condition_check",
]


@dataclass(frozen=True)
class ShearSystemConfig:
    """Generator orders plus the cone/scale/sampling parameters.

    ``kind='bspline'`` uses the closed forms with B-spline orders ``N1``
    (highpass) and ``N2`` (refinable).  ``kind='pseudo'`` uses type-II masks
    of orders ``(N1, l1)`` and ``(N2, l2)``.
    """

    kind: Literal["bspline", "pseudo"] = "bspline"
    N1: int = 6
    N2: int = 4
    l1: int = 0
    l2: int = 0
    alpha: float = math.pi / 4
    j_max: int = 20
    c: tuple[float, float] = (0.5, 0.5)
    J: int = 10

    def __post_init__(self):
        if self.kind not in ("bspline", "pseudo"):
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.N1 < 1 or self.N2 < 1:
            raise ValueError("generator orders must be positive")
        if self.kind == "pseudo":
            MaskOrder(self.N1, self.l1)
            MaskOrder(self.N2, self.l2)
        elif self.l1 or self.l2:
            raise ValueError("B-spline generators take no l parameters")
        if not 0 < self.alpha < math.pi / 2:
            raise ValueError(f"alpha must lie in (0, pi/2), got {self.alpha}")
        if self.j_max < 0:
            raise ValueError("j_max must be nonnegative")
        c1, c2 = self.c
        if not (c1 > 0 and c2 > 0 and c2 <= c1):
            raise ValueError(f"sampling needs 0 < c2 <= c1, got {self.c}")
        if self.J < 2:
            raise ValueError("J must be >= 2")

    @property
    def order1(self) -> MaskOrder:
        return MaskOrder(self.N1, self.l1)

    @property
    def order2(self) -> MaskOrder:
        return MaskOrder(self.N2, self.l2)

    def hypotheses(self) -> dict[str, bool]:
        """Which frame-theorem hypotheses the orders satisfy."""
        if self.kind == "bspline":
            return {"N1 > N2 > 3": self.N1 > self.N2 > 3}
        if self.l2 == 0:
            return {"N1 > N2 > 2 (l2 = 0)": self.N1 > self.N2 > 2}
        return {"N1 >= N2 > 2 (l2 > 0)": self.N1 >= self.N2 > 2}

    def replace(self, **kw) -> "ShearSystemConfig":
        from dataclasses import replace
        return replace(self, **kw)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "N1": self.N1, "N2": self.N2, "l1": self.l1,
                "l2": self.l2, "alpha": self.alpha, "j_max": self.j_max,
                "c": list(self.c), "J": self.J}

    @classmethod
    def from_dict(cls, d: dict) -> "ShearSystemConfig":
        d = dict(d)
        if "c" in d:
            d["c"] = tuple(d["c"])
        return cls(**d)


EXAMPLE1 = ShearSystemConfig(kind="bspline", N1=4, N2=3)
EXAMPLE2 = ShearSystemConfig(kind="bspline", N1=6, N2=4)


# -- geometry -----------------------------------------------------------------

@dataclass(frozen=True)
class ConeRegion:
    """One of the four frequency cones ``C1..C4`` or the rectangle ``R``."""

    label: Literal["C1", "C2", "C3", "C4", "R"]
    alpha: float = math.pi / 4

    def contains(self, xi1, xi2):
        x, y = np.asarray(xi1, float), np.asarray(xi2, float)
        a = self.alpha
        if self.label == "C1":
            return (x >= a) & (np.abs(y) <= np.abs(x))
        if self.label == "C3":
            return (x <= -a) & (np.abs(y) <= np.abs(x))
        if self.label == "C2":
            return (y >= a) & (np.abs(x) <= np.abs(y))
        if self.label == "C4":
            return (y <= -a) & (np.abs(x) <= np.abs(y))
        return np.maximum(np.abs(x), np.abs(y)) < a


def shear_range(j: int) -> int:
    """``ceil(2^(j/2))`` computed exactly."""
    return math.isqrt(2**j - 1) + 1


def warp(j: int, k: int, xi1, xi2):
    """``S_k^T A_{2^-j} xi = (2^-j xi1, k 2^-j xi1 + 2^{-j/2} xi2)``."""
    x = np.asarray(xi1, float) * 2.0**-j
    return x, k * x + np.asarray(xi2, float) * 2.0 ** (-j / 2)


def warp_inverse(j: int, k: int, eta1, eta2):
    e1 = np.asarray(eta1, float)
    return e1 * 2.0**j, (np.asarray(eta2, float) - k * e1) * 2.0 ** (j / 2)


# -- generators ---------------------------------------------------------------

def highpass_hat(config: ShearSystemConfig, x):
    """Highpass mask value ``b(x)``."""
    x = np.asarray(x, float)
    if config.kind == "bspline":
        return 2.0**-config.N1 * np.exp(-1j * x) * (1 - np.exp(-1j * x)) ** config.N1
    # real type-II mask: conj is a no-op
    return np.exp(-1j * x) * mask_eval(config.order1, x + np.pi)


def highpass_abs(config: ShearSystemConfig, x):
    x = np.asarray(x, float)
    if config.kind == "bspline":
        return np.abs(np.sin(x / 2)) ** config.N1
    return highpass_modulus(config.order1, x)


def phi1_hat(config: ShearSystemConfig, x):
    """One-dimensional refinable transform used by the generators."""
    if config.kind == "bspline":
        return bspline_fourier(config.N2, x)
    return phi_hat(_evaluator(config.order2), x)


def phi1_abs(config: ShearSystemConfig, x):
    if config.kind == "bspline":
        return np.abs(np.sinc(np.asarray(x, float) / (2 * np.pi))) ** config.N2
    return np.abs(phi_hat(_evaluator(config.order2), x))


_EVALUATORS: dict[MaskOrder, RefinableEvaluator] = {}


def _evaluator(order: MaskOrder) -> RefinableEvaluator:
    if order not in _EVALUATORS:
        _EVALUATORS[order] = RefinableEvaluator(order)
    return _EVALUATORS[order]


def psi_hat(config: ShearSystemConfig, xi1, xi2):
    """``psi_hat(xi) = b(xi1/2) phi_hat(xi1/2) phi_hat(xi2/2)``."""
    h1 = np.asarray(xi1, float) / 2
    h2 = np.asarray(xi2, float) / 2
    return highpass_hat(config, h1) * phi1_hat(config, h1) * phi1_hat(config, h2)


def psi_abs(config: ShearSystemConfig, xi1, xi2):
    h1 = np.asarray(xi1, float) / 2
    h2 = np.asarray(xi2, float) / 2
    return highpass_abs(config, h1) * phi1_abs(config, h1) * phi1_abs(config, h2)


def psi_hat_generic(config: ShearSystemConfig, xi1, xi2):
    """Same generator built from masks: highpass via the coefficient rule and
    refinable factors via truncated products.  Only the modulus agrees with
    :func:`psi_hat` for B-splines (the two highpass phases differ)."""
    if config.kind == "bspline":
        low1 = bspline_mask(config.N1)
        ev = RefinableEvaluator(bspline_mask(config.N2))
    else:
        from .pseudospline import expanded_mask
        low1 = expanded_mask(config.order1)
        ev = RefinableEvaluator(config.order2)
    b = highpass_from_lowpass(low1)
    h1 = np.asarray(xi1, float) / 2
    h2 = np.asarray(xi2, float) / 2
    return b.eval(h1) * phi_hat(ev, h1) * phi_hat(ev, h2)


def psi_tilde_hat(config: ShearSystemConfig, xi1, xi2):
    """Vertical-cone generator: transform of ``psi(x2, x1)``."""
    return psi_hat(config, xi2, xi1)


def scaling_hat(config: ShearSystemConfig, xi1, xi2):
    """``phi_hat(xi1) phi_hat(xi2)`` for ``phi(x) = phi(x1) phi(x2)``."""
    return phi1_hat(config, xi1) * phi1_hat(config, xi2)


# -- overlap function ------------------------------------------------------------

def _theta_cone(config, xi1, xi2, w1, w2, j_max):
    tot = np.zeros(np.broadcast(xi1, xi2).shape)
    for j in range(j_max + 1):
        K = shear_range(j)
        for k in range(-K, K + 1):
            a1, a2 = warp(j, k, xi1, xi2)
            v = psi_abs(config, a1, a2)
            if w1 is None:
                tot += v * v
            else:
                tot += v * psi_abs(config, a1 + w1, a2 + w2)
    return tot


def theta(config: ShearSystemConfig, xi, omega=(0.0, 0.0), j_max: int | None = None):
    """Overlap function ``Theta(xi, omega)`` truncated at ``j_max``.

    ``xi`` and ``omega`` are pairs of scalars or broadcastable arrays.
    """
    j_max = config.j_max if j_max is None else j_max
    x1, x2 = (np.asarray(v, float) for v in xi)
    w1, w2 = (np.asarray(v, float) for v in omega)
    diag = not (np.any(w1) or np.any(w2))
    s0 = np.abs(scaling_hat(config, x1, x2))
    s1 = np.abs(scaling_hat(config, x1 + w1, x2 + w2))
    out = s0 * s1
    if diag:
        out = out + _theta_cone(config, x1, x2, None, None, j_max)
        out = out + _theta_cone(config, x2, x1, None, None, j_max)
    else:
        out = out + _theta_cone(config, x1, x2, w1, w2, j_max)
        out = out + _theta_cone(config, x2, x1, w2, w1, j_max)
    return out[()] if np.ndim(out) == 0 else out


# -- cone frame scan -----------------------------------------------------------

def phi_window_constant(config: ShearSystemConfig, K: float) -> float:
    """Lower bound of ``|phi_hat|`` on ``[-K, K]``."""
    if config.kind == "pseudo":
        return constants(config.order2, J=config.J, K=K).C4
    m = config.N2
    # 1 - |cos(x/2)|^m <= m x^2 / 8
    return window_constant(lambda x: abs(math.cos(x / 2)) ** m, m / 8, 2.0, K)[0]


def theory_lower_bound(config: ShearSystemConfig) -> float:
    """``(|b(alpha)| C4' C4)^2`` with windows ``[-2 alpha, 2 alpha]`` and
    ``[-alpha, alpha]``."""
    a = config.alpha
    b_alpha = float(highpass_abs(config, a))
    return (b_alpha * phi_window_constant(config, 2 * a) * phi_window_constant(config, a)) ** 2


def _profile_abs(config, eta1, eta2):
    """``|psi_hat(2 eta)| = |b(eta1) phi(eta1) phi(eta2)|``; bounded below on Omega."""
    return highpass_abs(config, eta1) * phi1_abs(config, eta1) * phi1_abs(config, eta2)


@dataclass
class ConeScanReport:
    L_inf: float
    L_sup: float
    theory_lower: float
    coverage_ok: bool
    tail_bound: float
    grid: int
    octaves: float
    j_max: int
    xi1: np.ndarray = field(repr=False)
    xi2: np.ndarray = field(repr=False)
    theta0: np.ndarray = field(repr=False)

    @property
    def ok(self) -> bool:
        return self.coverage_ok and self.L_inf > 0 and self.L_inf >= self.theory_lower

    def summary(self) -> dict:
        return {"L_inf": self.L_inf, "L_sup": self.L_sup,
                "theory_lower": self.theory_lower, "coverage_ok": bool(self.coverage_ok),
                "tail_bound": self.tail_bound, "grid": self.grid,
                "octaves": self.octaves, "j_max": self.j_max}


class CoverageError(RuntimeError):
    """Some cone point is not reached by any warped copy of Omega."""


def omega_cover(config: ShearSystemConfig, xi1, xi2):
    """For each point return ``(j, k)`` with ``warp(j, k, xi)`` in Omega, or
    ``(-1, 0)`` where no pair with ``j <= j_max``, ``|k| <= ceil(2^(j/2))``
    exists.  Points with ``xi1 < 0`` use the mirror image (Omega is symmetric)."""
    a = config.alpha
    eps = 1e-12
    x1 = np.asarray(xi1, float)
    x2 = np.asarray(xi2, float)
    x1, x2 = np.broadcast_arrays(x1, x2)
    sgn = np.where(x1 < 0, -1.0, 1.0)
    x1, x2 = x1 * sgn, x2 * sgn
    jj = np.full(x1.shape, -1, dtype=np.int64)
    kk = np.zeros(x1.shape, dtype=np.int64)
    Ks = np.array([shear_range(j) for j in range(config.j_max + 1)])
    with np.errstate(divide="ignore", invalid="ignore"):
        j0 = np.floor(np.log2(x1 / a))
    j0 = np.where(np.isfinite(j0), j0, -10).astype(np.int64)
    for dj in (0, -1, 1):
        j = j0 + dj
        free = (jj < 0) & (j >= 0) & (j <= config.j_max)
        jc = np.clip(j, 0, config.j_max)
        t = x1 * 2.0**-jc
        c = x2 * 2.0 ** (-jc / 2)
        K = Ks[jc]
        with np.errstate(divide="ignore", invalid="ignore"):
            base = -np.rint(np.where(t > 0, c / t, 0.0))
        in_band = (t >= a * (1 - eps)) & (t <= 2 * a * (1 + eps))
        for dk in (0, -1, 1):
            k = np.clip(base + dk, -K, K)
            hit = free & in_band & (np.abs(k * t + c) <= a * (1 + eps))
            jj[hit] = jc[hit]
            kk[hit] = k[hit].astype(np.int64)
            free &= ~hit
    return jj, kk


def cone_frame_scan(config: ShearSystemConfig, grid: int = 512, octaves: float | None = None,
                    radius: float = 256.0, weight_floor: float = 1e-20,
                    refine: bool = False, max_grid: int = 4096) -> ConeScanReport:
    """Scan ``sum_{j,k} |psi_hat(2 S_k^T A_{2^-j} xi)|^2`` over the cone.

    The grid is log-uniform in ``xi1`` over ``[alpha, alpha 2^octaves]``
    (default ``octaves = j_max + 1``, the whole annulus the scales reach) and
    uniform in the slope ``xi2/xi1`` over [-1, 1]; the mirrored cone C3 gives
    identical values because ``|psi_hat|`` is even.  Terms whose first
    factor is below ``weight_floor`` or whose second argument exceeds
    ``radius`` are dropped, which can only lower the sum; their total is
    bounded by ``tail_bound``.
    """
    if grid < 64:
        raise ValueError("grid resolution must be >= 64 per axis")
    if octaves is None:
        octaves = float(config.j_max + 1)
    rep = _scan_once(config, grid, octaves, radius, weight_floor)
    if refine:
        while 2 * rep.grid <= max_grid:
            nxt = _scan_once(config, 2 * rep.grid, octaves, radius, weight_floor)
            done = abs(nxt.L_inf - rep.L_inf) <= 0.01 * abs(rep.L_inf)
            rep = nxt
            if done:
                break
    if not rep.coverage_ok:
        raise CoverageError(
            f"Omega copies up to j_max={config.j_max} do not cover the scanned cone")
    return rep


def _scan_once(config, grid, octaves, radius, weight_floor):
    a = config.alpha
    u = np.linspace(0.0, octaves, grid)
    s = np.linspace(-1.0, 1.0, grid)
    xi1 = a * 2.0**u
    total = np.zeros((grid, grid))
    dropped_weight = 0.0
    phi_tail = _phi_sq_tail(config, radius)
    for i, x1 in enumerate(xi1):
        x2 = s * x1
        for j in range(config.j_max + 1):
            t = x1 * 2.0**-j
            w = float(_profile_weight(config, t))
            if w < weight_floor:
                dropped_weight = max(dropped_weight, w * (2 * shear_range(j) + 1))
                continue
            K = shear_range(j)
            c = x2 * 2.0 ** (-j / 2)
            kmin = max(-K, math.floor((-radius - c.max()) / t))
            kmax = min(K, math.ceil((radius - c.min()) / t))
            if kmin > kmax:
                continue
            ks = np.arange(kmin, kmax + 1, dtype=float)
            eta2 = ks[:, None] * t + c[None, :]
            v = phi1_abs(config, eta2)
            total[i] += w * np.sum(v * v, axis=0)
    X1 = np.broadcast_to(xi1[:, None], total.shape)
    X2 = s[None, :] * xi1[:, None]
    jj, _ = omega_cover(config, X1, X2)
    return ConeScanReport(
        L_inf=float(total.min()), L_sup=float(total.max()),
        theory_lower=theory_lower_bound(config),
        coverage_ok=bool(np.all(jj >= 0)),
        tail_bound=float(dropped_weight * (config.j_max + 1) + phi_tail),
        grid=grid, octaves=octaves, j_max=config.j_max,
        xi1=np.array(X1), xi2=X2, theta0=total,
    )


def _profile_weight(config, t):
    v = highpass_abs(config, t) * phi1_abs(config, t)
    return v * v


def _phi_sq_tail(config, radius):
    """Crude bound on ``sum_{|x|>radius} |phi_hat(x)|^2`` over unit-spaced
    shears, using the envelope ``|phi_hat(x)| <= (2/|x|)^g``."""
    g = config.N2 if config.kind == "bspline" else 2 * config.N2 - math.log2(
        float(constants(config.order2, J=config.J).q2)) - 0.5
    g = max(g, 1.0)
    return 2 * (2.0 / radius) ** (2 * g) * (1 + radius / (2 * g - 1))


# -- decay conditions ------------------------------------------------------------

@dataclass
class DecayConditionReport:
    alpha_exponent: float
    gamma_exponent: float
    h_integrable: bool
    max_violation: float
    C: float = 0.0
    C_fit: float = 0.0
    C_h: float = 0.0
    h_integral: float = 0.0
    derivative_violation: float = 0.0
    n_samples: int = 0

    @property
    def sparsity_exponents_ok(self) -> bool:
        return self.alpha_exponent > 5 and self.gamma_exponent >= 4

    @property
    def passed(self) -> bool:
        return (self.sparsity_exponents_ok and self.h_integrable
                and self.max_violation <= 1e-9 and self.derivative_violation <= 1e-6)

    def failures(self) -> list[str]:
        out = []
        if not self.alpha_exponent > 5:
            out.append(f"alpha exponent {self.alpha_exponent:g} is not > 5")
        if not self.gamma_exponent >= 4:
            out.append(f"gamma exponent {self.gamma_exponent:g} is not >= 4")
        if not self.h_integrable:
            out.append("h is not integrable")
        if self.max_violation > 1e-9:
            out.append(f"decay bound violated by {self.max_violation:g}")
        if self.derivative_violation > 1e-6:
            out.append(f"derivative bound violated by {self.derivative_violation:g}")
        return out


def decay_exponents(config: ShearSystemConfig) -> tuple[float, float]:
    """``(a, g)``: vanishing-moment and decay exponents of the generator."""
    if config.kind == "bspline":
        return float(config.N1), float(config.N2)
    bc = constants(config.order2, J=config.J)
    return 2.0 * config.N1, -bc.upper_exponent


def decay_constant(config: ShearSystemConfig) -> float:
    """Analytic C with ``|psi_hat| <= C min(1,|x1|^a) min(1,|x1|^-g) min(1,|x2|^-g)``."""
    a, g = decay_exponents(config)
    if config.kind == "bspline":
        # |sin(x/4)|^N1 <= min(1, |x|^N1); |sinc(x/4)|^N2 <= 4^N2 min(1, |x|^-N2)
        return 4.0 ** (2 * g)
    bc1 = constants(config.order1, J=config.J)
    bc2 = constants(config.order2, J=config.J)
    cb = max(1.0, bc1.Cb * 2.0**-a)
    c3 = max(1.0, math.exp(bc2.log_C3) * 2.0**g)
    return cb * c3 * c3


def _decay_envelope(x1, x2, a, g):
    ax1, ax2 = np.abs(x1), np.abs(x2)
    with np.errstate(divide="ignore"):
        return (np.minimum(1.0, ax1**a) * np.minimum(1.0, ax1**-g)
                * np.minimum(1.0, ax2**-g))


def _h_reduced(config, x1, G):
    """``|b(x1/2)| |phi(x1/2)| / |sin(x1/4)|^G`` with the zero cancelled."""
    h = np.asarray(x1, float) / 2
    if config.kind == "bspline":
        bred = np.abs(np.sin(h / 2)) ** (config.N1 - G)
    else:
        bred = highpass_modulus(config.order1, h, reduce_power=G)
    return bred * phi1_abs(config, h)


def _d2_psi_fd(config, x1, x2, step):
    return (psi_hat(config, x1, x2 + step) - psi_hat(config, x1, x2 - step)) / (2 * step)


def decay_condition_check(config: ShearSystemConfig, n_samples: int = 10_000,
                          seed: int = 0, span: float = 2**8 * math.pi,
                          fd_step: float = 1e-5) -> DecayConditionReport:
    """Validate both decay conditions on random samples.

    Condition 1 uses the analytic constant of :func:`decay_constant`.  For
    condition 2 the function ``h`` is
    ``C_h |b(x1/2) phi(x1/2)| / |sin(x1/4)|^G`` with ``G = ceil(g)``; ``C_h``
    is fitted on a deterministic grid, and the bound is then checked on an
    independent random sample with central finite differences.
    """
    rng = np.random.default_rng(seed)
    a, g = decay_exponents(config)
    C = decay_constant(config)

    # mix of log-uniform and uniform magnitudes so both small and large |xi| appear
    def sample(n):
        mag = np.where(rng.random((2, n)) < 0.5,
                       np.exp(rng.uniform(math.log(1e-3), math.log(span), (2, n))),
                       rng.uniform(0, span / 16, (2, n)))
        return mag * rng.choice([-1.0, 1.0], (2, n))

    x1, x2 = sample(n_samples)
    x2[: n_samples // 100] = rng.uniform(-5, 5, n_samples // 100)
    ps = np.abs(psi_hat(config, x1, x2))
    env = _decay_envelope(x1, x2, a, g)
    max_violation = max(0.0, float(np.max(ps - C * env)))
    with np.errstate(divide="ignore", invalid="ignore"):
        C_fit = float(np.nanmax(np.where(env > 0, ps / env, 0.0)))

    G = math.ceil(g)
    if G > a:
        G = int(a)

    def rhs0(y1, y2):
        return _h_reduced(config, y1, G) * (1 + np.abs(y2) / np.abs(y1)) ** -g

    # fit C_h on a deterministic log grid
    lg = np.concatenate([-np.geomspace(1e-3, span, 400)[::-1], np.geomspace(1e-3, span, 400)])
    F1, F2 = np.meshgrid(lg, np.concatenate([lg, [0.0]]), indexing="ij")
    d_fit = np.abs(_d2_psi_fd(config, F1, F2, fd_step))
    r_fit = rhs0(F1, F2)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(r_fit > 1e-300, d_fit / r_fit, 0.0)
    C_h = 1.05 * float(np.nanmax(ratio))

    y1, y2 = sample(n_samples)
    d = np.abs(_d2_psi_fd(config, y1, y2, fd_step))
    derivative_violation = max(0.0, float(np.max(d - C_h * rhs0(y1, y2))))

    # integrability: trapezoid on a log grid plus an envelope tail estimate
    xs = np.geomspace(1e-6, span, 20001)
    hv = C_h * _h_reduced(config, xs, G)
    integral = 2 * float(np.trapezoid(hv, xs))
    tail = 2 * float(hv[-1]) * span / (g - 1) if g > 1 else math.inf
    h_integrable = g > 1 and math.isfinite(integral + tail)

    return DecayConditionReport(
        alpha_exponent=a, gamma_exponent=g, h_integrable=h_integrable,
        max_violation=max_violation, C=C, C_fit=C_fit, C_h=C_h,
        h_integral=integral + tail, derivative_violation=derivative_violation,
        n_samples=n_samples,
    )
