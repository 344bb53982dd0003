"""Digital shearlet transform on the DFT grid.

Each channel is a Fourier multiplier ``H_i``.  The undecimated coefficients
are ``c_i = ifft2(f_hat * conj(H_i))``; the frame operator is the pointwise
multiplier ``gamma = sum_i |H_i|^2`` and the canonical dual synthesis is

    f_hat = sum_i fft2(c_i) H_i / gamma.

Continuous frequencies are ``xi = 2^j_max * omega`` with ``omega`` the DFT
frequency in ``[-pi, pi)``, so ``gamma`` on the grid is the overlap function
``Theta(xi, 0)`` truncated at ``j_max``.

N-term approximation counts atoms of the *sampled* system: channel ``i`` is
translated only over the lattice ``W_i^T diag(c1, c2) Z^2`` (``W_i`` the
channel's frequency warp), snapped to the pixel grid.  Atoms are normalised
to unit energy and the canonical dual of the sampled frame is applied by
preconditioned conjugate gradients.  Counting every pixel translate of every
channel instead (``sampled=False``) is also available.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .shearlet import (
    ShearSystemConfig,
    highpass_hat,
    phi1_hat,
    shear_range,
)

__all__ = [
    "NearSingularFrameError",
    "Channel",
    "FilterBank",
    "CoefficientStack",
    "SampledFrame",
    "build_filter_bank",
    "build_wavelet_bank",
    "filter_count",
    "analyze",
    "synthesize",
    "sampled_frame",
    "lattice_steps",
    "lattice_mask",
    "sampled_coefficients",
    "dual_reconstruct",
    "nterm_approx",
    "nterm_curve",
    "wavelet_baseline",
    "select_largest",
    "default_j_max",
]

GAMMA_FLOOR = 1e-6
CG_TOL = 1e-8
CG_MAXIT = 200


class NearSingularFrameError(ValueError):
    """The frame operator is (nearly) singular."""


@dataclass(frozen=True)
class Channel:
    cone: str  # "phi", "h", "v", or wavelet tags "wh", "wv", "wd"
    j: int
    k: int

    def to_dict(self) -> dict:
        return {"cone": self.cone, "j": self.j, "k": self.k}


@dataclass
class FilterBank:
    M: int
    j_max: int
    freq_scale: float
    channels: list[Channel]
    filters: np.ndarray = field(repr=False)  # (C, M, M) complex, fft order
    gamma: np.ndarray = field(repr=False)  # (M, M) real
    c: tuple[float, float] = (0.5, 0.5)

    @property
    def n_channels(self) -> int:
        return len(self.channels)

    @property
    def scaling_filter(self) -> np.ndarray:
        return self.filters[0]

    @property
    def frame_bounds(self) -> tuple[float, float]:
        return float(self.gamma.min()), float(self.gamma.max())


@dataclass
class CoefficientStack:
    channels: list[Channel]
    coeffs: np.ndarray = field(repr=False)  # (C, M, M) complex

    @property
    def size(self) -> int:
        return self.coeffs.size

    def energy(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))


def default_j_max(M: int) -> int:
    return max(0, int(math.log2(M)) - 3)


def filter_count(j_max: int) -> int:
    return 2 * sum(2 * shear_range(j) + 1 for j in range(j_max + 1)) + 1


def _check_size(M: int, j_max: int):
    if M < 64 or M & (M - 1):
        raise ValueError(f"image size must be a power of two >= 64, got {M}")
    if j_max < 0 or j_max > int(math.log2(M)) - 2:
        raise ValueError(f"j_max must lie in [0, log2(M) - 2] = [0, {int(math.log2(M)) - 2}]")


def _freq_axis(M: int, scale: float) -> np.ndarray:
    return scale * 2 * np.pi * np.fft.fftfreq(M)


def _assemble(M, j_max, scale, channels, filters, c) -> FilterBank:
    gamma = np.zeros((M, M))
    for H in filters:
        gamma += H.real**2 + H.imag**2
    gmin, gmax = gamma.min(), gamma.max()
    if not gmin >= GAMMA_FLOOR * gmax:
        raise NearSingularFrameError(
            f"min(gamma) = {gmin:.3g} is below {GAMMA_FLOOR:g} * max(gamma) = {gmax:.3g}")
    return FilterBank(M=M, j_max=j_max, freq_scale=scale, channels=channels,
                      filters=filters, gamma=gamma, c=tuple(c))


def build_filter_bank(config: ShearSystemConfig, M: int, j_max: int | None = None) -> FilterBank:
    """Sample the scaling function and all warped shearlets on the DFT grid.

    ``j_max`` defaults to ``min(config.j_max, log2(M) - 3)``.  Channel 0 is
    the scaling function; then horizontal-cone channels ``(h, j, k)`` and
    vertical-cone channels ``(v, j, k)`` for ``|k| <= ceil(2^(j/2))``.
    """
    if j_max is None:
        j_max = min(config.j_max, default_j_max(M))
    _check_size(M, j_max)
    scale = 2.0**j_max
    w = _freq_axis(M, scale)
    # axis 0 = rows = xi2, axis 1 = columns = xi1
    X1 = w[None, :]
    X2 = w[:, None]
    channels = [Channel("phi", -1, 0)]
    filters = np.empty((filter_count(j_max), M, M), dtype=np.complex128)
    filters[0] = phi1_hat(config, X2) * phi1_hat(config, X1)

    idx = 1
    for cone in ("h", "v"):
        for j in range(j_max + 1):
            # psi_hat(warp(j, k, xi)) = [b phi](2^-j xi1 / 2) * phi(eta2)
            t = w * 2.0**-j / 2
            first = highpass_hat(config, t) * phi1_hat(config, t)
            for k in range(-shear_range(j), shear_range(j) + 1):
                eta2 = (k * X1 * 2.0**-j + X2 * 2.0 ** (-j / 2)) / 2
                H = first[None, :] * phi1_hat(config, eta2)
                # the vertical cone swaps the two frequency axes
                filters[idx] = H if cone == "h" else H.T
                channels.append(Channel(cone, j, k))
                idx += 1
    return _assemble(M, j_max, scale, channels, filters, config.c)


def build_wavelet_bank(config: ShearSystemConfig, M: int, j_max: int | None = None) -> FilterBank:
    """Separable tensor wavelet bank on the same grid and scales.

    Per scale ``j`` the three channels are ``b phi (x) phi``, ``phi (x) b phi``
    and ``b phi (x) b phi`` evaluated at ``2^-j xi / 2``.
    """
    if j_max is None:
        j_max = min(config.j_max, default_j_max(M))
    _check_size(M, j_max)
    scale = 2.0**j_max
    w = _freq_axis(M, scale)
    channels = [Channel("phi", -1, 0)]
    filters = [phi1_hat(config, w)[:, None] * phi1_hat(config, w)[None, :]]
    for j in range(j_max + 1):
        t = w * 2.0**-j / 2
        lo = phi1_hat(config, t)
        hi = highpass_hat(config, t) * lo
        filters.append(lo[:, None] * hi[None, :])
        channels.append(Channel("wh", j, 0))
        filters.append(hi[:, None] * lo[None, :])
        channels.append(Channel("wv", j, 0))
        filters.append(hi[:, None] * hi[None, :])
        channels.append(Channel("wd", j, 0))
    return _assemble(M, j_max, scale, channels, np.stack(filters), config.c)


def _as_image(M: int, img) -> np.ndarray:
    f = np.asarray(img, dtype=np.float64)
    if f.shape != (M, M):
        raise ValueError(f"image shape {f.shape} does not match filter bank size {M}")
    if not np.all(np.isfinite(f)):
        raise ValueError("image contains non-finite values")
    return f


def analyze(fb: FilterBank, img) -> CoefficientStack:
    """Undecimated analysis ``c_i = ifft2(f_hat conj(H_i))``."""
    F = np.fft.fft2(_as_image(fb.M, img))
    out = np.empty(fb.filters.shape, dtype=np.complex128)
    for i, H in enumerate(fb.filters):
        out[i] = np.fft.ifft2(F * np.conj(H))
    return CoefficientStack(list(fb.channels), out)


def synthesize(fb: FilterBank, stack: CoefficientStack, keep=None) -> np.ndarray:
    """Canonical-dual synthesis; ``keep`` optionally masks coefficients."""
    if stack.coeffs.shape != fb.filters.shape:
        raise ValueError("coefficient stack was not produced by this filter bank")
    acc = np.zeros((fb.M, fb.M), dtype=np.complex128)
    for i, H in enumerate(fb.filters):
        c = stack.coeffs[i]
        if keep is not None:
            m = keep[i]
            if not m.any():
                continue
            c = np.where(m, c, 0)
        acc += np.fft.fft2(c) * H
    return np.fft.ifft2(acc / fb.gamma).real


# -- sampled system ------------------------------------------------------------

def _pow2_floor(s: float) -> int:
    return 1 if s < 1 else 2 ** int(math.floor(math.log2(s) + 1e-12))


def lattice_steps(ch: Channel, j_max: int, c) -> tuple[int, int, int]:
    """Pixel lattice ``(t1, t2, shift)`` of one channel in its own frame.

    Points are ``(t1 n1 + shift n2, t2 n2)`` (column, row); vertical-cone
    channels use the transposed lattice.  Continuous steps are
    ``2^(j_max - j) c1``, ``2^(j_max - j/2) c2`` with shear offset
    ``k 2^(j_max - j) c2``; steps are rounded down to powers of two.
    """
    c1, c2 = c
    lam = 2.0**j_max
    if ch.cone == "phi":
        s1, s2, sh = lam * c1, lam * c2, 0.0
    elif ch.cone in ("h", "v"):
        s1 = 2.0 ** (j_max - ch.j) * c1
        s2 = 2.0 ** (j_max - ch.j / 2) * c2
        sh = ch.k * 2.0 ** (j_max - ch.j) * c2
    else:
        s1, s2, sh = 2.0 ** (j_max - ch.j) * c1, 2.0 ** (j_max - ch.j) * c2, 0.0
    t1, t2 = _pow2_floor(s1), _pow2_floor(s2)
    return t1, t2, int(round(sh)) % t1


def lattice_mask(ch: Channel, M: int, j_max: int, c) -> np.ndarray:
    t1, t2, sh = lattice_steps(ch, j_max, c)
    p2, p1 = np.mgrid[0:M, 0:M]
    m = (p2 % t2 == 0) & ((p1 - sh * (p2 // t2)) % t1 == 0)
    return m.T if ch.cone == "v" else m


@dataclass
class SampledFrame:
    """Lattice-sampled, unit-norm version of a filter bank."""

    bank: FilterBank
    masks: np.ndarray = field(repr=False)  # (C, M, M) bool
    norms: np.ndarray = field(repr=False)  # (C,) pixel-energy of each atom
    precond: np.ndarray = field(repr=False)  # (M, M) multiplier ~ frame operator

    @property
    def n_coefficients(self) -> int:
        return int(self.masks.sum())

    def apply_frame_operator(self, x: np.ndarray) -> np.ndarray:
        X = np.fft.fft2(x)
        acc = np.zeros_like(X)
        for i, H in enumerate(self.bank.filters):
            g = H / self.norms[i]
            d = np.fft.ifft2(X * np.conj(g)) * self.masks[i]
            acc += np.fft.fft2(d) * g
        return np.fft.ifft2(acc)

    def synthesis(self, coeffs: np.ndarray) -> np.ndarray:
        """``sum_lambda d_lambda g_lambda`` over the lattice coefficients."""
        acc = np.zeros((self.bank.M, self.bank.M), dtype=np.complex128)
        for i, H in enumerate(self.bank.filters):
            m = self.masks[i] & (coeffs[i] != 0)
            if m.any():
                acc += np.fft.fft2(np.where(m, coeffs[i], 0)) * (H / self.norms[i])
        return np.fft.ifft2(acc)


def sampled_frame(fb: FilterBank, c=None) -> SampledFrame:
    c = fb.c if c is None else tuple(c)
    if not (c[0] > 0 and c[1] > 0):
        raise ValueError("sampling constants must be positive")
    masks = np.stack([lattice_mask(ch, fb.M, fb.j_max, c) for ch in fb.channels])
    norms = np.sqrt(np.mean(fb.filters.real**2 + fb.filters.imag**2, axis=(1, 2)))
    pre = np.zeros((fb.M, fb.M))
    for i, H in enumerate(fb.filters):
        t1, t2, _ = lattice_steps(fb.channels[i], fb.j_max, c)
        pre += (H.real**2 + H.imag**2) / (norms[i] ** 2 * t1 * t2)
    return SampledFrame(bank=fb, masks=masks, norms=norms, precond=pre)


def sampled_coefficients(sf: SampledFrame, stack: CoefficientStack) -> np.ndarray:
    """Unit-norm lattice coefficients (zero off the lattice)."""
    return stack.coeffs / sf.norms[:, None, None] * sf.masks


def dual_reconstruct(sf: SampledFrame, rhs: np.ndarray, x0=None,
                     tol: float = CG_TOL, maxit: int = CG_MAXIT) -> np.ndarray:
    """Solve ``S x = rhs`` by conjugate gradients preconditioned with the
    multiplier that ``S`` reduces to when aliasing is ignored."""
    def prec(r):
        return np.fft.ifft2(np.fft.fft2(r) / sf.precond)

    nb = np.linalg.norm(rhs)
    if nb == 0:
        return np.zeros_like(rhs)
    x = prec(rhs) if x0 is None else np.asarray(x0, dtype=np.complex128)
    r = rhs - sf.apply_frame_operator(x)
    z = prec(r)
    p = z.copy()
    rz = np.vdot(r, z)
    for _ in range(maxit):
        if np.linalg.norm(r) <= tol * nb:
            return x
        Ap = sf.apply_frame_operator(p)
        a = rz / np.vdot(p, Ap)
        x = x + a * p
        r = r - a * Ap
        z = prec(r)
        rz_new = np.vdot(r, z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    if np.linalg.norm(r) <= tol * nb:
        return x
    raise NearSingularFrameError(
        f"sampled frame operator did not converge in {maxit} iterations; "
        f"the sampling constants {sf.bank.c} are likely too coarse")


def select_largest(mag: np.ndarray, N: int) -> np.ndarray:
    """Boolean mask of the N largest entries of ``mag``.

    Ties at the threshold go to the lowest flat index (channel, then row,
    then column), so the selection is platform independent.
    """
    flat = mag.ravel()
    total = flat.size
    if not 0 <= N <= total:
        raise ValueError(f"N must lie in [0, {total}], got {N}")
    keep = np.zeros(total, dtype=bool)
    if N == 0:
        return keep.reshape(mag.shape)
    if N == total:
        keep[:] = True
        return keep.reshape(mag.shape)
    thr = np.partition(flat, total - N)[total - N]
    above = flat > thr
    keep |= above
    need = N - int(above.sum())
    if need > 0:
        ties = np.flatnonzero(flat == thr)[:need]
        keep[ties] = True
    return keep.reshape(mag.shape)


def _err2(f, g) -> float:
    # L2 norm on the unit square with pixel area 1/M^2
    return float(np.mean((f - g) ** 2))


class _NTerm:
    """Shared state for repeated N-term approximations of one image."""

    def __init__(self, fb: FilterBank, img, sampled: bool, tol: float):
        self.fb, self.tol, self.sampled = fb, tol, sampled
        self.f = _as_image(fb.M, img)
        self.stack = analyze(fb, self.f)
        if sampled:
            self.sf = sampled_frame(fb)
            self.d = sampled_coefficients(self.sf, self.stack)
            # off-lattice entries get -1 so they are never selected before zeros
            self.mag = np.where(self.sf.masks, np.abs(self.d), -1.0)
            self.total = self.sf.n_coefficients
        else:
            self.mag = np.abs(self.stack.coeffs)
            self.total = self.mag.size
        self._x = None

    def __call__(self, N: int):
        if not 0 <= N <= self.total:
            raise ValueError(f"N must lie in [0, {self.total}], got {N}")
        keep = select_largest(self.mag, N)
        if not self.sampled:
            approx = synthesize(self.fb, self.stack, keep)
        else:
            rhs = self.sf.synthesis(np.where(keep, self.d, 0))
            self._x = dual_reconstruct(self.sf, rhs, x0=self._x, tol=self.tol)
            approx = self._x.real
        return approx, _err2(self.f, approx)


def nterm_approx(fb: FilterBank, img, N: int, sampled: bool = True, tol: float = CG_TOL):
    """Keep the N largest-magnitude coefficients and synthesize.

    Returns ``(approx, err2)`` with ``err2 = ||f - f_N||^2`` on [0, 1]^2.
    """
    return _NTerm(fb, img, sampled, tol)(int(N))


def nterm_curve(fb: FilterBank, img, Ns, sampled: bool = True, tol: float = CG_TOL) -> list[float]:
    """``err2`` for each N in ``Ns`` from one analysis pass."""
    run = _NTerm(fb, img, sampled, tol)
    return [run(int(N))[1] for N in Ns]


def wavelet_baseline(config: ShearSystemConfig, img, N: int, j_max: int | None = None,
                     sampled: bool = True) -> float:
    """N-term ``err2`` with the separable wavelet bank."""
    f = np.asarray(img, dtype=np.float64)
    wb = build_wavelet_bank(config, f.shape[0], j_max)
    return nterm_approx(wb, f, N, sampled=sampled)[1]
