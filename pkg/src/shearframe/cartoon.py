"""Cartoon-like test images: a smooth background plus a smooth patch cut by
a star-shaped C^2 boundary ``rho(theta) = rho0 (1 + sum a_n cos(n theta))``."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

__all__ = ["CartoonSpec", "SpecError", "DEFAULT_SPEC", "curvature_check", "window", "generate"]


class SpecError(ValueError):
    """A cartoon specification violates the curvature or containment rules."""


def _poly_terms(terms) -> tuple[tuple[int, int, float], ...]:
    out = []
    for t in terms:
        i, j, c = int(t[0]), int(t[1]), float(t[2])
        if i < 0 or j < 0 or i + j > 4:
            raise SpecError(f"polynomial term x^{i} y^{j} exceeds total degree 4")
        out.append((i, j, c))
    return tuple(out)


@dataclass(frozen=True)
class CartoonSpec:
    """Boundary and patch data.

    ``f0_coeffs`` / ``f1_coeffs`` are ``(i, j, c)`` triples for ``c x^i y^j``;
    each polynomial is multiplied by :func:`window`, so both patches are C^2
    on the plane and vanish on the edge of the unit square.
    """

    rho0: float = 0.3
    harmonics: tuple[tuple[int, float], ...] = ((2, 0.08), (3, 0.04))
    center: tuple[float, float] = (0.5, 0.5)
    f0_coeffs: tuple[tuple[int, int, float], ...] = ((0, 0, 0.25), (1, 0, 0.5))
    f1_coeffs: tuple[tuple[int, int, float], ...] = (
        (0, 0, 1.0), (1, 0, 2.0), (2, 0, -2.0), (0, 1, 2.0), (0, 2, -2.0))
    nu: float = 0.25

    def __post_init__(self):
        object.__setattr__(self, "harmonics",
                           tuple((int(n), float(a)) for n, a in self.harmonics))
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        object.__setattr__(self, "f0_coeffs", _poly_terms(self.f0_coeffs))
        object.__setattr__(self, "f1_coeffs", _poly_terms(self.f1_coeffs))

    def rho(self, theta):
        th = np.asarray(theta, float)
        s = np.ones_like(th)
        for n, a in self.harmonics:
            s = s + a * np.cos(n * th)
        return self.rho0 * s

    def rho_bounds(self) -> tuple[float, float]:
        spread = sum(abs(a) for _, a in self.harmonics)
        return self.rho0 * (1 - spread), self.rho0 * (1 + spread)

    def validate(self):
        if not 0 < self.rho0 < 1:
            raise SpecError(f"rho0 must lie in (0, 1), got {self.rho0}")
        if self.nu <= 0:
            raise SpecError("nu must be positive")
        if any(n < 1 for n, _ in self.harmonics):
            raise SpecError("harmonic frequencies must be positive integers")
        kappa = curvature_check(self)
        if kappa > self.nu:
            raise SpecError(f"max |rho''| = {kappa:g} exceeds nu = {self.nu:g}")
        lo, hi = self.rho_bounds()
        if lo <= 0:
            raise SpecError("boundary radius is not positive for every angle")
        if hi >= 1:
            raise SpecError(f"max radius {hi:g} is not below 1")
        cx, cy = self.center
        if min(cx - hi, cy - hi, 1 - cx - hi, 1 - cy - hi) < 0:
            raise SpecError("star domain is not contained in the unit square")

    def to_dict(self) -> dict:
        return {
            "rho0": self.rho0,
            "harmonics": [list(h) for h in self.harmonics],
            "center": list(self.center),
            "f0_coeffs": [list(t) for t in self.f0_coeffs],
            "f1_coeffs": [list(t) for t in self.f1_coeffs],
            "nu": self.nu,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CartoonSpec":
        known = {"rho0", "harmonics", "center", "f0_coeffs", "f1_coeffs", "nu"}
        extra = set(d) - known
        if extra:
            raise SpecError(f"unknown cartoon spec fields: {sorted(extra)}")
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "CartoonSpec":
        return cls.from_dict(json.loads(text))


DEFAULT_SPEC = CartoonSpec()


def curvature_check(spec: CartoonSpec) -> float:
    """``max |rho''| = rho0 * sum |a_n| n^2``.

    The bound is exact whenever the cosines can align, which they do at
    ``theta = 0`` for amplitudes of equal sign.
    """
    return spec.rho0 * sum(abs(a) * n * n for n, a in spec.harmonics)


def window(t):
    """C^2 bump ``64 (t (1 - t))^3`` on [0, 1], zero outside, peak 1."""
    t = np.asarray(t, float)
    return np.where((t > 0) & (t < 1), 64.0 * (t * (1 - t)) ** 3, 0.0)


def _poly(terms, x, y):
    out = np.zeros(np.broadcast(x, y).shape)
    for i, j, c in terms:
        out = out + c * x**i * y**j
    return out


def patches(spec: CartoonSpec, x, y):
    w = window(x) * window(y)
    return _poly(spec.f0_coeffs, x, y) * w, _poly(spec.f1_coeffs, x, y) * w


def _sample(spec: CartoonSpec, x, y):
    f0, f1 = patches(spec, x, y)
    dx, dy = x - spec.center[0], y - spec.center[1]
    inside = np.hypot(dx, dy) <= spec.rho(np.arctan2(dy, dx))
    return f0 + f1 * inside


def generate(spec: CartoonSpec, M: int, supersample: int = 1) -> np.ndarray:
    """Sample ``f0 + f1 * 1_B`` at pixel centres of an ``M x M`` grid.

    Row index is ``y`` and column index is ``x``.  ``supersample > 1``
    averages an ``s x s`` subgrid per pixel (display only).
    """
    spec.validate()
    if M < 1:
        raise ValueError("M must be positive")
    if supersample < 1:
        raise ValueError("supersample must be >= 1")
    s = supersample
    c = (np.arange(M * s) + 0.5) / (M * s)
    img = _sample(spec, c[None, :], c[:, None])
    if s > 1:
        img = img.reshape(M, s, M, s).mean(axis=(1, 3))
    return img
