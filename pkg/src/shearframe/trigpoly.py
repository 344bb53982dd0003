"""Finite trigonometric (Laurent) polynomials used as refinement masks.

A mask is stored as a mapping ``k -> c_k`` and evaluated as
``sum_k c_k exp(-i k xi)``.  Coefficients built from binomials over powers
of two are kept as :class:`fractions.Fraction` so construction is exact;
evaluation happens in double precision.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from numbers import Number
from typing import Mapping

import numpy as np

__all__ = ["TrigPoly", "bspline_mask", "highpass_from_lowpass"]


def _is_zero(c) -> bool:
    return c == 0


@dataclass(frozen=True)
class TrigPoly:
    """Immutable Laurent polynomial ``p(xi) = sum_k c_k e^{-ik xi}``.

    Zero coefficients are dropped on construction, so ``support`` is always
    the tight range of stored offsets.
    """

    coeffs: Mapping[int, Number] = field(default_factory=dict)

    def __post_init__(self):
        clean = {int(k): c for k, c in dict(self.coeffs).items() if not _is_zero(c)}
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    @property
    def support(self) -> tuple[int, int]:
        if not self.coeffs:
            raise ValueError("empty trigonometric polynomial has no support")
        keys = list(self.coeffs)
        return keys[0], keys[-1]

    @property
    def is_exact(self) -> bool:
        return all(isinstance(c, (int, Fraction)) for c in self.coeffs.values())

    def __len__(self) -> int:
        return len(self.coeffs)

    def __mul__(self, other: "TrigPoly") -> "TrigPoly":
        if not isinstance(other, TrigPoly):
            if isinstance(other, Number):
                return TrigPoly({k: c * other for k, c in self.coeffs.items()})
            return NotImplemented
        out: dict[int, Number] = {}
        for k1, c1 in self.coeffs.items():
            for k2, c2 in other.coeffs.items():
                out[k1 + k2] = out.get(k1 + k2, 0) + c1 * c2
        return TrigPoly(out)

    __rmul__ = __mul__

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0) + c
        return TrigPoly(out)

    def __pow__(self, n: int) -> "TrigPoly":
        if n < 0:
            raise ValueError("negative powers are not trigonometric polynomials")
        result = TrigPoly({0: 1})
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Offsets and complex128 coefficients, sorted by offset."""
        ks = np.fromiter(self.coeffs.keys(), dtype=np.int64, count=len(self.coeffs))
        cs = np.array([complex(c) for c in self.coeffs.values()], dtype=np.complex128)
        return ks, cs

    def __call__(self, xi):
        return self.eval(xi)

    def eval(self, xi):
        """Evaluate at scalar or array ``xi`` (radians)."""
        ks, cs = self.as_arrays()
        x = np.asarray(xi, dtype=np.float64)
        # reduce to [-pi, pi) first so large arguments keep full phase accuracy
        x = np.remainder(x + np.pi, 2 * np.pi) - np.pi
        val = np.exp(-1j * np.multiply.outer(x, ks)) @ cs
        return val[()] if val.ndim == 0 else val

    def derivative(self) -> "TrigPoly":
        """d/dxi of the polynomial: coefficients ``-i k c_k``."""
        return TrigPoly({k: -1j * k * complex(c) for k, c in self.coeffs.items()})

    def conj_reflect(self) -> "TrigPoly":
        """Polynomial whose value is ``conj(p(xi))``: ``k -> conj(c_{-k})``."""
        return TrigPoly({-k: c.conjugate() for k, c in self.coeffs.items()})

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "re", "im"])
        for k, c in self.coeffs.items():
            z = complex(c)
            w.writerow([k, repr(z.real), repr(z.imag)])
        return buf.getvalue()


def bspline_mask(N: int) -> TrigPoly:
    """Mask ``2^-N (1 + e^{-i xi})^N`` of the B-spline of order N."""
    if N < 1:
        raise ValueError(f"B-spline order must be >= 1, got {N}")
    return TrigPoly({k: Fraction(comb(N, k), 2**N) for k in range(N + 1)})


def highpass_from_lowpass(a: TrigPoly) -> TrigPoly:
    """Return b with ``b(xi) = e^{-i xi} conj(a(xi + pi))``.

    Coefficient rule: ``b_k = conj(a_{1-k}) (-1)^{1-k}``.
    """
    if not a.coeffs:
        raise ValueError("lowpass mask is empty")
    return TrigPoly({1 - k: c.conjugate() * (-1) ** (k % 2) for k, c in a.coeffs.items()})
