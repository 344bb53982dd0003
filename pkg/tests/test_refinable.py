import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from published import BETA
from shearframe.pseudospline import MaskOrder, mask_eval
from shearframe.refinable import (
    RefinableEvaluator,
    TruncationError,
    bound_suite,
    bspline_fourier,
    phi_hat,
    verify_sandwich,
)
from shearframe.trigpoly import bspline_mask


def test_bspline_fourier_examples():
    for m in range(1, 10):
        assert bspline_fourier(m, 0.0) == pytest.approx(1.0)
    assert abs(bspline_fourier(2, 2 * np.pi)) < 1e-15
    assert abs(bspline_fourier(1, np.pi)) == pytest.approx(2 / np.pi, abs=1e-15)
    with pytest.raises(ValueError):
        bspline_fourier(0, 1.0)


def test_phi_hat_at_origin():
    for mask in (bspline_mask(3), MaskOrder(4, 2)):
        assert phi_hat(RefinableEvaluator(mask), 0.0) == pytest.approx(1.0)


def test_phi_hat_bspline_at_pi():
    ev = RefinableEvaluator(bspline_mask(3))
    assert abs(phi_hat(ev, np.pi) - bspline_fourier(3, np.pi)) <= 1e-10


def test_depth_doubling_is_stable():
    ev = RefinableEvaluator(MaskOrder(2, 1))
    D = ev.depth(np.pi)
    assert abs(phi_hat(ev, np.pi, depth=D) - phi_hat(ev, np.pi, depth=2 * D)) <= 1e-10


@pytest.mark.parametrize("m", range(1, 10))
def test_closed_form_oracle(m):
    rng = np.random.default_rng(m)
    xi = rng.uniform(-200, 200, 2000)
    ev = RefinableEvaluator(bspline_mask(m))
    assert np.max(np.abs(phi_hat(ev, xi) - bspline_fourier(m, xi))) <= 1e-10


def test_type_ii_l0_is_even_bspline():
    # cos^{2N}(x/2) is the mask of a centred B-spline of order 2N
    xi = np.linspace(-60, 60, 999)
    for N in (2, 3, 5):
        ev = RefinableEvaluator(MaskOrder(N, 0))
        np.testing.assert_allclose(phi_hat(ev, xi), np.abs(bspline_fourier(2 * N, xi)), atol=1e-10)


def test_evaluator_validation():
    with pytest.raises(ValueError):
        RefinableEvaluator(bspline_mask(2) * 2)
    with pytest.raises(ValueError):
        RefinableEvaluator(MaskOrder(3, 1), tail_tolerance=0)
    with pytest.raises(TruncationError):
        RefinableEvaluator(MaskOrder(3, 1), depth_cap=3).depth(1e6)


ORDERS = st.integers(2, 9).flatmap(lambda N: st.tuples(st.just(N), st.integers(0, N - 1)))


@given(ORDERS, st.floats(-1e4, 1e4))
@settings(max_examples=150, deadline=None)
def test_modulus_at_most_one(order, xi):
    assert abs(phi_hat(RefinableEvaluator(MaskOrder(*order)), xi)) <= 1 + 1e-12


@given(ORDERS)
@settings(max_examples=20, deadline=None)
def test_refinement_identity(order):
    o = MaskOrder(*order)
    ev = RefinableEvaluator(o)
    xi = np.linspace(-40, 40, 801)
    lhs = phi_hat(ev, 2 * xi)
    rhs = mask_eval(o, xi) * phi_hat(ev, xi)
    assert np.max(np.abs(lhs - rhs)) <= 1e-10


def test_refinement_identity_trigpoly():
    ev = RefinableEvaluator(bspline_mask(5))
    xi = np.linspace(-40, 40, 801)
    lhs = phi_hat(ev, 2 * xi)
    rhs = bspline_mask(5).eval(xi) * phi_hat(ev, xi)
    assert np.max(np.abs(lhs - rhs)) <= 1e-10


def test_sandwich_examples():
    assert verify_sandwich(MaskOrder(4, 0), K=np.pi / 2).ok
    assert verify_sandwich(MaskOrder(2, 1), K=np.pi).ok
    with pytest.raises(ValueError):
        verify_sandwich(MaskOrder(2, 1), K=4.0)


@pytest.mark.parametrize("order", [(2, 1), (3, 1), (4, 0), (4, 2), (9, 8)])
def test_bound_suite_clean(order):
    out = bound_suite(MaskOrder(*order))
    assert set(out) == {"mask_origin", "factor_growth", "highpass_upper", "highpass_lower",
                        "factor_inner", "factor_outer", "sandwich_lower", "sandwich_upper"}
    assert max(out.values()) <= 1e-9, out


def _envelope_slope(o):
    ev = RefinableEvaluator(o)
    peaks, centres = [], []
    for e in np.arange(4, 10, 0.5):
        x = np.linspace(2**e, 2 ** (e + 0.5), 400)
        peaks.append(np.log2(np.max(np.abs(phi_hat(ev, x)))))
        centres.append(e + 0.25)
    return np.polyfit(centres, peaks, 1)[0]


@pytest.mark.parametrize("order", [(2, 0), (3, 1), (4, 2), (5, 1), (6, 5), (9, 8)])
def test_empirical_decay_respects_table(order):
    o = MaskOrder(*order)
    slope = _envelope_slope(o)
    beta = BETA[order]
    # the tabulated rate is an envelope: the observed decay is at least that fast
    assert slope <= -beta + 0.5
    assert slope >= -2 * o.N - 0.2
