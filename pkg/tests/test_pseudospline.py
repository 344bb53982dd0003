import math
from math import comb

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shearframe.pseudospline import (
    MaskOrder,
    constants,
    decay_rate,
    distribution_factor,
    expanded_mask,
    highpass_modulus,
    identity_residual,
    mask_eval,
    p_poly,
    table1,
)

GRID = np.linspace(-np.pi, np.pi, 2048)
ORDERS = [MaskOrder(N, l) for N in range(2, 10) for l in range(N)]


def test_order_validation():
    with pytest.raises(ValueError):
        MaskOrder(3, 3)
    with pytest.raises(ValueError):
        MaskOrder(0, 0)
    with pytest.raises(ValueError):
        MaskOrder(33, 0)
    MaskOrder(32, 31)


def test_p_poly_values():
    assert p_poly(MaskOrder(5, 0), 0.3) == 1.0
    assert p_poly(MaskOrder(2, 1), 0.75) == pytest.approx(2.5)
    assert p_poly(MaskOrder(3, 1), 0.75) == pytest.approx(3.25)
    with pytest.raises(ValueError):
        p_poly(MaskOrder(3, 1), 1.5)
    with pytest.raises(ValueError):
        p_poly(MaskOrder(3, 1), -0.1)


def test_mask_eval_values():
    for o in ORDERS:
        assert mask_eval(o, 0.0) == pytest.approx(1.0)
        assert abs(mask_eval(o, np.pi)) < 1e-30
    assert mask_eval(MaskOrder(2, 1), np.pi / 2) == pytest.approx(0.5)


def test_mask_eval_range():
    for o in ORDERS:
        v = mask_eval(o, GRID)
        assert np.all(v >= 0) and np.all(v <= 1 + 1e-14)


def test_identity_residual_examples():
    assert identity_residual(MaskOrder(4, 0), 0.7) == 0.0
    assert identity_residual(MaskOrder(2, 1), np.pi / 2) < 1e-15


def test_identity_residual_extended_precision():
    # both sums of the truncated binomial identity at (9, 8), xi = 1
    mpmath.mp.dps = 40
    s = mpmath.sin(mpmath.mpf(1) / 2) ** 2
    c = mpmath.cos(mpmath.mpf(1) / 2) ** 2
    lhs = sum(comb(8 + j, j) * s**j for j in range(9))
    rhs = sum(comb(17, j) * s**j * c ** (8 - j) for j in range(9))
    assert abs(lhs - rhs) < mpmath.mpf(10) ** -30
    assert identity_residual(MaskOrder(9, 8), 1.0) <= 1e-12
    assert float(lhs) == pytest.approx(float(distribution_factor(MaskOrder(9, 8), 1.0)), rel=1e-13)


def test_identity_residual_all_orders():
    for o in ORDERS:
        assert np.max(identity_residual(o, GRID)) <= 1e-12


def test_distribution_factor_values():
    assert np.all(distribution_factor(MaskOrder(5, 0), GRID) == 1.0)
    assert distribution_factor(MaskOrder(2, 1), 2 * np.pi / 3) == pytest.approx(2.5)
    assert distribution_factor(MaskOrder(2, 1), 0.0) == 1.0


def test_expanded_mask_matches_closed_form():
    for o in ORDERS:
        a = expanded_mask(o)
        assert a.is_exact
        assert np.max(np.abs(a.eval(GRID) - mask_eval(o, GRID))) <= 1e-12


def test_highpass_modulus_reduced():
    o = MaskOrder(4, 2)
    x = np.linspace(0.1, 3.0, 50)
    np.testing.assert_allclose(highpass_modulus(o, x, reduce_power=4) * np.abs(np.sin(x / 2)) ** 4,
                               highpass_modulus(o, x), rtol=1e-13)
    np.testing.assert_allclose(highpass_modulus(o, x), mask_eval(o, x + np.pi), atol=1e-15)


def test_constants_examples():
    bc = constants(MaskOrder(2, 1))
    assert bc.C1 == pytest.approx(0.25)
    assert bc.C2 == pytest.approx(0.5)
    for N in range(2, 8):
        b0 = constants(MaskOrder(N, 0))
        assert (b0.C2, b0.q1, b0.q2, b0.kappa) == (0.0, 1.0, 1.0, 0.0)
        assert b0.beta == 2 * N


def test_constants_validation():
    with pytest.raises(ValueError):
        constants(MaskOrder(3, 1), K=3.5)
    with pytest.raises(ValueError):
        constants(MaskOrder(3, 1), J=1)


def test_constants_positive_and_consistent():
    for o in ORDERS:
        bc = constants(o)
        for name in ("C1", "Cb", "q1", "q2", "C3", "C4"):
            assert getattr(bc, name) > 0, name
        assert bc.C2 >= 0 and (bc.C2 == 0) == (o.l == 0)
        assert bc.k0 >= 1
        assert bc.beta == pytest.approx(2 * o.N - bc.kappa)
        assert 2.0 ** -bc.k0 * bc.C1 * bc.K ** (2 * o.l + 2) < 0.5
        if bc.k0 > 1:
            assert 2.0 ** -(bc.k0 - 1) * bc.C1 * bc.K ** (2 * o.l + 2) >= 0.5


def test_c3_overflow_is_reported_in_log_space():
    bc = constants(MaskOrder(9, 8))
    expected = 9 * math.log(4) + bc.C2 / 3 + math.log(bc.q1) + 9 * math.log(bc.q2)
    assert bc.log_C3 == pytest.approx(expected)
    assert bc.C3 == math.inf


def test_c3_sweep_over_block_length():
    o = MaskOrder(4, 2)
    exps = [constants(o, J=J).upper_exponent for J in range(2, 21)]
    assert all(b <= a for a, b in zip(exps, exps[1:]))


@pytest.mark.parametrize("N,l,beta", [(2, 0, 4.00000), (3, 1, 4.29956), (9, 8, 6.33529),
                                      (2, 1, 2.67807)])
def test_decay_rate_examples(N, l, beta):
    assert decay_rate(MaskOrder(N, l)) == pytest.approx(beta, abs=5e-6)


def test_decay_rate_extended_precision():
    mpmath.mp.dps = 40
    for o in ORDERS:
        P = sum(comb(o.N - 1 + j, j) * mpmath.mpf(3) ** j / mpmath.mpf(4) ** j
                for j in range(o.l + 1))
        ref = 2 * o.N - mpmath.log(P, 2)
        assert decay_rate(o) == pytest.approx(float(ref), abs=1e-12)


def test_table_shape_and_monotonicity():
    rows = table1()
    assert len(rows) == 44
    beta = {(N, l): b for N, l, b in rows}
    for (N, l), b in beta.items():
        if (N, l + 1) in beta:
            assert beta[(N, l + 1)] < b
        if (N + 1, l) in beta:
            assert beta[(N + 1, l)] > b


@given(st.integers(2, 9).flatmap(lambda N: st.tuples(st.just(N), st.integers(0, N - 1))),
       st.floats(-np.pi, np.pi))
@settings(max_examples=200, deadline=None)
def test_mask_origin_and_factor_bounds(order, xi):
    o = MaskOrder(*order)
    bc = constants(o)
    assert 1 - mask_eval(o, xi) <= bc.C1 * abs(xi) ** (2 * o.l + 2) + 1e-12
    assert distribution_factor(o, xi) <= 1 + bc.C2 * xi * xi + 1e-12
