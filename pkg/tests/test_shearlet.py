import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shearframe.shearlet import (
    EXAMPLE1,
    EXAMPLE2,
    ConeRegion,
    ShearSystemConfig,
    cone_frame_scan,
    decay_condition_check,
    omega_cover,
    psi_abs,
    psi_hat,
    psi_hat_generic,
    psi_tilde_hat,
    shear_range,
    theory_lower_bound,
    theta,
    warp,
    warp_inverse,
)


def test_warp_examples():
    assert warp(0, 0, 3.0, -1.5) == (3.0, -1.5)
    assert warp(2, 1, 4.0, 2.0) == (1.0, 2.0)
    assert warp(2, -2, 4.0, 0.0) == (1.0, -2.0)


@given(st.integers(0, 20), st.integers(-40, 40), st.floats(-1e3, 1e3), st.floats(-1e3, 1e3))
@settings(max_examples=300, deadline=None)
def test_warp_group_law(j, k, x, y):
    u, v = warp_inverse(j, k, *warp(j, k, x, y))
    assert abs(u - x) <= 1e-14 * max(1, abs(x)) and abs(v - y) <= 1e-14 * max(1, abs(x), abs(y)) * 2**(j / 2)


def test_shear_range():
    assert [shear_range(j) for j in range(6)] == [1, 2, 2, 3, 4, 6]
    for j in range(40):
        assert shear_range(j) == math.ceil(2 ** (j / 2) - 1e-12)


def test_psi_examples():
    assert psi_abs(EXAMPLE1, 0.0, 1.7) == 0.0
    assert abs(psi_hat(EXAMPLE2, 0.0, -3.0)) == 0.0
    assert psi_abs(EXAMPLE1, 2 * np.pi, 0.0) == pytest.approx((2 / np.pi) ** 3, rel=1e-13)
    assert psi_abs(EXAMPLE1, 4 * np.pi, 0.0) < 1e-15


@given(st.floats(-80, 80), st.floats(-80, 80))
@settings(max_examples=200, deadline=None)
def test_psi_symmetry(x, y):
    for cfg in (EXAMPLE1, EXAMPLE2):
        assert psi_abs(cfg, x, y) == pytest.approx(psi_abs(cfg, x, -y), abs=1e-15)
    # even orders give a symmetric generator in the first variable too
    assert psi_abs(EXAMPLE2, -x, y) == pytest.approx(psi_abs(EXAMPLE2, x, y), abs=1e-15)


def test_generic_construction_matches_modulus():
    rng = np.random.default_rng(3)
    x, y = rng.uniform(-50, 50, (2, 500))
    for cfg in (EXAMPLE1, EXAMPLE2):
        np.testing.assert_allclose(np.abs(psi_hat_generic(cfg, x, y)), psi_abs(cfg, x, y), atol=1e-10)
    np.testing.assert_allclose(psi_tilde_hat(EXAMPLE2, x, y), psi_hat(EXAMPLE2, y, x))


def test_pseudo_generator():
    cfg = ShearSystemConfig(kind="pseudo", N1=5, N2=4, l1=1, l2=2)
    rng = np.random.default_rng(1)
    x, y = rng.uniform(-30, 30, (2, 300))
    np.testing.assert_allclose(np.abs(psi_hat_generic(cfg, x, y)), psi_abs(cfg, x, y), atol=1e-10)
    assert cfg.hypotheses() == {"N1 >= N2 > 2 (l2 > 0)": True}


def test_config_validation():
    with pytest.raises(ValueError):
        ShearSystemConfig(alpha=2.0)
    with pytest.raises(ValueError):
        ShearSystemConfig(c=(0.2, 0.5))
    with pytest.raises(ValueError):
        ShearSystemConfig(kind="bspline", l1=1)
    assert ShearSystemConfig.from_dict(EXAMPLE2.to_dict()) == EXAMPLE2
    assert EXAMPLE1.hypotheses() == {"N1 > N2 > 3": False}
    assert EXAMPLE2.hypotheses() == {"N1 > N2 > 3": True}


def test_cones_partition_outside_rectangle():
    rng = np.random.default_rng(0)
    x, y = rng.uniform(-5, 5, (2, 5000))
    hits = sum(ConeRegion(lab).contains(x, y).astype(int) for lab in ("C1", "C2", "C3", "C4", "R"))
    off_diag = np.abs(np.abs(x) - np.abs(y)) > 1e-9
    assert np.all(hits[off_diag] == 1)


def test_theta_origin_and_nonnegative():
    assert theta(EXAMPLE1, (0.0, 0.0)) == pytest.approx(1.0)
    rng = np.random.default_rng(2)
    x, y = rng.uniform(-100, 100, (2, 200))
    assert np.all(theta(EXAMPLE2, (x, y), j_max=8) >= 0)


def _theta_oracle(N1, N2, xi1, xi2, j_max):
    mpmath.mp.dps = 30

    def B(x):
        return mpmath.mpf(1) if x == 0 else mpmath.sin(x / 2) / (x / 2)

    def psi2(x1, x2):
        return (mpmath.sin(x1 / 4) ** (2 * N1) * B(x1 / 2) ** (2 * N2)
                * B(x2 / 2) ** (2 * N2))

    x1, x2 = mpmath.mpf(xi1), mpmath.mpf(xi2)
    tot = (B(x1) * B(x2)) ** (2 * N2)
    for j in range(j_max + 1):
        K = int(mpmath.ceil(mpmath.sqrt(mpmath.mpf(2) ** j)))
        s, r = mpmath.mpf(2) ** -j, mpmath.mpf(2) ** (-mpmath.mpf(j) / 2)
        for k in range(-K, K + 1):
            tot += psi2(s * x1, k * s * x1 + r * x2)
            tot += psi2(s * x2, k * s * x2 + r * x1)
    return tot


def test_theta_matches_extended_precision_oracle():
    ref = _theta_oracle(4, 3, math.pi, 0.0, 20)
    val = theta(EXAMPLE1, (math.pi, 0.0), j_max=20)
    assert abs(val - float(ref)) <= 1e-10


def test_theta_off_diagonal_path_is_continuous():
    xi = (1.3, -0.4)
    a = theta(EXAMPLE2, xi, j_max=6)
    b = theta(EXAMPLE2, xi, (1e-13, 0.0), j_max=6)
    assert a == pytest.approx(b, rel=1e-9)


def test_omega_cover():
    j, k = omega_cover(EXAMPLE1, 1.5 * EXAMPLE1.alpha, 0.0)
    assert (int(j), int(k)) == (0, 0)
    rng = np.random.default_rng(5)
    u = rng.uniform(0, 10, 2000)
    x1 = EXAMPLE2.alpha * 2**u
    x2 = x1 * rng.uniform(-1, 1, 2000)
    cfg = EXAMPLE2.replace(j_max=12)
    jj, kk = omega_cover(cfg, x1, x2)
    assert np.all(jj >= 0)
    t, c = warp(jj, kk, x1, x2)
    a = cfg.alpha
    assert np.all((t >= a * (1 - 1e-9)) & (t <= 2 * a * (1 + 1e-9)) & (np.abs(c) <= a * (1 + 1e-9)))


def test_cone_scan_small():
    cfg = EXAMPLE1.replace(j_max=8)
    rep = cone_frame_scan(cfg, grid=128)
    assert rep.ok
    assert 0 < rep.L_inf <= rep.L_sup < 1e6
    assert rep.L_inf >= theory_lower_bound(cfg)


def test_cone_scan_grid_validation():
    with pytest.raises(ValueError):
        cone_frame_scan(EXAMPLE1, grid=16)


def test_decay_check_examples():
    good = decay_condition_check(EXAMPLE2, n_samples=2000)
    assert good.passed, good.failures()
    bad = decay_condition_check(EXAMPLE1, n_samples=2000)
    assert not bad.passed
    assert any("alpha exponent" in f for f in bad.failures())
    assert bad.max_violation <= 1e-9
