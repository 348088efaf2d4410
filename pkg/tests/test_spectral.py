import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lichlab.model import ModelManifold
from lichlab.spectral import (RadialSet, lambda1_annulus, lambda1_ball, lambda1_bounded_set,
                              lowest_eigenvalue, spectral_profile, sturm_count, zero_set)

EUC = ModelManifold.euclidean(3, R_max=8.0)


def test_unit_ball_pi_squared():
    res = lambda1_ball(EUC, 0.0, 1.0, 2000)
    assert res.lambda1 == pytest.approx(math.pi**2, rel=1e-3)
    assert res.rayleigh_gap < 1e-8
    assert np.all(res.eigenfunction.values[:-1] > 0)


def test_constant_shift():
    base = lambda1_ball(EUC, 0.0, 1.0, 2000).lambda1
    assert lambda1_ball(EUC, 5.0, 1.0, 2000).lambda1 == pytest.approx(base - 5.0, abs=1e-9)


def test_annulus_closed_form():
    # u = sin(pi (r - r_in)/L)/r is the radial eigenfunction in R^3
    lam = lambda1_annulus(EUC, 0.0, 1.0, 3.0, 2000).lambda1
    assert lam == pytest.approx((math.pi / 2.0) ** 2, rel=1e-4)


def test_hyperbolic_ball_closed_form():
    # u = sin(pi r/R)/sinh r gives lambda = 1 + (pi/R)^2 in H^3
    H = ModelManifold.hyperbolic(3, R_max=4.0)
    lam = lambda1_ball(H, 0.0, 2.0, 2000).lambda1
    assert lam == pytest.approx(1 + (math.pi / 2) ** 2, rel=1e-4)


def test_profile_nonincreasing_and_certificate():
    prof = spectral_profile(EUC, 0.0, (1.0, 2.0, 4.0, 8.0), n=2000)
    assert prof.nonincreasing
    assert not prof.negative_certified
    prof = spectral_profile(EUC, "20*exp(-((r-1.5)/0.4)**2)", (1.0, 2.0, 4.0, 8.0), n=1000)
    assert prof.negative_certified
    with pytest.raises(ValueError):
        spectral_profile(EUC, 0.0, (2.0, 1.0))


def test_zero_set_shapes():
    assert zero_set(EUC, 1.0).kind == "empty"
    B = zero_set(EUC, "max(0, r - 1)")
    assert B.kind == "ball" and B.r_out == pytest.approx(1.0, abs=0.01)
    A = zero_set(EUC, "min(1, abs(r - 3))")
    assert A.kind == "annulus" and A.r_in < 3 < A.r_out


def test_bounded_set_eigenvalues():
    assert lambda1_bounded_set(EUC, 0.0, RadialSet.empty()) == math.inf
    assert lambda1_bounded_set(EUC, 0.0, RadialSet.point()) == math.inf
    lam = lambda1_bounded_set(EUC, 0.0, RadialSet.ball(1.0), n=1000)
    assert lam == pytest.approx(math.pi**2, rel=1e-2)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=3, max_size=30), st.integers(0, 10_000))
def test_sturm_count_matches_dense(d, seed):
    d = np.array(d)
    e = np.random.default_rng(seed).uniform(-3, 3, d.size - 1)
    T = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    ev = np.linalg.eigvalsh(T)
    x = float(np.median(ev)) + 0.123
    assert sturm_count(d, e * e, x) == int(np.sum(ev < x))
    assert lowest_eigenvalue(d, e) == pytest.approx(ev[0], abs=1e-9 * max(1, abs(ev[0])))
