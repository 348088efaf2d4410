import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import exp1

from lichlab import asymptotic as asy
from lichlab.model import GeometryError, ModelManifold, green_kernel

E = math.e


def test_euler_closed_form():
    rep = asy.integrate_beta("euler_reference", T=E, T_end=E**6)
    assert rep.closed_form_error <= 1e-6
    assert rep.zero_count == 0


def test_kappa_threshold_is_nonoscillatory():
    rep = asy.integrate_beta("kappa_threshold", T=E**2, T_end=1e6)
    assert rep.zero_count == 0
    assert rep.constraint_be_bed >= -1e-10


def test_control_potential_oscillates():
    rep = asy.integrate_beta("control", T=E**2, T_end=1e6, eps=0.5)
    assert rep.zero_count >= 1
    b, _ = asy.solve_beta(asy.Potential("control", eps=0.5), E**2, 1e6, 1.0, 1.0)(np.array(rep.zeros))
    assert np.all(np.abs(b) <= 1e-6 * np.max(np.abs(rep.trace["beta"])))


def test_exact_profile_is_a_solution():
    # sqrt(t log t) log log t solves the kappa equation exactly
    T = E**2
    b0, d0 = asy.asymptotic_profile(T), None
    h = 1e-6 * T
    d0 = (asy.asymptotic_profile(T + h) - asy.asymptotic_profile(T - h)) / (2 * h)
    rep = asy.integrate_beta("kappa_threshold", T=T, T_end=1e8, beta0=float(b0), dbeta0=float(d0))
    assert rep.ratio_drift < 1e-6
    assert rep.constant_estimate == pytest.approx(1.0, rel=1e-6)


def test_ratio_drift_long_run():
    rep = asy.integrate_beta("kappa_threshold", T=asy.E2, T_end=1e8)
    assert rep.ratio_drift < 0.05


def test_constant_lambda_closed_forms():
    assert asy.integrate_beta("constant_lambda", lam=1.0, T_end=1e6).closed_form_error <= 1e-8
    assert asy.integrate_beta("constant_lambda", lam=0.0, T_end=30.0).closed_form_error <= 1e-8
    with pytest.raises(ValueError):
        asy.integrate_beta("constant_lambda", lam=2.0)


def test_t_and_log_forms_agree():
    a = asy.integrate_beta("kappa_threshold", T=E**2, T_end=1e4, form="t")
    b = asy.integrate_beta("kappa_threshold", T=E**2, T_end=1e4, form="log")
    assert np.allclose(a.trace["beta"][-1], b.trace["beta"][-1], rtol=1e-8)


def test_wronskian_constant():
    for kind in ("kappa_threshold", "control", "euler_reference"):
        assert asy.wronskian_check(kind, T_end=1e5)["ok"]


def test_rho_substitution():
    for n in (3, 5):
        out = asy.rho_substitution_check(n=n)
        assert out["z_prime_nonpositive"]
        assert out["t_form_agreement"] <= 1e-8
    zero = asy.rho_substitution_check(potential="zero")
    assert zero["max_abs_z_minus_one"] == 0.0


def test_hille_nehari_against_exponential_integral():
    probe = asy.hille_nehari_probe(samples=25)
    L = np.log(probe["t"])
    # int_0^oo e^-x/(L+x)^2 dx = 1/L - e^L E1(L)
    exact = 0.25 + 0.25 * (1.0 / L - np.exp(L) * exp1(L))
    assert np.allclose(probe["value"], exact, rtol=1e-10)
    assert probe["strict_enclosure"]
    assert 0.25 < probe["value"][0] < 0.25 + 1 / 8
    assert np.all(asy.hille_nehari_probe(kind="euler", samples=5)["value"] == 0.25)
    with pytest.raises(ValueError):
        asy.hille_nehari_probe(T=2.0)


def test_critical_curve_values():
    assert float(asy.critical_curve(E)) == pytest.approx(1 / (4 * E**2), rel=1e-14)
    assert float(asy.critical_curve(E**2)) == pytest.approx(1 / (16 * E**4), rel=1e-14)
    out = asy.critical_curve_identity(points=50)
    assert out["ok"] and out["max_relative_difference"] <= 1e-14


@settings(max_examples=20, deadline=None)
@given(st.floats(1.0, 10.0))
def test_critical_curve_random(x):
    t = math.exp(x)
    expected = 1 / (4 * t**2 * x**2)
    assert float(asy.critical_curve(t)) == pytest.approx(expected, rel=1e-14)


def test_barriers_certified():
    for M in (ModelManifold.euclidean(3, R_max=1e9), ModelManifold.hyperbolic(3, R_max=30.0)):
        env = asy.finite_index_barrier(M)
        assert env.ok and env.checks["max_scaled_residual"] <= 1e-6
    euc = ModelManifold.euclidean(3, R_max=1e9)
    for lam in (1.0, 0.0, 0.75):
        env = asy.finite_index_barrier(euc, mode="constant_lambda", lam=lam)
        assert env.checks["residual_ok"]
        assert env.checks["closed_form_error"] <= 1e-8


def test_barrier_needs_long_range():
    with pytest.raises(GeometryError, match="t-range too short"):
        asy.finite_index_barrier(ModelManifold.euclidean(3, R_max=16.0))


def test_phi_envelope():
    t = np.linspace(3.0, 50.0, 20)
    phi = asy.phi_envelope(np.exp(-2 * t))
    assert np.allclose(phi.values, np.exp(-t) * np.sqrt(t * np.log(t)) * np.log(np.log(t)), rtol=1e-12)
    kern = green_kernel(ModelManifold.hyperbolic(3, R_max=40.0))
    env = asy.phi_envelope(kern)
    # log log t vanishes at t = e, so phi first rises, then decays monotonically
    peak = int(np.argmax(env.values))
    assert -0.5 * np.log(kern.G[kern.r == env.r[peak]][0]) < E**2
    assert np.all(np.diff(env.values[peak:]) < 0)
    with pytest.raises(ValueError, match="window too small"):
        asy.phi_envelope(np.array([0.5, 0.4]))
