import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from lichlab.bounds import (bilateral_bound_check, brmu_check, comparison_constant,
                            comparison_hypotheses, constant_solution, constant_solution_root,
                            interior_sup_bound, lemmunu_bound, upper_bound_ustar)
from lichlab.model import ModelManifold, RadialFunction
from lichlab.nonlinearity import CoefficientSet, HypothesisError

EUC = ModelManifold.euclidean(3, R_max=8.0)
PINCH = CoefficientSet.constant(0.0, 1.0, 1.0, 3.0, -1.0)


@settings(max_examples=300, deadline=None)
@given(st.floats(0, 50), st.floats(0, 50), st.floats(0.05, 5), st.floats(0.05, 5),
       st.floats(1e-4, 1e4))
def test_lemmunu_never_violated(alpha, beta, mu, nu, t):
    assume(t**mu <= alpha + beta / t**nu)
    assert t <= lemmunu_bound(alpha, beta, mu, nu) * (1 + 1e-12)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 100), st.floats(0.05, 5), st.floats(0.05, 5))
def test_lemmunu_tight_when_alpha_zero(beta, mu, nu):
    t = beta ** (1 / (mu + nu))
    assert lemmunu_bound(0.0, beta, mu, nu) == pytest.approx(t, rel=1e-12)


def test_lemmunu_rejects_bad_input():
    with pytest.raises(ValueError):
        lemmunu_bound(-1, 1, 1, 1)


@settings(max_examples=200, deadline=None)
@given(st.floats(-10, 10), st.floats(0.1, 10), st.floats(0.1, 10), st.floats(1.05, 6),
       st.floats(-3, 0.95))
def test_constant_root_solves_polynomial(alpha, beta, gam, sigma, tau):
    t = constant_solution_root(alpha, beta, gam, sigma, tau)
    p = alpha + beta * t ** (sigma - 1) - gam * t ** (tau - 1)
    scale = abs(alpha) + beta * t ** (sigma - 1) + gam * t ** (tau - 1)
    assert t > 0 and abs(p) <= 1e-10 * scale


def test_constant_solution_pinched():
    assert constant_solution(PINCH) == pytest.approx(1.0, rel=1e-12)


def test_interior_bound_contains_constant_solution():
    C = CoefficientSet.constant(2.0, 1.0, 1.0, 3.0, -1.0)
    ib = interior_sup_bound(EUC, C, 4.0, 3.0)
    lam = constant_solution(C)
    assert ib.C >= lam
    assert ib.check(RadialFunction.constant(np.linspace(0, 4, 41), lam))["ok"]
    with pytest.raises(HypothesisError):
        interior_sup_bound(EUC, CoefficientSet(1.0, "max(0, 1-r)", 1.0, 3.0, -1.0), 2.0, 1.0)


def test_comparison_constant_euclidean_zero():
    assert comparison_constant(EUC, 4.0) == pytest.approx(0.0, abs=1e-9)
    H = ModelManifold.hyperbolic(3, R_max=4.0)
    assert comparison_constant(H, 2.0) > 0


def test_bilateral_on_pinched():
    u = RadialFunction.constant(np.linspace(0, 8, 81), 1.0)
    out = bilateral_bound_check(EUC, PINCH, u)
    assert out["ok"] and out["hypotheses_ok"]
    assert out["upper"] == pytest.approx(1.0) and out["lower"] == pytest.approx(1.0)
    assert out["inverted_exponents"] == [3.0, -1.0]


def test_ustar_flags_violation():
    u = RadialFunction.constant(np.linspace(0, 8, 81), 5.0)
    assert not upper_bound_ustar(EUC, PINCH, u, 1.0)["ok"]


def test_brmu_and_comparison_predicates():
    assert brmu_check(EUC, "1/(1+r)", 1.0)["ok"]
    assert not brmu_check(EUC, "exp(-r)*0", 0.0)["ok"]
    with pytest.raises(ValueError):
        brmu_check(EUC, 1.0, 2.0)
    hp = comparison_hypotheses(EUC, PINCH)
    assert all(v["ok"] for v in hp.values())
    hp = comparison_hypotheses(EUC, CoefficientSet(0.0, "max(0, r-1)", 1.0, 3.0, -1.0))
    assert not hp["i"]["ok"] and not hp["iv"]["ok"]
