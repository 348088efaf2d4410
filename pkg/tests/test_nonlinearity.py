import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lichlab.model import ModelManifold
from lichlab.nonlinearity import (CoefficientError, CoefficientSet, constant_barriers, f_eval,
                                  hypotheses_theorem_b, pasted_subsolution,
                                  quotient_monotone_check, ratio_bounds, sigma_property,
                                  yamabe_subsolution)

EUC = ModelManifold.euclidean(3, R_max=8.0)
PINCH = CoefficientSet.constant(0.0, 1.0, 1.0, 3.0, -1.0)


def test_validation():
    with pytest.raises(CoefficientError, match="sigma"):
        CoefficientSet.constant(0, 1, 1, 0.5, -1)
    with pytest.raises(CoefficientError, match="tau"):
        CoefficientSet.constant(0, 1, 1, 3, 1.0)
    with pytest.raises(CoefficientError, match="nonnegative"):
        CoefficientSet.constant(0, -1, 1, 3, -1)


def test_f_eval_positive_only():
    assert f_eval(PINCH, 0.0, 1.0) == 0.0
    with pytest.raises(ValueError):
        f_eval(PINCH, 0.0, 0.0)


def test_pinched_ratio_bounds_exact():
    rb = ratio_bounds(PINCH, EUC)
    assert (rb.H, rb.K, rb.H_script, rb.K_script) == (1.0, 1.0, 1.0, 1.0)


def test_constant_barriers_certified_and_cover():
    C = CoefficientSet.constant(1.0, 2.0, 0.5, 3.0, -1.0)
    bars = constant_barriers(C, EUC)
    assert bars.ordered and bars.certificates["sub"].ok and bars.certificates["sup"].ok
    wide = constant_barriers(C, EUC, cover=(1e-3, 50.0))
    assert wide.sub.values[0] == 1e-3 and wide.sup.values[0] == 50.0
    assert wide.certificates["sub"].ok and wide.certificates["sup"].ok


def test_inverted_involution():
    C = CoefficientSet.constant(1.5, 2.0, 0.5, 3.0, -1.0)
    CC = C.inverted().inverted()
    r = np.linspace(0, 3, 7)
    assert np.allclose(CC.sample(r), C.sample(r))
    assert (CC.sigma, CC.tau) == (C.sigma, C.tau)


@settings(max_examples=60, deadline=None)
@given(st.floats(-5, 5), st.floats(0, 3), st.floats(0, 3), st.floats(1.01, 5), st.floats(-3, 0.99))
def test_quotient_nonincreasing(a, b, c, sigma, tau):
    C = CoefficientSet.constant(a, b, c, sigma, tau)
    assert quotient_monotone_check(C, [0.0], np.geomspace(1e-3, 1e3, 200))


@settings(max_examples=30, deadline=None)
@given(st.floats(-4, 4), st.floats(0.2, 3), st.floats(0.2, 3), st.floats(1.1, 5), st.floats(-2, 0.9),
       st.floats(0.01, 100))
def test_inverted_equation(a, b, c, sigma, tau, u):
    # f_inv(1/u) = -f(u)/u^2 for v = 1/u
    C = CoefficientSet.constant(a, b, c, sigma, tau)
    lhs = f_eval(C.inverted(), 0.0, 1.0 / u)
    rhs = -f_eval(C, 0.0, u) / u**2
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9 * (abs(a) / u + b * u ** (sigma - 2) + c * u ** (tau - 2)))


THEOREM_B = CoefficientSet(-1.0, 1.0, "min(1, max(0, (r-0.5)/0.5))**2*(3-2*min(1, max(0, (r-0.5)/0.5)))",
                           3.0, -1.0)


def test_theorem_b_predicates_and_pasting():
    hyp = hypotheses_theorem_b(THEOREM_B, EUC, 1.0, 2.0)
    assert all(v["ok"] for v in hyp.values())
    assert hyp["hp2"]["mu"] == pytest.approx(2.0, rel=1e-9)
    sub = pasted_subsolution(THEOREM_B, EUC, 1.0, 2.0, n=4000)
    assert sub.certificate.ok and sub.certificate.notes["kink_ok"]
    assert np.all(sub.values >= 0)


def test_theorem_b_hp3_fails_for_large_omega():
    # -Delta + a loses positivity on B_2 once a has a deep negative well
    C = CoefficientSet("-1 - 40*exp(-r**2)", 1.0, THEOREM_B.c, 3.0, -1.0)
    assert not hypotheses_theorem_b(C, EUC, 1.0, 2.0)["hp3"]["ok"]


def test_yamabe_subsolution():
    C = CoefficientSet("20*exp(-((r-1.5)/0.4)**2)",
                       "min(1, max(0, (r-0.25)/0.5))**2*(3-2*min(1, max(0, (r-0.25)/0.5)))",
                       0.1, 3.0, -1.0)
    sub = yamabe_subsolution(C, EUC, 3.0, n=4000)
    assert sub.certificate.ok and sub.meta["lambda1"] < 0


def test_sigma_property_constant_case():
    C = CoefficientSet.constant(1.0, 1.0, 1.0, 3.0, -1.0)
    res = sigma_property(C, EUC, 2.0, n=400)
    assert res.holds
