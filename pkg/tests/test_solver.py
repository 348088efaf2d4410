import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lichlab.bounds import constant_solution
from lichlab.model import Certificate, ModelManifold, RadialFunction
from lichlab.nonlinearity import CoefficientSet, constant_barriers
from lichlab.solver import (DirichletProblem, PreconditionError, SolverError, blowup_solution,
                            boundary_n_sequence, compare, maximal_solution, solve_dirichlet,
                            uniqueness_l2_diagnostic)
from oracles import blowup_center

EUC = ModelManifold.euclidean(3, R_max=8.0)
PINCH = CoefficientSet.constant(0.0, 1.0, 1.0, 3.0, -1.0)


def test_pinched_solution_is_one():
    rep = solve_dirichlet(DirichletProblem(EUC, PINCH, 2.0, 1.0, constant_barriers(PINCH, EUC)))
    assert np.max(np.abs(rep.solution.values - 1.0)) <= 1e-12
    assert rep.residual_max < 1e-8 and rep.sandwich_ok


def test_boundary_value_outside_barriers():
    with pytest.raises(PreconditionError):
        solve_dirichlet(DirichletProblem(EUC, PINCH, 2.0, 3.0, constant_barriers(PINCH, EUC)))


@settings(max_examples=15, deadline=None)
@given(st.floats(-3, 3), st.floats(0.5, 2), st.floats(0.2, 2), st.floats(1.5, 4), st.floats(-2, 0.5),
       st.floats(0.05, 0.95))
def test_monotone_iterates_and_sandwich(a, b, c, sigma, tau, frac):
    C = CoefficientSet.constant(a, b, c, sigma, tau)
    bars = constant_barriers(C, EUC)
    lo, hi = bars.sub.values[0], bars.sup.values[0]
    rep = solve_dirichlet(DirichletProblem(EUC, C, 1.0, lo + frac * (hi - lo), bars, 300))
    assert rep.monotone_violation <= 1e-12
    assert rep.sandwich_ok and rep.solution.certificate.ok


def test_boundary_sequence_nondecreasing():
    reps = boundary_n_sequence(DirichletProblem(EUC, PINCH, 1.0, 1.0, constant_barriers(PINCH, EUC), 400), 8)
    V = np.array([r.solution.values for r in reps])
    assert np.all(np.diff(V, axis=0) >= -1e-10 * np.maximum(1, V[:-1]))
    assert V[-1, -1] == 2.0**8


@pytest.mark.parametrize("a,b,c,sigma,tau,R", [(2, 1, 1, 3, -1, 1.0), (0, 1, 1, 4, -1, 2.0)])
def test_blowup_matches_shooting(a, b, c, sigma, tau, R):
    C = CoefficientSet.constant(a, b, c, sigma, tau)
    ref = blowup_center(a, b, c, sigma, tau, R, constant_solution(C))
    errs = [abs(blowup_solution(EUC, C, R, n=n).full.values[0] - ref) for n in (500, 2000)]
    assert errs[1] <= 5e-4 * ref
    assert errs[1] < errs[0] / 3  # converging under refinement


def test_blowup_hits_cap_for_small_sigma():
    C = CoefficientSet.constant(0.0, 1.0, 1.0, 1.2, -1.0)
    with pytest.raises(SolverError, match="interior bound failed"):
        blowup_solution(EUC, C, 1.0, n=200, kmax=20)


def test_maximal_solution_pinched():
    sub = constant_barriers(PINCH, EUC).sub
    rep = maximal_solution(EUC, PINCH, sub, (2.0, 4.0, 8.0), n=500)
    assert rep.monotone_decreasing_certificate and rep.above_subsolution
    # the large solution on B_8 still sits above the constant 1 near the center
    ref = blowup_center(0.0, 1.0, 1.0, 3.0, -1.0, 8.0, 1.0)
    assert rep.solution.values[0] == pytest.approx(ref, abs=2e-6)
    with pytest.raises(PreconditionError):
        maximal_solution(EUC, PINCH, sub, (4.0, 2.0))
    bare = RadialFunction(sub.r, sub.values)
    with pytest.raises(PreconditionError):
        maximal_solution(EUC, PINCH, bare, (2.0, 4.0))


def test_compare_requires_certificates():
    r = np.linspace(0, 1, 11)
    u = RadialFunction.constant(r, 1.0)
    with pytest.raises(PreconditionError):
        compare(u, u)
    lo = RadialFunction.constant(r, 1.0, Certificate("sub", 0.0, 1e-6))
    hi = RadialFunction.constant(r, 2.0, Certificate("super", 0.0, 1e-6))
    assert compare(lo, hi)
    with pytest.raises(PreconditionError):
        compare(RadialFunction.constant(r, 3.0, Certificate("sub", 0.0, 1e-6)), hi)


def test_uniqueness_diagnostic():
    r = np.linspace(1, 100, 200)
    one = RadialFunction.constant(r, 1.0)
    assert uniqueness_l2_diagnostic(one, one, EUC, r)["vacuous"]
    # 1/I must fail to be integrable: true for decaying gaps, false once u - v grows like r
    fast = RadialFunction(r, 1.0 + np.exp(-r))
    assert uniqueness_l2_diagnostic(fast, one, EUC, r)["condition_uvint"]
    slow = RadialFunction(r, 1.0 + 1.0 / r)
    assert uniqueness_l2_diagnostic(slow, one, EUC, r)["condition_uvint"]
    growing = RadialFunction(r, 1.0 + r)
    assert not uniqueness_l2_diagnostic(growing, one, EUC, r)["condition_uvint"]
