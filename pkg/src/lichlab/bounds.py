"""Explicit a priori estimates, each usable as a checker on solver output."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fields import RadialField
from .model import ModelManifold, RadialFunction, volume_growth_check
from .nonlinearity import CoefficientSet, HypothesisError, _safe_ratio, ratio_bounds

BOUND_TOL = 1e-6


def lemmunu_bound(alpha: float, beta: float, mu: float, nu: float) -> float:
    """Upper bound for t > 0 with t^mu <= alpha + beta / t^nu."""
    if alpha < 0 or beta < 0 or mu <= 0 or nu <= 0:
        raise ValueError("need alpha, beta >= 0 and mu, nu > 0")
    return (alpha + beta ** (mu / (mu + nu))) ** (1.0 / mu)


# --------------------------------------------------------------------------
# interior bound on balls where b > 0


@dataclass
class InteriorBound:
    T: float
    T_tilde: float
    omega_radius: float
    A: float
    C: float
    profile: np.ndarray = field(repr=False, default=None)  # sampled rho
    pointwise: np.ndarray = field(repr=False, default=None)  # bound at the max point

    def check(self, u: RadialFunction, tol: float = BOUND_TOL) -> dict:
        keep = u.r <= self.omega_radius * (1 + 1e-12)
        top = float(np.max(u.values[keep]))
        return {"ok": bool(top <= self.C * (1 + tol)), "sup_omega_u": top, "C": self.C}


def comparison_constant(M: ModelManifold, T: float, samples: int = 4000) -> float:
    """A >= 0 with (m-1) g'/g <= (m-1)(1/rho + A) on (0, T]."""
    rho = np.linspace(T / samples, T, samples)
    with np.errstate(divide="ignore", invalid="ignore"):
        excess = M.g.dg(rho) / M.g.g(rho) - 1.0 / rho
    return float(max(0.0, np.nanmax(excess)))


def interior_sup_bound(M: ModelManifold, C: CoefficientSet, T: float, T_tilde: float,
                       omega_radius: float | None = None, samples: int = 4000) -> InteriorBound:
    """Bound for sup over Omega of any positive subsolution on the ball B_T(o).

    At the maximum point of F = (T^2 - rho^2)^{2/(sigma-1)} u one has
    b u^{sigma-1} <= X(rho) + a_+ + c u^{tau-1} with the explicit X below;
    the elementary inequality turns that into a bound on u, hence on F,
    hence on u over Omega.  The c-term enters as (c/b)^{(sigma-1)/(sigma-tau)}
    after dividing by b.
    """
    if not 0 < T_tilde < T <= M.R_max * (1 + 1e-12):
        raise ValueError("need 0 < T_tilde < T <= R_max")
    omega_radius = T_tilde if omega_radius is None else float(omega_radius)
    if not 0 < omega_radius <= T_tilde:
        raise ValueError("Omega must lie inside B_T_tilde")
    sig, tau, m = C.sigma, C.tau, M.m
    rho = np.linspace(0.0, T, samples + 1)[:-1]
    a, b, c = C.sample(rho)
    if np.any(b <= 0):
        raise HypothesisError("b vanishes on the closed ball B_T", {"T": T})
    A = comparison_constant(M, T)
    d = T**2 - rho**2
    X = (8 * (sig + 1) / (sig - 1) ** 2 * rho**2 / d**2
         + 4 / (sig - 1) * (m + (m - 1) * A * rho) / d
         + np.maximum(a, 0.0))
    alpha = X / b
    beta = c / b
    # u^{sigma-1} <= alpha + beta u^{-(1-tau)}
    with np.errstate(divide="ignore"):
        u_at = (alpha + beta ** ((sig - 1) / (sig - tau))) ** (1.0 / (sig - 1))
    F = d ** (2.0 / (sig - 1)) * u_at
    Cval = float(np.max(F) / (T**2 - omega_radius**2) ** (2.0 / (sig - 1)))
    return InteriorBound(T, T_tilde, omega_radius, A, Cval, rho, u_at)


# --------------------------------------------------------------------------
# global upper bound on superlevel sets


@dataclass
class GammaSets:
    gamma: float
    gamma_star: float
    nodes: np.ndarray  # radii of the discrete superlevel set {u > gamma_star}
    H_gamma: float

    @property
    def empty(self) -> bool:
        return self.nodes.size == 0


def brmu_check(M: ModelManifold, f: RadialField, mu: float = 0.0, samples: int = 400) -> dict:
    """inf over [R_max/4, R_max] of f(r) r^mu > 0 (f >= C / r^mu outside a compact)."""
    if not mu < 2:
        raise ValueError("brmu needs mu < 2")
    r = np.linspace(M.R_max / 4, M.R_max, samples)
    val = float(np.min(RadialField.coerce(f)(r) * r**mu))
    return {"ok": bool(val > 0), "inf": val, "mu": mu, "window": [M.R_max / 4, M.R_max]}


def upper_bound_ustar(M: ModelManifold, C: CoefficientSet, u: RadialFunction, gamma: float,
                      mu: float = 0.0, tol: float = BOUND_TOL) -> dict:
    """sup u <= max{gamma*, H_{gamma*}^{1/(sigma-1)}}, gamma* = max{1, gamma}."""
    r = np.linspace(0.0, M.R_max, 4001)
    _, b, _ = C.sample(r)
    hyp = {
        "b_positive": {"ok": bool(np.all(b > 0)), "min_b": float(np.min(b))},
        "brmu": brmu_check(M, C.b, mu),
        "Bvol": volume_growth_check(M, mu),
    }
    a_, _, c_ = C.sample(r)
    acb = float(np.max(_safe_ratio(np.maximum(a_, 0) + np.maximum(c_, 0), b)))
    hyp["acbapr"] = {"ok": bool(math.isfinite(acb)), "sup": acb}
    hyp["Bvol"]["ok"] = bool(hyp["Bvol"]["finite"])

    gstar = max(1.0, float(gamma))
    above = u.values > gstar
    nodes = u.r[above]
    if nodes.size:
        a, b, c = C.sample(nodes)
        H = float(np.max(_safe_ratio(np.maximum(a, 0) + np.maximum(c, 0), b)))
        bound = max(gstar, H ** (1.0 / (C.sigma - 1)))
    else:
        H = 0.0
        bound = gstar
    sets = GammaSets(float(gamma), gstar, nodes, H)
    top = float(np.max(u.values))
    return {
        "ustar_bound": bound,
        "gamma_sets": sets,
        "sup_u": top,
        "margin": top - bound,
        "ok": bool(top <= bound + tol * max(1.0, bound)),
        "hypotheses": hyp,
        "hypotheses_ok": all(v["ok"] for v in hyp.values()),
    }


def bilateral_bound_check(M: ModelManifold, C: CoefficientSet, u: RadialFunction,
                          mu: float = 0.0, tol: float = BOUND_TOL) -> dict:
    """K_script <= u <= H_script, the lower half through v = 1/u.

    The lower bound is the upper bound of v = 1/u for the inverted equation
    with coefficients (-a, c, b) and exponents (2 - tau, 2 - sigma).
    """
    rb = ratio_bounds(C, M)
    hyp = {
        "acb": {"ok": bool(math.isfinite(rb.H)), "H": rb.H},
        "abc": {"ok": bool(math.isfinite(rb.K)), "K": rb.K},
        "brmu_b": brmu_check(M, C.b, mu),
        "brmu_c": brmu_check(M, C.c, mu),
    }
    r = np.linspace(0.0, M.R_max, 4001)
    _, b, c = C.sample(r)
    hyp["b_c_positive"] = {"ok": bool(np.all(b > 0) and np.all(c > 0))}
    vg = volume_growth_check(M, mu)
    hyp["Bvol"] = {"ok": bool(vg["finite"]), **vg}

    if np.any(u.values <= 0):
        raise HypothesisError("u must be positive", {"min_u": float(np.min(u.values))})
    upper = upper_bound_ustar(M, C, u, 1.0, mu, tol)
    v = RadialFunction(u.r, 1.0 / u.values)
    lower_v = upper_bound_ustar(M, C.inverted(), v, 1.0, mu, tol)
    lower = 1.0 / lower_v["ustar_bound"]
    upper_margin = float(np.max(u.values) - upper["ustar_bound"])
    lower_margin = float(lower - np.min(u.values))
    scale = max(1.0, upper["ustar_bound"])
    return {
        "ok": bool(upper_margin <= tol * scale and lower_margin <= tol),
        "H_script": rb.H_script,
        "K_script": rb.K_script,
        "upper": upper["ustar_bound"],
        "lower": lower,
        "upper_margin": upper_margin,
        "lower_margin": lower_margin,
        "inverted_exponents": [C.inverted().sigma, C.inverted().tau],
        "hypotheses": hyp,
        "hypotheses_ok": all(h["ok"] for h in hyp.values()),
    }


# --------------------------------------------------------------------------
# constant solutions


def constant_solution_root(alpha: float, beta: float, gamma_c: float, sigma: float,
                           tau: float, tol: float = 1e-12) -> float:
    """Unique zero of p(t) = alpha + beta t^(sigma-1) - gamma_c t^(tau-1) on t > 0."""
    if not (beta > 0 and gamma_c > 0 and sigma > 1 and tau < 1):
        raise ValueError("need beta, gamma_c > 0, sigma > 1, tau < 1")

    def p(t):
        return alpha + beta * t ** (sigma - 1) - gamma_c * t ** (tau - 1)

    def dp(t):
        return (sigma - 1) * beta * t ** (sigma - 2) + (1 - tau) * gamma_c * t ** (tau - 2)

    lo, hi = 1.0, 1.0
    while p(lo) > 0:
        lo *= 0.5
    while p(hi) < 0:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if p(mid) < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-6 * hi:
            break
    t = 0.5 * (lo + hi)
    for _ in range(50):
        step = p(t) / dp(t)
        t_new = t - step
        if not lo <= t_new <= hi:
            t_new = 0.5 * (lo + hi)
        if abs(t_new - t) <= tol * t:
            t = t_new
            break
        if p(t_new) < 0:
            lo = t_new
        else:
            hi = t_new
        t = t_new
    return t


def constant_solution(C: CoefficientSet, r: float = 0.0) -> float:
    """Positive constant lam with a lam - b lam^sigma + c lam^tau = 0.

    Dividing by lam gives -a + b lam^(sigma-1) - c lam^(tau-1) = 0, which is
    p with alpha = -a.
    """
    a, b, c = (float(v[0]) for v in C.sample(np.array([r])))
    return constant_solution_root(-a, b, c, C.sigma, C.tau)


# --------------------------------------------------------------------------
# comparison hypotheses


def comparison_hypotheses(M: ModelManifold, C: CoefficientSet, omega_radius: float = 0.0,
                          samples: int = 4001) -> dict:
    """Predicates i)-iv) on M minus B_omega for the comparison theorem."""
    r = np.linspace(omega_radius, M.R_max, samples)
    if omega_radius > 0:
        r = r[1:]
    a, b, c = C.sample(r)
    a_minus = np.maximum(-a, 0.0)
    s3 = float(np.max(_safe_ratio(a_minus, b)))
    s4 = float(np.max(_safe_ratio(c, b)))
    iv_needed = C.tau < 0
    return {
        "i": {"ok": bool(np.all(b > 0)), "min_b": float(np.min(b))},
        "ii": {"ok": bool(np.all(c >= 0)), "min_c": float(np.min(c))},
        "iii": {"ok": bool(math.isfinite(s3)), "sup_a_minus_over_b": s3},
        "iv": {"ok": bool(math.isfinite(s4) or not iv_needed), "sup_c_over_b": s4,
               "required": iv_needed},
    }
