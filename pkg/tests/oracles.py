"""Independent reference computations used only by the tests."""
from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad, solve_ivp


def blowup_radius(u0, a, b, c, sigma, tau, m=3, w_cap=None):
    """Radius where the radial solution with u(0) = u0 of
    u'' + (m-1)/r u' + a u - b u^sigma + c u^tau = 0 becomes infinite.

    Integrated in w = log u.  Past w_cap the remaining distance is the
    leading-order escape length sqrt(K) u^{-(sigma-1)/2}.
    """
    w_cap = 40.0 / (sigma - 1) if w_cap is None else w_cap

    def rhs(r, y):
        w, p = y
        return [p, b * np.exp((sigma - 1) * w) - a - c * np.exp((tau - 1) * w)
                - (m - 1) / r * p - p * p]

    def escape(r, y):
        return y[0] - w_cap

    escape.terminal = True
    escape.direction = 1
    w0 = math.log(u0)
    r0 = 1e-8
    acc = (b * u0 ** (sigma - 1) - a - c * u0 ** (tau - 1)) / m
    sol = solve_ivp(rhs, [r0, 60.0], [w0 + acc * r0**2 / 2, acc * r0], events=escape,
                    rtol=1e-12, atol=1e-14, method="DOP853")
    if sol.t_events[0].size == 0:
        return sol.t[-1] if sol.status == -1 else math.inf
    K = 2 * (sigma + 1) / ((sigma - 1) ** 2 * b)
    return sol.t_events[0][0] + math.sqrt(K) * math.exp(-(sigma - 1) / 2 * w_cap)


def blowup_center(a, b, c, sigma, tau, R, lam, m=3):
    """u(0) of the large solution on B_R, by bisection on the blow-up radius."""
    lo, hi = lam, 2 * lam
    while blowup_radius(hi, a, b, c, sigma, tau, m) > R:
        lo, hi = hi, 2 * hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if blowup_radius(mid, a, b, c, sigma, tau, m) > R:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15 * hi:
            break
    return hi


def shoot_value(u0, r_end, a, b, c, sigma, tau, m=3):
    """u(r_end) for the radial solution with u(0) = u0 and u'(0) = 0."""
    def rhs(r, y):
        u, p = y
        return [p, b * u**sigma - a * u - c * u**tau - (m - 1) / r * p]

    r0 = 1e-8
    acc = (b * u0**sigma - a * u0 - c * u0**tau) / m
    sol = solve_ivp(rhs, [r0, r_end], [u0 + acc * r0**2 / 2, acc * r0],
                    rtol=1e-12, atol=1e-14, method="DOP853")
    return float(sol.y[0, -1])


def green_by_quadrature(weight, r, R_inf=np.inf):
    """int_r^oo ds / w(s) by adaptive quadrature."""
    return np.array([quad(lambda s: 1.0 / weight(s), ri, R_inf, limit=400,
                          epsabs=0, epsrel=1e-12)[0] for ri in np.atleast_1d(r)])
