"""Finite-index barriers built from a Green kernel.

A barrier has the form u = sqrt(G) beta(t) with t = -log sqrt(G); on a model
whose Green kernel is harmonic off the pole, Delta u + a u <= 0 reduces to the
linear ODE beta'' + (kappa(t) - 1) beta = 0 together with beta >= beta'.  This
module integrates that ODE (and its relatives), counts zeros, checks the
companion rho-form, and assembles the barrier on a model manifold.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
from scipy import integrate, optimize

from .model import (GeometryError, GreenKernel, ModelManifold, RadialFunction,
                    green_values, laplacian_drift)

E2 = math.e**2
ODE_RTOL = 1e-12
ODE_ATOL = 1e-14
ZERO_XTOL = 1e-12
BARRIER_TOL = 1e-6


class IntegrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class KappaPotential:
    """kappa(t) = 1 + (1 + 1/log^2 t) / (4 t^2), t > 1."""

    def _check(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t <= 1):
            raise ValueError("kappa is defined for t > 1")
        return t

    def __call__(self, t):
        return 1.0 + self.minus_one(t)

    def minus_one(self, t):
        t = self._check(t)
        return (1.0 + 1.0 / np.log(t) ** 2) / (4.0 * t**2)

    def excess_over_euler(self, t):
        """kappa - 1 - 1/(4 t^2), computed without cancellation."""
        t = self._check(t)
        return 1.0 / (4.0 * t**2 * np.log(t) ** 2)


KAPPA = KappaPotential()


# --------------------------------------------------------------------------
# the linear ODE beta'' + q(t) beta = 0


@dataclass(frozen=True)
class Potential:
    """q(t) for beta'' + q beta = 0, plus its log-variable form.

    With t = e^s and beta = sqrt(t) y the equation becomes y'' = -p(s) y with
    p(s) = t^2 q(t) - 1/4.  ``p`` is written out per kind so that nothing is
    lost to cancellation.
    """

    kind: str
    lam: float = 1.0
    eps: float = 0.0

    def q(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "kappa_threshold":
            return KAPPA.minus_one(t)
        if self.kind == "euler_reference":
            return 0.25 / t**2
        if self.kind == "control":
            return (1.0 + self.eps) / (4.0 * t**2) + 1.0 / (4.0 * t**2 * np.log(t) ** 2)
        if self.kind == "constant_lambda":
            return np.full_like(t, self.lam - 1.0)
        raise ValueError(f"unknown potential kind {self.kind!r}")

    def p(self, s):
        s = np.asarray(s, dtype=float)
        if self.kind == "kappa_threshold":
            return 0.25 / s**2
        if self.kind == "euler_reference":
            return np.zeros_like(s)
        if self.kind == "control":
            return 0.25 * self.eps + 0.25 / s**2
        if self.kind == "constant_lambda":
            return np.exp(2 * s) * (self.lam - 1.0) - 0.25
        raise ValueError(f"unknown potential kind {self.kind!r}")


def euler_closed_form(t):
    """w = sqrt(t) log t and its derivative."""
    t = np.asarray(t, dtype=float)
    return np.sqrt(t) * np.log(t), (np.log(t) + 2.0) / (2.0 * np.sqrt(t))


def constant_lambda_closed_form(lam: float, t):
    """beta = t (lam = 1) or exp(sqrt(1 - lam) t) (lam < 1), with derivative."""
    t = np.asarray(t, dtype=float)
    if lam == 1.0:
        return t.copy(), np.ones_like(t)
    k = math.sqrt(1.0 - lam)
    e = np.exp(k * t)
    return e, k * e


@dataclass
class BetaSolution:
    """Dense solution of the beta equation in the t variable."""

    potential: Potential
    T: float
    T_end: float
    form: str
    _sol: object = field(repr=False)
    steps: np.ndarray = field(repr=False)  # accepted step end points, in t

    def __call__(self, t):
        """(beta, beta_dot) at t."""
        t = np.asarray(t, dtype=float)
        if self.form == "t":
            y = self._sol.sol(t)
            return y[0], y[1]
        s = np.log(t)
        y, dy = self._sol.sol(s)
        root = np.sqrt(t)
        return root * y, (0.5 * y + dy) / root


def solve_beta(potential: Potential, T: float, T_end: float, beta0: float, dbeta0: float,
               form: str = "log") -> BetaSolution:
    if not T_end > T > 1:
        raise ValueError("need 1 < T < T_end")
    if form == "t":
        def rhs(t, y):
            return [y[1], -potential.q(t) * y[0]]

        y0, span = [beta0, dbeta0], (T, T_end)
    elif form == "log":
        def rhs(s, y):
            return [y[1], -potential.p(s) * y[0]]

        # beta = sqrt(t) y, beta_dot = (y/2 + y') / sqrt(t)
        root = math.sqrt(T)
        y0 = [beta0 / root, dbeta0 * root - 0.5 * beta0 / root]
        span = (math.log(T), math.log(T_end))
    else:
        raise ValueError("form must be 't' or 'log'")
    sol = integrate.solve_ivp(rhs, span, y0, method="DOP853", rtol=ODE_RTOL, atol=ODE_ATOL,
                              dense_output=True)
    if sol.status != 0:
        raise IntegrationError(f"step failure: {sol.message}")
    steps = sol.t if form == "t" else np.exp(sol.t)
    steps[0], steps[-1] = T, T_end
    return BetaSolution(potential, T, T_end, form, sol, steps)


def count_zeros(sol: BetaSolution, per_step: int = 8) -> list:
    """Zeros of beta on [T, T_end]: sign changes on the dense output, refined
    by bisection to ZERO_XTOL in t."""
    pts = [sol.steps[:1]]
    for a, b in zip(sol.steps[:-1], sol.steps[1:]):
        pts.append(np.linspace(a, b, per_step + 1)[1:])
    t = np.concatenate(pts)
    t = np.clip(t, sol.T, sol.T_end)
    beta = sol(t)[0]
    zeros = []
    for i in np.flatnonzero(np.sign(beta[:-1]) * np.sign(beta[1:]) < 0):
        f = lambda x: float(sol(np.array(x))[0])
        zeros.append(optimize.brentq(f, t[i], t[i + 1], xtol=ZERO_XTOL, rtol=4 * np.finfo(float).eps))
    zeros += [float(x) for x in t[1:-1][beta[1:-1] == 0.0]]
    return sorted(zeros)


def asymptotic_profile(t):
    """sqrt(t log t) log log t, t > e."""
    t = np.asarray(t, dtype=float)
    return np.sqrt(t * np.log(t)) * np.log(np.log(t))


@dataclass
class OscillationReport:
    kind: str
    T: float
    T_end: float
    form: str
    zero_count: int
    zeros: list
    ratio_t: np.ndarray = field(repr=False)
    asymptotic_ratio_samples: np.ndarray = field(repr=False)
    ratio_drift: float
    constant_estimate: float
    constraint_be_bed: float
    closed_form_error: float | None = None
    trace: dict = field(default_factory=dict, repr=False)

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "window": [self.T, self.T_end],
            "form": self.form,
            "zero_count": self.zero_count,
            "zeros": self.zeros,
            "ratio_drift": self.ratio_drift,
            "constant_estimate": self.constant_estimate,
            "constraint_be_bed": self.constraint_be_bed,
            "closed_form_error": self.closed_form_error,
            "ratio_samples": {"t": self.ratio_t.tolist(),
                              "ratio": self.asymptotic_ratio_samples.tolist()},
        }


def integrate_beta(kind: str, T: float = E2, T_end: float = 1e6, beta0: float | None = None,
                   dbeta0: float | None = None, lam: float = 1.0, eps: float = 0.5,
                   form: str | None = None, trace_points: int = 400) -> OscillationReport:
    """Integrate beta'' + q beta = 0 on [T, T_end] and summarize it.

    kind is one of kappa_threshold, constant_lambda, euler_reference or
    control (the (1+eps)/(4t^2) + 1/(4 t^2 log^2 t) potential).  Missing
    initial data default to the closed form for euler_reference and
    constant_lambda, and to beta = beta_dot = 1 otherwise.
    """
    if not T >= math.e * (1 - 1e-15):
        raise ValueError("need T >= e so that log log t is defined")
    if kind == "constant_lambda" and lam > 1:
        raise ValueError("constant_lambda needs lam <= 1")
    pot = Potential(kind, lam=lam, eps=eps)
    if beta0 is None or dbeta0 is None:
        if kind == "euler_reference":
            b0, d0 = euler_closed_form(T)
        elif kind == "constant_lambda":
            b0, d0 = constant_lambda_closed_form(lam, T)
        else:
            b0, d0 = 1.0, 1.0
        beta0 = float(b0) if beta0 is None else beta0
        dbeta0 = float(d0) if dbeta0 is None else dbeta0
    if form is None:
        form = "t" if kind in ("euler_reference", "constant_lambda") else "log"
    sol = solve_beta(pot, T, T_end, beta0, dbeta0, form)
    zeros = count_zeros(sol)

    t = np.unique(np.concatenate([np.geomspace(T, T_end, trace_points), sol.steps]))
    beta, dbeta = sol(t)
    be_bed = float(np.min(beta - dbeta))

    lo = max(T_end / 10.0, T * (1 + 1e-12), math.e * 1.0001)
    rt = np.geomspace(lo, T_end, 200)
    ratio = sol(rt)[0] / asymptotic_profile(rt)
    scale = float(np.max(np.abs(ratio)))
    drift = float((np.max(ratio) - np.min(ratio)) / scale) if scale > 0 else math.inf
    prof = asymptotic_profile(rt)
    C_fit = float(np.dot(prof, sol(rt)[0]) / np.dot(prof, prof))

    err = None
    if kind == "euler_reference":
        w, _ = euler_closed_form(t)
        err = float(np.max(np.abs(beta - w) / np.abs(w)))
    elif kind == "constant_lambda":
        exact, _ = constant_lambda_closed_form(lam, t)
        c = beta0 / float(constant_lambda_closed_form(lam, T)[0])
        err = float(np.max(np.abs(beta - c * exact) / np.abs(c * exact)))
    return OscillationReport(kind, T, T_end, form, len(zeros), zeros, rt, ratio, drift, C_fit,
                             be_bed, err, {"t": t, "beta": beta, "dbeta": dbeta})


def wronskian_check(kind: str = "kappa_threshold", T: float = E2, T_end: float = 1e6,
                    form: str = "t", lam: float = 1.0, eps: float = 0.5) -> dict:
    """Relative variation of beta1 beta2' - beta2 beta1' for data (1,0), (0,1)."""
    pot = Potential(kind, lam=lam, eps=eps)
    s1 = solve_beta(pot, T, T_end, 1.0, 0.0, form)
    s2 = solve_beta(pot, T, T_end, 0.0, 1.0, form)
    t = np.geomspace(T, T_end, 500)
    b1, d1 = s1(t)
    b2, d2 = s2(t)
    W = b1 * d2 - b2 * d1
    var = float(np.max(np.abs(W - 1.0)))
    return {"ok": bool(var <= 1e-8), "max_relative_variation": var, "W0": 1.0}


# --------------------------------------------------------------------------
# rho-substitution


def _rho_of_t(t, n):
    # t = log(sqrt(n-2) rho^{(n-2)/2})  =>  log rho = (2 t - log(n-2)) / (n-2)
    return (2.0 * np.asarray(t) - math.log(n - 2)) / (n - 2)


def rho_substitution_check(n: int = 3, T: float = E2, T_end: float = 30.0,
                           potential: str = "kappa", tol: float = 1e-10,
                           samples: int = 400) -> dict:
    """Integrate (rho^{n-1} z')' + k(t(rho)) (n-2)^2/(4 rho^2) rho^{n-1} z = 0 from
    z(R) = 1, z'(R) = 0 and check z' <= 0.  Since rho grows like e^{2t/(n-2)}
    the window is kept to moderate t and reported through log rho.

    The equation is solved in x = log rho, where it reads
    z_xx + (n-2) z_x + k (n-2)^2/4 z = 0 with rho z' = z_x.  With
    potential="kappa" k is kappa; with "zero" it is 0 and z stays 1.  The
    t-form beta with beta(T) = beta_dot(T) = 1 is mapped through
    z = e^{-t} beta e^T and compared.
    """
    if n < 3:
        raise ValueError("the substitution needs n >= 3")
    x0, x1 = float(_rho_of_t(T, n)), float(_rho_of_t(T_end, n))
    half = 0.5 * math.log(n - 2)

    def weight(x):
        if potential == "zero":
            return 0.0
        return float(KAPPA(half + 0.5 * (n - 2) * x))

    def rhs(x, y):
        return [y[1], -(n - 2) * y[1] - weight(x) * (n - 2) ** 2 / 4.0 * y[0]]

    sol = integrate.solve_ivp(rhs, (x0, x1), [1.0, 0.0], method="DOP853", rtol=ODE_RTOL,
                              atol=1e-30, dense_output=True)
    if sol.status != 0:
        raise IntegrationError(f"step failure: {sol.message}")
    x = np.linspace(x0, x1, samples)
    z, zx = sol.sol(x)
    scale = np.maximum(np.abs(z), np.finfo(float).tiny)
    worst = float(np.max(zx / scale))
    out = {"z_prime_nonpositive": bool(worst <= tol), "max_z_prime_over_z": worst,
           "n": n, "log_R": x0, "log_rho_end": x1}
    if potential == "kappa":
        t = half + 0.5 * (n - 2) * x
        bs = solve_beta(Potential("kappa_threshold"), T, T_end, 1.0, 1.0, "log")
        beta, _ = bs(np.clip(t, T, T_end))
        z_t = np.exp(T - t) * beta
        out["t_form_agreement"] = float(np.max(np.abs(z_t - z) / scale))
    else:
        out["max_abs_z_minus_one"] = float(np.max(np.abs(z - 1.0)))
    return out


# --------------------------------------------------------------------------
# Hille-Nehari and the critical curve


def hille_nehari_probe(T: float = E2, t_end: float = 1e12, samples: int = 100,
                       kind: str = "kappa") -> dict:
    """t * int_t^oo h at log-spaced t in [T, t_end].

    Substituting s = t e^x: t int_t^oo h = 1/4 + (1/4) int_0^oo e^{-x} / (log t + x)^2 dx
    for the kappa potential, and exactly 1/4 for the pure Euler one.
    """
    if not T > math.e * (1 - 1e-15):
        raise ValueError("need T > e")
    t = np.geomspace(T, t_end, samples)
    if kind == "euler":
        vals = np.full_like(t, 0.25)
    elif kind == "kappa":
        vals = np.empty_like(t)
        for i, ti in enumerate(t):
            L = math.log(ti)
            corr = integrate.quad(lambda x: math.exp(-x) / (L + x) ** 2, 0.0, np.inf,
                                  epsabs=0.0, epsrel=1e-13, limit=200)[0]
            vals[i] = 0.25 + 0.25 * corr
    else:
        raise ValueError("kind must be 'kappa' or 'euler'")
    upper = 0.25 + 0.25 / np.log(t)
    strict = bool(np.all(vals > 0.25) and np.all(vals < upper))
    return {"t": t, "value": vals, "lower": 0.25, "upper": upper, "strict_enclosure": strict,
            "limsup_below_quarter": False}


def critical_curve(t, dps: int = 50):
    """chi_{w^2}(t) = 1 / (4 (v int_t^oo 1/v)^2), v = w^2 = t log^2 t, by quadrature."""
    with mpmath.workdps(dps):
        t = mpmath.mpf(t)
        L = mpmath.log(t)
        # s = t e^x turns int_t^oo ds / (s log^2 s) into int_0^oo dx / (L + x)^2
        tail = mpmath.quad(lambda x: 1 / (L + x) ** 2, [0, L, mpmath.inf])
        return 1 / (4 * (t * L**2 * tail) ** 2)


def critical_curve_identity(points: int = 1000, t_max: float = math.e**10, dps: int = 50,
                            seed: int = 0) -> dict:
    """kappa(t) - 1 - 1/(4t^2) against the critical curve of w^2.

    Both sides are evaluated at ``dps`` digits: kappa from its definition and
    the curve from a quadrature of 1/w^2.  The float evaluation of the excess
    is compared as well.
    """
    rng = np.random.default_rng(seed)
    t = np.sort(np.exp(rng.uniform(1.0, math.log(t_max), points)))
    t[:2] = math.e, math.e**2
    worst_mp = 0.0
    worst_float = 0.0
    with mpmath.workdps(dps):
        for ti in t.tolist():
            tm = mpmath.mpf(ti)
            kap = 1 + (1 + 1 / mpmath.log(tm) ** 2) / (4 * tm**2)
            lhs = kap - 1 - 1 / (4 * tm**2)
            rhs = critical_curve(ti, dps)
            worst_mp = max(worst_mp, float(abs(lhs - rhs) / rhs))
            worst_float = max(worst_float, float(abs(mpmath.mpf(float(KAPPA.excess_over_euler(ti))) - rhs) / rhs))
    return {"ok": bool(worst_mp <= 1e-14 and worst_float <= 1e-14), "points": points,
            "max_relative_difference": worst_mp, "float_relative_difference": worst_float,
            "t_range": [float(t[0]), float(t[-1])]}


# --------------------------------------------------------------------------
# barrier on a model manifold


@dataclass
class BarrierEnvelope:
    r: np.ndarray
    u: np.ndarray
    a: np.ndarray
    G: np.ndarray
    t: np.ndarray
    grad_log_G: np.ndarray
    phi: np.ndarray | None
    mode: str
    lam: float | None
    residual: np.ndarray = field(repr=False)  # Delta_h u + a u at certified nodes
    residual_scaled: np.ndarray = field(repr=False)
    certified: np.ndarray = field(repr=False)  # mask of certified nodes
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return bool(np.all(self.u > 0) and self.checks.get("residual_ok", False)
                    and all(v for k, v in self.checks.items() if k.endswith("_ok")))

    def as_dict(self) -> dict:
        return {"mode": self.mode, "lambda": self.lam, "ok": self.ok,
                "t_window": [float(self.t[0]), float(self.t[-1])], "checks": self.checks}


def _green_on(M: ModelManifold, kern: GreenKernel | None, r):
    if M.g.closed_form:
        return np.asarray(green_values(M, r), dtype=float)
    if kern is None or kern.G is None:
        raise GeometryError("need a nonparabolic Green kernel")
    return np.exp(np.interp(r, kern.r, np.log(kern.G)))


def _drift_laplacian(M: ModelManifold, r, u):
    """u'' + drift u' with three-point formulas on a non-uniform grid.

    Also returns the roundoff floor eps * sum |c_j u_j| of the stencil.
    """
    h0 = r[1:-1] - r[:-2]
    h1 = r[2:] - r[1:-1]
    den = h0 * h1 * (h0 + h1)
    drift = laplacian_drift(M, r[1:-1])
    c_plus = (2.0 * h0 + drift * h0**2) / den
    c_mid = (-2.0 * (h0 + h1) + drift * (h1**2 - h0**2)) / den
    c_minus = (2.0 * h1 - drift * h1**2) / den
    um, u0, up = u[:-2], u[1:-1], u[2:]
    lap = c_plus * up + c_mid * u0 + c_minus * um
    floor = 8.0 * np.finfo(float).eps * (np.abs(c_plus * up) + np.abs(c_mid * u0) + np.abs(c_minus * um))
    return lap, floor


def finite_index_barrier(M: ModelManifold, G: GreenKernel | None = None,
                         mode: str = "kappa_threshold", T: float = E2, lam: float = 1.0,
                         nodes_per_unit: int = 4000, tol: float = BARRIER_TOL) -> BarrierEnvelope:
    """u = sqrt(G) beta(t(r)) on {t(r) >= T} with a = (kappa or lam) |grad log G|^2 / 4.

    The nodes are uniform in t, so the barrier is resolved the same way on
    polynomially and exponentially decaying kernels.  The discrete residual
    Delta_h u + a u is certified relative to a u.
    """
    if G is not None and not G.nonparabolic:
        raise GeometryError("finite_index_barrier needs a nonparabolic Green kernel")
    if M.g.kind == "euclidean" and M.m == 2:
        raise GeometryError("Euclidean plane is parabolic")
    t_max = float(-0.5 * np.log(_green_on(M, G, np.array([M.R_max])))[0])
    if not t_max >= T + 1.0:
        raise GeometryError(f"t-range too short: t(R_max) = {t_max:.4g} < T + 1 = {T + 1:.4g}; "
                            "increase R_max")
    # invert t(r) on a fine geometric grid, then lay nodes uniformly in t
    probe = np.geomspace(M.R_max * 1e-12, M.R_max, 20001)
    tp = -0.5 * np.log(_green_on(M, G, probe))
    keep = np.isfinite(tp)
    probe, tp = probe[keep], tp[keep]
    if tp[0] > T:
        raise GeometryError("t(r) > T near the pole; choose a larger T")
    r_T = float(np.exp(np.interp(T, tp, np.log(probe))))
    count = max(64, int(nodes_per_unit * (t_max - T)))
    t_nodes = np.linspace(T, t_max, count + 1)
    r = np.exp(np.interp(t_nodes, tp, np.log(probe)))
    r[0], r[-1] = r_T, M.R_max
    r = np.unique(r)
    Gv = _green_on(M, G, r)
    t = -0.5 * np.log(Gv)
    grad = 1.0 / (M.weight(r) * Gv)

    if mode == "kappa_threshold":
        pot_factor = KAPPA(t)
        rep_kind = "kappa_threshold"
    elif mode == "constant_lambda":
        if lam > 1:
            raise ValueError("constant_lambda needs lam <= 1")
        pot_factor = np.full_like(t, lam)
        rep_kind = "constant_lambda"
    else:
        raise ValueError("mode must be kappa_threshold or constant_lambda")
    a = pot_factor * grad**2 / 4.0
    T0, T1 = float(t[0]), float(t[-1])
    if mode == "kappa_threshold":
        bs = solve_beta(Potential("kappa_threshold"), T0, T1, 1.0, 1.0, "log")
    else:
        b0, d0 = constant_lambda_closed_form(lam, T0)
        bs = solve_beta(Potential("constant_lambda", lam=lam), T0, T1, float(b0), float(d0), "t")
    beta, dbeta = bs(np.clip(t, T0, T1))
    u = np.sqrt(Gv) * beta

    lap, floor = _drift_laplacian(M, r, u)
    res = lap + a[1:-1] * u[1:-1]
    # Delta_h u + a u <= tol |a u| + roundoff, read as a ratio that must be <= tol
    au = np.abs(a[1:-1] * u[1:-1])
    scaled = (res - floor) / np.where(au > 0, au, 1.0)
    certified = np.zeros(r.size, dtype=bool)
    certified[1:-1] = True
    checks = {
        "positive_ok": bool(np.all(u > 0)),
        "residual_ok": bool(np.all(scaled <= tol)),
        "max_scaled_residual": float(np.max(scaled)),
        "max_residual": float(np.max(res)),
        "be_bed_min": float(np.min(beta - dbeta)),
        "nodes": int(r.size),
    }
    phi = None
    if mode == "kappa_threshold":
        phi = phi_values(Gv)
        ratio = u / phi
        last = t >= T1 - 0.5 * math.log(10.0)  # last decade of G
        checks["phi_ratio_drift_last_G_decade"] = float((ratio[last].max() - ratio[last].min()) / ratio[last].max())
    else:
        if lam == 1.0:
            closed = 0.5 * np.sqrt(Gv) * np.log(1.0 / Gv)
        else:
            closed = Gv ** ((1.0 - math.sqrt(1.0 - lam)) / 2.0)
        checks["closed_form_error"] = float(np.max(np.abs(u - closed) / closed))
        checks["closed_form_ok"] = bool(checks["closed_form_error"] <= 1e-8)
        if lam < 1.0:
            ratio = u / Gv ** ((1.0 - math.sqrt(1.0 - lam)) / 2.0)
            checks["power_ratio_spread"] = float(np.ptp(ratio) / np.max(ratio))
    return BarrierEnvelope(r, u, a, Gv, t, grad, phi, rep_kind, lam if mode != "kappa_threshold" else None,
                           res, scaled, certified, checks)


# --------------------------------------------------------------------------
# growth envelope


def phi_values(G) -> np.ndarray:
    """sqrt(G) sqrt(t log t) log log t with t = -log sqrt(G), C = 1."""
    G = np.asarray(G, dtype=float)
    t = -0.5 * np.log(G)
    return np.sqrt(G) * asymptotic_profile(t)


def phi_envelope(G, r=None) -> RadialFunction:
    """phi on the nodes where -log sqrt(G) > e.

    ``G`` is a GreenKernel or an array of kernel values (then ``r`` gives the
    nodes, defaulting to the sample index).
    """
    if isinstance(G, GreenKernel):
        if G.G is None:
            raise GeometryError("parabolic model: no Green kernel")
        r, vals = G.r, G.G
    else:
        vals = np.asarray(G, dtype=float)
        r = np.arange(vals.size, dtype=float) if r is None else np.asarray(r, dtype=float)
    t = -0.5 * np.log(vals)
    keep = t > math.e
    if np.count_nonzero(keep) < 2:
        raise ValueError("window too small: need -log sqrt(G) > e on at least two nodes")
    return RadialFunction(r[keep], phi_values(vals[keep]), None, {"C": 1.0, "t_min": float(t[keep].min())})
