"""Coefficients, the nonlinearity f(r,u) = a u - b u^sigma + c u^tau, and
barrier (sub/supersolution) constructions with discrete certificates."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fields import RadialField
from .model import (Certificate, ModelManifold, RadialFunction, RadialGrid,
                    RadialLaplacian)
from .spectral import (RadialSet, first_eigenpair, lambda1_ball,
                       lambda1_bounded_set, zero_set)

BARRIER_TOL = 1e-7


class CoefficientError(ValueError):
    pass


class HypothesisError(RuntimeError):
    """A theorem hypothesis failed; ``report`` lists the predicates."""

    def __init__(self, message: str, report: dict | None = None):
        super().__init__(message)
        self.report = report or {}


@dataclass(frozen=True)
class CoefficientSet:
    a: RadialField
    b: RadialField
    c: RadialField
    sigma: float
    tau: float

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, RadialField.coerce(getattr(self, name)))
        if not self.sigma > 1:
            raise CoefficientError(f"sigma must exceed 1 (got {self.sigma}); the equation needs sigma > 1")
        if not self.tau < 1:
            raise CoefficientError(f"tau must be below 1 (got {self.tau}); the equation needs tau < 1")
        probe = np.linspace(0.0, 50.0, 2001)
        for name in ("b", "c"):
            f = getattr(self, name)
            if f.r_samples is not None:
                probe_f = f.r_samples
            else:
                probe_f = probe
            vals = f(probe_f)
            if np.any(vals < -1e-14) or np.any(np.isnan(vals)):
                raise CoefficientError(f"coefficient {name} must be nonnegative (sign condition)")

    @classmethod
    def constant(cls, a, b, c, sigma, tau) -> "CoefficientSet":
        return cls(RadialField.constant(a), RadialField.constant(b), RadialField.constant(c),
                   float(sigma), float(tau))

    def sample(self, r):
        r = np.asarray(r, dtype=float)
        a, b, c = self.a(r), self.b(r), self.c(r)
        if np.any(b < -1e-14) or np.any(c < -1e-14):
            raise CoefficientError("b and c must be nonnegative on the sampled range")
        return a, np.maximum(b, 0.0), np.maximum(c, 0.0)

    def inverted(self) -> "CoefficientSet":
        """Coefficients of the equation satisfied by v = 1/u."""
        a = self.a
        neg_a = RadialField.from_callable(lambda r: -a(r), label=f"-({a.label})")
        return CoefficientSet(neg_a, self.c, self.b, 2.0 - self.tau, 2.0 - self.sigma)

    def with_a(self, a) -> "CoefficientSet":
        return CoefficientSet(RadialField.coerce(a), self.b, self.c, self.sigma, self.tau)

    def describe(self) -> dict:
        return {"a": self.a.to_spec(), "b": self.b.to_spec(), "c": self.c.to_spec(),
                "sigma": self.sigma, "tau": self.tau}


def nonlinearity(a, b, c, sigma, tau, u):
    """Array form of a u - b u^sigma + c u^tau (no validation)."""
    return a * u - b * u**sigma + c * u**tau


def f_eval(C: CoefficientSet, r, u):
    u_arr = np.asarray(u, dtype=float)
    if np.any(u_arr < 0) or (C.tau < 0 and np.any(u_arr <= 0)):
        raise ValueError("f is evaluated on positive u only (u^tau is singular at 0)")
    a, b, c = C.sample(r)
    with np.errstate(divide="ignore"):
        cterm = np.where(c == 0, 0.0, c * u_arr**C.tau)
    out = a * u_arr - b * u_arr**C.sigma + cterm
    return float(out) if np.ndim(out) == 0 else out


def quotient_monotone_check(C: CoefficientSet, r, s_grid) -> bool:
    """True iff s -> f(r,s)/s is nonincreasing on s_grid at every r."""
    s = np.asarray(s_grid, dtype=float)
    if np.any(s <= 0) or np.any(np.diff(s) <= 0):
        raise ValueError("s_grid must be positive and increasing")
    for ri in np.atleast_1d(r):
        a, b, c = (float(x) for x in C.sample(ri))
        q = a - b * s ** (C.sigma - 1) + c * s ** (C.tau - 1)
        dq = -(C.sigma - 1) * b * s ** (C.sigma - 2) + c * (C.tau - 1) * s ** (C.tau - 2)
        scale = np.abs(a) + b * s ** (C.sigma - 1) + c * s ** (C.tau - 1)
        if np.any(np.diff(q) > 1e-12 * np.maximum(scale[1:], 1.0)) or np.any(dq > 0):
            return False
    return True


# --------------------------------------------------------------------------
# discrete residuals and certificates


def residual(M: ModelManifold, grid: RadialGrid, C: CoefficientSet, u: np.ndarray,
             lap: RadialLaplacian | None = None):
    """(Delta_h u + f(u), scale) at the interior nodes of ``grid``.

    ``scale`` is the size of the individual terms, used for relative tests.
    """
    lap = lap or RadialLaplacian(M, grid)
    sl = lap.interior
    r = grid.nodes[sl]
    ui = np.asarray(u, dtype=float)[sl]
    a, b, c = C.sample(r)
    lu = lap.apply(u)
    with np.errstate(divide="ignore", invalid="ignore"):
        cterm = np.where(c == 0, 0.0, c * ui**C.tau)
    bterm = b * ui**C.sigma
    res = lu + a * ui - bterm + cterm
    scale = np.abs(lu) + np.abs(a * ui) + bterm + np.abs(cterm)
    return res, scale


def certify(M: ModelManifold, grid: RadialGrid, C: CoefficientSet, u: np.ndarray,
            role: str, tol: float = BARRIER_TOL, mask=None) -> Certificate:
    """Residual certificate for a subsolution ('sub') or supersolution ('super').

    Residuals are divided by max(1, size of the terms) before comparing with
    ``tol``; for order-one data this is the plain absolute residual.
    """
    with np.errstate(all="ignore"):
        res, scale = residual(M, grid, C, u)
        rel = res / np.maximum(scale, 1.0)
    if mask is not None:
        rel = rel[np.asarray(mask)[RadialLaplacian(M, grid).interior]]
    if rel.size == 0:
        return Certificate(role, 0.0, tol, {"nodes": 0})
    if np.any(np.isnan(rel)):
        worst = -math.inf if role == "sub" else math.inf
    else:
        worst = float(np.min(rel)) if role == "sub" else float(np.max(rel))
    return Certificate(role, worst, tol, {"nodes": int(rel.size), "h": grid.h})


# --------------------------------------------------------------------------
# ratio bounds and constant barriers


@dataclass
class RatioBounds:
    H: float
    K: float
    H_script: float
    K_script: float
    tail_flags: dict = field(default_factory=dict)

    @property
    def finite(self) -> bool:
        return math.isfinite(self.H) and math.isfinite(self.K)


def _safe_ratio(num, den):
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den > 0, num / np.where(den > 0, den, 1.0),
                       np.where(num > 0, math.inf, 0.0))
    return out


def ratio_bounds(C: CoefficientSet, M: ModelManifold, n: int = 4000) -> RatioBounds:
    r = np.linspace(0.0, M.R_max, n + 1)
    a, b, c = C.sample(r)
    H = float(np.max(_safe_ratio(np.maximum(a, 0) + c, b)))
    K = float(np.max(_safe_ratio(np.maximum(-a, 0) + b, c)))
    Hs = max(1.0, H ** (1.0 / (C.sigma - 1))) if math.isfinite(H) else math.inf
    if not math.isfinite(K):
        Ks = 0.0
    elif K == 0:
        Ks = 1.0
    else:
        Ks = min(1.0, K ** (1.0 / (C.tau - 1)))
    flags = {}
    for name in ("a", "b", "c"):
        lim = getattr(C, name).tail_limit()
        flags[name] = "unknown" if lim is None else lim
    return RatioBounds(H, K, Hs, Ks, flags)


@dataclass
class BarrierPair:
    sub: RadialFunction
    sup: RadialFunction
    R: float
    certificates: dict = field(default_factory=dict)

    @property
    def ordered(self) -> bool:
        nodes = np.union1d(self.sub.r, self.sup.r)
        return bool(np.all(self.sub(nodes) <= self.sup(nodes) * (1 + 1e-12) + 1e-14))


def constant_barriers(C: CoefficientSet, M: ModelManifold, n: int = 2000,
                      cover: tuple | None = None) -> BarrierPair:
    """Constant barriers K_script <= H_script.

    ``cover=(lo, hi)`` widens them to min(K_script, lo) and max(H_script, hi);
    constants outside [K_script, H_script] keep their roles.
    """
    rb = ratio_bounds(C, M)
    if not rb.finite:
        raise HypothesisError("no constant barriers: H or K is infinite; use lemma1_supersolution",
                              {"H": rb.H, "K": rb.K})
    lo_v, hi_v = rb.K_script, rb.H_script
    if cover is not None:
        lo_v, hi_v = min(lo_v, float(cover[0])), max(hi_v, float(cover[1]))
    r = np.linspace(0.0, M.R_max, n + 1)
    f_sup = f_eval(C, r, np.full(r.shape, hi_v))
    f_sub = f_eval(C, r, np.full(r.shape, lo_v))
    # the Laplacian of a constant vanishes, so f alone is the residual
    cert_sup = Certificate("super", float(np.max(f_sup)), BARRIER_TOL, {"value": hi_v})
    cert_sub = Certificate("sub", float(np.min(f_sub)), BARRIER_TOL, {"value": lo_v})
    sup = RadialFunction.constant(r, hi_v, cert_sup)
    sub = RadialFunction.constant(r, lo_v, cert_sub)
    sup.meta["constant"] = True
    sub.meta["constant"] = True
    return BarrierPair(sub, sup, M.R_max, {"sub": cert_sub, "sup": cert_sup})


# --------------------------------------------------------------------------
# scalar helpers


def smallest_admissible(pred, lo: float = 1e-12, hi: float = 1.0, iters: int = 60,
                        inflate: float = 1.05) -> float:
    """Smallest x > 0 with pred(x) true, for pred monotone (false -> true).

    Bisection in log scale, then multiplied by ``inflate``.  Returns 0 when
    pred already holds at ``lo``.
    """
    if pred(lo):
        return 0.0
    while not pred(hi):
        hi *= 2.0
        if hi > 1e300:
            raise HypothesisError("no admissible constant found")
    llo, lhi = math.log(lo), math.log(hi)
    for _ in range(iters):
        mid = 0.5 * (llo + lhi)
        if pred(math.exp(mid)):
            lhi = mid
        else:
            llo = mid
    return math.exp(lhi) * inflate


def quintic_ramp(r, r0: float, r1: float):
    """1 for r <= r0, 0 for r >= r1, C^2 smoothstep in between."""
    x = np.clip((np.asarray(r, dtype=float) - r0) / (r1 - r0), 0.0, 1.0)
    return 1.0 - x**3 * (10.0 - 15.0 * x + 6.0 * x**2)


# --------------------------------------------------------------------------
# Lemma-type supersolution


@dataclass
class Lemma1Data:
    Lambda0: float
    gamma: float
    Gamma0: float
    Gamma1: float
    lambda_D: float
    C0: float
    eps: float
    E: float
    radii: dict


def auto_nested_balls(M: ModelManifold, a_bar, B0: RadialSet, R_omega: float, h: float):
    """Pick D' subset D around B0 with lambda_1^{Delta + a_bar}(D) > 0."""
    if B0.kind == "empty":
        return None
    r0 = B0.r_out if B0.kind != "point" else 0.0
    gap = 0.5 * (R_omega - r0)
    width = max(min(0.5 * max(r0, 0.1), gap), 8 * h)
    while width >= 8 * h:
        d1 = r0 + width / 2
        d2 = r0 + width
        d1 = h * math.ceil(d1 / h)
        d2 = h * math.ceil(d2 / h)
        if d2 < R_omega - h:
            lam = first_eigenpair(M, RadialField.coerce(a_bar)(np.arange(round(d2 / h) + 1) * h),
                                  RadialGrid(0.0, d2, int(round(d2 / h)))).lambda1
            if lam > 0:
                return d1, d2
        width /= 2
    raise HypothesisError("cannot find a spectrally small ball around the zero set of b")


def lemma1_supersolution(C: CoefficientSet, M: ModelManifold, a_bar, R_omega: float,
                         D_prime: float | None = None, D: float | None = None,
                         n: int = 2000, h: float | None = None) -> RadialFunction:
    """Supersolution gamma*(psi u1 + (1-psi) Lambda0) on the ball of radius R_omega.

    ``D_prime`` and ``D`` are the radii of the balls around the zero set of
    b.  Pass both as None when b > 0 on the whole ball; the result is then
    the constant Lambda0.
    """
    a_bar = RadialField.coerce(a_bar)
    h = h or R_omega / n
    grid = RadialGrid.with_spacing(R_omega, h)
    r = grid.nodes
    Cb = C.with_a(a_bar)
    ab, b, c = Cb.sample(r)
    sig, tau = C.sigma, C.tau

    if D_prime is None:
        inner = np.zeros(r.shape, dtype=bool)
    else:
        if not 0 < D_prime < D < R_omega:
            raise ValueError("need 0 < D' < D < R_omega")
        inner = r < D_prime - 1e-12
    outer = ~inner  # closure of Omega minus D'
    beta = float(np.min(b[outer]))
    if beta <= 0:
        raise HypothesisError("b vanishes outside D' (beta = 0)", {"beta": beta})
    alpha = float(np.max(ab[outer]))
    delta = float(np.max(c[outer]))

    def lam0_ok(U):
        return alpha - beta * U ** (sig - 1) + delta * U ** (tau - 1) <= 0

    Lambda0 = smallest_admissible(lam0_ok) or 1.0

    if D_prime is None:
        w = np.full(r.shape, Lambda0)
        data = Lemma1Data(Lambda0, 1.0, 0.0, 0.0, math.inf, 0.0, 0.0, 0.0, {})
        gamma = 1.0
    else:
        nD = int(round(D / h))
        D = nD * h
        eig = first_eigenpair(M, a_bar(r[: nD + 1]), RadialGrid(0.0, D, nD))
        lamD = eig.lambda1
        if lamD <= 0:
            raise HypothesisError("lambda_1(D) <= 0: D is not spectrally small", {"lambda_D": lamD})
        u1 = np.zeros(r.shape)
        u1[: nD + 1] = eig.eigenfunction.values
        u1 /= u1.max()
        ramp_end = D - 0.1 * (D - D_prime)
        psi = quintic_ramp(r, D_prime, ramp_end)
        w = psi * u1 + (1.0 - psi) * Lambda0
        lap = RadialLaplacian(M, grid)
        Lw = np.full(r.shape, np.nan)
        Lw[lap.interior] = lap.apply(w) + ab[lap.interior] * w[lap.interior]
        # nodes whose three-point stencil sees only psi == 1
        full = psi == 1.0
        pure = full & np.roll(full, -1) & np.roll(full, 1)
        pure[0] = full[0] and full[1]
        pure[-1] = False
        ramp = ~pure & (r < D) & ~np.isnan(Lw)
        dmask = pure & ~np.isnan(Lw)
        cmax = float(np.max(c[dmask])) if np.any(dmask) else 0.0
        u1min = float(np.min(u1[dmask])) if np.any(dmask) else 1.0

        def g0_ok(g):
            return cmax * (g * u1min) ** (tau - 1) <= lamD

        Gamma0 = smallest_admissible(g0_ok) if cmax > 0 else 0.0
        C0 = max(float(np.max(Lw[ramp])), 0.0)
        eps = float(np.min(b[ramp] * w[ramp] ** sig))
        E = float(np.max(c[ramp] * w[ramp] ** tau))
        if eps <= 0:
            raise HypothesisError("b vanishes on the cut-off region", {"eps": eps})

        def g1_ok(g):
            return C0 - eps * g ** (sig - 1) + E * g ** (tau - 1) <= 0

        Gamma1 = smallest_admissible(g1_ok)
        gamma = max(1.0, Gamma0, Gamma1)
        data = Lemma1Data(Lambda0, gamma, Gamma0, Gamma1, lamD, C0, eps, E,
                          {"D_prime": D_prime, "D": D, "ramp_end": ramp_end})
    u = gamma * w
    cert = certify(M, grid, Cb, u, "super")
    out = RadialFunction(r, u, cert, {"lemma1": data.__dict__})
    if not cert.ok:
        raise HypothesisError(f"supersolution certificate failed (worst residual {cert.worst:.3g})",
                              {"lemma1": data.__dict__})
    return out


# --------------------------------------------------------------------------
# property (Sigma)


@dataclass
class SigmaResult:
    holds: bool
    witness: RadialFunction | None
    route: str | None
    diagnostics: dict


def _eig_route_witness(M, C: CoefficientSet, R_ext: float, h: float, Lambdas):
    """Scaled first eigenfunction of Delta + a - b + Lambda c on B_{R_ext}.

    Returns (Lambda, phi values on the grid, lambda) for the first Lambda
    with negative eigenvalue, or None.
    """
    grid = RadialGrid.with_spacing(R_ext, h)
    r = grid.nodes
    a, b, c = C.sample(r)
    tried = []
    for Lam in Lambdas:
        eig = first_eigenpair(M, a - b + Lam * c, grid)
        tried.append((float(Lam), eig.lambda1))
        if eig.lambda1 < 0:
            psi = eig.eigenfunction.values / eig.eigenfunction.values.max()
            mu = min(1.0, Lam ** (1.0 / (C.tau - 1)))
            return Lam, mu * psi, eig.lambda1, grid, tried
    return None, None, None, grid, tried


def sigma_property(C: CoefficientSet, M: ModelManifold, R: float, user_witness=None,
                   n: int = 2000, routes=("i", "ii", "iii")) -> SigmaResult:
    """Look for a positive subsolution on B_R by the three standard routes.

    Every route is attempted and recorded; ``route`` names the first one in
    order whose witness passes the residual check.
    """
    h = R / n
    diag: dict = {}
    found = None
    grid_R = RadialGrid.with_spacing(R, h)

    if "i" in routes:
        ext = max(2, n // 20)
        R_ext = R + ext * h
        Lambdas = np.geomspace(1e-3, 1e3, 25)
        Lam, phi, lam, grid, tried = _eig_route_witness(M, C, R_ext, h, Lambdas)
        if Lam is None:
            diag["i"] = {"ok": False, "reason": "eigenvalue stayed nonnegative", "tried": tried[-3:]}
        else:
            keep = grid.nodes <= R + 1e-12
            cert = certify(M, grid, C, phi, "sub", mask=keep)
            wit = RadialFunction(grid.nodes[keep], phi[keep], cert, {"route": "i", "Lambda": float(Lam)})
            diag["i"] = {"ok": cert.ok, "Lambda": float(Lam), "lambda1": lam, "worst": cert.worst}
            if cert.ok and found is None:
                found = ("i", wit)

    if "ii" in routes:
        try:
            C0 = zero_set(M, C.c)
            if C0.kind == "ball" and C0.r_out >= M.R_max:
                raise HypothesisError("c vanishes identically: C0 is unbounded")
            neg_a = RadialField.from_callable(lambda r: -C.a(r))
            lam_c0 = lambda1_bounded_set(M, neg_a, C0)
            if not lam_c0 > 0:
                raise HypothesisError(f"lambda_1^(Delta - a)(C0) = {lam_c0:.4g} <= 0")
            Ci = C.inverted()
            balls = auto_nested_balls(M, Ci.a, C0, R, h) if C0.kind != "empty" else None
            psi = lemma1_supersolution(Ci, M, Ci.a, R, *(balls or (None, None)), h=h)
            phi = 1.0 / psi.values
            cert = certify(M, grid_R, C, phi, "sub")
            wit = RadialFunction(grid_R.nodes, phi, cert, {"route": "ii"})
            diag["ii"] = {"ok": cert.ok, "lambda1_C0": lam_c0, "C0": C0.describe(), "worst": cert.worst}
            if cert.ok and found is None:
                found = ("ii", wit)
        except HypothesisError as exc:
            diag["ii"] = {"ok": False, "reason": str(exc)}

    if "iii" in routes:
        if user_witness is None:
            diag["iii"] = {"ok": False, "reason": "no user witness supplied"}
        else:
            if isinstance(user_witness, RadialFunction):
                vals = user_witness(grid_R.nodes)
            elif callable(user_witness):
                vals = np.asarray(user_witness(grid_R.nodes), dtype=float)
            else:
                vals = np.full(grid_R.nodes.shape, float(user_witness))
            if np.any(vals <= 0):
                diag["iii"] = {"ok": False, "reason": "user witness not positive"}
            else:
                cert = certify(M, grid_R, C, vals, "sub")
                wit = RadialFunction(grid_R.nodes, vals, cert, {"route": "iii"})
                diag["iii"] = {"ok": cert.ok, "worst": cert.worst}
                if cert.ok and found is None:
                    found = ("iii", wit)

    if found is None:
        return SigmaResult(False, None, None, diag)
    return SigmaResult(True, found[1], found[0], diag)


# --------------------------------------------------------------------------
# global subsolutions


def pasted_subsolution(C: CoefficientSet, M: ModelManifold, rho1: float, rho2: float,
                       R_out: float | None = None, n: int = 2000) -> RadialFunction:
    """Max-pasting of an interior subsolution on B_rho2 with a small constant.

    u_- = u1 on B_rho1, max(u1, mu_*) on B_rho2 minus B_rho1, mu_* outside,
    with mu_* = min{1, mu^{1/(tau-1)}, nu/2}, mu = sup_{r > rho1} (a_- + b)/c
    and nu = u1(rho1).
    """
    R_out = R_out or M.R_max
    if not 0 < rho1 < rho2 <= R_out:
        raise ValueError("need 0 < rho1 < rho2 <= R_out (Omega1 compactly inside Omega2)")
    h = R_out / n
    rho1 = h * round(rho1 / h)
    rho2 = h * round(rho2 / h)
    if rho2 - rho1 < 2 * h:
        raise ValueError("Omega1 must be compactly contained in Omega2")
    grid = RadialGrid.with_spacing(R_out, h)
    r = grid.nodes
    a, b, c = C.sample(r)

    report = hypotheses_theorem_b(C, M, rho1, rho2)
    if not all(v["ok"] for v in report.values()):
        raise HypothesisError("Theorem B hypotheses fail", report)
    mu = report["hp2"]["mu"]

    Lambdas = np.geomspace(1e-3, 1e4, 29)
    Lam, u1_vals, lam, g2, tried = _eig_route_witness(M, C, rho2, h, Lambdas)
    if Lam is None:
        raise HypothesisError("no interior subsolution on Omega2 (eigenvalue stays >= 0)",
                              {"tried": tried[-3:]})
    u1 = np.zeros(r.shape)
    n2 = g2.n
    u1[: n2 + 1] = u1_vals
    i1 = int(round(rho1 / h))
    nu = float(u1[i1])
    mu_part = mu ** (1.0 / (C.tau - 1)) if mu > 0 else math.inf
    mu_star = min(1.0, mu_part, nu / 2)

    u = np.where(r <= rho1 + 1e-12, u1, np.where(r < rho2 - 1e-12, np.maximum(u1, mu_star), mu_star))
    cert = certify(M, grid, C, u, "sub")

    # one-sided kink check where the active branch switches
    branch = np.where(r <= rho1 + 1e-12, 0, np.where(u1 >= mu_star, 0, 1))
    switch = np.flatnonzero(np.diff(branch) != 0)
    iface = np.unique(np.concatenate([switch, switch + 1]))
    iface = iface[iface < grid.n]
    kink_ok = True
    if iface.size:
        const = np.full(r.shape, mu_star)
        with np.errstate(all="ignore"):
            res_u1, _ = residual(M, grid, C, u1)
        res_c, _ = residual(M, grid, C, const)
        for i in iface:
            active = u1 if branch[i] == 0 else const
            nb = [j for j in (i - 1, i + 1) if 0 <= j <= grid.n]
            dominates = all(u[j] >= active[j] - 1e-15 for j in nb)
            act_res = res_u1[i] if branch[i] == 0 else res_c[i]
            kink_ok &= bool(dominates and act_res >= -BARRIER_TOL)
    cert.notes.update({"interface_nodes": iface.tolist(), "kink_ok": kink_ok})
    meta = {"mu": mu, "mu_star": mu_star, "nu": nu, "Lambda": float(Lam), "lambda1": lam,
            "rho1": rho1, "rho2": rho2, "hypotheses": report}
    return RadialFunction(r, u, cert, meta)


def theoremB_pasted_subsolution(C, M, Omega1, Omega2, R_out=None, n: int = 2000):
    return pasted_subsolution(C, M, Omega1, Omega2, R_out, n)


def hypotheses_theorem_b(C: CoefficientSet, M: ModelManifold, rho1: float, rho2: float) -> dict:
    B0 = zero_set(M, C.b)
    lam_b0 = lambda1_bounded_set(M, C.a, B0)
    C0 = zero_set(M, C.c)
    r = np.linspace(rho1, M.R_max, 4001)[1:]
    a, b, c = C.sample(r)
    ratio = _safe_ratio(np.maximum(-a, 0) + b, c)
    mu = float(np.max(ratio))
    neg_a = RadialField.from_callable(lambda s: -C.a(s))
    lam_o2 = lambda1_ball(M, neg_a, rho2).lambda1
    c0_inside = C0.kind == "empty" or C0.r_out < rho1
    return {
        "hp1": {"ok": bool(lam_b0 > 0), "lambda1_B0": lam_b0, "B0": B0.describe()},
        "hp2": {"ok": bool(math.isfinite(mu) and c0_inside), "mu": mu, "C0": C0.describe()},
        "hp3": {"ok": bool(lam_o2 > 0), "lambda1_Omega2": lam_o2},
    }


def yamabe_subsolution(C: CoefficientSet, M: ModelManifold, R1: float,
                       R_out: float | None = None, n: int = 2000) -> RadialFunction:
    """Global subsolution from a negative Dirichlet eigenvalue of Delta + a.

    eps*phi solves Delta v + a v - b v^sigma >= 0 on B_R1 once
    eps^(sigma-1) sup(b phi^(sigma-1)) <= -lambda_1; c >= 0 only helps.  It is
    extended by zero and max-pasted with a constant floor delta that is a
    subsolution wherever c > 0.
    """
    R_out = R_out or M.R_max
    h = R_out / n
    R1 = h * round(R1 / h)
    grid = RadialGrid.with_spacing(R_out, h)
    r = grid.nodes
    n1 = int(round(R1 / h))
    eig = first_eigenpair(M, C.a(r[: n1 + 1]), RadialGrid(0.0, R1, n1))
    if eig.lambda1 >= 0:
        raise HypothesisError("lambda_1^(Delta + a)(B_R1) >= 0: no Yamabe-type subsolution",
                              {"lambda1": eig.lambda1})
    phi = eig.eigenfunction.values / eig.eigenfunction.values.max()
    a, b, c = C.sample(r)
    bphi = float(np.max(b[: n1 + 1] * phi ** (C.sigma - 1)))
    eps = 1.0 if bphi == 0 else 0.9 * (-eig.lambda1 / bphi) ** (1.0 / (C.sigma - 1))
    v = np.zeros(r.shape)
    v[: n1 + 1] = eps * phi
    if np.all(c > 0):
        floor = np.minimum(1.0, (c / (np.maximum(-a, 0) + b + 1e-300)) ** (1.0 / (1.0 - C.tau)))
        delta = 0.5 * float(np.min(floor))
    else:
        delta = 0.0
    u = np.maximum(v, delta)
    cert = certify(M, grid, C, u, "sub", mask=u > 0)
    meta = {"lambda1": eig.lambda1, "R1": R1, "eps": eps, "floor": delta}
    return RadialFunction(r, u, cert, meta)
