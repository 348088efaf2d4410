"""Monotone iteration for radial Dirichlet problems and the constructions
built on it: boundary-data sequences, blow-up solutions, exhaustion to the
maximal solution, discrete comparison and an L^2 uniqueness diagnostic."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid
from scipy.linalg import solve_banded

from .model import (Certificate, ModelManifold, RadialFunction, RadialGrid,
                    RadialLaplacian, sphere_area)
from .nonlinearity import (BarrierPair, CoefficientSet,
                           HypothesisError, auto_nested_balls, certify,
                           constant_barriers, lemma1_supersolution,
                           ratio_bounds, residual)
from .spectral import lambda1_bounded_set, zero_set

STEP_TOL = 1e-10
RESIDUAL_TOL = 1e-8
COMPARE_TOL = 1e-10
FLOOR = 1e-14
MAX_ITER = 100_000


class SolverError(RuntimeError):
    pass


class PreconditionError(ValueError):
    pass


@dataclass
class DirichletProblem:
    M: ModelManifold
    C: CoefficientSet
    R: float
    boundary_value: float
    barriers: BarrierPair
    n: int = 2000
    layers: int = 0

    @property
    def grid(self) -> RadialGrid:
        return RadialGrid(0.0, self.R, self.n, self.layers)


@dataclass
class SolveReport:
    solution: RadialFunction
    iterations: int
    residual_max: float
    trace: list
    bound_checks: dict = field(default_factory=dict)
    monotone_violation: float = 0.0
    sandwich_ok: bool = True
    floor_hit: bool = False
    boundary_value: float = math.nan

    def as_dict(self) -> dict:
        return {
            "boundary_value": self.boundary_value,
            "iterations": self.iterations,
            "residual_max": self.residual_max,
            "monotone_violation": self.monotone_violation,
            "sandwich_ok": self.sandwich_ok,
            "floor_hit": self.floor_hit,
            "bound_checks": self.bound_checks,
            "certificates": self.solution.certificate.as_dict() if self.solution.certificate else None,
            "trace_tail": [float(x) for x in self.trace[-5:]],
        }


def _shift(a, b, c, sigma, tau, lo, hi):
    """Per-node upper bound of -df/du on [lo, hi], plus a 10% margin."""
    with np.errstate(divide="ignore", invalid="ignore"):
        cpart = np.where(c == 0, 0.0, np.maximum(-tau * c * lo ** (tau - 1), -tau * c * hi ** (tau - 1)))
    s = sigma * b * hi ** (sigma - 1) - a + cpart
    return 1.1 * np.maximum(s, 0.0)


def _scaled_residual(M, grid, C, u, lap):
    """Max relative residual on the uniform nodes, and on layer nodes the
    worst ratio to max(tol, roundoff floor of the stencil)."""
    res, scale = residual(M, grid, C, u, lap)
    rel = np.abs(res) / np.maximum(scale, 1.0)
    sl = lap.interior
    idx = np.arange(grid.size + 1)[sl]
    uniform = idx < grid.n
    uniform_max = float(np.max(rel[uniform]))
    if grid.layers == 0:
        return uniform_max, 0.0
    # the stored values are exact only to eps * |u|; the stencil multiplies
    # that by (k_l + k_r) / V, which is huge on the geometric layer
    ua = np.abs(np.asarray(u, dtype=float))
    kl = np.where(idx > 0, lap.kface[np.maximum(idx - 1, 0)], 0.0)
    kr = lap.kface[idx]
    stencil = (kl * (ua[np.maximum(idx - 1, 0)] + ua[idx]) + kr * (ua[idx] + ua[idx + 1])) / lap.V[sl]
    floor = 4.0 * np.finfo(float).eps * stencil / np.maximum(scale, 1.0)
    layer_ratio = rel[~uniform] / np.maximum(RESIDUAL_TOL, floor[~uniform])
    return uniform_max, float(np.max(layer_ratio))


def _converged(parts) -> bool:
    return parts[0] < RESIDUAL_TOL and parts[1] <= 1.0


def solve_dirichlet(P: DirichletProblem, start: np.ndarray | None = None,
                    check_barriers: bool = True) -> SolveReport:
    """Descending monotone iteration from the supersolution.

    ``start`` may replace the supersolution as initial iterate; it must
    itself be a supersolution lying above the subsolution.
    """
    M, C, grid = P.M, P.C, P.grid
    r = grid.nodes
    lap = RadialLaplacian(M, grid)
    sl = lap.interior
    bv = float(P.boundary_value)
    if not (bv > 0 and math.isfinite(bv)):
        raise PreconditionError("boundary value must be positive and finite")
    sub = P.barriers.sub.on(r)
    sup = P.barriers.sup.on(r) if start is None else np.asarray(start, dtype=float).copy()
    if np.any(sub > sup * (1 + 1e-12) + 1e-14):
        raise PreconditionError("barriers are not ordered (sub > sup somewhere)")
    if not (sub[-1] <= bv * (1 + 1e-12) and bv <= sup[-1] * (1 + 1e-12)):
        raise PreconditionError(
            f"boundary value {bv:g} outside barrier interval [{sub[-1]:g}, {sup[-1]:g}]")
    sub[-1] = bv
    u = sup.copy()
    u[-1] = bv
    if check_barriers:
        # barriers are interpolated onto layer nodes, so only stencils lying
        # wholly on the uniform part are meaningful
        native = np.arange(r.size) < (grid.n - 1 if grid.layers else r.size)
        c_sub = certify(M, grid, C, sub, "sub", mask=(sub > 0) & native)
        c_sup = certify(M, grid, C, u, "super", mask=native)
        if not (c_sub.ok and c_sup.ok):
            raise PreconditionError(
                f"barrier certificates fail on the solve grid (sub {c_sub.worst:.3g}, sup {c_sup.worst:.3g})")

    a, b, c = C.sample(r[sl])
    sig, tau = C.sigma, C.tau
    lower, diag, upper, _, _ = lap.tridiagonal()
    if np.any(lower > 0) or np.any(upper > 0) or np.any(diag * (1 + 1e-12) < -(np.r_[0.0, lower] + np.r_[upper, 0.0])):
        raise SolverError("discrete Laplacian is not an M-matrix")
    N = diag.size
    ab = np.zeros((3, N))
    ab[0, 1:] = upper
    ab[2, :-1] = lower
    sub_i = sub[sl]

    trace = []
    mono_worst = 0.0
    floor_hit = False
    prev_step = None
    with np.errstate(divide="ignore", invalid="ignore"):
        for it in range(1, MAX_ITER + 1):
            ui = u[sl]
            fk = a * ui - b * ui**sig + np.where(c == 0, 0.0, c * ui**tau)
            # correction form: (-Delta_h + lam) d = Delta_h u + f(u), zero data
            defect = lap.apply(u) + fk
            levels = []
            if prev_step is not None:
                levels.append(np.maximum(sub_i, ui - 4.0 * prev_step))
            levels += [np.maximum(sub_i, th * ui) for th in (0.5, 0.25, 0.05)]
            levels.append(np.maximum(sub_i, FLOOR))
            for lvl in levels:
                lam = _shift(a, b, c, sig, tau, np.maximum(lvl, FLOOR), ui)
                ab[1] = diag + lam
                new = ui + solve_banded((1, 1), ab, defect)
                if np.all(new >= lvl - 1e-12 * np.maximum(1.0, np.abs(lvl))):
                    break
            # the last level is the subsolution itself: the textbook scheme
            rise = new - ui
            scale_u = np.maximum(1.0, np.abs(ui))
            mono_worst = max(mono_worst, float(np.max(rise / scale_u)))
            if np.any(new < sub_i - 1e-9 * np.maximum(1.0, sub_i)):
                raise SolverError("iterate fell below the subsolution")
            if np.any(new < FLOOR):
                floor_hit = True
                new = np.maximum(new, FLOOR)
            step_vec = np.abs(rise)
            step = float(np.max(step_vec / scale_u))
            prev_step = step_vec
            u[sl] = new
            trace.append(step)
            if step < STEP_TOL and _converged(_scaled_residual(M, grid, C, u, lap)):
                break
        else:
            raise SolverError(f"no convergence in {MAX_ITER} iterations")

    res_max, layer_ratio = _scaled_residual(M, grid, C, u, lap)
    sup_vals = P.barriers.sup.on(r)
    sandwich = bool(np.all(u[sl] >= sub_i - 1e-9 * np.maximum(1, sub_i))
                    and np.all(u[sl] <= sup_vals[sl] * (1 + 1e-9) + 1e-9))
    notes = {"h": grid.h}
    if grid.layers:
        notes.update({"layers": grid.layers, "layer_residual_over_floor": layer_ratio})
    cert = Certificate("solution", res_max, RESIDUAL_TOL, notes)
    sol = RadialFunction(r, u, cert, {"R": P.R, "boundary_value": bv})
    return SolveReport(sol, it, res_max, trace, {}, mono_worst, sandwich, floor_hit, bv)


# --------------------------------------------------------------------------
# boundary-data sequences and blow-up


def _scaled(fun: RadialFunction, zeta: float) -> RadialFunction:
    cert = fun.certificate
    return RadialFunction(fun.r, zeta * fun.values, cert, dict(fun.meta))


def boundary_n_sequence(P: DirichletProblem, K: int, start_k: int = 0) -> list:
    """Solve with boundary data n = 2^k, k = start_k..K, warm-starting from 2 u_{n}.

    For f(s)/s nonincreasing, 2 u_n is a supersolution of the problem with
    data 2n, and so is zeta * sup with zeta = max(1, 2n / sup(R)).
    """
    reports = []
    r = P.grid.nodes
    sup0 = P.barriers.sup.on(r)
    prev = None
    for k in range(start_k, K + 1):
        nval = 2.0**k
        zeta = max(1.0, nval / sup0[-1])
        start = zeta * sup0
        if prev is not None:
            start = np.minimum(start, 2.0 * prev)
        bars = BarrierPair(P.barriers.sub, _scaled(P.barriers.sup, zeta), P.R, P.barriers.certificates)
        Pk = DirichletProblem(P.M, P.C, P.R, nval, bars, P.n, P.layers)
        rep = solve_dirichlet(Pk, start=start, check_barriers=prev is None)
        if prev is not None:
            scale = np.maximum(1.0, prev)
            if np.any(rep.solution.values < prev - 1e-9 * scale):
                raise SolverError(f"boundary sequence not monotone at n=2^{k}")
        prev = rep.solution.values
        reports.append(rep)
    return reports


def default_barriers(M: ModelManifold, C: CoefficientSet, R: float, n: int,
                     sub: RadialFunction | None = None) -> BarrierPair:
    """Constant barriers when H and K are finite, otherwise a Lemma-type
    supersolution with the given (or a property-(Sigma)) subsolution."""
    grid = RadialGrid(0.0, R, n)
    rb = ratio_bounds(C, M)
    if rb.finite and sub is None:
        return constant_barriers(C, M)
    B0 = zero_set(M, C.b)
    balls = auto_nested_balls(M, C.a, B0, R, grid.h) if B0.kind != "empty" else None
    sup = lemma1_supersolution(C, M, C.a, R, *(balls or (None, None)), h=grid.h)
    if sub is None:
        from .nonlinearity import sigma_property

        sres = sigma_property(C, M, R, n=n)
        if not sres.holds:
            raise HypothesisError("property (Sigma) fails on the ball", sres.diagnostics)
        sub = sres.witness
    subv = sub.on(grid.nodes)
    supv = sup.values
    zeta = max(1.0, float(np.max(subv / supv)))
    sup = _scaled(sup, zeta)
    return BarrierPair(sub, sup, R, {"sub": sub.certificate, "sup": sup.certificate})


@dataclass
class BlowupResult:
    core: RadialFunction
    full: RadialFunction
    boundary_value: float
    doublings: int
    core_change: float
    history: list


def boundary_layers(R: float, h: float, sigma: float, kmax: int) -> int:
    """Geometric refinement levels needed to resolve data up to 2^kmax.

    A solution with boundary value n has a layer of width ~ n^{-(sigma-1)/2};
    once that falls below the last cell, further doublings only feed a
    discretization artefact into the interior.
    """
    width = 2.0 ** (-kmax * (sigma - 1) / 2)
    finest = max(width, 1e3 * np.finfo(float).eps * R)
    return max(0, math.ceil(math.log2(h / finest)))


def blowup_solution(M: ModelManifold, C: CoefficientSet, R: float,
                    barriers: BarrierPair | None = None, n: int = 2000,
                    core_fraction: float = 0.9, tol: float = 1e-6, kmax: int = 40,
                    check_hypotheses: bool = True, layers: int | None = None) -> BlowupResult:
    """Approximate the solution with infinite boundary data on B_R."""
    if check_hypotheses:
        B0 = zero_set(M, C.b)
        lam = lambda1_bounded_set(M, C.a, B0)
        if not lam > 0:
            raise HypothesisError("lambda_1^L(B0) <= 0", {"lambda1_B0": lam, "B0": B0.describe()})
    barriers = barriers or default_barriers(M, C, R, n)
    if layers is None:
        layers = boundary_layers(R, R / n, C.sigma, kmax)
    P = DirichletProblem(M, C, R, 1.0, barriers, n, layers)
    r = P.grid.nodes
    core = r <= core_fraction * R + 1e-12
    sub_R = barriers.sub.on(r)[-1]
    k0 = max(0, math.ceil(math.log2(max(sub_R, 1e-300))))
    sup0 = barriers.sup.on(r)
    prev = None
    history = []
    change = math.inf
    for k in range(k0, kmax + 1):
        nval = 2.0**k
        zeta = max(1.0, nval / sup0[-1])
        start = zeta * sup0 if prev is None else np.minimum(zeta * sup0, 2.0 * prev.values)
        bars = BarrierPair(barriers.sub, _scaled(barriers.sup, zeta), R, barriers.certificates)
        rep = solve_dirichlet(DirichletProblem(M, C, R, nval, bars, n, layers), start=start,
                              check_barriers=prev is None)
        u = rep.solution
        if prev is not None:
            if np.any(u.values < prev.values - 1e-9 * np.maximum(1.0, prev.values)):
                raise SolverError(f"boundary sequence not monotone at n=2^{k}")
            change = float(np.max(np.abs(u.values[core] - prev.values[core])))
            history.append((k, change))
            if change < tol:
                full = u
                core_fn = RadialFunction(r[core], u.values[core], u.certificate,
                                         {"extrapolated": True, "boundary_value": nval,
                                          "core_change": change, "R": R})
                return BlowupResult(core_fn, full, nval, k, change, history)
        prev = u
    raise SolverError("interior bound failed: no stabilization by n = 2^%d" % kmax)


# --------------------------------------------------------------------------
# maximal solution


@dataclass
class MaximalSolutionReport:
    solution: RadialFunction
    exhaustion_radii: list
    core_radius: float
    core_nodes: np.ndarray
    restrictions: np.ndarray  # one row per radius, values on the common core
    monotone_decreasing_certificate: bool
    above_subsolution: bool
    blowups: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "exhaustion_radii": self.exhaustion_radii,
            "core_radius": self.core_radius,
            "monotone_decreasing_certificate": self.monotone_decreasing_certificate,
            "above_subsolution": self.above_subsolution,
            "boundary_values": [b.boundary_value for b in self.blowups],
            "core_changes": [b.core_change for b in self.blowups],
            "core_sup_differences": [float(np.max(np.abs(self.restrictions[i] - self.restrictions[-1])))
                                     for i in range(len(self.blowups))],
        }


def maximal_solution(M: ModelManifold, C: CoefficientSet, u_minus: RadialFunction,
                     radii, n: int = 2000, core_fraction: float = 0.5,
                     tol: float = 1e-6, kmax: int = 40) -> MaximalSolutionReport:
    """Exhaust by balls B_{R_k}; the blow-up solutions decrease to the maximal one.

    All radii share the spacing h = radii[0]/n, so the grids are nested and
    the discrete comparison principle applies between them.
    """
    radii = [float(x) for x in radii]
    if any(r2 <= r1 for r1, r2 in zip(radii, radii[1:])):
        raise PreconditionError("radii must be increasing")
    if radii[-1] > M.R_max * (1 + 1e-12):
        raise PreconditionError("exhaustion radius beyond R_max")
    cert = u_minus.certificate
    if cert is None or not cert.covers("sub"):
        raise PreconditionError("u_minus needs a passing subsolution certificate")
    h = radii[0] / n
    rb = ratio_bounds(C, M)
    blowups = []
    core_R = core_fraction * radii[0]
    above = True
    for R in radii:
        nR = int(round(R / h))
        grid = RadialGrid(0.0, R, nR)
        subv = u_minus(grid.nodes)
        sub = RadialFunction(grid.nodes, subv, cert)
        if rb.finite and np.all(subv <= rb.H_script):
            cb = constant_barriers(C, M)
            bars = BarrierPair(sub, cb.sup, R, {"sub": cert, "sup": cb.sup.certificate})
        else:
            bars = default_barriers(M, C, R, nR, sub=sub)
        bu = blowup_solution(M, C, R, bars, nR, tol=tol, kmax=kmax, check_hypotheses=False)
        sub_full = u_minus(bu.full.r)
        above &= bool(np.all(bu.full.values >= sub_full - 1e-9 * np.maximum(1, sub_full)))
        blowups.append(bu)
    core_nodes = blowups[0].full.r[blowups[0].full.r <= core_R + 1e-12]
    rows = np.array([bu.full(core_nodes) for bu in blowups])
    scale = np.maximum(1.0, np.abs(rows[:-1]))
    mono = bool(np.all(rows[1:] <= rows[:-1] + 1e-8 * scale))
    if not mono:
        raise SolverError("exhaustion sequence is not nonincreasing on the core")
    last = blowups[-1]
    sol = last.full.restrict(core_R)
    sol.meta.update({"core_radius": core_R, "radii": radii})
    return MaximalSolutionReport(sol, radii, core_R, core_nodes, rows, mono, above, blowups)


# --------------------------------------------------------------------------
# comparison and uniqueness diagnostics


def compare(u: RadialFunction, v: RadialFunction, C: CoefficientSet | None = None,
            tol: float = COMPARE_TOL) -> bool:
    """u <= v at every node, for certified sub (u) and super (v) solutions."""
    cu, cv = u.certificate, v.certificate
    if cu is None or cv is None:
        raise PreconditionError("compare needs certified inputs")
    if not (cu.covers("sub") and cv.covers("super")):
        raise PreconditionError("u must be a certified subsolution and v a supersolution")
    vu = v(u.r)
    if np.any(vu <= 0):
        raise PreconditionError("v must be positive")
    if u.values[-1] > vu[-1] * (1 + tol) + tol:
        raise PreconditionError("boundary ordering u <= v fails")
    return bool(np.all(u.values <= vu + tol * np.maximum(1.0, np.abs(vu))))


def uniqueness_l2_diagnostic(u, v, M: ModelManifold, radii) -> dict:
    """Is r -> 1/I(r) non-integrable at infinity, I(r) = |dB_r| (u-v)^2(r)?

    The tail of log(1/I) is fitted by a power law and by an exponential and
    the better fit decides.
    """
    r = np.asarray(radii, dtype=float)
    uu = u(r) if callable(u) else np.asarray(u, dtype=float)
    vv = v(r) if callable(v) else np.asarray(v, dtype=float)
    if np.any(uu <= 0) or np.any(vv <= 0):
        raise PreconditionError("u and v must be positive")
    d = uu - vv
    scale = max(1.0, float(np.max(np.abs(uu))))
    if np.max(np.abs(d)) <= 1e-8 * scale:
        return {"condition_uvint": True, "vacuous": True, "samples": {"r": r.tolist()}}
    I = sphere_area(M.m) * M.weight(r) * d**2
    tail = slice(len(r) // 2, None)
    rt, It = r[tail], I[tail]
    if np.any(It <= 0):
        return {"condition_uvint": True, "vacuous": False, "fit": "u = v on tail samples",
                "samples": {"r": r.tolist(), "I": I.tolist()}}
    y = -np.log(It)
    pw = np.polyfit(np.log(rt), y, 1)
    ex = np.polyfit(rt, y, 1)
    res_p = float(np.sum((np.polyval(pw, np.log(rt)) - y) ** 2))
    res_e = float(np.sum((np.polyval(ex, rt) - y) ** 2))
    if res_p <= res_e:
        p = float(pw[0])
        diverges = p >= -1.0
        fit = {"model": "power", "exponent": p}
    else:
        q = float(ex[0])
        diverges = q >= 0.0
        fit = {"model": "exponential", "rate": q}
    partial = float(trapezoid(1.0 / I, r)) if np.all(I > 0) else math.inf
    return {"condition_uvint": bool(diverges), "vacuous": False, "fit": fit,
            "partial_integral": partial,
            "samples": {"r": r.tolist(), "I": I.tolist()}}
