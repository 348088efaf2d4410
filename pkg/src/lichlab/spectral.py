"""First Dirichlet eigenpair of L = Delta + a on radial balls and annuli.

The radial operator is discretized in Liouville form (see
:class:`~lichlab.model.RadialLaplacian`), symmetrized with the cell volumes,
and the lowest eigenvalue is located by Sturm-sequence bisection.  The
eigenvector comes from a few steps of shifted inverse iteration.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from .fields import RadialField
from .model import ModelManifold, RadialFunction, RadialGrid, RadialLaplacian

LAMBDA_CAP = 1e8  # eigenvalues above this are reported as +inf


class SpectralError(RuntimeError):
    pass


@dataclass
class EigenResult:
    lambda1: float
    eigenfunction: RadialFunction
    radius: float
    r_in: float = 0.0
    rayleigh: float = math.nan
    n: int = 0

    @property
    def rayleigh_gap(self) -> float:
        return abs(self.rayleigh - self.lambda1) / max(1.0, abs(self.lambda1))


def sturm_count(d: np.ndarray, e2: np.ndarray, x: float) -> int:
    """Number of eigenvalues < x of the symmetric tridiagonal (d, e), e2 = e**2."""
    count = 0
    q = d[0] - x
    if q < 0:
        count += 1
    tiny = 1e-300
    for di, ei2 in zip(d[1:].tolist(), e2.tolist()):
        if q == 0.0:
            q = tiny
        q = di - x - ei2 / q
        if q < 0:
            count += 1
    return count


def lowest_eigenvalue(d: np.ndarray, e: np.ndarray, iters: int = 200, rtol: float = 1e-15) -> float:
    """Smallest eigenvalue of a symmetric tridiagonal matrix by bisection."""
    d = np.asarray(d, dtype=float)
    e = np.asarray(e, dtype=float)
    ae = np.abs(e)
    rad = np.zeros_like(d)
    rad[:-1] += ae
    rad[1:] += ae
    lo = float(np.min(d - rad))
    hi = float(np.min(d + rad))
    e2 = e * e
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if sturm_count(d, e2, mid) >= 1:
            hi = mid
        else:
            lo = mid
        if hi - lo <= rtol * max(1.0, abs(lo), abs(hi)):
            break
    return 0.5 * (lo + hi)


def _inverse_iteration(d, e, lam, steps: int = 4) -> np.ndarray:
    n = d.size
    shift = lam - 1e-9 * max(1.0, abs(lam))
    ab = np.zeros((3, n))
    ab[0, 1:] = e
    ab[1] = d - shift
    ab[2, :-1] = e
    x = np.ones(n) / math.sqrt(n)
    for _ in range(steps):
        x = solve_banded((1, 1), ab, x)
        x /= np.linalg.norm(x)
    return x


def first_eigenpair(M: ModelManifold, a_vals: np.ndarray, grid: RadialGrid) -> EigenResult:
    """Lowest eigenpair of -Delta_h - a with Dirichlet data at the outer end
    (and at the inner end when grid.r_min > 0)."""
    lap = RadialLaplacian(M, grid)
    lower, diag, upper, _, _ = lap.tridiagonal()
    sl = lap.interior
    V = lap.V[sl]
    a_int = np.asarray(a_vals, dtype=float)[sl]
    d = diag - a_int
    e = upper * np.sqrt(V[:-1] / V[1:])  # symmetrized off-diagonal
    lam = lowest_eigenvalue(d, e)
    x = _inverse_iteration(d, e, lam)
    u_int = x / np.sqrt(V)
    if u_int[np.argmax(np.abs(u_int))] < 0:
        u_int = -u_int
    u_int /= math.sqrt(np.sum(V * u_int**2))
    u = np.zeros(grid.size + 1)
    u[sl] = u_int
    # discrete Rayleigh quotient with the same stencil
    grad = lap.kface * np.diff(u) ** 2
    rq = (np.sum(grad) - np.sum(V * a_int * u_int**2)) / np.sum(V * u_int**2)
    ef = RadialFunction(grid.nodes, u, meta={"normalization": "L2(g^{m-1})"})
    return EigenResult(lam, ef, grid.R, grid.r_min, float(rq), grid.n)


def _eig_with_retry(M, a: RadialField, grid: RadialGrid) -> EigenResult:
    for attempt in range(2):
        res = first_eigenpair(M, a(grid.nodes), grid)
        inner = res.eigenfunction.values[RadialLaplacian(M, grid).interior]
        if np.all(inner > 0):
            return res
        grid = RadialGrid(grid.r_min, grid.R, 2 * grid.n)
    raise SpectralError("eigenfunction changes sign; discretization too coarse")


def lambda1_ball(M: ModelManifold, a, R: float, n: int = 2000) -> EigenResult:
    a = RadialField.coerce(a)
    if not 0 < R <= M.R_max * (1 + 1e-12):
        raise ValueError(f"radius {R} outside (0, R_max={M.R_max}]")
    return _eig_with_retry(M, a, RadialGrid(0.0, R, n))


def lambda1_annulus(M: ModelManifold, a, r_in: float, r_out: float, n: int = 2000) -> EigenResult:
    a = RadialField.coerce(a)
    if not 0 < r_in < r_out <= M.R_max * (1 + 1e-12):
        raise ValueError("annulus radii must satisfy 0 < r_in < r_out <= R_max")
    return _eig_with_retry(M, a, RadialGrid(r_in, r_out, n))


@dataclass
class SpectralProfile:
    radii: list
    eigenvalues: list
    limit_estimate: float
    discretization_error: float
    note: str = ""

    @property
    def nonincreasing(self) -> bool:
        ev = np.asarray(self.eigenvalues)
        return bool(np.all(np.diff(ev) <= 0))

    @property
    def negative_certified(self) -> bool:
        """Conservative evidence that lambda_1(M) < 0."""
        return self.limit_estimate < -10.0 * self.discretization_error


def spectral_profile(M: ModelManifold, a, radii, n: int = 2000) -> SpectralProfile:
    radii = [float(r) for r in radii]
    if any(r2 <= r1 for r1, r2 in zip(radii, radii[1:])):
        raise ValueError("radii must be increasing")
    vals = [lambda1_ball(M, a, R, n).lambda1 for R in radii]
    coarse = lambda1_ball(M, a, radii[-1], n // 2).lambda1
    err = abs(coarse - vals[-1]) / 3.0  # second order: e(h) ~ (e(2h) - e(h)) / 3
    note = (f"last value at R={radii[-1]:g}; lambda_1(M) <= this by domain monotonicity; "
            f"h^2 error estimate {err:.3g}")
    return SpectralProfile(radii, vals, vals[-1], err, note)


# --------------------------------------------------------------------------
# bounded sets


@dataclass(frozen=True)
class RadialSet:
    """Empty set, the pole, a closed ball {r <= r_out} or annulus {r_in <= r <= r_out}."""

    kind: str
    r_in: float = 0.0
    r_out: float = 0.0

    @classmethod
    def empty(cls):
        return cls("empty")

    @classmethod
    def point(cls):
        return cls("point")

    @classmethod
    def ball(cls, R):
        return cls("ball", 0.0, float(R))

    @classmethod
    def annulus(cls, r_in, r_out):
        return cls("annulus", float(r_in), float(r_out))

    def describe(self) -> str:
        if self.kind == "empty":
            return "empty"
        if self.kind == "point":
            return "{o}"
        if self.kind == "ball":
            return f"closed ball r<={self.r_out:g}"
        return f"closed annulus {self.r_in:g}<=r<={self.r_out:g}"


def lambda1_bounded_set(M: ModelManifold, a, B: RadialSet, n: int = 800,
                        delta0: float | None = None, levels: int = 5) -> float:
    """sup of lambda_1 over enclosing domains, by shrinking enclosures.

    Enclosures are B_{R+delta_k} (or the annulus widened by delta_k on both
    sides, the inner end clamped at the pole), delta_k = delta0 / 2^k.  The
    limit delta -> 0 is estimated by linear Richardson extrapolation.
    """
    if B.kind == "empty":
        return math.inf
    a = RadialField.coerce(a)
    if delta0 is None:
        delta0 = 0.1 * max(B.r_out - B.r_in, 0.0) or 0.05
    deltas = [delta0 / 2**k for k in range(levels)]
    vals = []
    for dl in deltas:
        outer = min(B.r_out + dl, M.R_max)
        if B.kind in ("point", "ball") or B.r_in - dl <= 0:
            lam = lambda1_ball(M, a, outer, n).lambda1
        else:
            lam = lambda1_annulus(M, a, B.r_in - dl, outer, n).lambda1
        if lam > LAMBDA_CAP:
            return math.inf
        vals.append(lam)
    if B.kind == "point":
        # grows like delta^-2; report divergence once the trend is clear
        ratios = [v2 / v1 for v1, v2 in zip(vals, vals[1:]) if v1 > 0]
        if ratios and min(ratios) > 3.0:
            return math.inf
    return 2.0 * vals[-1] - vals[-2]


def zero_set(M: ModelManifold, b, n: int = 4000, rel_tol: float = 1e-12) -> RadialSet:
    """Bounding ball/annulus of {b < rel_tol * max b} sampled on [0, R_max]."""
    b = RadialField.coerce(b)
    r = np.linspace(0.0, M.R_max, n + 1)
    vals = b(r)
    bmax = float(np.max(vals))
    if bmax <= 0:
        return RadialSet.ball(M.R_max)
    small = vals < rel_tol * bmax
    if not np.any(small):
        return RadialSet.empty()
    idx = np.flatnonzero(small)
    h = r[1]
    lo = r[idx[0]]
    hi = min(r[idx[-1]] + h, M.R_max)  # b may vanish up to the next node
    if idx[0] == 0:
        return RadialSet.ball(hi) if hi > 0 else RadialSet.point()
    return RadialSet.annulus(max(lo - h, 0.0), hi)
