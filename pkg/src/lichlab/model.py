"""Rotationally symmetric model manifolds dr^2 + g(r)^2 dtheta^2.

Everything downstream is a radial ODE: the Laplacian of a radial function
is u'' + (m-1) g'/g u', with the symmetry limit m u''(0) at the pole.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, interpolate

from .fields import RadialField


class GeometryError(ValueError):
    pass


def sphere_area(m: int) -> float:
    """Area of the unit (m-1)-sphere in R^m."""
    return 2.0 * math.pi ** (m / 2) / math.gamma(m / 2)


@dataclass(frozen=True)
class WarpingFunction:
    kind: str  # euclidean | hyperbolic | tabulated | riccati
    k: float = 1.0
    _spline: object = field(default=None, repr=False, compare=False)
    _dense: object = field(default=None, repr=False, compare=False)
    r_end: float = math.inf

    @classmethod
    def euclidean(cls) -> "WarpingFunction":
        return cls("euclidean")

    @classmethod
    def hyperbolic(cls, k: float = 1.0) -> "WarpingFunction":
        if k <= 0:
            raise GeometryError("hyperbolic curvature parameter must be positive")
        return cls("hyperbolic", k=float(k))

    @classmethod
    def tabulated(cls, r, g) -> "WarpingFunction":
        r = np.asarray(r, dtype=float)
        g = np.asarray(g, dtype=float)
        if r[0] != 0.0 or abs(g[0]) > 1e-12:
            raise GeometryError("tabulated warping must start at r=0 with g(0)=0")
        if np.any(g[1:] <= 0):
            raise GeometryError("tabulated warping must be positive for r > 0")
        spl = interpolate.CubicSpline(r, g)
        if abs(spl(0.0, 1) - 1.0) > 1e-2:
            raise GeometryError(f"tabulated warping needs g'(0)=1, got {float(spl(0.0, 1)):.4g}")
        return cls("tabulated", _spline=spl, r_end=float(r[-1]))

    @classmethod
    def from_csv(cls, path) -> "WarpingFunction":
        import csv

        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if [h.strip() for h in rows[0][:2]] != ["r", "g"]:
            raise GeometryError(f"{path}: header must be 'r,g'")
        data = np.array([[float(x) for x in row[:2]] for row in rows[1:] if row])
        return cls.tabulated(data[:, 0], data[:, 1])

    def g(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "euclidean":
            out = r.copy()
        elif self.kind == "hyperbolic":
            sk = math.sqrt(self.k)
            out = np.sinh(sk * r) / sk
        elif self.kind == "tabulated":
            out = self._spline(r)
        else:
            out = self._dense(r)[0]
        return out if out.ndim else float(out)

    def dg(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "euclidean":
            out = np.ones_like(r)
        elif self.kind == "hyperbolic":
            out = np.cosh(math.sqrt(self.k) * r)
        elif self.kind == "tabulated":
            out = self._spline(r, 1)
        else:
            out = self._dense(r)[1]
        return out if out.ndim else float(out)

    @property
    def closed_form(self) -> bool:
        return self.kind in ("euclidean", "hyperbolic")


def riccati_warping(F, R_max: float) -> WarpingFunction:
    """Solve g'' = F g, g(0)=0, g'(0)=1 on [0, R_max].

    ``F`` is a callable or a RadialField.  Raises if g stops being positive.
    """
    F = RadialField.coerce(F)

    def rhs(r, y):
        return [y[1], F(r) * y[0]]

    def hits_zero(r, y):
        return y[0] if r > 0 else 1.0

    hits_zero.terminal = True
    hits_zero.direction = -1
    sol = integrate.solve_ivp(rhs, (0.0, R_max), [0.0, 1.0], method="DOP853",
                              rtol=1e-12, atol=1e-14, dense_output=True,
                              events=hits_zero)
    if not sol.success:
        raise GeometryError(f"riccati integration failed: {sol.message}")
    if sol.t_events[0].size or sol.t[-1] < R_max:
        r0 = sol.t_events[0][0] if sol.t_events[0].size else sol.t[-1]
        raise GeometryError(f"comparison warping not positive: g vanishes at r={r0:.6g}")
    return WarpingFunction("riccati", _dense=sol.sol, r_end=float(R_max))


@dataclass(frozen=True)
class ModelManifold:
    m: int
    g: WarpingFunction
    R_max: float

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 2:
            raise GeometryError("dimension m must be an integer >= 2")
        if not self.R_max > 0:
            raise GeometryError("R_max must be positive")
        if self.R_max > self.g.r_end * (1 + 1e-12):
            raise GeometryError("R_max exceeds the warping function's domain")

    @classmethod
    def euclidean(cls, m: int = 3, R_max: float = 16.0) -> "ModelManifold":
        return cls(m, WarpingFunction.euclidean(), R_max)

    @classmethod
    def hyperbolic(cls, m: int = 3, k: float = 1.0, R_max: float = 16.0) -> "ModelManifold":
        return cls(m, WarpingFunction.hyperbolic(k), R_max)

    def weight(self, r):
        """Radial volume density g^{m-1} (without the sphere area)."""
        return np.asarray(self.g.g(r), dtype=float) ** (self.m - 1)

    def volume(self, r):
        """vol(B_r) = omega_{m-1} * int_0^r g^{m-1}."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        om = sphere_area(self.m)
        if self.g.kind == "euclidean":
            return om * r ** self.m / self.m
        out = np.empty_like(r)
        for i, ri in enumerate(r):
            out[i] = integrate.quad(self.weight, 0.0, ri, limit=200, epsabs=0, epsrel=1e-12)[0]
        return om * out


def laplacian_drift(M: ModelManifold, r):
    """(m-1) g'(r)/g(r) for r > 0."""
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr <= 0):
        raise GeometryError("drift is defined for r > 0 only")
    if M.g.kind == "hyperbolic":
        sk = math.sqrt(M.g.k)
        out = (M.m - 1) * sk / np.tanh(sk * r_arr)
    else:
        out = (M.m - 1) * np.asarray(M.g.dg(r_arr)) / np.asarray(M.g.g(r_arr))
    return float(out) if np.ndim(r) == 0 else out


# --------------------------------------------------------------------------
# grids and sampled functions


@dataclass(frozen=True)
class RadialGrid:
    """Uniform nodes r_min + i h, i = 0..n.

    With ``layers > 0`` the last cell is split geometrically: extra nodes
    R - h/2^j (j = 1..layers) resolve steep boundary layers.
    """

    r_min: float
    R: float
    n: int
    layers: int = 0

    def __post_init__(self):
        if self.n < 2 or not self.R > self.r_min or self.r_min < 0:
            raise GeometryError("grid needs n >= 2 and 0 <= r_min < R")
        if self.layers < 0:
            raise GeometryError("layers must be nonnegative")

    @property
    def h(self) -> float:
        return (self.R - self.r_min) / self.n

    @property
    def size(self) -> int:
        """Number of cells (last node index)."""
        return self.n + self.layers

    @property
    def nodes(self) -> np.ndarray:
        r = self.r_min + self.h * np.arange(self.n + 1)
        if self.layers:
            extra = self.R - self.h * 0.5 ** np.arange(1, self.layers + 1)
            r = np.concatenate([r[:-1], extra, [self.R]])
        return r

    @classmethod
    def with_spacing(cls, R: float, h: float, layers: int = 0) -> "RadialGrid":
        n = int(round(R / h))
        if abs(n * h - R) > 1e-9 * R:
            raise GeometryError("radius is not a multiple of the spacing")
        return cls(0.0, n * h, n, layers)


@dataclass
class Certificate:
    kind: str  # sub | super | solution
    worst: float  # min residual for sub, max residual for super
    tol: float
    notes: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        if self.kind == "sub":
            return self.worst >= -self.tol
        if self.kind == "super":
            return self.worst <= self.tol
        return abs(self.worst) <= self.tol

    def covers(self, role: str) -> bool:
        return self.ok and (self.kind == role or self.kind == "solution")

    def as_dict(self):
        return {"kind": self.kind, "worst": self.worst, "tol": self.tol, "ok": self.ok,
                **({"notes": self.notes} if self.notes else {})}


@dataclass
class RadialFunction:
    """Samples on radial nodes with linear interpolation between them."""

    r: np.ndarray
    values: np.ndarray
    certificate: Certificate | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.r = np.asarray(self.r, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.r.shape != self.values.shape:
            raise ValueError("r and values must have the same shape")

    def __call__(self, r):
        out = np.interp(r, self.r, self.values)
        return float(out) if np.ndim(r) == 0 else out

    def restrict(self, R: float) -> "RadialFunction":
        keep = self.r <= R * (1 + 1e-12)
        return RadialFunction(self.r[keep], self.values[keep], self.certificate, dict(self.meta))

    def on(self, nodes) -> np.ndarray:
        """Values at ``nodes``; exact when the nodes are shared."""
        nodes = np.asarray(nodes, dtype=float)
        if nodes.shape == self.r.shape and np.allclose(nodes, self.r, rtol=0, atol=1e-12):
            return self.values.copy()
        return np.interp(nodes, self.r, self.values)

    @classmethod
    def constant(cls, nodes, v: float, certificate=None) -> "RadialFunction":
        nodes = np.asarray(nodes, dtype=float)
        return cls(nodes, np.full(nodes.shape, float(v)), certificate)


# --------------------------------------------------------------------------
# discrete Laplacian in Liouville form


class RadialLaplacian:
    """Three-point finite-volume Laplacian on a RadialGrid.

    (Delta u)_i = [k_{i+1/2}(u_{i+1}-u_i) - k_{i-1/2}(u_i-u_{i-1})] / V_i with
    k_{i+1/2} = w(midpoint)/(r_{i+1}-r_i), V_i = w(r_i)(r_{i+1}-r_{i-1})/2 and
    w = g^{m-1}.  On uniform grids this is k = w(r_i + h/2)/h, V = h w(r_i).
    At a pole (r_min = 0) node 0 uses the cell [0, h/2]; for Euclidean g this
    is exactly Delta u(0) = 2m(u_1-u_0)/h^2.
    """

    def __init__(self, M: ModelManifold, grid: RadialGrid):
        self.M, self.grid = M, grid
        r = grid.nodes
        self.r = r
        dr = np.diff(r)
        self.kface = M.weight(r[:-1] + dr / 2) / dr  # edge i -> i+1
        cell = np.empty_like(r)
        cell[1:-1] = 0.5 * (dr[:-1] + dr[1:])
        cell[0], cell[-1] = dr[0], dr[-1]
        V = cell * M.weight(r)
        self.pole = grid.r_min == 0.0
        if self.pole:
            h0 = dr[0]
            xg, wg = np.polynomial.legendre.leggauss(8)
            s = (xg + 1) * h0 / 4
            V[0] = np.sum(wg * M.weight(s)) * h0 / 4
        self.V = V

    @property
    def interior(self) -> slice:
        """Nodes carrying an equation (the rest hold Dirichlet data)."""
        return slice(0 if self.pole else 1, self.grid.size)

    def apply(self, u: np.ndarray) -> np.ndarray:
        """Delta_h u at the interior nodes (length = number of interior nodes)."""
        u = np.asarray(u, dtype=float)
        flux = self.kface * np.diff(u)  # flux on edge i+1/2
        lap = np.empty(self.grid.size + 1)
        lap[1:-1] = (flux[1:] - flux[:-1]) / self.V[1:-1]
        lap[0] = flux[0] / self.V[0] if self.pole else np.nan
        lap[-1] = np.nan
        return lap[self.interior]

    def tridiagonal(self):
        """(lower, diag, upper) of -Delta_h on the interior unknowns.

        Also returns the coefficient multiplying the right Dirichlet value
        and (for annuli) the left one.
        """
        sl = self.interior
        idx = np.arange(self.grid.size + 1)[sl]
        kl = np.where(idx > 0, self.kface[np.maximum(idx - 1, 0)], 0.0)
        kr = self.kface[idx]
        V = self.V[sl]
        diag = (kl + kr) / V
        lower = -kl[1:] / V[1:]
        upper = -kr[:-1] / V[:-1]
        right = kr[-1] / V[-1]
        left = kl[0] / V[0] if not self.pole else 0.0
        return lower, diag, upper, right, left


# --------------------------------------------------------------------------
# Green kernel


@dataclass
class GreenKernel:
    r: np.ndarray
    G: np.ndarray | None
    nonparabolic: bool
    tail_model: str
    checks: dict = field(default_factory=dict)

    @property
    def t(self) -> np.ndarray:
        return -0.5 * np.log(self.G)

    def grad_log(self, M: ModelManifold, r=None):
        """|grad log G| = 1 / (g^{m-1} G), in closed form."""
        if r is None:
            return 1.0 / (M.weight(self.r) * self.G)
        return 1.0 / (M.weight(r) * green_values(M, r))


def _hyperbolic_green(m: int, k: float, r):
    sk = math.sqrt(k)
    r = np.asarray(r, dtype=float)
    if m == 3:
        # int_r^oo k / sinh^2(sk s) ds = sk (coth(sk r) - 1) = 2 sk / expm1(2 sk r)
        return 2.0 * sk / np.expm1(2.0 * sk * r)
    if m == 2:
        return -np.log(np.tanh(sk * r / 2))
    out = np.empty(r.shape)
    for i, ri in np.ndenumerate(r):
        # (sinh(sk s)/sk)^{1-m} written without overflow
        f = lambda s: (2 * sk) ** (m - 1) * np.exp(-(m - 1) * sk * s) / (-np.expm1(-2 * sk * s)) ** (m - 1)
        out[i] = integrate.quad(f, ri, np.inf, limit=200, epsabs=0, epsrel=1e-13)[0]
    return out


def green_values(M: ModelManifold, r):
    """G(r) for closed-form warpings (raises for parabolic models)."""
    r = np.asarray(r, dtype=float)
    if M.g.kind == "euclidean":
        if M.m == 2:
            raise GeometryError("Euclidean plane is parabolic")
        return r ** (2 - M.m) / (M.m - 2)
    if M.g.kind == "hyperbolic":
        return _hyperbolic_green(M.m, M.g.k, r)
    raise GeometryError("closed-form Green values need a closed-form warping")


def _tail_fit(M: ModelManifold, R: float):
    """Fit the integrand g^{1-m} on [0.8R, R] by a power law and an exponential.

    Returns (model name, tail integral or inf).
    """
    s = np.linspace(0.8 * R, R, 200)
    y = M.weight(s) ** (-1.0)  # g^{1-m}
    ly = np.log(y)
    pw = np.polyfit(np.log(s), ly, 1)
    ex = np.polyfit(s, ly, 1)
    res_p = np.sum((np.polyval(pw, np.log(s)) - ly) ** 2)
    res_e = np.sum((np.polyval(ex, s) - ly) ** 2)
    yR = y[-1]
    if res_p <= res_e:
        p = -pw[0]
        return f"power(p={p:.6g})", (yR * R / (p - 1) if p > 1 + 1e-3 else math.inf)
    q = -ex[0]
    return f"exponential(q={q:.6g})", (yR / q if q > 1e-6 else math.inf)


def green_kernel(M: ModelManifold, n: int = 2000, eps_frac: float = 1e-3) -> GreenKernel:
    grid = RadialGrid(eps_frac * M.R_max, M.R_max, n)
    r = grid.nodes
    if M.g.closed_form:
        if M.g.kind == "euclidean" and M.m == 2:
            return GreenKernel(r, None, False, "analytic: int ds/s diverges")
        G = np.asarray(green_values(M, r), dtype=float)
        tail = "analytic"
    else:
        model, tail_val = _tail_fit(M, M.R_max)
        if not math.isfinite(tail_val):
            return GreenKernel(r, None, False, model)
        f = lambda s: M.weight(s) ** (-1.0)
        pieces = np.array([integrate.quad(f, r[i], r[i + 1], epsabs=0, epsrel=1e-12)[0]
                           for i in range(n)])
        G = tail_val + np.concatenate([np.cumsum(pieces[::-1])[::-1], [0.0]])
        tail = model
    kern = GreenKernel(r, G, True, tail)
    kern.checks = _green_checks(M, kern)
    return kern


def _green_checks(M: ModelManifold, kern: GreenKernel) -> dict:
    G, r = kern.G, kern.r
    h = r[1] - r[0]
    drift = laplacian_drift(M, r[1:-1])
    lap = (G[2:] - 2 * G[1:-1] + G[:-2]) / h**2 + drift * (G[2:] - G[:-2]) / (2 * h)
    away = r[1:-1] >= 0.05 * M.R_max
    with np.errstate(divide="ignore"):
        t = -0.5 * np.log(G)
    return {
        "positive": bool(np.all(G > 0)),
        "strictly_decreasing": bool(np.all(np.diff(G) < 0)),
        "t_increasing": bool(np.all(np.diff(t) > 0)),
        "max_laplacian": float(np.max(lap[away])),
        "superharmonic": bool(np.max(lap[away]) <= 1e-6),
        "decays": bool(G[-1] < 1e-2 * G[0]),
    }


def volume_growth_check(M: ModelManifold, mu: float, samples: int = 40) -> dict:
    """Evaluate liminf log vol(B_r) / r^{2-mu} on a geometric r-sequence."""
    if not 0 <= mu < 2:
        raise ValueError("mu must lie in [0, 2)")
    r = np.geomspace(max(1.0, M.R_max / 1e3), M.R_max, samples) if M.R_max > 1 else \
        np.geomspace(M.R_max / 10, M.R_max, samples)
    if M.g.kind in ("tabulated", "riccati"):
        # cumulative quadrature, kept in log form to dodge overflow
        fine = np.linspace(0.0, M.R_max, 20001)
        lw = (M.m - 1) * np.log(np.maximum(M.g.g(fine), 1e-300))
        shift = lw.max()
        cum = integrate.cumulative_trapezoid(np.exp(lw - shift), fine, initial=0.0)
        logvol = np.log(sphere_area(M.m)) + shift + np.log(np.interp(r, fine, cum))
    else:
        logvol = np.log(M.volume(r))
    ratio = logvol / r ** (2 - mu)
    tail = ratio[samples // 2:]
    slope = np.polyfit(np.log(r[samples // 2:]), np.log(np.abs(tail) + 1e-300), 1)[0]
    if M.g.kind == "euclidean":
        finite, basis = True, "closed form: polynomial volume"
    elif M.g.kind == "hyperbolic":
        finite, basis = mu <= 1.0, "closed form: log vol ~ (m-1) sqrt(k) r"
    else:
        finite = not (slope > 0.25 and np.all(np.diff(tail) > 0))
        basis = f"numerical tail slope {slope:.4g}"
    return {"finite": bool(finite), "liminf_estimate": float(np.min(tail)),
            "basis": basis, "r": r, "ratio": ratio}
