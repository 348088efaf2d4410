"""Theorem-by-theorem table of hypothesis predicates for a configuration.

Each predicate is a dict with an ``ok`` flag plus the numbers behind it.
``ok`` is None when a predicate needs parameters the caller did not give.
"""
from __future__ import annotations

import math

import numpy as np

from .bounds import brmu_check, comparison_hypotheses
from .model import ModelManifold, volume_growth_check
from .nonlinearity import CoefficientSet, hypotheses_theorem_b, ratio_bounds
from .spectral import lambda1_bounded_set, spectral_profile, zero_set

SECTIONS = ("theorem_a", "theorem_b", "a_priori", "comparison")


def default_profile_radii(M: ModelManifold, first: float = 1.0) -> list:
    """Doubling radii first, 2 first, ... ending at R_max."""
    radii = []
    R = min(first, M.R_max)
    while R < M.R_max:
        radii.append(R)
        R *= 2.0
    radii.append(M.R_max)
    return radii


def theorem_a_predicates(M: ModelManifold, C: CoefficientSet, radii=None, n: int = 2000) -> dict:
    r = np.linspace(0.0, M.R_max, 4001)
    _, b, c = C.sample(r)
    B0 = zero_set(M, C.b)
    compact = B0.kind == "empty" or B0.r_out < M.R_max * (1 - 1e-9)
    lam_b0 = lambda1_bounded_set(M, C.a, B0) if compact else -math.inf
    prof = spectral_profile(M, C.a, radii or default_profile_radii(M), n=n)
    return {
        "sign_bc": {"ok": bool(np.all(b >= 0) and np.all(c >= 0)),
                    "min_b": float(b.min()), "min_c": float(c.min())},
        "b_positive_off_compact": {"ok": bool(compact), "B0": B0.describe()},
        "B0_spectrally_small": {"ok": bool(lam_b0 > 0), "lambda1_B0": lam_b0},
        "lambda1_negative": {"ok": prof.negative_certified, "radii": prof.radii,
                             "eigenvalues": prof.eigenvalues,
                             "discretization_error": prof.discretization_error},
    }


def theorem_b_predicates(M: ModelManifold, C: CoefficientSet, rho1=None, rho2=None) -> dict:
    if rho1 is None or rho2 is None:
        skip = {"ok": None, "note": "needs rho1 and rho2"}
        return {"hp1": dict(skip), "hp2": dict(skip), "hp3": dict(skip)}
    return hypotheses_theorem_b(C, M, float(rho1), float(rho2))


def a_priori_predicates(M: ModelManifold, C: CoefficientSet, mu: float = 0.0) -> dict:
    rb = ratio_bounds(C, M)
    vg = volume_growth_check(M, mu)
    return {
        "acb": {"ok": bool(math.isfinite(rb.H)), "H": rb.H},
        "abc": {"ok": bool(math.isfinite(rb.K)), "K": rb.K},
        "brmu_b": brmu_check(M, C.b, mu),
        "brmu_c": brmu_check(M, C.c, mu),
        "Bvol": {"ok": bool(vg["finite"]), **vg},
    }


def hypotheses_table(M: ModelManifold, C: CoefficientSet, params: dict | None = None) -> dict:
    """All sections; ``params`` may hold rho1, rho2, mu, omega_radius,
    profile_radii, grid_n and ``targets`` (sections that decide the verdict)."""
    p = dict(params or {})
    table = {
        "theorem_a": theorem_a_predicates(M, C, p.get("profile_radii"), int(p.get("grid_n", 2000))),
        "theorem_b": theorem_b_predicates(M, C, p.get("rho1"), p.get("rho2")),
        "a_priori": a_priori_predicates(M, C, float(p.get("mu", 0.0))),
        "comparison": comparison_hypotheses(M, C, float(p.get("omega_radius", 0.0))),
    }
    targets = list(p.get("targets") or SECTIONS)
    unknown = set(targets) - set(SECTIONS)
    if unknown:
        raise ValueError(f"unknown hypothesis sections {sorted(unknown)}")
    summary = {}
    for name, preds in table.items():
        flags = [v["ok"] for v in preds.values()]
        summary[name] = None if any(f is None for f in flags) else all(flags)
    verdict = all(summary[t] is True for t in targets)
    return {"sections": table, "summary": summary, "targets": targets, "ok": verdict}
