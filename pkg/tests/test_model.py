import math

import numpy as np
import pytest

from lichlab.model import (GeometryError, ModelManifold, RadialGrid, RadialLaplacian,
                           WarpingFunction, green_kernel, green_values, laplacian_drift,
                           riccati_warping, sphere_area, volume_growth_check)
from oracles import green_by_quadrature


def test_sphere_area():
    assert sphere_area(2) == pytest.approx(2 * math.pi)
    assert sphere_area(3) == pytest.approx(4 * math.pi)


def test_euclidean_laplacian_of_r_squared():
    # Delta r^2 = 2m exactly for the finite-volume stencil at the pole too
    M = ModelManifold.euclidean(3, R_max=2.0)
    grid = RadialGrid(0.0, 2.0, 200)
    lap = RadialLaplacian(M, grid).apply(grid.nodes**2)
    assert lap[0] == pytest.approx(6.0, rel=1e-13)
    away = grid.nodes[: lap.size] >= 0.1
    assert np.allclose(lap[away], 6.0, rtol=1e-3)


def test_drift():
    M = ModelManifold.hyperbolic(3, R_max=5.0)
    assert laplacian_drift(M, 1.0) == pytest.approx(2 / math.tanh(1.0))
    with pytest.raises(GeometryError):
        laplacian_drift(M, 0.0)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_green_closed_forms_against_quadrature():
    euc = ModelManifold.euclidean(3, R_max=16.0)
    hyp = ModelManifold.hyperbolic(3, R_max=16.0)
    r = np.array([0.1, 1.0, 5.0, 12.0])
    assert np.allclose(green_values(euc, r), green_by_quadrature(euc.weight, r), rtol=1e-10)
    assert np.allclose(green_values(hyp, r), green_by_quadrature(hyp.weight, r), rtol=1e-10)
    assert np.allclose(green_values(hyp, r), 1 / np.tanh(r) - 1, rtol=1e-12)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_green_high_dimensional_hyperbolic():
    M = ModelManifold.hyperbolic(4, R_max=10.0)
    r = np.array([0.5, 2.0, 6.0])
    assert np.allclose(green_values(M, r), green_by_quadrature(M.weight, r), rtol=1e-9)


def test_plane_is_parabolic():
    assert not green_kernel(ModelManifold.euclidean(2, R_max=10.0)).nonparabolic
    with pytest.raises(GeometryError):
        green_values(ModelManifold.euclidean(2, R_max=10.0), 1.0)


def test_green_kernel_checks():
    kern = green_kernel(ModelManifold.hyperbolic(3, R_max=8.0))
    assert kern.checks["positive"] and kern.checks["strictly_decreasing"]
    assert kern.checks["superharmonic"]
    M = ModelManifold.euclidean(3, R_max=8.0)
    kern = green_kernel(M)
    assert np.allclose(kern.grad_log(M), 1.0 / kern.r, rtol=1e-12)


def test_riccati_reproduces_model_warpings():
    r = np.linspace(0, 5, 101)
    assert np.allclose(riccati_warping(0.0, 5.0).g(r), r, atol=1e-10)
    assert np.allclose(riccati_warping(1.0, 5.0).g(r), np.sinh(r), rtol=1e-10)
    with pytest.raises(GeometryError):
        riccati_warping(-1.0, 4.0)


def test_tabulated_warping(tmp_path):
    r = np.linspace(0, 4, 401)
    p = tmp_path / "g.csv"
    p.write_text("r,g\n" + "\n".join(f"{a!r},{b!r}" for a, b in zip(r.tolist(), np.sinh(r).tolist())))
    W = WarpingFunction.from_csv(p)
    assert W.g(2.0) == pytest.approx(math.sinh(2.0), rel=1e-6)
    with pytest.raises(GeometryError):
        WarpingFunction.tabulated(r + 1, np.sinh(r) + 1)


def test_model_validation():
    with pytest.raises(GeometryError):
        ModelManifold.euclidean(1)
    with pytest.raises(GeometryError):
        ModelManifold(3, riccati_warping(0.0, 2.0), 3.0)


def test_volume_growth():
    assert volume_growth_check(ModelManifold.euclidean(3, R_max=100.0), 0.0)["finite"]
    assert not volume_growth_check(ModelManifold.hyperbolic(3, R_max=100.0), 1.5)["finite"]
    M = ModelManifold.hyperbolic(3, R_max=3.0)
    assert M.volume(2.0)[0] == pytest.approx(math.pi * (math.sinh(4.0) - 4.0), rel=1e-10)


def test_layered_grid():
    g = RadialGrid(0.0, 1.0, 10, layers=3)
    assert g.size == 13
    assert np.allclose(g.nodes[-4:], [1 - 0.05, 1 - 0.025, 1 - 0.0125, 1.0])
