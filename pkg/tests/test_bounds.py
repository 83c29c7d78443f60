import math

import numpy as np
import pytest

from eigshape.bounds import (
    compute_bounds_data,
    eigenvalue_bounds,
    projection_constants,
    segment_bounds,
    transport_bounds,
)
from eigshape.errors import DegenerateShape
from eigshape.geometry import AffineMap, Direction, ShapeParam, transform_between

P0 = ShapeParam(1.0, math.pi / 3)
EXACT = [(16.0 * math.pi**2 / 9.0) * c for c in (3, 7, 7, 12)]


def test_projection_constants_values():
    pc = projection_constants(1.0)
    assert pc.c_cg.lo == 0.0 and pc.c_cg.hi == pytest.approx(0.493, rel=1e-12)
    assert pc.c_cr.hi == pytest.approx(0.1893, rel=1e-12)
    pc512 = projection_constants(1.0 / 512)
    assert pc512.c_cr.hi == pytest.approx(0.1893 / 512, rel=1e-12)
    tiny = projection_constants(1e-9)
    assert tiny.c_cg.hi < 1e-9


def test_projection_constants_invalid():
    with pytest.raises(ValueError):
        projection_constants(0.0)


@pytest.mark.parametrize("n", [16, 32])
def test_enclosure_of_analytic_spectrum(n):
    b = eigenvalue_bounds(P0, n, 4)
    for k in range(4):
        assert b.lower[k] <= EXACT[k] <= b.upper[k]
    assert all(np.diff(b.lower) >= 0) and all(np.diff(b.upper) >= 0)


def test_width_decay():
    b32 = eigenvalue_bounds(P0, 32, 4)
    b64 = eigenvalue_bounds(P0, 64, 4)
    for k in range(4):
        w32 = b32.upper[k] - b32.lower[k]
        w64 = b64.upper[k] - b64.lower[k]
        assert w64 <= 0.35 * w32


def test_transport_identity():
    b = eigenvalue_bounds(P0, 16, 3)
    t = transport_bounds(b, AffineMap(0.0, 1.0))
    for k in range(3):
        assert t.lower[k] == pytest.approx(b.lower[k], rel=1e-12)
        assert t.upper[k] == pytest.approx(b.upper[k], rel=1e-12)


def test_transport_stretch():
    b = eigenvalue_bounds(P0, 16, 3)
    t = transport_bounds(b, AffineMap(0.0, 2.0))
    for k in range(3):
        assert t.lower[k] == pytest.approx(1.0 * b.lower[k], rel=1e-12)
        assert t.upper[k] == pytest.approx(4.0 * b.upper[k], rel=1e-12)


def test_perturbation_sandwich_fuzz():
    from helpers import sandwich_fuzz

    assert sandwich_fuzz(15, mesh_n=12, seed=17) == 0


def test_segment_rejects_zero_eps():
    with pytest.raises(DegenerateShape):
        segment_bounds(P0, Direction.R, 0.0, 8, 2)


def test_segment_bounds_tiny_r_perturbation():
    seg = segment_bounds(P0, Direction.R, 1e-7, 64, 4)
    for k in (2, 3):
        enc = seg.bounds.interval(k)
        assert enc.contains(EXACT[1])
        assert 120.0 < enc.lo and enc.hi < 125.0
    assert seg.pullback_cond.lo >= 1.0
    assert seg.pullback_cond.hi < 1.0 + 1e-5


def test_segment_bounds_theta_lambda3_cap():
    seg = segment_bounds(P0, Direction.THETA, 1e-7, 64, 4)
    assert seg.bounds.upper[2] <= 124.078
    assert seg.bounds.lower[3] >= 205.0


def test_segment_covers_both_endpoints():
    # bounds valid on the whole segment contain direct bounds at both ends
    eps = 1e-3
    seg = segment_bounds(P0, Direction.THETA, eps, 24, 3)
    direct_p = eigenvalue_bounds(P0, 24, 3)
    direct_pe = eigenvalue_bounds(P0.shifted(Direction.THETA, eps), 24, 3)
    for k in range(1, 4):
        s = seg.bounds.interval(k)
        assert s.lo <= direct_p.upper[k - 1] and direct_p.lower[k - 1] <= s.hi
        assert s.lo <= direct_pe.upper[k - 1] and direct_pe.lower[k - 1] <= s.hi


def test_intersection_tightens():
    seg = segment_bounds(P0, Direction.R, 1e-7, 32, 4)
    direct = eigenvalue_bounds(P0, 32, 4)
    both = direct.intersect(seg.bounds)
    for k in range(4):
        assert both.lower[k] >= max(direct.lower[k], seg.bounds.lower[k]) - 1e-12
        assert both.upper[k] <= min(direct.upper[k], seg.bounds.upper[k]) + 1e-12
        assert both.lower[k] <= EXACT[k] <= both.upper[k]


def test_bounds_data_exposes_discrete_systems():
    data = compute_bounds_data(P0, 16, 4)
    assert data.cg_system.k == 5 and data.cr_system.k == 5
    assert data.cg_space.n_dofs == (16 - 1) * (16 - 2) // 2
    assert data.mesh.h == pytest.approx(1.0 / 16, rel=1e-12)
