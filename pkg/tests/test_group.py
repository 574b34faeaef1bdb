import math

import numpy as np
import pytest

from sl3inv.group import (
    ChartPoint,
    ExtendedChartPoint,
    GroupMatrix,
    IDENTITY_ROTATION,
    OutOfChart,
    RotationMatrix,
    chart_coords,
    chart_embed,
    euler_from_rotation,
    iwasawa,
    mat_exp,
    measure_density,
    positive_diagonal,
    random_chart_point,
    random_extended_point,
    random_group_matrix,
    random_sl3,
    rotation_from_euler,
    sl3_basis_matrix,
    upper_unitriangular,
)


def test_mat_exp_examples():
    assert np.allclose(mat_exp(np.zeros((3, 3))).m, np.eye(3))
    t = 0.37
    nil = mat_exp(t * sl3_basis_matrix(0))
    assert np.allclose(nil.m, np.eye(3) + t * sl3_basis_matrix(0), atol=1e-15)
    d = mat_exp(np.diag([1.0, -1.0, 0.0]) * t)
    assert np.allclose(np.diag(d.m), [math.exp(t), math.exp(-t), 1.0])


def test_mat_exp_against_scipy(rng):
    import scipy.linalg as sla

    for _ in range(50):
        m = random_sl3(rng, scale=1.2)
        assert np.max(np.abs(mat_exp(m).m - sla.expm(m))) < 1e-12


def test_iwasawa_examples():
    k, z, lam = iwasawa(GroupMatrix(np.eye(3)))
    assert np.allclose(k.m, np.eye(3))
    assert z == (0.0, 0.0, 0.0) and lam == (1.0, 1.0)
    k, z, lam = iwasawa(GroupMatrix(np.diag([2.0, 1.0, 0.5])))
    assert np.allclose(k.m, np.eye(3)) and lam == (2.0, 1.0)


def test_iwasawa_reconstruction_1000(rng):
    worst = 0.0
    for _ in range(1000):
        g = random_group_matrix(rng)
        k, z, lam = iwasawa(g)
        rec = k.m @ upper_unitriangular(*z) @ positive_diagonal(*lam)
        worst = max(worst, float(np.max(np.abs(rec - g.m))))
    assert worst <= 1e-10


def test_iwasawa_uniqueness_column_sign_flips(rng):
    flips = [np.diag(d) for d in
             ([1, 1, 1], [-1, -1, 1], [-1, 1, -1], [1, -1, -1])]
    for _ in range(200):
        g = random_group_matrix(rng)
        k, z, lam = iwasawa(g)
        for flip in flips[1:]:
            # flipped rotation with compensated triangular part cannot
            # reproduce g while keeping the diagonal positive
            rec = (k.m @ flip) @ upper_unitriangular(*z) @ positive_diagonal(*lam)
            assert np.max(np.abs(rec - g.m)) > 1e-3


def test_euler_round_trip_1000(rng):
    worst = 0.0
    for _ in range(1000):
        p = random_chart_point(rng, margin=1e-7)
        k = rotation_from_euler(p.alpha, p.beta, p.gamma)
        a, b, c = euler_from_rotation(k)
        worst = max(worst, abs(a - p.alpha), abs(b - p.beta), abs(c - p.gamma))
    assert worst <= 1e-12


def test_euler_out_of_chart():
    assert euler_from_rotation(IDENTITY_ROTATION) == (0.0, 0.0, 0.0)
    half_turn = np.diag([-1.0, -1.0, 1.0])
    with pytest.raises(OutOfChart):
        euler_from_rotation(half_turn)
    tilted = rotation_from_euler(0.0, math.pi / 3 + 0.2, 0.0)
    with pytest.raises(OutOfChart):
        euler_from_rotation(tilted)


def test_chart_round_trip_identity():
    p = ExtendedChartPoint(0, 0, 0, 0, 0, 0, 1, 1)
    g = chart_embed(IDENTITY_ROTATION, p)
    assert np.allclose(g.m, np.eye(3))
    q = chart_coords(IDENTITY_ROTATION, g)
    assert np.allclose(p.as_array(), q.as_array())


def test_chart_round_trip_random_k0(rng):
    k0 = iwasawa(random_group_matrix(rng))[0]
    for _ in range(200):
        p = random_extended_point(rng)
        g = chart_embed(k0, p)
        q = chart_coords(k0, g)
        assert np.max(np.abs(p.as_array() - q.as_array())) <= 1e-10


def test_chart_out_of_chart(rng):
    k0 = IDENTITY_ROTATION
    far = rotation_from_euler(0.0, 0.0, 0.0).m @ np.diag([-1.0, 1.0, -1.0])
    g = GroupMatrix(far @ upper_unitriangular(0.3, 0.1, -0.2))
    with pytest.raises(OutOfChart):
        chart_coords(k0, g)


def test_chart_transition_consistency(rng):
    # two nearby charts agree on overlaps through both round trips
    k0a = IDENTITY_ROTATION
    k0b = rotation_from_euler(0.15, -0.1, 0.2)
    for _ in range(100):
        p = random_extended_point(rng, margin=0.6, z_scale=0.8)
        g = chart_embed(k0a, p)
        try:
            q = chart_coords(k0b, g)
        except OutOfChart:
            continue
        g2 = chart_embed(k0b, q)
        assert np.max(np.abs(g2.m - g.m)) <= 1e-9
        back = chart_coords(k0a, g2)
        assert np.max(np.abs(back.as_array() - p.as_array())) <= 1e-9


def test_measure_density():
    assert measure_density(ChartPoint(0, 0, 0, 0, 0, 0)) == 1.0
    assert measure_density(ChartPoint(0, 0.5, 0, 1, 2, 3)) == math.cos(0.5)
    assert measure_density(ChartPoint(0, 1.04, 0, 0, 0, 0)) > 0.5
    with pytest.raises(OutOfChart):
        ChartPoint(0, math.pi / 4 + math.pi / 12 + 0.01, 0, 0, 0, 0)


def test_matrix_validation():
    with pytest.raises(ValueError):
        GroupMatrix(2 * np.eye(3))
    with pytest.raises(ValueError):
        RotationMatrix(np.eye(3) + 1e-6)
    with pytest.raises(ValueError):
        ExtendedChartPoint(0, 0, 0, 0, 0, 0, -1.0, 1.0)


def test_chart_point_json_round_trip():
    p = ChartPoint(0.1, -0.2, 0.3, 1.0, -2.0, 0.5)
    assert ChartPoint.from_json(p.to_json()) == p
    q = ExtendedChartPoint(0.1, -0.2, 0.3, 1.0, -2.0, 0.5, 1.5, 0.7)
    assert ExtendedChartPoint.from_json(q.to_json()) == q
    assert len(q.to_json()) == 8
