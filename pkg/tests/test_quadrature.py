import math

import numpy as np
import pytest

from sl3inv.group import ChartPoint
from sl3inv.operators import FiniteDiffScheme, coordinate_operator
from sl3inv.quadrature import (
    CUTOFF_DERIVATIVE_BOUND,
    CutoffFunction,
    QuadratureGrid,
    SeparableField,
    SupportEscape,
    XI_SUP_D1,
    XI_SUP_D2,
    apply_operator_blocks,
    chi,
    chi_partials,
    cutoff_rotation_symbolic_zero,
    d12_angle_part,
    d12_operator,
    density_probe,
    grid_for_supports,
    inner_product,
    measure_invariance_report,
    norm,
    probe_tail_field,
    product_bump,
    random_bump_pair,
    separable_integral,
    smooth_bump_1d,
    symmetry_defect,
    translated_integral,
    verify_cutoff_properties,
)


def test_chi_examples():
    p0 = ChartPoint(0.2, -0.1, 0.4, 0.0, 0.0, 0.0)
    for n in (1, 2, 7):
        assert chi(n, p0) == 1.0
    # first factor dies once the radial argument reaches 2
    p = ChartPoint(0, 0, 0, 0.0, 2.0, 1.0)
    assert chi(1, p) == 0.0
    p = ChartPoint(0, 0, 0, 1.0, 0.5, -0.5)
    assert 0.0 <= chi(1, p) <= 1.0


def test_chi_partials_match_differences():
    cut = CutoffFunction(2)
    p = ChartPoint(0.1, 0.0, -0.2, 1.8, 0.9, -0.7)
    h = 1e-6
    for mi, move in [
        ((0, 0, 0, 1, 0, 0), (0, 0, 0, h, 0, 0)),
        ((0, 0, 0, 0, 1, 0), (0, 0, 0, 0, h, 0)),
        ((0, 0, 0, 0, 0, 1), (0, 0, 0, 0, 0, h)),
    ]:
        arr = np.array([p.alpha, p.beta, p.gamma, p.z12, p.z13, p.z23])
        plus = ChartPoint(*(arr + np.array(move)))
        minus = ChartPoint(*(arr - np.array(move)))
        fd = (chi(2, plus) - chi(2, minus)) / (2 * h)
        assert abs(cut.partial(p, mi) - fd) < 1e-8
    # second z12 derivative
    plus = ChartPoint(p.alpha, p.beta, p.gamma, p.z12 + 1e-4, p.z13, p.z23)
    minus = ChartPoint(p.alpha, p.beta, p.gamma, p.z12 - 1e-4, p.z13, p.z23)
    fd2 = (chi(2, plus) - 2 * chi(2, p) + chi(2, minus)) / 1e-8
    assert abs(cut.partial(p, (0, 0, 0, 2, 0, 0)) - fd2) < 1e-5


def test_chi_partial_validation():
    cut = CutoffFunction(1)
    p = ChartPoint(0, 0, 0, 1, 1, 1)
    assert cut.partial(p, (1, 0, 0, 0, 0, 0)) == 0.0
    with pytest.raises(ValueError):
        cut.partial(p, (0, 0, 0, 3, 0, 0))
    with pytest.raises(ValueError):
        CutoffFunction(0)


def test_cutoff_properties_report():
    report = verify_cutoff_properties(n_max=10, grid_points=400)
    assert all(r["pass"] for r in report), report
    names = {r["check"] for r in report}
    assert "weighted_derivative_bound" in names
    assert cutoff_rotation_symbolic_zero()
    assert CUTOFF_DERIVATIVE_BOUND == pytest.approx(
        16 * XI_SUP_D1 + 4 * (XI_SUP_D1 + XI_SUP_D2)
    )


def test_inner_product_basics(rng):
    f = product_bump([0.0] * 6, [0.6] * 6)
    g = product_bump([0.05, 0, 0, 0.1, 0, 0], [0.7] * 6)
    grid = grid_for_supports([f, g], nodes=32)
    ipff = inner_product(f, f, grid)
    assert ipff.real > 0 and abs(ipff.imag) < 1e-15
    ipfg = inner_product(f, g, grid)
    ipgf = inner_product(g, f, grid)
    assert abs(ipfg - np.conj(ipgf)) < 1e-14
    # node doubling changes the value only at roundoff scale
    grid2 = grid_for_supports([f, g], nodes=64)
    assert abs(inner_product(f, f, grid2) - ipff) / abs(ipff) < 1e-8


def test_inner_product_odd_even_orthogonality():
    grid = QuadratureGrid(bounds={"z12": (-2.0, 2.0)}, nodes=24)
    even = SeparableField.product({"z12": lambda z: np.exp(-(z**2))})
    odd = SeparableField.product({"z12": lambda z: z * np.exp(-(z**2))})
    assert abs(inner_product(even, odd, grid)) < 1e-14


def test_support_escape():
    f = product_bump([0.0] * 6, [0.5] * 6)
    g = product_bump([0.0] * 3 + [5.8] * 3, [0.5] * 6)
    grid = grid_for_supports([f], nodes=8)
    with pytest.raises(SupportEscape):
        inner_product(f, g, grid)


def test_apply_blocks_matches_pointwise(rng):
    f, _ = random_bump_pair(rng)
    scheme = FiniteDiffScheme(1e-2, 2)
    out = apply_operator_blocks(d12_operator(), f, scheme)

    def f_call(arr):
        return complex(f.eval_point(ChartPoint(*arr[:6])))

    for _ in range(4):
        p = ChartPoint(*rng.uniform(-0.25, 0.25, 6))
        a = out.eval_point(p)
        b = d12_operator().apply(f_call, p, scheme)
        assert abs(a - b) < 1e-9


def test_symmetry_defect_same_and_disjoint(rng):
    f, _ = random_bump_pair(rng)
    grid = grid_for_supports([f], nodes=40)
    scheme = FiniteDiffScheme(2e-2, 2)
    # real bump against itself: both pairings are the same real number
    assert symmetry_defect(d12_operator(), f, f, grid, scheme) < 1e-12
    fd_, gd_ = random_bump_pair(rng, overlap=False)
    grid2 = QuadratureGrid(
        bounds={"z12": (-4.0, 4.0), "z13": (-4.0, 4.0), "z23": (-4.0, 4.0)},
        nodes=48,
    )
    assert symmetry_defect(d12_operator(), fd_, gd_, grid2, scheme) < 1e-10


def test_symmetry_defect_overlapping_and_scaling(rng):
    worst, ratios = 0.0, []
    for _ in range(3):
        f, g = random_bump_pair(rng)
        grid1 = grid_for_supports([f, g], nodes=40)
        grid2 = grid_for_supports([f, g], nodes=80)
        d1 = symmetry_defect(d12_operator(), f, g, grid1, FiniteDiffScheme(2e-2, 2))
        d2 = symmetry_defect(d12_operator(), f, g, grid2, FiniteDiffScheme(1e-2, 2))
        worst = max(worst, d1)
        ratios.append(d1 / max(d2, 1e-300))
    assert worst <= 1e-6
    assert min(ratios) >= 4.0


def test_density_probe_compact_plateau_field():
    # supported well inside the n=1 plateau: every defect vanishes
    h = product_bump([0.0] * 6, [0.5] * 6)
    rep = density_probe(h, n_list=(1, 2))
    for r in rep:
        assert r["cut_defect"] < 1e-13
        assert r["op_defect"] < 1e-9
        for key in "BCDEF":
            assert r[key] < 1e-9


def test_density_probe_trends():
    rep = density_probe(probe_tail_field(), n_list=range(1, 7))
    cut = [r["cut_defect"] for r in rep]
    opd = [r["op_defect"] for r in rep]
    assert all(b <= a for a, b in zip(cut, cut[1:]))
    assert all(b <= a for a, b in zip(opd, opd[1:]))
    assert cut[-1] < 0.1 * cut[0] and opd[-1] < 0.1 * opd[0]
    assert all(r["split_residual"] <= 1e-5 for r in rep)


def test_density_probe_angle_free_radial_field():
    # no angle dependence and a radial pair factor kill terms B and E
    radial = SeparableField.product({
        "z12": lambda z: 1.0 / (1.0 + np.asarray(z, float) ** 2),
        "zpair": lambda a, b: np.exp(-(a**2 + b**2)),
    })
    rep = density_probe(radial, n_list=(1, 2, 3))
    for r in rep:
        assert r["B"] < 1e-9
        assert r["E"] < 1e-7
        assert r["C"] > 0


def test_angle_part_operator():
    op = d12_angle_part()
    assert len(op.terms) == 3
    assert all(mi[3] == 0 for _, mi in op.terms)


def test_measure_invariance_quick():
    report = measure_invariance_report(trials=2, nodes=14, seed=1, tol=5e-6)
    assert all(r["pass"] for r in report), report


def test_translated_integral_identity_translation():
    bump = product_bump([0.0] * 6, [0.5, 0.45, 0.5, 0.5, 0.5, 0.5])
    box = {ax: (lo - 0.3, hi + 0.3) for ax, (lo, hi) in bump.support.items()}
    grid = QuadratureGrid(box, 12)
    ref = separable_integral(bump, grid)
    val = translated_integral(bump, np.eye(3), grid)
    assert abs(val - ref) < 1e-9 * max(1.0, abs(ref))
