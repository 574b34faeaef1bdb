import math

import numpy as np
import pytest

from sl3inv.enveloping import (
    E12, E21, basis_element, commutator as env_commutator, monomial,
    multiply, normal_form,
)
from sl3inv.group import (
    ChartPoint,
    ExtendedChartPoint,
    IDENTITY_ROTATION,
    chart_embed,
    iwasawa,
    random_chart_point,
    random_extended_point,
    random_group_matrix,
    rotation_from_euler,
)
from sl3inv.invariant import generator
from sl3inv.operators import (
    CATALOG_NAMES,
    CoordinateOperator,
    DEFAULT_SCHEME,
    FiniteDiffScheme,
    UnknownOperator,
    _point_array,
    apply_coordinate_operator,
    coordinate_operator,
    coset_independence_report,
    crosscheck_catalog,
    derivative_at_zero,
    eval_invariant_op,
    eval_left_derivative,
    eval_right_derivative,
    fd_partial,
    left_invariance_report,
    lift_to_group,
    verify_class_p_identities,
)
from sl3inv.scalars import GaussianRational, rational


def test_derivative_at_zero_orders():
    # cancellation noise grows like eps/h^order; tolerances track that
    sch = FiniteDiffScheme(1e-3, 3)
    f = lambda t: math.exp(1.7 * t)
    for order, tol in ((1, 1e-9), (2, 1e-7), (3, 1e-4)):
        val = derivative_at_zero(f, order, sch)
        assert abs(val - 1.7**order) < tol


def test_fd_partial_mixed():
    sch = FiniteDiffScheme(1e-3, 2)
    f = lambda a: a[0] ** 2 * math.sin(a[1]) * a[3]
    p = np.array([0.4, 0.3, 0.0, 1.2, 0.0, 0.0, 1.0, 1.0])
    got = fd_partial(f, p, (1, 1, 0, 1, 0, 0, 0, 0), sch)
    want = 2 * 0.4 * math.cos(0.3)
    assert abs(got - want) < 1e-6


def test_eval_right_derivative_examples(rng):
    # empty word reproduces the function value
    g = random_group_matrix(rng)
    f = lambda gm: gm[0, 0] + 2.0 * gm[1, 2]
    from sl3inv.enveloping import ONE_ELEMENT

    assert abs(eval_right_derivative(ONE_ELEMENT, f, g) - f(g.m)) < 1e-14

    # flow value of the z12 coordinate at the identity is lam1/lam2 = 1
    def f_z12(gm):
        from sl3inv.group import chart_coords

        return chart_coords(IDENTITY_ROTATION, gm).z12

    val = eval_right_derivative(basis_element(E12), f_z12, np.eye(3))
    assert abs(val - 1.0) < 1e-9

    # at lam = (2, 3) the z13 flow coefficient is lam1^2 lam2 = 12
    p = ExtendedChartPoint(0, 0, 0, 0, 0, 0, 2.0, 3.0)
    g = chart_embed(IDENTITY_ROTATION, p)

    def f_z13(gm):
        from sl3inv.group import chart_coords

        return chart_coords(IDENTITY_ROTATION, gm).z13

    from sl3inv.enveloping import E13

    val = eval_right_derivative(basis_element(E13), f_z13, g)
    assert abs(val - 12.0) < 1e-6


def test_eval_left_derivative_examples(rng):
    from sl3inv.enveloping import E23, E32

    x = random_chart_point(rng, margin=0.3, z_scale=0.7)
    f_alpha = lambda q: q.alpha
    el = basis_element(E23) - basis_element(E32)
    assert abs(eval_left_derivative(el, f_alpha, x) - 1.0) < 1e-8


def test_eval_invariant_op_examples(rng):
    d12 = generator("D12")
    for _ in range(5):
        x = random_chart_point(rng, margin=0.3, z_scale=0.8)
        # on a function linear in z12 the second-order part drops out
        val = eval_invariant_op(d12, lambda q: q.z12, x)
        assert abs(val - 2.0 * x.z12) < 1e-6
    zero = d12 - d12
    assert eval_invariant_op(zero, lambda q: q.z12, x) == 0


def test_linearity_of_right_derivative(rng):
    from sl3inv.enveloping import E13, E23

    g = random_group_matrix(rng, scale=0.3)
    f = lift_to_group(lambda q: math.sin(q.alpha) * q.z13 + q.z23**2)
    u = normal_form([E12, E23])
    v = normal_form([E13])
    lhs = eval_right_derivative(u + v, f, g)
    rhs = eval_right_derivative(u, f, g) + eval_right_derivative(v, f, g)
    assert abs(lhs - rhs) < 1e-9


def test_leibniz_first_order(rng):
    g = random_group_matrix(rng, scale=0.3)
    f1 = lift_to_group(lambda q: q.z12 * math.cos(q.beta))
    f2 = lift_to_group(lambda q: q.z23 + 0.5 * q.alpha)
    u = basis_element(E21)
    prod = lambda gm: f1(gm) * f2(gm)
    lhs = eval_right_derivative(u, prod, g)
    rhs = (
        eval_right_derivative(u, f1, g) * f2(g.m)
        + f1(g.m) * eval_right_derivative(u, f2, g)
    )
    assert abs(lhs - rhs) < 1e-6


def test_commutator_consistency(rng):
    from sl3inv.enveloping import E13, E23, E31

    g = random_group_matrix(rng, scale=0.25)
    f = lift_to_group(lambda q: q.z13 * math.sin(q.gamma) + q.z12)
    for a, b in [(E12, E21), (E23, E31), (E12, E13)]:
        word_ab = normal_form([a, b])
        word_ba = normal_form([b, a])
        comm = env_commutator(basis_element(a), basis_element(b))
        lhs = eval_right_derivative(comm, f, g)
        rhs = eval_right_derivative(word_ab, f, g) - eval_right_derivative(
            word_ba, f, g
        )
        assert abs(lhs - rhs) < 1e-4


def test_left_right_flows_commute(rng):
    from sl3inv.enveloping import E23

    x = random_chart_point(rng, margin=0.35, z_scale=0.6)
    d12 = generator("D12")
    u = basis_element(E23) - basis_element(5)  # rotation direction

    def l_then_r(q):
        return eval_invariant_op(d12, lambda y: y.z12 * y.z23, q)

    lhs = eval_left_derivative(u, l_then_r, x)

    def r_field(q):
        return q.z12 * q.z23

    def r_then_l(q: ChartPoint):
        return eval_left_derivative(u, r_field, q)

    rhs = eval_invariant_op(d12, r_then_l, x)
    assert abs(lhs - rhs) < 1e-4


def test_catalog_crosscheck_quick():
    report = crosscheck_catalog(trials=6, seed=7)
    assert {r["operator"] for r in report} == set(CATALOG_NAMES)
    for r in report:
        assert r["pass"], (r["operator"], r["max_abs_dev"])


def test_catalog_crosscheck_random_chart(rng):
    # the invariant operator and the right flows keep the same table in
    # every chart; the left-flow tables are pinned to the identity chart
    k0 = iwasawa(random_group_matrix(rng, scale=0.2))[0]
    report = crosscheck_catalog(trials=4, seed=11, k0=k0,
                                names=("D12", "R_E21", "R_E31", "R_E12"))
    for r in report:
        assert r["pass"], (r["operator"], r["max_abs_dev"])


def test_left_flow_tables_are_identity_chart_only(rng):
    # in a rotated chart the left-flow coordinate form genuinely differs
    k0 = iwasawa(random_group_matrix(rng, scale=0.3))[0]
    report = crosscheck_catalog(trials=6, seed=12, k0=k0, names=("L_X12",))
    assert report[0]["max_abs_dev"] > 1e-3


def test_d12_table_examples():
    d12 = coordinate_operator("D12")
    assert len(d12.terms) == 7
    p = ChartPoint(0.1, 0.2, 0.3, 0.7, 0.2, -0.4)
    # constants are annihilated: no zeroth-order term
    assert abs(d12.apply(lambda a: 1.0, p)) < 1e-12
    val = d12.apply(lambda a: a[3] ** 2, p)
    assert abs(val - (6 * 0.7**2 + 2)) < 1e-8
    # single-term tables
    r12 = coordinate_operator("R_E12")
    assert len(r12.terms) == 1
    assert len(coordinate_operator("L_X23_minus_L_X32").terms) == 1
    with pytest.raises(UnknownOperator):
        coordinate_operator("R_E11")


def test_r_e32_lambda_direction():
    op = coordinate_operator("R_E32")
    p = ExtendedChartPoint(0.1, -0.2, 0.25, 0.4, -0.3, 0.6, 1.3, 0.8)
    val = op.apply(lambda a: a[7], p)  # lam2 coordinate
    want = p.z23 / (p.lam1 * p.lam2)
    assert abs(val - want) < 1e-9


def test_class_p_identities_quick():
    report = verify_class_p_identities(trials=5, seed=3)
    for r in report:
        assert r["pass"], (r["operator"], r["max_abs_dev"])


def test_invariance_reports_quick():
    d12 = generator("D12")
    r = left_invariance_report(d12, trials=6, tol=1e-5, seed=5)
    assert r["pass"], r
    r = coset_independence_report(d12, trials=6, tol=1e-6, seed=6)
    assert r["pass"], r


def test_coordinate_operator_algebra():
    a = CoordinateOperator([(1, (0, 0, 0, 1, 0, 0, 0, 0))])
    import sympy as sp
    from sl3inv.operators import Z12

    b = CoordinateOperator([(Z12, (0, 0, 0, 1, 0, 0, 0, 0))])
    comm = a.commutator(b)
    # [d/dz12, z12 d/dz12] = d/dz12
    assert comm.terms == a.terms
    scaled = a.premultiply(sp.sin(Z12))
    p = ChartPoint(0, 0, 0, 0.4, 0, 0)
    got = apply_coordinate_operator(scaled, lambda q: q[3] ** 2, p)
    assert abs(got - math.sin(0.4) * 0.8) < 1e-9


def test_domain_escape_near_chart_edge():
    from sl3inv.operators import DomainEscape
    from sl3inv.enveloping import E23, E32

    # a huge stencil step walks the rotation angle out of the box
    x = ChartPoint(1.5, 1.0, 0.0, 0.0, 0.0, 0.0)
    el = basis_element(E23) - basis_element(E32)
    with pytest.raises(DomainEscape):
        eval_left_derivative(el, lambda q: q.alpha, x,
                             FiniteDiffScheme(0.5, 2))
