"""Acceptance suite: every exit criterion at its pinned tolerance.

Run with output visible to get the one-line verdicts:

    pytest tests/test_acceptance.py -v -s
"""

import math
import random
import time

import numpy as np

from sl3inv.enveloping import normal_form
from sl3inv.invariant import (
    BasisExpansion,
    NotCentral,
    basis_expand,
    casimir_image_residuals,
    center_check,
    center_expand,
    center_reconstruct,
    central_cubic,
    central_quadratic,
    generator,
    key_degree,
    verify_all_lemma_families,
    verify_relations,
)
from sl3inv.scalars import GaussianRational


def _verdict(num: int, label: str, ok: bool, detail: str = ""):
    mark = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"[{mark}] criterion {num}: {label}{suffix}")
    assert ok, f"criterion {num} failed: {label}{suffix}"


def test_criterion_1_exact_relation_suite():
    t0 = time.time()
    report = verify_relations()
    elapsed = time.time() - t0
    bad = [r["name"] for r in report if not r["pass"]]
    _verdict(
        1,
        "exact relation suite (presentation, word identities, siblings)",
        not bad and elapsed < 10.0,
        f"{len(report)} identities, {elapsed:.2f}s",
    )


def test_criterion_2_center_images():
    t0 = time.time()
    residuals = casimir_image_residuals()
    elapsed = time.time() - t0
    ok = all(r.is_zero() for _, r in residuals) and elapsed < 1.0
    _verdict(2, "quotient images of the two center elements, exact",
             ok, f"{elapsed:.2f}s")


def test_criterion_3_lemma_families_caps_3():
    t0 = time.time()
    report = verify_all_lemma_families(caps=(3, 3, 3, 3, 3))
    elapsed = time.time() - t0
    bad = [r for r in report if not r["pass"]]
    _verdict(
        3,
        "graded commutator families, all exponents <= 3, exact bounds",
        not bad and elapsed < 300.0,
        f"{len(report)} tuples, {elapsed:.0f}s",
    )


def test_criterion_4_basis_and_center():
    rng = random.Random(2024)
    keys = [
        (k, j, i, l, m)
        for k in range(6) for j in range(6) for i in range(6)
        for l in range(4) for m in range(4)
        if min(k, j, i) == 0 and key_degree((k, j, i, l, m)) <= 10
    ]
    ok_round = True
    for _ in range(200):
        chosen = rng.sample(keys, rng.randint(1, 6))
        exp = BasisExpansion({
            key: GaussianRational(rng.randint(-9, 9), rng.randint(-3, 3))
            for key in chosen
        })
        if basis_expand(exp.reconstruct()) != exp:
            ok_round = False
            break

    ok_central = center_check(central_quadratic()) and center_check(central_cubic())

    ok_poly = True
    for _ in range(20):
        poly = {}
        for _ in range(rng.randint(1, 4)):
            km = (rng.randint(0, 3), rng.randint(0, 3))
            poly[km] = GaussianRational(rng.randint(-7, 7), rng.randint(-2, 2))
        poly = {km: c for km, c in poly.items() if c}
        if center_expand(center_reconstruct(poly)) != poly:
            ok_poly = False
            break

    ok_witness = False
    try:
        center_expand(generator("D12"))
    except NotCentral as exc:
        expected = generator("D123") - generator("D213")
        ok_witness = (
            exc.generator_name == "D13"
            and exc.residual in (expected, -expected)
        )
    _verdict(
        4,
        "basis round trips, center membership, center polynomials, witness",
        ok_round and ok_central and ok_poly and ok_witness,
    )


def test_criterion_5_catalog_crosscheck():
    from sl3inv.operators import crosscheck_catalog, verify_class_p_identities

    t0 = time.time()
    report = crosscheck_catalog(trials=20, tol_order2=1e-5, tol_order3=1e-4,
                                seed=101)
    classp = verify_class_p_identities(trials=20, tol=1e-5, seed=102)
    elapsed = time.time() - t0
    bad = [r for r in report + classp if not r["pass"]]
    worst = max(r["max_abs_dev"] for r in report + classp)
    _verdict(
        5,
        "13 coordinate-operator tables vs definitional differences, "
        "plus first-order identity chain",
        not bad and elapsed < 120.0,
        f"worst dev {worst:.2e}, {elapsed:.0f}s",
    )


def test_criterion_6_invariance():
    from sl3inv.operators import coset_independence_report, left_invariance_report

    d12 = generator("D12")
    r1 = left_invariance_report(d12, trials=20, tol=1e-5, seed=103)
    r2 = coset_independence_report(d12, trials=20, tol=1e-6, seed=104)
    _verdict(
        6,
        "left-translation commutation (1e-5) and lift independence (1e-6)",
        r1["pass"] and r2["pass"],
        f"devs {r1['max_abs_dev']:.2e} / {r2['max_abs_dev']:.2e}",
    )


def test_criterion_7_self_adjointness_ingredients():
    from sl3inv.operators import FiniteDiffScheme
    from sl3inv.quadrature import (
        density_probe,
        d12_operator,
        grid_for_supports,
        probe_tail_field,
        random_bump_pair,
        symmetry_defect,
        verify_cutoff_properties,
    )

    rng = np.random.default_rng(105)
    worst, ratios = 0.0, []
    for _ in range(10):
        f, g = random_bump_pair(rng)
        grid1 = grid_for_supports([f, g], nodes=40)
        grid2 = grid_for_supports([f, g], nodes=80)
        d1 = symmetry_defect(d12_operator(), f, g, grid1,
                             FiniteDiffScheme(2e-2, 2))
        d2 = symmetry_defect(d12_operator(), f, g, grid2,
                             FiniteDiffScheme(1e-2, 2))
        worst = max(worst, d1)
        ratios.append(d1 / max(d2, 1e-300))
    ok_defect = worst <= 1e-6 and min(ratios) >= 4.0

    cutoff = verify_cutoff_properties(n_max=10, grid_points=1000)
    ok_cutoff = all(r["pass"] for r in cutoff)

    probe = density_probe(probe_tail_field(), n_list=range(1, 9))
    cut = [r["cut_defect"] for r in probe]
    opd = [r["op_defect"] for r in probe]
    ok_probe = (
        all(b <= a for a, b in zip(cut, cut[1:]))
        and all(b <= a for a, b in zip(opd, opd[1:]))
        and cut[-1] <= 0.1 * cut[0]
        and opd[-1] <= 0.1 * opd[0]
    )
    for key in "BCDEF":
        seq = [r[key] for r in probe]
        ok_probe = ok_probe and seq[-1] <= 0.1 * max(seq[0], 1e-300)

    _verdict(
        7,
        "pairing-symmetry defect, cutoff properties, truncation trends",
        ok_defect and ok_cutoff and ok_probe,
        f"max defect {worst:.2e}, min reduction {min(ratios):.1f}x",
    )


def test_criterion_8_numerics_hygiene():
    from sl3inv.group import (
        iwasawa, positive_diagonal, random_chart_point, random_group_matrix,
        rotation_from_euler, euler_from_rotation, upper_unitriangular,
    )
    from sl3inv.quadrature import measure_invariance_report

    rng = np.random.default_rng(106)
    worst_iw = 0.0
    for _ in range(1000):
        g = random_group_matrix(rng)
        k, z, lam = iwasawa(g)
        rec = k.m @ upper_unitriangular(*z) @ positive_diagonal(*lam)
        worst_iw = max(worst_iw, float(np.max(np.abs(rec - g.m))))

    worst_euler = 0.0
    for _ in range(1000):
        p = random_chart_point(rng, margin=1e-9)
        k = rotation_from_euler(p.alpha, p.beta, p.gamma)
        a, b, c = euler_from_rotation(k)
        worst_euler = max(
            worst_euler, abs(a - p.alpha), abs(b - p.beta), abs(c - p.gamma)
        )

    measure = measure_invariance_report(trials=10, nodes=18, seed=107, tol=1e-6)
    worst_measure = max(r["value"] for r in measure)

    ok = (
        worst_iw <= 1e-10
        and worst_euler <= 1e-12
        and all(r["pass"] for r in measure)
    )
    _verdict(
        8,
        "triangular-split residuals, angle round trips, measure invariance",
        ok,
        f"{worst_iw:.1e} / {worst_euler:.1e} / {worst_measure:.1e}",
    )
