"""Command-line driver for the verification suites.

Exit codes: 0 when every selected check passes, 1 when a check fails,
2 on usage or parse errors.
"""

from __future__ import annotations

import json
import sys
import time
from typing import List, Optional

import click
import numpy as np

from . import exprs
from .exprs import MixedAlgebra, ParseError
from .invariant import (
    BasisExpansion,
    NotCentral,
    basis_expand,
    center_check,
    center_expand,
    degree as op_degree,
    key_degree,
    key_symbol,
    mu_reduce,
    verify_all_lemma_families,
    verify_lemma_family,
    verify_relations,
    LEMMA_FAMILIES,
)
from .enveloping import formal_adjoint, is_A_invariant
from .scalars import GaussianRational


def _fail(message: str, code: int = 2):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _parse(text: str):
    try:
        return exprs.parse(text)
    except (ParseError, MixedAlgebra) as exc:
        _fail(str(exc))


def _emit(report: dict, json_path: Optional[str], ok: bool):
    if json_path:
        with open(json_path, "w") as fh:
            json.dump(report, fh, indent=2, default=float)
        click.echo(f"report written to {json_path}")
    sys.exit(0 if ok else 1)


def _print_items(items: List[dict], name_key: str = "name"):
    for item in items:
        mark = "pass" if item.get("pass") else "FAIL"
        label = item.get(name_key) or item.get("check") or item.get("operator")
        extra = ""
        if "max_abs_dev" in item:
            extra = f"  dev={item['max_abs_dev']:.3e} tol={item['tol']:g}"
        elif "residual_terms" in item:
            extra = f"  residual_terms={item['residual_terms']}"
        elif "value" in item and "budget" in item:
            extra = f"  value={item['value']:.3e} budget={item['budget']:.3e}"
        click.echo(f"[{mark}] {label}{extra}")


@click.group()
def main():
    """Exact and numerical checks for the coset-space operator algebra."""


@main.command()
@click.argument("expression")
def nf(expression):
    """Normal form of an enveloping-algebra expression (JSON)."""
    node = _parse(expression)
    try:
        el = exprs.eval_enveloping(node)
    except MixedAlgebra as exc:
        _fail(str(exc))
    click.echo(json.dumps(el.to_json()))


@main.command()
@click.argument("expression")
def mu(expression):
    """Invariance check and reduced representative of an expression."""
    node = _parse(expression)
    try:
        el = exprs.eval_enveloping(node)
    except MixedAlgebra as exc:
        _fail(str(exc))
    if not is_A_invariant(el):
        click.echo(json.dumps({"invariant": False}))
        sys.exit(1)
    red = mu_reduce(el)
    out = {"invariant": True}
    out.update(red.to_json())
    click.echo(json.dumps(out))


@main.command()
@click.argument("expression")
def expand(expression):
    """Ordered-product basis expansion of a coset-space expression."""
    node = _parse(expression)
    try:
        red = exprs.eval_reduced(node)
    except MixedAlgebra as exc:
        _fail(str(exc))
    click.echo(json.dumps(basis_expand(red).to_json()))


@main.command()
@click.argument("expression")
def degree(expression):
    """Filtration degree of a coset-space expression."""
    node = _parse(expression)
    try:
        red = exprs.eval_reduced(node)
    except MixedAlgebra as exc:
        _fail(str(exc))
    d = op_degree(red)
    click.echo("-inf" if d == float("-inf") else str(int(d)))


@main.command()
@click.argument("expression")
def adjoint(expression):
    """Formal adjoint of an expression (reverse, sign, conjugate)."""
    node = _parse(expression)
    try:
        kind = exprs.algebra_of(node)
    except MixedAlgebra as exc:
        _fail(str(exc))
    if kind == "D":
        red = exprs.eval_reduced(node)
        adj = mu_reduce(formal_adjoint(red.rep))
        click.echo(json.dumps(adj.to_json()))
    else:
        el = exprs.eval_enveloping(node)
        click.echo(json.dumps(formal_adjoint(el).to_json()))


@main.group()
def verify():
    """Exact verification suites."""


@verify.command()
@click.option("--json", "json_path", type=click.Path(), default=None)
def relations(json_path):
    """All presentation identities, word identities, center images."""
    t0 = time.time()
    items = verify_relations()
    ok = all(i["pass"] for i in items)
    _print_items(items)
    click.echo(f"{len(items)} identities, all exact: {ok} ({time.time()-t0:.1f}s)")
    _emit({"suite": "relations", "items": items, "pass": ok,
           "wall_time": time.time() - t0}, json_path, ok)


@verify.command()
@click.option("--caps", default="3,3,3,3,3", show_default=True,
              help="exponent caps k,j,i,l,m")
@click.option("--family", default="all", show_default=True,
              type=click.Choice(["all"] + list(LEMMA_FAMILIES)))
@click.option("--json", "json_path", type=click.Path(), default=None)
def lemmas(caps, family, json_path):
    """Graded commutator families over all exponent tuples."""
    try:
        cap_tuple = tuple(int(c) for c in caps.split(","))
        if len(cap_tuple) != 5:
            raise ValueError
    except ValueError:
        _fail("--caps needs five comma-separated integers")
    t0 = time.time()
    if family == "all":
        items = verify_all_lemma_families(cap_tuple)
    else:
        items = verify_lemma_family(family, cap_tuple)
    ok = all(i["pass"] for i in items)
    fails = [i for i in items if not i["pass"]]
    for i in fails:
        click.echo(f"[FAIL] {i['family']} line {i['line']} {i['tuple']}: "
                   f"degree {i['remainder_degree']} > bound {i['bound']}")
    click.echo(f"{len(items)} tuples checked, failures: {len(fails)} "
               f"({time.time()-t0:.1f}s)")
    _emit({"suite": "lemmas", "items": items, "pass": ok,
           "wall_time": time.time() - t0}, json_path, ok)


@verify.command()
@click.option("--max-degree", default=10, show_default=True)
@click.option("--count", default=50, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--json", "json_path", type=click.Path(), default=None)
def basis(max_degree, count, seed, json_path):
    """Expansion round trips and leading-symbol injectivity."""
    t0 = time.time()
    rng = np.random.default_rng(seed)
    keys = []
    kmax = max_degree // 2
    lmax = max_degree // 3
    for k in range(kmax + 1):
        for j in range(kmax + 1):
            for i in range(kmax + 1):
                if min(k, j, i) != 0:
                    continue
                for l in range(lmax + 1):
                    for m in range(lmax + 1):
                        key = (k, j, i, l, m)
                        if key_degree(key) <= max_degree:
                            keys.append(key)
    symbols = [key_symbol(k) for k in keys]
    injective = len(set(symbols)) == len(symbols)
    items = [{"name": "leading_symbol_injectivity", "pass": injective,
              "residual_terms": len(symbols) - len(set(symbols))}]
    ok_round = True
    for t in range(count):
        chosen = [keys[int(rng.integers(0, len(keys)))] for _ in range(4)]
        exp = BasisExpansion({
            key: GaussianRational(int(rng.integers(-9, 10)), int(rng.integers(-3, 4)))
            for key in chosen
        })
        back = basis_expand(exp.reconstruct())
        if back != exp:
            ok_round = False
    items.append({"name": f"round_trip_x{count}", "pass": ok_round,
                  "residual_terms": 0})
    ok = injective and ok_round
    _print_items(items)
    _emit({"suite": "basis", "items": items, "pass": ok,
           "wall_time": time.time() - t0}, json_path, ok)


@verify.command()
@click.argument("expression")
@click.option("--json", "json_path", type=click.Path(), default=None)
def center(expression, json_path):
    """Centrality check and center-polynomial expansion."""
    node = _parse(expression)
    try:
        red = exprs.eval_reduced(node)
    except MixedAlgebra as exc:
        _fail(str(exc))
    t0 = time.time()
    if not center_check(red):
        try:
            center_expand(red)
        except NotCentral as exc:
            click.echo(json.dumps({
                "central": False, "witness_generator": exc.generator_name,
            }))
        sys.exit(1)
    poly = center_expand(red)
    out = {
        "central": True,
        "coefficients": [
            {"KM": list(km)} | c.to_json() for km, c in sorted(poly.items())
        ],
    }
    click.echo(json.dumps(out))
    _emit({"suite": "center", "items": [{"name": "central", "pass": True}],
           "pass": True, "wall_time": time.time() - t0}, json_path, True)


@main.command()
@click.option("--trials", default=20, show_default=True)
@click.option("--tol", default=1e-5, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--json", "json_path", type=click.Path(), default=None)
def crosscheck(trials, tol, seed, json_path):
    """Definitional vs closed-form tables, plus first-order identities."""
    from .operators import crosscheck_catalog, verify_class_p_identities

    t0 = time.time()
    items = crosscheck_catalog(trials=trials, tol_order2=tol,
                               tol_order3=max(tol, 1e-4), seed=seed)
    items += verify_class_p_identities(trials=trials, tol=tol, seed=seed)
    ok = all(i["pass"] for i in items)
    _print_items(items, "operator")
    click.echo(f"{len(items)} checks ({time.time()-t0:.1f}s)")
    _emit({"suite": "crosscheck", "items": items, "pass": ok,
           "wall_time": time.time() - t0}, json_path, ok)


@main.command()
@click.option("--suite", type=click.Choice(["cutoff", "selfadjoint", "density"]),
              required=True)
@click.option("--grid", default=40, show_default=True,
              help="nodes per axis for the pairing checks")
@click.option("--trials", default=10, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--tol", default=1e-6, show_default=True)
@click.option("--json", "json_path", type=click.Path(), default=None)
def quadrature(suite, grid, trials, seed, tol, json_path):
    """Cutoff properties, pairing symmetry, and truncation trends."""
    from . import quadrature as quad
    from .operators import FiniteDiffScheme

    t0 = time.time()
    if suite == "cutoff":
        items = quad.verify_cutoff_properties(n_max=10)
    elif suite == "selfadjoint":
        rng = np.random.default_rng(seed)
        items = []
        for t in range(trials):
            f, g = quad.random_bump_pair(rng)
            box = quad.grid_for_supports([f, g], nodes=grid)
            d = quad.symmetry_defect(
                quad.d12_operator(), f, g, box, FiniteDiffScheme(2e-2, 2)
            )
            items.append({"check": "pairing_symmetry_defect", "n": t,
                          "value": d, "budget": tol, "pass": d <= tol})
    else:
        probe = quad.density_probe(quad.probe_tail_field(), n_list=range(1, 9))
        items = []
        for key in ("cut_defect", "op_defect"):
            seqs = [r[key] for r in probe]
            mono = all(b <= a * (1 + 1e-9) for a, b in zip(seqs, seqs[1:]))
            trend = seqs[-1] <= 0.1 * seqs[0]
            items.append({"check": f"{key}_nonincreasing_to_zero",
                          "n": len(seqs), "value": seqs[-1],
                          "budget": 0.1 * seqs[0], "pass": mono and trend})
        for key in ("B", "C", "D", "E", "F"):
            seqs = [r[key] for r in probe]
            items.append({"check": f"term_{key}_to_zero", "n": len(seqs),
                          "value": seqs[-1], "budget": 0.1 * max(seqs[0], 1e-300),
                          "pass": seqs[-1] <= 0.1 * max(seqs[0], 1e-300)})
    ok = all(i["pass"] for i in items)
    _print_items(items, "check")
    click.echo(f"{len(items)} checks ({time.time()-t0:.1f}s)")
    _emit({"suite": f"quadrature-{suite}", "items": items, "pass": ok,
           "wall_time": time.time() - t0}, json_path, ok)


if __name__ == "__main__":
    main()
