import json

from click.testing import CliRunner

from sl3inv.cli import main


def run(*args):
    return CliRunner().invoke(main, args, catch_exceptions=False)


def test_nf_and_degree():
    res = run("nf", "E12*E21*E13*E31")
    assert res.exit_code == 0
    data = json.loads(res.output)
    assert {"exp": [1, 0, 1, 0, 1, 0, 0, 0], "re": "1", "im": "0"} in data["terms"]
    res = run("degree", "D123*D213")
    assert res.exit_code == 0
    assert res.output.strip() == "6"
    res = run("degree", "D12 - D12")
    assert res.output.strip() == "-inf"


def test_mu_and_adjoint():
    res = run("mu", "E12*E21")
    assert res.exit_code == 0
    data = json.loads(res.output)
    assert data["invariant"] is True
    assert data["basis"] == [{"kjilm": [1, 0, 0, 0, 0], "re": "1", "im": "0"}]
    res = run("mu", "E12")
    assert res.exit_code == 1
    res = run("adjoint", "E12")
    assert json.loads(res.output)["terms"][0]["re"] == "-1"
    # twisted cubic generator is fixed by the adjoint
    res = run("adjoint", "i*D123")
    fixed = json.loads(res.output)
    res2 = run("mu", "i*(E12*E23*E31 + 1/2*(E23*E32 - E13*E31 - E12*E21))")
    lifted = json.loads(res2.output)
    assert fixed["terms"] == lifted["terms"]


def test_expand_contains_cubic_pair():
    res = run("expand", "D12*D23*D31")
    data = json.loads(res.output)
    assert {"kjilm": [0, 0, 0, 1, 1], "re": "1", "im": "0"} in data["basis"]


def test_exit_codes():
    assert run("nf", "D12 * E21").exit_code == 2
    assert run("nf", "E12 +").exit_code == 2
    assert run("verify", "center", "D123 + D213").exit_code == 0
    assert run("verify", "center", "D12").exit_code == 1


def test_verify_relations_and_basis(tmp_path):
    out = tmp_path / "rel.json"
    res = run("verify", "relations", "--json", str(out))
    assert res.exit_code == 0
    data = json.loads(out.read_text())
    assert data["pass"] is True and len(data["items"]) >= 37
    res = run("verify", "basis", "--max-degree", "6", "--count", "5")
    assert res.exit_code == 0


def test_verify_lemmas_tiny():
    res = run("verify", "lemmas", "--caps", "1,1,1,1,1",
              "--family", "quad_cubics_only")
    assert res.exit_code == 0
    assert run("verify", "lemmas", "--caps", "1,2").exit_code == 2


def test_crosscheck_and_quadrature_small(tmp_path):
    res = run("crosscheck", "--trials", "3", "--seed", "2")
    assert res.exit_code == 0
    out = tmp_path / "cut.json"
    res = run("quadrature", "--suite", "cutoff", "--json", str(out))
    assert res.exit_code == 0
    assert json.loads(out.read_text())["pass"] is True
    res = run("quadrature", "--suite", "selfadjoint", "--trials", "2",
              "--grid", "40")
    assert res.exit_code == 0


def test_crosscheck_deterministic_per_seed():
    a = run("crosscheck", "--trials", "2", "--seed", "9")
    b = run("crosscheck", "--trials", "2", "--seed", "9")
    assert a.output == b.output and a.exit_code == b.exit_code == 0
