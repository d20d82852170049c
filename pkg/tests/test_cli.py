import json

import pytest

import braidmu as bm
from braidmu.cli import main


def run(args):
    return main(args)


def read_json(path):
    with open(path) as handle:
        return json.load(handle)


def test_generate_and_analyze_kac_takesaki(tmp_path):
    out = tmp_path / "w.json"
    report = tmp_path / "report.json"
    assert run(["generate", "kac-takesaki", "--group", "Zn", "--n", "4",
                "-o", str(out)]) == 0
    bundle = bm.load_bundle(str(out))
    mu = bundle.mult_unitary("W")
    assert bm.pentagon_residual(mu) < 1e-12
    assert run(["analyze", str(out), "--object", "W", "--report", str(report)]) == 0
    tree = read_json(str(report))
    assert tree["pass"] is True
    ranks = {c["name"]: c for c in tree["checks"]}
    assert ranks["rank-c"]["value"] == 16
    assert tree["input"]["sha256"]


def test_generate_super_bundle(tmp_path):
    out = tmp_path / "s.json"
    assert run(["generate", "super", "--dim", "2", "-o", str(out)]) == 0
    bundle = bm.load_bundle(str(out))
    assert bundle.braiding_kind == "phase"
    assert bundle.spaces["L"].grading == (0, 1)


def test_generate_unknown_kind_is_usage_error(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        run(["generate", "nonsense", "-o", str(tmp_path / "x.json")])
    assert exc.value.code == 2


def test_generate_zn_needs_n(tmp_path):
    assert run(["generate", "kac-takesaki", "--group", "Zn",
                "-o", str(tmp_path / "x.json")]) == 2


def test_analyze_identity_bundle_fails_regularity(tmp_path):
    out = tmp_path / "id.json"
    report = tmp_path / "r.json"
    assert run(["generate", "identity", "--dim", "2", "-o", str(out)]) == 0
    assert run(["analyze", str(out), "--object", "F", "--report", str(report)]) == 1
    tree = read_json(str(report))
    checks = {c["name"]: c for c in tree["checks"]}
    assert checks["pentagon"]["pass"] is True
    assert checks["regular"]["pass"] is False


def test_analyze_missing_object_is_usage_error(tmp_path):
    out = tmp_path / "w.json"
    run(["generate", "kac-takesaki", "--group", "Zn", "--n", "2", "-o", str(out)])
    assert run(["analyze", str(out), "--object", "NOPE"]) == 2


def test_analyze_corrupted_matrix_fails_unitarity(tmp_path):
    out = tmp_path / "w.json"
    run(["generate", "kac-takesaki", "--group", "Zn", "--n", "2", "-o", str(out)])
    bundle = bm.load_bundle(str(out))
    m = bundle.operators["W"].matrix.copy()
    m[0, 0] = 2.0
    bundle.operators["W"] = bm.LegOperator(bundle.operators["W"].signature, m)
    bm.save_bundle(bundle, str(out))
    report = tmp_path / "r.json"
    assert run(["analyze", str(out), "--object", "W", "--report", str(report)]) == 1
    tree = read_json(str(report))
    checks = {c["name"]: c for c in tree["checks"]}
    assert checks["unitarity"]["pass"] is False


def test_search_is_byte_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["search", "--category", "super", "--dim", "2", "--seed", "5",
            "--restarts", "3"]
    assert run(args + ["-o", str(a)]) == 0
    assert run(args + ["-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_search_outputs_are_certified(tmp_path):
    out = tmp_path / "found.json"
    report = tmp_path / "r.json"
    assert run(["search", "--category", "super", "--dim", "2", "--seed", "1",
                "--restarts", "3", "-o", str(out), "--report", str(report)]) == 0
    tree = read_json(str(report))
    assert tree["seed"] == 1
    bundle = bm.load_bundle(str(out))
    for name, op in bundle.operators.items():
        mu = bundle.mult_unitary(name)
        assert bm.pentagon_residual(mu) < 1e-8


def test_search_phase_category(tmp_path):
    out = tmp_path / "p.json"
    assert run(["search", "--category", "phase", "--modulus", "3", "--dim", "3",
                "--seed", "4", "--restarts", "1", "-o", str(out)]) == 0
    bundle = bm.load_bundle(str(out))
    assert bundle.braiding_modulus == 3
    for name in bundle.operators:
        assert bm.pentagon_residual(bundle.mult_unitary(name)) < 1e-8


def test_search_with_zero_target_is_exit_zero(tmp_path):
    out = tmp_path / "none.json"
    assert run(["search", "--category", "super", "--dim", "2", "--seed", "2",
                "--restarts", "2", "--target-residual", "1e-300",
                "-o", str(out)]) == 0
    bundle = bm.load_bundle(str(out))
    for name in bundle.operators:
        assert bm.pentagon_residual(bundle.mult_unitary(name)) < 1e-300


def corpus_path(name):
    import importlib.resources as resources
    return str(resources.files("braidmu") / "corpus" / name)


def test_eval_statement_corpus(tmp_path):
    data = tmp_path / "yd.json"
    assert run(["generate", "group-yd", "-o", str(data)]) == 0
    for name in ("pentagon.stmt", "corep.stmt", "rep.stmt", "yd.stmt",
                 "goodness.stmt"):
        assert run(["eval", corpus_path(name), str(data)]) == 0


def test_eval_failing_statement(tmp_path):
    data = tmp_path / "yd.json"
    run(["generate", "group-yd", "-o", str(data)])
    bad = tmp_path / "bad.stmt"
    bad.write_text("context: L L\nW[1,2] == c[1,2]\n")
    report = tmp_path / "r.json"
    assert run(["eval", str(bad), str(data), "--report", str(report)]) == 1
    tree = read_json(str(report))
    assert tree["pass"] is False
    assert tree["checks"][0]["value"] > 0.1


def test_eval_malformed_statement_is_exit_two(tmp_path):
    data = tmp_path / "yd.json"
    run(["generate", "group-yd", "-o", str(data)])
    bad = tmp_path / "broken.stmt"
    bad.write_text("context: L L\nW[1,2\n")
    assert run(["eval", str(bad), str(data)]) == 2


def test_reports_are_self_contained(tmp_path):
    # every pass flag must be re-derivable from the recorded numbers
    out = tmp_path / "w.json"
    report = tmp_path / "r.json"
    run(["generate", "kac-takesaki", "--group", "Zn", "--n", "3", "-o", str(out)])
    run(["analyze", str(out), "--object", "W", "--report", str(report)])
    tree = read_json(str(report))
    for check in tree["checks"]:
        if check["kind"] == "residual":
            assert check["pass"] == (check["value"] < check["tol"])
        elif check["kind"] == "rank":
            assert check["pass"] == (check["value"] == check["expected"])
        else:
            assert check["pass"] == bool(check["value"])
    assert tree["pass"] == all(c["pass"] for c in tree["checks"])
