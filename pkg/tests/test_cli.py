"""Command line tests, driven through main() with explicit argv."""

import json

import pytest

from preproj import d4
from preproj.cli import main
from preproj.fields import QQ
from preproj.module import LambdaModule
from preproj.quiver import Quiver, double
from preproj.serialize import save_module


def a2_double():
    return double(Quiver.build(["1", "2"], [("a", "1", "2")]))


def kronecker_double():
    return double(Quiver.build(["1", "2"], [("a", "1", "2"), ("b", "1", "2")]))


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    root = tmp_path_factory.mktemp("modules")
    paths = {}
    for name, m in d4.zoo(1).items():
        safe = name.replace("(", "_").replace(")", "").replace("-", "m")
        paths[name] = str(root / f"{safe}.json")
        save_module(paths[name], m, name=name)
    dq = a2_double()
    for name, m in {
        "s1": LambdaModule.build(dq, QQ, (1, 0), {}),
        "s2": LambdaModule.build(dq, QQ, (0, 1), {}),
        "x": LambdaModule.build(dq, QQ, (1, 1), {"a": [[1]]}),
        "y": LambdaModule.build(dq, QQ, (1, 1), {"a*": [[1]]}),
    }.items():
        paths[name] = str(root / f"{name}.json")
        save_module(paths[name], m, name=name)
    kq = kronecker_double()
    spinner = LambdaModule.build(
        kq, QQ, (1, 1), {"a": [[1]], "b": [[-1]], "a*": [[1]], "b*": [[1]]}
    )
    paths["spinner"] = str(root / "spinner.json")
    save_module(paths["spinner"], spinner, name="spinner")
    violator = LambdaModule.build(
        kq, QQ, (1, 1), {"a": [[1]], "b": [[1]], "a*": [[1]], "b*": [[1]]}
    )
    paths["violator"] = str(root / "violator.json")
    save_module(paths["violator"], violator, name="violator")
    return paths


def test_validate_accepts_the_example_modules(files, capsys):
    assert main(["validate", files["T"]]) == 0
    out = capsys.readouterr().out
    assert "relations hold" in out and "nilpotent" in out


def test_validate_flags_relation_violations(files, capsys):
    assert main(["validate", files["violator"]]) == 1
    assert "relation fails at vertex" in capsys.readouterr().out


def test_validate_flags_non_nilpotent_modules(files, capsys):
    assert main(["validate", files["spinner"]]) == 1
    assert "not nilpotent" in capsys.readouterr().out


def test_validate_rejects_broken_files(files, tmp_path, capsys):
    path = tmp_path / "bad.json"
    data = json.loads(open(files["T"]).read())
    data["action"]["a"] = [["1", "2"]]
    path.write_text(json.dumps(data))
    assert main(["validate", str(path)]) == 2
    assert "columns" in capsys.readouterr().err
    assert main(["validate", str(tmp_path / "missing.json")]) == 2


def test_ext_reports_the_example_dimensions(files, capsys):
    assert main(["ext", files["T"], files["S4"]]) == 0
    out = capsys.readouterr().out
    assert "ext1(M,N)  2" in out and "ext1(N,M)  2" in out


def test_ext_json_output(files, capsys):
    assert main(["ext", files["T"], files["S4"], "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["ext1_mn"] == 2 and data["ext1_nm"] == 2
    assert data["ok"] is True


def test_euler_prints_a_profile(files, capsys):
    assert main(["euler", files["M(-1)"], "--word", "3,4,1,2,4"]) == 0
    out = capsys.readouterr().out
    assert "euler       0" in out


def test_euler_with_coefficients(files, capsys):
    assert main(
        ["euler", files["x"], "--word", "1,2", "--coeffs", "1,1", "--format", "json"]
    ) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["euler"] == 1
    assert data["coeffs"] == [1, 1]


def test_euler_exhausted_primes_exit_three(files, capsys):
    assert main(["euler", files["T"], "--word", "1,2,3,4", "--primes", "2,3"]) == 3
    assert "exhausted" in capsys.readouterr().err


def test_euler_unknown_vertex_is_a_math_error(files, capsys):
    assert main(["euler", files["T"], "--word", "9,9,9,9"]) == 1
    assert "unknown vertex" in capsys.readouterr().err


def test_non_prime_override_is_a_usage_error(files):
    with pytest.raises(SystemExit) as exc:
        main(["euler", files["T"], "--word", "1,2", "--primes", "6,7"])
    assert exc.value.code == 2


def test_fingerprint_json_round_trips(files, capsys):
    assert main(["fingerprint", files["x"], "--format", "json"]) == 0
    first = capsys.readouterr().out
    data = json.loads(first)
    assert data["chi"] == [1, 0]
    assert data["words"] == [["1", "2"], ["2", "1"]]
    assert main(["fingerprint", files["x"], "--format", "json"]) == 0
    assert capsys.readouterr().out == first


def test_verify_unique_extension_on_a2(files, capsys):
    assert main(["verify", "--thm", "1.2", files["s1"], files["s2"]]) == 0
    assert "PASS" in capsys.readouterr().out


def test_verify_pairwise_with_anchor_files(files, capsys):
    code = main(
        [
            "verify", "--thm", "1.1", files["s1"], files["s2"],
            "--anchors-fwd", files["x"], "--anchors-bwd", files["y"],
            "--format", "json",
        ]
    )
    assert code == 0
    data = json.loads(capsys.readouterr().out)
    assert data["passed"] is True
    assert data["strata_fwd"][0]["chi_proj"] == 1


def test_verify_pairwise_needs_anchor_lists(files, capsys):
    assert main(["verify", "--thm", "1.1", files["s1"], files["s2"]]) == 2
    assert "anchors" in capsys.readouterr().err


def test_verify_rejects_wrong_ext_dimension(files, capsys):
    assert main(["verify", "--thm", "1.2", files["T"], files["S4"]]) == 1
    assert "needs exactly 1" in capsys.readouterr().err


def test_verify_unanchored_stratum_exit_three(files, capsys):
    code = main(
        [
            "verify", "--thm", "1.1", files["S4"], files["T"],
            "--anchors-fwd", files["M(0)"], "--anchors-bwd", files["R"],
        ]
    )
    assert code == 3
    assert "match no anchor" in capsys.readouterr().err


def test_example_d4_reproduces_the_worked_example(capsys):
    assert main(["example-d4"]) == 0
    out = capsys.readouterr().out
    assert "delta_M(0) = delta_M(lam) + delta_H    ok" in out
    assert "strata of P Ext^1(S4, T): M(lam) -1, M(0) 1, M(-1) 1, M(inf) 1" in out
    assert "strata of P Ext^1(T, S4): R -1, A 1, B 1, C 1" in out
    assert (
        "delta_T * delta_S4 = delta_M(lam) + delta_R + delta_F + delta_G + delta_H"
        in out
    )
    assert "FAILED" not in out


def test_example_d4_generic_parameter_choice(capsys):
    assert main(["example-d4", "--lambda", "2", "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["passed"] is True
    assert all(item["ok"] for item in data["identities"])
    assert data["expansion"]["ok"] is True


def test_example_d4_rejects_degenerate_parameters(capsys):
    assert main(["example-d4", "--lambda", "0"]) == 2
    assert "degenerate" in capsys.readouterr().err
    assert main(["example-d4", "--lambda", "-1"]) == 2
    capsys.readouterr()
