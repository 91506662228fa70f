import io
import json

import pytest

from truncdim.cli import argv_from_inputs, main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def run_json(*argv):
    code, text = run(*argv, "--format", "json")
    return code, json.loads(text)


def test_dim_closed_form():
    code, rec = run_json("dim", "--a", "3", "--eps", "1e-3", "--mode", "budget")
    assert code == 0
    assert rec["outputs"]["k"] == 12
    assert rec["method"] == "closed_form"
    assert rec["certificate"]["k_pass"] and rec["certificate"]["k_minus_one_fail"]


def test_dim_p1():
    code, rec = run_json("dim", "--a", "2", "--p", "1", "--eps", "1e-3")
    assert (code, rec["outputs"]["k"], rec["exactness"]) == (0, 31, "exact")


def test_dim_pod():
    code, rec = run_json("dim", "--weights", "pod", "--p", "inf", "--eps", "1e-3", "--mode", "budget")
    assert (code, rec["outputs"]["k"]) == (0, 26)
    assert "extrapolated" not in rec["outputs"]


def test_bound_exact_and_combined():
    code, rec = run_json("bound", "--a", "1", "--s", "3", "--k", "1", "--exact", "--algo-error", "0.1")
    assert code == 0
    assert rec["outputs"]["raw_power"] == pytest.approx(0.28125)
    assert rec["outputs"]["combined_error"] == pytest.approx((0.01 + 0.28125) ** 0.5)
    assert rec["exactness"] == "exact"


def test_bound_upper():
    code, rec = run_json("bound", "--a", "1", "--s", "3", "--k", "1")
    assert rec["outputs"]["value"] == pytest.approx(0.542449330208448, rel=1e-13)
    assert rec["exactness"] == "upper_bound"


def test_kernel():
    code, rec = run_json("kernel", "--a", "1", "--s", "2", "--x", "0.5,0.5", "--y", "0.5,0.25")
    # 1 + gamma_j^2 min(x_j, y_j) per coordinate with gamma_j = 1 / j
    assert rec["outputs"]["kernel"] == pytest.approx((1 + 0.5) * (1 + 0.25 / 4))


def test_norm_q1_and_inf():
    code, rec = run_json("norm", "--p", "2", "--q", "1")
    assert rec["outputs"]["embedding_factor"] == pytest.approx(2.25)
    assert rec["outputs"]["embedding_norm_exact_q1"] == pytest.approx(3 ** -0.5)
    code, rec = run_json("norm", "--p", "2", "--q", "inf")
    assert rec["outputs"]["extrapolated"] is True
    code, rec = run_json("norm", "--a", "2", "--p", "2", "--q", "2")
    assert rec["outputs"]["continuity_bound_Ss"] == pytest.approx(1.56225 ** 0.5, rel=1e-5)


def test_explicit_gammas_file(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("# weights\n0.9\n0.5\n\n0.2\n0.1\n")
    code, rec = run_json("dim", "--weights", "explicit", "--gammas-file", str(path), "--p", "1", "--eps", "0.3")
    assert (code, rec["outputs"]["k"]) == (0, 2)
    code, _ = run("dim", "--weights", "explicit", "--gammas-file", str(path), "--s", "9", "--eps", "0.3")
    assert code == 2


def test_json_round_trip():
    code, rec = run_json("dim", "--a", "4", "--p", "inf", "--s", "1000", "--eps", "1e-4", "--mode", "budget")
    again = run_json(*argv_from_inputs(rec["command"], rec["inputs"]))[1]
    assert again == rec


@pytest.mark.parametrize("fmt", ["text", "csv", "md"])
def test_formats(fmt):
    code, text = run("norm", "--p", "3", "--format", fmt)
    assert code == 0 and "p_star" in text


def test_reproduce_check_exit_codes(capsys):
    assert run("reproduce", "--table", "p1", "--check")[0] == 0
    code, text = run("reproduce", "--table", "q1_bound", "--check")
    assert code == 1
    assert "7627" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["dim", "--eps", "0.1"],                        # poly without --a
    ["dim", "--a", "2", "--eps", "-1"],
    ["dim", "--a", "2", "--eps", "0.1", "--q", "1", "--norm", "exact", "--p", "1"],
    ["bound", "--a", "2", "--s", "3", "--k", "5"],
    ["frobnicate"],
    ["dim", "--a", "2", "--s", "2.5", "--eps", "0.1"],
])
def test_usage_errors(argv):
    assert run(*argv)[0] == 2


@pytest.mark.parametrize("argv", [
    ["dim", "--a", "0.5", "--eps", "0.1"],          # a p* <= 1 diverges
    ["oracle", "--a", "2", "--s", "23"],
])
def test_numeric_errors(argv):
    assert run(*argv)[0] == 3


def test_oracle():
    code, rec = run_json("oracle", "--weights", "random", "--s", "10", "--trials", "5", "--seed", "3")
    assert code == 0 and rec["outputs"]["max_rel_dev"] <= 1e-12 and rec["outputs"]["bound_dominates"]
    code, rec = run_json("oracle", "--weights", "pod", "--s", "10")
    assert code == 0 and rec["outputs"]["pod_T_max_rel_dev"] <= 1e-12
    assert run("oracle", "--a", "2", "--s", "0")[0] == 0
