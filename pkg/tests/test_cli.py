import json

import pytest

from toricbound.cli import RESOURCE_ENV, run


@pytest.fixture
def files(tmp_path):
    r1 = tmp_path / "rep1.json"
    r1.write_text(json.dumps({"rank": 1, "weights": [[1], [-1]], "names": ["x", "y"]}))
    r2 = tmp_path / "rep2.json"
    r2.write_text(json.dumps({"rank": 2, "weights": [[1, 0], [-1, 0], [0, 1], [0, -1]]}))
    one = tmp_path / "one.json"
    one.write_text(json.dumps({"rank": 1, "weights": [[1]]}))
    return tmp_path, str(r1), str(r2), str(one)


def call(capsys, *argv, environ=None):
    code = run(list(argv), environ or {})
    out = capsys.readouterr()
    return code, out.out, out.err


def test_bounds(capsys, files):
    _, r1, _, one = files
    code, out, _ = call(capsys, "bounds", "--rep", r1)
    assert code == 0
    assert json.loads(out) == {"D": "1/1", "d0": 2, "n0": 5, "d1": 20,
                               "hilbert_A_size": 3, "hilbert_B_size": 47}
    assert call(capsys, "bounds", "--rep", r1)[1] == out
    code, out, _ = call(capsys, "bounds", "--rep", one)
    assert (json.loads(out)["d0"], json.loads(out)["n0"]) == (1, 1)


def test_bounds_lower(capsys, files):
    _, _, r2, _ = files
    code, out, _ = call(capsys, "bounds", "--rep", r2, "--lower", "--max-candidates", "2000")
    data = json.loads(out)
    assert code == 0 and data["n0_lower"] >= 6 and not data["d0_exact"]


def test_generators(capsys, files):
    _, r1, _, _ = files
    assert json.loads(call(capsys, "generators", "--rep", r1, "--n", "1", "--dcap", "2")[1]) == ["x*y"]
    assert json.loads(call(capsys, "generators", "--rep", r1, "--n", "2", "--dcap", "1")[1]) == ["x|y", "y|x"]
    assert call(capsys, "generators", "--rep", r1, "--n", "0", "--dcap", "1")[0] == 1


def test_decompose_and_verify(capsys, files):
    tmp, r1, _, _ = files
    cert = tmp / "cert.json"
    code, out, _ = call(capsys, "decompose", "--rep", r1, "(x|y)(y|x) = (x*y|x*y)", "-o", str(cert))
    assert code == 0
    summary = json.loads(out)
    assert summary["verified"] and summary["max_step_degree"] <= summary["bound"] == 20
    assert call(capsys, "verify", str(cert))[0] == 0

    data = json.loads(cert.read_text())
    data["steps"][0]["sub_rhs"] = ["y|x", "y|x"]
    cert.write_text(json.dumps(data))
    code, out, _ = call(capsys, "verify", str(cert))
    assert code == 5 and json.loads(out)["reason"] == "flatten-mismatch"


def test_decompose_to_stdout(capsys, files):
    _, r1, _, _ = files
    code, out, err = call(capsys, "decompose", "--rep", r1, "(x|y) = (x|y)")
    assert code == 0
    assert json.loads(out)["steps"] == []
    assert json.loads(err)["steps"] == 0


def test_decompose_eager(capsys, files):
    _, r1, _, _ = files
    code, out, _ = call(capsys, "decompose", "--rep", r1, "--base-degree", "0", "--no-fast-path",
                        "(x|y|x|y)(y|x|y|x) = (x|x|y|y)(y|y|x|x)")
    assert code == 0
    assert all(s["kind"] != "recursion-base" for s in json.loads(out)["steps"])


@pytest.mark.parametrize("argv, code", [
    (["decompose", "(x|y) = (y|x)"], 4),
    (["decompose", "(x|y = (y|x)"], 1),
    (["verify", "/nonexistent/cert.json"], 1),
    (["bounds"], 1),
    (["bounds", "--D", "0"], 1),
    (["bounds", "--hilbert-cap", "0"], 1),
])
def test_exit_codes(capsys, files, argv, code):
    _, r1, _, _ = files
    if argv[0] != "verify" and argv != ["bounds"]:
        argv = argv + ["--rep", r1]
    assert call(capsys, *argv)[0] == code


def test_cone_error_exit_code(capsys, files):
    _, r1, _, _ = files
    assert call(capsys, "bounds", "--rep", r1, "--hilbert-cap", "1")[0] == 2


def test_resource_cap_from_environment(capsys, files):
    _, _, r2, _ = files
    argv = ("generators", "--rep", r2, "--n", "3", "--dcap", "2")
    assert call(capsys, *argv)[0] == 0
    assert call(capsys, *argv, environ={RESOURCE_ENV: "5"})[0] == 3
    # a flag still wins over the environment
    assert call(capsys, *argv, "--enum-limit", "100000", environ={RESOURCE_ENV: "5"})[0] == 0


def test_config_file_and_flag_precedence(capsys, files):
    tmp, _, _, _ = files
    config = tmp / "run.json"
    config.write_text(json.dumps({"rep": {"rank": 1, "weights": [[1], [-1]]}, "D": "3/2"}))
    code, out, _ = call(capsys, "rearrange", "--config", str(config), "--check", "--samples", "5")
    assert code == 0 and json.loads(out)["D"] == "3/2"
    code, out, _ = call(capsys, "rearrange", "--config", str(config), "--D", "1",
                        "--check", "--samples", "5")
    assert json.loads(out)["D"] == "1/1"
    config.write_text(json.dumps({"rep": {"rank": 1, "weights": [[1.5]]}}))
    assert call(capsys, "bounds", "--config", str(config))[0] == 1
    config.write_text("{not json")
    assert call(capsys, "bounds", "--config", str(config))[0] == 1


def test_rearrange(capsys, files):
    _, r1, r2, _ = files
    code, out, _ = call(capsys, "rearrange", "--rep", r2, "--check", "--samples", "40", "--seed", "3")
    data = json.loads(out)
    assert code == 0 and data["ok"] and data["failures"] == 0
    assert call(capsys, "rearrange", "--rep", r2, "--check", "--samples", "40", "--seed", "3")[1] == out
    code, out, _ = call(capsys, "rearrange", "--rep", r1, "x*x*y|y*y*x|x*x*y|y*y*x")
    assert code == 0 and json.loads(out)["max_sq_norm"] <= 1
    assert call(capsys, "rearrange", "--rep", r1, "--check", "--samples", "20", "--D", "1/2")[0] == 5
    assert call(capsys, "rearrange", "--rep", r1)[0] == 1


def test_oracle_check(capsys, files):
    _, r1, r2, one = files
    for n in (1, 2, 3):
        code, out, _ = call(capsys, "oracle-check", "--rep", r1, "--n", str(n), "--caps", "3", "2")
        data = json.loads(out)
        assert code == 0 and data["ok"] and data["bound_d1"] == 20
        assert set(data) >= {"n", "caps", "markov_degree", "bound_d1", "ok"}
    code, out, _ = call(capsys, "oracle-check", "--rep", one, "--n", "2", "--caps", "2", "2")
    assert json.loads(out)["ok"]
    code, out, _ = call(capsys, "oracle-check", "--rep", r2, "--n", "2", "--caps", "2", "2",
                        "--lower", "--max-candidates", "2000")
    assert json.loads(out)["ok"]
    code, _, _ = call(capsys, "oracle-check", "--rep", r1, "--n", "4", "--caps", "9", "3",
                      environ={RESOURCE_ENV: "1000"})
    assert code == 3
