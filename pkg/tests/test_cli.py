import json

import numpy as np
import pytest

from ballneedlets import cli
from ballneedlets.grids import NNLSInfeasibleError
from ballneedlets.needlets import NeedletFrame
from ballneedlets.verify import CheckResult


@pytest.fixture(scope="module")
def frame_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "frame.json"
    assert cli.main(["frame", "build", "--mu", "1", "--levels", "3", "--out", str(path)]) == 0
    return path


def test_frame_build_round_trip(frame_file):
    text = frame_file.read_text()
    frame = NeedletFrame.from_json(text)
    assert frame.to_json() == text
    for g in frame.levels:
        assert g.weights.sum() == pytest.approx(2 * np.pi / 3, rel=1e-10)


def test_frame_build_level_zero(tmp_path):
    out = tmp_path / "f0.json"
    assert cli.main(["frame", "build", "--levels", "0", "--out", str(out)]) == 0
    assert len(json.loads(out.read_text())["levels"]) == 1


def test_unsupported_mu_is_a_config_error(tmp_path, capsys):
    assert cli.main(["frame", "build", "--mu", "0", "--out", str(tmp_path / "x.json")]) == 2
    assert "unsupported-mu" in capsys.readouterr().err


def test_argument_errors_are_config_errors():
    assert cli.main(["frame", "build", "--strategy", "hexagonal"]) == 2
    assert cli.main(["nterm", "--function", "constant", "--n-values", "a,b"]) == 2


def test_analyze_constant(frame_file, tmp_path):
    out = tmp_path / "c.json"
    assert cli.main(["analyze", "--frame", str(frame_file), "--function", "constant", "--out", str(out)]) == 0
    body = json.loads(out.read_text())
    prov = body["provenance"]
    assert prov["frame_hash"] == NeedletFrame.from_json(frame_file.read_text()).frame_hash
    assert {"numpy", "scipy", "ballneedlets"} <= set(prov["versions"])
    assert prov["config"]["function"] == "constant"
    for lev in body["coefficients"]["levels"][2:]:
        assert max(abs(float.fromhex(v)) for v in lev["values"]) < 1e-12


def test_outputs_are_bit_identical_on_rerun(frame_file, tmp_path):
    outs = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        args = ["analyze", "--frame", str(frame_file), "--function", "gaussian_bump:width=0.3", "--out", str(out)]
        assert cli.main(args) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_unknown_family(frame_file, capsys):
    assert cli.main(["analyze", "--frame", str(frame_file), "--function", "wavelet"]) == 2
    assert "unknown function family" in capsys.readouterr().err


def test_synthesize_and_hash_mismatch(frame_file, tmp_path):
    coeffs = tmp_path / "c.json"
    f = "random_bandlimited:seed=2,degree=3"
    assert cli.main(["analyze", "--frame", str(frame_file), "--function", f, "--out", str(coeffs)]) == 0
    pts = tmp_path / "pts.csv"
    np.savetxt(pts, [[0.1, 0.2], [-0.5, 0.5], [1.0, 0.0]], delimiter=",")
    out = tmp_path / "s.json"
    args = ["synthesize", "--frame", str(frame_file), "--coefficients", str(coeffs), "--points", str(pts),
            "--out", str(out)]
    assert cli.main(args) == 0
    from ballneedlets.functions import make_function
    from ballneedlets.geometry import WeightedBall

    body = json.loads(out.read_text())
    vals = np.array([float.fromhex(v) for v in body["values"]])
    ref = make_function(f, WeightedBall(2, 1.0))(np.loadtxt(pts, delimiter=","))
    assert np.allclose(vals, ref, atol=1e-11)
    other = tmp_path / "other.json"
    assert cli.main(["frame", "build", "--mu", "2", "--levels", "3", "--out", str(other)]) == 0
    args = ["synthesize", "--frame", str(other), "--coefficients", str(coeffs)]
    assert cli.main(args) == 2


def test_norms_ratio(frame_file, capsys):
    args = ["norms", "--frame", str(frame_file), "--function", "random_bandlimited:seed=1,degree=3",
            "--s", "0", "--rho", "0", "--p", "2", "--q", "2"]
    assert cli.main(args) == 0
    body = json.loads(capsys.readouterr().out)
    assert {r["params"]["family"] for r in body["results"]} == {"F", "B"}
    for r in body["results"]:
        assert set(r) >= {"params", "kernel_norm", "sequence_norm", "ratio"}
        assert float.fromhex(r["ratio"]) == pytest.approx(1.0, rel=1e-9)


def test_nterm_csv(frame_file, capsys):
    args = ["nterm", "--frame", str(frame_file), "--function", "boundary_power:alpha=1.5", "--s", "1.4",
            "--n-values", "4,8,16,32,64"]
    assert cli.main(args) == 0
    lines = [ln for ln in capsys.readouterr().out.splitlines() if not ln.startswith("#")]
    assert lines[0] == "n,sigma_hat,scaled_sigma_hat"
    sig = [float(ln.split(",")[1]) for ln in lines[1:]]
    assert len(sig) == 5 and all(b <= a * (1 + 1e-12) for a, b in zip(sig, sig[1:]))


def test_verify_suite_json(capsys):
    assert cli.main(["verify", "--suite", "cutoffs", "--json"]) == 0
    body = json.loads(capsys.readouterr().out)
    assert body["passed"] and body["provenance"]["config"]["suite"] == ["cutoffs"]


def test_verify_failure_exit_code(monkeypatch, capsys):
    monkeypatch.setitem(cli.SUITES, "cutoffs", lambda seed: [CheckResult("always fails", False, {}, "never")])
    assert cli.main(["verify", "--suite", "cutoffs"]) == 1
    assert "FAIL always fails" in capsys.readouterr().out


def test_numerical_failure_exit_code(monkeypatch):
    def boom(*a, **k):
        raise NNLSInfeasibleError("no positive weights")

    monkeypatch.setattr(cli.NeedletFrame, "build", boom)
    assert cli.main(["analyze", "--function", "constant", "--levels", "1"]) == 3
