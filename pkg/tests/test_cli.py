import io
import json
import subprocess
import sys

import pytest

from conezeta.cli import EXIT_OK, EXIT_PARSE, EXIT_VERIFY, JobSpec, SpecError, main

GOLDEN = {"min_poly": [-1, -1, 1], "units": [["1", "1"]], "chi": {"++": 1}, "k": 1,
          "depth": 150, "verify_samples": 60, "null_samples": 10}


def _write(tmp_path, obj, name="job.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def test_jobspec_roundtrip():
    spec = JobSpec.from_obj(dict(GOLDEN, oracle={"norm_bound": 1000}))
    again = JobSpec.from_json(spec.to_json())
    assert again == spec


@pytest.mark.parametrize("bad,msg", [
    ({"k": 0}, "series divergence"),
    ({"min_poly": [1.5, 0, 1]}, "integers"),
    ({"units": [["1"]]}, "length"),
    ({"extra": 1}, "unknown"),
])
def test_jobspec_rejects(bad, msg):
    with pytest.raises(SpecError, match=msg):
        JobSpec.from_obj(dict(GOLDEN, **bad))


def test_run_with_oracle(tmp_path, capsys):
    chain_path = tmp_path / "chain.json"
    code = main(["run", "--spec", _write(tmp_path, GOLDEN), "--oracle", "4000", "--emit-chain", str(chain_path)])
    out = json.loads(capsys.readouterr().out)
    assert code == EXIT_OK
    assert out["verification"]["failed"] == 0
    assert out["oracle"]["relative_difference"] <= 1e-3
    assert json.loads(chain_path.read_text()) == out["chain"]


def test_verify_good_and_bad_chain(tmp_path, capsys):
    spec = _write(tmp_path, GOLDEN)
    chain = tmp_path / "chain.json"
    chain.write_text(json.dumps([{"c": 1, "I": [["1", "0"], ["1", "1"]]}]))
    assert main(["verify", "--spec", spec, "--chain", str(chain)]) == EXIT_OK
    chain.write_text(json.dumps([{"c": -1, "I": [["1", "0"], ["1", "1"]]}]))
    assert main(["verify", "--spec", spec, "--chain", str(chain)]) == EXIT_VERIFY
    capsys.readouterr()


def test_k_zero_error_json(tmp_path, capsys):
    code = main(["run", "--spec", _write(tmp_path, dict(GOLDEN, k=0))])
    err = json.loads(capsys.readouterr().err)
    assert code == EXIT_PARSE
    assert err["error"]["stage"] == "parse"
    assert "k must be ≥ 1 (series divergence)" in err["error"]["message"]


def test_bad_unit_reports_stage(tmp_path, capsys):
    code = main(["run", "--spec", _write(tmp_path, dict(GOLDEN, units=[["0", "1"]]))])
    err = json.loads(capsys.readouterr().err)
    assert code != EXIT_OK
    assert err["error"]["stage"] == "units"


def test_zero_character(tmp_path, capsys):
    code = main(["run", "--spec", _write(tmp_path, dict(GOLDEN, chi={"++": 0}))])
    out = json.loads(capsys.readouterr().out)
    assert code == EXIT_OK
    assert float(out["zeta"]["value"]) == 0.0


def test_flags_override_spec(tmp_path, capsys):
    main(["run", "--spec", _write(tmp_path, GOLDEN), "--depth", "40"])
    out = json.loads(capsys.readouterr().out)
    assert out["zeta"]["depth"] == 40


def test_cocycle_command(capsys):
    assert main(["cocycle-test", "--degree", "3", "--trials", "5"]) == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out["failures"] == 0 and out["points"] == 50


def test_stdin_and_console_script(tmp_path):
    r = subprocess.run([sys.executable, "-m", "conezeta", "run", "--spec", "-", "--depth", "30"],
                       input=json.dumps(GOLDEN), capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    first = json.loads(r.stdout)["zeta"]["value"]
    r2 = subprocess.run([sys.executable, "-m", "conezeta", "run", "--spec", "-", "--depth", "30"],
                        input=json.dumps(GOLDEN), capture_output=True, text=True)
    assert json.loads(r2.stdout)["zeta"]["value"] == first


def test_invalid_json(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{nope")
    assert main(["run", "--spec", str(p)]) == EXIT_PARSE
    assert json.loads(capsys.readouterr().err)["error"]["stage"] == "parse"
