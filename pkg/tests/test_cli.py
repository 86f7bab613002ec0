import json
import subprocess
import sys
from pathlib import Path

import pytest

from qdomain.cli import SCHEMA_VERSION, main

SAMPLES = Path(__file__).resolve().parents[1] / "samples"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--report", "json")
    return code, json.loads(out)


def test_check_tnorm_lukasiewicz(capsys):
    code, rep = run_json(capsys, "check-tnorm", "--spec", SAMPLES / "lukasiewicz.json", "--grid", 100)
    assert code == 0
    assert rep["schema_version"] == SCHEMA_VERSION
    assert rep["result"]["laws"]["max_violation"] == 0


def test_classify_godel(capsys):
    code, rep = run_json(capsys, "classify-injectivity", "--spec", SAMPLES / "godel.json")
    assert code == 0
    assert rep["result"]["verdict"] == "counterexample"
    assert rep["result"]["certificate"]["subspace"] == [0.0, 1.0]


def test_bad_order_exit_1(capsys):
    code, rep = run_json(capsys, "check-order", "--file", SAMPLES / "bad_order.json")
    assert code == 1
    assert rep["result"]["order"]["transitivity_witness"] == ["a", "b", "c"]


def test_certificate_replay(capsys, tmp_path):
    for spec in ("godel", "lukasiewicz", "product", "lukasiewicz_interior"):
        _, out, _ = run(capsys, "classify-injectivity", "--spec", SAMPLES / f"{spec}.json", "--report", "json")
        cert = tmp_path / f"{spec}.json"
        cert.write_text(out)
        code, rep = run_json(capsys, "verify-certificate", "--file", cert)
        assert code == 0 and rep["result"]["reproduced"]
        assert rep["result"]["replayed"] == json.loads(out)["result"]["verdict"]


def test_json_reports_deterministic(capsys):
    args = ("check-continuity", "--spec", SAMPLES / "lukasiewicz_interior.json", "--shape", "alphaL",
            "--grid", 16, "--report", "json")
    _, a, _ = run(capsys, *args)
    _, b, _ = run(capsys, *args)
    assert a == b


def test_exact_rejected_with_product(capsys):
    code, _, err = run(capsys, "check-tnorm", "--spec", SAMPLES / "product.json", "--exact")
    assert code == 2 and "product" in err


def test_malformed_json_location(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"pieces": [\n  {"lo": 0,, "hi": 1}]}')
    code, _, err = run(capsys, "check-tnorm", "--spec", bad)
    assert code == 2 and f"{bad}:2:" in err


def test_bad_flag_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["check-tnorm", "--spec", str(SAMPLES / "godel.json"), "--grid", "0"])
    assert exc.value.code == 2


@pytest.mark.parametrize("argv,code", [
    (["check-approach", "--file", SAMPLES / "approach_gamma.json"], 0),
    (["check-approach", "--file", SAMPLES / "approach_bad.json"], 1),
    (["way-below", "--file", SAMPLES / "chain3.json"], 0),
    (["check-continuity", "--spec", SAMPLES / "godel.json", "--shape", "alphaR", "--grid", 16], 0),
    (["check-continuity", "--spec", SAMPLES / "lukasiewicz_interior.json", "--shape", "alphaL"], 1),
    (["scott-delta", "--spec", SAMPLES / "godel.json", "--point", "0.8", "--subset", "0.5", "--grid", 16], 0),
    (["scott-delta", "--spec", SAMPLES / "lukasiewicz.json", "--snapshot", 4, "--point", "1/4",
      "--subset", "1/2,3/4"], 0),
    (["sobriety", "--spec", SAMPLES / "godel.json", "--snapshot", 4], 0),
    (["sobriety", "--spec", SAMPLES / "godel.json", "--snapshot", 2, "--weight", "0.5,0.5,0.5"], 2),
    (["sobriety", "--spec", SAMPLES / "godel.json"], 2),
    (["sigma-product", "--file", SAMPLES / "chain3.json"], 0),
    (["sigma-product", "--spec", SAMPLES / "lukasiewicz.json", "--snapshot", 2], 0),
    (["way-below", "--spec", SAMPLES / "godel.json", "--shape", "bogus"], 2),
    (["check-order", "--file", SAMPLES / "missing.json"], 2),
])
def test_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_text_report_header(capsys):
    code, out, _ = run(capsys, "check-order", "--file", SAMPLES / "chain3.json")
    assert code == 0 and out.splitlines()[0] == "check-order: PASS"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qdomain", "check-tnorm", "--spec",
                           str(SAMPLES / "godel.json"), "--grid", "8"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("check-tnorm: PASS")
