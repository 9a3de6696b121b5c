from __future__ import annotations

import json
import shutil
from pathlib import Path

import pytest

from sunadakit.pipeline import (
    BundleError,
    FixtureBundle,
    RunReport,
    run_batch,
    run_bianchi_session,
    run_method_g,
    run_method_r,
)
from sunadakit.pipeline.cli import main

GOLDEN = Path(__file__).parent / "golden"

RUNS = {
    "method_g_k11n116": lambda: run_method_g(FixtureBundle.bundled("k11n116")),
    "method_g_l9_34": lambda: run_method_g(FixtureBundle.bundled("l9_34")),
    "method_g_v2986": lambda: run_method_g(FixtureBundle.bundled("v2986")),
    "method_r_v2986_7": lambda: run_method_r(FixtureBundle.bundled("v2986"), 7),
    "bianchi_session": lambda: run_bianchi_session(),
}


@pytest.mark.parametrize("name", sorted(RUNS))
def test_report_matches_golden(name):
    first = RUNS[name]().to_json()
    second = RUNS[name]().to_json()
    assert first == second
    assert first == (GOLDEN / f"{name}.json").read_text()


@pytest.mark.parametrize("name", ["method_g_k11n116", "method_g_l9_34", "method_g_v2986", "bianchi_session"])
def test_fixture_runs_pass(name):
    report = RUNS[name]()
    assert report.passed, [c.line() for c in report.failures()]


def test_report_round_trip():
    r = run_bianchi_session()
    again = RunReport.from_dict(json.loads(r.to_json()))
    assert again.to_json() == r.to_json()


def test_fail_rows_name_their_source():
    r = run_method_r(FixtureBundle.bundled("k11n116"), 7)
    for c in r.failures():
        assert c.source.startswith("k11n116/expected.json:")
        assert c.source in c.line()


def test_bundle_without_matrices_notices(bundles):
    r = run_method_g(bundles["v2986"])
    assert any("exact matrices unavailable" in n for n in r.notices)


def test_bundle_from_bare_presentation(tmp_path):
    src = FixtureBundle.bundled("v2986").root / "presentation.txt"
    f = tmp_path / "v.txt"
    shutil.copy(src, f)
    b = FixtureBundle.load(f)
    r = run_method_g(b)
    assert any("number field unavailable" in n for n in r.notices)
    assert r.passed


def test_mismatched_generators_rejected(tmp_path):
    src = FixtureBundle.bundled("k11n116").root
    dst = tmp_path / "bad"
    shutil.copytree(src, dst)
    mats = json.loads((dst / "matrices.json").read_text())
    mats["d"] = mats.pop("a")
    (dst / "matrices.json").write_text(json.dumps(mats))
    with pytest.raises(BundleError):
        FixtureBundle.load(dst)


def test_unknown_fixture():
    with pytest.raises(BundleError):
        FixtureBundle.bundled("nope")


def test_batch_tally(tmp_path):
    for name in ("v2986", "l9_34"):
        shutil.copytree(FixtureBundle.bundled(name).root, tmp_path / name)
    serial = run_batch(tmp_path, primes=[7], workers=1)
    parallel = run_batch(tmp_path, primes=[7], workers=2)
    assert serial.to_json() == parallel.to_json()
    assert serial.get_stage("tally").inputs["manifolds"] == 2
    tally = serial.get_stage("tally").results
    assert tally["with_7_good"] == 1  # v2986 is 7-good, the two-cusped link is not
    assert serial.passed


# -- CLI ------------------------------------------------------------------------


def test_cli_surgery(capsys):
    assert main(["surgery", "--s", "2", "--t", "2", "--prime", "7", "--count", "4"]) == 0
    assert capsys.readouterr().out.split() == ["-1/1", "1/6", "2/5", "3/4"]


def test_cli_exit_codes(capsys):
    assert main(["method-g", "k11n116"]) == 0
    assert main(["method-r", "k11n116", "--prime", "7"]) == 1
    assert main(["method-g", "no-such-fixture"]) == 2
    capsys.readouterr()


def test_cli_json_output(capsys, tmp_path):
    out = tmp_path / "r.json"
    assert main(["bianchi-session", "--json", "--output", str(out)]) == 0
    printed = json.loads(capsys.readouterr().out)
    assert printed == json.loads(out.read_text())
    assert printed["passed"] is True


def test_cli_snf_and_split(capsys):
    assert main(["snf", "--json", "[[2, 4], [6, 8]]"]) == 0
    assert json.loads(capsys.readouterr().out)["diagonal"] == [2, 4]
    assert main(["split", "--fixture", "k11n116", "--prime", "7", "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["degrees"] == [1, 2, 5]


def test_cli_coset_limit(capsys):
    assert main(["--coset-limit", "5", "cover", "bianchi", "--subgroup", "a", "bcb"]) == 2
    assert "error" in capsys.readouterr().err


def test_cli_homsearch_and_cover(capsys):
    assert main(["homsearch", "v2986", "--prime", "7", "--raw-count"]) == 0
    assert "surjective_raw" in capsys.readouterr().out
    argv = ["cover", "k11n116", "--prime", "7", "--image", "a=6,1,6,0", "--image", "b=1,6,3,5", "--image", "c=3,4,0,5"]
    assert main(argv) == 0
    assert capsys.readouterr().out.count("Z/2 + Z/110 + Z") == 2
