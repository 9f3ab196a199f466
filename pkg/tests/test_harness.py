import json
import math

import numpy as np
import pytest

from qpcocycle.cli import main as cli_main
from qpcocycle.harness import ExperimentManifest, make_rng, run, suite


def _manifest(**kw):
    base = dict(task="duality_conjugation_residual",
                params={"potential": "amo:2.0", "p": 5, "q": 12,
                        "theta": 0.3, "epsilon": 0.05},
                seed=7)
    base.update(kw)
    return ExperimentManifest(**base)


def test_manifest_hash_sensitivity():
    m1 = _manifest()
    m2 = _manifest(seed=8)
    m3 = _manifest(params={"potential": "amo:2.0", "p": 5, "q": 12,
                           "theta": 0.31, "epsilon": 0.05})
    assert m1.content_hash() != m2.content_hash()
    assert m1.content_hash() != m3.content_hash()
    assert m1.content_hash() == _manifest().content_hash()


def test_unknown_task_rejected():
    with pytest.raises(ValueError):
        ExperimentManifest("no_such_task", {}).validate()


def test_run_and_cache_replay(tmp_path):
    m = _manifest()
    r1 = run(m, cache_dir=tmp_path)
    assert not r1.meta["cached"]
    r2 = run(m, cache_dir=tmp_path)
    assert r2.meta["cached"]
    assert r1.canonical_payload() == r2.canonical_payload()
    assert r1.payload["results"]["residual"] <= 1e-10


def test_repeat_run_bit_identical_without_cache(tmp_path):
    m = _manifest()
    r1 = run(m, cache_dir=tmp_path / "a")
    r2 = run(m, cache_dir=tmp_path / "b")
    assert r1.canonical_payload() == r2.canonical_payload()


def test_seeded_rng_split_deterministic():
    h = "ab" * 32
    a = make_rng(h, 1, 0).integers(0, 2**32, 5)
    b = make_rng(h, 1, 0).integers(0, 2**32, 5)
    c = make_rng(h, 1, 1).integers(0, 2**32, 5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_tolerances_verdict(tmp_path):
    m = _manifest(tolerances={"residual": 1e-10})
    r = run(m, cache_dir=tmp_path)
    assert r.payload["pass"] == {"residual": True}
    m = _manifest(tolerances={"residual": 1e-20})
    r = run(m, cache_dir=tmp_path)
    assert r.payload["pass"] == {"residual": False}


def test_randomized_task_reproducible(tmp_path):
    m = ExperimentManifest("greens", {"potential": "amo:2.0", "alpha": "golden",
                                      "theta": 0.2, "n": 5, "E": [0.4, 0.3]}, seed=3)
    r1 = run(m, cache_dir=tmp_path / "a")
    r2 = run(m, cache_dir=tmp_path / "b")
    assert r1.canonical_payload() == r2.canonical_payload()


def test_output_artifacts(tmp_path):
    out = tmp_path / "accel.csv"
    m = ExperimentManifest("acceleration",
                           {"potential": "amo:3.0", "alpha": "golden", "E": 0.0,
                            "n": 200, "grid": 33},
                           output=str(out))
    run(m, cache_dir=tmp_path)
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "epsilon,L1"
    assert len(lines) == 4


def test_suite_worker_count_independence(tmp_path):
    r1 = suite("localization", cache_dir=tmp_path / "w1", seed=0, workers=1)
    r2 = suite("localization", cache_dir=tmp_path / "w2", seed=0, workers=3)
    assert json.dumps(r1, sort_keys=True, default=str) == \
        json.dumps(r2, sort_keys=True, default=str)
    assert r1["pass"]


def test_cli_smoke(tmp_path, capsys):
    rc = cli_main(["duality", "--potential", "amo:2.0", "--p", "1", "--q", "4",
                   "--theta", "0.3", "--cache", str(tmp_path),
                   "--tol", "residual=1e-10"])
    assert rc == 0
    out = json.loads(capsys.readouterr().out)
    assert out["payload"]["results"]["residual"] <= 1e-10


def test_cli_herman(tmp_path, capsys):
    rc = cli_main(["herman", "--potential", "amo:2.0", "--energy", "0.0",
                   "--n", "6", "--grid", "128", "--cache", str(tmp_path)])
    assert rc == 0
    out = json.loads(capsys.readouterr().out)
    assert out["payload"]["results"]["value"] >= -1e-2
