"""Configuration, the runner, persistence, summaries, CLI, and the battery."""

import json
import math
import os
from pathlib import Path

import numpy as np
import pytest

from formlab import cli, harness
from formlab.errors import ConfigError


# ---------------------------------------------------------------------------
# Configuration.

def test_kind_defaults_applied():
    cfg = harness.make_config("chowla", {})
    assert (cfg.d, cfg.H, cfg.c, cfg.samples) == (3, 1000, 0.08, 200)
    cfg = harness.make_config("hasse", {})
    assert (cfg.H, cfg.height, cfg.primes, cfg.samples) == (20, 200, 50, 400)
    assert (cfg.w_desk, cfg.k_desk, cfg.m_dk) == (7, 2, 20)


def test_settings_override_defaults():
    cfg = harness.make_config("bh", {"x": 120, "samples": "7", "seed": "3"})
    assert (cfg.x, cfg.samples, cfg.seed) == (120, 7, 3)


def test_exponent_window_enforced():
    # rejected before any work when c reaches 5/(19d)
    with pytest.raises(ConfigError):
        harness.make_config("chowla", {"c": 5.0 / (19 * 3)})
    with pytest.raises(ConfigError):
        harness.make_config("chowla", {"c": 0.0})
    harness.make_config("chowla", {"c": 0.0877})  # just inside


def test_field_degree_must_divide_d():
    with pytest.raises(ConfigError):
        harness.make_config("hasse", {"d": 3})
    harness.make_config("hasse", {"d": 4})
    with pytest.raises(ConfigError):
        harness.make_config("hasse", {"field": "nosuch"})


def test_misc_validation():
    with pytest.raises(ConfigError):
        harness.make_config("nope", {})
    with pytest.raises(ConfigError):
        harness.make_config("chowla", {"samples": -1})
    with pytest.raises(ConfigError):
        harness.make_config("chowla", {"seed": 2**64})
    with pytest.raises(ConfigError):
        harness.make_config("verify", {"suite": "everything"})
    with pytest.raises(ConfigError):
        harness.make_config("chowla", {"no_such_key": 1})
    with pytest.raises(ConfigError):
        harness.make_config("bh", {"anchor": "sideways"})
    assert harness.make_config("bh", {"anchor": "true"}).anchor is True


def test_config_file_parsing(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text('# comment\nH = 75\nsamples=4\nfield="gaussian"\n\nseed=11\n')
    mapping = harness.parse_config_file(p)
    assert mapping == {"H": "75", "samples": "4", "field": "gaussian", "seed": "11"}
    bad = tmp_path / "bad.cfg"
    bad.write_text("just some words\n")
    with pytest.raises(ConfigError):
        harness.parse_config_file(bad)
    with pytest.raises(ConfigError):
        harness.parse_config_file(tmp_path / "missing.cfg")


def test_effective_workers_env_cap(monkeypatch):
    monkeypatch.delenv("FORMLAB_THREADS", raising=False)
    assert harness.effective_workers(1) == 1
    monkeypatch.setenv("FORMLAB_THREADS", "2")
    assert harness.effective_workers(8) == 2
    monkeypatch.setenv("FORMLAB_THREADS", "abc")
    with pytest.raises(ConfigError):
        harness.effective_workers(8)


def test_config_hash_stable():
    a = harness.make_config("chowla", {"H": 99, "samples": 1})
    b = harness.make_config("chowla", {"samples": 1, "H": 99})
    assert a.sha256() == b.sha256()
    c = harness.make_config("chowla", {"H": 98, "samples": 1})
    assert a.sha256() != c.sha256()


# ---------------------------------------------------------------------------
# Runs and persistence.

def _read_jsonl(path: Path) -> list[dict]:
    return [json.loads(line) for line in path.read_text().splitlines()]


def test_run_writes_all_artifacts(tmp_path):
    cfg = harness.make_config("chowla", {"H": 100, "samples": 4, "out": str(tmp_path / "r")})
    man = harness.run(cfg)
    out = Path(man.out_dir)
    assert (out / "results.jsonl").exists()
    assert (out / "summary.csv").exists()
    assert (out / "manifest.json").exists()
    recs = _read_jsonl(out / "results.jsonl")
    assert len(recs) == 4 == man.records
    assert all(r["record"] == "sample" for r in recs)
    disk = json.loads((out / "manifest.json").read_text())
    assert disk["config_sha256"] == cfg.sha256()
    import hashlib

    assert man.files["results.jsonl"] == hashlib.sha256(
        (out / "results.jsonl").read_bytes()
    ).hexdigest()


def test_rerun_identical_bytes(tmp_path):
    settings = {"H": 80, "samples": 5, "seed": 21}
    m1 = harness.run(harness.make_config("chowla", {**settings, "out": str(tmp_path / "a")}))
    m2 = harness.run(harness.make_config("chowla", {**settings, "out": str(tmp_path / "b")}))
    assert m1.files["results.jsonl"] == m2.files["results.jsonl"]
    assert m1.files["summary.csv"] == m2.files["summary.csv"]
    a = (Path(m1.out_dir) / "results.jsonl").read_bytes()
    b = (Path(m2.out_dir) / "results.jsonl").read_bytes()
    assert a == b


@pytest.mark.parametrize("kind,settings", [
    ("chowla", {"H": 90, "samples": 6}),
    ("bh", {"H": 40, "x": 60, "samples": 3}),
    ("hasse", {"samples": 8, "height": 50, "primes": 15, "mc": 2000}),
    ("density", {"samples": 4, "mc": 4000, "w_desk": 5, "k_desk": 1}),
])
def test_worker_count_invariance(tmp_path, kind, settings):
    m1 = harness.run(harness.make_config(
        kind, {**settings, "seed": 13, "workers": 1, "out": str(tmp_path / "w1")}
    ))
    m2 = harness.run(harness.make_config(
        kind, {**settings, "seed": 13, "workers": 3, "out": str(tmp_path / "w3")}
    ))
    assert m1.files["results.jsonl"] == m2.files["results.jsonl"]


def test_canonical_json_lines(tmp_path):
    cfg = harness.make_config("chowla", {"H": 70, "samples": 2, "out": str(tmp_path / "c")})
    harness.run(cfg)
    for line in (Path(cfg.out) / "results.jsonl").read_text().splitlines():
        assert line == json.dumps(json.loads(line), sort_keys=True,
                                  separators=(",", ":"))


def test_resource_errors_become_records(tmp_path):
    # the correlation grid budget trips at x = 4000; the run must finish
    cfg = harness.make_config(
        "bh", {"x": 4000, "samples": 2, "H": 30, "out": str(tmp_path / "rl")}
    )
    man = harness.run(cfg)
    recs = _read_jsonl(Path(man.out_dir) / "results.jsonl")
    assert len(recs) == 2
    assert all(r["record"] == "error" and "error" in r for r in recs)


def test_bh_anchor_record(tmp_path):
    cfg = harness.make_config(
        "bh", {"anchor": True, "x": 200, "out": str(tmp_path / "an")}
    )
    man = harness.run(cfg)
    recs = _read_jsonl(Path(man.out_dir) / "results.jsonl")
    assert len(recs) == 1
    assert recs[0]["record"] == "anchor"
    assert recs[0]["coeffs"] == [[1, 0]]
    assert recs[0]["series"] == "1"
    assert 0.8 < recs[0]["C"] < 1.1


def test_bh_r2_samples_joint_forms(tmp_path):
    cfg = harness.make_config(
        "bh", {"r": 2, "x": 50, "H": 25, "samples": 2, "out": str(tmp_path / "r2")}
    )
    recs = _read_jsonl(Path(harness.run(cfg).out_dir) / "results.jsonl")
    assert all(len(r["coeffs"]) == 2 for r in recs)
    # accepted draw streams of consecutive records do not overlap
    assert set(recs[0]["draws"]).isdisjoint(recs[1]["draws"])


def test_hasse_records_and_summary(tmp_path):
    cfg = harness.make_config("hasse", {
        "samples": 10, "height": 60, "primes": 20, "mc": 2000,
        "out": str(tmp_path / "h"),
    })
    man = harness.run(cfg)
    recs = _read_jsonl(Path(man.out_dir) / "results.jsonl")
    assert len(recs) == 10
    for r in recs:
        assert r["class"] in ("not-in-S", "locally-obstructed",
                              "rational-point-found", "unknown")
        assert isinstance(r["padic"], dict)
        if r["class"] == "rational-point-found":
            assert r["witness"] is not None
            assert all(v != "no" for v in r["padic"].values())
    text = (Path(man.out_dir) / "summary.csv").read_text()
    assert "m_dk,20" in text  # the unresolved threshold is always reported
    assert "ratio_lower_bound," in text
    assert "violations,0" in text


def test_density_run_bins_and_instances(tmp_path):
    cfg = harness.make_config("density", {
        "samples": 3, "mc": 4000, "bins": 10, "w_desk": 5, "k_desk": 1,
        "out": str(tmp_path / "d"),
    })
    man = harness.run(cfg)
    recs = _read_jsonl(Path(man.out_dir) / "results.jsonl")
    bins = [r for r in recs if r["record"] == "bin"]
    integrals = [r for r in recs if r["record"] == "integral"]
    instances = [r for r in recs if r["record"] == "instance"]
    assert len(bins) == 10 and len(integrals) == 1 and len(instances) == 3
    integ = integrals[0]
    assert integ["z"] is not None and integ["z"] < 10
    for r in instances:
        assert r["within"] == (abs(r["Nc"] - r["Nc_hat"]) <= 3 * r["Nc_err"])


def test_density_pure_region_mode(tmp_path):
    # no instances: the region scale comes straight from the B flag
    cfg = harness.make_config("density", {
        "B": 9.0, "mc": 3000, "bins": 8, "samples": 0, "out": str(tmp_path / "p"),
    })
    man = harness.run(cfg)
    recs = _read_jsonl(Path(man.out_dir) / "results.jsonl")
    assert [r["record"] for r in recs].count("instance") == 0
    integ = [r for r in recs if r["record"] == "integral"][0]
    e = 2
    assert integ["volume"] < (2 * 9.0) ** e  # (2 kappa B)^e with kappa < 1


# ---------------------------------------------------------------------------
# Summaries.

def test_summarize_synthetic_quantiles(tmp_path):
    p = tmp_path / "r.jsonl"
    with open(p, "w") as fh:
        for k in range(1, 10):
            fh.write(json.dumps({"statistic": 0.1 * k, "H": 100}) + "\n")
    table = harness.summarize(p)
    assert table["count"] == 9
    assert abs(table["quantiles"]["median"] - 0.5) < 1e-12
    assert table["quantiles"]["min"] == pytest.approx(0.1)
    assert table["quantiles"]["max"] == pytest.approx(0.9)
    # thresholds (log 100)^-A: 0.217, 0.047, 0.0102
    assert table["exceptional"][1] == pytest.approx(7 / 9)
    assert table["exceptional"][2] == 1.0


def test_summarize_empty_and_malformed(tmp_path):
    p = tmp_path / "e.jsonl"
    p.write_text("")
    table = harness.summarize(p)
    assert table == {"count": 0, "malformed": 0, "quantiles": {}, "exceptional": {}}
    p.write_text('{"statistic": 0.5, "H": 10}\nnot json at all\n[1,2]\n')
    table = harness.summarize(p)
    assert table["count"] == 1
    assert table["malformed"] == 2


def test_summarize_drops_truncated_tail(tmp_path):
    p = tmp_path / "t.jsonl"
    p.write_text('{"statistic": 0.5, "H": 10}\n{"statistic": 0.9, "H"')
    table = harness.summarize(p)
    assert table["count"] == 1
    assert table["malformed"] == 0
    assert table["quantiles"]["max"] == pytest.approx(0.5)


def test_summarize_single_record(tmp_path):
    p = tmp_path / "s.jsonl"
    p.write_text(json.dumps({"statistic": 0.3, "H": 50}) + "\n")
    q = harness.summarize(p)["quantiles"]
    assert all(v == pytest.approx(0.3) for v in q.values())


# ---------------------------------------------------------------------------
# The battery.

@pytest.fixture(scope="module")
def battery():
    return harness.verify_battery("all")


def test_battery_all_green(battery):
    failed = [c.name for c in battery if not c.ok]
    assert failed == []


def test_battery_suite_filtering(battery):
    oracle = harness.verify_battery("oracle")
    lemmas = harness.verify_battery("lemmas")
    assert {c.suite for c in oracle} == {"oracle"}
    assert {c.suite for c in lemmas} == {"lemmas"}
    assert len(oracle) + len(lemmas) == len(battery)
    with pytest.raises(ConfigError):
        harness.verify_battery("everything")


def test_verify_kind_through_runner(tmp_path):
    cfg = harness.make_config("verify", {"suite": "oracle", "out": str(tmp_path / "v")})
    man = harness.run(cfg)
    recs = _read_jsonl(Path(man.out_dir) / "results.jsonl")
    assert all(r["record"] == "check" for r in recs)
    assert man.failed_checks == 0


# ---------------------------------------------------------------------------
# CLI surface.

def test_cli_verify_exit_zero(tmp_path, capsys):
    code = cli.main(["verify", "--suite", "oracle", "--out", str(tmp_path / "v")])
    out = capsys.readouterr().out
    assert code == 0
    assert "checks passed" in out


def test_cli_config_error_exit_two(tmp_path, capsys):
    code = cli.main(["chowla", "--c", "0.5", "--samples", "1",
                     "--out", str(tmp_path / "x")])
    err = capsys.readouterr().err
    assert code == 2
    diag = json.loads(err)
    assert diag["error"] == "config"


def test_cli_kind_mismatch_in_config_file(tmp_path, capsys):
    p = tmp_path / "f.cfg"
    p.write_text("kind=bh\nsamples=1\n")
    code = cli.main(["chowla", "--config", str(p), "--out", str(tmp_path / "o")])
    assert code == 2


def test_cli_flags_override_config_file(tmp_path):
    p = tmp_path / "f.cfg"
    p.write_text("H=70\nsamples=5\nseed=4\n")
    out = tmp_path / "run"
    code = cli.main(["chowla", "--config", str(p), "--samples", "2",
                     "--out", str(out)])
    assert code == 0
    recs = _read_jsonl(out / "results.jsonl")
    assert len(recs) == 2
    assert recs[0]["H"] == 70


def test_cli_sieve_round_trip(tmp_path):
    target = tmp_path / "spf.bin"
    assert cli.main(["sieve", "--bound", "500", "--out", str(target)]) == 0
    from formlab.sieve import SieveTable

    table = SieveTable.load(target)
    assert table.bound == 500
    assert table.liouville(12) == -1


def test_cli_summarize_json(tmp_path, capsys):
    p = tmp_path / "r.jsonl"
    p.write_text(json.dumps({"statistic": 0.2, "H": 10}) + "\n")
    assert cli.main(["summarize", str(p)]) == 0
    table = json.loads(capsys.readouterr().out)
    assert table["count"] == 1


def test_cli_run_prints_mdk_flag(tmp_path, capsys):
    code = cli.main(["hasse", "--samples", "2", "--height", "30", "--primes", "10",
                     "--mc", "2000", "--out", str(tmp_path / "h")])
    out = capsys.readouterr().out
    assert code == 0
    assert "m_dk=20" in out
