"""Experiment configuration, the parallel runner, persistence, and checks.

Every sample record is a pure function of (config, index).  The pool maps
over indices and the single writer emits canonical JSON in index order,
so the result byte stream is identical for any worker count and any
scheduling.  Heavy shared state (sieve table, region histogram, the MC
profile) is built once in the parent before the pool forks.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import multiprocessing as mp
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from . import __version__, arith, chatelet, chowla_bh, forms, normforms
from . import sieve as sieve_mod
from .errors import ConfigError, ResourceLimitError
from .forms import BinaryForm, CombinatorialCube
from .normforms import DensityProfile, NormForm, RegionB, field_presets
from .rng import philox

KINDS = ("chowla", "bh", "hasse", "density", "verify")
SUITES = ("all", "lemmas", "oracle")

# bh/chowla share one smallest-prime-factor table per process; values
# beyond it fall back to the vectorized strip, so this caps memory only
_SIEVE_CAP = 2 * 10**6


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    field: str = "gaussian"
    d: int = 2
    H: int = 100
    c: float = 0.05
    x: int = 300
    r: int = 1
    samples: int = 50
    seed: int = 42
    A: float = 2.0
    height: int = 200
    primes: int = 100
    w_desk: int = chatelet.DESK_W
    k_desk: int = chatelet.DESK_K
    m_dk: int = chatelet.DESK_M
    B: float = 12.0
    mc: int = 100000
    grid: int = 16
    min_series: float = 0.2
    anchor: bool = False
    bins: int = 40
    suite: str = "all"
    out: str = "runs"
    workers: int = 1

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}")
        if self.samples < 0:
            raise ConfigError("samples must be nonnegative")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must fit in 64 bits")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        if self.d < 1 or self.H < 1:
            raise ConfigError("d and H must be positive")
        if self.kind in ("chowla", "bh"):
            cap = chowla_bh.exponent_cap(self.d)
            if not 0 < self.c < cap:
                raise ConfigError(
                    f"scale exponent c={self.c} outside (0, {cap:.6f}) for degree {self.d}"
                )
        if self.kind == "bh":
            if self.x < 2:
                raise ConfigError("x must be at least 2")
            if self.r < 1:
                raise ConfigError("r must be at least 1")
            if not 0 <= self.min_series:
                raise ConfigError("min_series must be nonnegative")
        if self.kind in ("hasse", "density"):
            presets = field_presets()
            if self.field not in presets:
                raise ConfigError(
                    f"unknown field preset {self.field!r}; have {sorted(presets)}"
                )
            e = presets[self.field].degree
            if self.d % e != 0:
                raise ConfigError(f"field degree {e} must divide form degree {self.d}")
            if self.x < 1:
                raise ConfigError("x must be positive")
            if min(self.w_desk, self.k_desk, self.m_dk) < 1:
                raise ConfigError("w_desk, k_desk, m_dk must be positive")
        if self.kind == "density":
            if self.B < 1:
                raise ConfigError("region scale B must be at least 1")
            if self.mc < 1000:
                raise ConfigError("mc must be at least 1000")
            if self.bins < 2:
                raise ConfigError("bins must be at least 2")
        if self.kind == "verify" and self.suite not in SUITES:
            raise ConfigError(f"suite must be one of {SUITES}")
        if self.A <= 0:
            raise ConfigError("decay exponent A must be positive")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def sha256(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


# kind-specific defaults layered under explicit settings; flags mirror these
_KIND_DEFAULTS: dict[str, dict] = {
    "chowla": {"d": 3, "H": 1000, "c": 0.08, "samples": 200},
    "bh": {"d": 2, "H": 500, "c": 0.05, "x": 300, "r": 1, "samples": 50},
    "hasse": {"d": 2, "H": 20, "height": 200, "primes": 50, "samples": 400,
              "x": 20, "mc": 20000},
    "density": {"d": 2, "H": 50, "x": 40, "samples": 0, "mc": 100000},
    "verify": {"samples": 0},
}

_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)}
_BOOL_FIELDS = {"anchor"}
_INT_FIELDS = {
    "d", "H", "x", "r", "samples", "seed", "height", "primes", "w_desk",
    "k_desk", "m_dk", "mc", "grid", "bins", "workers",
}
_FLOAT_FIELDS = {"c", "A", "B", "min_series"}


def _coerce(key: str, value) -> object:
    if key in _BOOL_FIELDS:
        if isinstance(value, bool):
            return value
        text = str(value).strip().lower()
        if text in ("1", "true", "yes", "on"):
            return True
        if text in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"cannot parse boolean {key}={value!r}")
    try:
        if key in _INT_FIELDS:
            return int(value)
        if key in _FLOAT_FIELDS:
            return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"cannot parse {key}={value!r}") from None
    return str(value)


def make_config(kind: str, settings: Optional[dict] = None) -> ExperimentConfig:
    """Config for `kind` with kind defaults under the explicit settings."""
    if kind not in KINDS:
        raise ConfigError(f"unknown experiment kind {kind!r}")
    merged: dict = dict(_KIND_DEFAULTS.get(kind, {}))
    for key, value in (settings or {}).items():
        if key == "kind":
            continue
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown config key {key!r}")
        merged[key] = _coerce(key, value)
    cfg = ExperimentConfig(kind=kind, **merged)
    cfg.validate()
    return cfg


def parse_config_file(path: str | Path) -> dict:
    """key=value lines (# comments, blank lines ignored) into a mapping."""
    mapping: dict = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{ln}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        mapping[key.strip()] = value.strip().strip('"')
    return mapping


def effective_workers(requested: int) -> int:
    """Requested worker count, capped by FORMLAB_THREADS when set."""
    w = max(1, requested)
    env = os.environ.get("FORMLAB_THREADS", "").strip()
    if env:
        try:
            cap = int(env)
        except ValueError:
            raise ConfigError(f"FORMLAB_THREADS={env!r} is not an integer") from None
        w = min(w, max(1, cap))
    return w


# ---------------------------------------------------------------------------
# Shared per-process state.  Built in the parent before the pool forks;
# rebuilt on demand in a worker that did not inherit it.

_STATE: dict = {}


def _chowla_sieve_bound(cfg: ExperimentConfig) -> int:
    top = math.floor(2.0 * cfg.H**cfg.c)
    need = (cfg.d + 1) * cfg.H * max(top, 1) ** cfg.d
    return min(_SIEVE_CAP, max(10**4, need))


def _build_state(cfg: ExperimentConfig) -> dict:
    if cfg.kind == "chowla":
        return {
            "cube": CombinatorialCube(degree=cfg.d, side=cfg.H),
            "sieve": sieve_mod.build_sieve(_chowla_sieve_bound(cfg)),
        }
    if cfg.kind == "bh":
        return {
            "cube": CombinatorialCube(degree=cfg.d, side=cfg.H),
            "sieve": sieve_mod.build_sieve(_SIEVE_CAP),
            "min_series": Fraction(str(cfg.min_series)),
        }
    if cfg.kind in ("hasse", "density"):
        field = field_presets()[cfg.field]
        norm = NormForm(field)
        probe = chatelet.ChateletInstance(field=field, form=BinaryForm([1] * (cfg.d + 1)))
        if cfg.kind == "density" and cfg.samples == 0:
            B = float(cfg.B)
        else:
            B = chatelet.default_B(probe, cfg.x, cfg.H)
        region = RegionB(norm, 1, B)
        region.histogram()
        profile = DensityProfile.draw(region, cfg.mc, cfg.seed)
        return {
            "field": field,
            "cube": CombinatorialCube(degree=cfg.d, side=cfg.H),
            "region": region,
            "profile": profile,
            "W": chatelet.model_W(cfg.w_desk, cfg.k_desk),
        }
    return {}


def _state_for(cfg: ExperimentConfig) -> dict:
    state = _STATE.get(cfg)
    if state is None:
        state = _build_state(cfg)
        _STATE[cfg] = state
    return state


# ---------------------------------------------------------------------------
# Per-sample records.  Plain JSON types only; `statistic` and `H` feed the
# generic summary, kind-specific fields carry the science.

def _chowla_record(cfg: ExperimentConfig, state: dict, i: int) -> dict:
    stat = chowla_bh.chowla_sample(
        state["cube"], cfg.H, cfg.c, cfg.seed, i, state["sieve"], cfg.grid
    )
    return {
        "record": "sample",
        "index": i,
        "coeffs": list(stat.form.coeffs),
        "statistic": float(stat.statistic),
        "window": [float(stat.grid[0]), float(stat.grid[-1])],
        "H": cfg.H,
    }


def _bh_record(cfg: ExperimentConfig, state: dict, k: int) -> dict:
    sv = state["sieve"]
    if cfg.anchor:
        gs = [BinaryForm([1, 0])]
        idxs: list[int] = []
    else:
        pred = lambda g: chowla_bh.bh_admissible(g, cfg.x, state["min_series"])
        idxs = [
            chowla_bh.accepted_draw_index(state["cube"], cfg.seed, cfg.r * k + j, pred)
            for j in range(cfg.r)
        ]
        gs = [state["cube"].sample(cfg.seed, idx) for idx in idxs]
    res = chowla_bh.bh_correlation(gs, cfg.x, sv)
    series = float(res.series)
    return {
        "record": "anchor" if cfg.anchor else "sample",
        "index": k,
        "draws": idxs,
        "coeffs": [list(g.coeffs) for g in gs],
        "series": str(res.series),
        "series_float": series,
        "C": float(res.correlation),
        "C_w": str(res.cramer),
        "C_w_float": float(res.cramer),
        "ratio": res.ratio,
        "ratio_w": res.ratio_w,
        "statistic": abs(res.ratio - 1.0) if res.ratio is not None else None,
        "H": cfg.H,
    }


def _hasse_record(cfg: ExperimentConfig, state: dict, i: int) -> dict:
    s = chatelet.hasse_sample(
        state["field"], state["cube"], cfg.H, cfg.seed, i, cfg.height, cfg.primes,
        state["region"], state["profile"], cfg.x, cfg.m_dk, cfg.w_desk, cfg.k_desk,
    )
    witness = None
    if s.witness is not None:
        x, m, n = s.witness
        witness = [list(x), m, n]
    stat = None
    if s.Nc is not None:
        stat = s.Nc * math.log(cfg.H) ** 2 / cfg.x**2
    return {
        "record": "sample",
        "index": i,
        "coeffs": list(s.coeffs),
        "class": s.klass,
        "witness": witness,
        "padic": {str(p): v for p, v in s.padic},
        "obstruction": s.obstruction,
        "Nc": s.Nc,
        "Nc_hat": s.Nc_hat,
        "Nc_err": s.Nc_err,
        "sigma_W0": s.sigma_w0,
        "statistic": stat,
        "H": cfg.H,
    }


def _admissible_index(cube: CombinatorialCube, seed: int, k: int) -> int:
    found = -1
    for idx in range(10**5):
        c = cube.sample(seed, idx).coeffs
        if c[0] * c[-1] != 0:
            found += 1
            if found == k:
                return idx
    raise ResourceLimitError("no admissible instance within the scan budget")


def _density_record(cfg: ExperimentConfig, state: dict, k: int) -> dict:
    idx = _admissible_index(state["cube"], cfg.seed, k)
    form = state["cube"].sample(cfg.seed, idx)
    inst = chatelet.ChateletInstance(field=state["field"], form=form)
    region = state["region"]
    nc = chatelet.count_Nc(inst, cfg.x, region)
    est, err = chatelet.localized_Nc(inst, cfg.x, region, state["W"], profile=state["profile"])
    err = float(err)
    gap = abs(nc - float(est))
    return {
        "record": "instance",
        "index": idx,
        "draw": k,
        "coeffs": list(form.coeffs),
        "Nc": nc,
        "Nc_hat": float(est),
        "Nc_err": err,
        "within": bool(gap <= 3.0 * err),
        "statistic": gap / err if err > 0 else (0.0 if gap == 0 else None),
        "H": cfg.H,
    }


_RECORD_FNS: dict[str, Callable] = {
    "chowla": _chowla_record,
    "bh": _bh_record,
    "hasse": _hasse_record,
    "density": _density_record,
}


def _record_for_index(cfg: ExperimentConfig, i: int) -> dict:
    state = _state_for(cfg)
    try:
        return _RECORD_FNS[cfg.kind](cfg, state, i)
    except ResourceLimitError as exc:
        # budget overruns are data, not crashes
        return {"record": "error", "index": i, "error": str(exc),
                "statistic": None, "H": cfg.H}


def _density_prefix(cfg: ExperimentConfig, state: dict) -> list[dict]:
    """Bin rows plus the bin-sum-versus-volume integral row."""
    region, profile = state["region"], state["profile"]
    lo, hi = region.support
    h = profile.half_width
    step = (hi - lo + 2 * h) / cfg.bins
    centers = np.linspace(lo - h + step / 2, hi + h - step / 2, cfg.bins)
    rows = []
    for y in centers:
        est, se = profile.estimate(float(y))
        rows.append({"record": "bin", "y": float(y), "omega": est, "se": se,
                     "statistic": None, "H": cfg.H})
    total, tot_se = profile.aggregate(centers, np.full(cfg.bins, step))
    rows.append({
        "record": "integral",
        "sum": float(total),
        "se": float(tot_se),
        "volume": float(region.volume),
        "z": abs(float(total) - region.volume) / float(tot_se) if tot_se > 0 else None,
        "support": [float(lo), float(hi)],
        "statistic": None,
        "H": cfg.H,
    })
    return rows


def compute_records(cfg: ExperimentConfig) -> list[dict]:
    """All records for the run, ordered; parallel over sample indices."""
    if cfg.kind == "verify":
        return [
            {"record": "check", "suite": c.suite, "name": c.name, "ok": c.ok,
             "detail": c.detail, "statistic": None, "H": cfg.H}
            for c in verify_battery(cfg.suite)
        ]
    n = 1 if (cfg.kind == "bh" and cfg.anchor) else cfg.samples
    prefix: list[dict] = []
    _STATE[cfg] = _build_state(cfg)
    if cfg.kind == "density":
        prefix = _density_prefix(cfg, _STATE[cfg])
    idxs = list(range(n))
    w = effective_workers(cfg.workers)
    if w <= 1 or len(idxs) <= 1:
        recs = [_record_for_index(cfg, i) for i in idxs]
    else:
        ctx = mp.get_context("fork")
        chunk = max(1, len(idxs) // (4 * w))
        with ProcessPoolExecutor(max_workers=w, mp_context=ctx) as ex:
            recs = list(ex.map(_record_for_index, [cfg] * len(idxs), idxs,
                               chunksize=chunk))
    return prefix + recs


# ---------------------------------------------------------------------------
# Persistence.

@dataclass(frozen=True)
class RunManifest:
    out_dir: str
    config: dict
    config_sha256: str
    version: str
    started: str
    finished: str
    files: dict
    records: int
    failed_checks: int

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _canon(rec: dict) -> str:
    return json.dumps(rec, sort_keys=True, separators=(",", ":"), allow_nan=False)


def _sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _utcnow() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def run(cfg: ExperimentConfig) -> RunManifest:
    """Execute the experiment; write results.jsonl, summary.csv, manifest.json."""
    cfg.validate()
    out = Path(cfg.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out}: {exc}") from None
    started = _utcnow()
    records = compute_records(cfg)
    results = out / "results.jsonl"
    with open(results, "w") as fh:
        for rec in records:
            fh.write(_canon(rec) + "\n")
    table = summarize(results)
    rows = [("kind", cfg.kind)]
    # runtime-only keys never influence the record stream; keep them out so
    # reruns into a different directory or pool size summarize identically
    rows += sorted((k, v) for k, v in cfg.to_dict().items()
                   if k not in ("kind", "out", "workers"))
    rows += _summary_extras(cfg, records)
    rows += _table_rows(table)
    summary = out / "summary.csv"
    with open(summary, "w") as fh:
        fh.write("key,value\n")
        for key, value in rows:
            fh.write(f"{key},{value}\n")
    failed = sum(1 for r in records if r.get("record") == "check" and not r["ok"])
    manifest = RunManifest(
        out_dir=str(out),
        config=cfg.to_dict(),
        config_sha256=cfg.sha256(),
        version=__version__,
        started=started,
        finished=_utcnow(),
        files={p.name: _sha256_file(p) for p in (results, summary)},
        records=len(records),
        failed_checks=failed,
    )
    with open(out / "manifest.json", "w") as fh:
        fh.write(json.dumps(manifest.to_dict(), sort_keys=True, indent=1) + "\n")
    return manifest


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _summary_extras(cfg: ExperimentConfig, records: list[dict]) -> list[tuple]:
    rows: list[tuple] = []
    errors = sum(1 for r in records if r.get("record") == "error")
    rows.append(("sample_errors", errors))
    if cfg.kind == "hasse":
        counts = {k: 0 for k in chatelet._CLASSES}
        violations = 0
        for r in records:
            if r.get("record") != "sample":
                continue
            counts[r["class"]] += 1
            if r["class"] == "rational-point-found" and any(
                v == "no" for v in r["padic"].values()
            ):
                violations += 1
        for klass, n in counts.items():
            rows.append((f"count_{klass}", n))
        found, unknown = counts["rational-point-found"], counts["unknown"]
        ratio = found / (found + unknown) if found + unknown else ""
        rows.append(("ratio_lower_bound", ratio))
        rows.append(("violations", violations))
    if cfg.kind == "density":
        for r in records:
            if r.get("record") == "integral":
                rows.append(("bin_sum", _fmt(r["sum"])))
                rows.append(("bin_sum_se", _fmt(r["se"])))
                rows.append(("region_volume", _fmt(r["volume"])))
                rows.append(("bin_sum_z", _fmt(r["z"]) if r["z"] is not None else ""))
        inst = [r for r in records if r.get("record") == "instance"]
        if inst:
            rows.append(("instances_within_3se", sum(1 for r in inst if r["within"])))
            rows.append(("instances", len(inst)))
    if cfg.kind == "bh":
        ratios = [r["ratio"] for r in records if r.get("ratio") is not None]
        ratios_w = [r["ratio_w"] for r in records if r.get("ratio_w") is not None]
        if ratios:
            rows.append(("median_abs_ratio_gap",
                         _fmt(float(np.median([abs(t - 1) for t in ratios])))))
        if ratios_w:
            rows.append(("median_abs_ratio_w_gap",
                         _fmt(float(np.median([abs(t - 1) for t in ratios_w])))))
    if cfg.kind == "chowla":
        stats = [r["statistic"] for r in records if r.get("statistic") is not None]
        if stats:
            rows.append(("median_statistic", _fmt(float(np.median(stats)))))
    if cfg.kind == "verify":
        checks = [r for r in records if r.get("record") == "check"]
        rows.append(("checks", len(checks)))
        rows.append(("failed", sum(1 for r in checks if not r["ok"])))
    return rows


def _table_rows(table: dict) -> list[tuple]:
    rows = [("records", table["count"]), ("malformed_lines", table["malformed"])]
    for name, q in table["quantiles"].items():
        rows.append((f"stat_{name}", _fmt(q)))
    for a, frac in table["exceptional"].items():
        rows.append((f"exceptional_A{a}", _fmt(frac)))
    return rows


# ---------------------------------------------------------------------------
# Result summaries.

_QUANTS = (("min", 0.0), ("q05", 0.05), ("q25", 0.25), ("median", 0.5),
           ("q75", 0.75), ("q95", 0.95), ("max", 1.0))


def summarize(path: str | Path) -> dict:
    """Quantile table of the record statistics plus exceptional fractions.

    Malformed lines are counted, never fatal; a final line without a
    newline is treated as a truncated write and dropped.
    """
    path = Path(path)
    text = path.read_text() if path.exists() else ""
    lines = text.split("\n")
    if lines and lines[-1] != "":
        lines = lines[:-1]  # truncated tail
    lines = [ln for ln in lines if ln]
    stats: list[float] = []
    H = None
    malformed = 0
    for ln in lines:
        try:
            rec = json.loads(ln)
        except json.JSONDecodeError:
            malformed += 1
            continue
        if not isinstance(rec, dict):
            malformed += 1
            continue
        s = rec.get("statistic")
        if isinstance(s, (int, float)) and not isinstance(s, bool):
            stats.append(float(s))
        if isinstance(rec.get("H"), (int, float)):
            H = rec["H"]
    quantiles: dict = {}
    if stats:
        arr = np.asarray(stats, dtype=np.float64)
        quantiles = {name: float(np.quantile(arr, q)) for name, q in _QUANTS}
    exceptional: dict = {}
    if stats and H is not None and H > 1:
        for a in (1, 2, 3):
            thr = math.log(H) ** (-a)
            exceptional[a] = sum(1 for s in stats if s > thr) / len(stats)
    return {
        "count": len(lines) - malformed,
        "malformed": malformed,
        "quantiles": quantiles,
        "exceptional": exceptional,
    }


# ---------------------------------------------------------------------------
# The check battery behind the verify kind.

@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    ok: bool
    detail: str


def _check(suite: str, name: str, fn: Callable[[], str]) -> CheckResult:
    try:
        return CheckResult(suite, name, True, fn())
    except Exception as exc:  # a failed check is a result, not a crash
        return CheckResult(suite, name, False, f"{type(exc).__name__}: {exc}")


def _trial_division(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    m = n
    p = 2
    while p * p <= m:
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
        p += 1
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out


def _oracle_checks() -> list[CheckResult]:
    out = []
    sv = sieve_mod.build_sieve(20000)

    def against_trial() -> str:
        for n in range(1, 20001):
            fac = _trial_division(n)
            omega = sum(fac.values())
            assert sv.liouville(n) == (-1) ** omega, f"liouville({n})"
            mu = 0 if any(e > 1 for e in fac.values()) else (-1) ** len(fac)
            assert int(sv.mobius_table()[n]) == mu, f"mobius({n})"
            tag = sv.mangoldt(n)
            if len(fac) == 1:
                ((p, k),) = fac.items()
                assert tag.prime == p and tag.exponent == k, f"mangoldt({n})"
            else:
                assert tag.prime is None, f"mangoldt({n})"
            t3 = 1
            for e in fac.values():
                t3 *= math.comb(e + 2, 2)
            assert sv.tau_b(n, 3) == t3, f"tau_3({n})"
        return "lambda, mu, Lambda-tags, tau_3 agree on 1..20000"

    out.append(_check("oracle", "sieve-vs-trial-division", against_trial))

    def roundtrip() -> str:
        with tempfile.TemporaryDirectory() as tmp:
            p = Path(tmp) / "spf.bin"
            sv.save(p)
            back = sieve_mod.SieveTable.load(p)
            assert back.bound == sv.bound
            assert np.array_equal(back._spf, sv._spf)
        return "save/load round trip preserves the table"

    out.append(_check("oracle", "sieve-file-round-trip", roundtrip))

    def factor_certified() -> str:
        rng = philox(2024, "battery")
        for _ in range(200):
            n = int(rng.integers(2, 10**12))
            fac = sv.factor(n)
            prod = 1
            for p, e in fac.items():
                assert arith.is_prime(p), (n, p)
                prod *= p**e
            assert prod == n
        return "200 factorizations certified (primality and product)"

    out.append(_check("oracle", "factor-certified", factor_certified))
    return out


def _lemma_checks() -> list[CheckResult]:
    out = []
    presets = field_presets()
    Qi = presets["gaussian"]

    def mobius_partition() -> str:
        N = 10**5
        sv = sieve_mod.build_sieve(N)
        mu = sv.mobius_table().astype(np.int64)
        d = np.arange(1, N + 1)
        total = int(np.sum(mu[1:] * (N // d)))
        assert total == 1, total
        return f"sum mu(d) floor(N/d) = 1 at N = {N}"

    out.append(_check("lemmas", "mobius-divisor-partition", mobius_partition))

    def zero_count_bound() -> str:
        import itertools

        tested = 0
        for coeffs in itertools.product(range(-3, 4), repeat=3):
            g = BinaryForm(coeffs)
            if g.is_zero or not g.is_separable:
                continue
            for p in (2, 3):
                for k in (1, 2):
                    res = forms.zero_count_bound_check(g, p, k)
                    assert res.holds, (coeffs, p, k)
                    tested += 1
        return f"{tested} prime-power zero-count bounds hold"

    out.append(_check("lemmas", "zero-count-bound", zero_count_bound))

    def gcd_bound() -> str:
        rng = philox(7, "gcdlemma")
        for _ in range(10**4):
            d = int(rng.integers(2, 5))
            coeffs = [int(v) for v in rng.integers(-30, 31, size=d + 1)]
            if coeffs[0] * coeffs[-1] == 0:
                continue
            m = int(rng.integers(1, 5000))
            n = int(rng.integers(1, 5000))
            l = int(rng.integers(1, d + 1))
            k = int(rng.integers(0, l))
            res = forms.gcd_bound_check(BinaryForm(coeffs), m, n, k, l)
            assert res.holds, (coeffs, m, n, k, l)
        return "10^4 fuzzed gcd bounds hold"

    out.append(_check("lemmas", "gcd-bound-fuzz", gcd_bound))

    def gamma_crt() -> str:
        pairs = 0
        for field in (Qi, presets["sqrt2"]):
            for q1 in range(2, 40):
                for q2 in range(2, 40 // q1 + 1):
                    if math.gcd(q1, q2) != 1:
                        continue
                    c1 = normforms.norm_residue_counts(field, q1)
                    c2 = normforms.norm_residue_counts(field, q2)
                    c12 = normforms.norm_residue_counts(field, q1 * q2)
                    for a in range(q1 * q2):
                        assert c12[a] == c1[a % q1] * c2[a % q2], (q1, q2, a)
                    pairs += 1
        return f"gamma CRT exact on {pairs} coprime pairs, two fields"

    out.append(_check("lemmas", "gamma-crt", gamma_crt))

    def sigma_crt() -> str:
        inst = chatelet.ChateletInstance(field=Qi, form=BinaryForm([2, 1, 3]))
        pairs = 0
        for q1 in range(2, 40):
            for q2 in range(2, 40 // q1 + 1):
                if math.gcd(q1, q2) != 1:
                    continue
                lhs = chatelet.sigma_mod(inst, q1 * q2)
                assert lhs == chatelet.sigma_mod(inst, q1) * chatelet.sigma_mod(inst, q2)
                pairs += 1
        return f"sigma CRT exact on {pairs} coprime pairs"

    out.append(_check("lemmas", "sigma-crt", sigma_crt))

    def dedekind_euler() -> str:
        for name in ("gaussian", "sqrt2", "cbrt2"):
            field = presets[name]
            for p in (2, 3, 5, 7, 11):
                loc = normforms.DedekindLocal.build(field, p)
                # expand prod (1 - T^f)^(-1) over primes above p by hand
                series = [0] * 9
                series[0] = 1
                for f, _ in normforms.splitting_type(field, p):
                    for j in range(f, 9):
                        series[j] += series[j - f]
                for j in range(9):
                    assert loc.ideal_count(j) == series[j], (name, p, j)
        return "local ideal counts match convolved Euler factors to j = 8"

    out.append(_check("lemmas", "dedekind-euler-factor", dedekind_euler))

    def b_tau_bound() -> str:
        sv = sieve_mod.build_sieve(2000)
        for name in ("gaussian", "cbrt2"):
            field = presets[name]
            e1 = field.degree + 1
            for k in range(1, 2001):
                bk = normforms.b_coeff(field, k, 2)
                assert abs(bk) <= sv.tau_b(k, 2) ** e1, (name, k)
        return "|b(k)| <= tau(k)^(e+1) for k <= 2000, degrees 2 and 3"

    out.append(_check("lemmas", "b-coefficient-bound", b_tau_bound))

    def hensel_bound() -> str:
        rng = philox(11, "henselbat")
        confirmed = 0
        while confirmed < 8:
            coeffs = [int(v) for v in rng.integers(-5, 6, size=3)]
            if coeffs[0] * coeffs[-1] == 0:
                continue
            inst = chatelet.ChateletInstance(field=Qi, form=BinaryForm(coeffs))
            v = chatelet.padic_solvable(inst, 3)
            if v.kind != "yes":
                continue
            floor = Fraction(1, 3 ** ((v.alpha + 1) * 3))
            for k in (1, 2):
                assert chatelet.sigma_pp(inst, 3, k) >= floor, (coeffs, k)
            confirmed += 1
        return f"sigma lower bound holds for {confirmed} certified instances at p = 3"

    out.append(_check("lemmas", "hensel-density-floor", hensel_bound))

    def omega_support() -> str:
        region = RegionB(NormForm(Qi), 1, 6.0)
        prof = DensityProfile.draw(region, 5000, 3)
        lo, hi = region.support
        est_out, _ = prof.estimate(hi + prof.half_width + 1.0)
        assert est_out == 0.0
        est_neg, _ = prof.estimate(lo - prof.half_width - 1.0)
        assert est_neg == 0.0
        est_mid, _ = prof.estimate(6.0**2 / 2)
        assert est_mid > 0.0
        return "omega vanishes outside support and is positive at the basepoint"

    out.append(_check("lemmas", "omega-support", omega_support))

    def anchor_identity() -> str:
        sv = sieve_mod.build_sieve(300)
        res = chowla_bh.bh_correlation([BinaryForm([1, 0])], 300, sv)
        psi = math.fsum(float(sv.mangoldt(n).value) for n in range(1, 301))
        assert res.series == 1
        assert abs(res.correlation - psi / 300) < 1e-9
        return "correlation of the identity form equals psi(x)/x at x = 300"

    out.append(_check("lemmas", "prime-count-anchor", anchor_identity))
    return out


def verify_battery(suite: str = "all") -> list[CheckResult]:
    """The exact-identity and inequality battery behind `verify`."""
    if suite not in SUITES:
        raise ConfigError(f"suite must be one of {SUITES}")
    out: list[CheckResult] = []
    if suite in ("all", "oracle"):
        out.extend(_oracle_checks())
    if suite in ("all", "lemmas"):
        out.extend(_lemma_checks())
    return out
