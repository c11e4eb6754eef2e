"""Command-line front end: experiment runs, the check battery, summaries.

Exit codes: 0 success, 2 configuration error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, harness
from . import sieve as sieve_mod
from .errors import ConfigError


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--out", type=str, default=None)
    sp.add_argument("--workers", type=int, default=None)
    sp.add_argument("--A", type=float, default=None, dest="A")
    sp.add_argument("--config", type=str, default=None,
                    help="key=value file; explicit flags override it")


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="formlab")
    ap.add_argument("--version", action="version", version=f"formlab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    sv = sub.add_parser("sieve", help="write a smallest-prime-factor table")
    sv.add_argument("--bound", type=int, required=True)
    sv.add_argument("--out", type=str, required=True)

    ch = sub.add_parser("chowla", help="sign-correlation sup statistic over sampled forms")
    ch.add_argument("--d", type=int, default=None)
    ch.add_argument("--H", type=int, default=None)
    ch.add_argument("--c", type=float, default=None)
    ch.add_argument("--samples", type=int, default=None)
    ch.add_argument("--grid", type=int, default=None)
    _add_common(ch)

    bh = sub.add_parser("bh", help="prime-density correlations against the local product")
    bh.add_argument("--d", type=int, default=None)
    bh.add_argument("--H", type=int, default=None)
    bh.add_argument("--c", type=float, default=None)
    bh.add_argument("--x", type=int, default=None)
    bh.add_argument("--r", type=int, default=None)
    bh.add_argument("--samples", type=int, default=None)
    bh.add_argument("--min-series", type=float, default=None, dest="min_series")
    bh.add_argument("--anchor", action="store_true", default=None,
                    help="single identity-form record (densities exactly known)")
    _add_common(bh)

    hs = sub.add_parser("hasse", help="rational versus locally-solvable classes")
    hs.add_argument("--field", type=str, default=None)
    hs.add_argument("--d", type=int, default=None)
    hs.add_argument("--H", type=int, default=None)
    hs.add_argument("--height", type=int, default=None)
    hs.add_argument("--primes", type=int, default=None)
    hs.add_argument("--samples", type=int, default=None)
    hs.add_argument("--x", type=int, default=None)
    hs.add_argument("--w-desk", type=int, default=None, dest="w_desk")
    hs.add_argument("--k-desk", type=int, default=None, dest="k_desk")
    hs.add_argument("--m-dk", type=int, default=None, dest="m_dk")
    hs.add_argument("--mc", type=int, default=None)
    _add_common(hs)

    de = sub.add_parser("density", help="archimedean density bins and count-model records")
    de.add_argument("--field", type=str, default=None)
    de.add_argument("--d", type=int, default=None)
    de.add_argument("--H", type=int, default=None)
    de.add_argument("--x", type=int, default=None)
    de.add_argument("--B", type=float, default=None, dest="B")
    de.add_argument("--mc", type=int, default=None)
    de.add_argument("--samples", type=int, default=None)
    de.add_argument("--bins", type=int, default=None)
    de.add_argument("--w-desk", type=int, default=None, dest="w_desk")
    de.add_argument("--k-desk", type=int, default=None, dest="k_desk")
    _add_common(de)

    vf = sub.add_parser("verify", help="run the exact check battery")
    vf.add_argument("--suite", type=str, default=None, choices=list(harness.SUITES))
    _add_common(vf)

    sm = sub.add_parser("summarize", help="quantile table of a results.jsonl")
    sm.add_argument("path", type=str)
    return ap


def _collect_settings(args: argparse.Namespace) -> dict:
    skip = {"command", "config"}
    cli = {k: v for k, v in vars(args).items() if k not in skip and v is not None}
    if args.config:
        file_map = harness.parse_config_file(args.config)
        kind = file_map.pop("kind", None)
        if kind is not None and kind != args.command:
            raise ConfigError(
                f"config file is for kind {kind!r} but the subcommand is {args.command!r}"
            )
        merged = dict(file_map)
        merged.update(cli)
        return merged
    return cli


def _run_experiment(args: argparse.Namespace) -> int:
    cfg = harness.make_config(args.command, _collect_settings(args))
    manifest = harness.run(cfg)
    out = Path(manifest.out_dir)
    if cfg.kind == "verify":
        failed = 0
        for line in (out / "results.jsonl").read_text().splitlines():
            rec = json.loads(line)
            mark = "ok  " if rec["ok"] else "FAIL"
            print(f"{mark} {rec['suite']}/{rec['name']}: {rec['detail']}")
            failed += 0 if rec["ok"] else 1
        total = manifest.records
        print(f"{total - failed}/{total} checks passed")
        return 3 if failed else 0
    if cfg.kind in ("hasse", "density"):
        # the small-prime threshold is a desk choice, not a derived value
        print(f"m_dk={cfg.m_dk} w_desk={cfg.w_desk} k_desk={cfg.k_desk}")
    print(f"results: {out / 'results.jsonl'} ({manifest.records} records)")
    print(f"summary: {out / 'summary.csv'}")
    print(f"manifest: {out / 'manifest.json'}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "sieve":
            if args.bound < 2:
                raise ConfigError("sieve bound must be at least 2")
            table = sieve_mod.build_sieve(args.bound)
            table.save(args.out)
            print(f"wrote {args.out} (bound {args.bound})")
            return 0
        if args.command == "summarize":
            table = harness.summarize(args.path)
            print(json.dumps(table, sort_keys=True, indent=1))
            return 0
        return _run_experiment(args)
    except ConfigError as exc:
        print(json.dumps({"error": "config", "detail": str(exc)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
