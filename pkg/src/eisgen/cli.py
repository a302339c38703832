"""Command line: irregular-pair tables, single-pair verification, range scans.

    eisgen irregular --max-p 1000
    eisgen verify --p 37 --k 32 --json out.json
    eisgen scan --max-p 160 --jobs 4 --cache ~/.cache/eisgen --csv summary.csv

Exit status: 0 when every verified pair is true, 3 when some pair is false,
4 when some pair is indeterminate (and none false), 2 on usage errors.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from . import __version__, cache
from .arith import DomainError, ResidueRing, is_prime
from .bernoulli import IrregularPair, PoleError, bernoulli_mod, check_pplus1mk, irregular_pairs
from .eisenstein import VerifyOptions, hecke_matrices, verify_pair

log = logging.getLogger("eisgen")

REPORT_SCHEMA = "eisgen-report"
REPORT_VERSION = 1
EXIT_OK, EXIT_USAGE, EXIT_FALSE, EXIT_INDETERMINATE = 0, 2, 3, 4

CSV_FIELDS = ["p", "k", "variant", "precision", "d", "hecke_rank", "n_gen", "p_rank_pM",
              "rank_check", "quotient_exponent", "bernoulli_exponent", "up_generates",
              "verdict", "failed_stage", "hash_I", "hash_J", "seconds"]


class UsageError(Exception):
    pass


@dataclass
class ScanConfig:
    max_p: int = 160
    pairs: tuple = ()
    precision: int = 2
    guard: int = 1
    jobs: int = 1
    cache_dir: str | None = None
    json_path: str | None = None
    csv_path: str | None = None
    variant: str = "full"
    exact_check: bool = False
    compare_variants: bool = False

    def __post_init__(self):
        if self.max_p < 5:
            raise UsageError("--max-p must be at least 5")
        if self.precision < 2:
            raise UsageError("--precision must be at least 2")
        if self.jobs < 1:
            raise UsageError("--jobs must be at least 1")
        if self.variant not in ("full", "plus"):
            raise UsageError("--variant must be full or plus")

    def verification_settings(self) -> dict:
        """The part of the configuration that can change a result."""
        return {"precision": self.precision, "guard": self.guard, "variant": self.variant,
                "exact_check": self.exact_check, "compare_variants": self.compare_variants}

    def config_hash(self) -> str:
        blob = json.dumps(self.verification_settings(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


# ---------------------------------------------------------------------------
# irregular pairs

def _primes_upto(n: int):
    return [q for q in range(5, n + 1) if is_prime(q)]


def cmd_irregular(max_p: int):
    """Yield (pair, p does not divide B_{p+1-k}) for every pair with p <= max_p."""
    if max_p < 5:
        raise UsageError("--max-p must be at least 5")
    for q in _primes_upto(max_p):
        for pair in irregular_pairs(q):
            yield pair, check_pplus1mk(pair)


def validate_pair(p: int, k: int) -> IrregularPair:
    """The pair, or a UsageError that shows the B_k residue."""
    if p < 5 or not is_prime(p):
        raise UsageError(f"p = {p} is not a prime >= 5")
    try:
        pair = IrregularPair(p, k)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc
    try:
        r = bernoulli_mod(k, ResidueRing(p, 1)).value
    except PoleError as exc:
        raise UsageError(str(exc)) from exc
    if r != 0:
        raise UsageError(f"({p},{k}) is not irregular: B_{k} = {r} mod {p}")
    return pair


# ---------------------------------------------------------------------------
# verification records

def _matrices(p: int, k: int, cfg: ScanConfig) -> tuple[dict, bool]:
    root = Path(cfg.cache_dir) if cfg.cache_dir else None
    if root is not None:
        got = cache.load(root, p, k, cfg.variant, cfg.precision, cfg.guard)
        if got is not None:
            return got, True
    mats = hecke_matrices(p, k, cfg.precision, cfg.guard, cfg.variant)
    if root is not None:
        cache.save(root, p, k, cfg.variant, cfg.precision, cfg.guard, mats)
    return mats, False


def run_pair(p: int, k: int, cfg: ScanConfig) -> dict:
    """Verify one pair and return its report record."""
    t0 = time.perf_counter()
    mats, hit = _matrices(p, k, cfg)
    opts = VerifyOptions(precision=cfg.precision, guard=cfg.guard, variant=cfg.variant,
                         compare_variants=cfg.compare_variants)
    res = verify_pair(p, k, opts, matrices=mats)
    result = res.as_dict()
    timings = result.pop("timings")
    record = {
        "schema": REPORT_SCHEMA,
        "schema_version": REPORT_VERSION,
        "tool_version": __version__,
        "pair": [p, k],
        "config": cfg.verification_settings(),
        "config_hash": cfg.config_hash(),
        "result": result,
    }
    if cfg.exact_check:
        from .exact import exact_cross_check
        record["exact_check"] = exact_cross_check(p, k, mats, cfg.variant)
        if not record["exact_check"].get("agree", True):
            record["result"]["verdict"] = "indeterminate"
            record["result"]["failed_stage"] = "exact_check"
    timings["wall"] = time.perf_counter() - t0
    record["run"] = {"timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
                     "cache_hit": hit, "timings": timings}
    return record


def report_body(record: dict) -> dict:
    """The deterministic part of a record (drops the 'run' section)."""
    return {key: val for key, val in record.items() if key != "run"}


def csv_row(record: dict) -> dict:
    r = record["result"]
    return {
        "p": r["p"], "k": r["k"], "variant": r["variant"], "precision": r["precision"],
        "d": r["d"], "hecke_rank": r["hecke_rank"], "n_gen": r["n_gen"],
        "p_rank_pM": r["p_rank_pM"], "rank_check": r["rank_check"],
        "quotient_exponent": r["quotient_exponent"], "bernoulli_exponent": r["bernoulli_exponent"],
        "up_generates": r["up_generates"], "verdict": r["verdict"],
        "failed_stage": r["failed_stage"] or "",
        "hash_I": r["hashes"].get("I", ""), "hash_J": r["hashes"].get("J", ""),
        "seconds": f"{record['run']['timings'].get('wall', 0.0):.3f}",
    }


def _write_json(path: str, doc) -> None:
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _write_csv(path: str, records: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        w.writeheader()
        for rec in records:
            w.writerow(csv_row(rec))


def exit_status(verdicts) -> int:
    verdicts = list(verdicts)
    if "false" in verdicts:
        return EXIT_FALSE
    if any(v != "true" for v in verdicts):
        return EXIT_INDETERMINATE
    return EXIT_OK


def _line(record: dict) -> str:
    r = record["result"]
    extra = f" ({r['failed_stage']})" if r["failed_stage"] else ""
    return (f"p={r['p']:<4} k={r['k']:<4} d={r['d']:<4} N_gen={r['n_gen']:<3} "
            f"|M/I|=p^{r['quotient_exponent']}  verdict={r['verdict']}{extra}")


def cmd_verify(p: int, k: int, cfg: ScanConfig) -> tuple[dict, int]:
    validate_pair(p, k)
    record = run_pair(p, k, cfg)
    if cfg.json_path:
        _write_json(cfg.json_path, record)
    if cfg.csv_path:
        _write_csv(cfg.csv_path, [record])
    print(_line(record))
    return record, exit_status([record["result"]["verdict"]])


def _worker(args) -> dict:
    p, k, cfg = args
    return run_pair(p, k, cfg)


def cmd_scan(cfg: ScanConfig) -> tuple[dict, int]:
    """Verify every pair up to max_p (or the given pairs), one worker per pair."""
    t0 = time.perf_counter()
    if cfg.pairs:
        pairs = [tuple(validate_pair(p, k)) for p, k in cfg.pairs]
    else:
        pairs = [tuple(pair) for pair, _ in cmd_irregular(cfg.max_p)]
    jobs = [(p, k, cfg) for p, k in pairs]
    records = []
    if cfg.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            for rec in pool.map(_worker, jobs):
                records.append(rec)
                print(_line(rec), flush=True)
    else:
        for job in jobs:
            rec = _worker(job)
            records.append(rec)
            print(_line(rec), flush=True)
    verdicts = [r["result"]["verdict"] for r in records]
    summary = {
        "pairs": len(records),
        "true": verdicts.count("true"),
        "false": verdicts.count("false"),
        "indeterminate": verdicts.count("indeterminate"),
        "runtime_seconds": round(time.perf_counter() - t0, 3),
    }
    doc = {"schema": REPORT_SCHEMA + "-scan", "schema_version": REPORT_VERSION,
           "tool_version": __version__, "max_p": cfg.max_p, "config_hash": cfg.config_hash(),
           "records": records, "summary": summary}
    if cfg.json_path:
        _write_json(cfg.json_path, doc)
    if cfg.csv_path:
        _write_csv(cfg.csv_path, records)
    print(f"{summary['pairs']} pairs: {summary['true']} true, {summary['false']} false, "
          f"{summary['indeterminate']} indeterminate ({summary['runtime_seconds']:.1f} s)")
    for r in records:
        if r["result"]["verdict"] == "false":
            print(f"*** FALSE VERDICT at (p,k) = ({r['result']['p']},{r['result']['k']}) ***")
    return doc, exit_status(verdicts)


# ---------------------------------------------------------------------------
# argument parsing

def _pairs_arg(text: str) -> tuple:
    out = []
    for item in text.split(","):
        p, _, k = item.strip().partition(":")
        out.append((int(p), int(k)))
    return tuple(out)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="eisgen", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--precision", type=int, default=2, help="coefficient precision B (default 2)")
        sp.add_argument("--guard", type=int, default=1, help="extra digits carried while building")
        sp.add_argument("--variant", choices=("full", "plus"), default="full")
        sp.add_argument("--cache", default=None,
                        help=f"Hecke matrix cache directory (default ${cache.CACHE_ENV})")
        sp.add_argument("--json", dest="json_path", default=None)
        sp.add_argument("--csv", dest="csv_path", default=None)
        sp.add_argument("--exact-check", action="store_true",
                        help="cross-check Hecke traces over a cyclotomic field (p <= 37)")
        sp.add_argument("--compare-variants", action="store_true",
                        help="also verify with the other symbol space and flag disagreement")
        sp.add_argument("-v", "--verbose", action="store_true")

    ir = sub.add_parser("irregular", help="list irregular pairs")
    ir.add_argument("--max-p", type=int, required=True)
    ir.add_argument("--json", dest="json_path", default=None)
    ir.add_argument("--csv", dest="csv_path", default=None)

    ve = sub.add_parser("verify", help="verify one irregular pair")
    ve.add_argument("--p", type=int, required=True)
    ve.add_argument("--k", type=int, required=True)
    common(ve)

    sc = sub.add_parser("scan", help="verify every irregular pair up to --max-p")
    sc.add_argument("--max-p", type=int, default=160)
    sc.add_argument("--pairs", type=_pairs_arg, default=(), help="explicit list like 37:32,59:44")
    sc.add_argument("--jobs", type=int, default=1)
    common(sc)
    return ap


def _config(args, max_p: int = 160) -> ScanConfig:
    cache_dir = args.cache if args.cache is not None else cache.default_cache_dir()
    return ScanConfig(max_p=max_p, pairs=getattr(args, "pairs", ()), precision=args.precision,
                      guard=args.guard, jobs=getattr(args, "jobs", 1),
                      cache_dir=str(cache_dir) if cache_dir else None,
                      json_path=args.json_path, csv_path=args.csv_path,
                      variant=args.variant, exact_check=args.exact_check,
                      compare_variants=args.compare_variants)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "irregular":
            rows = []
            for pair, ok in cmd_irregular(args.max_p):
                rows.append({"p": pair.p, "k": pair.k, "p_not_div_B_p+1-k": ok})
                print(f"{pair.p:>5} {pair.k:>5}  p does not divide B_(p+1-k): {'yes' if ok else 'NO'}", flush=True)
            print(f"{len(rows)} irregular pairs with p <= {args.max_p}")
            if args.json_path:
                _write_json(args.json_path, {"max_p": args.max_p, "pairs": rows})
            if args.csv_path:
                with open(args.csv_path, "w", newline="") as fh:
                    w = csv.DictWriter(fh, fieldnames=["p", "k", "p_not_div_B_p+1-k"])
                    w.writeheader()
                    w.writerows(rows)
            return EXIT_OK
        if args.command == "verify":
            cfg = _config(args, max_p=max(args.p, 5))
            _, code = cmd_verify(args.p, args.k, cfg)
            return code
        cfg = _config(args, max_p=args.max_p)
        _, code = cmd_scan(cfg)
        return code
    except UsageError as exc:
        print(f"eisgen: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
