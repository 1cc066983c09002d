"""Seeded sweeps over sampled pairs and models.

Pair ``i`` of a sweep with master seed ``S`` is sampled from
``splitmix64(S + (i + 1) * 0x9E3779B97F4A7C15 mod 2^64)``, the i-th output of
the SplitMix64 generator started at ``S``.  Reports are written in index order
whatever the worker count, and wall time stays out of the JSON so reruns are
byte-identical.
"""

from __future__ import annotations

import csv
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import IO, Iterable

from afl_lab.errors import BoundOverflow, ComplexityExceeded, ConfigInvalid, SamplingExhausted
from afl_lab.field import context, is_odd_prime
from afl_lab.orbital import Caps, OrbitalReport, analyze_model, analyze_pair, structural_checks
from afl_lab.orbits import (
    SymmetricPair,
    UnitaryModel,
    invariants,
    match_to_unitary,
    sample_minuscule,
    sample_symmetric,
)

log = logging.getLogger("afl_lab")

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MODES = ("invariants", "rfl", "afl-minuscule", "oracle", "all")


def splitmix64(x: int) -> int:
    z = x & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def pair_seed(master: int, index: int) -> int:
    return splitmix64((master + (index + 1) * GOLDEN) & MASK64)


def configure_logging() -> None:
    level = os.environ.get("AFL_LAB_LOG", "error").upper()
    logging.basicConfig(level=getattr(logging, level, logging.ERROR), format="%(levelname)s: %(message)s")


@dataclass
class SweepConfig:
    p: int
    n: int
    count: int = 10
    seed: int = 0
    mode: str = "all"
    val_budget: int = 1
    module_cap: int = 10**6
    submodule_cap: int = 10**5
    coset_cap: int = 10**7
    retry_limit: int = 10**4
    workers: int = 1
    output: str | None = None

    def validate(self) -> None:
        if not is_odd_prime(self.p):
            raise ConfigInvalid(f"p must be an odd prime, got {self.p}")
        if self.n < 1:
            raise ConfigInvalid("n must be at least 1")
        if self.count < 1:
            raise ConfigInvalid("count must be at least 1")
        if self.mode not in MODES:
            raise ConfigInvalid(f"unknown mode {self.mode!r}")
        if self.mode == "oracle" and self.n > 2:
            raise ConfigInvalid("the coset oracle supports n <= 2 only")
        if self.val_budget < 0 or self.workers < 1:
            raise ConfigInvalid("val_budget must be >= 0 and workers >= 1")
        if not 0 <= self.seed <= MASK64:
            raise ConfigInvalid("seed must fit in 64 bits")

    @property
    def caps(self) -> Caps:
        return Caps(self.module_cap, self.submodule_cap, self.coset_cap)


@dataclass
class SweepSummary:
    attempted: int = 0
    sampled: int = 0
    rejected: int = 0
    skipped: int = 0
    tallies: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    findings: list = field(default_factory=list)
    wall_time: float = 0.0

    def add(self, rec: dict) -> None:
        self.attempted += 1
        status = rec["status"]
        if status == "rejected":
            self.rejected += 1
            return
        self.sampled += 1
        if status == "skipped":
            self.skipped += 1
            return
        for name, verdict in rec.get("checks", {}).items():
            t = self.tallies.setdefault(name, {"pass": 0, "fail": 0, "finding": 0})
            if verdict == "pass":
                t["pass"] += 1
            elif verdict == "fail":
                t["fail"] += 1
            elif verdict == "finding":
                t["finding"] += 1
        if status == "fail":
            self.failures.append({"index": rec["index"], "seed": rec["seed"]})
        elif status == "finding":
            self.findings.append({"index": rec["index"], "seed": rec["seed"]})

    def to_json(self) -> dict:
        d = asdict(self)
        d.pop("wall_time")
        d["tallies"] = {k: d["tallies"][k] for k in sorted(d["tallies"])}
        return {"summary": d}

    def exit_code(self, findings_ok: bool = False) -> int:
        if self.failures:
            return 2
        if self.findings and not findings_ok:
            return 3
        return 0


def _grade(rep: OrbitalReport, checks: dict, prefix: str = "") -> None:
    oracle_verified = rep.verdicts.get("oracle") is True
    for name, v in rep.verdicts.items():
        if v is None:
            continue
        key = prefix + name
        if name == "rfl2" and not oracle_verified:
            checks[key] = "pass" if v else "finding"
        else:
            checks[key] = "pass" if v else "fail"


def _status(checks: dict) -> str:
    vals = checks.values()
    if "fail" in vals:
        return "fail"
    if "finding" in vals:
        return "finding"
    return "ok"


def evaluate(cfg: SweepConfig, pair: SymmetricPair | None = None, model: UnitaryModel | None = None) -> dict:
    """Run the mode's checks on an already sampled pair and/or model."""
    caps = cfg.caps
    rec: dict = {}
    checks: dict = {}
    try:
        if cfg.mode == "invariants":
            inv = invariants(pair)
            m = match_to_unitary(pair)
            st = structural_checks(m, inv)
            rec["invariants"] = inv.to_json()
            rec["unitary"] = m.to_json()
            rec["structural"] = st
            checks["structural"] = "pass" if all(st.values()) else "fail"
        if cfg.mode in ("rfl", "oracle", "all"):
            want_oracle = cfg.mode == "oracle" or (cfg.mode == "all" and pair.n <= 2)
            rep = analyze_pair(pair, caps, oracle=want_oracle, selfdual=True, closed=cfg.mode == "all")
            rec["report"] = rep.to_json()
            _grade(rep, checks)
        if cfg.mode in ("afl-minuscule", "all"):
            mrep = analyze_model(model, caps, selfdual=False, closed=True)
            rec["minuscule_report"] = mrep.to_json()
            _grade(mrep, checks, prefix="minuscule.")
    except (ComplexityExceeded, BoundOverflow) as exc:
        return {"status": "skipped", "error": str(exc)}
    rec["checks"] = checks
    rec["status"] = _status(checks)
    return rec


def run_one(cfg: SweepConfig, index: int) -> dict:
    """Sample and check pair ``index``; the result depends only on ``(cfg, index)``."""
    ctx = context(cfg.p)
    seed = pair_seed(cfg.seed, index)
    rec: dict = {"index": index, "seed": seed, "mode": cfg.mode}
    pair = model = None
    try:
        if cfg.mode in ("invariants", "rfl", "oracle", "all"):
            pair = sample_symmetric(ctx, cfg.n, seed, cfg.val_budget, cfg.retry_limit)
            rec["pair"] = pair.to_json()
        if cfg.mode in ("afl-minuscule", "all"):
            model = sample_minuscule(ctx, cfg.n, seed, parity="odd", retries=cfg.retry_limit)
            rec["model"] = model.to_json()
    except SamplingExhausted as exc:
        rec["status"] = "rejected"
        rec["error"] = str(exc)
        return rec
    rec.update(evaluate(cfg, pair, model))
    return rec


def _run_chunk(args) -> list[dict]:
    cfg, indices = args
    return [run_one(cfg, i) for i in indices]


def iter_records(cfg: SweepConfig) -> Iterable[dict]:
    indices = list(range(cfg.count))
    if cfg.workers == 1:
        for i in indices:
            yield run_one(cfg, i)
        return
    chunks = [(cfg, indices[k : k + 4]) for k in range(0, len(indices), 4)]
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        for batch in pool.map(_run_chunk, chunks):
            yield from batch


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def run_sweep(cfg: SweepConfig, stream: IO[str] | None = None, keep: list | None = None) -> SweepSummary:
    """Run the sweep, writing one JSON line per pair then the summary line."""
    cfg.validate()
    summary = SweepSummary()
    start = time.perf_counter()
    handle = None
    try:
        if cfg.output:
            handle = open(cfg.output, "w", encoding="utf-8")
        out = handle or stream
        for rec in iter_records(cfg):
            summary.add(rec)
            if keep is not None:
                keep.append(rec)
            if rec["status"] in ("fail", "finding"):
                log.warning("pair %d (seed %d): %s", rec["index"], rec["seed"], rec["status"])
            else:
                log.info("pair %d: %s", rec["index"], rec["status"])
            if out is not None:
                out.write(dumps(rec) + "\n")
        if out is not None:
            out.write(dumps(summary.to_json()) + "\n")
    finally:
        if handle is not None:
            handle.close()
    summary.wall_time = time.perf_counter() - start
    return summary


def write_csv(summary: SweepSummary, path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["check", "pass", "fail", "finding"])
        for name in sorted(summary.tallies):
            t = summary.tallies[name]
            w.writerow([name, t["pass"], t["fail"], t["finding"]])
        w.writerow([])
        w.writerow(["attempted", "sampled", "rejected", "skipped", "failures", "findings"])
        w.writerow([
            summary.attempted,
            summary.sampled,
            summary.rejected,
            summary.skipped,
            len(summary.failures),
            len(summary.findings),
        ])


def replay(rec: dict, cfg: SweepConfig) -> dict:
    """Re-run a reported record from its embedded pair/model JSON."""
    pair = SymmetricPair.from_json(rec["pair"]) if "pair" in rec else None
    model = UnitaryModel.from_json(rec["model"]) if "model" in rec else None
    out = {"index": rec["index"], "seed": rec["seed"], "mode": cfg.mode}
    if pair is not None:
        out["pair"] = rec["pair"]
    if model is not None:
        out["model"] = rec["model"]
    out.update(evaluate(cfg, pair, model))
    return out
