"""Command line entry point: ``afl-lab {sample,match,orbital,verify}``.

Exit codes: 0 all checks passed, 1 usage or configuration error, 2 a proven
identity failed, 3 a conjectural identity produced a finding.
"""

from __future__ import annotations

import argparse
import json
import sys

from afl_lab.errors import AflLabError, ConfigInvalid
from afl_lab.field import context, is_odd_prime
from afl_lab.harness import SweepConfig, configure_logging, dumps, pair_seed, run_sweep, write_csv
from afl_lab.orbital import Caps, analyze_model, analyze_pair
from afl_lab.orbits import (
    SymmetricPair,
    UnitaryModel,
    match_to_unitary,
    sample_minuscule,
    sample_symmetric,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--p", type=int, help="odd prime")
    sub.add_argument("--n", type=int, default=1, help="rank")
    sub.add_argument("--count", type=int, default=1)
    sub.add_argument("--seed", type=int, default=0, help="64-bit master seed")
    sub.add_argument("--mode", default="all", choices=["invariants", "rfl", "afl-minuscule", "oracle", "all"])
    sub.add_argument("--val-budget", type=int, default=1, help="max valuation of sampled y entries")
    sub.add_argument("--max-module-size", type=int, default=10**6)
    sub.add_argument("--workers", type=int, default=1)
    sub.add_argument("--json", metavar="PATH", help="write JSON lines here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="afl-lab", description="Orbital integrals for U(n)xU(n) by lattice counting.")
    subs = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    sp = subs.add_parser("sample", help="print sampled pairs or minuscule models")
    _common(sp)
    sp.add_argument("--kind", choices=["symmetric", "minuscule"], default="symmetric")

    mp = subs.add_parser("match", help="print the unitary model matched to a pair")
    _common(mp)
    mp.add_argument("--input", metavar="PATH", help="pair JSON file ('-' for stdin)")

    op = subs.add_parser("orbital", help="print one orbital report")
    _common(op)
    op.add_argument("--input", metavar="PATH", help="pair or model JSON file ('-' for stdin)")
    op.add_argument("--oracle", action="store_true", help="also run the coset oracle (n <= 2)")

    vp = subs.add_parser("verify", help="run a seeded sweep")
    _common(vp)
    vp.add_argument("--csv", metavar="PATH", help="write a CSV summary")
    vp.add_argument("--figures", metavar="DIR", help="render summary figures into DIR")
    vp.add_argument("--findings-ok", action="store_true", help="exit 0 even if findings were recorded")
    return ap


def _need_p(args) -> int:
    if args.p is None:
        raise UsageError("--p is required")
    if not is_odd_prime(args.p):
        raise ConfigInvalid(f"--p must be an odd prime, got {args.p}")
    if args.n < 1:
        raise ConfigInvalid("--n must be at least 1")
    return args.p


def _load(path: str):
    if path == "-":
        return json.load(sys.stdin)
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _emit(args, lines) -> None:
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            for obj in lines:
                fh.write(dumps(obj) + "\n")
    else:
        for obj in lines:
            print(dumps(obj))


def _input_pair(args) -> SymmetricPair:
    if args.input:
        return SymmetricPair.from_json(_load(args.input))
    ctx = context(_need_p(args))
    return sample_symmetric(ctx, args.n, pair_seed(args.seed, 0), args.val_budget)


def cmd_sample(args) -> int:
    ctx = context(_need_p(args))
    out = []
    for i in range(args.count):
        s = pair_seed(args.seed, i)
        if args.kind == "symmetric":
            out.append(sample_symmetric(ctx, args.n, s, args.val_budget).to_json())
        else:
            out.append(sample_minuscule(ctx, args.n, s).to_json())
    _emit(args, out)
    return 0


def cmd_match(args) -> int:
    _emit(args, [match_to_unitary(_input_pair(args)).to_json()])
    return 0


def cmd_orbital(args) -> int:
    caps = Caps(module_size=args.max_module_size)
    if args.input:
        obj = _load(args.input)
        if "G" in obj:
            rep = analyze_model(UnitaryModel.from_json(obj), caps, selfdual=True)
        else:
            pair = SymmetricPair.from_json(obj)
            rep = analyze_pair(pair, caps, oracle=args.oracle and pair.n <= 2)
    else:
        pair = _input_pair(args)
        rep = analyze_pair(pair, caps, oracle=args.oracle and pair.n <= 2)
    _emit(args, [rep.to_json()])
    if not rep.proven_ok():
        return 2
    return 3 if rep.finding() else 0


def cmd_verify(args) -> int:
    cfg = SweepConfig(
        p=_need_p(args),
        n=args.n,
        count=args.count,
        seed=args.seed,
        mode=args.mode,
        val_budget=args.val_budget,
        module_cap=args.max_module_size,
        workers=args.workers,
        output=args.json,
    )
    records: list | None = [] if args.figures else None
    summary = run_sweep(cfg, stream=None if args.json else sys.stdout, keep=records)
    if args.csv:
        write_csv(summary, args.csv)
    if args.figures:
        from afl_lab.plotting import render_all

        for path in render_all(records, summary, args.figures):
            print(f"figure: {path}", file=sys.stderr)
    print(
        f"{summary.sampled} sampled, {summary.skipped} skipped, {len(summary.failures)} failures, "
        f"{len(summary.findings)} findings in {summary.wall_time:.1f}s",
        file=sys.stderr,
    )
    return summary.exit_code(args.findings_ok)


COMMANDS = {"sample": cmd_sample, "match": cmd_match, "orbital": cmd_orbital, "verify": cmd_verify}


def main(argv=None) -> int:
    configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.cmd](args)
    except UsageError as exc:
        print(f"afl-lab: error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    except (ConfigInvalid, ValueError, OSError, KeyError, TypeError) as exc:
        print(f"afl-lab: error: {exc}", file=sys.stderr)
        return 1
    except AflLabError as exc:
        print(f"afl-lab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
