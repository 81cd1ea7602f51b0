"""Command-line interface.

Subcommands: census, completions, chain build|check, play, adversary,
verify, hall.  All output is JSON (one document per invocation); --pretty
indents it.  Exit codes: 0 all checks pass, 1 verification failure, 2 usage
error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

from . import adversary as adv
from . import certificate as cert
from . import game, latin, strategy
from .extalg import mask_of
from .gf import FieldSpec, find_game_prime


def _emit(payload: dict, pretty: bool) -> None:
    print(json.dumps(payload, indent=2 if pretty else None))


def _parse_sets(text: str, n: int) -> list[int]:
    """Semicolon-separated comma lists of 1-based symbols, e.g. '1,2;2,3'."""
    masks = []
    for part in text.split(";"):
        part = part.strip()
        symbols = [int(tok) for tok in part.split(",") if tok.strip()] if part else []
        if any(not 1 <= s <= n for s in symbols):
            raise ValueError(f"symbol out of range in {part!r}")
        masks.append(mask_of(symbols))
    return masks


def _field_for(n: int, p: int | None, strategy_name: str, dealer_name: str = "") -> FieldSpec:
    if p is not None:
        return FieldSpec(p=p, n=n)
    roots = {m for m in range(3, n + 1, 2)} if dealer_name == "adversary" else set()
    if strategy_name == "common-vector":
        avoid = {latin.census_signed_fixed_diagonal(n)}
    elif strategy_name in ("certificate", "seeded-certificate"):
        avoid = {latin.census_signed(n)}
    else:
        avoid = set()
    return find_game_prime(n, root_orders=roots, avoid_divisors=avoid - {0})


def _dealer_for(name: str, rows_file: str | None):
    if name == "standard":
        return game.StandardDealer()
    if name == "random":
        return game.RandomDealer()
    if name == "common-vector":
        return game.CommonVectorDealer()
    if name == "adversary":
        return adv.AdversaryDealer()
    if name == "scripted":
        if rows_file is None:
            raise ValueError("scripted dealer needs --rows-file")
        with open(rows_file) as fh:
            return game.ScriptedDealer(json.load(fh))
    raise ValueError(f"unknown dealer {name!r}")


def cmd_census(args) -> int:
    fn = latin.census_signed_fixed_diagonal if args.fixed_diagonal else latin.census_signed
    value = fn(args.n, workers=args.workers)
    _emit(
        {"op": "census", "n": args.n, "fixed_diagonal": args.fixed_diagonal, "value": value},
        args.pretty,
    )
    return 0


def cmd_completions(args) -> int:
    masks = _parse_sets(args.sets, args.n)
    if len(masks) != args.n:
        raise ValueError(f"need {args.n} sets, got {len(masks)}")
    if any(m.bit_count() != args.k for m in masks):
        raise ValueError(f"every set must have size {args.k}")
    value = latin.signed_completions(masks, args.n)
    _emit({"op": "completions", "n": args.n, "k": args.k, "value": value}, args.pretty)
    return 0


def cmd_chain_build(args) -> int:
    chain = cert.build_chain(args.n, args.mod, down_to=args.down_to)
    cert.save_chain(chain, args.out)
    _emit(
        {
            "op": "chain-build",
            "n": args.n,
            "modulus": args.mod or 0,
            "levels": {str(k): f.support_size for k, f in sorted(chain.forms.items())},
            "out": args.out,
        },
        args.pretty,
    )
    return 0


def cmd_chain_check(args) -> int:
    chain = cert.load_chain(args.file)
    ok, report = cert.check_chain(chain)
    _emit(
        {
            "op": "chain-check",
            "file": args.file,
            "ok": ok,
            "checks": [{"name": n, "ok": o, "detail": d} for n, o, d in report],
        },
        args.pretty,
    )
    return 0 if ok else 1


def _play_one(args_tuple):
    """One confined game; top-level so batch mode can fork workers."""
    n, p, strategy_name, dealer_name, rows, rows_file, seed = args_tuple
    fieldspec = FieldSpec(p=p, n=n)
    strat = strategy.make_strategy(strategy_name, n, fieldspec, r=rows)
    dealer = _dealer_for(dealer_name, rows_file)
    t = game.play(n, fieldspec, strat, dealer, seed=seed)
    ok, _ = game.verify_transcript(t)
    return t.to_payload(), ok


def cmd_play(args) -> int:
    fieldspec = _field_for(args.n, args.p, args.strategy, args.dealer)
    jobs = [
        (args.n, fieldspec.p, args.strategy, args.dealer, args.rows, args.rows_file,
         args.seed + g)
        for g in range(args.games)
    ]
    if args.workers and args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(_play_one, jobs))
    else:
        results = [_play_one(job) for job in jobs]
    transcripts = [game.Transcript.from_payload(payload) for payload, _ in results]
    summary = {"games": args.games, "completed": 0, "errors": 0, "verified": 0}
    for t, (_, ok) in zip(transcripts, results):
        summary["completed"] += t.completed
        summary["errors"] += not t.completed
        summary["verified"] += ok
    if args.out:
        with open(args.out, "w") as fh:
            if args.games == 1:
                json.dump(transcripts[0].to_payload(), fh)
            else:
                for t in transcripts:
                    fh.write(json.dumps(t.to_payload()) + "\n")
    payload = {
        "op": "play",
        "n": args.n,
        "p": fieldspec.p,
        "strategy": args.strategy,
        "dealer": args.dealer,
        "seed": args.seed,
        **summary,
    }
    if args.games == 1:
        payload["verdict"] = transcripts[0].verdict
    _emit(payload, args.pretty)
    return 0 if summary["verified"] == args.games else 1


def cmd_adversary(args) -> int:
    fieldspec = FieldSpec(p=args.p, n=args.n) if args.p else None
    runs = []
    histogram: dict[str, int] = {}
    wins = 0
    for r in range(args.runs):
        strat = strategy.make_strategy(args.strategy, args.n, fieldspec or find_game_prime(args.n), r=None)
        t, report = adv.run_adversary(strat, args.n, fieldspec, seed=args.seed + r)
        wins += report.adversary_wins
        histogram[str(report.error_step)] = histogram.get(str(report.error_step), 0) + 1
        runs.append({"transcript": t.to_payload(), "report": report.to_payload()})
    _emit(
        {
            "op": "adversary",
            "n": args.n,
            "strategy": args.strategy,
            "runs": runs,
            "summary": {"runs": args.runs, "wins": wins, "error_step_histogram": histogram},
        },
        args.pretty,
    )
    return 0 if wins == args.runs else 1


def cmd_verify(args) -> int:
    t = game.Transcript.load(args.file)
    ok, report = game.verify_transcript(t)
    _emit(
        {
            "op": "verify",
            "file": args.file,
            "ok": ok,
            "checks": [{"name": n, "ok": o, "detail": d} for n, o, d in report],
        },
        args.pretty,
    )
    return 0 if ok else 1


def cmd_hall(args) -> int:
    t = game.Transcript.load(args.file)
    reports = []
    for step in range(1, len(t.permutations) + 1):
        rep = game.hall_report(t.columns_after(step), t.n, t.p, step=step)
        reports.append(rep.to_payload())
    _emit({"op": "hall", "file": args.file, "steps": reports}, args.pretty)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pretty", action="store_true", help="indent JSON output")
    ap = argparse.ArgumentParser(prog="rotagame", description=__doc__, parents=[common])
    sub = ap.add_subparsers(dest="command", required=True)

    def add_parser(name: str, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    c = add_parser("census", help="signed Latin-square census")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--fixed-diagonal", action="store_true")
    c.add_argument("--workers", type=int, default=None)
    c.set_defaults(fn=cmd_census)

    c = add_parser("completions", help="signed completion count of column sets")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--sets", required=True, help="e.g. '1,2;2,3;3,4;1,4'")
    c.set_defaults(fn=cmd_completions)

    c = add_parser("chain", help="build or check certificate chains")
    chain_sub = c.add_subparsers(dest="chain_command", required=True)
    b = chain_sub.add_parser("build", parents=[common])
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--mod", type=int, default=None)
    b.add_argument("--down-to", type=int, default=0)
    b.add_argument("--out", required=True)
    b.set_defaults(fn=cmd_chain_build)
    k = chain_sub.add_parser("check", parents=[common])
    k.add_argument("file")
    k.set_defaults(fn=cmd_chain_check)

    c = add_parser("play", help="run games")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--strategy", required=True, choices=strategy.STRATEGY_IDS)
    c.add_argument("--dealer", required=True,
                   choices=("standard", "random", "scripted", "common-vector", "adversary"))
    c.add_argument("--p", type=int, default=None)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--games", type=int, default=1)
    c.add_argument("--rows", type=int, default=None, help="rows for seeded-certificate")
    c.add_argument("--rows-file", default=None, help="JSON rows for the scripted dealer")
    c.add_argument("--workers", type=int, default=None, help="parallel games in batch mode")
    c.add_argument("--out", default=None)
    c.set_defaults(fn=cmd_play)

    c = add_parser("adversary", help="adversarial runs at odd n")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--strategy", required=True, choices=("matching", "random"))
    c.add_argument("--p", type=int, default=None)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--runs", type=int, default=1)
    c.set_defaults(fn=cmd_adversary)

    c = add_parser("verify", help="re-check a transcript file")
    c.add_argument("file")
    c.set_defaults(fn=cmd_verify)

    c = add_parser("hall", help="Hall-condition report for a transcript")
    c.add_argument("file")
    c.set_defaults(fn=cmd_hall)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError) as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
