"""Command-line front end: ``mdcollide {rho,graph,collide,hash,stats,game}``.

Exit codes: 0 success, 2 usage or configuration error, 3 a verification
ended in a padding rejection (the report is still printed).
"""

from __future__ import annotations

import argparse
import json
import sys
from itertools import combinations
from typing import Optional, Sequence

from .collide import (
    CollisionReport,
    formula_messages,
    full_hash,
    heuristic_formula_messages,
    minimal_collision,
    verify_collision,
)
from .errors import InputTooLong, IrreducibleModulus
from .funcgraph import graph_summary, rho_shape
from .game import BirthdayAdversary, FormulaAdversary, GameConfig, KeyVisibility, TrialRecord, run_game
from .mdcore import (
    CompressedMessage,
    HashSpec,
    PaddingSpec,
    TableCompression,
    ToyCompression,
    digest,
    md5_hash_spec,
)
from .stats import sample_graph_stats, sample_node_stats

EXIT_USAGE = 2
EXIT_REJECTED = 3

#: Toy state width used when --ell is too wide for a toy compression.
STAND_IN_BITS = 12


class UsageError(Exception):
    pass


def _int(text: str) -> int:
    return int(text, 0)


def _padding(text: str) -> PaddingSpec:
    try:
        return PaddingSpec.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from exc


def _common(p: argparse.ArgumentParser, *, ell_required: bool = False) -> None:
    p.add_argument("--ell", type=int, required=ell_required, help="state size in bits")
    p.add_argument("--seed", type=_int, default=0, help="toy compression seed / master seed")
    p.add_argument("--block-hex", default=None, help="message block as hex (default: zero block)")
    p.add_argument("--block-bits", type=int, default=None, help="default 32, or 512 for length fields over 31 bits")
    p.add_argument("--output", choices=("text", "json", "csv"), default="text")
    p.add_argument("--out", default=None, help="write the report to FILE instead of stdout")
    p.add_argument("--threads", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mdcollide", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rho", help="tail and cycle length of one start node")
    _common(p)
    p.add_argument("--iv", type=_int, default=0)
    p.add_argument("--table-file", default=None, help="explicit self-map, line i holds f(i)")

    p = sub.add_parser("graph", help="exhaustive functional-graph summary")
    _common(p)
    p.add_argument("--table-file", default=None)

    p = sub.add_parser("collide", help="synthesize and verify colliding messages")
    _common(p, ell_required=True)
    p.add_argument("--mode", choices=("minimal", "formula", "heuristic"), default="formula")
    p.add_argument("--c", type=_int_list, default=[0, 1], help="comma-separated family indices")
    p.add_argument("--padding", type=_padding, default=PaddingSpec(16))
    p.add_argument("--iv", type=_int, default=0)
    p.add_argument("--state-bits", type=int, default=None, help="toy state width (default: --ell)")
    p.add_argument("--symbolic", action="store_true", help="certify formula pairs without compression calls")
    p.add_argument("--hash", choices=("toy", "md5"), default="toy")

    p = sub.add_parser("hash", help="digest an explicit or run-length message")
    _common(p)
    p.add_argument("--hash", choices=("toy", "md5"), default="toy")
    p.add_argument("--padding", type=_padding, default=PaddingSpec(16))
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--message", help="UTF-8 text message")
    group.add_argument("--message-hex")
    group.add_argument("--message-file", help="compressed message JSON")

    p = sub.add_parser("stats", help="random-mapping statistics")
    _common(p, ell_required=True)
    p.add_argument("kind", choices=("node", "graph"))
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--mapping", choices=("toy", "table"), default="toy")

    p = sub.add_parser("game", help="collision game win rate")
    _common(p, ell_required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--adversary", choices=("formula", "birthday"), default="formula")
    p.add_argument("--visibility", choices=("given", "blind"), default="given")
    p.add_argument("--padding", type=_padding, default=PaddingSpec(16))
    p.add_argument("--c1", type=int, default=0)
    p.add_argument("--c2", type=int, default=1)
    p.add_argument("--max-queries", type=int, default=None)
    p.add_argument("--state-bits", type=int, default=None)
    p.add_argument("--written-out", action="store_true", help="refuse compressed adversary output")
    p.add_argument("--trials-csv", default=None, help="write per-trial CSV to FILE")

    for p in sub.choices.values():
        p.set_defaults(subparser=p)
    return parser


def _block_bits(args) -> int:
    if args.block_bits is not None:
        return args.block_bits
    padding = getattr(args, "padding", None)
    return 512 if padding is not None and padding.length_bits > 31 else 32


def _block(args, block_bits: int) -> bytes:
    if args.block_hex is None:
        return bytes(block_bits // 8)
    try:
        block = bytes.fromhex(args.block_hex)
    except ValueError as exc:
        raise UsageError(f"bad --block-hex: {exc}") from exc
    if len(block) * 8 != block_bits:
        raise UsageError(f"--block-hex has {len(block) * 8} bits, expected {block_bits}")
    return block


def _load_table(path: str) -> TableCompression:
    with open(path) as fh:
        values = [int(line) for line in fh if line.strip()]
    return TableCompression(values)


def _compression(args):
    if getattr(args, "table_file", None):
        return _load_table(args.table_file)
    if args.ell is None:
        raise UsageError("one of --ell or --table-file is required")
    return ToyCompression(args.seed, args.ell, _block_bits(args))


def _render(fmt: str, obj, text: str) -> str:
    if fmt == "json":
        return obj.to_json()
    if fmt == "csv":
        header = obj.CSV_HEADER if hasattr(obj, "CSV_HEADER") else obj.csv_header()
        return f"{header}\n{obj.to_csv_row()}"
    return text


def cmd_rho(args) -> tuple[str, int]:
    spec = _compression(args)
    shape = rho_shape(spec, _block(args, spec.block_bits), args.iv)
    text = f"lambda={shape.lam} mu={shape.mu} rho={shape.rho}"
    return _render(args.output, shape, text), 0


def cmd_graph(args) -> tuple[str, int]:
    spec = _compression(args)
    summary = graph_summary(spec, _block(args, spec.block_bits))
    text = " ".join(f"{k}={v}" for k, v in summary.to_dict().items())
    return _render(args.output, summary, text), 0


def _collide_hashspec(args) -> HashSpec:
    if args.hash == "md5":
        if not args.symbolic:
            raise UsageError("MD5 pairs can only be verified with --symbolic")
        return md5_hash_spec()
    state_bits = args.state_bits
    if state_bits is None:
        state_bits = args.ell if args.ell <= 64 else STAND_IN_BITS
        if args.ell > 64:
            print(f"note: using a {state_bits}-bit toy compression as stand-in", file=sys.stderr)
    return HashSpec(ToyCompression(args.seed, state_bits, _block_bits(args)), args.padding, args.iv)


def cmd_collide(args) -> tuple[str, int]:
    hashspec = _collide_hashspec(args)
    block = _block(args, hashspec.block_bits)
    if args.mode == "minimal":
        pairs = [minimal_collision(hashspec.compression, block, hashspec.iv)]
    else:
        make = formula_messages if args.mode == "formula" else heuristic_formula_messages
        msgs = make(block, args.ell, args.c)
        if len(msgs) < 2:
            raise UsageError("--c needs at least two values")
        pairs = list(combinations(msgs, 2))
    reports = [verify_collision(hashspec, m0, m1, symbolic=args.symbolic) for m0, m1 in pairs]
    if args.output == "json":
        out = "\n".join(r.to_json() for r in reports)
    elif args.output == "csv":
        out = "\n".join([CollisionReport.CSV_HEADER] + [r.to_csv_row() for r in reports])
    else:
        out = "\n".join(
            f"iterated={str(r.iterated_collision).lower()} full={str(r.full_collision).lower()} "
            f"rejection={r.rejection or 'none'} compression_calls={r.compression_calls}"
            for r in reports
        )
    code = EXIT_REJECTED if any(r.rejection for r in reports) else 0
    return out, code


def cmd_hash(args) -> tuple[str, int]:
    if args.hash == "md5":
        hashspec = md5_hash_spec()
    else:
        if args.ell is None:
            raise UsageError("--ell is required for the toy hash")
        hashspec = HashSpec(ToyCompression(args.seed, args.ell, _block_bits(args)), args.padding)
    try:
        if args.message_file:
            with open(args.message_file) as fh:
                m = CompressedMessage.from_json(fh.read())
            value = full_hash(hashspec, m)
        else:
            data = args.message.encode() if args.message is not None else bytes.fromhex(args.message_hex)
            value = digest(hashspec, data)
    except InputTooLong:
        return _render_hash(args.output, None, "InputTooLong"), EXIT_REJECTED
    return _render_hash(args.output, hashspec.render(value), None), 0


def _render_hash(fmt: str, hexdigest: Optional[str], rejection: Optional[str]) -> str:
    if fmt == "json":
        return json.dumps({"digest": hexdigest, "rejection": rejection})
    if fmt == "csv":
        return f"digest,rejection\n{hexdigest or ''},{rejection or ''}"
    return hexdigest if hexdigest is not None else f"rejected: {rejection}"


def cmd_stats(args) -> tuple[str, int]:
    if args.kind == "node":
        report = sample_node_stats(args.ell, args.samples, args.seed, mapping=args.mapping, threads=args.threads)
    else:
        report = sample_graph_stats(args.ell, args.trials, args.seed, mapping=args.mapping, threads=args.threads)
    text = " ".join(f"{k}={v!r}" for k, v in report.to_dict().items())
    return _render(args.output, report, text), 0


def cmd_game(args) -> tuple[str, int]:
    state_bits = args.state_bits
    if state_bits is None and args.ell > 64:
        state_bits = STAND_IN_BITS
        print(f"note: using a {state_bits}-bit toy compression as stand-in", file=sys.stderr)
    config = GameConfig(
        ell=args.ell,
        padding=args.padding,
        key_visibility=KeyVisibility(args.visibility),
        trial_count=args.trials,
        master_seed=args.seed,
        block_bits=_block_bits(args),
        state_bits=state_bits,
        allow_compressed_output=not args.written_out,
    )
    if args.adversary == "formula":
        adversary = FormulaAdversary(args.c1, args.c2)
    else:
        budget = args.max_queries if args.max_queries is not None else 8 << (config.state_bits // 2)
        adversary = BirthdayAdversary(budget)
    outcome = run_game(config, adversary, threads=args.threads)
    if args.trials_csv:
        with open(args.trials_csv, "w") as fh:
            fh.write(TrialRecord.CSV_HEADER + "\n")
            fh.writelines(r.to_csv_row() + "\n" for r in outcome.records)
    if args.output == "json":
        return outcome.to_json(), 0
    if args.output == "csv":
        d = outcome.to_dict()
        return ",".join(d) + "\n" + ",".join(repr(v) if isinstance(v, float) else str(v) for v in d.values()), 0
    return outcome.summary(), 0


COMMANDS = {
    "rho": cmd_rho,
    "graph": cmd_graph,
    "collide": cmd_collide,
    "hash": cmd_hash,
    "stats": cmd_stats,
    "game": cmd_game,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    sub = args.subparser
    if getattr(args, "threads", 1) < 1:
        sub.error("--threads must be at least 1")
    try:
        out, code = COMMANDS[args.command](args)
    except (UsageError, ValueError, IrreducibleModulus, OSError) as exc:
        sub.print_usage(sys.stderr)
        print(f"{sub.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out + "\n")
    else:
        print(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
