"""Collision game over a keyed toy hash family.

Each trial draws a key (the toy compression seed), an adversary outputs two
messages, and the verifier compares their full digests.  Compression calls
are charged separately to the adversary and to the verifier.

Whether an adversary may hand over run-length (compressed) messages is left
open by the usual game definitions; :class:`GameConfig` makes it a flag and
the outcome always reports the written-out interpretation as well.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Optional, Union

from ._workers import parallel_map
from .bigrepeat import Explicit, Ordering, compare, total_bits
from .collide import derive_seed, formula_messages, verify_collision
from .errors import ContractViolation
from .mdcore import CallCounter, CompressedMessage, HashSpec, PaddingSpec, ToyCompression


class KeyVisibility(enum.Enum):
    KEY_GIVEN = "given"
    KEY_BLIND = "blind"


@dataclass(frozen=True)
class GameConfig:
    ell: int
    padding: PaddingSpec
    key_visibility: KeyVisibility = KeyVisibility.KEY_GIVEN
    trial_count: int = 100
    master_seed: int = 0
    block_bits: int = 32
    # width of the keyed toy compression; defaults to ell
    state_bits: Optional[int] = None
    allow_compressed_output: bool = True
    max_written_bits: int = 1 << 32

    def __post_init__(self):
        if self.trial_count < 1:
            raise ContractViolation("trial_count must be at least 1")
        if self.state_bits is None:
            if self.ell > 64:
                raise ContractViolation("ell above 64 needs an explicit toy state_bits")
            object.__setattr__(self, "state_bits", self.ell)

    def hash_for(self, key: int) -> HashSpec:
        return HashSpec(ToyCompression(key, self.state_bits, self.block_bits), self.padding)


@dataclass(frozen=True)
class FormulaAdversary:
    """Outputs ``[B]^(2^l + c (2^l)!)`` for two values of ``c``; never looks at the key."""

    c1: int = 0
    c2: int = 1

    def __post_init__(self):
        if self.c1 == self.c2:
            raise ContractViolation("formula adversary needs c1 != c2")

    def play(self, config: GameConfig, hashspec: Optional[HashSpec], counter: CallCounter):
        block = bytes(config.block_bits // 8)
        m0, m1 = formula_messages(block, config.ell, (self.c1, self.c2))
        return m0, m1


@dataclass(frozen=True)
class BirthdayAdversary:
    """Queries one-block messages until two reach the same chaining state.

    Equal-length messages share their padding, so a chaining collision is a
    full one.  Without the key it can only guess.
    """

    max_queries: int

    def play(self, config: GameConfig, hashspec: Optional[HashSpec], counter: CallCounter):
        nb = config.block_bits // 8
        if self.max_queries > 1 << config.block_bits:
            raise ContractViolation("query budget exceeds the number of distinct blocks")
        guess = (
            CompressedMessage((0).to_bytes(nb, "big"), Explicit(1)),
            CompressedMessage((1).to_bytes(nb, "big"), Explicit(1)),
        )
        if hashspec is None:
            return guess
        comp = hashspec.compression
        seen: dict[int, bytes] = {}
        for i in range(self.max_queries):
            block = i.to_bytes(nb, "big")
            state = comp.step_function(block)(hashspec.iv)
            counter.add()
            if state in seen:
                return CompressedMessage(seen[state], Explicit(1)), CompressedMessage(block, Explicit(1))
            seen[state] = block
        return guess


Adversary = Union[FormulaAdversary, BirthdayAdversary]


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    key: int
    win: bool
    written_out: bool
    rejection: Optional[str]
    adversary_calls: int
    verifier_calls: int

    CSV_HEADER = "trial,key,win,written_out,rejection,adversary_calls,verifier_calls"

    def to_csv_row(self) -> str:
        return (
            f"{self.trial},{self.key},{str(self.win).lower()},{str(self.written_out).lower()},"
            f"{self.rejection or ''},{self.adversary_calls},{self.verifier_calls}"
        )


@dataclass(frozen=True)
class GameOutcome:
    wins: int
    trials: int
    adversary_compression_calls: int
    verifier_compression_calls: int
    wins_written_out: int
    records: tuple = field(default=(), repr=False, compare=False)

    @property
    def win_rate(self) -> float:
        return self.wins / self.trials

    def to_dict(self) -> dict:
        return {
            "wins": self.wins,
            "trials": self.trials,
            "win_rate": self.win_rate,
            "adversary_compression_calls": self.adversary_compression_calls,
            "verifier_compression_calls": self.verifier_compression_calls,
            "wins_written_out": self.wins_written_out,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def summary(self) -> str:
        return (
            f"wins={self.wins}/{self.trials} win_rate={self.win_rate!r} "
            f"adversary_calls={self.adversary_compression_calls} "
            f"verifier_calls={self.verifier_compression_calls} "
            f"wins_written_out={self.wins_written_out}"
        )


def _written_out(config: GameConfig, m: CompressedMessage) -> bool:
    bits = total_bits(m.block_bits, m.repeat)
    return compare(bits, config.max_written_bits) is not Ordering.GREATER


def _play_trial(job: tuple[GameConfig, Adversary, int]) -> TrialRecord:
    config, adversary, i = job
    key = derive_seed(config.master_seed, i)
    hashspec = config.hash_for(key)
    adv_counter = CallCounter()
    visible = hashspec if config.key_visibility is KeyVisibility.KEY_GIVEN else None
    m0, m1 = adversary.play(config, visible, adv_counter)

    report = verify_collision(hashspec, m0, m1)
    distinct = not m0.denotes_same(m1)
    win = distinct and report.full_collision and report.rejection is None
    written = _written_out(config, m0) and _written_out(config, m1)
    if not config.allow_compressed_output:
        win = win and written
    return TrialRecord(i, key, win, written, report.rejection, adv_counter.calls, report.compression_calls)


def run_game(config: GameConfig, adversary: Adversary, *, threads: int = 1) -> GameOutcome:
    jobs = [(config, adversary, i) for i in range(config.trial_count)]
    records = parallel_map(_play_trial, jobs, threads)
    return GameOutcome(
        wins=sum(r.win for r in records),
        trials=config.trial_count,
        adversary_compression_calls=sum(r.adversary_calls for r in records),
        verifier_compression_calls=sum(r.verifier_calls for r in records),
        wins_written_out=sum(r.win and r.written_out for r in records),
        records=tuple(records),
    )
