"""Synthesis and verification of run-length colliding messages.

All messages here have the shape ``[B]^k``.  Two of them collide on the
iterated compression exactly when their repeat counts both reach the cycle
(``k >= lam``) and agree modulo the cycle length ``mu``.  Verification
therefore never walks ``k`` steps: one recorded orbit of length
``lam + mu`` answers every ``k``, symbolic or not.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .bigrepeat import (
    Count,
    Explicit,
    FactorialForm,
    as_count,
    total_bits,
)
from .errors import ContractViolation, DomainTooLarge, InputTooLong
from .funcgraph import Orbit, iterate, rho_shape
from .mdcore import (
    MASK64,
    CallCounter,
    CompressedMessage,
    CompressionSpec,
    HashSpec,
    Padding,
    mix64,
    pad,
    toy_hash_spec,
)


#: Longest explicit run hashed by plain iteration on wide states.
DIRECT_ITERATION_LIMIT = 1 << 16
#: Widest state on which an orbit may be traced.
MAX_ORBIT_BITS = 64


def derive_seed(master_seed: int, index: int) -> int:
    """Seed of the ``index``-th sample: ``Mix64(master + index)``."""
    return mix64((master_seed + index) & MASK64)


@dataclass(frozen=True)
class CollisionReport:
    iterated_collision: bool
    full_collision: bool
    rejection: Optional[str]
    compression_calls: int

    def to_dict(self) -> dict:
        return {
            "iterated": self.iterated_collision,
            "full": self.full_collision,
            "rejection": self.rejection,
            "compression_calls": self.compression_calls,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    CSV_HEADER = "iterated,full,rejection,compression_calls"

    def to_csv_row(self) -> str:
        d = self.to_dict()
        return f"{str(d['iterated']).lower()},{str(d['full']).lower()},{d['rejection'] or ''},{d['compression_calls']}"


# --------------------------------------------------------------------------
# synthesis


def minimal_collision(
    spec: CompressionSpec, block: bytes, iv: int, counter: Optional[CallCounter] = None
) -> tuple[CompressedMessage, CompressedMessage]:
    """``([B]^lam, [B]^(lam+mu))`` for the rho shape of ``iv``."""
    shape = rho_shape(spec, block, iv, counter)
    return (
        CompressedMessage(block, Explicit(shape.lam)),
        CompressedMessage(block, Explicit(shape.rho)),
    )


def collision_family(a: Count, mu: int, block: bytes, cs: Iterable[int]) -> list[CompressedMessage]:
    a = as_count(a)
    if mu < 1:
        raise ContractViolation("mu must be positive")
    out = []
    for c in cs:
        if c < 0:
            raise ContractViolation("family indices must be non-negative")
        if isinstance(a, Explicit):
            k = Explicit(a.value + c * mu)
        else:
            k = FactorialForm(a.base + c * mu, a.coeff, a.arg)
        out.append(CompressedMessage(block, k))
    return out


def formula_messages(block: bytes, ell: int, cs: Iterable[int]) -> list[CompressedMessage]:
    """``[B]^(2^l + c * (2^l)!)`` for each ``c``; no compression is consulted."""
    if ell < 1:
        raise ContractViolation("ell must be positive")
    n = 1 << ell
    return [CompressedMessage(block, FactorialForm(n, c, n)) for c in cs]


def _ceil_scaled(numer: int, value: int) -> int:
    # ceil(numer/100 * value) in exact integer arithmetic
    return -(-numer * value // 100)


def heuristic_formula_messages(block: bytes, ell: int, cs: Iterable[int]) -> list[CompressedMessage]:
    """Smaller family sized by the expected graph-wide maxima.

    Base ``ceil(0.78 * 2^(l/2))`` and factorial argument
    ``ceil(1.74 * 2^(l/2))``.  Collisions are likely, not guaranteed.
    """
    if ell < 2 or ell % 2:
        raise ContractViolation("heuristic formula needs an even ell >= 2")
    root = 1 << (ell // 2)
    base = _ceil_scaled(78, root)
    arg = _ceil_scaled(174, root)
    return [CompressedMessage(block, FactorialForm(base, c, arg)) for c in cs]


# --------------------------------------------------------------------------
# evaluation


def fast_state(
    spec: CompressionSpec,
    block: bytes,
    iv: int,
    k: Count,
    counter: Optional[CallCounter] = None,
) -> int:
    """``f_B^k(iv)`` in ``O(lam + mu)`` compression calls for any ``k``."""
    return Orbit.trace(spec, block, iv, counter).state_at(k)


def _finish(hashspec: HashSpec, state: int, padding: Padding, counter: Optional[CallCounter]) -> int:
    comp = hashspec.compression
    tail = padding.to_bytes()
    nb = comp.block_bytes
    for off in range(0, len(tail), nb):
        state = comp.step_function(tail[off : off + nb])(state)
    if counter is not None:
        counter.add(len(tail) // nb)
    return hashspec.output(state)


def _padding_for(hashspec: HashSpec, m: CompressedMessage) -> Padding:
    if m.block_bits != hashspec.block_bits:
        raise ContractViolation(f"message block has {m.block_bits} bits, hash expects {hashspec.block_bits}")
    return pad(hashspec.padding, hashspec.block_bits, total_bits(hashspec.block_bits, m.repeat))


def full_hash(
    hashspec: HashSpec,
    m: CompressedMessage,
    counter: Optional[CallCounter] = None,
    orbit: Optional[Orbit] = None,
) -> int:
    """Digest of ``[B]^k`` without materializing it.

    The padding (and with it the strict length check) is settled before
    any compression work.  ``orbit`` may supply an already traced walk
    from the IV under ``m.block``.  Short explicit counts are simply
    iterated on states too wide for cycle detection, such as MD5.
    """
    padding = _padding_for(hashspec, m)
    orbits = {} if orbit is None else {m.block: orbit}
    return _finish(hashspec, _chain_state(hashspec, m, orbits, counter), padding, counter)


def _chain_state(hashspec: HashSpec, m: CompressedMessage, orbits: dict, counter: Optional[CallCounter]) -> int:
    comp = hashspec.compression
    if m.block in orbits:
        return orbits[m.block].state_at(m.repeat)
    if comp.state_bits <= MAX_ORBIT_BITS:
        orbits[m.block] = Orbit.trace(comp, m.block, hashspec.iv, counter)
        return orbits[m.block].state_at(m.repeat)
    # wide states: only short explicit runs can be evaluated
    if isinstance(m.repeat, Explicit) and m.repeat.value <= DIRECT_ITERATION_LIMIT:
        return iterate(comp, m.block, hashspec.iv, m.repeat.value, counter)
    raise DomainTooLarge(f"cycle detection on {comp.state_bits}-bit states is out of reach")


def _triple(k):
    return as_count(k)._triple()


def certifies_iterated(m0: CompressedMessage, m1: CompressedMessage, domain_size: int) -> bool:
    """Decide iterated equality from the counts alone, when possible.

    Holds when both counts share a base of at least ``N - 1`` (every tail is
    shorter) and every factorial argument is at least ``N`` (every cycle
    length divides it).  False means "not provable this way".
    """
    if m0.block != m1.block:
        return False
    if m0.denotes_same(m1):
        return True
    b0, c0, a0 = _triple(m0.repeat)
    b1, c1, a1 = _triple(m1.repeat)
    if b0 != b1 or b0 < domain_size - 1:
        return False
    return all(a >= domain_size for a, c in ((a0, c0), (a1, c1)) if c)


def verify_collision(
    hashspec: HashSpec,
    m0: CompressedMessage,
    m1: CompressedMessage,
    *,
    symbolic: bool = False,
) -> CollisionReport:
    """Check both collision notions for a pair of run-length messages.

    With ``symbolic=True`` a pair that :func:`certifies_iterated` accepts is
    judged without compression calls: equal chaining states plus identical
    padding imply equal digests.  That is the only route that scales to
    128-bit states.
    """
    counter = CallCounter()
    rejection = None
    paddings = []
    for m in (m0, m1):
        try:
            paddings.append(_padding_for(hashspec, m))
        except InputTooLong:
            rejection = "InputTooLong"

    comp = hashspec.compression
    if symbolic and certifies_iterated(m0, m1, comp.domain_size):
        full = rejection is None and paddings[0] == paddings[1]
        return CollisionReport(True, full, rejection, counter.calls)

    orbits: dict[bytes, Orbit] = {}
    states = [_chain_state(hashspec, m, orbits, counter) for m in (m0, m1)]
    iterated = states[0] == states[1]

    if rejection is not None:
        return CollisionReport(iterated, False, rejection, counter.calls)
    digests = [_finish(hashspec, s, p, counter) for s, p in zip(states, paddings)]
    return CollisionReport(iterated, digests[0] == digests[1], None, counter.calls)


def heuristic_success_rate(
    ell: int,
    trials: int,
    master_seed: int = 0,
    *,
    cs: Sequence[int] = (0, 1),
    block_bits: int = 32,
    length_bits: int = 16,
) -> tuple[int, int]:
    """Count full collisions of the heuristic family over random toy keys.

    Returns ``(successes, trials)``.  A trial succeeds when every pair of
    the emitted messages collides on the full digest.
    """
    block = bytes(block_bits // 8)
    msgs = heuristic_formula_messages(block, ell, cs)
    wins = 0
    for i in range(trials):
        spec = toy_hash_spec(derive_seed(master_seed, i), ell, block_bits=block_bits, length_bits=length_bits)
        orbit = Orbit.trace(spec.compression, block, spec.iv)
        digests = {full_hash(spec, m, orbit=orbit) for m in msgs}
        wins += len(digests) == 1
    return wins, trials
