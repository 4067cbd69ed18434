"""Generic Merkle-Damgard engine.

Compression functions map a ``b``-bit block and an ``l``-bit chaining state
to a new ``l``-bit state.  Three kinds are provided:

* :class:`ToyCompression` -- a seeded 64-bit mixer truncated to ``l`` bits,
  standing in for a random mapping at desk scale;
* :class:`MD5Compression` -- the real RFC 1321 block function;
* :class:`TableCompression` -- an explicit self-map that ignores the block,
  used for hand-built functional graphs.

States are plain ints.  For MD5 the 128-bit state packs the words A, B, C, D
little-endian first, so ``state.to_bytes(16, "little")`` is the usual digest.
"""

from __future__ import annotations

import enum
import json
import math
import struct
from dataclasses import dataclass, field
from typing import Callable, Optional

from .bigrepeat import (
    Count,
    Explicit,
    FactorialForm,
    Ordering,
    RepeatCount,
    as_count,
    compare,
    compare_counts,
    materialize,
    reduce_mod,
)
from .errors import ContractViolation, InputTooLong

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX_C1 = 0xBF58476D1CE4E5B9
_MIX_C2 = 0x94D049BB133111EB

StepFunction = Callable[[int], int]


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a 64-bit word."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX_C1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX_C2) & MASK64
    return z ^ (z >> 31)


def fold_block(block: bytes) -> int:
    """XOR-fold a block into 64 bits, 8-byte little-endian lanes."""
    acc = 0
    for i in range(0, len(block), 8):
        acc ^= int.from_bytes(block[i : i + 8], "little")
    return acc


class CallCounter:
    """Per-invocation tally of compression-function evaluations."""

    __slots__ = ("calls",)

    def __init__(self) -> None:
        self.calls = 0

    def add(self, n: int = 1) -> None:
        self.calls += n

    def __repr__(self):
        return f"CallCounter(calls={self.calls})"


def _tally(counter: Optional[CallCounter], n: int) -> None:
    if counter is not None:
        counter.calls += n


# --------------------------------------------------------------------------
# compression functions


@dataclass(frozen=True)
class CompressionSpec:
    block_bits: int
    state_bits: int

    def __post_init__(self):
        if self.block_bits <= 0 or self.block_bits % 8:
            raise ContractViolation(f"block_bits must be a positive multiple of 8, got {self.block_bits}")
        if self.state_bits <= 0:
            raise ContractViolation(f"state_bits must be positive, got {self.state_bits}")

    @property
    def block_bytes(self) -> int:
        return self.block_bits // 8

    @property
    def domain_size(self) -> int:
        return 1 << self.state_bits

    def step_function(self, block: bytes) -> StepFunction:
        """The self-map ``f_B`` on states, without argument checks."""
        raise NotImplementedError

    def check_block(self, block: bytes) -> bytes:
        if not isinstance(block, (bytes, bytearray)):
            raise ContractViolation("block must be bytes")
        if len(block) * 8 != self.block_bits:
            raise ContractViolation(f"block has {len(block) * 8} bits, spec expects {self.block_bits}")
        return bytes(block)

    def check_state(self, state: int) -> int:
        if isinstance(state, bool) or not isinstance(state, int):
            raise ContractViolation("state must be an int")
        if not 0 <= state < self.domain_size:
            raise ContractViolation(f"state {state} outside [0, {self.domain_size})")
        return state


@dataclass(frozen=True)
class ToyCompression(CompressionSpec):
    """``low_l(Mix64(Mix64(seed ^ fold(B)) ^ state ^ GOLDEN))``."""

    seed: int = 0

    def __init__(self, seed: int, state_bits: int, block_bits: int = 32):
        object.__setattr__(self, "seed", seed & MASK64)
        object.__setattr__(self, "state_bits", state_bits)
        object.__setattr__(self, "block_bits", block_bits)
        self.__post_init__()
        if state_bits > 64:
            raise ContractViolation("toy compression supports at most 64 state bits")

    def step_function(self, block: bytes) -> StepFunction:
        key = mix64(self.seed ^ fold_block(block)) ^ GOLDEN
        mask = (1 << self.state_bits) - 1
        m64, c1, c2 = MASK64, _MIX_C1, _MIX_C2

        def f(x: int) -> int:
            z = key ^ x
            z = ((z ^ (z >> 30)) * c1) & m64
            z = ((z ^ (z >> 27)) * c2) & m64
            return (z ^ (z >> 31)) & mask

        return f


@dataclass(frozen=True)
class TableCompression(CompressionSpec):
    """Explicit self-map: ``f(x) = table[x]`` for every block."""

    table: tuple = ()

    def __init__(self, table, block_bits: int = 32):
        table = tuple(int(v) for v in table)
        n = len(table)
        if n == 0:
            raise ContractViolation("table must be non-empty")
        if any(not 0 <= v < n for v in table):
            raise ContractViolation("table entries must lie in [0, len(table))")
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "state_bits", max(1, (n - 1).bit_length()))
        object.__setattr__(self, "block_bits", block_bits)
        self.__post_init__()

    @property
    def domain_size(self) -> int:
        return len(self.table)

    def step_function(self, block: bytes) -> StepFunction:
        return self.table.__getitem__


_MD5_SHIFTS = [7, 12, 17, 22] * 4 + [5, 9, 14, 20] * 4 + [4, 11, 16, 23] * 4 + [6, 10, 15, 21] * 4
_MD5_K = [int(abs(math.sin(i + 1)) * 2**32) & 0xFFFFFFFF for i in range(64)]
_MD5_INDEX = (
    list(range(16))
    + [(5 * i + 1) % 16 for i in range(16)]
    + [(3 * i + 5) % 16 for i in range(16)]
    + [(7 * i) % 16 for i in range(16)]
)

MD5_IV = 0x67452301 | 0xEFCDAB89 << 32 | 0x98BADCFE << 64 | 0x10325476 << 96


def md5_compress(state: int, block: bytes) -> int:
    """One RFC 1321 compression of a 64-byte block."""
    m32 = 0xFFFFFFFF
    words = struct.unpack("<16I", block)
    a0, b0, c0, d0 = (state >> s & m32 for s in (0, 32, 64, 96))
    a, b, c, d = a0, b0, c0, d0
    for i in range(64):
        if i < 16:
            f = (b & c) | (~b & d)
        elif i < 32:
            f = (d & b) | (~d & c)
        elif i < 48:
            f = b ^ c ^ d
        else:
            f = c ^ (b | (~d & m32))
        f = (f + a + _MD5_K[i] + words[_MD5_INDEX[i]]) & m32
        s = _MD5_SHIFTS[i]
        a, d, c = d, c, b
        b = (b + ((f << s | f >> (32 - s)) & m32)) & m32
    return (
        (a0 + a) & m32
        | ((b0 + b) & m32) << 32
        | ((c0 + c) & m32) << 64
        | ((d0 + d) & m32) << 96
    )


@dataclass(frozen=True)
class MD5Compression(CompressionSpec):
    def __init__(self):
        object.__setattr__(self, "block_bits", 512)
        object.__setattr__(self, "state_bits", 128)

    def step_function(self, block: bytes) -> StepFunction:
        return lambda x: md5_compress(x, block)


def compress(spec: CompressionSpec, state: int, block: bytes, counter: Optional[CallCounter] = None) -> int:
    block = spec.check_block(block)
    state = spec.check_state(state)
    _tally(counter, 1)
    return spec.step_function(block)(state)


# --------------------------------------------------------------------------
# padding


class PaddingMode(enum.Enum):
    TRUNCATING = "trunc"
    STRICT = "strict"


class Endian(enum.Enum):
    BIG = "big"
    LITTLE = "little"


@dataclass(frozen=True)
class PaddingSpec:
    length_bits: int
    mode: PaddingMode = PaddingMode.TRUNCATING
    endian: Endian = Endian.BIG

    def __post_init__(self):
        if self.length_bits <= 0:
            raise ContractViolation("length field must have positive width")
        if self.endian is Endian.LITTLE and self.length_bits % 8:
            raise ContractViolation("little-endian length field needs a whole number of bytes")

    @classmethod
    def parse(cls, text: str) -> "PaddingSpec":
        """Parse ``trunc:L`` or ``strict:L`` (optionally ``:le``)."""
        parts = text.split(":")
        if len(parts) not in (2, 3):
            raise ValueError(f"bad padding spec {text!r}")
        mode = PaddingMode(parts[0])
        endian = Endian.LITTLE if len(parts) == 3 and parts[2] == "le" else Endian.BIG
        if len(parts) == 3 and parts[2] not in ("le", "be"):
            raise ValueError(f"bad endianness in {text!r}")
        return cls(int(parts[1]), mode, endian)


@dataclass(frozen=True)
class Padding:
    """Padding bits, most significant first, as an int of width ``nbits``."""

    nbits: int
    value: int

    def to_bytes(self) -> bytes:
        if self.nbits % 8:
            raise ContractViolation("padding is not byte aligned")
        return self.value.to_bytes(self.nbits // 8, "big")

    def bits(self) -> str:
        return format(self.value, f"0{self.nbits}b") if self.nbits else ""


def pad(padding: PaddingSpec, block_bits: int, message_bit_length: Count) -> Padding:
    """Padding for a message of the given bit length.

    A ``1`` bit, the fewest zeros reaching ``b - L (mod b)``, then the
    length modulo ``2**L``.  Strict mode refuses lengths of ``2**L`` or more
    before doing anything else.
    """
    L = padding.length_bits
    if L > block_bits - 1:
        raise ContractViolation(f"length field of {L} bits does not fit a {block_bits}-bit block")
    length = as_count(message_bit_length)
    if padding.mode is PaddingMode.STRICT and compare(length, 1 << L) is not Ordering.LESS:
        raise InputTooLong(f"message of at least 2**{L} bits")
    zeros = (block_bits - L - 1 - reduce_mod(length, block_bits)) % block_bits
    field_value = reduce_mod(length, 1 << L)
    if padding.endian is Endian.LITTLE:
        field_value = int.from_bytes(field_value.to_bytes(L // 8, "little"), "big")
    return Padding(1 + zeros + L, (1 << (zeros + L)) | field_value)


# --------------------------------------------------------------------------
# hash functions


@dataclass(frozen=True)
class HashSpec:
    compression: CompressionSpec
    padding: PaddingSpec
    iv: int = 0
    output_bits: Optional[int] = None

    def __post_init__(self):
        if self.output_bits is None:
            object.__setattr__(self, "output_bits", self.compression.state_bits)
        if not 1 <= self.output_bits <= self.compression.state_bits:
            raise ContractViolation("output_bits must lie in [1, state_bits]")
        self.compression.check_state(self.iv)
        if self.padding.length_bits > self.compression.block_bits - 1:
            raise ContractViolation("length field wider than block allows")

    @property
    def block_bits(self) -> int:
        return self.compression.block_bits

    def output(self, state: int) -> int:
        return state & ((1 << self.output_bits) - 1)

    def render(self, value: int) -> str:
        """Lowercase hex; MD5 uses its little-endian byte order."""
        nbytes = (self.output_bits + 7) // 8
        order = "little" if isinstance(self.compression, MD5Compression) else "big"
        return value.to_bytes(nbytes, order).hex()


def toy_hash_spec(
    seed: int,
    state_bits: int,
    *,
    block_bits: int = 32,
    length_bits: int = 16,
    mode: PaddingMode = PaddingMode.TRUNCATING,
    endian: Endian = Endian.BIG,
    iv: int = 0,
    output_bits: Optional[int] = None,
) -> HashSpec:
    return HashSpec(
        ToyCompression(seed, state_bits, block_bits),
        PaddingSpec(length_bits, mode, endian),
        iv,
        output_bits,
    )


def md5_hash_spec() -> HashSpec:
    return HashSpec(MD5Compression(), PaddingSpec(64, PaddingMode.TRUNCATING, Endian.LITTLE), MD5_IV)


def digest(spec: HashSpec, message: bytes, counter: Optional[CallCounter] = None) -> int:
    """Hash an explicit byte string: pad, iterate from the IV, truncate."""
    padded = bytes(message) + pad(spec.padding, spec.block_bits, 8 * len(message)).to_bytes()
    comp = spec.compression
    nb = comp.block_bytes
    state = spec.iv
    for off in range(0, len(padded), nb):
        state = comp.step_function(padded[off : off + nb])(state)
    _tally(counter, len(padded) // nb)
    return spec.output(state)


# --------------------------------------------------------------------------
# run-length messages


@dataclass(frozen=True)
class CompressedMessage:
    """The message ``[B]^k``: one block repeated ``k`` times."""

    block: bytes
    repeat: RepeatCount = field(default_factory=lambda: Explicit(0))

    def __post_init__(self):
        object.__setattr__(self, "block", bytes(self.block))
        object.__setattr__(self, "repeat", as_count(self.repeat))
        if not self.block:
            raise ContractViolation("block must be non-empty")

    __hash__ = None  # type: ignore[assignment]

    @property
    def block_bits(self) -> int:
        return 8 * len(self.block)

    def is_empty(self) -> bool:
        return compare(self.repeat, 0) is Ordering.EQUAL

    def denotes_same(self, other: "CompressedMessage") -> bool:
        """True when both denote the same bit string."""
        if self.is_empty() and other.is_empty():
            return True
        return self.block == other.block and compare_counts(self.repeat, other.repeat) is Ordering.EQUAL

    def materialize(self, max_bytes: int = 1 << 24) -> bytes:
        if compare(self.repeat, max_bytes // len(self.block)) is Ordering.GREATER:
            raise ContractViolation("message too long to materialize")
        return self.block * materialize(self.repeat)

    def to_dict(self) -> dict:
        return {"block_hex": self.block.hex(), "repeat": self.repeat.to_dict()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict) -> "CompressedMessage":
        try:
            block = bytes.fromhex(data["block_hex"])
            repeat = RepeatCount.from_dict(data["repeat"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ContractViolation(f"malformed compressed message: {exc}") from exc
        return cls(block, repeat)

    @classmethod
    def from_json(cls, text: str) -> "CompressedMessage":
        return cls.from_dict(json.loads(text))

    def to_bytes(self) -> bytes:
        """Compact wire form: a form byte, then the block, base, coeff and
        arg, each as a 2-byte big-endian length followed by its bytes."""
        symbolic = isinstance(self.repeat, FactorialForm)
        parts = [self.block] + [
            n.to_bytes((n.bit_length() + 7) // 8, "big") for n in self.repeat._triple()
        ]
        if any(len(p) > 0xFFFF for p in parts):
            raise ContractViolation("field too wide for the compact wire form")
        return bytes([symbolic]) + b"".join(struct.pack(">H", len(p)) + p for p in parts)

    @classmethod
    def from_bytes(cls, data: bytes) -> "CompressedMessage":
        if not data or data[0] > 1:
            raise ContractViolation("malformed compressed message")
        parts, off = [], 1
        for _ in range(4):
            if off + 2 > len(data):
                raise ContractViolation("truncated compressed message")
            (n,) = struct.unpack_from(">H", data, off)
            parts.append(data[off + 2 : off + 2 + n])
            off += 2 + n
        if off != len(data):
            raise ContractViolation("malformed compressed message")
        base, coeff, arg = (int.from_bytes(p, "big") for p in parts[1:])
        repeat = FactorialForm(base, coeff, arg) if data[0] else Explicit(base)
        return cls(parts[0], repeat)
