"""Exact repeat counts that may be far too large to materialize.

A repeat count is either an explicit non-negative integer or the symbolic
form ``base + coeff * arg!``.  Only the arithmetic the collision pipeline
needs is provided: reduction modulo an integer, ordering against an integer,
scaling by the block size, and semantic equality.
"""

from __future__ import annotations

import enum
import json
import math
from typing import Union

from .errors import ContractViolation, IrreducibleModulus

#: Largest factorial argument whose residue is computed by explicit product.
FACTORIAL_RESIDUE_LIMIT = 10**6


class Ordering(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def _sign(x: int) -> Ordering:
    return Ordering((x > 0) - (x < 0))


def _check_nonneg(name: str, value: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ContractViolation(f"{name} must be an int, got {type(value).__name__}")
    if value < 0:
        raise ContractViolation(f"{name} must be non-negative, got {value}")
    return value


class RepeatCount:
    """Base class for :class:`Explicit` and :class:`FactorialForm`.

    Equality is semantic: two counts are equal when they denote the same
    integer, whatever their form.  Counts are unhashable because a hash
    consistent with that equality would need the denoted value.
    """

    __slots__ = ()
    __hash__ = None  # type: ignore[assignment]

    # (base, coeff, arg) with coeff == 0 for explicit values
    def _triple(self) -> tuple[int, int, int]:
        raise NotImplementedError

    @property
    def is_symbolic(self) -> bool:
        return self._triple()[1] != 0

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int) and not isinstance(other, bool):
            other = Explicit(other) if other >= 0 else None
        if not isinstance(other, RepeatCount):
            return NotImplemented
        return compare_counts(self, other) is Ordering.EQUAL

    def to_dict(self) -> dict[str, str]:
        raise NotImplementedError

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @staticmethod
    def from_dict(data: dict) -> "RepeatCount":
        form = data.get("form")
        try:
            if form == "explicit":
                return Explicit(int(data["base"]))
            if form == "factorial":
                return FactorialForm(int(data["base"]), int(data["coeff"]), int(data["arg"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ContractViolation(f"malformed repeat count: {data!r}") from exc
        raise ContractViolation(f"unknown repeat form {form!r}")


class Explicit(RepeatCount):
    __slots__ = ("value",)

    def __init__(self, value: int):
        object.__setattr__(self, "value", _check_nonneg("value", value))

    def __setattr__(self, name, value):
        raise AttributeError("RepeatCount is immutable")

    def _triple(self):
        return (self.value, 0, 1)

    def __repr__(self):
        return f"Explicit({self.value})"

    def to_dict(self):
        return {"form": "explicit", "base": str(self.value), "coeff": "0", "arg": "1"}


class FactorialForm(RepeatCount):
    """The count ``base + coeff * arg!``, kept symbolic."""

    __slots__ = ("base", "coeff", "arg")

    def __init__(self, base: int, coeff: int, arg: int):
        _check_nonneg("base", base)
        _check_nonneg("coeff", coeff)
        _check_nonneg("arg", arg)
        if arg < 1:
            raise ContractViolation("factorial argument must be positive")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "coeff", coeff)
        object.__setattr__(self, "arg", arg)

    def __setattr__(self, name, value):
        raise AttributeError("RepeatCount is immutable")

    def _triple(self):
        return (self.base, self.coeff, self.arg)

    def __repr__(self):
        return f"FactorialForm(base={self.base}, coeff={self.coeff}, arg={self.arg})"

    def to_dict(self):
        return {
            "form": "factorial",
            "base": str(self.base),
            "coeff": str(self.coeff),
            "arg": str(self.arg),
        }


Count = Union[RepeatCount, int]


def as_count(k: Count) -> RepeatCount:
    if isinstance(k, RepeatCount):
        return k
    return Explicit(k)


def _cmp_scaled_factorial(coeff: int, arg: int, t: int) -> Ordering:
    """Order ``coeff * arg!`` against ``t`` without building huge factorials."""
    if t < 0:
        return Ordering.GREATER
    if coeff == 0:
        return _sign(-t)
    # arg! > (arg//2)**(arg//2) >= 2**(h*floor(log2 h)), so a big enough half
    # argument settles the comparison outright.
    h = arg // 2
    if h >= 1 and h * (h.bit_length() - 1) >= t.bit_length():
        return Ordering.GREATER
    prod = coeff
    for i in range(2, arg + 1):
        prod *= i
        if prod > t:
            return Ordering.GREATER
    return _sign(prod - t)


def compare(k: Count, threshold: int) -> Ordering:
    """Exact ordering of the value denoted by ``k`` against ``threshold``."""
    base, coeff, arg = as_count(k)._triple()
    return _cmp_scaled_factorial(coeff, arg, threshold - base)


def compare_counts(x: Count, y: Count) -> Ordering:
    """Exact ordering between two repeat counts of any form."""
    b1, c1, a1 = as_count(x)._triple()
    b2, c2, a2 = as_count(y)._triple()
    if c2 == 0:
        return compare(as_count(x), b2)
    if c1 == 0:
        return Ordering(-compare(as_count(y), b1))
    if a1 > a2:
        return Ordering(-compare_counts(y, x))

    # x - y = d - a1! * (c2 * P - c1) with P = (a1+1) * ... * a2
    d = b1 - b2
    p = 1
    for i in range(a1 + 1, a2 + 1):
        p *= i
        if c2 * p - c1 > abs(d):
            return Ordering.LESS
    gap = c2 * p - c1
    if gap == 0:
        return _sign(d)
    if gap > 0:
        return Ordering(-_cmp_scaled_factorial(gap, a1, d))
    return _cmp_scaled_factorial(-gap, a1, -d)


def reduce_mod(k: Count, m: int) -> int:
    """Exact residue of the denoted value modulo ``m``.

    The factorial term vanishes whenever ``m <= arg``.  Otherwise the residue
    of ``arg!`` is built by explicit product, which is only attempted for
    ``arg <= FACTORIAL_RESIDUE_LIMIT``.
    """
    if isinstance(m, bool) or not isinstance(m, int) or m < 1:
        raise ContractViolation(f"modulus must be a positive int, got {m!r}")
    base, coeff, arg = as_count(k)._triple()
    residue = base % m
    if coeff % m == 0 or m <= arg:
        return residue
    if arg > FACTORIAL_RESIDUE_LIMIT:
        raise IrreducibleModulus(
            f"{arg}! mod {m} needs an explicit product beyond {FACTORIAL_RESIDUE_LIMIT} terms"
        )
    f = 1
    for i in range(2, arg + 1):
        f = f * i % m
        if f == 0:
            break
    return (residue + coeff * f) % m


def total_bits(b: int, k: Count) -> RepeatCount:
    """The count ``b * k``, preserving the form of ``k``."""
    if isinstance(b, bool) or not isinstance(b, int) or b < 1:
        raise ContractViolation(f"block size must be a positive int, got {b!r}")
    k = as_count(k)
    if isinstance(k, Explicit):
        return Explicit(b * k.value)
    return FactorialForm(b * k.base, b * k.coeff, k.arg)


def bit_length_bounds(ell: int) -> tuple[int, int]:
    """Base-2 logarithms of the bounds ``(2^(l-1))^(2^(l-1)) < (2^l)! < (2^l)^(2^l)``."""
    if isinstance(ell, bool) or not isinstance(ell, int) or ell < 1:
        raise ContractViolation(f"ell must be a positive int, got {ell!r}")
    return (ell - 1) << (ell - 1), ell << ell


def materialize(k: Count, max_arg: int = 10_000) -> int:
    """Denoted value as a plain int; refuses factorials above ``max_arg``."""
    base, coeff, arg = as_count(k)._triple()
    if coeff == 0:
        return base
    if arg > max_arg:
        raise ContractViolation(f"refusing to materialize {arg}!")
    return base + coeff * math.factorial(arg)
