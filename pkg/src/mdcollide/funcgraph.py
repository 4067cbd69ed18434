"""Functional graphs of fixed-block compressions.

Fixing the block ``B`` turns a compression into a self-map ``f_B`` on the
``2**l`` states.  Every start node walks a tail of length ``lam`` into a
cycle of length ``mu``.  This module finds those per node (Brent's method)
and, for small ``l``, summarizes the whole graph by exhaustive traversal.
"""

from __future__ import annotations

import json
from array import array
from dataclasses import dataclass
from typing import Optional

from .bigrepeat import Count, Ordering, as_count, compare, reduce_mod
from .errors import ContractViolation, DomainTooLarge
from .mdcore import CallCounter, CompressionSpec, StepFunction

#: Largest state width accepted by the exhaustive traversals.
MAX_EXHAUSTIVE_BITS = 26


def _step(spec: CompressionSpec, block: Optional[bytes]) -> StepFunction:
    if block is None:
        block = bytes(spec.block_bytes)
    return spec.step_function(spec.check_block(block))


@dataclass(frozen=True)
class RhoShape:
    lam: int
    mu: int

    CSV_HEADER = "lambda,mu,rho"

    def __post_init__(self):
        if self.lam < 0 or self.mu < 1:
            raise ContractViolation(f"invalid rho shape ({self.lam}, {self.mu})")

    @property
    def rho(self) -> int:
        return self.lam + self.mu

    def to_dict(self) -> dict:
        return {"lambda": self.lam, "mu": self.mu, "rho": self.rho}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_csv_row(self) -> str:
        return f"{self.lam},{self.mu},{self.rho}"


def iterate(
    spec: CompressionSpec,
    block: Optional[bytes],
    start: int,
    k: int,
    counter: Optional[CallCounter] = None,
) -> int:
    """Apply ``f_B`` to ``start`` exactly ``k`` times, one call per step."""
    if k < 0:
        raise ContractViolation("k must be non-negative")
    f = _step(spec, block)
    x = spec.check_state(start)
    for _ in range(k):
        x = f(x)
    if counter is not None:
        counter.add(k)
    return x


def _brent_cycle(f: StepFunction, x0: int, path: Optional[list] = None) -> tuple[int, int]:
    """Brent's first phase: return (cycle length, calls made).

    When ``path`` is given, every hare position is appended to it.
    """
    power = lam = 1
    tortoise = x0
    hare = f(x0)
    calls = 1
    if path is not None:
        path.append(hare)
    while tortoise != hare:
        if power == lam:
            tortoise = hare
            power *= 2
            lam = 0
        hare = f(hare)
        calls += 1
        lam += 1
        if path is not None:
            path.append(hare)
    return lam, calls


def rho_shape_of(f: StepFunction, x0: int, counter: Optional[CallCounter] = None) -> RhoShape:
    mu, calls = _brent_cycle(f, x0)
    # two cursors mu apart meet at the first cyclic node
    tortoise = hare = x0
    for _ in range(mu):
        hare = f(hare)
    lam = 0
    while tortoise != hare:
        tortoise = f(tortoise)
        hare = f(hare)
        lam += 1
    if counter is not None:
        counter.add(calls + mu + 2 * lam)
    return RhoShape(lam, mu)


def rho_shape(
    spec: CompressionSpec,
    block: Optional[bytes],
    start: int,
    counter: Optional[CallCounter] = None,
) -> RhoShape:
    """Exact tail and cycle length of ``start`` in constant memory."""
    return rho_shape_of(_step(spec, block), spec.check_state(start), counter)


class Orbit:
    """The recorded walk ``x_0 .. x_{lam+mu-1}`` from one start node.

    Any iterate ``f^k(x_0)`` is then a lookup, so a huge symbolic ``k``
    costs only its residue modulo ``mu``.
    """

    __slots__ = ("start", "lam", "mu", "path", "calls")

    def __init__(self, f: StepFunction, start: int):
        path = [start]
        mu, calls = _brent_cycle(f, start, path)
        lam = 0
        while path[lam] != path[lam + mu]:
            lam += 1
        del path[lam + mu :]
        self.start = start
        self.lam = lam
        self.mu = mu
        self.path = path
        self.calls = calls

    @classmethod
    def trace(
        cls,
        spec: CompressionSpec,
        block: Optional[bytes],
        start: int,
        counter: Optional[CallCounter] = None,
    ) -> "Orbit":
        orbit = cls(_step(spec, block), spec.check_state(start))
        if counter is not None:
            counter.add(orbit.calls)
        return orbit

    @property
    def shape(self) -> RhoShape:
        return RhoShape(self.lam, self.mu)

    def state_at(self, k: Count) -> int:
        k = as_count(k)
        if compare(k, self.lam) is Ordering.LESS:
            return self.path[reduce_mod(k, self.lam)]
        return self.path[self.lam + (reduce_mod(k, self.mu) - self.lam) % self.mu]


@dataclass(frozen=True)
class GraphSummary:
    node_count: int
    cyclic_node_count: int
    max_tail: int
    max_cycle: int
    max_rho: int
    component_count: int

    CSV_HEADER = "N,cyclic,max_tail,max_cycle,max_rho,components"

    def to_csv_row(self) -> str:
        return (
            f"{self.node_count},{self.cyclic_node_count},{self.max_tail},"
            f"{self.max_cycle},{self.max_rho},{self.component_count}"
        )

    def to_dict(self) -> dict:
        return {
            "N": self.node_count,
            "cyclic": self.cyclic_node_count,
            "max_tail": self.max_tail,
            "max_cycle": self.max_cycle,
            "max_rho": self.max_rho,
            "components": self.component_count,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _table(spec: CompressionSpec, block: Optional[bytes]) -> array:
    if spec.state_bits > MAX_EXHAUSTIVE_BITS:
        raise DomainTooLarge(f"exhaustive traversal limited to {MAX_EXHAUSTIVE_BITS} state bits")
    f = _step(spec, block)
    return array("q", map(f, range(spec.domain_size)))


def _traverse(t: array) -> tuple[array, array, int]:
    """Per-node tail and cycle lengths, plus the number of components."""
    n = len(t)
    tail = array("q", bytes(8 * n))
    cycle = array("q", bytes(8 * n))
    # 0 = unseen, 1 = on the current walk, 2 = finished
    color = bytearray(n)
    components = 0
    for s in range(n):
        if color[s]:
            continue
        walk = []
        x = s
        while not color[x]:
            color[x] = 1
            walk.append(x)
            x = t[x]
        if color[x] == 1:
            i = walk.index(x)
            mu = len(walk) - i
            for y in walk[i:]:
                cycle[y] = mu
                color[y] = 2
            del walk[i:]
            components += 1
        for y in reversed(walk):
            nxt = t[y]
            tail[y] = tail[nxt] + 1
            cycle[y] = cycle[nxt]
            color[y] = 2
    return tail, cycle, components


def graph_summary(spec: CompressionSpec, block: Optional[bytes] = None) -> GraphSummary:
    """Exact whole-graph statistics by visiting every node once."""
    t = _table(spec, block)
    tail, cycle, components = _traverse(t)
    return GraphSummary(
        node_count=len(t),
        cyclic_node_count=tail.tolist().count(0),
        max_tail=max(tail),
        max_cycle=max(cycle),
        max_rho=max(map(int.__add__, tail, cycle)),
        component_count=components,
    )


def cyclic_nodes(spec: CompressionSpec, block: Optional[bytes] = None) -> set[int]:
    tail, _, _ = _traverse(_table(spec, block))
    return {x for x, v in enumerate(tail) if v == 0}
