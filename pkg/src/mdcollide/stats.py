"""Random-mapping statistics, measured against their asymptotic expectations.

Two experiments:

* node statistics -- mean tail, cycle and rho length of a uniformly chosen
  start node, against ``sqrt(pi N / 8)`` and ``sqrt(pi N / 2)``;
* graph statistics -- mean cyclic-node count and mean graph-wide maxima,
  against ``sqrt(pi N / 2)`` and ``0.78, 1.74, 2.41 * sqrt(N)``.

Every sample derives its randomness from ``Mix64(master_seed + i)``, and
sums are exact integers, so results do not depend on worker count.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import asdict, dataclass, fields

from ._workers import parallel_map
from .collide import derive_seed
from .errors import ContractViolation, DomainTooLarge
from .funcgraph import graph_summary, rho_shape_of
from .mdcore import GOLDEN, MASK64, TableCompression, ToyCompression, mix64

MAPPINGS = ("toy", "table")
MAX_GRAPH_STATS_BITS = 16

TAIL_CONST = 0.78
CYCLE_CONST = 1.74
RHO_CONST = 2.41


def expected_node_stats(n: int) -> tuple[float, float, float]:
    """Asymptotic mean tail, cycle and rho length for ``n`` nodes."""
    if n < 1:
        raise ContractViolation("N must be positive")
    lam = math.sqrt(math.pi * n / 8)
    return lam, lam, 2 * lam


def expected_graph_stats(n: int) -> tuple[float, float, float, float]:
    """Asymptotic cyclic count and max tail / cycle / rho for ``n`` nodes."""
    root = math.sqrt(n)
    return math.sqrt(math.pi * n / 2), TAIL_CONST * root, CYCLE_CONST * root, RHO_CONST * root


def _rel(measured: float, expected: float) -> float:
    return (measured - expected) / expected


def _splitmix_stream(seed: int):
    s = seed
    while True:
        s = (s + GOLDEN) & MASK64
        yield mix64(s)


class _LazyUniformMap:
    """A uniform random mapping, drawn on first visit to each node."""

    def __init__(self, n: int, seed: int):
        self._n = n
        self._rng = random.Random(seed)
        self._memo: dict[int, int] = {}

    def __call__(self, x: int) -> int:
        y = self._memo.get(x)
        if y is None:
            y = self._memo[x] = self._rng.randrange(self._n)
        return y


class _CsvReport:
    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def csv_header(cls) -> str:
        return ",".join(f.name for f in fields(cls))

    def to_csv_row(self) -> str:
        return ",".join(repr(v) for v in asdict(self).values())


@dataclass(frozen=True)
class NodeStatsReport(_CsvReport):
    N: int
    sample_count: int
    mean_lambda: float
    mean_mu: float
    mean_rho: float
    expected_lambda: float
    expected_mu: float
    expected_rho: float
    rel_err_lambda: float
    rel_err_mu: float
    rel_err_rho: float


@dataclass(frozen=True)
class GraphStatsReport(_CsvReport):
    N: int
    trial_count: int
    mean_cyclic: float
    mean_max_tail: float
    mean_max_cycle: float
    mean_max_rho: float
    expected_cyclic: float
    expected_max_tail: float
    expected_max_cycle: float
    expected_max_rho: float
    rel_err_cyclic: float
    rel_err_max_tail: float
    rel_err_max_cycle: float
    rel_err_max_rho: float


def _node_sample(args: tuple[int, int, str]) -> tuple[int, int]:
    ell, seed, mapping = args
    stream = _splitmix_stream(seed)
    key = next(stream)
    start = next(stream) & ((1 << ell) - 1)
    if mapping == "toy":
        f = ToyCompression(key, ell).step_function(bytes(4))
    else:
        f = _LazyUniformMap(1 << ell, key)
    shape = rho_shape_of(f, start)
    return shape.lam, shape.mu


def _check_mapping(mapping: str) -> None:
    if mapping not in MAPPINGS:
        raise ContractViolation(f"mapping must be one of {MAPPINGS}")


def sample_node_stats(
    ell: int,
    sample_count: int,
    master_seed: int = 0,
    *,
    mapping: str = "toy",
    threads: int = 1,
) -> NodeStatsReport:
    """Monte Carlo means of tail/cycle/rho over random keys and start nodes."""
    if sample_count < 1:
        raise ContractViolation("sample_count must be at least 1")
    if not 1 <= ell <= 64:
        raise ContractViolation("ell must lie in [1, 64]")
    _check_mapping(mapping)
    jobs = [(ell, derive_seed(master_seed, i), mapping) for i in range(sample_count)]
    shapes = parallel_map(_node_sample, jobs, threads)
    n = 1 << ell
    mean_lam = sum(s[0] for s in shapes) / sample_count
    mean_mu = sum(s[1] for s in shapes) / sample_count
    mean_rho = mean_lam + mean_mu
    e_lam, e_mu, e_rho = expected_node_stats(n)
    return NodeStatsReport(
        n, sample_count, mean_lam, mean_mu, mean_rho, e_lam, e_mu, e_rho,
        _rel(mean_lam, e_lam), _rel(mean_mu, e_mu), _rel(mean_rho, e_rho),
    )


def _graph_trial(args: tuple[int, int, str]) -> tuple[int, int, int, int]:
    ell, seed, mapping = args
    if mapping == "toy":
        spec = ToyCompression(seed, ell)
    else:
        rng = random.Random(seed)
        n = 1 << ell
        spec = TableCompression([rng.randrange(n) for _ in range(n)])
    s = graph_summary(spec)
    return s.cyclic_node_count, s.max_tail, s.max_cycle, s.max_rho


def sample_graph_stats(
    ell: int,
    trial_count: int,
    master_seed: int = 0,
    *,
    mapping: str = "toy",
    threads: int = 1,
) -> GraphStatsReport:
    """Average exhaustive graph summaries over independent random maps."""
    if trial_count < 1:
        raise ContractViolation("trial_count must be at least 1")
    if ell > MAX_GRAPH_STATS_BITS:
        raise DomainTooLarge(f"graph statistics limited to ell <= {MAX_GRAPH_STATS_BITS}")
    if ell < 1:
        raise ContractViolation("ell must be positive")
    _check_mapping(mapping)
    jobs = [(ell, derive_seed(master_seed, i), mapping) for i in range(trial_count)]
    rows = parallel_map(_graph_trial, jobs, threads)
    means = [sum(col) / trial_count for col in zip(*rows)]
    n = 1 << ell
    expected = expected_graph_stats(n)
    return GraphStatsReport(
        n, trial_count, *means, *expected, *(_rel(m, e) for m, e in zip(means, expected))
    )
