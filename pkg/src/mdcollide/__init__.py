"""Merkle-Damgard collision laboratory.

Run-length messages ``[B]^k`` with symbolic repeat counts, a generic
iterated-hash engine, functional-graph analysis, and the collision game.
"""

from .bigrepeat import (
    Explicit,
    FactorialForm,
    Ordering,
    RepeatCount,
    bit_length_bounds,
    compare,
    compare_counts,
    reduce_mod,
    total_bits,
)
from .collide import (
    CollisionReport,
    collision_family,
    derive_seed,
    fast_state,
    formula_messages,
    full_hash,
    heuristic_formula_messages,
    minimal_collision,
    verify_collision,
)
from .errors import ContractViolation, DomainTooLarge, InputTooLong, IrreducibleModulus
from .funcgraph import GraphSummary, Orbit, RhoShape, cyclic_nodes, graph_summary, iterate, rho_shape
from .mdcore import (
    CallCounter,
    CompressedMessage,
    CompressionSpec,
    Endian,
    HashSpec,
    MD5Compression,
    PaddingMode,
    PaddingSpec,
    TableCompression,
    ToyCompression,
    compress,
    digest,
    md5_hash_spec,
    pad,
    toy_hash_spec,
)

__version__ = "0.1.0"
