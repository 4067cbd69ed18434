import json
import random
from itertools import combinations

import pytest

from mdcollide import collide
from mdcollide.bigrepeat import Explicit, FactorialForm, reduce_mod
from mdcollide.collide import (
    CollisionReport,
    certifies_iterated,
    collision_family,
    derive_seed,
    fast_state,
    formula_messages,
    full_hash,
    heuristic_formula_messages,
    heuristic_success_rate,
    minimal_collision,
    verify_collision,
)
from mdcollide.errors import ContractViolation, DomainTooLarge
from mdcollide.funcgraph import iterate, rho_shape
from mdcollide.mdcore import (
    CallCounter,
    CompressedMessage,
    HashSpec,
    PaddingMode,
    PaddingSpec,
    TableCompression,
    ToyCompression,
    digest,
    md5_hash_spec,
    mix64,
    toy_hash_spec,
)

from conftest import EIGHT_NODE, naive_trajectory, walk_rho

ZERO = bytes(4)


class TestSynthesis:
    def test_minimal_on_eight_node(self):
        m0, m1 = minimal_collision(TableCompression(EIGHT_NODE), ZERO, 0)
        assert m0.repeat == Explicit(1) and m1.repeat == Explicit(4)

    def test_minimal_on_identity(self):
        m0, m1 = minimal_collision(TableCompression(range(4)), ZERO, 2)
        assert (m0.repeat, m1.repeat) == (Explicit(0), Explicit(1))

    def test_family(self):
        fam = collision_family(Explicit(1), 3, ZERO, [0, 1, 2])
        assert [m.repeat for m in fam] == [Explicit(1), Explicit(4), Explicit(7)]
        sym = collision_family(FactorialForm(10, 1, 5), 4, ZERO, [2])[0].repeat
        assert (sym.base, sym.coeff, sym.arg) == (18, 1, 5)
        with pytest.raises(ContractViolation):
            collision_family(Explicit(1), 0, ZERO, [0])

    def test_formula_values(self):
        msgs = formula_messages(ZERO, 8, [0, 1, 5])
        assert [(m.repeat.base, m.repeat.coeff, m.repeat.arg) for m in msgs] == [
            (256, 0, 256), (256, 1, 256), (256, 5, 256),
        ]

    def test_heuristic_values(self):
        # ceil(0.78 * 64) = 50, ceil(1.74 * 64) = 112
        k = heuristic_formula_messages(ZERO, 12, [1])[0].repeat
        assert (k.base, k.arg) == (50, 112)
        k = heuristic_formula_messages(ZERO, 2, [1])[0].repeat
        assert (k.base, k.arg) == (2, 4)
        with pytest.raises(ContractViolation):
            heuristic_formula_messages(ZERO, 7, [0, 1])

    def test_formula_synthesis_makes_no_calls(self, monkeypatch):
        calls = []
        original = ToyCompression.step_function

        def spy(self, block):
            calls.append(block)
            return original(self, block)

        monkeypatch.setattr(ToyCompression, "step_function", spy)
        formula_messages(ZERO, 160, range(10))
        heuristic_formula_messages(ZERO, 160, range(10))
        assert calls == []

    def test_derive_seed(self):
        assert derive_seed(5, 3) == mix64(8)
        assert derive_seed(2**64 - 1, 1) == mix64(0)


class TestEvaluation:
    def test_fast_state_against_naive(self):
        rng = random.Random(4)
        for _ in range(20):
            spec = ToyCompression(rng.getrandbits(64), 10)
            f = spec.step_function(ZERO)
            iv = rng.randrange(1024)
            traj = naive_trajectory(f, iv, 3000)
            for k in rng.sample(range(3001), 50):
                assert fast_state(spec, ZERO, iv, k) == traj[k]

    def test_fast_state_symbolic(self):
        spec = ToyCompression(7, 8)
        lam, mu = walk_rho(spec.step_function(ZERO), 0)
        k = FactorialForm(3, 2, 40)
        # reduction oracle: k >= lam, so f^k = f^(lam + (k - lam) mod mu)
        expected = iterate(spec, ZERO, 0, lam + (reduce_mod(k, mu) - lam) % mu)
        assert fast_state(spec, ZERO, 0, k) == expected

    def test_full_hash_matches_materialized(self):
        hs = toy_hash_spec(11, 12)
        for n in range(0, 9):
            m = CompressedMessage(b"abcd", Explicit(n))
            assert full_hash(hs, m) == digest(hs, m.materialize())

    def test_full_hash_md5(self):
        hs = md5_hash_spec()
        m = CompressedMessage(b"x" * 64, Explicit(2))
        assert full_hash(hs, m) == digest(hs, b"x" * 128)

    def test_full_hash_counts_calls(self):
        hs = toy_hash_spec(3, 8)
        c = CallCounter()
        full_hash(hs, CompressedMessage(ZERO, FactorialForm(256, 1, 256)), c)
        shape = rho_shape(hs.compression, ZERO, 0)
        assert 0 < c.calls <= 4 * shape.rho + 8


class TestVerify:
    def test_identical_messages_collide(self):
        hs = toy_hash_spec(1, 8)
        m = CompressedMessage(ZERO, Explicit(3))
        r = verify_collision(hs, m, m)
        assert r.iterated_collision and r.full_collision

    def test_minimal_pair_differs_in_padding(self):
        hs = toy_hash_spec(2, 12, mode=PaddingMode.STRICT)
        m0, m1 = minimal_collision(hs.compression, ZERO, 0)
        r = verify_collision(hs, m0, m1)
        assert r.iterated_collision
        assert r.rejection is None
        # different lengths give different length fields, so the digests
        # generally differ; this is checked against the digest directly
        assert r.full_collision == (digest(hs, m0.materialize()) == digest(hs, m1.materialize()))

    @pytest.mark.parametrize("seed", range(10))
    def test_formula_pairs_fully_collide(self, seed):
        hs = toy_hash_spec(derive_seed(0, seed), 12)
        msgs = formula_messages(ZERO, 12, range(4))
        for m0, m1 in combinations(msgs, 2):
            r = verify_collision(hs, m0, m1)
            assert r.iterated_collision and r.full_collision and r.rejection is None

    def test_strict_rejection(self):
        hs = HashSpec(ToyCompression(0, 12, 512), PaddingSpec(64, PaddingMode.STRICT))
        m0, m1 = formula_messages(bytes(64), 160, [0, 1])
        r = verify_collision(hs, m0, m1, symbolic=True)
        assert r.rejection == "InputTooLong" and not r.full_collision

    def test_symbolic_md5(self):
        m0, m1 = formula_messages(bytes(64), 128, [0, 1])
        r = verify_collision(md5_hash_spec(), m0, m1, symbolic=True)
        assert r == CollisionReport(True, True, None, 0)

    @pytest.mark.parametrize("seed", range(8))
    def test_symbolic_agrees_with_computed(self, seed):
        hs = toy_hash_spec(seed, 8)
        pairs = [
            formula_messages(ZERO, 8, [0, 3]),
            [CompressedMessage(ZERO, FactorialForm(255, 1, 256)), CompressedMessage(ZERO, Explicit(255))],
        ]
        for m0, m1 in pairs:
            a = verify_collision(hs, m0, m1, symbolic=True)
            b = verify_collision(hs, m0, m1)
            assert (a.iterated_collision, a.full_collision) == (b.iterated_collision, b.full_collision)

    def test_certification_is_conservative(self):
        small = CompressedMessage(ZERO, FactorialForm(10, 1, 256))
        other = CompressedMessage(ZERO, FactorialForm(10, 2, 256))
        assert not certifies_iterated(small, other, 256)
        assert certifies_iterated(
            CompressedMessage(ZERO, FactorialForm(255, 1, 256)),
            CompressedMessage(ZERO, Explicit(255)),
            256,
        )
        assert not certifies_iterated(
            CompressedMessage(ZERO, FactorialForm(255, 1, 255)),
            CompressedMessage(ZERO, Explicit(255)),
            256,
        )

    def test_different_blocks(self):
        hs = toy_hash_spec(0, 8)
        r = verify_collision(hs, CompressedMessage(ZERO, Explicit(2)), CompressedMessage(b"abcd", Explicit(2)))
        assert r.iterated_collision == (iterate(hs.compression, ZERO, 0, 2) == iterate(hs.compression, b"abcd", 0, 2))

    def test_block_size_mismatch(self):
        with pytest.raises(ContractViolation):
            verify_collision(toy_hash_spec(0, 8), CompressedMessage(b"ab", Explicit(1)), CompressedMessage(b"ab", Explicit(2)))

    def test_report_serialization(self):
        r = CollisionReport(True, False, "InputTooLong", 17)
        assert json.loads(r.to_json()) == {
            "iterated": True, "full": False, "rejection": "InputTooLong", "compression_calls": 17,
        }
        assert r.to_csv_row() == "true,false,InputTooLong,17"
        assert CollisionReport(True, True, None, 0).to_csv_row() == "true,true,,0"


def test_heuristic_success_rate_is_reported():
    wins, trials = heuristic_success_rate(8, 200)
    assert trials == 200 and 0 <= wins <= trials
    print(f"heuristic family at ell=8: {wins}/{trials} full collisions")


def test_verify_uses_one_orbit_per_block(monkeypatch):
    traced = []
    original = collide.Orbit.trace.__func__

    def spy(cls, *a, **kw):
        traced.append(a[1])
        return original(cls, *a, **kw)

    monkeypatch.setattr(collide.Orbit, "trace", classmethod(spy))
    m0, m1 = formula_messages(ZERO, 8, [0, 1])
    verify_collision(toy_hash_spec(0, 8), m0, m1)
    assert traced == [ZERO]


def test_wide_state_limits():
    hs = md5_hash_spec()
    m0, m1 = formula_messages(bytes(64), 128, [0, 1])
    with pytest.raises(DomainTooLarge):
        full_hash(hs, m0)
    with pytest.raises(DomainTooLarge):
        verify_collision(hs, m0, m1)
    r = verify_collision(hs, CompressedMessage(b"a" * 64, Explicit(1)), CompressedMessage(b"b" * 64, Explicit(1)))
    assert r == CollisionReport(False, False, None, 4)
