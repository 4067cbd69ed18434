import pytest

from mdcollide.collide import derive_seed, verify_collision
from mdcollide.errors import ContractViolation
from mdcollide.game import (
    BirthdayAdversary,
    FormulaAdversary,
    GameConfig,
    KeyVisibility,
    TrialRecord,
    run_game,
)
from mdcollide.mdcore import CallCounter, PaddingMode, PaddingSpec

TRUNC16 = PaddingSpec(16, PaddingMode.TRUNCATING)
STRICT64 = PaddingSpec(64, PaddingMode.STRICT)


def config(**kw):
    base = dict(ell=12, padding=TRUNC16, key_visibility=KeyVisibility.KEY_BLIND, trial_count=20)
    base.update(kw)
    return GameConfig(**base)


class TestFormulaAdversary:
    def test_output_ignores_key(self):
        cfg = config()
        adv = FormulaAdversary(0, 1)
        outs = {
            tuple(m.to_json() for m in adv.play(cfg, cfg.hash_for(derive_seed(0, i)), CallCounter()))
            for i in range(10)
        }
        outs.add(tuple(m.to_json() for m in adv.play(cfg, None, CallCounter())))
        assert len(outs) == 1

    def test_output_size_is_small(self):
        cfg = config(ell=160, padding=STRICT64, block_bits=512, state_bits=12)
        for m in FormulaAdversary(0, 1).play(cfg, None, CallCounter()):
            assert len(m.to_bytes()) <= 256
        # with a 32-bit block even the JSON form fits
        for m in FormulaAdversary(0, 1).play(config(ell=160, state_bits=12), None, CallCounter()):
            assert len(m.to_json().encode()) <= 256

    def test_wins_every_trial(self):
        out = run_game(config(), FormulaAdversary(0, 1))
        assert out.wins == out.trials and out.adversary_compression_calls == 0

    def test_given_and_blind_agree(self):
        a = run_game(config(key_visibility=KeyVisibility.KEY_GIVEN), FormulaAdversary(2, 5))
        b = run_game(config(key_visibility=KeyVisibility.KEY_BLIND), FormulaAdversary(2, 5))
        assert a == b

    def test_strict_padding_thwarts(self):
        cfg = config(ell=160, padding=STRICT64, block_bits=512, state_bits=12, trial_count=5)
        out = run_game(cfg, FormulaAdversary(0, 1))
        assert out.wins == 0
        assert all(r.rejection == "InputTooLong" for r in out.records)

    def test_written_out_interpretation(self):
        # the formula messages are astronomically long, so they never count as written out
        cfg = config(allow_compressed_output=False)
        out = run_game(cfg, FormulaAdversary(0, 1))
        assert out.wins == 0 and out.wins_written_out == 0
        lenient = run_game(config(), FormulaAdversary(0, 1))
        assert lenient.wins_written_out == 0

    def test_equal_coefficients_rejected(self):
        with pytest.raises(ContractViolation):
            FormulaAdversary(3, 3)


class TestBirthdayAdversary:
    def test_key_given_wins(self):
        cfg = config(ell=12, key_visibility=KeyVisibility.KEY_GIVEN, trial_count=30)
        out = run_game(cfg, BirthdayAdversary(8 << 6))
        assert out.win_rate >= 0.9
        assert out.adversary_compression_calls > 0
        # one-block messages are written out in full
        assert out.wins_written_out == out.wins

    def test_blind_guess_rarely_wins(self):
        cfg = config(ell=16, trial_count=30)
        out = run_game(cfg, BirthdayAdversary(2048))
        assert out.adversary_compression_calls == 0
        assert out.wins <= 2

    def test_budget_check(self):
        with pytest.raises(ContractViolation):
            BirthdayAdversary(2**40).play(config(), config().hash_for(1), CallCounter())


class TestHarness:
    def test_win_iff_verified_full_collision(self):
        cfg = config(ell=10, key_visibility=KeyVisibility.KEY_GIVEN, trial_count=25)
        adv = BirthdayAdversary(40)
        out = run_game(cfg, adv)
        for rec in out.records:
            hs = cfg.hash_for(rec.key)
            m0, m1 = adv.play(cfg, hs, CallCounter())
            report = verify_collision(hs, m0, m1)
            assert rec.win == (report.full_collision and not m0.denotes_same(m1))

    def test_deterministic_and_thread_independent(self):
        cfg = config(ell=10, key_visibility=KeyVisibility.KEY_GIVEN, trial_count=16)
        a = run_game(cfg, BirthdayAdversary(100))
        b = run_game(cfg, BirthdayAdversary(100), threads=4)
        assert a.to_json() == b.to_json()
        assert a.records == b.records

    def test_outcome_fields(self):
        out = run_game(config(trial_count=4), FormulaAdversary())
        d = out.to_dict()
        assert d["win_rate"] == d["wins"] / d["trials"]
        assert out.summary().startswith("wins=4/4")
        assert TrialRecord.CSV_HEADER.split(",")[0] == "trial"
        assert out.records[0].to_csv_row().split(",")[2] == "true"

    def test_config_errors(self):
        with pytest.raises(ContractViolation):
            config(trial_count=0)
        with pytest.raises(ContractViolation):
            config(ell=160)
