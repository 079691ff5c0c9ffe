import numpy as np
import pytest

from kyberlab import attack, kem, pke, ring
from kyberlab.params import FULL_VARIANTS, Variant, get_params
from kyberlab.toy_reference import reference_coins, reference_keypair

from helpers import TOY_E, TOY_S, oracle_error_poly

BABY = get_params(Variant.BABY)
K512 = get_params(Variant.K512)


def toy_true_unknowns():
    return np.concatenate([np.array(TOY_E).reshape(-1), np.array(TOY_S).reshape(-1)])


class TestManipulation:
    def test_plain_shift(self):
        ct = pke.PkeCiphertext(Variant.K512, np.zeros((2, 256), int), np.zeros(256, int))
        ct2, manip = attack.craft_manipulation(ct, 0, K512)
        assert ct2.c2[0] == 4
        assert manip.delta_raw == 832 == manip.delta
        assert np.array_equal(ct2.c1, ct.c1)
        assert np.all(ct2.c2[1:] == 0)

    def test_wraparound_shift(self):
        c2 = np.zeros(256, int)
        c2[5] = 12
        ct = pke.PkeCiphertext(Variant.K512, np.zeros((2, 256), int), c2)
        ct2, manip = attack.craft_manipulation(ct, 5, K512)
        assert ct2.c2[5] == 0
        assert manip.delta_raw == -ring.decompress(12, 4, 3329) == -2497
        assert manip.delta == 832    # centered mod q the shift is still ~q/4

    def test_double_application_is_half_range(self):
        ct = pke.PkeCiphertext(Variant.K512, np.zeros((2, 256), int), np.zeros(256, int))
        ct2, _ = attack.craft_manipulation(ct, 3, K512)
        ct3, _ = attack.craft_manipulation(ct2, 3, K512)
        assert ct3.c2[3] == 8   # 2^(dv-1)

    def test_delta_always_near_quarter(self):
        for params in (BABY, K512, get_params(Variant.K1024)):
            lo = (params.q - 1) // 4
            for start in range(1 << params.dv):
                c2 = np.zeros(params.n, int)
                c2[0] = start
                ct = pke.PkeCiphertext(params.variant, np.zeros((params.k, params.n), int), c2)
                _, manip = attack.craft_manipulation(ct, 0, params)
                assert manip.delta in (lo, lo + 1)

    def test_undo_restores(self):
        rng = np.random.default_rng(1)
        c2 = rng.integers(0, 16, 256)
        ct = pke.PkeCiphertext(Variant.K512, np.zeros((2, 256), int), c2)
        ct2, manip = attack.craft_manipulation(ct, 7, K512)
        back = attack.undo_manipulation(ct2, manip, K512)
        assert np.array_equal(back.c2, c2)

    def test_index_out_of_range(self):
        ct = pke.PkeCiphertext(Variant.K512, np.zeros((2, 256), int), np.zeros(256, int))
        with pytest.raises(ValueError):
            attack.craft_manipulation(ct, 256, K512)


class TestSurvivalBound:
    @pytest.mark.parametrize("q", [17, 3329])
    def test_exhaustive_against_decoder(self, q):
        # within the valid-error window the one-sided bound reproduces the
        # decoder outcome exactly, for both message bits and both shifts
        enc1 = (q + 1) // 2
        a_max = (q - 1) // 4
        for delta in (a_max, a_max + 1):
            for m_bit in (0, 1):
                bound = attack.survival_bound(m_bit, delta, q)
                enc = enc1 if m_bit else 0
                for d in range(-a_max, a_max + 1):
                    survives = ring.decode_bit((enc + d + delta) % q, q) == m_bit
                    assert survives == (d <= bound), (q, delta, m_bit, d)


class TestSigmaConvention:
    @pytest.mark.parametrize("n", [4, 256])
    def test_sign_antisymmetry(self, n):
        h = np.arange(n)
        for i in range(0, n, max(1, n // 16)):
            sgn = np.where(h <= i, 1, -1)
            assert all((sgn[j] == 1) == (i >= j) for j in range(n))

    def test_linear_form_equals_error_coeff_toy(self):
        # the dot-product form, the expanded sum, and the polynomial algebra
        # agree on the worked fixture for every coefficient index
        kp = reference_keypair()
        coins = reference_coins()
        du = np.zeros((2, 4), int)
        dv = np.zeros(4, int)
        d = oracle_error_poly(TOY_S, TOY_E, coins.r.tolist(), coins.e1.tolist(),
                              coins.e2.tolist(), du.tolist(), dv.tolist(), 17)
        tr = kem.EncapsTranscript(np.zeros(4, int), coins, du, dv, b"")
        for i in range(4):
            manip = attack.Manipulation(i, 4, 4, 4)
            ineq = attack.derive_inequality(True, tr, manip, BABY)
            assert ineq.lhs(toy_true_unknowns()) == d[i]


class TestDeriveInequality:
    def test_zero_transcript_zero_form(self):
        coins = pke.EncryptionCoins(np.zeros((2, 4), int), np.zeros((2, 4), int), np.zeros(4, int))
        tr = kem.EncapsTranscript(np.zeros(4, int), coins, np.zeros((2, 4), int),
                                  np.zeros(4, int), b"")
        ineq = attack.derive_inequality(True, tr, attack.Manipulation(1, 4, 4, 4), BABY)
        assert not ineq.coeffs.any()
        assert ineq.constant == 0
        # outcome true with delta=4 at q=17 means d <= 0, threshold is 1
        assert ineq.relation == attack.RELATION_LT
        assert ineq.threshold == 1
        assert ineq.evaluate(np.zeros(16, int))

    @pytest.mark.parametrize("variant", FULL_VARIANTS)
    def test_consistency_random_trials(self, variant):
        params = get_params(variant)
        kp = kem.kem_keygen(params, variant.value.encode().ljust(32, b"\x00"))
        transcript = attack.collect_inequalities(kp, 60, b"consistency-seed")
        truth = kp.true_unknowns()
        for trial in transcript.entries:
            # survival predicate reproduces the oracle bit; the stored
            # relation (the constraint the solver conditions on) holds
            assert trial.inequality.predicate(truth) == trial.outcome
            assert trial.inequality.evaluate(truth)

    def test_lhs_matches_error_poly_k512(self):
        params = K512
        kp = kem.kem_keygen(params, b"\x31" * 32)
        rng = np.random.default_rng(77)
        truth = kp.true_unknowns()
        for _ in range(10):
            ct, key, tr = kem.encaps(kp.pk, rng.bytes(32))
            i = int(rng.integers(0, 256))
            _, manip = attack.craft_manipulation(ct, i, params)
            ineq = attack.derive_inequality(True, tr, manip, params)
            d = pke.decryption_error_poly(kp.bundle.sk, kp.bundle.e_noise, tr.coins,
                                          tr.delta_u, tr.delta_v, params)
            assert ineq.lhs(truth) == d[i]


class TestCollect:
    def test_empty(self):
        kp = reference_keypair()
        assert attack.collect_inequalities(kp, 0, b"s").entries == []

    def test_deterministic(self):
        kp = reference_keypair()
        t1 = attack.collect_inequalities(kp, 25, b"seed-a")
        t2 = attack.collect_inequalities(kp, 25, b"seed-a")
        assert attack.dump_inequalities(t1.inequalities) == attack.dump_inequalities(t2.inequalities)
        t3 = attack.collect_inequalities(kp, 25, b"seed-b")
        assert attack.dump_inequalities(t1.inequalities) != attack.dump_inequalities(t3.inequalities)

    def test_toy_consistency(self):
        kp = reference_keypair()
        truth = kp.true_unknowns()
        transcript = attack.collect_inequalities(kp, 300, b"toy-consistency")
        agree = sum(t.inequality.predicate(truth) == t.outcome for t in transcript.entries)
        held = sum(t.inequality.evaluate(truth) for t in transcript.entries)
        assert agree == 300
        assert held == 300

    def test_outcome_balance(self):
        # both success and failure outcomes appear in a modest batch
        kp = reference_keypair()
        outcomes = [t.outcome for t in attack.collect_inequalities(kp, 100, b"balance").entries]
        assert 10 < sum(outcomes) < 90


class TestSerialization:
    def test_text_roundtrip(self, tmp_path):
        kp = reference_keypair()
        ineqs = attack.collect_inequalities(kp, 12, b"ser").inequalities
        path = tmp_path / "ineq.txt"
        attack.save_inequalities(path, ineqs)
        back = attack.load_inequalities(path)
        assert len(back) == 12
        for a, b in zip(ineqs, back):
            assert a.relation == b.relation
            assert a.threshold == b.threshold
            assert a.constant == b.constant
            assert np.array_equal(a.coeffs, b.coeffs)

    def test_rejects_bad_relation(self):
        with pytest.raises(ValueError):
            attack.parse_inequalities("EQ 1 0 1 2\n")
