import numpy as np
import pytest

from kyberlab import pke, ring
from kyberlab.params import ALL_VARIANTS, Variant, get_params

from helpers import (
    TOY_A,
    TOY_E,
    TOY_E1,
    TOY_E2,
    TOY_Q,
    TOY_R,
    TOY_S,
    centered,
    oracle_error_poly,
    oracle_toy_decrypt,
    oracle_toy_encrypt,
)

BABY = get_params(Variant.BABY)
K512 = get_params(Variant.K512)


@pytest.fixture
def toy_keypair():
    return pke.pke_keypair_from_values(BABY, TOY_A, TOY_S, TOY_E)


@pytest.fixture
def toy_coins():
    return pke.EncryptionCoins(np.array(TOY_R), np.array(TOY_E1), np.array(TOY_E2))


class TestKeygen:
    def test_toy_reference_public_value(self, toy_keypair):
        pk, sk, e = toy_keypair
        # t = A s + e computed by the schoolbook oracle
        assert pk.t.tolist() == [[4, 1, 14, 12], [4, 5, 9, 16]]
        assert np.array_equal(sk.s, np.array(TOY_S))
        assert np.array_equal(e, np.array(TOY_E))

    def test_deterministic(self):
        seed = bytes(range(32))
        pk1, sk1, e1 = pke.pke_keygen(K512, seed)
        pk2, sk2, e2 = pke.pke_keygen(K512, seed)
        assert np.array_equal(pk1.t, pk2.t)
        assert pk1.seed_a == pk2.seed_a
        assert np.array_equal(sk1.s, sk2.s)
        assert np.array_equal(e1, e2)

    def test_noise_support(self):
        pk, sk, e = pke.pke_keygen(K512, bytes(32))
        assert np.abs(sk.s).max() <= 3
        assert np.abs(e).max() <= 3
        pk, sk, e = pke.pke_keygen(get_params(Variant.K768), bytes(32))
        assert np.abs(sk.s).max() <= 2

    def test_public_value_consistency(self):
        for variant in ALL_VARIANTS:
            params = get_params(variant)
            pk, sk, e = pke.pke_keygen(params, b"\x42" * 32)
            a = pke._matrix_of(pk)
            t = (pke._matrix_vector(a, sk.s % params.q, params) + e) % params.q
            assert np.array_equal(t, pk.t)


class TestEncryptDecrypt:
    def test_toy_reference_ciphertext(self, toy_keypair, toy_coins):
        pk, sk, _ = toy_keypair
        ct = pke.pke_encrypt(pk, [1, 1, 0, 1], toy_coins, BABY)
        # frozen from the straight-line oracle evaluation of u, v
        assert ct.c1.tolist() == [[0, 7, 7, 12], [3, 3, 9, 10]]
        assert ct.c2.tolist() == [7, 15, 9, 14]
        assert list(pke.pke_decrypt(sk, ct, BABY)) == [1, 1, 0, 1]

    def test_toy_all_messages_roundtrip(self, toy_keypair, toy_coins):
        pk, sk, _ = toy_keypair
        for m in range(16):
            bits = [(m >> b) & 1 for b in range(4)]
            ct = pke.pke_encrypt(pk, bits, toy_coins, BABY)
            assert list(pke.pke_decrypt(sk, ct, BABY)) == bits

    def test_toy_matches_oracle_on_sampled_coins(self, toy_keypair):
        pk, sk, _ = toy_keypair
        rng = np.random.default_rng(3)
        for _ in range(25):
            r = rng.integers(-1, 2, (2, 4))
            e1 = rng.integers(-1, 2, (2, 4))
            e2 = rng.integers(-1, 2, 4)
            bits = list(rng.integers(0, 2, 4))
            ct = pke.pke_encrypt(pk, bits, pke.EncryptionCoins(r, e1, e2), BABY)
            c1, c2, _, _ = oracle_toy_encrypt(TOY_A, pk.t.tolist(), r.tolist(), e1.tolist(),
                                              e2.tolist(), bits, TOY_Q, 4, 4)
            assert ct.c1.tolist() == c1
            assert ct.c2.tolist() == c2
            dec, _ = oracle_toy_decrypt(TOY_S, c1, c2, TOY_Q, 4, 4)
            assert list(pke.pke_decrypt(sk, ct, BABY)) == dec

    def test_coin_support_violation(self, toy_keypair):
        pk, _, _ = toy_keypair
        bad = pke.EncryptionCoins(np.full((2, 4), 2), np.zeros((2, 4), int), np.zeros(4, int))
        with pytest.raises(ValueError):
            pke.pke_encrypt(pk, [0, 0, 0, 0], bad, BABY)

    def test_every_coin_matters_toy(self, toy_keypair, toy_coins):
        pk, _, _ = toy_keypair
        bits = [1, 0, 1, 0]
        base = pke.serialize_ct(pke.pke_encrypt(pk, bits, toy_coins, BABY), BABY)
        changed = 0
        fields = [toy_coins.r, toy_coins.e1, toy_coins.e2]
        for arr_idx, arr in enumerate(fields):
            flat = arr.reshape(-1)
            for pos in range(flat.size):
                mod = [f.copy() for f in fields]
                mflat = mod[arr_idx].reshape(-1)
                mflat[pos] = mflat[pos] + 1 if mflat[pos] < 1 else mflat[pos] - 1
                ct = pke.pke_encrypt(pk, bits, pke.EncryptionCoins(*mod), BABY)
                changed += pke.serialize_ct(ct, BABY) != base
        assert changed == 20   # every single-coefficient perturbation shows up

    def test_k512_roundtrip_random(self):
        params = K512
        pk, sk, _ = pke.pke_keygen(params, b"\x01" * 32)
        rng = np.random.default_rng(5)
        for _ in range(200):
            bits = rng.integers(0, 2, 256)
            coins = pke.sample_coins(params, rng.bytes(32))
            ct = pke.pke_encrypt(pk, bits, coins, params)
            assert np.array_equal(pke.pke_decrypt(sk, ct, params), bits)

    def test_all_zero_ciphertext_decrypts_to_zero(self, toy_keypair):
        _, sk, _ = toy_keypair
        ct = pke.PkeCiphertext(Variant.BABY, np.zeros((2, 4), int), np.zeros(4, int))
        assert list(pke.pke_decrypt(sk, ct, BABY)) == [0, 0, 0, 0]


class TestErrorPolynomial:
    def test_all_zero_inputs(self, toy_keypair):
        _, sk0, _ = pke.pke_keypair_from_values(
            BABY, np.zeros((2, 2, 4), int), np.zeros((2, 4), int), np.zeros((2, 4), int))
        coins = pke.EncryptionCoins(np.zeros((2, 4), int), np.zeros((2, 4), int), np.zeros(4, int))
        d = pke.decryption_error_poly(sk0, np.zeros((2, 4), int), coins,
                                      np.zeros((2, 4), int), np.zeros(4, int), BABY)
        assert list(d) == [0, 0, 0, 0]

    def test_toy_reference_value(self, toy_keypair, toy_coins):
        _, sk, e = toy_keypair
        d = pke.decryption_error_poly(sk, e, toy_coins,
                                      np.zeros((2, 4), int), np.zeros(4, int), BABY)
        assert list(d) == [0, -3, -1, 2]   # frozen from the schoolbook oracle

    def test_matches_oracle_random_toy(self, toy_keypair):
        _, sk, e = toy_keypair
        rng = np.random.default_rng(9)
        for _ in range(30):
            r = rng.integers(-1, 2, (2, 4))
            e1 = rng.integers(-1, 2, (2, 4))
            e2 = rng.integers(-1, 2, 4)
            du = rng.integers(-1, 2, (2, 4))
            dv = rng.integers(-1, 2, 4)
            coins = pke.EncryptionCoins(r, e1, e2)
            got = pke.decryption_error_poly(sk, e, coins, du, dv, BABY)
            want = oracle_error_poly(TOY_S, TOY_E, r.tolist(), e1.tolist(), e2.tolist(),
                                     du.tolist(), dv.tolist(), TOY_Q)
            assert list(got) == want

    def test_agrees_with_decrypt_reconstruction_k512(self):
        # error polynomial == centered(rec - encode(m)), two computation paths
        params = K512
        pk, sk, e = pke.pke_keygen(params, b"\x07" * 32)
        rng = np.random.default_rng(21)
        for _ in range(50):
            bits = rng.integers(0, 2, 256)
            coins = pke.sample_coins(params, rng.bytes(32))
            ct, u, v = pke.pke_encrypt_internals(pk, bits, coins, params)
            du, dv = pke.compression_deltas(u, v, params)
            d = pke.decryption_error_poly(sk, e, coins, du, dv, params)
            rec = pke.decrypt_reconstruction(sk, ct, params)
            diff = ring.center_mod(rec - ring.encode_message(bits, params), params.q)
            assert np.array_equal(d, diff)
            assert np.abs(d).max() * 4 < params.q   # no decryption failure observed

    def test_deltas_match_recomputation(self):
        params = K512
        pk, sk, _ = pke.pke_keygen(params, b"\x0a" * 32)
        coins = pke.sample_coins(params, b"\x0b" * 32)
        ct, u, v = pke.pke_encrypt_internals(pk, np.zeros(256, int), coins, params)
        du, dv = pke.compression_deltas(u, v, params)
        manual_dv = [centered(ring.decompress(ring.compress(int(x), params.dv, params.q),
                                              params.dv, params.q) - int(x), params.q) for x in v]
        assert list(dv) == manual_dv
        assert np.abs(du).max() <= -(-params.q // (1 << (params.du + 1)))


class TestSerialization:
    @pytest.mark.parametrize("variant", ALL_VARIANTS)
    def test_pk_roundtrip(self, variant):
        params = get_params(variant)
        pk, sk, _ = pke.pke_keygen(params, b"\x33" * 32)
        data = pke.serialize_pk(pk)
        back = pke.deserialize_pk(data, params)
        assert np.array_equal(back.t, pk.t)
        assert pke.serialize_pk(back) == data

    @pytest.mark.parametrize("variant", ALL_VARIANTS)
    def test_sk_roundtrip(self, variant):
        params = get_params(variant)
        _, sk, _ = pke.pke_keygen(params, b"\x44" * 32)
        back = pke.deserialize_sk(pke.serialize_sk(sk, params), params)
        assert np.array_equal(back.s, sk.s)

    @pytest.mark.parametrize("variant", ALL_VARIANTS)
    def test_ct_roundtrip(self, variant):
        params = get_params(variant)
        pk, _, _ = pke.pke_keygen(params, b"\x55" * 32)
        rng = np.random.default_rng(1)
        bits = rng.integers(0, 2, params.n)
        ct = pke.pke_encrypt(pk, bits, pke.sample_coins(params, b"\x66" * 32), params)
        back = pke.deserialize_ct(pke.serialize_ct(ct, params), params)
        assert np.array_equal(back.c1, ct.c1)
        assert np.array_equal(back.c2, ct.c2)

    def test_standard_sizes(self):
        # pk = 384k + 32, ct = 32(du k + dv)
        for variant, pk_len, ct_len in [(Variant.K512, 800, 768),
                                        (Variant.K768, 1184, 1088),
                                        (Variant.K1024, 1568, 1568)]:
            params = get_params(variant)
            pk, sk, _ = pke.pke_keygen(params, bytes(32))
            assert len(pke.serialize_pk(pk)) == pk_len
            ct = pke.pke_encrypt(pk, np.zeros(params.n, int),
                                 pke.sample_coins(params, bytes(32)), params)
            assert len(pke.serialize_ct(ct, params)) == ct_len
