"""IND-CPA public-key encryption over all variants.

Full variants follow the round-3 Kyber flow: matrix expansion from a 32-byte
seed in the NTT domain, deterministic CBD noise from an incrementing PRF
nonce, and compressed (u, v) ciphertexts.  The toy variant runs the same
algebra with schoolbook products and an explicit public matrix, so the worked
4-coefficient reference vectors can be injected verbatim.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import encoding, ring
from .encoding import SEED_BYTES
from .params import KyberParams, Variant, get_params


def _prf_bytes(eta: int, n: int) -> int:
    return (2 * eta * n + 7) // 8


def _check_centered(arr: np.ndarray, eta: int, what: str) -> np.ndarray:
    arr = np.asarray(arr, dtype=np.int64)
    if np.any(np.abs(arr) > eta):
        raise ValueError(f"{what} outside CBD support [-{eta}, {eta}]")
    return arr


@dataclass
class PkePublicKey:
    variant: Variant
    t: np.ndarray                 # (k, n) in [0, q)
    seed_a: bytes | None = None   # full variants: matrix expansion seed
    a: np.ndarray | None = None   # toy variant: explicit (k, k, n) matrix
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def params(self) -> KyberParams:
        return get_params(self.variant)


@dataclass
class PkeSecretKey:
    variant: Variant
    s: np.ndarray                 # (k, n) centered in [-eta1, eta1]
    _cache: dict = field(default_factory=dict, repr=False, compare=False)


@dataclass
class PkeCiphertext:
    variant: Variant
    c1: np.ndarray                # (k, n) values in [0, 2^du)
    c2: np.ndarray                # (n,)  values in [0, 2^dv)


@dataclass
class EncryptionCoins:
    r: np.ndarray                 # (k, n) centered, eta1
    e1: np.ndarray                # (k, n) centered, eta2
    e2: np.ndarray                # (n,)  centered, eta2


def expand_matrix(params: KyberParams, seed: bytes) -> np.ndarray:
    """Public matrix from seed: NTT-domain rows for n = 256, plain mod-q
    coefficients for the toy variant.  A[i][j] uses XOF nonce (j, i)."""
    k = params.k
    if params.uses_ntt:
        rows = [[encoding.sample_uniform_ntt(seed, j, i) for j in range(k)] for i in range(k)]
    else:
        rows = [[encoding.sample_uniform_modq(seed, j, i, params.n, params.q) for j in range(k)]
                for i in range(k)]
    return np.array(rows, dtype=np.int64)


def _matrix_of(pk: PkePublicKey) -> np.ndarray:
    """NTT-domain matrix (full) or plain matrix (toy), cached per key."""
    if "a" not in pk._cache:
        if pk.a is not None:
            pk._cache["a"] = np.asarray(pk.a, dtype=np.int64)
        else:
            pk._cache["a"] = expand_matrix(pk.params, pk.seed_a)
    return pk._cache["a"]


def _t_hat_of(pk: PkePublicKey) -> np.ndarray:
    if "t_hat" not in pk._cache:
        pk._cache["t_hat"] = np.stack([ring.ntt(p) for p in pk.t])
    return pk._cache["t_hat"]


def _s_hat_of(sk: PkeSecretKey, q: int) -> np.ndarray:
    if "s_hat" not in sk._cache:
        sk._cache["s_hat"] = np.stack([ring.ntt(p % q) for p in sk.s])
    return sk._cache["s_hat"]


def sample_noise_vector(params: KyberParams, seed: bytes, eta: int, first_nonce: int) -> np.ndarray:
    return np.stack([
        ring.cbd_sample(eta, encoding.prf(seed, first_nonce + i, _prf_bytes(eta, params.n)), params.n)
        for i in range(params.k)
    ])


def pke_keygen(params: KyberParams, seed: bytes) -> tuple[PkePublicKey, PkeSecretKey, np.ndarray]:
    """Deterministic key generation; returns the noise vector e as well so a
    simulation harness can check recovered keys against ground truth."""
    if len(seed) != SEED_BYTES:
        raise ValueError("keygen seed must be 32 bytes")
    rho, sigma = encoding.hash_g(seed)
    a = expand_matrix(params, rho)
    s = sample_noise_vector(params, sigma, params.eta1, 0)
    e = sample_noise_vector(params, sigma, params.eta1, params.k)
    t = _matrix_vector(a, s % params.q, params)
    t = (t + e) % params.q
    pk = PkePublicKey(params.variant, t, seed_a=rho, a=None if params.uses_ntt else a)
    return pk, PkeSecretKey(params.variant, s), e


def pke_keypair_from_values(params: KyberParams, a, s, e) -> tuple[PkePublicKey, PkeSecretKey, np.ndarray]:
    """Build a keypair from explicit (A, s, e) values (toy reference mode)."""
    a = np.asarray(a, dtype=np.int64) % params.q
    s = _check_centered(s, params.eta1, "secret key")
    e = _check_centered(e, params.eta1, "keygen noise")
    t = (_matrix_vector(a, s % params.q, params) + e) % params.q
    pk = PkePublicKey(params.variant, t, seed_a=None, a=a)
    return pk, PkeSecretKey(params.variant, s), e


def _matrix_vector(a: np.ndarray, vec: np.ndarray, params: KyberParams,
                   transpose: bool = False) -> np.ndarray:
    """A @ vec over R_q (vec in [0, q)); a is NTT-domain for full variants."""
    k, q = params.k, params.q
    out = np.zeros((k, params.n), dtype=np.int64)
    if params.uses_ntt:
        v_hat = np.stack([ring.ntt(p) for p in vec])
        for i in range(k):
            acc = np.zeros(params.n, dtype=np.int64)
            for j in range(k):
                entry = a[j][i] if transpose else a[i][j]
                acc = (acc + ring.ntt_pointwise(entry, v_hat[j])) % q
            out[i] = ring.intt(acc)
    else:
        for i in range(k):
            acc = np.zeros(params.n, dtype=np.int64)
            for j in range(k):
                entry = a[j][i] if transpose else a[i][j]
                acc = (acc + ring.schoolbook_mul(entry, vec[j], q)) % q
            out[i] = acc
    return out


def sample_coins(params: KyberParams, tau: bytes) -> EncryptionCoins:
    """Encryption randomness from the FO-derived seed, nonces 0..2k."""
    r = sample_noise_vector(params, tau, params.eta1, 0)
    e1 = sample_noise_vector(params, tau, params.eta2, params.k)
    e2 = ring.cbd_sample(params.eta2, encoding.prf(tau, 2 * params.k, _prf_bytes(params.eta2, params.n)), params.n)
    return EncryptionCoins(r, e1, e2)


def pke_encrypt_internals(pk: PkePublicKey, m_bits, coins: EncryptionCoins,
                          params: KyberParams) -> tuple[PkeCiphertext, np.ndarray, np.ndarray]:
    """Encrypt and also return the uncompressed (u, v) pair."""
    q = params.q
    r = _check_centered(coins.r, params.eta1, "blinding vector")
    e1 = _check_centered(coins.e1, params.eta2, "noise vector e1")
    e2 = _check_centered(coins.e2, params.eta2, "noise poly e2")
    a = _matrix_of(pk)
    u = (_matrix_vector(a, r % q, params, transpose=True) + e1) % q
    if params.uses_ntt:
        r_hat = np.stack([ring.ntt(p % q) for p in r])
        acc = np.zeros(params.n, dtype=np.int64)
        t_hat = _t_hat_of(pk)
        for j in range(params.k):
            acc = (acc + ring.ntt_pointwise(t_hat[j], r_hat[j])) % q
        tv = ring.intt(acc)
    else:
        tv = np.zeros(params.n, dtype=np.int64)
        for j in range(params.k):
            tv = (tv + ring.schoolbook_mul(pk.t[j], r[j] % q, q)) % q
    v = (tv + e2 + ring.encode_message(m_bits, params)) % q
    ct = PkeCiphertext(params.variant,
                       ring.compress(u, params.du, q),
                       ring.compress(v, params.dv, q))
    return ct, u, v


def pke_encrypt(pk: PkePublicKey, m_bits, coins: EncryptionCoins, params: KyberParams) -> PkeCiphertext:
    return pke_encrypt_internals(pk, m_bits, coins, params)[0]


def decrypt_reconstruction(sk: PkeSecretKey, ct: PkeCiphertext, params: KyberParams) -> np.ndarray:
    """The noisy value v' - u'^T s whose per-coefficient decode yields the
    message; returned reduced to [0, q)."""
    q = params.q
    u_prime = ring.decompress(np.asarray(ct.c1, dtype=np.int64), params.du, q)
    v_prime = ring.decompress(np.asarray(ct.c2, dtype=np.int64), params.dv, q)
    if params.uses_ntt:
        s_hat = _s_hat_of(sk, q)
        acc = np.zeros(params.n, dtype=np.int64)
        for j in range(params.k):
            acc = (acc + ring.ntt_pointwise(s_hat[j], ring.ntt(u_prime[j]))) % q
        su = ring.intt(acc)
    else:
        su = np.zeros(params.n, dtype=np.int64)
        for j in range(params.k):
            su = (su + ring.schoolbook_mul(sk.s[j] % q, u_prime[j], q)) % q
    return (v_prime - su) % q


def pke_decrypt(sk: PkeSecretKey, ct: PkeCiphertext, params: KyberParams) -> np.ndarray:
    return ring.decode_message(decrypt_reconstruction(sk, ct, params), params)


def _negacyclic_int(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact integer negacyclic product of centered inputs (no reduction)."""
    n = a.shape[0]
    full = np.convolve(a, b)
    lo = full[:n].copy()
    lo[: n - 1] -= full[n:]
    return lo


def decryption_error_poly(sk: PkeSecretKey, e: np.ndarray, coins: EncryptionCoins,
                          delta_u: np.ndarray, delta_v: np.ndarray,
                          params: KyberParams) -> np.ndarray:
    """d = e^T r - s^T (e1 + delta_u) + e2 + delta_v, centered.

    Decryption of a well-formed ciphertext flips no message bit as long as
    every |d_i| stays below q/4.
    """
    e = np.asarray(e, dtype=np.int64)
    delta_u = np.asarray(delta_u, dtype=np.int64)
    delta_v = np.asarray(delta_v, dtype=np.int64)
    d = np.zeros(params.n, dtype=np.int64)
    for t in range(params.k):
        d += _negacyclic_int(e[t], coins.r[t])
        d -= _negacyclic_int(sk.s[t], coins.e1[t] + delta_u[t])
    d += coins.e2 + delta_v
    return ring.center_mod(d, params.q)


def compression_deltas(u: np.ndarray, v: np.ndarray, params: KyberParams) -> tuple[np.ndarray, np.ndarray]:
    """Centered rounding residues (delta_u, delta_v) of the ciphertext pair."""
    du = np.stack([ring.compression_noise(p, params.du, params.q) for p in u])
    dv = ring.compression_noise(v, params.dv, params.q)
    return du, dv


# --- serialization ----------------------------------------------------------

def serialize_pk(pk: PkePublicKey) -> bytes:
    params = pk.params
    if params.uses_ntt:
        t_hat = _t_hat_of(pk)
        return encoding.pack_pk(t_hat, pk.seed_a)
    return encoding.pack_toy_ints(0, pk.t, _matrix_of(pk))


def deserialize_pk(data: bytes, params: KyberParams) -> PkePublicKey:
    if params.uses_ntt:
        t_hat, rho = encoding.unpack_pk(data, params)
        t = np.stack([ring.intt(p) for p in t_hat])
        return PkePublicKey(params.variant, t, seed_a=rho)
    t_flat, a_flat = encoding.unpack_toy_ints(data, 0)
    k, n = params.k, params.n
    return PkePublicKey(params.variant, t_flat.reshape(k, n), a=a_flat.reshape(k, k, n))


def serialize_ct(ct: PkeCiphertext, params: KyberParams) -> bytes:
    if params.uses_ntt:
        return encoding.pack_ciphertext(ct.c1, ct.c2, params)
    return encoding.pack_toy_ints(1, ct.c1, ct.c2)


def deserialize_ct(data: bytes, params: KyberParams) -> PkeCiphertext:
    if params.uses_ntt:
        c1, c2 = encoding.unpack_ciphertext(data, params)
        return PkeCiphertext(params.variant, c1, c2)
    c1_flat, c2 = encoding.unpack_toy_ints(data, 1)
    return PkeCiphertext(params.variant, c1_flat.reshape(params.k, params.n), c2)


def serialize_sk(sk: PkeSecretKey, params: KyberParams) -> bytes:
    if params.uses_ntt:
        s_hat = _s_hat_of(sk, params.q)
        return b"".join(encoding.encode_poly(p, 12) for p in s_hat)
    return encoding.pack_toy_ints(2, sk.s % params.q)


def deserialize_sk(data: bytes, params: KyberParams) -> PkeSecretKey:
    if params.uses_ntt:
        s_hat = np.stack([encoding.decode_poly(data[384 * i : 384 * (i + 1)], 12, 256)
                          for i in range(params.k)])
        s = np.stack([ring.center_mod(ring.intt(p), params.q) for p in s_hat])
        return PkeSecretKey(params.variant, s)
    (s_flat,) = encoding.unpack_toy_ints(data, 2)
    s = ring.center_mod(s_flat.reshape(params.k, params.n), params.q)
    return PkeSecretKey(params.variant, s)
