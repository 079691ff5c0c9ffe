"""Arithmetic in R_q = Z_q[x]/(x^n + 1): negacyclic polynomial operations,
the number-theoretic transform for n = 256, coefficient compression, centered
binomial sampling, and message encode/decode.

Polynomials are numpy int64 arrays in ascending power order (coeffs[j]
multiplies x^j), reduced to [0, q).  Signed/"centered" vectors keep values in
[-eta, eta] (noise) or (-q/2, q/2] (error terms) and are reduced only at
module boundaries.
"""

from __future__ import annotations

import numpy as np

from .params import KyberParams

NTT_N = 256
NTT_Q = 3329
_NTT_ROOT = 17          # primitive 256th root of unity mod 3329
_N_INV_HALF = 3303      # 128^-1 mod 3329


def _bitrev7(x: int) -> int:
    r = 0
    for _ in range(7):
        r = (r << 1) | (x & 1)
        x >>= 1
    return r


# Butterfly zetas indexed in the order they are consumed by the forward
# transform; basemul twiddles pair up the half-size transform outputs.
_ZETAS = np.array([pow(_NTT_ROOT, _bitrev7(i), NTT_Q) for i in range(128)], dtype=np.int64)
_GAMMAS = np.array([pow(_NTT_ROOT, 2 * _bitrev7(i) + 1, NTT_Q) for i in range(128)], dtype=np.int64)


def _as_poly(a, n: int, q: int) -> np.ndarray:
    arr = np.asarray(a, dtype=np.int64)
    if arr.shape != (n,):
        raise ValueError(f"expected polynomial of length {n}, got shape {arr.shape}")
    if np.any(arr < 0) or np.any(arr >= q):
        raise ValueError("coefficients must lie in [0, q)")
    return arr


def poly_add(a, b, q: int) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.shape != b.shape:
        raise ValueError("polynomial length mismatch")
    return (a + b) % q


def poly_sub(a, b, q: int) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.shape != b.shape:
        raise ValueError("polynomial length mismatch")
    return (a - b) % q


def center_mod(a, q: int) -> np.ndarray:
    """Reduce to the centered representative in (-q/2, q/2]."""
    a = np.asarray(a, dtype=np.int64) % q
    return np.where(a > q // 2, a - q, a)


def schoolbook_mul(a, b, q: int) -> np.ndarray:
    """Negacyclic product via plain convolution with the x^n = -1 fold."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.shape != b.shape:
        raise ValueError("polynomial length mismatch")
    n = a.shape[0]
    full = np.convolve(a, b)            # degree 2n-2
    lo = full[:n].copy()
    lo[: n - 1] -= full[n:]
    return lo % q


def ntt(a) -> np.ndarray:
    """Forward incomplete NTT over Z_3329[x]/(x^256 + 1)."""
    v = _as_poly(a, NTT_N, NTT_Q).copy()
    i = 1
    length = 128
    while length >= 2:
        nblocks = NTT_N // (2 * length)
        z = _ZETAS[i : i + nblocks]
        i += nblocks
        blocks = v.reshape(nblocks, 2 * length)
        lo = blocks[:, :length]
        hi = blocks[:, length:]
        t = (z[:, None] * hi) % NTT_Q
        blocks[:, length:] = (lo - t) % NTT_Q
        blocks[:, :length] = (lo + t) % NTT_Q
        length //= 2
    return v


def intt(a) -> np.ndarray:
    """Inverse of :func:`ntt`; exact (intt(ntt(x)) == x)."""
    v = _as_poly(a, NTT_N, NTT_Q).copy()
    i = 127
    length = 2
    while length <= 128:
        nblocks = NTT_N // (2 * length)
        # zetas are consumed in decreasing index order within each layer
        z = _ZETAS[i - nblocks + 1 : i + 1][::-1]
        i -= nblocks
        blocks = v.reshape(nblocks, 2 * length)
        lo = blocks[:, :length].copy()
        hi = blocks[:, length:]
        blocks[:, :length] = (lo + hi) % NTT_Q
        blocks[:, length:] = (z[:, None] * (hi - lo)) % NTT_Q
        length *= 2
    return (v * _N_INV_HALF) % NTT_Q


def ntt_pointwise(a_hat, b_hat) -> np.ndarray:
    """Product of two NTT-domain polynomials (128 degree-1 base cases)."""
    a = np.asarray(a_hat, dtype=np.int64).reshape(128, 2)
    b = np.asarray(b_hat, dtype=np.int64).reshape(128, 2)
    c = np.empty((128, 2), dtype=np.int64)
    c[:, 0] = (a[:, 0] * b[:, 0] + (a[:, 1] * b[:, 1]) % NTT_Q * _GAMMAS) % NTT_Q
    c[:, 1] = (a[:, 0] * b[:, 1] + a[:, 1] * b[:, 0]) % NTT_Q
    return c.reshape(256)


def poly_mul(a, b, params: KyberParams) -> np.ndarray:
    """Product in R_q.  Uses the NTT path for n = 256, schoolbook otherwise;
    the two paths are bit-identical where both apply."""
    if params.uses_ntt:
        return intt(ntt_pointwise(ntt(_as_poly(a, params.n, params.q)),
                                  ntt(_as_poly(b, params.n, params.q))))
    return schoolbook_mul(_as_poly(a, params.n, params.q),
                          _as_poly(b, params.n, params.q), params.q)


def compress(x, d: int, q: int):
    """round(2^d / q * x) mod 2^d with half-up rounding, exact in integers."""
    arr = np.asarray(x, dtype=np.int64)
    if np.any(arr < 0) or np.any(arr >= q):
        raise ValueError("compress input must lie in [0, q)")
    out = (((arr << (d + 1)) + q) // (2 * q)) % (1 << d)
    return int(out) if np.isscalar(x) or arr.shape == () else out


def decompress(x, d: int, q: int):
    """round(q / 2^d * x) with half-up rounding, exact in integers."""
    arr = np.asarray(x, dtype=np.int64)
    if np.any(arr < 0) or np.any(arr >= (1 << d)):
        raise ValueError("decompress input must lie in [0, 2^d)")
    out = (2 * q * arr + (1 << d)) >> (d + 1)
    return int(out) if np.isscalar(x) or arr.shape == () else out


def compression_noise(x, d: int, q: int) -> np.ndarray:
    """Centered decompress(compress(x)) - x, the rounding residue."""
    return center_mod(decompress(compress(x, d, q), d, q) - np.asarray(x, dtype=np.int64), q)


def bytes_to_bits(data: bytes) -> np.ndarray:
    """LSB-first bit expansion."""
    return np.unpackbits(np.frombuffer(data, dtype=np.uint8), bitorder="little")


def bits_to_bytes(bits) -> bytes:
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.size % 8:
        raise ValueError("bit count must be a multiple of 8")
    return np.packbits(bits, bitorder="little").tobytes()


def cbd_sample(eta: int, randomness: bytes, n: int) -> np.ndarray:
    """Centered binomial sample: coefficient = sum(eta bits) - sum(eta bits).

    Deterministic in the input bytes; requires 2*eta*n bits of randomness.
    """
    need = 2 * eta * n
    bits = bytes_to_bits(randomness)
    if bits.size < need:
        raise ValueError(f"need {need} bits of randomness, got {bits.size}")
    groups = bits[:need].reshape(n, 2, eta).astype(np.int64)
    return groups[:, 0, :].sum(axis=1) - groups[:, 1, :].sum(axis=1)


def cbd_pmf(eta: int) -> np.ndarray:
    """Analytic pmf of the centered binomial over {-eta, ..., eta}."""
    from math import comb

    return np.array([comb(2 * eta, i) for i in range(2 * eta + 1)], dtype=np.float64) / 4**eta


def encode_message(bits, params: KyberParams) -> np.ndarray:
    """Map each message bit to 0 or round(q/2)."""
    bits = np.asarray(bits, dtype=np.int64)
    if bits.shape != (params.n,):
        raise ValueError(f"message must be {params.n} bits")
    if np.any((bits != 0) & (bits != 1)):
        raise ValueError("message entries must be bits")
    return bits * decompress(1, 1, params.q)


def decode_bit(a: int, q: int) -> int:
    """0 iff a is closer to 0 or q than to q/2 (strict q/4 boundary)."""
    return 0 if 4 * min(a, q - a) < q else 1


def decode_message(rec, params: KyberParams) -> np.ndarray:
    rec = _as_poly(rec, params.n, params.q)
    return (4 * np.minimum(rec, params.q - rec) >= params.q).astype(np.int64)
