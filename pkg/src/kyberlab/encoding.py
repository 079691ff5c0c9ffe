"""Byte-level serialization and the symmetric primitives.

Full variants (n = 256) use the round-3 CRYSTALS-Kyber wire layouts:
little-endian d-bit packing, SHAKE-128 matrix expansion with rejection
sampling, SHAKE-256 noise PRF, H = SHA3-256, G = SHA3-512, KDF = SHAKE-256.
The toy variant uses a simple tagged header plus 16-bit coefficient list,
documented in the README.
"""

from __future__ import annotations

import hashlib
import struct

import numpy as np

from .params import KyberParams

SEED_BYTES = 32
SYM_BYTES = 32


def hash_h(data: bytes) -> bytes:
    return hashlib.sha3_256(data).digest()


def hash_g(data: bytes) -> tuple[bytes, bytes]:
    d = hashlib.sha3_512(data).digest()
    return d[:32], d[32:]


def kdf(data: bytes, out_len: int = SYM_BYTES) -> bytes:
    return hashlib.shake_256(data).digest(out_len)


def xof(seed: bytes, j: int, i: int, out_len: int) -> bytes:
    return hashlib.shake_128(seed + bytes([j, i])).digest(out_len)


def prf(seed: bytes, nonce: int, out_len: int) -> bytes:
    return hashlib.shake_256(seed + bytes([nonce])).digest(out_len)


def encode_poly(coeffs, d: int) -> bytes:
    """Pack each coefficient into d bits, LSB first."""
    coeffs = np.asarray(coeffs, dtype=np.int64)
    shifts = np.arange(d, dtype=np.int64)
    bits = ((coeffs[:, None] >> shifts) & 1).astype(np.uint8).reshape(-1)
    return np.packbits(bits, bitorder="little").tobytes()


def decode_poly(data: bytes, d: int, n: int) -> np.ndarray:
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8), bitorder="little")
    if bits.size < n * d:
        raise ValueError("byte string too short for requested width")
    bits = bits[: n * d].reshape(n, d).astype(np.int64)
    return (bits << np.arange(d, dtype=np.int64)).sum(axis=1)


def sample_uniform_ntt(seed: bytes, j: int, i: int) -> np.ndarray:
    """Rejection-sample a uniform NTT-domain polynomial from SHAKE-128."""
    out = np.empty(0, dtype=np.int64)
    offset, chunk = 0, 672  # 2 candidates per 3 bytes; 672 bytes usually suffice
    while out.size < 256:
        raw = np.frombuffer(xof(seed, j, i, offset + chunk)[offset:], dtype=np.uint8)
        offset += chunk
        b0, b1, b2 = raw[0::3].astype(np.int64), raw[1::3].astype(np.int64), raw[2::3].astype(np.int64)
        m = min(b0.size, b1.size, b2.size)
        d1 = b0[:m] + 256 * (b1[:m] % 16)
        d2 = (b1[:m] >> 4) + 16 * b2[:m]
        cand = np.stack([d1, d2], axis=1).reshape(-1)
        out = np.concatenate([out, cand[cand < 3329]])
    return out[:256]


def sample_uniform_modq(seed: bytes, j: int, i: int, n: int, q: int) -> np.ndarray:
    """Uniform coefficients mod q for the toy variant (byte rejection)."""
    limit = (256 // q) * q
    out: list[int] = []
    length = 0
    while len(out) < n:
        length += 32
        stream = xof(seed, j, i, length)
        out = [b % q for b in stream if b < limit]
    return np.array(out[:n], dtype=np.int64)


# --- full-variant key/ciphertext layouts -----------------------------------

def pack_pk(t_hat_vec: np.ndarray, rho: bytes) -> bytes:
    return b"".join(encode_poly(p, 12) for p in t_hat_vec) + rho


def unpack_pk(data: bytes, params: KyberParams) -> tuple[np.ndarray, bytes]:
    k = params.k
    polys = [decode_poly(data[384 * i : 384 * (i + 1)], 12, 256) for i in range(k)]
    return np.stack(polys), data[384 * k : 384 * k + 32]


def pack_ciphertext(c1: np.ndarray, c2: np.ndarray, params: KyberParams) -> bytes:
    body = b"".join(encode_poly(p, params.du) for p in c1)
    return body + encode_poly(c2, params.dv)


def unpack_ciphertext(data: bytes, params: KyberParams) -> tuple[np.ndarray, np.ndarray]:
    du_bytes = 32 * params.du
    c1 = np.stack([
        decode_poly(data[du_bytes * i : du_bytes * (i + 1)], params.du, 256)
        for i in range(params.k)
    ])
    c2 = decode_poly(data[du_bytes * params.k :], params.dv, 256)
    return c1, c2


# --- toy-variant layout -----------------------------------------------------

_TOY_MAGIC = b"TK"


def pack_toy_ints(kind: int, *arrays: np.ndarray) -> bytes:
    """Length-prefixed int16 list: magic, kind byte, section count, then for
    each section a u16 length followed by u16 little-endian values."""
    parts = [_TOY_MAGIC, bytes([kind, len(arrays)])]
    for arr in arrays:
        flat = np.asarray(arr, dtype=np.int64).reshape(-1)
        parts.append(struct.pack("<H", flat.size))
        parts.append(flat.astype("<u2").tobytes())
    return b"".join(parts)


def unpack_toy_ints(data: bytes, kind: int) -> list[np.ndarray]:
    if data[:2] != _TOY_MAGIC or data[2] != kind:
        raise ValueError("not a toy-format blob of the expected kind")
    nsec = data[3]
    off = 4
    out = []
    for _ in range(nsec):
        (size,) = struct.unpack_from("<H", data, off)
        off += 2
        out.append(np.frombuffer(data, dtype="<u2", count=size, offset=off).astype(np.int64))
        off += 2 * size
    return out


def pack_message_bits(bits: np.ndarray) -> bytes:
    """Message bits to bytes, zero-padded up to a whole byte."""
    bits = np.asarray(bits, dtype=np.uint8)
    pad = (-bits.size) % 8
    if pad:
        bits = np.concatenate([bits, np.zeros(pad, dtype=np.uint8)])
    return np.packbits(bits, bitorder="little").tobytes()


def unpack_message_bits(data: bytes, n: int) -> np.ndarray:
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8), bitorder="little")
    return bits[:n].astype(np.int64)
