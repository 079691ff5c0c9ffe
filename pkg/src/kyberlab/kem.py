"""FO-transformed KEM with implicit rejection, plus the fault hook used by
the chosen-ciphertext attack simulation.

Decapsulation re-encrypts the decrypted message and compares; on mismatch it
returns a pseudorandom key derived from the rejection secret z instead of an
error.  The fault hook models a corrected-manipulation glitch behaviorally:
decryption consumes the manipulated ciphertext, but the buffer used for the
comparison and the final key derivation has been restored to the original.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import encoding, pke
from .encoding import SEED_BYTES
from .params import KyberParams, Variant, get_params


class FaultMode(enum.Enum):
    NONE = "none"
    CORRECT_MANIPULATION = "correct-manipulation"


@dataclass
class FaultSpec:
    mode: FaultMode = FaultMode.NONE
    manipulation: Optional["Manipulation"] = None  # required for CORRECT_MANIPULATION

    def __post_init__(self) -> None:
        if self.mode is FaultMode.CORRECT_MANIPULATION and self.manipulation is None:
            raise ValueError("corrected-manipulation fault needs the manipulation record")


@dataclass
class KemSecretBundle:
    variant: Variant
    sk: pke.PkeSecretKey
    pk: pke.PkePublicKey
    z: bytes
    h_pk: bytes
    e_noise: np.ndarray   # keygen noise, kept for simulation ground truth


@dataclass
class KemKeyPair:
    pk: pke.PkePublicKey
    bundle: KemSecretBundle

    @property
    def params(self) -> KyberParams:
        return get_params(self.pk.variant)

    def true_unknowns(self) -> np.ndarray:
        """Flattened (e, s) ground-truth vector in attack layout."""
        return np.concatenate([self.bundle.e_noise.reshape(-1), self.bundle.sk.s.reshape(-1)])


@dataclass
class EncapsTranscript:
    """Attacker-side view of one encapsulation: everything the encapsulating
    party knows (message, coins, rounding residues, derived key)."""
    m_bits: np.ndarray
    coins: pke.EncryptionCoins
    delta_u: np.ndarray
    delta_v: np.ndarray
    key: bytes


def _pk_bytes(pk: pke.PkePublicKey) -> bytes:
    if "pk_bytes" not in pk._cache:
        pk._cache["pk_bytes"] = pke.serialize_pk(pk)
    return pk._cache["pk_bytes"]


def kem_keygen(params: KyberParams, seed: bytes) -> KemKeyPair:
    """Derives the PKE seed and rejection secret from one 32-byte seed."""
    if len(seed) != SEED_BYTES:
        raise ValueError("keygen seed must be 32 bytes")
    expanded = encoding.kdf(b"kem-keygen" + seed, 64)
    pk, sk, e = pke.pke_keygen(params, expanded[:32])
    bundle = KemSecretBundle(params.variant, sk, pk, z=expanded[32:],
                             h_pk=encoding.hash_h(_pk_bytes(pk)), e_noise=e)
    return KemKeyPair(pk, bundle)


def kem_keypair_from_values(params: KyberParams, a, s, e, z: bytes = bytes(32)) -> KemKeyPair:
    pk, sk, e_arr = pke.pke_keypair_from_values(params, a, s, e)
    bundle = KemSecretBundle(params.variant, sk, pk, z=z,
                             h_pk=encoding.hash_h(_pk_bytes(pk)), e_noise=e_arr)
    return KemKeyPair(pk, bundle)


def _message_from_seed(m_seed: bytes, params: KyberParams) -> tuple[np.ndarray, bytes]:
    digest = encoding.hash_h(m_seed)
    bits = encoding.unpack_message_bits(digest, params.n)
    return bits, encoding.pack_message_bits(bits)


def encaps(pk: pke.PkePublicKey, m_seed: bytes) -> tuple[pke.PkeCiphertext, bytes, EncapsTranscript]:
    params = pk.params
    m_bits, m_bytes = _message_from_seed(m_seed, params)
    k_bar, tau = encoding.hash_g(m_bytes + encoding.hash_h(_pk_bytes(pk)))
    coins = pke.sample_coins(params, tau)
    ct, u, v = pke.pke_encrypt_internals(pk, m_bits, coins, params)
    key = encoding.kdf(k_bar + encoding.hash_h(pke.serialize_ct(ct, params)))
    delta_u, delta_v = pke.compression_deltas(u, v, params)
    return ct, key, EncapsTranscript(m_bits, coins, delta_u, delta_v, key)


def decaps(bundle: KemSecretBundle, ct: pke.PkeCiphertext,
           fault: FaultSpec | None = None) -> bytes:
    params = get_params(bundle.variant)
    fault = fault or FaultSpec()
    m_bits = pke.pke_decrypt(bundle.sk, ct, params)
    m_bytes = encoding.pack_message_bits(m_bits)
    k_bar, tau = encoding.hash_g(m_bytes + bundle.h_pk)
    ct_re = pke.pke_encrypt(bundle.pk, m_bits, pke.sample_coins(params, tau), params)

    target = ct
    if fault.mode is FaultMode.CORRECT_MANIPULATION:
        from .attack import undo_manipulation

        target = undo_manipulation(ct, fault.manipulation, params)
    target_bytes = pke.serialize_ct(target, params)
    if pke.serialize_ct(ct_re, params) == target_bytes:
        return encoding.kdf(k_bar + encoding.hash_h(target_bytes))
    return encoding.kdf(bundle.z + encoding.hash_h(target_bytes))


def rejection_key(bundle: KemSecretBundle, ct: pke.PkeCiphertext) -> bytes:
    """The implicit-rejection key for a given ciphertext (test aid)."""
    params = get_params(bundle.variant)
    return encoding.kdf(bundle.z + encoding.hash_h(pke.serialize_ct(ct, params)))
