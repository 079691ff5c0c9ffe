"""Worked reference vectors for the toy variant (q = 17, x^4 + 1).

A fixed keypair plus one set of encryption coins, small enough to check by
hand.  Used by the deterministic toy demos and as a fixture for exhaustive
tests; the sampled toy mode uses the same algebra with seeded CBD noise.
"""

import numpy as np

REFERENCE_A = np.array(
    [[[11, 15, 14, 6], [3, 6, 7, 9]], [[12, 10, 3, 5], [15, 4, 1, 9]]], dtype=np.int64)
REFERENCE_S = np.array([[0, 1, -1, -1], [0, -1, 0, -1]], dtype=np.int64)
REFERENCE_E = np.array([[0, 0, 1, 0], [0, -1, 1, 0]], dtype=np.int64)
REFERENCE_R = np.array([[0, 1, 0, -1], [-1, 1, 0, 1]], dtype=np.int64)
REFERENCE_E1 = np.array([[1, 0, 1, 0], [0, 0, 1, 0]], dtype=np.int64)
REFERENCE_E2 = np.array([0, -1, 0, -1], dtype=np.int64)


def reference_coins():
    from .pke import EncryptionCoins

    return EncryptionCoins(REFERENCE_R.copy(), REFERENCE_E1.copy(), REFERENCE_E2.copy())


def reference_keypair():
    from .kem import kem_keypair_from_values
    from .params import Variant, get_params

    return kem_keypair_from_values(get_params(Variant.BABY), REFERENCE_A, REFERENCE_S, REFERENCE_E)
