"""Kyber KEM laboratory: the lattice KEM over four parameter sets, a
simulated fault-enabled chosen-ciphertext attack, belief-propagation key
recovery, and a secured V2X message channel."""

from .params import ALL_VARIANTS, FULL_VARIANTS, KyberParams, Variant, get_params

__all__ = ["ALL_VARIANTS", "FULL_VARIANTS", "KyberParams", "Variant", "get_params"]
