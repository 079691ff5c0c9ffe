"""Parameter sets for the lattice KEM variants used in this lab.

All arithmetic happens in R_q = Z_q[x]/(x^n + 1).  The three full variants
follow the round-3 CRYSTALS-Kyber parameter sets.  The ``baby`` variant is a
4-coefficient toy over q = 17 used for exhaustive, desk-scale testing; its
noise and compression widths are lab choices (the toy definition only fixes
n, k and q) picked so that the worked reference vectors fall inside the CBD
support and 2^d < q holds.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


class Variant(str, enum.Enum):
    BABY = "baby"
    K512 = "512"
    K768 = "768"
    K1024 = "1024"

    def __str__(self) -> str:  # argparse-friendly
        return self.value


@dataclass(frozen=True)
class KyberParams:
    variant: Variant
    n: int          # coefficients per polynomial
    k: int          # module rank
    q: int          # coefficient modulus
    eta1: int       # CBD width for s, e, r
    eta2: int       # CBD width for e1, e2
    du: int         # compressed bits per u coefficient
    dv: int         # compressed bits per v coefficient

    def __post_init__(self) -> None:
        if not (1 << self.du) < self.q or not (1 << self.dv) < self.q:
            raise ValueError("compression width must satisfy 2^d < q")
        if self.n < 2 or self.n & (self.n - 1):
            raise ValueError("n must be a power of two")

    @property
    def unknown_count(self) -> int:
        """Number of secret coefficients targeted by the attack: (e, s)."""
        return 2 * self.k * self.n

    @property
    def message_bits(self) -> int:
        return self.n

    @property
    def uses_ntt(self) -> bool:
        return self.n == 256


_PARAMS = {
    Variant.BABY: KyberParams(Variant.BABY, n=4, k=2, q=17, eta1=1, eta2=1, du=4, dv=4),
    Variant.K512: KyberParams(Variant.K512, n=256, k=2, q=3329, eta1=3, eta2=2, du=10, dv=4),
    Variant.K768: KyberParams(Variant.K768, n=256, k=3, q=3329, eta1=2, eta2=2, du=10, dv=4),
    Variant.K1024: KyberParams(Variant.K1024, n=256, k=4, q=3329, eta1=2, eta2=2, du=11, dv=5),
}


def get_params(variant: Variant | str) -> KyberParams:
    return _PARAMS[Variant(variant)]


ALL_VARIANTS = tuple(_PARAMS)
FULL_VARIANTS = (Variant.K512, Variant.K768, Variant.K1024)
