"""Fault-enabled chosen-ciphertext attack loop.

Each trial encapsulates honestly (so the attacker knows the coins, the
rounding residues and the true shared key), shifts one compressed coefficient
of c2 by a quarter of its range, queries the faulted decapsulation, and turns
the success/failure bit into one linear inequality over the 2kn unknown
(e, s) coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import encoding, pke, ring
from .kem import EncapsTranscript, FaultMode, FaultSpec, KemKeyPair, decaps, encaps
from .params import KyberParams

RELATION_LT = "LT"
RELATION_GE = "GE"


@dataclass
class Manipulation:
    coeff_index: int
    delta_compressed: int   # added to c2[i] modulo 2^dv; always 2^(dv-2)
    delta_raw: int          # decompress(c2') - decompress(c2), unreduced
    delta: int              # the same shift centered mod q (about +q/4)


@dataclass
class Inequality:
    """coeffs . (e, s) + constant  <relation>  threshold.

    Layout: first k*n entries multiply the noise vector e (block per
    polynomial, ascending coefficient), the last k*n multiply s.

    The relation records which side of the boundary the oracle observed:
    LT (lhs < threshold) for a surviving bit, GE (lhs >= threshold) for a
    flipped one.  Either way ``lhs < threshold`` is the survival predicate,
    so on the true key ``predicate`` reproduces the oracle outcome and
    ``evaluate`` (the stored relation) holds.
    """
    coeffs: np.ndarray
    constant: int
    relation: str           # RELATION_LT: lhs < threshold; RELATION_GE: lhs >= threshold
    threshold: int

    def lhs(self, unknowns: np.ndarray) -> int:
        return int(self.coeffs @ np.asarray(unknowns, dtype=np.int64)) + self.constant

    def evaluate(self, unknowns: np.ndarray) -> bool:
        lhs = self.lhs(unknowns)
        return lhs < self.threshold if self.relation == RELATION_LT else lhs >= self.threshold

    def predicate(self, unknowns: np.ndarray) -> bool:
        """Survival-side predicate; equals the recorded oracle outcome when
        evaluated on the true (e, s)."""
        return self.lhs(unknowns) < self.threshold


@dataclass
class AttackTrial:
    index: int
    coeff_index: int
    manipulation: Manipulation
    outcome: bool
    inequality: Inequality


@dataclass
class AttackTranscript:
    entries: list[AttackTrial]

    @property
    def inequalities(self) -> list[Inequality]:
        return [t.inequality for t in self.entries]


def craft_manipulation(ct: pke.PkeCiphertext, i: int, params: KyberParams) -> tuple[pke.PkeCiphertext, Manipulation]:
    """Add 2^(dv-2) to compressed c2[i]; the decompressed shift is ~q/4 mod q
    whatever the starting value (the raw difference goes negative on wrap)."""
    if not 0 <= i < params.n:
        raise ValueError(f"coefficient index {i} out of range [0, {params.n})")
    step = 1 << (params.dv - 2)
    mod = 1 << params.dv
    c2 = np.asarray(ct.c2, dtype=np.int64).copy()
    old = int(c2[i])
    new = (old + step) % mod
    c2[i] = new
    raw = ring.decompress(new, params.dv, params.q) - ring.decompress(old, params.dv, params.q)
    manip = Manipulation(i, step, raw, int(ring.center_mod(raw, params.q)))
    return pke.PkeCiphertext(params.variant, ct.c1, c2), manip


def undo_manipulation(ct: pke.PkeCiphertext, manip: Manipulation, params: KyberParams) -> pke.PkeCiphertext:
    mod = 1 << params.dv
    c2 = np.asarray(ct.c2, dtype=np.int64).copy()
    c2[manip.coeff_index] = (c2[manip.coeff_index] - manip.delta_compressed) % mod
    return pke.PkeCiphertext(params.variant, ct.c1, c2)


def fault_oracle(keypair: KemKeyPair, ct_manipulated: pke.PkeCiphertext,
                 manipulation: Manipulation, true_key: bytes) -> bool:
    """True iff the faulted decapsulation still yields the honest shared key,
    i.e. the targeted message bit survived the shift."""
    spec = FaultSpec(FaultMode.CORRECT_MANIPULATION, manipulation)
    return decaps(keypair.bundle, ct_manipulated, spec) == true_key


def survival_bound(m_bit: int, delta: int, q: int) -> int:
    """Largest centered error value d for which the decoded bit is unchanged
    after adding delta to the reconstruction coefficient.

    The 0-side of the decode map covers [0, A] and [B, q) with A = (q-1)//4
    and B = 3q//4 + 1; shifting by delta ~ q/4 turns the per-bit survival
    condition into d <= bound on the branch where |d| stays below q/4.
    """
    a_max = (q - 1) // 4
    if m_bit == 0:
        return a_max - delta
    b_min = (3 * q) // 4 + 1
    return (b_min - 1) - (q + 1) // 2 - delta


def derive_inequality(outcome: bool, transcript: EncapsTranscript,
                      manipulation: Manipulation, params: KyberParams) -> Inequality:
    """Linear form of the error coefficient d_i in the unknowns (e, s).

    Coefficient i of a negacyclic product a*b is sum_h sign(h,i) a_h b_{(i-h) mod n}
    with sign +1 when h <= i and -1 otherwise; applying that to
    e^T r - s^T (e1 + du) gives the e- and s-block weights, while
    e2_i + dv_i is a known constant.
    """
    n, k = params.n, params.k
    i = manipulation.coeff_index
    h = np.arange(n)
    sgn = np.where(h <= i, 1, -1).astype(np.int64)
    idx = (i - h) % n
    e_blocks = [sgn * transcript.coins.r[t][idx] for t in range(k)]
    s_blocks = [-sgn * (transcript.coins.e1[t] + transcript.delta_u[t])[idx] for t in range(k)]
    coeffs = np.concatenate(e_blocks + s_blocks)
    constant = int(transcript.coins.e2[i] + transcript.delta_v[i])
    bound = survival_bound(int(transcript.m_bits[i]), manipulation.delta, params.q)
    relation = RELATION_LT if outcome else RELATION_GE
    return Inequality(coeffs, constant, relation, bound + 1)


def _trial_randomness(seed: bytes, index: int) -> tuple[bytes, int]:
    block = encoding.kdf(b"attack-trial" + seed + index.to_bytes(4, "big"), 40)
    return block[:32], int.from_bytes(block[32:], "big")


def select_target_index(ct: pke.PkeCiphertext, transcript: EncapsTranscript,
                        params: KyberParams, tiebreak: int = 0) -> int:
    """Most informative coefficient to manipulate in this encapsulation.

    The attacker already knows each coefficient's constant e2_i + dv_i and
    shift; the oracle answer carries the most information where the survival
    boundary sits closest to the center of the (symmetric, zero-mean)
    unknown-dependent sum.  Equally-informative indices are broken by the
    caller-provided draw, which keeps toy-scale systems (few indices, coarse
    margins) from collapsing onto repeated patterns.
    """
    q = params.q
    step = 1 << (params.dv - 2)
    mod = 1 << params.dv
    c2 = np.asarray(ct.c2, dtype=np.int64)
    raw = (ring.decompress((c2 + step) % mod, params.dv, q)
           - ring.decompress(c2, params.dv, q))
    delta = ring.center_mod(raw, q)
    a_max = (q - 1) // 4
    b_min = (3 * q) // 4 + 1
    bound_zero = a_max - delta
    bound_one = (b_min - 1) - (q + 1) // 2 - delta
    bounds = np.where(transcript.m_bits == 0, bound_zero, bound_one)
    margin = bounds - (transcript.coins.e2 + transcript.delta_v)
    bias = np.abs(2 * margin + 1)
    best = np.nonzero(bias == bias.min())[0]
    return int(best[tiebreak % best.size])


def collect_inequalities(keypair: KemKeyPair, count: int, seed: bytes) -> AttackTranscript:
    """Run independent fault trials until ``count`` inequalities are emitted:
    fresh encapsulation, informed target choice, one inequality each.
    Deterministic in seed.

    Each encapsulation is first checked with an ordinary (unfaulted)
    decapsulation query; ones that do not round-trip are discarded.  The
    attacker knows the true key, so this costs one extra query per trial and
    keeps genuinely failing ciphertexts (a toy-scale phenomenon) from
    polluting the inequality system.
    """
    params = keypair.params
    entries = []
    attempt = 0
    while len(entries) < count:
        m_seed, tiebreak = _trial_randomness(seed, attempt)
        attempt += 1
        ct, key, transcript = encaps(keypair.pk, m_seed)
        if decaps(keypair.bundle, ct) != key:
            continue
        i = select_target_index(ct, transcript, params, tiebreak)
        ct_manip, manip = craft_manipulation(ct, i, params)
        outcome = fault_oracle(keypair, ct_manip, manip, key)
        entries.append(AttackTrial(len(entries), i, manip, outcome,
                                   derive_inequality(outcome, transcript, manip, params)))
    return AttackTranscript(entries)


# --- text serialization (one record per line) -------------------------------

def dump_inequalities(inequalities: Iterable[Inequality]) -> str:
    lines = []
    for ineq in inequalities:
        coeffs = " ".join(str(int(c)) for c in ineq.coeffs)
        lines.append(f"{ineq.relation} {ineq.threshold} {ineq.constant} {coeffs}")
    return "\n".join(lines) + "\n"


def parse_inequalities(text: str) -> list[Inequality]:
    out = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        parts = line.split()
        relation = parts[0]
        if relation not in (RELATION_LT, RELATION_GE):
            raise ValueError(f"unknown relation {relation!r}")
        out.append(Inequality(np.array([int(x) for x in parts[3:]], dtype=np.int64),
                              int(parts[2]), relation, int(parts[1])))
    return out


def save_inequalities(path, inequalities: Iterable[Inequality]) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(dump_inequalities(inequalities))


def load_inequalities(path) -> list[Inequality]:
    with open(path, encoding="ascii") as fh:
        return parse_inequalities(fh.read())
