"""Belief-propagation recovery of (e, s) from the collected inequalities.

Unknown coefficients are variable nodes carrying a pmf over the CBD support;
each inequality is a check node.  A sweep computes, per check and per
participating unknown, the distribution of the linear form with that unknown
excluded -- by exact convolution at toy scale, by a central-limit normal at
full scale -- multiplies the satisfaction probability into the unknown's
marginal, renormalizes, and applies damping.  Updates within a sweep are
gathered synchronously so results do not depend on scheduling.

Key recovery follows the sweeps with a candidate-polish stage driven purely
by the inequality system: a bounded repair walk (plus, via the public key,
exhaustive disambiguation) on small systems, and alternating rounds of
coordinate descent and re-anchored sweeps on large ones.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import log_ndtr

from . import pke, ring
from .attack import RELATION_GE, RELATION_LT, Inequality
from .params import KyberParams

EXACT_MODE_MAX_UNKNOWNS = 20
_MIN_VARIANCE = 1.0   # cavity sums are integer-valued; tighter spreads are artifacts


class SolverMode(enum.Enum):
    EXACT = "exact"
    NORMAL_APPROX = "normal-approx"


@dataclass
class SolverConfig:
    max_iterations: int = 50
    tolerance: float = 1e-6
    mode: SolverMode = SolverMode.NORMAL_APPROX
    damping: float = 0.1   # measured sweet spot: 0 over-commits, 0.5 stalls in-budget
    repair_steps: Optional[int] = None   # None: auto (on for small systems only)
    message_floor: float = 1e-4   # normal mode: cap per-check damage (tail error guard)
    refine_rounds: int = 4   # large systems: alternating descent/anchored-sweep rounds

    def __post_init__(self) -> None:
        if not 0.0 <= self.damping < 1.0:
            raise ValueError("damping must lie in [0, 1)")

    def effective_repair_steps(self, unknown_count: int) -> int:
        if self.repair_steps is not None:
            return self.repair_steps
        return 25 * unknown_count if unknown_count <= EXACT_MODE_MAX_UNKNOWNS else 0


@dataclass
class MarginalTable:
    support: np.ndarray          # (V,) centered values -eta..eta
    probs: np.ndarray            # (U, V) rows summing to 1

    def copy(self) -> "MarginalTable":
        return MarginalTable(self.support.copy(), self.probs.copy())

    @property
    def unknown_count(self) -> int:
        return self.probs.shape[0]


@dataclass
class KeyCandidate:
    e_hat: np.ndarray            # (k, n) centered
    s_hat: np.ndarray            # (k, n) centered
    confidence: np.ndarray       # (2kn,) max marginal per unknown

    def flat(self) -> np.ndarray:
        return np.concatenate([self.e_hat.reshape(-1), self.s_hat.reshape(-1)])


def init_priors_like(unknown_count: int, eta: int) -> MarginalTable:
    support = np.arange(-eta, eta + 1, dtype=np.int64)
    pmf = ring.cbd_pmf(eta)
    return MarginalTable(support, np.tile(pmf, (unknown_count, 1)))


def init_priors(params: KyberParams) -> MarginalTable:
    """Every unknown starts at the centered-binomial pmf for eta1 (both the
    e and s blocks are drawn with eta1)."""
    return init_priors_like(params.unknown_count, params.eta1)


def canonical_checks(inequalities: Sequence[Inequality], unknown_count: int) -> tuple[np.ndarray, np.ndarray]:
    """Rewrite every inequality as  A_m . x <= c_m  (strictness and the known
    constant folded into c)."""
    m = len(inequalities)
    a = np.zeros((m, unknown_count), dtype=np.int64)
    c = np.zeros(m, dtype=np.int64)
    for row, ineq in enumerate(inequalities):
        if ineq.coeffs.shape[0] != unknown_count:
            raise ValueError(
                f"inequality has {ineq.coeffs.shape[0]} coefficients, expected {unknown_count}")
        if ineq.relation == RELATION_LT:
            a[row] = ineq.coeffs
            c[row] = ineq.threshold - ineq.constant - 1
        elif ineq.relation == RELATION_GE:
            a[row] = -ineq.coeffs
            c[row] = ineq.constant - ineq.threshold
        else:
            raise ValueError(f"unknown relation {ineq.relation!r}")
    return a, c


def _term_pmf(coeff: int, probs: np.ndarray, support: np.ndarray) -> tuple[np.ndarray, int]:
    """Dense pmf (values ascending) and offset of coeff * x under ``probs``."""
    width = abs(coeff) * (support.shape[0] - 1)
    dense = np.zeros(width + 1, dtype=np.float64)
    positions = coeff * support - (coeff * support).min()
    dense[positions] = probs
    return dense, int((coeff * support).min())


def _sweep_exact(probs: np.ndarray, support: np.ndarray, a: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Proposed marginals after one sweep, messages by exact convolution.

    Accumulates in probability space with per-message renormalization, which
    keeps small rational posteriors bit-exact.  A row whose messages zero it
    out entirely (contradictory checks) keeps its pre-sweep value.
    """
    proposed = probs.copy()
    dead = np.zeros(probs.shape[0], dtype=bool)
    for row in range(a.shape[0]):
        participants = np.nonzero(a[row])[0]
        if participants.size == 0:
            continue
        terms = [_term_pmf(int(a[row, u]), probs[u], support) for u in participants]
        # prefix[i] = pmf of terms < i, suffix[i] = pmf of terms > i
        one = (np.ones(1), 0)
        prefix = [one]
        for pmf, off in terms[:-1]:
            prev = prefix[-1]
            prefix.append((np.convolve(prev[0], pmf), prev[1] + off))
        suffix = [one]
        for pmf, off in reversed(terms[1:]):
            prev = suffix[-1]
            suffix.append((np.convolve(prev[0], pmf), prev[1] + off))
        suffix.reverse()
        for pos, u in enumerate(participants):
            if dead[u]:
                continue
            cav_pmf = np.convolve(prefix[pos][0], suffix[pos][0])
            cav_off = prefix[pos][1] + suffix[pos][1]
            cdf = np.cumsum(cav_pmf)
            limits = int(c[row]) - a[row, u] * support - cav_off
            sat = np.where(limits < 0, 0.0,
                           cdf[np.clip(limits, 0, cdf.shape[0] - 1)])
            updated = proposed[u] * sat
            total = updated.sum()
            if total > 0.0:
                proposed[u] = updated / total
            else:
                proposed[u] = probs[u]
                dead[u] = True
    return proposed


def _sweep_normal(probs: np.ndarray, support: np.ndarray, a: np.ndarray, c: np.ndarray,
                  message_floor: float) -> np.ndarray:
    """Proposed marginals with the excluded-sum approximated by a normal with
    matched mean/variance and a half-integer continuity correction; message
    products accumulate in log space for stability at thousands of checks."""
    x = support.astype(np.float64)
    mean_u = probs @ x
    var_u = probs @ x**2 - mean_u**2
    # float32 for the (checks x unknowns) intermediates: halves the sweep
    # cost; log-likelihoods still accumulate in float64
    af = a.astype(np.float32)
    af2 = af * af
    mean32 = mean_u.astype(np.float32)
    var32 = var_u.astype(np.float32)
    row_mean = af @ mean32
    row_var = af2 @ var32
    cav_mean = row_mean[:, None] - af * mean32[None, :]
    cav_std = np.sqrt(np.maximum(row_var[:, None] - af2 * var32[None, :],
                                 np.float32(_MIN_VARIANCE)))
    log_l = np.empty((probs.shape[0], x.shape[0]), dtype=np.float64)
    base = c.astype(np.float32)[:, None] + np.float32(0.5) - cav_mean
    # the normal tail is unreliable far out; flooring each check's message
    # bounds the damage any single approximate likelihood can do
    floor = np.float32(np.log(message_floor)) if message_floor > 0 else -np.inf
    for j, val in enumerate(x):
        z = (base - af * np.float32(val)) / cav_std
        log_l[:, j] = np.maximum(log_ndtr(z), floor).sum(axis=0, dtype=np.float64)
    peak = log_l.max(axis=1, keepdims=True)
    peak[~np.isfinite(peak)] = 0.0   # row of all-zero likelihoods
    proposed = probs * np.exp(log_l - peak)
    totals = proposed.sum(axis=1, keepdims=True)
    empty = totals[:, 0] == 0.0
    if np.any(empty):
        proposed[empty] = probs[empty]   # contradictory checks: keep the old row
        totals[empty] = 1.0
    return proposed / totals


def _blend(probs: np.ndarray, proposed: np.ndarray, damping: float) -> tuple[np.ndarray, float]:
    if damping == 0.0:
        updated = proposed
    else:
        updated = damping * probs + (1.0 - damping) * proposed
    updated = updated / updated.sum(axis=1, keepdims=True)
    return updated, float(np.abs(updated - probs).max(initial=0.0))


def bp_update(marginals: MarginalTable, inequalities: Sequence[Inequality],
              config: SolverConfig) -> tuple[MarginalTable, float]:
    """One synchronous sweep over all check nodes."""
    if not inequalities:
        return marginals.copy(), 0.0
    a, c = canonical_checks(inequalities, marginals.unknown_count)
    return _sweep(marginals, a, c, config)


def _sweep(marginals: MarginalTable, a: np.ndarray, c: np.ndarray,
           config: SolverConfig) -> tuple[MarginalTable, float]:
    if config.mode is SolverMode.EXACT:
        if marginals.unknown_count > EXACT_MODE_MAX_UNKNOWNS:
            raise ValueError(
                f"exact mode supports at most {EXACT_MODE_MAX_UNKNOWNS} unknowns")
        proposed = _sweep_exact(marginals.probs, marginals.support, a, c)
    else:
        proposed = _sweep_normal(marginals.probs, marginals.support, a, c,
                                 config.message_floor)
    probs, delta = _blend(marginals.probs, proposed, config.damping)
    return MarginalTable(marginals.support, probs), delta


def repair_candidate(values: np.ndarray, marginals: MarginalTable,
                     a: np.ndarray, c: np.ndarray, max_steps: int) -> tuple[np.ndarray, int, int]:
    """Greedy single-coordinate search toward an assignment satisfying every
    check, starting from the argmax candidate.

    Moves are ranked by (resulting violation count, marginal probability of
    the new value, coordinate, value), so the walk is deterministic; visited
    assignments are never revisited.  The inequality system is the only
    information used.  Returns (values, residual violations, steps taken).
    """
    support = marginals.support
    probs = marginals.probs
    values = values.copy()
    lhs = a @ values
    n_viol = int((lhs > c).sum())
    seen = {values.tobytes()}
    steps = 0
    value_index = {int(v): j for j, v in enumerate(support)}
    for _ in range(max_steps):
        if n_viol == 0:
            break
        best = None
        for u in range(values.size):
            here = int(values[u])
            for v in support:
                v = int(v)
                if v == here:
                    continue
                new_lhs = lhs + a[:, u] * (v - here)
                new_viol = int((new_lhs > c).sum())
                score = (new_viol, -probs[u, value_index[v]], u, v)
                if best is not None and score >= best[0]:
                    continue
                trial = values.copy()
                trial[u] = v
                if trial.tobytes() in seen:
                    continue
                best = (score, u, v, new_lhs, new_viol)
        if best is None:
            break
        _, u, v, lhs, n_viol = best
        values[u] = v
        seen.add(values.tobytes())
        steps += 1
    return values, n_viol, steps


def argmax_candidate(marginals: MarginalTable, params: KyberParams) -> KeyCandidate:
    """Per-unknown argmax; ties break toward smaller |value|, then negative."""
    support = marginals.support
    preference = sorted(range(support.shape[0]), key=lambda j: (abs(int(support[j])), int(support[j])))
    reordered = marginals.probs[:, preference]
    best = marginals.probs.max(axis=1)
    first_hit = np.argmax(reordered == best[:, None], axis=1)
    values = support[np.asarray(preference)[first_hit]]
    kn = params.k * params.n
    return KeyCandidate(values[:kn].reshape(params.k, params.n),
                        values[kn:].reshape(params.k, params.n),
                        best)


def coordinate_descent_repair(values: np.ndarray, a: np.ndarray, c: np.ndarray,
                              support: np.ndarray, passes: int = 40) -> tuple[np.ndarray, int]:
    """Gauss-Seidel descent on the squared violation margin sum((lhs - c)+^2).

    Smooth compared to counting violations, so the walk keeps moving where a
    count-based search stalls.  Returns (values, residual violation count).
    """
    values = values.copy()
    lhs = a @ values
    for _ in range(passes):
        changed = 0
        for u in range(values.size):
            col = a[:, u]
            base = lhs - col * values[u]
            best_v = None
            best_obj = None
            for v in support:
                margin = base + col * int(v) - c
                obj = float(np.square(np.maximum(margin, 0)).sum())
                if best_obj is None or obj < best_obj - 1e-12:
                    best_obj, best_v = obj, int(v)
            if best_v != values[u]:
                lhs = base + col * best_v
                values[u] = best_v
                changed += 1
        if changed == 0 or not np.any(lhs > c):
            break
    return values, int((lhs > c).sum())


_ANCHOR_MASS = 0.75
_ANCHOR_SWEEPS = 15


def _anchored_table(unknown_count: int, support: np.ndarray, values: np.ndarray) -> MarginalTable:
    spread = (1.0 - _ANCHOR_MASS) / (support.size - 1)
    probs = np.full((unknown_count, support.size), spread)
    probs[np.arange(unknown_count), values - int(support.min())] = _ANCHOR_MASS
    return MarginalTable(support.copy(), probs)


def _refine_large(values: np.ndarray, a: np.ndarray, c: np.ndarray,
                  config: SolverConfig, support: np.ndarray) -> tuple[np.ndarray, int, int]:
    """Alternate descent repair with sweeps re-anchored on the repaired
    assignment; stop on a clean assignment or when the residual stops
    strictly improving."""
    best_resid = None
    rounds = 0
    for _ in range(config.refine_rounds):
        values, resid = coordinate_descent_repair(values, a, c, support)
        rounds += 1
        if resid == 0 or (best_resid is not None and resid >= best_resid):
            return values, resid, rounds
        best_resid = resid
        table = _anchored_table(values.size, support, values)
        for _ in range(_ANCHOR_SWEEPS):
            table, delta = _sweep(table, a, c, config)
            if delta < config.tolerance:
                break
        values = support[table.probs.argmax(axis=1)]
    values, resid = coordinate_descent_repair(values, a, c, support)
    return values, resid, rounds


def _as_candidate(values: np.ndarray, params: KyberParams, confidence: np.ndarray) -> KeyCandidate:
    kn = params.k * params.n
    return KeyCandidate(values[:kn].reshape(params.k, params.n),
                        values[kn:].reshape(params.k, params.n), confidence)


def recover_key(inequalities: Sequence[Inequality], params: KyberParams,
                config: SolverConfig,
                true_unknowns: Optional[np.ndarray] = None,
                ) -> tuple[KeyCandidate, int, bool, dict]:
    """Iterate sweeps until the largest marginal change drops below tolerance
    or the iteration budget runs out, then polish the argmax candidate
    against the inequality system: a bounded repair walk on small systems,
    alternating descent/anchored-sweep rounds on large ones.  Returns the
    candidate, sweeps used, the convergence flag, and a report dict
    (per-block accuracy when ground truth is supplied)."""
    marginals = init_priors(params)
    if inequalities:
        a, c = canonical_checks(inequalities, marginals.unknown_count)
    iterations = 0
    converged = len(inequalities) == 0
    for _ in range(config.max_iterations):
        if not inequalities:
            break
        marginals, delta = _sweep(marginals, a, c, config)
        iterations += 1
        if delta < config.tolerance:
            converged = True
            break
    candidate = argmax_candidate(marginals, params)
    repair_budget = config.effective_repair_steps(marginals.unknown_count)
    repair_steps = residual = refine_rounds = 0
    small = marginals.unknown_count <= EXACT_MODE_MAX_UNKNOWNS
    if inequalities and small and repair_budget:
        values, residual, repair_steps = repair_candidate(
            candidate.flat(), marginals, a, c, repair_budget)
        candidate = _as_candidate(values, params, candidate.confidence)
    elif inequalities and not small and config.refine_rounds > 0:
        values = candidate.flat()
        if np.any((a @ values) > c):
            values, residual, refine_rounds = _refine_large(
                values, a, c, config, marginals.support)
            candidate = _as_candidate(values, params, candidate.confidence)
    report = {
        "iterations": iterations,
        "converged": converged,
        "inequalities": len(inequalities),
        "mode": config.mode.value,
        "repair_steps": repair_steps,
        "refine_rounds": refine_rounds,
        "residual_violations": residual,
    }
    if true_unknowns is not None:
        true_unknowns = np.asarray(true_unknowns, dtype=np.int64)
        kn = params.k * params.n
        flat = candidate.flat()
        report["accuracy"] = float(np.mean(flat == true_unknowns))
        report["accuracy_e"] = float(np.mean(flat[:kn] == true_unknowns[:kn]))
        report["accuracy_s"] = float(np.mean(flat[kn:] == true_unknowns[kn:]))
    return candidate, iterations, converged, report


def validate_candidate(pk: pke.PkePublicKey, candidate: KeyCandidate, params: KyberParams) -> bool:
    """True iff t = A * s_hat + e_hat holds exactly in R_q."""
    if candidate.s_hat.shape != (params.k, params.n):
        raise ValueError("candidate shape does not match parameters")
    a = pke._matrix_of(pk)
    t = (pke._matrix_vector(a, candidate.s_hat % params.q, params) + candidate.e_hat) % params.q
    return bool(np.array_equal(t, pk.t))


def enumerate_satisfying(a: np.ndarray, c: np.ndarray, support: np.ndarray,
                         node_limit: int = 2_000_000,
                         max_solutions: int = 65536) -> tuple[list[np.ndarray], bool]:
    """All assignments satisfying every canonical check  A . x <= c.

    Depth-first search over the unknowns with suffix-bound pruning: a branch
    dies as soon as some check cannot be satisfied even by the most favorable
    completion.  Returns (solutions, complete); ``complete`` is False when a
    search limit was hit.  Intended for small systems only.
    """
    n_unknowns = a.shape[1]
    lo = int(support.min())
    hi = int(support.max())
    contrib_min = np.minimum(a * lo, a * hi)
    # suffix_min[u] = least achievable contribution of unknowns u..end
    suffix_min = np.zeros((n_unknowns + 1, a.shape[0]), dtype=np.int64)
    for u in range(n_unknowns - 1, -1, -1):
        suffix_min[u] = suffix_min[u + 1] + contrib_min[:, u]
    solutions: list[np.ndarray] = []
    values = np.zeros(n_unknowns, dtype=np.int64)
    nodes = 0
    complete = True

    def descend(u: int, partial: np.ndarray) -> bool:
        nonlocal nodes, complete
        if u == n_unknowns:
            solutions.append(values.copy())
            return len(solutions) < max_solutions
        for v in support:
            nodes += 1
            if nodes > node_limit:
                complete = False
                return False
            nxt = partial + a[:, u] * int(v)
            if np.any(nxt + suffix_min[u + 1] > c):
                continue
            values[u] = int(v)
            if not descend(u + 1, nxt):
                return False
        return True

    if not descend(0, np.zeros(a.shape[0], dtype=np.int64)):
        complete = False   # stopped early: node budget or solution cap
    return solutions, complete


def disambiguate_candidate(pk: pke.PkePublicKey, candidate: KeyCandidate,
                           inequalities: Sequence[Inequality], params: KyberParams) -> KeyCandidate:
    """Resolve an under-determined small system by exhausting it.

    When the candidate fails the public-key equation, enumerate every
    assignment satisfying all checks and validate each; the key equation
    picks the real one.  Exponential in the worst case, so callers gate it
    to small systems the same way as the repair walk.
    """
    if validate_candidate(pk, candidate, params):
        return candidate
    if not inequalities:
        return candidate
    support = init_priors(params).support
    a, c = canonical_checks(inequalities, params.unknown_count)
    kn = params.k * params.n
    solutions, _complete = enumerate_satisfying(a, c, support)
    for values in solutions:
        trial = KeyCandidate(values[:kn].reshape(params.k, params.n),
                             values[kn:].reshape(params.k, params.n),
                             candidate.confidence)
        if validate_candidate(pk, trial, params):
            return trial
    return candidate


def recovery_report(report: dict, validated: bool) -> str:
    return json.dumps({**report, "validated": validated}, indent=2, sort_keys=True)
