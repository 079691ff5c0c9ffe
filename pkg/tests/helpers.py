"""Independent oracles for the test suite.

Everything here is written deliberately differently from the package code:
index-loop polynomial arithmetic with an explicit x^n = -1 rule, float-based
rounding, and brute-force enumeration.  Slow, obvious, and used as ground
truth.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

# Reference toy-parameter fixture (q = 17, x^4 + 1): a worked keypair plus
# one set of encryption coins, usable verbatim at toy scale.
TOY_Q = 17
TOY_A = [[[11, 15, 14, 6], [3, 6, 7, 9]], [[12, 10, 3, 5], [15, 4, 1, 9]]]
TOY_S = [[0, 1, -1, -1], [0, -1, 0, -1]]
TOY_E = [[0, 0, 1, 0], [0, -1, 1, 0]]
TOY_R = [[0, 1, 0, -1], [-1, 1, 0, 1]]
TOY_E1 = [[1, 0, 1, 0], [0, 0, 1, 0]]
TOY_E2 = [0, -1, 0, -1]


def oracle_negacyclic_mul(a, b, q):
    """Schoolbook product in Z_q[x]/(x^n + 1), one index pair at a time."""
    n = len(a)
    assert len(b) == n
    out = [0] * n
    for i in range(n):
        for j in range(n):
            k = i + j
            if k < n:
                out[k] = (out[k] + a[i] * b[j]) % q
            else:
                out[k - n] = (out[k - n] - a[i] * b[j]) % q
    return [x % q for x in out]


def oracle_matrix_vector(a, vec, q, transpose=False):
    k = len(vec)
    n = len(vec[0])
    out = []
    for i in range(k):
        acc = [0] * n
        for j in range(k):
            entry = a[j][i] if transpose else a[i][j]
            prod = oracle_negacyclic_mul(entry, vec[j], q)
            acc = [(x + y) % q for x, y in zip(acc, prod)]
        out.append(acc)
    return out


def oracle_round_half_up(x: Fraction) -> int:
    return math.floor(x + Fraction(1, 2))


def oracle_compress(x, d, q):
    return oracle_round_half_up(Fraction(2**d * x, q)) % 2**d


def oracle_decompress(x, d, q):
    return oracle_round_half_up(Fraction(q * x, 2**d))


def oracle_decode_bit(a, q):
    return 0 if min(abs(a - q), abs(a)) < q / 4 else 1


def centered(x, q):
    x = x % q
    return x - q if x > q // 2 else x


def oracle_toy_encrypt(a, t, r, e1, e2, m_bits, q, du, dv):
    """Straight-line toy encryption returning compressed (c1, c2)."""
    n = len(t[0])
    u = oracle_matrix_vector(a, [[c % q for c in p] for p in r], q, transpose=True)
    u = [[(x + y) % q for x, y in zip(u[i], e1[i])] for i in range(len(u))]
    half = oracle_round_half_up(Fraction(q, 2))
    v = [0] * n
    for j in range(len(t)):
        prod = oracle_negacyclic_mul(t[j], [c % q for c in r[j]], q)
        v = [(x + y) % q for x, y in zip(v, prod)]
    v = [(v[i] + e2[i] + half * m_bits[i]) % q for i in range(n)]
    c1 = [[oracle_compress(x, du, q) for x in p] for p in u]
    c2 = [oracle_compress(x, dv, q) for x in v]
    return c1, c2, u, v


def oracle_toy_decrypt(s, c1, c2, q, du, dv):
    n = len(c2)
    u_prime = [[oracle_decompress(x, du, q) for x in p] for p in c1]
    v_prime = [oracle_decompress(x, dv, q) for x in c2]
    su = [0] * n
    for j in range(len(s)):
        prod = oracle_negacyclic_mul([c % q for c in s[j]], u_prime[j], q)
        su = [(x + y) % q for x, y in zip(su, prod)]
    rec = [(v_prime[i] - su[i]) % q for i in range(n)]
    return [oracle_decode_bit(x, q) for x in rec], rec


def oracle_error_poly(s, e, r, e1, e2, delta_u, delta_v, q):
    """e^T r - s^T (e1 + du) + e2 + dv via integer schoolbook products."""
    n = len(e2)
    k = len(s)
    total = [0] * n
    for t in range(k):
        er = _int_negacyclic(e[t], r[t])
        se = _int_negacyclic(s[t], [a + b for a, b in zip(e1[t], delta_u[t])])
        total = [x + p - m for x, p, m in zip(total, er, se)]
    return [centered(total[i] + e2[i] + delta_v[i], q) for i in range(n)]


def _int_negacyclic(a, b):
    n = len(a)
    out = [0] * n
    for i in range(n):
        for j in range(n):
            if i + j < n:
                out[i + j] += a[i] * b[j]
            else:
                out[i + j - n] -= a[i] * b[j]
    return out


def enumerate_assignments(support, count):
    """All value tuples over ``support`` for ``count`` unknowns."""
    import itertools

    return itertools.product(support, repeat=count)


def oracle_sweep_posterior(priors, support, inequalities):
    """Replicate one synchronous sweep by brute force: for every unknown and
    candidate value, the satisfaction probability of each check under the
    current marginals of the other unknowns, multiplied into the prior."""
    n_unknowns = len(priors)
    values = list(support)
    out = []
    for u in range(n_unknowns):
        row = np.array(priors[u], dtype=float).copy()
        for j, val in enumerate(values):
            for ineq in inequalities:
                p_sat = 0.0
                others = [w for w in range(n_unknowns) if w != u]
                for assignment in enumerate_assignments(values, len(others)):
                    weight = 1.0
                    for w, a_val in zip(others, assignment):
                        weight *= priors[w][values.index(a_val)]
                    full = {u: val, **dict(zip(others, assignment))}
                    if ineq.evaluate(np.array([full[w] for w in range(n_unknowns)])):
                        p_sat += weight
                row[j] *= p_sat
        total = row.sum()
        out.append(row / total if total > 0 else np.array(priors[u], dtype=float))
    return np.array(out)


def oracle_true_posterior(priors, support, inequalities):
    """Exact joint posterior marginals by full enumeration (hard constraints)."""
    values = list(support)
    n_unknowns = len(priors)
    post = np.zeros((n_unknowns, len(values)))
    for assignment in enumerate_assignments(values, n_unknowns):
        weight = 1.0
        for u, val in enumerate(assignment):
            weight *= priors[u][values.index(val)]
        vec = np.array(assignment)
        if all(ineq.evaluate(vec) for ineq in inequalities):
            for u, val in enumerate(assignment):
                post[u, values.index(val)] += weight
    sums = post.sum(axis=1, keepdims=True)
    sums[sums == 0] = 1.0
    return post / sums
