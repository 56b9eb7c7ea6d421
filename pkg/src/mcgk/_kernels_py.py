"""Pure-Python implementations of the enumeration kernels.

Mirrors ``_kernels.pyx`` exactly (same algorithm, same output order) so the
two backends can be swapped freely and cross-checked.
"""
from math import gcd


def enumerate_counts(budget, weights):
    """All non-negative integer vectors ``a`` with ``sum(a[j] * weights[j]) == budget``.

    Output is in lexicographic order. Weights must be positive.
    """
    weights = list(weights)
    m = len(weights)
    out = []
    if budget < 0:
        return out
    if m == 0:
        if budget == 0:
            out.append(())
        return out
    counts = [0] * m

    def rec(j, remaining):
        w = weights[j]
        if j == m - 1:
            if remaining % w == 0:
                counts[j] = remaining // w
                out.append(tuple(counts))
            return
        for a in range(remaining // w + 1):
            counts[j] = a
            rec(j + 1, remaining - a * w)
        counts[j] = 0

    rec(0, budget)
    return out


def _candidates(n, m):
    # residues of exact order m in Z/n
    step = n // m
    return [step * u for u in range(1, m) if gcd(u, m) == 1]


def search_vectors(n, orders, need_generate, first_only):
    """Tuples ``c`` over Z/n with ord(c[j]) == orders[j] and sum(c) == 0 mod n.

    With ``need_generate`` the entries must also generate Z/n. The last entry
    is solved from the zero-sum condition instead of enumerated.
    """
    orders = list(orders)
    q = len(orders)
    if q == 0:
        if not need_generate or n == 1:
            return [()]
        return []
    cands = [_candidates(n, m) for m in orders]
    last_m = orders[-1]
    out = []
    vec = [0] * q

    def rec(j, s, g):
        if j == q - 1:
            c = (-s) % n
            if c == 0 or n // gcd(c, n) != last_m:
                return False
            if need_generate and gcd(g, c) != 1:
                return False
            vec[j] = c
            out.append(tuple(vec))
            return first_only
        for c in cands[j]:
            vec[j] = c
            if rec(j + 1, (s + c) % n, gcd(g, c)):
                return True
        return False

    rec(0, 0, n)
    return out
