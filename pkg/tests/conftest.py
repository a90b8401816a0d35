"""Shared pure-Python oracles for the test suite.

Everything here is deliberately written without numpy vectorization so it
stays an independent cross-check of the library's array code.
"""

import math


def spacing_oracle(values, m):
    """Plain-Python spacing entropy estimate; None if a spacing is zero."""
    s = sorted(values)
    n = len(s)
    total = 0.0
    for i in range(n):
        gap = s[min(i + m, n - 1)] - s[max(i - m, 0)]
        if gap <= 0.0:
            return None
        total += math.log(gap)
    return math.log(n / (2.0 * m)) + total / n


def window_bound_oracle(n, delta, extend):
    """Upper end of the candidate window range, recomputed independently."""
    top = (n - 1) // 2
    if extend:
        return top
    return min(max(int(math.floor(n ** (1.0 / 3.0 - delta) + 1e-9)), 1), top)


def select_window_oracle(values, mean_loglik, delta, extend, relax):
    """Brute-force window selection.

    Returns ("ties", None), ("constraint", None) or ("ok", m) where m is the
    smallest window maximizing the spacing estimate over the admissible set.
    """
    n = len(values)
    upper = window_bound_oracle(n, delta, extend)
    best_m, best_v, any_computable = None, None, False
    for m in range(1, upper + 1):
        v = spacing_oracle(values, m)
        if v is None:
            continue
        any_computable = True
        if not relax and v > -mean_loglik:
            continue
        if best_v is None or v > best_v:
            best_m, best_v = m, v
    if best_m is None:
        return ("ties", None) if not any_computable else ("constraint", None)
    return ("ok", best_m)
