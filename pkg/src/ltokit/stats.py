"""Exact tests for theme counts: hypergeometric tail, Fisher 2x2, p-value adjustment.

All combinatorics go through ``math.lgamma`` and are exponentiated at the end.
Sums use ``math.fsum`` so results do not depend on summation order.
"""

from __future__ import annotations

import math
from typing import Sequence

from .diagnostics import DomainError

__all__ = [
    "bh_adjust",
    "bonferroni_adjust",
    "fisher_two_sided",
    "hypergeometric_pmf",
    "hypergeometric_upper_tail",
    "log_choose",
]

#: relative slack when comparing table probabilities in the Fisher test
FISHER_RELATIVE_TOLERANCE = 1e-7


def _check_int(name, value):
    if isinstance(value, bool) or not isinstance(value, int):
        raise DomainError(f"{name} must be an integer, got {value!r}")
    if value < 0:
        raise DomainError(f"{name} must be non-negative, got {value}")


def log_choose(n: int, k: int) -> float:
    if k < 0 or k > n:
        return -math.inf
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def _log_pmf(i, K, n, N):
    return log_choose(K, i) + log_choose(N - K, n - i) - log_choose(N, n)


def hypergeometric_pmf(i: int, K: int, n: int, N: int) -> float:
    """P(X = i) for X the marked count in ``n`` draws from ``N`` items, ``K`` marked."""
    lo, hi = max(0, n - (N - K)), min(n, K)
    if i < lo or i > hi:
        return 0.0
    return math.exp(_log_pmf(i, K, n, N))


def hypergeometric_upper_tail(k: int, K: int, n: int, N: int) -> float:
    """P(X >= k) when drawing ``n`` of ``N`` items of which ``K`` are marked.

    Requires ``0 <= k <= n <= N`` and ``0 <= K <= N``.
    """
    for name, value in (("k", k), ("K", K), ("n", n), ("N", N)):
        _check_int(name, value)
    if k > n or n > N or K > N:
        raise DomainError(f"need 0 <= k <= n <= N and K <= N, got k={k} K={K} n={n} N={N}")
    lo, hi = max(0, n - (N - K)), min(n, K)
    if k <= lo:
        return 1.0
    if k > hi:
        return 0.0
    total = math.fsum(math.exp(_log_pmf(i, K, n, N)) for i in range(k, hi + 1))
    return min(1.0, max(0.0, total))


def fisher_two_sided(a: int, b: int, c: int, d: int) -> float:
    """Two-sided Fisher exact test for the table ``[[a, b], [c, d]]``.

    Sums the probabilities of every table with the same margins that is no
    more likely than the observed one (with a 1e-7 relative slack).
    """
    for name, value in (("a", a), ("b", b), ("c", c), ("d", d)):
        _check_int(name, value)
    r1, r2, c1, c2 = a + b, c + d, a + c, b + d
    N = r1 + r2
    const = math.fsum(
        [math.lgamma(r1 + 1), math.lgamma(r2 + 1), math.lgamma(c1 + 1), math.lgamma(c2 + 1), -math.lgamma(N + 1)]
    )

    def log_table(x):
        # table with top-left cell x and the observed margins
        cells = (x, r1 - x, c1 - x, r2 - c1 + x)
        return const - math.fsum(math.lgamma(v + 1) for v in cells)

    lo, hi = max(0, c1 - r2), min(r1, c1)
    observed = log_table(a)
    cutoff = observed + math.log1p(FISHER_RELATIVE_TOLERANCE)
    logs = [log_table(x) for x in range(lo, hi + 1)]
    total = math.fsum(math.exp(lp) for lp in logs)
    tail = math.fsum(math.exp(lp) for lp in logs if lp <= cutoff)
    # dividing by the computed total absorbs lgamma rounding, so a table with
    # every outcome in the tail comes out at exactly 1
    return min(1.0, tail / total)


def _check_pvalues(pvalues):
    ps = [float(p) for p in pvalues]
    for p in ps:
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"p-value out of [0, 1]: {p!r}")
    return ps


def bh_adjust(pvalues: Sequence[float]) -> list[float]:
    """Benjamini-Hochberg step-up adjusted values, in input order."""
    ps = _check_pvalues(pvalues)
    m = len(ps)
    order = sorted(range(m), key=ps.__getitem__)
    out = [0.0] * m
    running = 1.0
    for rank in range(m, 0, -1):
        idx = order[rank - 1]
        running = min(running, ps[idx] * m / rank)
        out[idx] = running
    return out


def bonferroni_adjust(pvalues: Sequence[float]) -> list[float]:
    ps = _check_pvalues(pvalues)
    return [min(1.0, p * len(ps)) for p in ps]
