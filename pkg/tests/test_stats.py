import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ltokit import DomainError, bh_adjust, bonferroni_adjust, fisher_two_sided, hypergeometric_upper_tail
from ltokit.stats import hypergeometric_pmf

from oracles import bh_direct, fisher_exact, hypergeom_tail_exact


class TestHypergeometric:
    def test_k_zero_is_one(self):
        assert hypergeometric_upper_tail(0, 3, 4, 10) == 1.0

    @pytest.mark.parametrize("n,k", [(0, 0), (3, 1), (3, 3), (7, 7)])
    def test_everything_marked(self, n, k):
        assert hypergeometric_upper_tail(k, 7, n, 7) == 1.0

    def test_frozen_values(self):
        # exact enumeration: 66 of the C(10, 5) = 252 draws
        assert hypergeometric_upper_tail(3, 4, 5, 10) == pytest.approx(66 / 252, abs=1e-12)
        assert hypergeometric_upper_tail(2, 2, 2, 12) == pytest.approx(1 / 66, abs=1e-12)

    def test_impossible_tail_is_zero(self):
        assert hypergeometric_upper_tail(3, 2, 5, 10) == 0.0

    @pytest.mark.parametrize("args", [(-1, 1, 1, 2), (3, 1, 2, 5), (1, 6, 2, 5), (1, 1, 6, 5), (1.0, 1, 1, 2)])
    def test_domain(self, args):
        with pytest.raises(DomainError):
            hypergeometric_upper_tail(*args)

    def test_matches_enumeration_small(self):
        for N in range(0, 13):
            for K, n in itertools.product(range(N + 1), repeat=2):
                for k in range(0, min(n, K) + 1):
                    got = hypergeometric_upper_tail(k, K, n, N)
                    assert abs(got - float(hypergeom_tail_exact(k, K, n, N))) <= 1e-9

    @given(st.integers(1, 60).flatmap(lambda N: st.tuples(st.just(N), st.integers(0, N), st.integers(0, N))))
    def test_monotone_in_k(self, args):
        N, K, n = args
        tails = [hypergeometric_upper_tail(k, K, n, N) for k in range(n + 1)]
        assert all(0.0 <= t <= 1.0 for t in tails)
        assert all(a >= b for a, b in zip(tails, tails[1:]))

    def test_pmf_sums_to_one(self):
        assert math.fsum(hypergeometric_pmf(i, 9, 6, 20) for i in range(7)) == pytest.approx(1.0, abs=1e-12)

    def test_large_counts_stay_finite(self):
        p = hypergeometric_upper_tail(150, 300, 200, 2656)
        assert 0.0 <= p < 1e-50


class TestFisher:
    def test_empty_table(self):
        assert fisher_two_sided(0, 0, 0, 0) == 1.0

    def test_frozen_values(self):
        # margins (4,4)/(4,4): point masses 1,16,36,16,1 over 70; all but the 36 qualify
        assert fisher_two_sided(3, 1, 1, 3) == pytest.approx(34 / 70, abs=1e-12)
        assert fisher_two_sided(2, 0, 0, 10) == pytest.approx(1 / 66, abs=1e-12)

    def test_balanced_table(self):
        assert fisher_two_sided(2, 2, 2, 2) == 1.0

    @given(st.integers(0, 30), st.integers(0, 30), st.integers(0, 30), st.integers(0, 30))
    def test_swap_invariance(self, a, b, c, d):
        p = fisher_two_sided(a, b, c, d)
        assert fisher_two_sided(c, d, a, b) == p
        assert fisher_two_sided(b, a, d, c) == p
        assert fisher_two_sided(a, c, b, d) == p
        assert 0.0 <= p <= 1.0

    def test_matches_enumeration_sample(self):
        rng = random.Random(0)
        for _ in range(300):
            a, b, c, d = (rng.randint(0, 10) for _ in range(4))
            assert abs(fisher_two_sided(a, b, c, d) - float(fisher_exact(a, b, c, d))) <= 1e-9

    def test_domain(self):
        with pytest.raises(DomainError):
            fisher_two_sided(-1, 0, 0, 0)


class TestAdjust:
    def test_bh_frozen(self):
        assert bh_adjust([0.01, 0.02, 0.03]) == pytest.approx([0.03, 0.03, 0.03], abs=1e-15)
        # hand evaluation: min over j >= i of p_(j) * 6 / j
        assert bh_adjust([0.005, 0.009, 0.05, 0.1, 0.2, 0.3]) == pytest.approx(
            [0.027, 0.027, 0.1, 0.15, 0.24, 0.3], abs=1e-12
        )

    def test_single_and_empty(self):
        assert bh_adjust([0.4]) == [0.4]
        assert bh_adjust([]) == []

    def test_all_equal(self):
        assert bh_adjust([0.2] * 5) == [0.2] * 5

    def test_clipped(self):
        assert bh_adjust([0.9, 0.95]) == [0.95, 0.95]
        assert max(bh_adjust([1.0, 0.7, 0.99])) <= 1.0

    @given(st.lists(st.floats(0, 1), min_size=1, max_size=10), st.randoms(use_true_random=False))
    def test_bh_permutation_invariant(self, ps, rnd):
        idx = list(range(len(ps)))
        rnd.shuffle(idx)
        q = bh_adjust(ps)
        q_perm = bh_adjust([ps[i] for i in idx])
        assert q_perm == [q[i] for i in idx]
        assert q == pytest.approx(bh_direct(ps), abs=1e-12)
        # monotone with respect to p ranks
        for i, j in itertools.permutations(range(len(ps)), 2):
            if ps[i] <= ps[j]:
                assert q[i] <= q[j]

    def test_domain(self):
        with pytest.raises(DomainError):
            bh_adjust([0.5, 1.5])
        with pytest.raises(DomainError):
            bh_adjust([float("nan")])

    def test_bonferroni(self):
        assert bonferroni_adjust([0.01, 0.5]) == [0.02, 1.0]


def test_oracles_agree_with_fractions():
    # sanity of the oracles themselves on values computed by hand
    assert hypergeom_tail_exact(3, 4, 5, 10) == Fraction(66, 252)
    assert fisher_exact(3, 1, 1, 3) == Fraction(34, 70)
    assert fisher_exact(2, 0, 0, 10) == Fraction(1, 66)
