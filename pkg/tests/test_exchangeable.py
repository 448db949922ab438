"""Exchangeable leaf: counting statistic, class sizes, fitting, inference.

Expected values for the derived cases are computed by independent
oracles: a Pascal-triangle table for binomial coefficients, exhaustive
enumeration of completions for evidence queries, and direct tabulation
of all 2^n assignment probabilities for evaluation.
"""

import itertools
import math

import numpy as np
import pytest

from xspn.exchangeable import (
    ExchangeableLeaf,
    class_size,
    consistent_class_size,
    count_ones,
)


def pascal_triangle(n_max):
    """Binomial coefficients by the additive recurrence; exact integers."""
    rows = [[1]]
    for n in range(1, n_max + 1):
        prev = rows[-1]
        row = [1]
        for k in range(1, n):
            row.append(prev[k - 1] + prev[k])
        row.append(1)
        rows.append(row)
    return rows


def enumerate_probabilities(leaf):
    """All 2^n assignment probabilities, straight from the weight vector."""
    n = leaf.n
    table = {}
    for bits in itertools.product((0, 1), repeat=n):
        table[bits] = leaf.weights[sum(bits)]
    return table


class TestCountOnes:
    def test_all_zeros(self):
        assert count_ones((0, 0, 0)) == 0

    def test_all_ones(self):
        assert count_ones((1, 1, 1)) == 3

    def test_mixed(self):
        assert count_ones((1, 0, 1, 0)) == 2

    def test_rejects_non_binary(self):
        with pytest.raises(ValueError):
            count_ones((0, 2, 1))


class TestClassSize:
    def test_small(self):
        assert class_size(3, 1) == 3

    def test_boundary(self):
        assert class_size(100, 0) == 1
        assert class_size(100, 100) == 1

    def test_against_pascal_recurrence(self):
        rows = pascal_triangle(100)
        for n in (5, 17, 60, 100):
            for t in range(n + 1):
                assert class_size(n, t) == rows[n][t]
        # the n = 100 midpoint overflows 64-bit integers
        assert class_size(100, 50) == rows[100][50]
        assert class_size(100, 50) > 2**63

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            class_size(3, 4)
        with pytest.raises(ValueError):
            class_size(3, -1)


class TestConsistentClassSize:
    def test_forced(self):
        assert consistent_class_size(3, 1, 1, 1) == 1

    def test_impossible(self):
        assert consistent_class_size(3, 1, 1, 0) == 0

    def test_enumeration_case(self):
        # n=10, 4 observed with 2 ones, class t=5: completions with 3 ones among 6
        free = 6
        want = sum(1 for bits in itertools.product((0, 1), repeat=free) if sum(bits) == 3)
        assert want == 20
        assert consistent_class_size(10, 4, 2, 5) == want

    def test_full_enumeration_small(self):
        for n in range(1, 8):
            for n_obs in range(n + 1):
                for ones_obs in range(n_obs + 1):
                    free = n - n_obs
                    per_t = np.zeros(n + 1, dtype=int)
                    for bits in itertools.product((0, 1), repeat=free):
                        per_t[ones_obs + sum(bits)] += 1
                    for t in range(n + 1):
                        assert consistent_class_size(n, n_obs, ones_obs, t) == per_t[t]


class TestFit:
    def test_uniform_four_samples(self):
        X = np.array([[0, 0], [0, 1], [1, 0], [1, 1]])
        leaf = ExchangeableLeaf.fit((0, 1), X, alpha=0.0)
        np.testing.assert_allclose(leaf.weights, [0.25, 0.25, 0.25])

    def test_point_mass(self):
        X = np.array([[1, 1]] * 5)
        leaf = ExchangeableLeaf.fit((0, 1), X, alpha=0.0)
        np.testing.assert_allclose(leaf.weights, [0.0, 0.0, 1.0])

    def test_ml_closed_form_hand_case(self):
        # 6 samples over 3 vars: classes t=1 x4, t=2 x2
        X = np.array([[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 0, 0], [1, 1, 0], [0, 1, 1]])
        leaf = ExchangeableLeaf.fit((0, 1, 2), X, alpha=0.0)
        want = np.array([0.0, (4 / 6) / 3, (2 / 6) / 3, 0.0])
        np.testing.assert_allclose(leaf.weights, want, atol=1e-15)

    def test_monte_carlo_convergence(self):
        rng = np.random.default_rng(42)
        class_probs = np.array([0.1, 0.2, 0.4, 0.3])  # over t = 0..3
        n, N = 3, 20000
        ts = rng.choice(4, size=N, p=class_probs)
        X = np.zeros((N, n), dtype=np.int8)
        for i, t in enumerate(ts):
            X[i, rng.choice(n, size=t, replace=False)] = 1
        leaf = ExchangeableLeaf.fit(range(n), X, alpha=0.0)
        got_class_probs = leaf.weights * np.array([math.comb(n, t) for t in range(n + 1)])
        np.testing.assert_allclose(got_class_probs, class_probs, atol=0.02)

    @pytest.mark.parametrize("alpha", [0.0, 0.1, 1.0, 7.5])
    def test_normalization_after_fit(self, alpha):
        rng = np.random.default_rng(3)
        for n in (1, 2, 5, 12, 40):
            X = rng.integers(0, 2, size=(50, n))
            leaf = ExchangeableLeaf.fit(range(n), X, alpha=alpha)
            total = sum(
                float(leaf.weights[t]) * math.comb(n, t) for t in range(n + 1)
            )
            assert total == pytest.approx(1.0, abs=1e-9)

    def test_fit_column_permutation_equivariant(self):
        rng = np.random.default_rng(9)
        X = rng.integers(0, 2, size=(200, 6))
        perm = rng.permutation(6)
        a = ExchangeableLeaf.fit(range(6), X, alpha=0.1)
        b = ExchangeableLeaf.fit(range(6), X[:, perm], alpha=0.1)
        np.testing.assert_array_equal(a.weights, b.weights)


class TestLogProb:
    def test_uniform(self):
        leaf = ExchangeableLeaf((0, 1), np.array([0.25, 0.25, 0.25]))
        assert leaf.log_prob((1, 0)) == pytest.approx(math.log(0.25))

    def test_zero_weight_is_neg_inf(self):
        leaf = ExchangeableLeaf((0, 1), np.array([0.0, 0.0, 1.0]))
        assert leaf.log_prob((0, 1)) == -np.inf

    def test_matches_tabulated_probabilities(self):
        rng = np.random.default_rng(5)
        X = rng.integers(0, 2, size=(300, 5))
        leaf = ExchangeableLeaf.fit(range(5), X, alpha=0.1)
        table = enumerate_probabilities(leaf)
        for bits in itertools.product((0, 1), repeat=5):
            assert leaf.log_prob(bits) == math.log(table[bits])

    def test_permutation_invariance_exact(self):
        rng = np.random.default_rng(8)
        X = rng.integers(0, 2, size=(100, 4))
        leaf = ExchangeableLeaf.fit(range(4), X, alpha=0.1)
        x = np.array([1, 1, 0, 1])
        base = leaf.log_prob(x)
        for perm in itertools.permutations(range(4)):
            assert leaf.log_prob(x[list(perm)]) == base


class TestLogMarginal:
    def test_empty_evidence(self):
        rng = np.random.default_rng(11)
        X = rng.integers(0, 2, size=(60, 7))
        leaf = ExchangeableLeaf.fit(range(7), X, alpha=0.1)
        assert leaf.log_marginal([-1] * 7) == pytest.approx(0.0, abs=1e-12)

    def test_uniform_single_observation(self):
        leaf = ExchangeableLeaf((0, 1), np.array([0.25, 0.25, 0.25]))
        assert leaf.log_marginal([-1, 1]) == pytest.approx(math.log(0.5))

    def test_full_evidence_reduces_to_log_prob(self):
        rng = np.random.default_rng(12)
        X = rng.integers(0, 2, size=(80, 6))
        leaf = ExchangeableLeaf.fit(range(6), X, alpha=0.1)
        x = np.array([1, 0, 1, 1, 0, 0])
        assert leaf.log_marginal(x) == pytest.approx(leaf.log_prob(x), rel=1e-12)

    def test_matches_enumeration_oracle(self):
        rng = np.random.default_rng(13)
        for n in (2, 5, 9, 12):
            X = rng.integers(0, 2, size=(150, n))
            leaf = ExchangeableLeaf.fit(range(n), X, alpha=0.1)
            table = enumerate_probabilities(leaf)
            for _ in range(10):
                e = rng.choice([-1, 0, 1], size=n)
                total = 0.0
                for bits in itertools.product((0, 1), repeat=n):
                    if all(ev == -1 or ev == b for ev, b in zip(e, bits)):
                        total += table[bits]
                assert leaf.log_marginal(e) == pytest.approx(math.log(total), rel=1e-9)

    def test_marginal_consistency_one_variable(self):
        # summing one variable out equals logsumexp of the two extensions
        rng = np.random.default_rng(14)
        X = rng.integers(0, 2, size=(120, 6))
        leaf = ExchangeableLeaf.fit(range(6), X, alpha=0.1)
        for _ in range(20):
            e = rng.choice([-1, 0, 1], size=6)
            free = np.flatnonzero(e == -1)
            if len(free) == 0:
                continue
            i = int(free[0])
            e0, e1 = e.copy(), e.copy()
            e0[i], e1[i] = 0, 1
            want = np.logaddexp(leaf.log_marginal(e0), leaf.log_marginal(e1))
            assert leaf.log_marginal(e) == pytest.approx(float(want), rel=1e-12)
