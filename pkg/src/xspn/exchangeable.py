"""Exchangeable distributions over binary variables under the ones-count statistic.

An assignment x of n binary variables falls into the equivalence class
t = sum(x).  A distribution that is exchangeable with respect to this
statistic assigns one probability per class member, so it is fully
described by n+1 weights, where weights[t] is the probability of *each*
of the C(n, t) assignments with exactly t ones.  Normalization therefore
reads sum_t weights[t] * C(n, t) = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .special import log_binomial, log_factorials, logsumexp

UNOBSERVED = -1


def count_ones(x) -> int:
    """Number of ones in a binary vector."""
    arr = np.asarray(x)
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ValueError("binary vector expected, found values outside {0, 1}")
    return int(arr.sum())


def class_size(n: int, t: int) -> int:
    """Number of assignments of n binary variables with exactly t ones: C(n, t).

    Exact at any scale (Python integers are arbitrary precision).
    """
    if not 0 <= t <= n:
        raise ValueError(f"count {t} outside [0, {n}]")
    return math.comb(n, t)


def consistent_class_size(n: int, n_observed: int, ones_observed: int, t: int) -> int:
    """Number of class-t assignments consistent with partial evidence.

    Evidence fixes n_observed variables, ones_observed of them to one; the
    remaining n - n_observed free variables must contribute t - ones_observed
    ones, giving C(n - n_observed, t - ones_observed), or 0 when that is
    impossible.
    """
    if not 0 <= ones_observed <= n_observed <= n:
        raise ValueError("inconsistent evidence summary")
    remaining = t - ones_observed
    free = n - n_observed
    if remaining < 0 or remaining > free:
        return 0
    return math.comb(free, remaining)


@dataclass
class ExchangeableLeaf:
    """Leaf distribution exchangeable w.r.t. the ones count.

    weights[t] is the probability of each single assignment with t ones.
    Instances are treated as immutable once constructed.
    """

    scope: tuple[int, ...]
    weights: np.ndarray
    log_weights: np.ndarray = field(init=False, repr=False)

    kind = "exchangeable_counting"

    def __post_init__(self):
        self.scope = tuple(int(v) for v in self.scope)
        n = len(self.scope)
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.weights.shape != (n + 1,):
            raise ValueError(f"expected {n + 1} weights for {n} variables, got {self.weights.shape}")
        if (self.weights < 0).any():
            raise ValueError("weights must be non-negative")
        with np.errstate(divide="ignore"):
            self.log_weights = np.log(self.weights)

    @property
    def n(self) -> int:
        return len(self.scope)

    @classmethod
    def fit(cls, scope, X: np.ndarray, alpha: float = 0.0) -> "ExchangeableLeaf":
        """Estimate weights from rows of X (one column per scope variable).

        With class counts c_t, weights[t] = ((c_t + alpha) / (N + alpha*(n+1))) / C(n, t).
        alpha = 0 gives the maximum-likelihood estimate; alpha > 0 smooths the
        class counts before the division by the class size, keeping every
        class strictly positive.
        """
        scope = tuple(int(v) for v in scope)
        X = np.asarray(X)
        n = len(scope)
        if X.ndim != 2 or X.shape[1] != n:
            raise ValueError(f"expected an (N, {n}) sample matrix, got {X.shape}")
        if X.shape[0] < 1:
            raise ValueError("at least one sample required")
        if alpha < 0:
            raise ValueError("smoothing must be non-negative")
        counts = np.bincount(X.sum(axis=1).astype(np.int64), minlength=n + 1).astype(np.float64)
        class_probs = (counts + alpha) / (X.shape[0] + alpha * (n + 1))
        with np.errstate(divide="ignore"):
            log_w = np.log(class_probs) - log_binomial(n, np.arange(n + 1))
        return cls(scope, np.exp(log_w))

    def parameter_count(self) -> int:
        return self.n + 1

    def log_prob_rows(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X)
        return self.log_weights[X.sum(axis=1).astype(np.int64)]

    def log_prob(self, x) -> float:
        return float(self.log_prob_rows(np.asarray(x).reshape(1, -1))[0])

    def log_marginal_rows(self, E: np.ndarray) -> np.ndarray:
        """Marginal probability of partial evidence rows (UNOBSERVED = -1 entries free).

        Sums weights[t] * C(free, t - ones_observed) over classes, in log space.
        """
        E = np.asarray(E)
        n = self.n
        observed = E != UNOBSERVED
        ones_obs = (E == 1).sum(axis=1)
        free = n - observed.sum(axis=1)
        t = np.arange(n + 1)
        remaining = t[None, :] - ones_obs[:, None]
        # ln C(free_r, t - ones_obs_r) for each row r and class t; -inf when impossible
        valid = (remaining >= 0) & (remaining <= free[:, None])
        lf = log_factorials(n)
        rem_c = np.clip(remaining, 0, n)
        free_c = np.clip(free[:, None] - remaining, 0, n)
        log_counts = np.where(valid, lf[free[:, None]] - lf[rem_c] - lf[free_c], -np.inf)
        return logsumexp(log_counts + self.log_weights[None, :], axis=1)

    def log_marginal(self, e) -> float:
        return float(self.log_marginal_rows(np.asarray(e).reshape(1, -1))[0])

    def to_payload(self) -> dict:
        return {"n": self.n, "weights": [float(w) for w in self.weights]}

    @classmethod
    def from_payload(cls, scope, payload: dict) -> "ExchangeableLeaf":
        return cls(tuple(scope), np.asarray(payload["weights"], dtype=np.float64))
