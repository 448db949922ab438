"""Leaf families besides the exchangeable one: Bernoulli, factorized, Chow-Liu tree.

All leaves share the same informal interface: a sorted variable scope,
vectorized `log_prob_rows` over full assignments of the scope, and
`log_marginal_rows` over partial evidence where -1 marks an unobserved
variable.  Instances are treated as immutable after fitting.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .special import logsumexp


def _check_scope_matrix(X: np.ndarray, k: int) -> np.ndarray:
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[1] != k:
        raise ValueError(f"expected an (N, {k}) matrix, got {X.shape}")
    return X


@dataclass
class BernoulliLeaf:
    """Single binary variable with P(X = 1) = p_one."""

    scope: tuple[int, ...]
    p_one: float

    kind = "bernoulli"

    def __post_init__(self):
        self.scope = tuple(int(v) for v in self.scope)
        if len(self.scope) != 1:
            raise ValueError("Bernoulli leaf covers exactly one variable")
        if not 0.0 <= self.p_one <= 1.0:
            raise ValueError(f"p_one must lie in [0, 1], got {self.p_one}")

    @classmethod
    def fit(cls, variable: int, column: np.ndarray, alpha: float = 0.0) -> "BernoulliLeaf":
        column = np.asarray(column)
        if column.ndim != 1 or column.size < 1:
            raise ValueError("non-empty 1-d sample column required")
        p = (float(column.sum()) + alpha) / (column.size + 2.0 * alpha)
        return cls((variable,), p)

    def parameter_count(self) -> int:
        return 1

    def _log_p(self) -> tuple[float, float]:
        with np.errstate(divide="ignore"):
            return float(np.log1p(-self.p_one)), float(np.log(self.p_one))

    def log_prob_rows(self, X: np.ndarray) -> np.ndarray:
        X = _check_scope_matrix(X, 1)
        l0, l1 = self._log_p()
        return np.where(X[:, 0] == 1, l1, l0)

    def log_prob(self, x) -> float:
        return float(self.log_prob_rows(np.asarray(x).reshape(1, -1))[0])

    def log_marginal_rows(self, E: np.ndarray) -> np.ndarray:
        E = _check_scope_matrix(E, 1)
        l0, l1 = self._log_p()
        out = np.zeros(E.shape[0])
        out[E[:, 0] == 0] = l0
        out[E[:, 0] == 1] = l1
        return out

    def log_marginal(self, e) -> float:
        return float(self.log_marginal_rows(np.asarray(e).reshape(1, -1))[0])

    def to_payload(self) -> dict:
        return {"p_one": float(self.p_one)}

    @classmethod
    def from_payload(cls, scope, payload: dict) -> "BernoulliLeaf":
        return cls(tuple(scope), float(payload["p_one"]))


@dataclass
class FactorizedLeaf:
    """Product of independent Bernoullis over the scope."""

    scope: tuple[int, ...]
    p_one: np.ndarray

    kind = "factorized"

    def __post_init__(self):
        self.scope = tuple(int(v) for v in self.scope)
        if not self.scope:
            raise ValueError("scope must be non-empty")
        self.p_one = np.asarray(self.p_one, dtype=np.float64)
        if self.p_one.shape != (len(self.scope),):
            raise ValueError("one probability per scope variable required")
        if ((self.p_one < 0) | (self.p_one > 1)).any():
            raise ValueError("probabilities must lie in [0, 1]")

    @classmethod
    def fit(cls, scope, X: np.ndarray, alpha: float = 0.0) -> "FactorizedLeaf":
        scope = tuple(scope)
        X = _check_scope_matrix(X, len(scope))
        p = (X.sum(axis=0).astype(np.float64) + alpha) / (X.shape[0] + 2.0 * alpha)
        return cls(scope, p)

    def parameter_count(self) -> int:
        return len(self.scope)

    def _log_tables(self) -> tuple[np.ndarray, np.ndarray]:
        with np.errstate(divide="ignore"):
            return np.log1p(-self.p_one), np.log(self.p_one)

    def log_prob_rows(self, X: np.ndarray) -> np.ndarray:
        X = _check_scope_matrix(X, len(self.scope))
        l0, l1 = self._log_tables()
        return np.where(X == 1, l1[None, :], l0[None, :]).sum(axis=1)

    def log_prob(self, x) -> float:
        return float(self.log_prob_rows(np.asarray(x).reshape(1, -1))[0])

    def log_marginal_rows(self, E: np.ndarray) -> np.ndarray:
        E = _check_scope_matrix(E, len(self.scope))
        l0, l1 = self._log_tables()
        terms = np.zeros(E.shape, dtype=np.float64)
        terms = np.where(E == 0, l0[None, :], terms)
        terms = np.where(E == 1, l1[None, :], terms)
        return terms.sum(axis=1)

    def log_marginal(self, e) -> float:
        return float(self.log_marginal_rows(np.asarray(e).reshape(1, -1))[0])

    def to_payload(self) -> dict:
        return {"p_one": [float(p) for p in self.p_one]}

    @classmethod
    def from_payload(cls, scope, payload: dict) -> "FactorizedLeaf":
        return cls(tuple(scope), np.asarray(payload["p_one"], dtype=np.float64))


@dataclass
class ChowLiuLeaf:
    """Tree-structured distribution over the scope.

    parents[i] gives the scope *position* of the parent of the variable at
    position i, or -1 for the tree root.  tables[i] holds P(X_i = b) as a
    (2,) row for the root and P(X_i = b | parent = a) as a (2, 2) table
    (rows indexed by the parent value a) otherwise; probabilities are kept
    in linear space and converted to logs once at construction.
    """

    scope: tuple[int, ...]
    parents: np.ndarray
    tables: list
    _log_tables: list = field(init=False, repr=False)
    _order: np.ndarray = field(init=False, repr=False)
    _children: list = field(init=False, repr=False)

    kind = "chow_liu"

    def __post_init__(self):
        self.scope = tuple(int(v) for v in self.scope)
        k = len(self.scope)
        self.parents = np.asarray(self.parents, dtype=np.int64)
        if self.parents.shape != (k,):
            raise ValueError("one parent entry per scope variable required")
        roots = np.flatnonzero(self.parents == -1)
        if len(roots) != 1:
            raise ValueError(f"tree needs exactly one root, found {len(roots)}")
        if len(self.tables) != k:
            raise ValueError("one table per scope variable required")
        self.tables = [np.asarray(t, dtype=np.float64) for t in self.tables]
        with np.errstate(divide="ignore"):
            self._log_tables = [np.log(t) for t in self.tables]
        self._children = [[] for _ in range(k)]
        for i, par in enumerate(self.parents):
            if par >= 0:
                self._children[par].append(i)
        # Downward order from the root doubles as a cycle/connectivity check.
        order = []
        stack = [int(roots[0])]
        while stack:
            i = stack.pop()
            order.append(i)
            stack.extend(self._children[i])
        if len(order) != k:
            raise ValueError("parent map is not a connected tree")
        self._order = np.asarray(order, dtype=np.int64)

    @property
    def root_position(self) -> int:
        return int(self._order[0])

    @classmethod
    def fit(cls, scope, X: np.ndarray, alpha: float = 0.0) -> "ChowLiuLeaf":
        """Maximum-spanning-tree over pairwise mutual information, smoothed counts.

        Ties in mutual information break toward the lexicographically smaller
        variable pair, so the structure is reproducible given the data.  The
        root is the lowest variable of the scope.
        """
        scope = tuple(sorted(int(v) for v in scope))
        k = len(scope)
        if k < 2:
            raise ValueError("Chow-Liu leaf needs at least two variables")
        X = _check_scope_matrix(X, k).astype(np.float64)
        N = X.shape[0]
        if N < 1:
            raise ValueError("at least one sample required")

        ones = X.sum(axis=0)
        c11 = X.T @ X
        c10 = ones[:, None] - c11
        c01 = ones[None, :] - c11
        c00 = N - c11 - c10 - c01
        joint = (np.stack([c00, c01, c10, c11]) + alpha) / (N + 4.0 * alpha)  # (4, k, k)
        # marginals by summing the smoothed joint, so each pair is internally consistent
        pi1 = joint[2] + joint[3]  # P(X_i = 1) within pair (i, j)
        pj1 = joint[1] + joint[3]  # P(X_j = 1) within pair (i, j)
        prod = np.stack(
            [(1 - pi1) * (1 - pj1), (1 - pi1) * pj1, pi1 * (1 - pj1), pi1 * pj1]
        )
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(joint > 0, joint * (np.log(joint) - np.log(prod)), 0.0)
        mi = terms.sum(axis=0)

        edges = sorted(
            ((i, j) for i in range(k) for j in range(i + 1, k)),
            key=lambda e: (-mi[e[0], e[1]], e[0], e[1]),
        )
        parent_of = np.full(k, -2, dtype=np.int64)
        comp = list(range(k))

        def find(a):
            while comp[a] != a:
                comp[a] = comp[comp[a]]
                a = comp[a]
            return a

        adjacency = [[] for _ in range(k)]
        taken = 0
        for i, j in edges:
            ri, rj = find(i), find(j)
            if ri != rj:
                comp[ri] = rj
                adjacency[i].append(j)
                adjacency[j].append(i)
                taken += 1
                if taken == k - 1:
                    break

        parent_of[0] = -1
        stack = [0]
        seen = {0}
        while stack:
            i = stack.pop()
            for j in adjacency[i]:
                if j not in seen:
                    seen.add(j)
                    parent_of[j] = i
                    stack.append(j)

        counts = {(0, 0): c00, (0, 1): c01, (1, 0): c10, (1, 1): c11}
        tables = [None] * k
        for i in range(k):
            par = parent_of[i]
            if par == -1:
                p1 = (ones[i] + alpha) / (N + 2.0 * alpha)
                tables[i] = np.array([1.0 - p1, p1])
            else:
                tab = np.empty((2, 2))
                for a in (0, 1):
                    row = np.array([counts[(a, 0)][par, i], counts[(a, 1)][par, i]])
                    denom = row.sum() + 2.0 * alpha
                    tab[a] = (row + alpha) / denom if denom > 0 else np.array([0.5, 0.5])
                tables[i] = tab
        return cls(scope, parent_of, tables)

    def parameter_count(self) -> int:
        # Two table entries for the root, two free entries per conditional.
        return 2 * len(self.scope)

    def log_prob_rows(self, X: np.ndarray) -> np.ndarray:
        X = _check_scope_matrix(X, len(self.scope)).astype(np.int64)
        out = self._log_tables[self.root_position][X[:, self.root_position]]
        for i in self._order[1:]:
            par = self.parents[i]
            out = out + self._log_tables[i][X[:, par], X[:, i]]
        return out

    def log_prob(self, x) -> float:
        return float(self.log_prob_rows(np.asarray(x).reshape(1, -1))[0])

    def log_marginal_rows(self, E: np.ndarray) -> np.ndarray:
        """Single upward pass summing out unobserved variables."""
        E = _check_scope_matrix(E, len(self.scope)).astype(np.int64)
        N = E.shape[0]
        neg_inf = -np.inf
        # messages[i][:, a]: log sum over the subtree of i, given parent value a
        messages = [None] * len(self.scope)
        for i in self._order[::-1]:
            # evidence mask for this variable: allowed values get 0, others -inf
            allow = np.zeros((N, 2))
            allow[E[:, i] == 0, 1] = neg_inf
            allow[E[:, i] == 1, 0] = neg_inf
            for c in self._children[i]:
                allow += messages[c]
            table = self._log_tables[i]
            if self.parents[i] == -1:
                messages[i] = logsumexp(table[None, :] + allow, axis=1)
            else:
                # (N, a, b) -> logsumexp over b
                messages[i] = logsumexp(table[None, :, :] + allow[:, None, :], axis=2)
        return messages[self.root_position]

    def log_marginal(self, e) -> float:
        return float(self.log_marginal_rows(np.asarray(e).reshape(1, -1))[0])

    def to_payload(self) -> dict:
        return {
            "parents": self.parents.tolist(),
            "tables": [t.tolist() for t in self.tables],
        }

    @classmethod
    def from_payload(cls, scope, payload: dict) -> "ChowLiuLeaf":
        parents = np.asarray(payload["parents"], dtype=np.int64)
        tables = [np.asarray(t, dtype=np.float64) for t in payload["tables"]]
        return cls(tuple(scope), parents, tables)
