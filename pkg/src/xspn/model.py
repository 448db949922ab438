"""Network structure and exact log-space inference.

A network is a rooted DAG stored as a flat node list; children are
referenced by integer index.  Sum nodes mix children sharing the same
scope (completeness), product nodes combine children with disjoint
scopes (decomposability), leaves carry a distribution object from
`exchangeable` or `leaves`.

All probability arithmetic happens in natural-log space; sum nodes use
log-sum-exp with max subtraction, so deeply nested models over hundreds
of variables do not underflow.  Networks are immutable after
construction and evaluation is read-only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .special import logsumexp

UNOBSERVED = -1
WEIGHT_TOL = 1e-9


@dataclass
class SumNode:
    scope: tuple[int, ...]
    children: tuple[int, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        self.scope = tuple(int(v) for v in self.scope)
        self.children = tuple(int(c) for c in self.children)
        self.weights = tuple(float(w) for w in self.weights)
        if len(self.children) != len(self.weights):
            raise ValueError("one weight per child required")


@dataclass
class ProductNode:
    scope: tuple[int, ...]
    children: tuple[int, ...]

    def __post_init__(self):
        self.scope = tuple(int(v) for v in self.scope)
        self.children = tuple(int(c) for c in self.children)


@dataclass
class LeafNode:
    distribution: object  # any leaf family instance

    @property
    def scope(self) -> tuple[int, ...]:
        return self.distribution.scope


Node = SumNode | ProductNode | LeafNode


@dataclass
class Network:
    """Flat node store plus root index; variable ids are 0..variable_count-1."""

    nodes: list
    root: int
    variable_count: int

    def __post_init__(self):
        self.nodes = list(self.nodes)
        self.root = int(self.root)
        self.variable_count = int(self.variable_count)

    def node_count(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True)
class Violation:
    node_id: int | None
    kind: str
    message: str

    def __str__(self):
        where = f"node {self.node_id}" if self.node_id is not None else "network"
        return f"{where}: {self.kind}: {self.message}"


def _scope_violations(node_id: int, scope: tuple, variable_count: int) -> list:
    out = []
    if len(scope) == 0:
        out.append(Violation(node_id, "scope", "scope is empty"))
        return out
    if list(scope) != sorted(set(scope)):
        out.append(Violation(node_id, "scope", "scope must be ascending and duplicate-free"))
    if min(scope) < 0 or max(scope) >= variable_count:
        out.append(Violation(node_id, "scope", f"scope {scope} outside [0, {variable_count})"))
    return out


def validate(net: Network) -> list:
    """Every violated structural invariant, with the offending node.

    Returns an empty list iff the network is a valid sum-product network:
    acyclic, fully reachable, complete sum nodes with normalized positive
    weights, decomposable product nodes, leaf scopes intact, and a root
    scope covering all modeled variables.
    """
    out = []
    n_nodes = len(net.nodes)
    if not 0 <= net.root < n_nodes:
        return [Violation(None, "root", f"root id {net.root} outside node array")]

    for nid, node in enumerate(net.nodes):
        out.extend(_scope_violations(nid, node.scope, net.variable_count))
        if isinstance(node, (SumNode, ProductNode)):
            if len(node.children) < 2:
                out.append(Violation(nid, "arity", "internal nodes need at least two children"))
            for c in node.children:
                if not 0 <= c < n_nodes:
                    out.append(Violation(nid, "child_ref", f"child id {c} outside node array"))
        if isinstance(node, SumNode):
            if any(w <= 0 for w in node.weights):
                out.append(Violation(nid, "weight_sign", "sum-node weights must be strictly positive"))
            total = sum(node.weights)
            if abs(total - 1.0) > WEIGHT_TOL:
                out.append(
                    Violation(nid, "weight_normalization", f"weights sum to {total!r}, expected 1")
                )

    # Cycle detection and reachability via DFS from the root.
    WHITE, GRAY, BLACK = 0, 1, 2
    color = [WHITE] * n_nodes
    stack = [(net.root, iter(_children_of(net.nodes[net.root])))]
    color[net.root] = GRAY
    while stack:
        nid, it = stack[-1]
        advanced = False
        for c in it:
            if not 0 <= c < n_nodes:
                continue
            if color[c] == GRAY:
                out.append(Violation(c, "cycle", "node participates in a cycle"))
            elif color[c] == WHITE:
                color[c] = GRAY
                stack.append((c, iter(_children_of(net.nodes[c]))))
                advanced = True
                break
        if not advanced:
            color[nid] = BLACK
            stack.pop()
    for nid, col in enumerate(color):
        if col == WHITE:
            out.append(Violation(nid, "unreachable", "node not reachable from the root"))

    for nid, node in enumerate(net.nodes):
        kids = [c for c in _children_of(node) if 0 <= c < n_nodes]
        if isinstance(node, SumNode):
            for c in kids:
                if tuple(net.nodes[c].scope) != tuple(node.scope):
                    out.append(
                        Violation(nid, "completeness", f"child {c} scope differs from sum scope")
                    )
        elif isinstance(node, ProductNode):
            union: set = set()
            overlap = False
            for c in kids:
                cscope = set(net.nodes[c].scope)
                if union & cscope:
                    overlap = True
                union |= cscope
            if overlap:
                out.append(Violation(nid, "decomposability", "child scopes overlap"))
            if union != set(node.scope):
                out.append(
                    Violation(nid, "decomposability", "child scopes do not cover the product scope")
                )

    root_scope = tuple(net.nodes[net.root].scope)
    if root_scope != tuple(range(net.variable_count)):
        out.append(
            Violation(
                net.root,
                "root_scope",
                f"root scope {root_scope} must cover variables 0..{net.variable_count - 1}",
            )
        )
    return out


def _children_of(node) -> tuple:
    if isinstance(node, (SumNode, ProductNode)):
        return node.children
    return ()


def _topological_order(net: Network) -> list:
    """Children-before-parents order of nodes reachable from the root."""
    order = []
    state = {}
    stack = [(net.root, False)]
    while stack:
        nid, expanded = stack.pop()
        if expanded:
            order.append(nid)
            state[nid] = 2
            continue
        if state.get(nid) == 2:
            continue
        if state.get(nid) == 1:
            raise ValueError(f"cycle through node {nid}; evaluation needs an acyclic network")
        state[nid] = 1
        stack.append((nid, True))
        for c in _children_of(net.nodes[nid]):
            if not 0 <= c < len(net.nodes):
                raise ValueError(f"node {nid} references missing child {c}")
            if state.get(c) != 2:
                stack.append((c, False))
    return order


def _evaluate(net: Network, data: np.ndarray, marginal: bool, on_visit=None) -> np.ndarray:
    values: dict[int, np.ndarray] = {}
    for nid in _topological_order(net):
        node = net.nodes[nid]
        if on_visit is not None:
            on_visit(nid)
        if isinstance(node, LeafNode):
            cols = data[:, list(node.scope)]
            dist = node.distribution
            values[nid] = dist.log_marginal_rows(cols) if marginal else dist.log_prob_rows(cols)
        elif isinstance(node, ProductNode):
            acc = values[node.children[0]].copy()
            for c in node.children[1:]:
                acc += values[c]
            values[nid] = acc
        else:
            stacked = np.stack([values[c] for c in node.children])
            log_w = np.log(np.asarray(node.weights))[:, None]
            values[nid] = logsumexp(stacked + log_w, axis=0)
    return values[net.root]


def log_likelihood(net: Network, X: np.ndarray, on_visit=None) -> np.ndarray:
    """Log-probability of each fully assigned row of X (one column per variable)."""
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[1] != net.variable_count:
        raise ValueError(f"expected an (N, {net.variable_count}) assignment matrix, got {X.shape}")
    if not np.isin(X, (0, 1)).all():
        raise ValueError("full evaluation requires every variable assigned 0 or 1")
    return _evaluate(net, X, marginal=False, on_visit=on_visit)


def log_marginal_rows(net: Network, E: np.ndarray, on_visit=None) -> np.ndarray:
    """Log-probability of each partial-evidence row (UNOBSERVED = -1 entries free)."""
    E = np.asarray(E)
    if E.ndim != 2 or E.shape[1] != net.variable_count:
        raise ValueError(f"expected an (N, {net.variable_count}) evidence matrix, got {E.shape}")
    if not np.isin(E, (0, 1, UNOBSERVED)).all():
        raise ValueError("evidence entries must be 0, 1, or -1 (unobserved)")
    return _evaluate(net, E, marginal=True, on_visit=on_visit)


def log_evaluate(net: Network, x) -> float:
    """Log-probability of a single full assignment."""
    return float(log_likelihood(net, np.asarray(x).reshape(1, -1))[0])


def log_marginal(net: Network, e) -> float:
    """Log-probability of a single partial assignment; 0.0 when nothing is observed."""
    return float(log_marginal_rows(net, np.asarray(e).reshape(1, -1))[0])


def evidence_array(variable_count: int, observed: dict) -> np.ndarray:
    """Evidence row from a {variable: value} mapping; everything else unobserved."""
    e = np.full(variable_count, UNOBSERVED, dtype=np.int8)
    for var, val in observed.items():
        if not 0 <= int(var) < variable_count:
            raise ValueError(f"variable {var} outside 0..{variable_count - 1}")
        if val not in (0, 1):
            raise ValueError(f"observed value for variable {var} must be 0 or 1")
        e[int(var)] = val
    return e


def leaf_census(net: Network) -> dict:
    """Count of leaves per leaf kind."""
    census: dict[str, int] = {}
    for node in net.nodes:
        if isinstance(node, LeafNode):
            kind = node.distribution.kind
            census[kind] = census.get(kind, 0) + 1
    return census


def network_depth(net: Network) -> int:
    """Longest root-to-leaf path, counted in edges."""
    depth = {}
    for nid in _topological_order(net):
        kids = _children_of(net.nodes[nid])
        depth[nid] = 1 + max(depth[c] for c in kids) if kids else 0
    return depth[net.root]
