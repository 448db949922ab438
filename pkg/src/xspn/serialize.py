"""Model and classifier file formats.

Files are JSON.  Floats are written with 17 significant digits, which
pins down an IEEE double uniquely, so a load/save round trip reproduces
every parameter bit for bit.  The reader validates the schema and
reports the path of the offending field on failure.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import DataError
from .exchangeable import ExchangeableLeaf
from .leaves import BernoulliLeaf, ChowLiuLeaf, FactorizedLeaf
from .model import LeafNode, Network, ProductNode, SumNode

MODEL_FORMAT = "xspn-model"
CLASSIFIER_FORMAT = "xspn-classifier"
FORMAT_VERSION = 1

_LEAF_CLASSES = {
    cls.kind: cls for cls in (BernoulliLeaf, FactorizedLeaf, ExchangeableLeaf, ChowLiuLeaf)
}


def _write_value(value, parts: list) -> None:
    if isinstance(value, bool):
        parts.append("true" if value else "false")
    elif isinstance(value, (int, np.integer)):
        parts.append(str(int(value)))
    elif isinstance(value, (float, np.floating)):
        parts.append(format(float(value), ".17g"))
    elif isinstance(value, str):
        parts.append(json.dumps(value))
    elif value is None:
        parts.append("null")
    elif isinstance(value, dict):
        parts.append("{")
        for i, (k, v) in enumerate(value.items()):
            if i:
                parts.append(", ")
            parts.append(json.dumps(str(k)))
            parts.append(": ")
            _write_value(v, parts)
        parts.append("}")
    elif isinstance(value, (list, tuple, np.ndarray)):
        parts.append("[")
        seq = value.tolist() if isinstance(value, np.ndarray) else value
        for i, v in enumerate(seq):
            if i:
                parts.append(", ")
            _write_value(v, parts)
        parts.append("]")
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps(obj: dict) -> str:
    """JSON text with floats at 17 significant digits."""
    parts: list = []
    _write_value(obj, parts)
    return "".join(parts)


def network_to_dict(net: Network) -> dict:
    nodes = []
    for nid, node in enumerate(net.nodes):
        entry = {"id": nid, "scope": list(node.scope)}
        if isinstance(node, SumNode):
            entry["kind"] = "sum"
            entry["children"] = list(node.children)
            entry["weights"] = list(node.weights)
        elif isinstance(node, ProductNode):
            entry["kind"] = "product"
            entry["children"] = list(node.children)
        elif isinstance(node, LeafNode):
            entry["kind"] = "leaf"
            entry["leaf_kind"] = node.distribution.kind
            entry.update(node.distribution.to_payload())
        else:
            raise TypeError(f"unknown node type {type(node).__name__}")
        nodes.append(entry)
    return {
        "format": MODEL_FORMAT,
        "version": FORMAT_VERSION,
        "variable_count": net.variable_count,
        "root": net.root,
        "nodes": nodes,
    }


class _Reader:
    """Schema access with field-path error reporting."""

    def __init__(self, obj, path=""):
        self.obj = obj
        self.path = path

    def _at(self, key) -> str:
        return f"{self.path}.{key}" if self.path else str(key)

    def get(self, key, expected, optional=False):
        if not isinstance(self.obj, dict):
            raise DataError(f"{self.path or '<root>'}: expected an object")
        if key not in self.obj:
            if optional:
                return None
            raise DataError(f"{self._at(key)}: missing required field")
        value = self.obj[key]
        if expected is float:
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise DataError(f"{self._at(key)}: expected a number")
            return float(value)
        if expected is int:
            if not isinstance(value, int) or isinstance(value, bool):
                raise DataError(f"{self._at(key)}: expected an integer")
            return value
        if not isinstance(value, expected):
            raise DataError(f"{self._at(key)}: expected {expected.__name__}")
        return value

    def number_list(self, key):
        value = self.get(key, list)
        out = []
        for i, v in enumerate(value):
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise DataError(f"{self._at(key)}[{i}]: expected a number")
            out.append(float(v))
        return out

    def int_list(self, key):
        value = self.get(key, list)
        out = []
        for i, v in enumerate(value):
            if not isinstance(v, int) or isinstance(v, bool):
                raise DataError(f"{self._at(key)}[{i}]: expected an integer")
            out.append(v)
        return out


def _leaf_from_entry(reader: _Reader, scope) -> object:
    leaf_kind = reader.get("leaf_kind", str)
    if leaf_kind not in _LEAF_CLASSES:
        raise DataError(f"{reader._at('leaf_kind')}: unknown leaf kind {leaf_kind!r}")
    try:
        if leaf_kind == "bernoulli":
            return BernoulliLeaf(scope, reader.get("p_one", float))
        if leaf_kind == "factorized":
            return FactorizedLeaf(scope, np.asarray(reader.number_list("p_one")))
        if leaf_kind == "exchangeable_counting":
            return ExchangeableLeaf(scope, np.asarray(reader.number_list("weights")))
        parents = reader.int_list("parents")
        tables = reader.get("tables", list)
        arrays = []
        for i, t in enumerate(tables):
            arr = np.asarray(t, dtype=np.float64)
            if arr.shape not in ((2,), (2, 2)):
                raise DataError(f"{reader._at('tables')}[{i}]: expected a (2,) or (2, 2) table")
            arrays.append(arr)
        return ChowLiuLeaf(scope, np.asarray(parents), arrays)
    except ValueError as exc:
        raise DataError(f"{reader.path}: {exc}") from exc


def network_from_dict(obj: dict) -> Network:
    top = _Reader(obj)
    fmt = top.get("format", str, optional=True)
    if fmt is not None and fmt != MODEL_FORMAT:
        raise DataError(f"format: expected {MODEL_FORMAT!r}, found {fmt!r}")
    variable_count = top.get("variable_count", int)
    root = top.get("root", int)
    entries = top.get("nodes", list)
    nodes: list = [None] * len(entries)
    for i, entry in enumerate(entries):
        reader = _Reader(entry, f"nodes[{i}]")
        nid = reader.get("id", int)
        if not 0 <= nid < len(entries):
            raise DataError(f"nodes[{i}].id: {nid} outside the node array")
        if nodes[nid] is not None:
            raise DataError(f"nodes[{i}].id: duplicate id {nid}")
        kind = reader.get("kind", str)
        scope = tuple(reader.int_list("scope"))
        try:
            if kind == "sum":
                node = SumNode(scope, tuple(reader.int_list("children")),
                               tuple(reader.number_list("weights")))
            elif kind == "product":
                node = ProductNode(scope, tuple(reader.int_list("children")))
            elif kind == "leaf":
                node = LeafNode(_leaf_from_entry(reader, scope))
            else:
                raise DataError(f"nodes[{i}].kind: unknown node kind {kind!r}")
        except ValueError as exc:
            raise DataError(f"nodes[{i}]: {exc}") from exc
        nodes[nid] = node
    if any(n is None for n in nodes):
        raise DataError("nodes: ids do not cover 0..N-1")
    return Network(nodes, root, variable_count)


def save_model(net: Network, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(network_to_dict(net)))
        fh.write("\n")


def _parse_json(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: not valid JSON ({exc})") from exc


def load_model(path) -> Network:
    return network_from_dict(_parse_json(path))


def classifier_to_dict(clf) -> dict:
    return {
        "format": CLASSIFIER_FORMAT,
        "version": FORMAT_VERSION,
        "classes": [
            {
                "label": int(label),
                "log_prior": float(lp),
                "model": network_to_dict(net),
            }
            for label, lp, net in zip(clf.labels, clf.log_priors, clf.networks)
        ],
    }


def classifier_from_dict(obj: dict):
    from .classify import GenerativeClassifier

    top = _Reader(obj)
    fmt = top.get("format", str, optional=True)
    if fmt is not None and fmt != CLASSIFIER_FORMAT:
        raise DataError(f"format: expected {CLASSIFIER_FORMAT!r}, found {fmt!r}")
    entries = top.get("classes", list)
    labels, log_priors, networks = [], [], []
    for i, entry in enumerate(entries):
        reader = _Reader(entry, f"classes[{i}]")
        labels.append(reader.get("label", int))
        log_priors.append(reader.get("log_prior", float))
        networks.append(network_from_dict(reader.get("model", dict)))
    return GenerativeClassifier(tuple(labels), np.asarray(log_priors), tuple(networks))


def save_classifier(clf, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(classifier_to_dict(clf)))
        fh.write("\n")


def load_classifier(path):
    return classifier_from_dict(_parse_json(path))
