"""Expanded trees: validation of the eight structure axioms and the derived
flat structures on their marked points."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Hashable, Mapping, Sequence

Node = Hashable


class TreeError(ValueError):
    pass


@dataclass(frozen=True)
class ExpandedTree:
    """Carrier with a tree order, a linear order, a marked subset P, and two
    injections F0, F1 out of P.

    Relations are explicit: tr_le holds reflexive tree-order pairs, lin_lt
    strict linear-order pairs. Constructors below build these from parent
    arrays and permutations; the validator re-checks everything from scratch.
    """
    nodes: tuple[Node, ...]
    tr_le: frozenset[tuple[Node, Node]]
    lin_lt: frozenset[tuple[Node, Node]]
    P: frozenset[Node]
    F0: tuple[tuple[Node, Node], ...]
    F1: tuple[tuple[Node, Node], ...]

    @staticmethod
    def from_parts(nodes: Sequence[Node], parent: Mapping[Node, Node | None],
                   linear: Sequence[Node], P: Sequence[Node],
                   F0: Mapping[Node, Node], F1: Mapping[Node, Node]
                   ) -> "ExpandedTree":
        """Build relations from a parent map and a linear-order listing."""
        nodes = tuple(nodes)
        node_set = set(nodes)
        if set(linear) != node_set or len(linear) != len(nodes):
            raise TreeError("linear order must list every node exactly once")
        tr = set()
        for v in nodes:
            seen = {v}
            tr.add((v, v))
            cur = v
            while True:
                par = parent.get(cur)
                if par is None:
                    break
                if par not in node_set:
                    raise TreeError(f"parent {par!r} of {cur!r} not a node")
                if par in seen:
                    raise TreeError("parent map has a cycle")
                seen.add(par)
                tr.add((par, v))
                cur = par
        pos = {v: i for i, v in enumerate(linear)}
        lin = {(a, b) for a in nodes for b in nodes if pos[a] < pos[b]}
        return ExpandedTree(nodes, frozenset(tr), frozenset(lin), frozenset(P),
                            tuple(sorted(F0.items(), key=repr)),
                            tuple(sorted(F1.items(), key=repr)))

    def f_map(self, ell: int) -> dict[Node, Node]:
        return dict((self.F0, self.F1)[ell])


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple

    def as_json(self) -> dict:
        return {"axiom": self.axiom, "witness": [repr(w) for w in self.witness]}


def _check_structural(t: ExpandedTree) -> list[Violation]:
    out = []
    nodes = set(t.nodes)
    for (a, b) in t.tr_le | t.lin_lt:
        if a not in nodes or b not in nodes:
            out.append(Violation("structural", (a, b)))
            return out
    for (a, b), (b2, c) in itertools.product(t.tr_le, repeat=2):
        if b == b2 and (a, c) not in t.tr_le:
            out.append(Violation("structural", (a, b, c)))
            return out
    for (a, b), (b2, c) in itertools.product(t.lin_lt, repeat=2):
        if b == b2 and (a, c) not in t.lin_lt:
            out.append(Violation("structural", (a, b, c)))
            return out
    return out


def validate_etr(t: ExpandedTree) -> list[Violation]:
    """Empty list iff all eight axioms hold; structural problems with the
    input relations are reported before axiom checks."""
    structural = _check_structural(t)
    if structural:
        return structural
    out: list[Violation] = []
    nodes = t.nodes
    le = t.tr_le
    lt = t.lin_lt
    f0, f1 = t.f_map(0), t.f_map(1)

    # (a) reflexive antisymmetric partial order whose strict predecessor sets
    # are chains (a well-founded tree; finiteness gives well-foundedness)
    for v in nodes:
        if (v, v) not in le:
            out.append(Violation("a", (v,)))
    for a, b in itertools.combinations(nodes, 2):
        if (a, b) in le and (b, a) in le:
            out.append(Violation("a", (a, b)))
    for v in nodes:
        preds = [u for u in nodes if u != v and (u, v) in le]
        for u1, u2 in itertools.combinations(preds, 2):
            if (u1, u2) not in le and (u2, u1) not in le:
                out.append(Violation("a", (u1, u2, v)))

    # (b) P is a subset of the carrier
    for v in t.P:
        if v not in set(nodes):
            out.append(Violation("b", (v,)))

    # (c) each F is a one-to-one function from P into the complement
    for ell, f in ((0, f0), (1, f1)):
        if set(f) != set(t.P):
            out.append(Violation("c", (ell, "domain")))
        if len(set(f.values())) != len(f):
            out.append(Violation("c", (ell, "injectivity")))
        for s, v in f.items():
            if v in t.P:
                out.append(Violation("c", (ell, s, v)))

    # (d) carrier = P + range(F0) + range(F1), disjointly
    r0, r1 = set(f0.values()), set(f1.values())
    if r0 & r1 or (set(t.P) & (r0 | r1)):
        out.append(Violation("d", tuple(sorted(map(repr, (r0 & r1) | (set(t.P) & (r0 | r1)))))))
    missing = set(nodes) - set(t.P) - r0 - r1
    if missing:
        out.append(Violation("d", tuple(sorted(map(repr, missing)))))

    # (e) F(t) is an immediate successor of t
    for ell, f in ((0, f0), (1, f1)):
        for s, v in f.items():
            if (s, v) not in le or s == v:
                out.append(Violation("e", (ell, s, v)))
                continue
            for w in nodes:
                if w not in (s, v) and (s, w) in le and (w, v) in le:
                    out.append(Violation("e", (ell, s, v, w)))

    # (f) any strict extension of a marked point passes through one of its
    # two F-images
    for s in t.P:
        for w in nodes:
            if w != s and (s, w) in le:
                if not ((f0.get(s), w) in le or (f1.get(s), w) in le):
                    out.append(Violation("f", (s, w)))

    # (g) the linear order is total and irreflexive
    for v in nodes:
        if (v, v) in lt:
            out.append(Violation("g", (v,)))
    for a, b in itertools.combinations(nodes, 2):
        if ((a, b) in lt) == ((b, a) in lt):
            out.append(Violation("g", (a, b)))

    # (h) descendants through F0 sit strictly left, through F1 strictly right
    for s in t.P:
        for w0 in nodes:
            if (f0.get(s), w0) in le and (w0, s) not in lt:
                out.append(Violation("h", (s, w0, "left")))
        for w1 in nodes:
            if (f1.get(s), w1) in le and (s, w1) not in lt:
                out.append(Violation("h", (s, w1, "right")))

    return out


# ---------------------------------------------------------------------------
# derived flat structures

@dataclass(frozen=True)
class FlatStructure:
    points: tuple[Node, ...]
    tr_le: frozenset[tuple[Node, Node]]
    lin_lt: frozenset[tuple[Node, Node]]
    Q0: frozenset[tuple[Node, Node]]
    Q1: frozenset[tuple[Node, Node]]


def derive_ftr(t: ExpandedTree) -> FlatStructure:
    """Flat structure on the marked points with restricted orders and the two
    descent relations Q_iota = {(s, v): F_iota(s) below v}."""
    bad = validate_etr(t)
    if bad:
        raise TreeError(f"invalid expanded tree: {bad[0].axiom}")
    pts = tuple(v for v in t.nodes if v in t.P)
    inP = set(pts)
    qs = []
    for ell in (0, 1):
        f = t.f_map(ell)
        qs.append(frozenset((s, v) for s in pts for v in pts
                            if (f[s], v) in t.tr_le))
    return FlatStructure(
        pts,
        frozenset((a, b) for (a, b) in t.tr_le if a in inP and b in inP),
        frozenset((a, b) for (a, b) in t.lin_lt if a in inP and b in inP),
        qs[0], qs[1])


# ---------------------------------------------------------------------------
# file format

def tree_to_json(t: ExpandedTree, parent: Mapping[Node, Node | None],
                 linear: Sequence[Node]) -> dict:
    return {"nodes": list(t.nodes),
            "tree_parent": [parent.get(v) for v in t.nodes],
            "linear_order": list(linear),
            "P": sorted(t.P, key=repr),
            "F0": {str(k): v for k, v in t.F0},
            "F1": {str(k): v for k, v in t.F1}}


def tree_from_json(obj: dict) -> ExpandedTree:
    try:
        nodes = list(obj["nodes"])
        parent = {v: p for v, p in zip(nodes, obj["tree_parent"]) if p is not None}
        linear = list(obj["linear_order"])
        P = list(obj["P"])
        f0 = {_coerce(k, nodes): v for k, v in obj["F0"].items()}
        f1 = {_coerce(k, nodes): v for k, v in obj["F1"].items()}
    except (KeyError, TypeError) as exc:
        raise TreeError(f"malformed tree object: {exc}")
    return ExpandedTree.from_parts(nodes, parent, linear, P, f0, f1)


def _coerce(key: str, nodes: list) -> Node:
    """JSON object keys are strings; recover int node names when applicable."""
    if key in nodes:
        return key
    try:
        as_int = int(key)
    except ValueError:
        return key
    return as_int if as_int in nodes else key


def load_tree(path: str) -> ExpandedTree:
    with open(path, "r", encoding="utf-8") as fh:
        return tree_from_json(json.load(fh))
