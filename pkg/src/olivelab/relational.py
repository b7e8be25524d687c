"""The relational example class: the forbidden structure, the class of
structures omitting it, amalgamation by disjoint union, the four-cycle
configuration, and models built from ladders."""
from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass

from .ladder import Ladder


class SignatureError(ValueError):
    pass


class StructureError(ValueError):
    pass


@dataclass(frozen=True)
class OliveSignature:
    """A two-colour pattern eta with tuple widths k = (k0, k1).

    eta(0) = 0, the zero set is not an initial segment, each colour class has
    at least k_iota points, and the total length is at least k0 + k1 >= 3.
    The class-level olive checker additionally requires both widths >= 2
    (strict signatures); width-1 signatures remain valid for building the
    forbidden structure, whose corresponding relation is then empty.
    """
    eta: tuple[int, ...]
    k: tuple[int, int]

    def __post_init__(self):
        eta, (k0, k1) = self.eta, self.k
        n = len(eta)
        if any(v not in (0, 1) for v in eta):
            raise SignatureError("eta must be a 0/1 sequence")
        if n == 0 or eta[0] != 0:
            raise SignatureError("eta must start with 0")
        zeros = [i for i, v in enumerate(eta) if v == 0]
        if zeros == list(range(len(zeros))):
            raise SignatureError("the zero set of eta must not be an initial segment")
        if min(k0, k1) < 1:
            raise SignatureError("tuple widths must be at least 1")
        if n < k0 + k1 or k0 + k1 < 3:
            raise SignatureError("need len(eta) >= k0 + k1 >= 3")
        for iota, ki in ((0, k0), (1, k1)):
            if sum(1 for v in eta if v == iota) < ki:
                raise SignatureError(f"colour class {iota} smaller than k{iota}")

    @property
    def n(self) -> int:
        return len(self.eta)

    @property
    def strict(self) -> bool:
        return min(self.k) >= 2

    def colour_class(self, iota: int) -> tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.eta) if v == iota)


DEFAULT_SIG = OliveSignature((0, 1, 0, 1), (2, 2))
GROUP_SIDE_SIG = OliveSignature((0, 1, 0), (2, 1))


@dataclass(frozen=True)
class FinStructure:
    """Finite structure with one binary and two wider relations."""
    sig: OliveSignature
    n: int
    P: frozenset[tuple[int, int]]
    Q0: frozenset[tuple[int, ...]]
    Q1: frozenset[tuple[int, ...]]

    def __post_init__(self):
        for name, rel, ar in (("P", self.P, 2), ("Q0", self.Q0, self.sig.k[0] + 1),
                              ("Q1", self.Q1, self.sig.k[1] + 1)):
            for tup in rel:
                if len(tup) != ar:
                    raise StructureError(f"{name} tuple {tup} has arity != {ar}")
                if any(not (0 <= i < self.n) for i in tup):
                    raise StructureError(f"{name} tuple {tup} out of universe")

    def relations(self):
        return (self.P, self.Q0, self.Q1)

    def arities(self):
        return (2, self.sig.k[0] + 1, self.sig.k[1] + 1)

    def restrict(self, points: list[int]) -> "FinStructure":
        """Induced substructure on the given points, renumbered by position."""
        pos = {v: i for i, v in enumerate(points)}
        keep = set(points)

        def sub(rel):
            return frozenset(tuple(pos[i] for i in t) for t in rel
                             if set(t) <= keep)

        return FinStructure(self.sig, len(points), sub(self.P), sub(self.Q0),
                            sub(self.Q1))


def build_Nstar(sig: OliveSignature) -> FinStructure:
    """The forbidden structure: n+1 points, all increasing pairs related, and
    each colour's width-k ascending tuples capped by any later point."""
    n = sig.n
    universe = range(n + 1)
    P = frozenset((i, j) for i in universe for j in universe if i < j)
    qs = []
    for iota in (0, 1):
        ki = sig.k[iota]
        cls = sig.colour_class(iota)
        tuples = set()
        if ki >= 2:
            for combo in itertools.combinations(cls, ki):
                for last in range(combo[-1] + 1, n + 1):
                    tuples.add(combo + (last,))
        qs.append(frozenset(tuples))
    return FinStructure(sig, n + 1, P, qs[0], qs[1])


# ---------------------------------------------------------------------------
# embedding search

def embeds(A: FinStructure, B: FinStructure):
    """Backtracking search for an induced-substructure embedding of A in B.

    The map must preserve and reflect every relation; returns a dict or None.
    Exhaustive over all injections in the worst case.
    """
    if A.sig != B.sig:
        raise StructureError("embedding needs matching signatures")
    rels = list(zip(A.relations(), B.relations(), A.arities()))
    assign: dict[int, int] = {}
    used: set[int] = set()

    def consistent(u: int) -> bool:
        dom = set(assign)
        for rel_a, rel_b, ar in rels:
            for tup in itertools.product(sorted(dom), repeat=ar):
                if u not in tup or any(i not in dom for i in tup):
                    continue
                mapped = tuple(assign[i] for i in tup)
                if (tup in rel_a) != (mapped in rel_b):
                    return False
        return True

    def extend(u: int) -> bool:
        if u == A.n:
            return True
        for v in range(B.n):
            if v in used:
                continue
            assign[u] = v
            used.add(v)
            if consistent(u) and extend(u + 1):
                return True
            del assign[u]
            used.discard(v)
        return False

    if A.n > B.n:
        return None
    return dict(assign) if extend(0) else None


def omits_forbidden(M: FinStructure) -> bool:
    return embeds(build_Nstar(M.sig), M) is None


# ---------------------------------------------------------------------------
# models from ladders

def model_from_ladder(f: Ladder, sig: OliveSignature) -> FinStructure:
    """Universe = ladder length; increasing pairs related; colour-iota tuples
    wherever the capping row is constant iota on the closed index interval."""
    if f.iota != 2:
        raise StructureError("two-colour ladders only")
    lam = f.lam
    P = frozenset((a, b) for a in range(lam) for b in range(lam) if a < b)
    qs = []
    for iota in (0, 1):
        ki = sig.k[iota]
        tuples = set()
        if ki >= 2:
            for combo in itertools.combinations(range(lam), ki):
                for beta in range(combo[-1] + 1, lam):
                    if all(f.f(beta, d) == iota
                           for d in range(combo[0], combo[-1] + 1)):
                        tuples.add(combo + (beta,))
        qs.append(frozenset(tuples))
    return FinStructure(sig, lam, P, qs[0], qs[1])


# ---------------------------------------------------------------------------
# unions and the four-cycle configuration

def disjoint_union(m1: FinStructure, m2: FinStructure,
                   shared1: tuple[int, ...] = (), shared2: tuple[int, ...] = ()
                   ) -> FinStructure:
    """Union over a common induced substructure.

    shared1[i] in m1 is identified with shared2[i] in m2; the identified
    restrictions must agree as structures, otherwise the overlap is not a
    common induced substructure and the union is rejected.
    """
    if m1.sig != m2.sig:
        raise StructureError("union needs matching signatures")
    if len(shared1) != len(shared2):
        raise StructureError("shared index lists must pair up")
    if m1.restrict(list(shared1)) != m2.restrict(list(shared2)):
        raise StructureError("overlap not an induced substructure")
    ident = dict(zip(shared2, shared1))
    fresh = {}
    nxt = m1.n
    for j in range(m2.n):
        if j not in ident:
            fresh[j] = nxt
            nxt += 1
    trans = {**ident, **fresh}

    def push(rel):
        return frozenset(tuple(trans[i] for i in t) for t in rel)

    return FinStructure(m1.sig, nxt,
                        m1.P | push(m2.P),
                        m1.Q0 | push(m2.Q0),
                        m1.Q1 | push(m2.Q1))


FOUR_CYCLE = ((0, 1), (1, 2), (2, 3), (0, 3))


@dataclass(frozen=True)
class AmalgamReport:
    passed: bool
    precondition_failures: tuple[str, ...]
    union_omits: bool | None
    extends_all: bool | None


def nsop4_amalgam(parts: tuple[FinStructure, FinStructure, FinStructure, FinStructure],
                  edges: dict[tuple[int, int], FinStructure]
                  ) -> tuple[FinStructure | None, AmalgamReport]:
    """Glue the four-cycle edge models over disjoint parts and verify the
    union stays in the class and extends every edge model.

    Edge model (i, j) has universe |parts[i]| + |parts[j]| with the part
    points first, in order.
    """
    pre: list[str] = []
    sig = parts[0].sig
    for idx, part in enumerate(parts):
        if part.sig != sig:
            pre.append(f"part {idx} has a different signature")
        elif not omits_forbidden(part):
            pre.append(f"part {idx} contains the forbidden structure")
    for (i, j) in FOUR_CYCLE:
        em = edges.get((i, j))
        if em is None:
            pre.append(f"edge model {(i, j)} missing")
            continue
        if em.sig != sig:
            pre.append(f"edge model {(i, j)} has a different signature")
            continue
        ni, nj = parts[i].n, parts[j].n
        if em.n != ni + nj:
            pre.append(f"edge model {(i, j)} has the wrong universe size")
            continue
        if em.restrict(list(range(ni))) != parts[i]:
            pre.append(f"edge model {(i, j)} does not extend part {i}")
        if em.restrict(list(range(ni, ni + nj))) != parts[j]:
            pre.append(f"edge model {(i, j)} does not extend part {j}")
        if not omits_forbidden(em):
            pre.append(f"edge model {(i, j)} contains the forbidden structure")
    if pre:
        return None, AmalgamReport(False, tuple(pre), None, None)

    offs = []
    total = 0
    for part in parts:
        offs.append(total)
        total += part.n
    P: set = set()
    Q0: set = set()
    Q1: set = set()
    for (i, j) in FOUR_CYCLE:
        em = edges[(i, j)]
        ni = parts[i].n

        def trans(t):
            return tuple(offs[i] + v if v < ni else offs[j] + (v - ni) for v in t)

        P |= {trans(t) for t in em.P}
        Q0 |= {trans(t) for t in em.Q0}
        Q1 |= {trans(t) for t in em.Q1}
    M = FinStructure(sig, total, frozenset(P), frozenset(Q0), frozenset(Q1))

    extends = True
    for (i, j) in FOUR_CYCLE:
        pts = list(range(offs[i], offs[i] + parts[i].n)) + \
              list(range(offs[j], offs[j] + parts[j].n))
        if M.restrict(pts) != edges[(i, j)]:
            extends = False
    omits = omits_forbidden(M)
    return M, AmalgamReport(extends and omits, (), omits, extends)


# ---------------------------------------------------------------------------
# the class-level check

@dataclass(frozen=True)
class ClassOliveReport:
    ladders: int
    membership_failures: int
    omission_failures: tuple[tuple[int, ...], ...]

    @property
    def passed(self):
        return self.membership_failures == 0 and not self.omission_failures


def check_class_olive(sig: OliveSignature, lam_max: int) -> ClassOliveReport:
    """For every ladder up to lam_max: the built model realizes the pattern
    relations exactly, and the forbidden structure does not embed."""
    from .ladder import all_ladders
    if not sig.strict:
        raise SignatureError("class-level checking needs both widths >= 2")
    if lam_max > 6:
        raise SignatureError("exhaustive mode is limited to lambda <= 6")
    nstar = build_Nstar(sig)
    ladders = 0
    membership_failures = 0
    omission_failures: list[tuple[int, ...]] = []
    for lam in range(1, lam_max + 1):
        for f in all_ladders(lam):
            ladders += 1
            M = model_from_ladder(f, sig)
            for a in range(lam):
                for b in range(a + 1, lam):
                    if (a, b) not in M.P:
                        membership_failures += 1
            for iota in (0, 1):
                ki = sig.k[iota]
                rel = (M.Q0, M.Q1)[iota]
                for combo in itertools.combinations(range(lam), ki):
                    for beta in range(combo[-1] + 1, lam):
                        want = all(f.f(beta, d) == iota
                                   for d in range(combo[0], combo[-1] + 1))
                        if (combo + (beta,) in rel) != want:
                            membership_failures += 1
            if embeds(nstar, M) is not None:
                omission_failures.append(tuple(f.bits()))
    return ClassOliveReport(ladders, membership_failures, tuple(omission_failures))


# ---------------------------------------------------------------------------
# random instances for property tests

def random_member(sig: OliveSignature, n: int, rng: random.Random,
                  density: float = 0.35, attempts: int = 64) -> FinStructure:
    """Seeded random structure omitting the forbidden structure (rejection
    sampled; falls back to a relation-free structure)."""
    nstar = build_Nstar(sig)
    for _ in range(attempts):
        P = frozenset((i, j) for i in range(n) for j in range(n)
                      if i != j and rng.random() < density)
        def rnd(ar):
            out = set()
            for tup in itertools.product(range(n), repeat=ar):
                if rng.random() < density / 4:
                    out.add(tup)
            return frozenset(out)
        M = FinStructure(sig, n, P, rnd(sig.k[0] + 1), rnd(sig.k[1] + 1))
        if embeds(nstar, M) is None:
            return M
    return FinStructure(sig, n, frozenset(), frozenset(), frozenset())


# ---------------------------------------------------------------------------
# file format

def structure_to_json(M: FinStructure) -> dict:
    return {"signature": {"eta": list(M.sig.eta), "k": list(M.sig.k)},
            "universe": M.n,
            "P": sorted(list(t) for t in M.P),
            "Q0": sorted(list(t) for t in M.Q0),
            "Q1": sorted(list(t) for t in M.Q1)}


def structure_from_json(obj: dict) -> FinStructure:
    sig = OliveSignature(tuple(obj["signature"]["eta"]),
                         tuple(obj["signature"]["k"]))
    return FinStructure(sig, int(obj["universe"]),
                        frozenset(tuple(t) for t in obj["P"]),
                        frozenset(tuple(t) for t in obj["Q0"]),
                        frozenset(tuple(t) for t in obj["Q1"]))


def load_structure(path: str) -> FinStructure:
    with open(path, "r", encoding="utf-8") as fh:
        return structure_from_json(json.load(fh))
