"""Ladder combinatorics: triple sets, s-pairs, equation families, and the
partial generator maps with their freeness checks."""
from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass
from typing import Iterator

from .kgroup import SPair
from .words import XGen


class LadderError(ValueError):
    pass


@dataclass(frozen=True)
class Ladder:
    """Row alpha is a function {0..alpha-1} -> {0..iota-1}."""
    lam: int
    iota: int
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.lam < 1:
            raise LadderError("lambda must be positive")
        if self.iota < 2:
            raise LadderError("iota must be at least 2")
        if len(self.rows) != self.lam:
            raise LadderError("need one row per alpha < lambda")
        for alpha, row in enumerate(self.rows):
            if len(row) != alpha:
                raise LadderError(f"row {alpha} must have {alpha} entries")
            if any(not (0 <= v < self.iota) for v in row):
                raise LadderError(f"row {alpha} has a value outside the colour range")

    @staticmethod
    def from_rows(rows: list[list[int]], iota: int = 2) -> "Ladder":
        return Ladder(len(rows), iota, tuple(tuple(r) for r in rows))

    def f(self, beta: int, alpha: int) -> int:
        return self.rows[beta][alpha]

    def bits(self) -> tuple[int, ...]:
        return tuple(v for row in self.rows for v in row)


def all_ladders(lam: int, iota: int = 2) -> Iterator[Ladder]:
    """Every ladder of the given length, in lexicographic bit order."""
    slots = lam * (lam - 1) // 2
    for combo in itertools.product(range(iota), repeat=slots):
        rows = []
        pos = 0
        for alpha in range(lam):
            rows.append(tuple(combo[pos:pos + alpha]))
            pos += alpha
        yield Ladder(lam, iota, tuple(rows))


def random_ladder(lam: int, rng: random.Random, iota: int = 2) -> Ladder:
    rows = tuple(tuple(rng.randrange(iota) for _ in range(alpha)) for alpha in range(lam))
    return Ladder(lam, iota, rows)


def ladder_count(lam: int, iota: int = 2) -> int:
    return iota ** (lam * (lam - 1) // 2)


# ---------------------------------------------------------------------------
# triple set and s-pairs

def J_of(f: Ladder) -> tuple[tuple[int, int, int], ...]:
    """Triples (a, b, g) with f_g constantly 0 on the closed interval [a, b]."""
    if f.iota != 2:
        raise LadderError("the triple set is defined for two-colour ladders")
    out = []
    for a, b, g in itertools.combinations(range(f.lam), 3):
        if all(f.f(g, d) == 0 for d in range(a, b + 1)):
            out.append((a, b, g))
    return tuple(out)


def s_pair(triple: tuple[int, int, int], beta: int, f: Ladder) -> SPair:
    """The subset pair assigned to (triple, beta); always lands in S*."""
    if triple not in J_of(f):
        raise LadderError(f"{triple} is not in the triple set of this ladder")
    if not (0 <= beta < f.lam):
        raise LadderError("beta out of range")
    u1 = tuple(l for l in range(3) if triple[l] < beta and f.f(beta, triple[l]) == 0)
    u2 = tuple(l for l in range(3) if beta < triple[l] and f.f(triple[l], beta) == 1)
    return SPair(u1, u2)


# ---------------------------------------------------------------------------
# equation families

@dataclass(frozen=True)
class GammaSets:
    gamma0: tuple[tuple[int, int], ...]
    gamma1: tuple[tuple[int, int], ...]
    gamma2: tuple[tuple[int, int, int], ...]


def gamma_sets(f: Ladder) -> GammaSets:
    if f.iota != 2:
        raise LadderError("equation families are defined for two-colour ladders")
    g0, g1 = [], []
    for alpha, beta in itertools.combinations(range(f.lam), 2):
        (g0 if f.f(beta, alpha) == 0 else g1).append((alpha, beta))
    return GammaSets(tuple(g0), tuple(g1), J_of(f))


# ---------------------------------------------------------------------------
# the partial generator maps

def F_beta(beta: int, f: Ladder) -> dict[XGen, XGen]:
    """Component map: x(a,0)->x(a,2) below beta on colour 0, and
    x(g,1)->x(g,3), x(g,4)->x(g,4) above beta on colour 1."""
    if not (0 <= beta < f.lam):
        raise LadderError("beta out of range")
    out: dict[XGen, XGen] = {}
    for alpha in range(beta):
        if f.f(beta, alpha) == 0:
            out[XGen(alpha, 0)] = XGen(alpha, 2)
    for gamma in range(beta + 1, f.lam):
        if f.f(gamma, beta) == 1:
            out[XGen(gamma, 1)] = XGen(gamma, 3)
            out[XGen(gamma, 4)] = XGen(gamma, 4)
    return out


@dataclass(frozen=True)
class FBetaReport:
    passed: bool
    injective: bool
    domain_ok: bool
    range_ok: bool
    witness: tuple[int, int, int] | None = None


def check_gen_map(mapping: dict[XGen, XGen], f: Ladder) -> FBetaReport:
    """Injectivity plus the free-subgroup criterion against the ladder's
    sigma-equation triples: neither the domain nor the range may contain all
    three generators x(a,0), x(b,1), x(g,4) of any such equation."""
    injective = len(set(mapping.values())) == len(mapping)
    dom = set(mapping)
    rng = set(mapping.values())
    domain_ok = True
    range_ok = True
    witness = None
    for (a, b, g) in J_of(f):
        eq = {XGen(a, 0), XGen(b, 1), XGen(g, 4)}
        if eq <= dom:
            domain_ok = False
            witness = (a, b, g)
            break
        if eq <= rng:
            range_ok = False
            witness = (a, b, g)
            break
    return FBetaReport(injective and domain_ok and range_ok,
                       injective, domain_ok, range_ok, witness)


def check_F_beta(beta: int, f: Ladder) -> FBetaReport:
    return check_gen_map(F_beta(beta, f), f)


# ---------------------------------------------------------------------------
# file format

def ladder_to_json(f: Ladder) -> dict:
    return {"lambda": f.lam, "iota": f.iota,
            "rows": [list(r) for r in f.rows[1:]]}


def ladder_from_json(obj: dict) -> Ladder:
    try:
        lam = int(obj["lambda"])
        iota = int(obj.get("iota", 2))
        rows = [tuple()] + [tuple(int(v) for v in r) for r in obj["rows"]]
    except (KeyError, TypeError) as exc:
        raise LadderError(f"malformed ladder object: {exc}")
    if len(rows) != lam:
        raise LadderError("rows list must have lambda - 1 entries")
    return Ladder(lam, iota, tuple(rows))


def load_ladder(path: str) -> Ladder:
    with open(path, "r", encoding="utf-8") as fh:
        return ladder_from_json(json.load(fh))
