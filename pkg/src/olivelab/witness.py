"""Product-group witness families over ladders and their verification.

Tuples are assembled coordinatewise over the ladder's triple set; component 5
holds formal conjugators indexed by s-pairs. The relative evaluator rewrites
conjugations through the partial isomorphisms and never returns a wrong
element in any extension realizing them honestly; queries it cannot resolve
come back as UNDECIDED, a value, not an error.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from . import kgroup
from .kgroup import (IDENTITY, KElement, KParams, SPair, k_mul, pi_s,
                     apply_relabel, z_gen, KError)
from .ladder import Ladder, J_of, s_pair, gamma_sets
from .words import SigmaVariant, Word, XGen, sigma_star, Var


class WitnessError(ValueError):
    pass


class RetractionCriterionError(WitnessError):
    pass


# ---------------------------------------------------------------------------
# coordinate values

@dataclass(frozen=True)
class Concrete:
    value: KElement


@dataclass(frozen=True)
class FormalConj:
    s: SPair
    sign: int = 1


CoordValue = Concrete | FormalConj


class _Undecided:
    def __repr__(self):
        return "UNDECIDED"


UNDECIDED = _Undecided()

Triple = tuple[int, int, int]


@dataclass(frozen=True)
class ProductElement:
    """Sparse function from the triple set into coordinate values; missing
    coordinates are the identity."""
    coords: tuple[tuple[Triple, CoordValue], ...]

    def at(self, triple: Triple) -> CoordValue:
        for t, v in self.coords:
            if t == triple:
                return v
        return Concrete(IDENTITY)


@dataclass(frozen=True)
class WitnessFamily:
    ladder: Ladder
    params: KParams
    variant: SigmaVariant
    J: tuple[Triple, ...]
    tuples: tuple[tuple[ProductElement, ...], ...]   # tuples[beta][k]

    def value_at(self, beta: int, k: int, triple: Triple) -> CoordValue:
        return self.tuples[beta][k].at(triple)


# ---------------------------------------------------------------------------
# construction

def pi6(triple: Triple, gen: XGen, f: Ladder, p: KParams) -> CoordValue:
    """Coordinate value of generator x(beta,k) at one triple."""
    beta, k = gen.alpha, gen.k
    if k == 5:
        return FormalConj(s_pair(triple, beta, f), 1)
    if beta not in triple:
        return Concrete(IDENTITY)
    ell = triple.index(beta)
    return Concrete(z_gen(ell, k, p))


def build_witness(f: Ladder, p: KParams,
                  variant: SigmaVariant = SigmaVariant.REPAIRED) -> WitnessFamily:
    if p.mask is None:
        raise WitnessError("witness families live in the masked quotient")
    if f.iota != 2:
        raise WitnessError("witness construction needs a two-colour ladder")
    J = J_of(f)
    tuples = []
    for beta in range(f.lam):
        comps = []
        for k in range(6):
            entries = []
            for triple in J:
                val = pi6(triple, XGen(beta, k), f, p)
                if isinstance(val, FormalConj) or val.value != IDENTITY:
                    entries.append((triple, val))
            comps.append(ProductElement(tuple(entries)))
        tuples.append(tuple(comps))
    return WitnessFamily(f, p, SigmaVariant(variant), J, tuple(tuples))


def pe_mul(a: ProductElement, b: ProductElement, J: Sequence[Triple],
           p: KParams) -> ProductElement:
    """Coordinatewise product of all-concrete elements."""
    entries = []
    for t in J:
        va, vb = a.at(t), b.at(t)
        if not (isinstance(va, Concrete) and isinstance(vb, Concrete)):
            raise WitnessError("coordinatewise product needs concrete values")
        prod = k_mul(va.value, vb.value, p)
        if prod != IDENTITY:
            entries.append((t, Concrete(prod)))
    return ProductElement(tuple(entries))


# ---------------------------------------------------------------------------
# the relative evaluator

from functools import lru_cache


@lru_cache(maxsize=None)
def _domain_closure(s: SPair, p: KParams):
    pi = pi_s(s, p)
    return kgroup._closure_sets(pi.domain), pi


def _supported(el: KElement, sets) -> bool:
    d2, d1, d0 = sets
    return (all(b in d2 for b in kgroup.iter_bits(el.v2))
            and all(b in d1 for b in kgroup.iter_bits(el.v1))
            and all(b in d0 for b in kgroup.iter_bits(el.v0)))


def eval_relative(seq: Sequence[tuple[CoordValue, int]], p: KParams):
    """Normalize a signed coordinate-value word.

    Rules: adjacent concretes multiply (leftmost first); z_s^-1 c z_s rewrites
    to the relabelled c when c is supported on the domain closure of the
    partial isomorphism; adjacent mutually inverse conjugators cancel.
    Returns a KElement, or UNDECIDED when no rule applies to a remaining
    conjugator.
    """
    items: list = []
    for val, sign in seq:
        if isinstance(val, Concrete):
            el = val.value if sign > 0 else kgroup.k_inv(val.value, p)
            items.append(("c", el))
        else:
            items.append(("z", val.s, val.sign * sign))

    changed = True
    while changed:
        changed = False
        i = 0
        while i < len(items) - 1:
            a, b = items[i], items[i + 1]
            if a[0] == "c" and b[0] == "c":
                items[i:i + 2] = [("c", k_mul(a[1], b[1], p))]
                changed = True
                continue
            if a[0] == "z" and b[0] == "z" and a[1] == b[1] and a[2] == -b[2]:
                del items[i:i + 2]
                changed = True
                continue
            if (a[0] == "z" and a[2] == -1 and b[0] == "c"
                    and i + 2 < len(items)
                    and items[i + 2][0] == "z" and items[i + 2][1] == a[1]
                    and items[i + 2][2] == 1):
                sets, pi = _domain_closure(a[1], p)
                if b[1] == IDENTITY:
                    items[i:i + 3] = [("c", IDENTITY)]
                    changed = True
                    continue
                if _supported(b[1], sets):
                    items[i:i + 3] = [("c", apply_relabel(b[1], pi, p))]
                    changed = True
                    continue
            i += 1
    if not items:
        return IDENTITY
    if len(items) == 1 and items[0][0] == "c":
        return items[0][1]
    return UNDECIDED


# ---------------------------------------------------------------------------
# sigma value cache

_SIGMA_CACHE: dict = {}


def _sigma_value(variant: SigmaVariant, p: KParams,
                 args: tuple[KElement, KElement, KElement]) -> KElement:
    key = (SigmaVariant(variant).value, p.m, p.mask, args)
    got = _SIGMA_CACHE.get(key)
    if got is None:
        got = kgroup.eval_sigma(variant, args, p)
        _SIGMA_CACHE[key] = got
    return got


def _concrete(v: CoordValue) -> KElement:
    if not isinstance(v, Concrete):
        raise WitnessError("expected a concrete coordinate value")
    return v.value


# ---------------------------------------------------------------------------
# formula checks on families (three-valued: True / False / None=undecided)

def _phi0_at(fam: WitnessFamily, a: int, b: int, triple: Triple):
    conj = fam.value_at(b, 5, triple)
    c = _concrete(fam.value_at(a, 0, triple))
    rhs = _concrete(fam.value_at(a, 2, triple))
    got = eval_relative([(conj, -1), (Concrete(c), 1), (conj, 1)], fam.params)
    if got is UNDECIDED:
        return None
    return got == rhs


def _phi1_at(fam: WitnessFamily, a: int, b: int, triple: Triple):
    conj = fam.value_at(a, 5, triple)
    out = True
    for k_src, k_dst in ((1, 3), (4, 4)):
        c = _concrete(fam.value_at(b, k_src, triple))
        rhs = _concrete(fam.value_at(b, k_dst, triple))
        got = eval_relative([(conj, -1), (Concrete(c), 1), (conj, 1)], fam.params)
        if got is UNDECIDED:
            return None
        if got != rhs:
            out = False
    return out


def _tri_and(values):
    """Conjunction over a tri-valued iterable; False dominates None."""
    saw_none = False
    for v in values:
        if v is False:
            return False
        if v is None:
            saw_none = True
    return None if saw_none else True


def phi_holds(fam: WitnessFamily, iota: int, a: int, b: int):
    """phi_iota[g_a, g_b] over the whole product (all coordinates)."""
    check = _phi0_at if iota == 0 else _phi1_at
    relevant = [t for t in fam.J if (a if iota == 0 else b) in t]
    return _tri_and(check(fam, a, b, t) for t in relevant)


def _sigma_args_at(fam: WitnessFamily, idxs: tuple[int, int, int],
                   comps: tuple[int, int, int], triple: Triple):
    out = []
    for i, k in zip(idxs, comps):
        out.append(_concrete(fam.value_at(i, k, triple)))
    return tuple(out)


def psi_holds(fam: WitnessFamily, a: int, b: int, c: int) -> bool:
    """psi[g_a, g_b, g_c]: equality conjunct at every coordinate, inequality
    conjunct witnessed somewhere. Sigma arguments are always concrete, so the
    answer is definite."""
    p = fam.params
    relevant = [t for t in fam.J if a in t or b in t or c in t]
    for t in relevant:
        args = _sigma_args_at(fam, (a, b, c), (0, 1, 4), t)
        if _sigma_value(fam.variant, p, args) != IDENTITY:
            return False
    for t in relevant:
        args = _sigma_args_at(fam, (a, b, c), (2, 3, 4), t)
        if _sigma_value(fam.variant, p, args) != IDENTITY:
            return True
    return False


def formula_report_family(fam: WitnessFamily,
                          idxs: tuple[int, int, int, int]) -> tuple:
    """Tri-valued (phi0[a0,a1], phi1[a1,a2], phi1[a1,a3], psi[a0,a2,a3])."""
    i0, i1, i2, i3 = idxs
    return (phi_holds(fam, 0, i0, i1), phi_holds(fam, 1, i1, i2),
            phi_holds(fam, 1, i1, i3), psi_holds(fam, i0, i2, i3))


# ---------------------------------------------------------------------------
# clause-by-clause verification

@dataclass(frozen=True)
class ClauseReport:
    pair_checks: int
    triple_checks: int
    failures: tuple[dict, ...]
    undecided: tuple[dict, ...]

    @property
    def passed(self) -> bool:
        return not self.failures and not self.undecided


def verify_clause_b(fam: WitnessFamily) -> ClauseReport:
    """Check the ladder pattern: phi_{f_b(a)} for every pair, psi for every
    triple in the triple set."""
    f = fam.ladder
    failures: list[dict] = []
    undecided: list[dict] = []
    pair_checks = 0
    for a, b in itertools.combinations(range(f.lam), 2):
        iota = f.f(b, a)
        got = phi_holds(fam, iota, a, b)
        pair_checks += 1
        if got is None:
            undecided.append({"kind": f"phi{iota}", "pair": [a, b]})
        elif not got:
            failures.append({"kind": f"phi{iota}", "pair": [a, b]})
    triple_checks = 0
    for (a, b, g) in fam.J:
        got = psi_holds(fam, a, b, g)
        triple_checks += 1
        if got is None:
            undecided.append({"kind": "psi", "triple": [a, b, g]})
        elif not got:
            failures.append({"kind": "psi", "triple": [a, b, g]})
    return ClauseReport(pair_checks, triple_checks, tuple(failures), tuple(undecided))


def forbidden_scan(fam: WitnessFamily) -> tuple[tuple[int, int, int, int], ...]:
    """All index quadruples (repeats allowed) where the four formulas are all
    established true. The contract on built families is that none exist."""
    lam = fam.ladder.lam
    phi0_tab: dict = {}
    phi1_tab: dict = {}
    psi_tab: dict = {}
    findings = []
    for i0, i1, i2, i3 in itertools.product(range(lam), repeat=4):
        k01 = (i0, i1)
        if k01 not in phi0_tab:
            phi0_tab[k01] = phi_holds(fam, 0, i0, i1)
        if phi0_tab[k01] is not True:
            continue
        k12 = (i1, i2)
        if k12 not in phi1_tab:
            phi1_tab[k12] = phi_holds(fam, 1, i1, i2)
        if phi1_tab[k12] is not True:
            continue
        k13 = (i1, i3)
        if k13 not in phi1_tab:
            phi1_tab[k13] = phi_holds(fam, 1, i1, i3)
        if phi1_tab[k13] is not True:
            continue
        k023 = (i0, i2, i3)
        if k023 not in psi_tab:
            psi_tab[k023] = psi_holds(fam, i0, i2, i3)
        if psi_tab[k023] is True:
            findings.append((i0, i1, i2, i3))
    return tuple(findings)


# ---------------------------------------------------------------------------
# the negative direction: retraction certificates

def g5_retract(f: Ladder, gens: set[XGen], w: Word) -> Word:
    """Retraction onto the free subgroup on `gens`.

    Generators outside the set map to the identity; the image is freely
    reduced. A nonempty image certifies that w is not the identity in the
    group presented by the ladder's sigma equations. The generator set must
    avoid containing any full equation triple.
    """
    for (a, b, g) in J_of(f):
        if {XGen(a, 0), XGen(b, 1), XGen(g, 4)} <= gens:
            raise RetractionCriterionError(
                f"generator set contains the full equation triple {(a, b, g)}")
    out = []
    for gen, s in w.letters:
        if not isinstance(gen, XGen):
            raise WitnessError(f"retraction expects tuple generators, got {gen!r}")
        if gen in gens:
            out.append((gen, s))
    return Word(tuple(out)).reduce()


@dataclass(frozen=True)
class NegativeReport:
    lam: int
    outside_checks: int
    all_triple_checks: int
    failures: tuple[dict, ...]

    @property
    def passed(self):
        return not self.failures


@lru_cache(maxsize=4096)
def _sigma_word(variant: SigmaVariant, a: int, b: int, g: int,
                comps: tuple[int, int, int]) -> Word:
    return sigma_star(variant, XGen(a, comps[0]), XGen(b, comps[1]),
                      XGen(g, comps[2]))


def negative_direction_report(f: Ladder,
                              variant: SigmaVariant = SigmaVariant.REPAIRED
                              ) -> NegativeReport:
    """Certificates that sigma stays nontrivial where the pattern demands it:
    on components (0,1,4) for triples outside the triple set, and on
    components (2,3,4) for every triple."""
    J = set(J_of(f))
    failures = []
    outside = 0
    allt = 0

    def retract_drop_outside(keep: set[XGen], w: Word) -> Word:
        return Word(tuple((gen, s) for gen, s in w.letters if gen in keep)).reduce()

    gens2 = {XGen(xi, l) for xi in range(f.lam) for l in range(1, 5)}
    for (a, b, g) in itertools.combinations(range(f.lam), 3):
        if (a, b, g) not in J:
            outside += 1
            w = _sigma_word(variant, a, b, g, (0, 1, 4))
            gens = {XGen(xi, l) for xi in (a, b, g) for l in range(5)}
            # the generator set never contains a full equation triple here:
            # the only candidate is (a, b, g) itself, which is outside J
            if retract_drop_outside(gens, w).is_identity:
                failures.append({"kind": "outside", "triple": [a, b, g]})
        allt += 1
        w2 = _sigma_word(variant, a, b, g, (2, 3, 4))
        if retract_drop_outside(gens2, w2).is_identity:
            failures.append({"kind": "shifted", "triple": [a, b, g]})
    return NegativeReport(f.lam, outside, allt, tuple(failures))
