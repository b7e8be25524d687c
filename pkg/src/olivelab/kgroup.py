"""Normal-form arithmetic in the tiered finite 2-group family.

Elements are triples of bit-vectors (v2, v1, v0), one per generator level,
stored as Python ints. Multiplication is the fixed deterministic collection
procedure in closed form: concatenated canonical words are sorted letter by
letter, leftmost-out-of-order first; swapping two same-level letters at level
j+1 with indices b < a emits the level-j letter at the colex rank of {b, a};
equal adjacent letters cancel; cross-level and level-0 swaps are free.

Consistency of the underlying presentation is a *tested* property, not an
axiom: `consistency_report` runs the closure-order and associativity probes
and, when they fail, exhibits a two-path collection witness showing the
relation family forces a level-0 collapse. The probes do fail at every
parameter size, see the report; all downstream consumers are restricted to
the verified identities (fixed-fold evaluation, relabelling, cancellation).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, NamedTuple, Sequence

from .words import GroupContext, SigmaVariant, sigma_star, Var


class KError(ValueError):
    pass


class KInconsistencyError(KError):
    pass


class SPairError(KError):
    pass


# ---------------------------------------------------------------------------
# colex pair ranking

def tri(v: int) -> int:
    return v * (v - 1) // 2


def pair_rank(i: int, j: int) -> int:
    """Colex rank of the unordered pair {i, j}."""
    if i == j:
        raise ValueError("pair needs distinct indices")
    if i > j:
        i, j = j, i
    return tri(j) + i


def pair_unrank(r: int) -> tuple[int, int]:
    j = 1
    while tri(j + 1) <= r:
        j += 1
    return r - tri(j), j


def iter_bits(v: int):
    while v:
        low = v & -v
        yield low.bit_length() - 1
        v ^= low


def popcount(v: int) -> int:
    return bin(v).count("1")


# ---------------------------------------------------------------------------
# parameters

@dataclass(frozen=True)
class KParams:
    """Sizes and quotient mask for one instance of the family.

    n1 and n0 are pinned to the binomial tower over n2; the pairing maps at
    both levels are the colex ranks (injective, here bijective).
    """
    m: int
    n2: int
    n1: int
    n0: int
    mask: int | None = None

    def __post_init__(self):
        if self.n2 != 3 * self.m:
            raise KError("n2 must be 3*m")
        if self.n1 != tri(self.n2) or self.n0 != tri(self.n1):
            raise KError("n1/n0 must match the binomial tower")
        if self.mask is not None and not (0 <= self.mask < self.n0):
            raise KError("mask out of range")

    @staticmethod
    def for_width(m: int, mask: int | None = None) -> "KParams":
        n2 = 3 * m
        return KParams(m=m, n2=n2, n1=tri(n2), n0=tri(tri(n2)), mask=mask)

    def fingerprint(self, variant: SigmaVariant | None = None) -> dict:
        out = {"m": self.m, "mask": self.mask}
        if variant is not None:
            out["sigma_variant"] = SigmaVariant(variant).value
        return out


def toy_params(mask: int | None = None) -> KParams:
    """The scaled-down instance: n2 = n1 = n0 = 3."""
    return KParams.for_width(1, mask=mask)


def full_params(mask: int | None = None) -> KParams:
    return KParams.for_width(6, mask=mask)


class KElement(NamedTuple):
    v2: int
    v1: int
    v0: int


IDENTITY = KElement(0, 0, 0)


# ---------------------------------------------------------------------------
# the collection product

def _pairs_acc(wlow: int, vsel: int) -> int:
    """XOR over v in vsel of the low-v bits of wlow shifted to block v.

    Output bit at colex{u, v} is wlow[u] & vsel[v] for u < v.
    """
    out = 0
    for v in iter_bits(vsel):
        out ^= (wlow & ((1 << v) - 1)) << tri(v)
    return out


@lru_cache(maxsize=None)
def _emission_masks(n1: int) -> tuple[int, ...]:
    """For each colex rank rp, the set of ranks r < rp whose letter is emitted
    earlier in the fixed collection order (first index ascending, second
    descending)."""
    pairs = [pair_unrank(r) for r in range(n1)]
    masks = []
    for rp in range(n1):
        ip, jp = pairs[rp]
        m = 0
        for r in range(rp):
            i, j = pairs[r]
            if i < ip or (i == ip and j > jp):
                m |= 1 << r
        masks.append(m)
    return tuple(masks)


def _emission_pairs(beta: int, n1: int) -> int:
    """Level-0 letters emitted while later level-1 emissions cross earlier ones."""
    masks = _emission_masks(n1)
    out = 0
    for rp in iter_bits(beta):
        out ^= (beta & masks[rp]) << tri(rp)
    return out


def _check_dims(a: KElement, p: KParams):
    if a.v2 >> p.n2 or a.v1 >> p.n1 or a.v0 >> p.n0:
        raise KError("element does not fit the parameter dimensions")


def k_mul(a: KElement, b: KElement, p: KParams) -> KElement:
    _check_dims(a, p)
    _check_dims(b, p)
    c1 = _pairs_acc(b.v2, a.v2)
    v2 = a.v2 ^ b.v2
    v1 = a.v1 ^ b.v1 ^ c1
    v0 = a.v0 ^ b.v0
    if a.v1 or b.v1:
        v0 ^= _pairs_acc(b.v1, a.v1)
    if c1:
        v0 ^= _pairs_acc(a.v1 ^ b.v1, c1) ^ _emission_pairs(c1, p.n1)
    if p.mask is not None:
        v0 &= ~(1 << p.mask)
    return KElement(v2, v1, v0)


def k_inv(a: KElement, p: KParams) -> KElement:
    """Solve a * x = identity for x; the left inverse law is a tested property."""
    _check_dims(a, p)
    c1 = _pairs_acc(a.v2, a.v2)
    b1 = a.v1 ^ c1
    b0 = a.v0
    if a.v1 or b1:
        b0 ^= _pairs_acc(b1, a.v1)
    if c1:
        b0 ^= _pairs_acc(a.v1 ^ b1, c1) ^ _emission_pairs(c1, p.n1)
    if p.mask is not None:
        b0 &= ~(1 << p.mask)
    return KElement(a.v2, b1, b0)


def k_identity(p: KParams) -> KElement:
    return IDENTITY


def k_generator(j: int, ell: int, p: KParams) -> KElement:
    if j not in (0, 1, 2):
        raise KError(f"level must be 0, 1 or 2, got {j}")
    n = {2: p.n2, 1: p.n1, 0: p.n0}[j]
    if not (0 <= ell < n):
        raise KError(f"generator index {ell} out of range for level {j}")
    if j == 0 and p.mask == ell:
        raise KError("the masked level-0 generator is the identity in the quotient")
    v = [0, 0, 0]
    v[j] = 1 << ell
    return KElement(v[2], v[1], v[0])


def k_commutator(a: KElement, b: KElement, p: KParams) -> KElement:
    """a^-1 b^-1 a b by fixed left-to-right folding."""
    return k_mul(k_mul(k_mul(k_inv(a, p), k_inv(b, p), p), a, p), b, p)


def z_gen(i: int, k: int, p: KParams) -> KElement:
    """The designated level-2 generator y_{2, m*i + k}."""
    if not (0 <= i < 3 and 0 <= k < p.m):
        raise KError(f"z index ({i},{k}) out of range for m={p.m}")
    return k_generator(2, p.m * i + k, p)


def z_raw_index(i: int, k: int, p: KParams) -> int:
    if not (0 <= i < 3 and 0 <= k < p.m):
        raise KError(f"z index ({i},{k}) out of range for m={p.m}")
    return p.m * i + k


class KContext(GroupContext):
    """Group-interface adapter over a parameter set."""

    def __init__(self, p: KParams):
        self.p = p

    def identity(self):
        return IDENTITY

    def mul(self, a, b):
        return k_mul(a, b, self.p)

    def inv(self, a):
        return k_inv(a, self.p)

    def elements(self):
        return enumerate_group(self.p)


# ---------------------------------------------------------------------------
# sigma values, ell*, quotient

def sigma_args(p: KParams) -> tuple[KElement, KElement, KElement]:
    """The designated argument triple (k-indices 0, 1, 4 clamped to m-1)."""
    return (z_gen(0, 0, p),
            z_gen(1, min(1, p.m - 1), p),
            z_gen(2, min(4, p.m - 1), p))


def eval_sigma(variant: SigmaVariant, args: Sequence[KElement], p: KParams) -> KElement:
    w = sigma_star(variant)
    x, y, z = args
    return w.evaluate({Var("x"): x, Var("y"): y, Var("z"): z}, KContext(p))


def compute_ell_star(p: KParams, variant: SigmaVariant = SigmaVariant.REPAIRED) -> int:
    """Index of the level-0 generator hit by sigma at the designated triple."""
    if p.mask is not None:
        raise KError("ell* must be computed before masking")
    val = eval_sigma(variant, sigma_args(p), p)
    if val == IDENTITY:
        raise KInconsistencyError(
            f"sigma value is the identity for variant {SigmaVariant(variant).value}; "
            "this variant does not separate the designated triple")
    if val.v2 or val.v1 or popcount(val.v0) != 1:
        raise KInconsistencyError("sigma value is not a single level-0 generator")
    return val.v0.bit_length() - 1


def make_K2(p: KParams, variant: SigmaVariant = SigmaVariant.REPAIRED) -> KParams:
    """Quotient parameters masking the ell* bit after every operation."""
    ell = compute_ell_star(p, variant)
    return KParams(m=p.m, n2=p.n2, n1=p.n1, n0=p.n0, mask=ell)


# ---------------------------------------------------------------------------
# s-pairs and partial isomorphisms

@dataclass(frozen=True, order=True)
class SPair:
    """A pair of subsets of {0,1,2}, every u1 element below every u2 element,
    with the single conflicting pair excluded."""
    u1: tuple[int, ...]
    u2: tuple[int, ...]

    def __post_init__(self):
        if list(self.u1) != sorted(set(self.u1)) or list(self.u2) != sorted(set(self.u2)):
            raise SPairError("u1/u2 must be sorted duplicate-free tuples")
        if not set(self.u1) <= {0, 1, 2} or not set(self.u2) <= {0, 1, 2}:
            raise SPairError("u1/u2 must be subsets of {0,1,2}")
        if any(l1 >= l2 for l1 in self.u1 for l2 in self.u2):
            raise SPairError("every u1 element must be below every u2 element")
        if self.u1 == (0,) and self.u2 == (1, 2):
            raise SPairError("({0},{1,2}) is the excluded pair")

    def __repr__(self):
        return f"s({set(self.u1) or '{}'},{set(self.u2) or '{}'})"


def enumerate_S_star() -> tuple[SPair, ...]:
    out = []
    subsets = [tuple(c) for k in range(4) for c in itertools.combinations(range(3), k)]
    for u1 in subsets:
        for u2 in subsets:
            try:
                out.append(SPair(u1, u2))
            except SPairError:
                continue
    return tuple(sorted(out))


@dataclass(frozen=True)
class PartialIso:
    """A finite injection between level-2 generator indices."""
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        src = [a for a, _ in self.pairs]
        dst = [b for _, b in self.pairs]
        if len(set(src)) != len(src):
            raise KError("partial iso sources must be distinct")
        if len(set(dst)) != len(dst):
            raise KError("partial iso targets must be distinct")

    @staticmethod
    def from_z(mapping: dict[tuple[int, int], tuple[int, int]], p: KParams) -> "PartialIso":
        pairs = tuple(sorted((z_raw_index(i, k, p), z_raw_index(i2, k2, p))
                             for (i, k), (i2, k2) in mapping.items()))
        return PartialIso(pairs)

    @property
    def mapping(self) -> dict[int, int]:
        return dict(self.pairs)

    @property
    def domain(self) -> tuple[int, ...]:
        return tuple(sorted(a for a, _ in self.pairs))

    @property
    def codomain(self) -> tuple[int, ...]:
        return tuple(sorted(b for _, b in self.pairs))


def pi_s(s: SPair, p: KParams) -> PartialIso:
    """The generator map z(l,0)->z(l,2) on u1 and z(l,1)->z(l,3), z(l,4)->z(l,4)
    on u2."""
    if p.m < 5:
        raise KError("pi_s needs component indices up to 4; use m >= 5")
    mapping: dict[tuple[int, int], tuple[int, int]] = {}
    for l in s.u1:
        mapping[(l, 0)] = (l, 2)
    for l in s.u2:
        mapping[(l, 1)] = (l, 3)
        mapping[(l, 4)] = (l, 4)
    return PartialIso.from_z(mapping, p)


def excluded_conflict_map(p: KParams) -> PartialIso:
    """The three-generator relabelling the excluded pair would have induced."""
    return PartialIso.from_z({(0, 0): (0, 2), (1, 1): (1, 3), (2, 4): (2, 4)}, p)


def _closure_sets(indices: Iterable[int]) -> tuple[set[int], set[int], set[int]]:
    d2 = set(indices)
    d1 = {pair_rank(a, b) for a, b in itertools.combinations(sorted(d2), 2)}
    d0 = {pair_rank(u, v) for u, v in itertools.combinations(sorted(d1), 2)}
    return d2, d1, d0


def induced_maps(pi: PartialIso) -> tuple[dict[int, int], dict[int, int], dict[int, int]]:
    """Level-2 map plus the relabelings it induces at levels 1 and 0."""
    f2 = pi.mapping
    dom2 = sorted(f2)
    f1 = {pair_rank(a, b): pair_rank(f2[a], f2[b])
          for a, b in itertools.combinations(dom2, 2)}
    dom1 = sorted(f1)
    f0 = {pair_rank(u, v): pair_rank(f1[u], f1[v])
          for u, v in itertools.combinations(dom1, 2)}
    return f2, f1, f0


def apply_relabel(el: KElement, pi: PartialIso, p: KParams) -> KElement:
    """Apply the induced relabelling to an element supported on the domain."""
    f2, f1, f0 = induced_maps(pi)

    def map_vec(v: int, f: dict[int, int]) -> int:
        out = 0
        for b in iter_bits(v):
            if b not in f:
                raise KError(f"support bit {b} outside the relabelling domain")
            out |= 1 << f[b]
        return out

    out = KElement(map_vec(el.v2, f2), map_vec(el.v1, f1), map_vec(el.v0, f0))
    if p.mask is not None and (out.v0 >> p.mask) & 1:
        raise KError("relabelling hit the masked index")
    return out


@dataclass(frozen=True)
class IsoReport:
    passed: bool
    checks: tuple[tuple[str, bool], ...]
    detail: str = ""

    def check(self, name: str) -> bool:
        return dict(self.checks)[name]


def verify_partial_iso(pi: PartialIso, p: KParams, samples: int = 10_000,
                       seed: int = 0) -> IsoReport:
    """Well-definedness, injectivity, mask compatibility, and a sampled
    homomorphism check of the induced relabelling on the masked instance."""
    import random
    rng = random.Random(seed)
    checks: list[tuple[str, bool]] = []
    detail = ""

    in_range = all(0 <= b < p.n2 for pair in pi.pairs for b in pair)
    checks.append(("indices_in_range", in_range))

    f2, f1, f0 = induced_maps(pi)
    inj1 = len(set(f1.values())) == len(f1)
    inj0 = len(set(f0.values())) == len(f0)
    checks.append(("level1_injective", inj1))
    checks.append(("level0_injective", inj0))

    mask_ok = True
    if p.mask is not None:
        for r, r_img in f0.items():
            if (r == p.mask) != (r_img == p.mask):
                mask_ok = False
                detail = (f"level-0 index {r} maps to {r_img}; the masked index "
                          f"{p.mask} is hit on one side only")
                break
    checks.append(("mask_compatible", mask_ok))

    hom_ok = True
    if in_range and inj1 and inj0 and mask_ok and pi.pairs:
        gens = [k_generator(2, a, p) for a in pi.domain]
        pool = [IDENTITY]
        for _ in range(max(64, min(samples, 4096))):
            pool.append(k_mul(pool[rng.randrange(len(pool))],
                              gens[rng.randrange(len(gens))], p))
        for _ in range(samples):
            a = pool[rng.randrange(len(pool))]
            b = pool[rng.randrange(len(pool))]
            lhs = apply_relabel(k_mul(a, b, p), pi, p)
            rhs = k_mul(apply_relabel(a, pi, p), apply_relabel(b, pi, p), p)
            if lhs != rhs:
                hom_ok = False
                detail = "relabelling failed a sampled product"
                break
    checks.append(("homomorphism_sampled", hom_ok))

    passed = all(ok for _, ok in checks)
    return IsoReport(passed, tuple(checks), detail)


# ---------------------------------------------------------------------------
# closure enumeration and the toy conjugator

def enumerate_group(p: KParams, gen_indices: Sequence[tuple[int, int]] | None = None
                    ) -> tuple[KElement, ...]:
    """Deterministic closure of the given generators (all of them by default)
    under right multiplication. Intended for small instances."""
    if gen_indices is None:
        gens = [k_generator(j, i, p)
                for j, n in ((2, p.n2), (1, p.n1), (0, p.n0))
                for i in range(n) if not (j == 0 and p.mask == i)]
    else:
        gens = [k_generator(j, i, p) for j, i in gen_indices]
    seen = {IDENTITY}
    frontier = [IDENTITY]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = k_mul(a, g, p)
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
        frontier = sorted(nxt)
    return tuple(sorted(seen))


@dataclass(frozen=True)
class ConjugatorResult:
    ok: bool
    perm: tuple[int, ...] | None
    carrier: tuple[KElement, ...]
    detail: str


def toy_conjugator(pi: PartialIso, p: KParams) -> ConjugatorResult:
    """Search for a carrier permutation realizing the relabelling by
    conjugation of the right-translation maps.

    Builds z orbit by orbit: z(t . x) = z(t) . phi(x) for every x in the
    domain closure, then verifies the conjugation identity pointwise. Fails
    with a witness when no orbit pairing is propagation-consistent, which
    happens exactly when the collection product is not associative on the
    orbits involved.
    """
    carrier = enumerate_group(p)
    index = {e: i for i, e in enumerate(carrier)}
    dom_gens = [(2, a) for a in pi.domain]
    rng_gens = [(2, b) for b in pi.codomain]
    D = enumerate_group(p, dom_gens)
    R = enumerate_group(p, rng_gens)
    if len(D) != len(R):
        return ConjugatorResult(False, None, carrier,
                                "domain and range closures have different orders")
    try:
        phi = {d: apply_relabel(d, pi, p) for d in D}
    except KError as exc:
        return ConjugatorResult(False, None, carrier, f"relabelling failed: {exc}")
    if sorted(phi.values()) != list(R):
        return ConjugatorResult(False, None, carrier,
                                "relabelled domain closure is not the range closure")

    nontrivial = [d for d in D if d != IDENTITY]
    z: dict[KElement, KElement] = {}
    used: set[KElement] = set()

    def propagate(base: KElement, image: KElement) -> dict[KElement, KElement] | None:
        local = {base: image}
        queue = [base]
        while queue:
            t = queue.pop()
            for d in nontrivial:
                t2 = k_mul(t, d, p)
                u2 = k_mul(local[t], phi[d], p)
                if t2 in local:
                    if local[t2] != u2:
                        return None
                elif t2 in z or u2 in used or u2 in local.values():
                    if local.get(t2) != u2:
                        return None
                else:
                    local[t2] = u2
                    queue.append(t2)
        return local

    for t0 in carrier:
        if t0 in z:
            continue
        placed = False
        for u0 in carrier:
            if u0 in used:
                continue
            local = propagate(t0, u0)
            if local is None:
                continue
            if len(set(local.values())) != len(local):
                continue
            if any(u in used for u in local.values()):
                continue
            z.update(local)
            used.update(local.values())
            placed = True
            break
        if not placed:
            return ConjugatorResult(False, None, carrier,
                                    f"no consistent image for orbit of element {index[t0]}")

    for x in D:
        for t in carrier:
            if z[k_mul(t, x, p)] != k_mul(z[t], phi[x], p):
                return ConjugatorResult(False, None, carrier,
                                        "pointwise conjugation check failed")
    perm = tuple(index[z[e]] for e in carrier)
    return ConjugatorResult(True, perm, carrier, "ok")


# ---------------------------------------------------------------------------
# consistency probes

@dataclass(frozen=True)
class ConsistencyReport:
    closure_order: int | None
    expected_order: int
    closure_ok: bool | None
    assoc_samples: int
    assoc_failures: int
    collapse_witness: dict
    consistent: bool


def _collapse_witness(p: KParams) -> dict:
    """Two legal collections of y_{1,0} y_{2,2} y_{2,0} that differ by a
    level-0 letter, forcing that letter to the identity in any group model."""
    y10 = k_generator(1, 0, p)
    y22 = k_generator(2, 2, p)
    y20 = k_generator(2, 0, p)
    left = k_mul(k_mul(y10, y22, p), y20, p)
    right = k_mul(y10, k_mul(y22, y20, p), p)
    return {
        "word": "y[1,0] y[2,2] y[2,0]",
        "left_fold": element_to_json(left, p),
        "right_fold": element_to_json(right, p),
        "forced_identity_bits": sorted(iter_bits(left.v0 ^ right.v0)),
    }


def consistency_report(p: KParams, assoc_samples: int = 5000, seed: int = 0,
                       enumerate_closure: bool | None = None) -> ConsistencyReport:
    """Order test plus associativity sampling; reports presentation
    inconsistency with an explicit two-path witness instead of silently
    quotienting."""
    import random
    rng = random.Random(seed)
    expected = 1 << (p.n2 + p.n1 + p.n0 - (1 if p.mask is not None else 0))
    if enumerate_closure is None:
        enumerate_closure = p.n2 + p.n1 + p.n0 <= 16
    closure_order = None
    closure_ok = None
    if enumerate_closure:
        closure_order = len(enumerate_group(p))
        closure_ok = closure_order == expected

    failures = 0
    for _ in range(assoc_samples):
        a = KElement(rng.getrandbits(p.n2), rng.getrandbits(p.n1), rng.getrandbits(p.n0))
        b = KElement(rng.getrandbits(p.n2), rng.getrandbits(p.n1), rng.getrandbits(p.n0))
        c = KElement(rng.getrandbits(p.n2), rng.getrandbits(p.n1), rng.getrandbits(p.n0))
        if p.mask is not None:
            a = KElement(a.v2, a.v1, a.v0 & ~(1 << p.mask))
            b = KElement(b.v2, b.v1, b.v0 & ~(1 << p.mask))
            c = KElement(c.v2, c.v1, c.v0 & ~(1 << p.mask))
        if k_mul(k_mul(a, b, p), c, p) != k_mul(a, k_mul(b, c, p), p):
            failures += 1
    consistent = (closure_ok is not False) and failures == 0
    return ConsistencyReport(closure_order, expected, closure_ok,
                             assoc_samples, failures, _collapse_witness(p), consistent)


# ---------------------------------------------------------------------------
# serialization

def element_to_json(el: KElement, p: KParams,
                    variant: SigmaVariant | None = None) -> dict:
    def hexvec(v: int, bits: int) -> str:
        width = max(1, (bits + 3) // 4)
        return format(v, f"0{width}x")

    return {
        "v2": {"hex": hexvec(el.v2, p.n2), "bits": p.n2},
        "v1": {"hex": hexvec(el.v1, p.n1), "bits": p.n1},
        "v0": {"hex": hexvec(el.v0, p.n0), "bits": p.n0},
        "fingerprint": p.fingerprint(variant),
    }


def element_from_json(obj: dict, p: KParams) -> KElement:
    el = KElement(int(obj["v2"]["hex"], 16), int(obj["v1"]["hex"], 16),
                  int(obj["v0"]["hex"], 16))
    _check_dims(el, p)
    return el
