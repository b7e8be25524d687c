"""Free-group word calculus over typed generators.

Words are sequences of signed letters. Reduction, substitution, homomorphic
evaluation into an abstract group context, the three sigma-word variants, and
the quantifier-free formula checkers built from them all live here.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping


# ---------------------------------------------------------------------------
# generators

@dataclass(frozen=True)
class Var:
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class XGen:
    """Doubly indexed tuple generator x_{alpha,k}."""
    alpha: int
    k: int

    def __repr__(self):
        return f"x[{self.alpha},{self.k}]"


@dataclass(frozen=True)
class YGen:
    """Tiered-group generator label y_{j,ell} (symbolic use only)."""
    j: int
    ell: int

    def __repr__(self):
        return f"y[{self.j},{self.ell}]"


@dataclass(frozen=True)
class ZConj:
    """Formal conjugator letter tagged by an s-pair (or any hashable tag)."""
    s: object

    def __repr__(self):
        return f"z[{self.s}]"


@dataclass(frozen=True)
class Opaque:
    ident: str

    def __repr__(self):
        return f"<{self.ident}>"


Generator = Var | XGen | YGen | ZConj | Opaque


class UnassignedVariableError(KeyError):
    pass


# ---------------------------------------------------------------------------
# words

@dataclass(frozen=True)
class Word:
    """A word over signed generators; not automatically reduced."""
    letters: tuple[tuple[Generator, int], ...] = ()

    @staticmethod
    def of(*gens: Generator) -> "Word":
        return Word(tuple((g, 1) for g in gens))

    @staticmethod
    def letter(g: Generator, sign: int = 1) -> "Word":
        if sign not in (1, -1):
            raise ValueError(f"sign must be +-1, got {sign}")
        return Word(((g, sign),))

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def inv(self) -> "Word":
        return Word(tuple((g, -s) for g, s in reversed(self.letters)))

    def __len__(self):
        return len(self.letters)

    @property
    def is_identity(self) -> bool:
        return not self.letters

    def reduce(self) -> "Word":
        """Free reduction: cancel adjacent g g^-1 pairs until none remain."""
        stack: list[tuple[Generator, int]] = []
        for g, s in self.letters:
            if stack and stack[-1][0] == g and stack[-1][1] == -s:
                stack.pop()
            else:
                stack.append((g, s))
        return Word(tuple(stack))

    def substitute(self, mapping: Mapping[Generator, "Word"]) -> "Word":
        """Replace generators by words; letters not in the mapping survive."""
        out: list[tuple[Generator, int]] = []
        for g, s in self.letters:
            if g in mapping:
                img = mapping[g] if s > 0 else mapping[g].inv()
                out.extend(img.letters)
            else:
                out.append((g, s))
        return Word(tuple(out))

    def generators(self) -> set[Generator]:
        return {g for g, _ in self.letters}

    def evaluate(self, assignment: Mapping[Generator, object], ctx: "GroupContext"):
        """Left-to-right homomorphic evaluation; every letter must be assigned."""
        acc = ctx.identity()
        for g, s in self.letters:
            if g not in assignment:
                raise UnassignedVariableError(g)
            v = assignment[g]
            acc = ctx.mul(acc, v if s > 0 else ctx.inv(v))
        return acc

    def to_text(self) -> str:
        return " ".join(repr(g) if s > 0 else f"{g!r}^-1" for g, s in self.letters)

    def __repr__(self):
        return self.to_text() if self.letters else "<e>"


EMPTY = Word()


def parse_word(text: str) -> Word:
    """Parse the CLI word syntax: identifiers with optional ^-1, whitespace split."""
    letters = []
    for tok in text.split():
        if tok.endswith("^-1"):
            name, sign = tok[:-3], -1
        else:
            name, sign = tok, 1
        if not name.isidentifier():
            raise ValueError(f"bad generator token: {tok!r}")
        letters.append((Var(name), sign))
    return Word(tuple(letters))


def commutator(u: Word, v: Word) -> Word:
    """[u, v] = u^-1 v^-1 u v, freely reduced."""
    return (u.inv() * v.inv() * u * v).reduce()


# ---------------------------------------------------------------------------
# group contexts

class GroupContext:
    """Abstract group interface: identity, mul, inv, optional enumeration."""

    def identity(self):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def elements(self) -> Iterable:
        raise NotImplementedError(f"{type(self).__name__} is not enumerable")


class SymmetricGroupContext(GroupContext):
    """Permutations of range(n) as tuples; (p*q)(i) = p[q[i]]."""

    def __init__(self, n: int):
        self.n = n

    def identity(self):
        return tuple(range(self.n))

    def mul(self, a, b):
        return tuple(a[b[i]] for i in range(self.n))

    def inv(self, a):
        out = [0] * self.n
        for i, v in enumerate(a):
            out[v] = i
        return tuple(out)

    def elements(self):
        return itertools.permutations(range(self.n))


class CyclicGroupContext(GroupContext):
    def __init__(self, n: int):
        self.n = n

    def identity(self):
        return 0

    def mul(self, a, b):
        return (a + b) % self.n

    def inv(self, a):
        return (-a) % self.n

    def elements(self):
        return range(self.n)


# ---------------------------------------------------------------------------
# sigma word variants

class SigmaVariant(str, Enum):
    REPAIRED = "repaired"
    PAPER_LITERAL = "paper-literal"
    RAW_PRINTED = "raw-printed"


X, Y, Z = Var("x"), Var("y"), Var("z")


def sigma_star(variant: SigmaVariant = SigmaVariant.REPAIRED,
               x: Generator = X, y: Generator = Y, z: Generator = Z) -> Word:
    """The fixed three-variable word in each recorded variant.

    REPAIRED (default): [[x,y],[x,z]] -- vanishes whenever an argument is the
    identity and stays nonzero through the tiered-group pipeline.
    PAPER_LITERAL: [[x,y],z]. RAW_PRINTED: the verbatim historical word
    (y^-1 x y x) z^-1 (x^-1 y^-1 x y) z, kept for comparison runs.
    """
    wx, wy, wz = Word.of(x), Word.of(y), Word.of(z)
    variant = SigmaVariant(variant)
    if variant is SigmaVariant.REPAIRED:
        return commutator(commutator(wx, wy), commutator(wx, wz))
    if variant is SigmaVariant.PAPER_LITERAL:
        return commutator(commutator(wx, wy), wz)
    inner = wx.inv() * wy.inv() * wx.inv() * wy
    return inner.inv() * wz.inv() * (wx.inv() * wy.inv() * wx * wy) * wz


def verify_vanishing(w: Word, v: Generator) -> bool:
    """True iff substituting the empty word for v freely reduces w to empty.

    A sufficient symbolic certificate that the evaluation is the identity in
    every group; never claimed necessary.
    """
    return w.substitute({v: EMPTY}).reduce().is_identity


def vanishing_profile(variant: SigmaVariant) -> dict[str, bool]:
    w = sigma_star(variant)
    return {v.name: verify_vanishing(w, v) for v in (X, Y, Z)}


def find_nonvanishing_witness(w: Word, ctx: GroupContext):
    """Exhaustive search for an assignment with a non-identity value.

    Returns the first assignment found (deterministic order) or None.
    """
    gens = sorted(w.generators(), key=repr)
    elements = list(ctx.elements())
    e = ctx.identity()
    for combo in itertools.product(elements, repeat=len(gens)):
        assignment = dict(zip(gens, combo))
        if w.evaluate(assignment, ctx) != e:
            return assignment
    return None


# ---------------------------------------------------------------------------
# formulas

class AtomKind(str, Enum):
    EQ = "eq"
    NEQ = "neq"


@dataclass(frozen=True)
class AtomicFormula:
    lhs: Word
    rhs: Word
    kind: AtomKind = AtomKind.EQ


@dataclass(frozen=True)
class FormulaSpec:
    atoms: tuple[AtomicFormula, ...]

    def variables(self) -> set[Generator]:
        out: set[Generator] = set()
        for a in self.atoms:
            out |= a.lhs.generators() | a.rhs.generators()
        return out


TUPLE_LEN = 6

XV = tuple(Var(f"x{i}") for i in range(TUPLE_LEN))
YV = tuple(Var(f"y{i}") for i in range(TUPLE_LEN))
ZV = tuple(Var(f"z{i}") for i in range(TUPLE_LEN))


def phi0() -> FormulaSpec:
    """y5^-1 x0 y5 = x2."""
    lhs = Word.letter(YV[5], -1) * Word.of(XV[0], YV[5])
    return FormulaSpec((AtomicFormula(lhs, Word.of(XV[2])),))


def phi1() -> FormulaSpec:
    """x5^-1 y1 x5 = y3  and  x5^-1 y4 x5 = y4."""
    a1 = AtomicFormula(Word.letter(XV[5], -1) * Word.of(YV[1], XV[5]), Word.of(YV[3]))
    a2 = AtomicFormula(Word.letter(XV[5], -1) * Word.of(YV[4], XV[5]), Word.of(YV[4]))
    return FormulaSpec((a1, a2))


def psi(variant: SigmaVariant = SigmaVariant.REPAIRED) -> FormulaSpec:
    """sigma(x0,y1,z4) = e  and  sigma(x2,y3,z4) != e."""
    a1 = AtomicFormula(sigma_star(variant, XV[0], YV[1], ZV[4]), EMPTY)
    a2 = AtomicFormula(sigma_star(variant, XV[2], YV[3], ZV[4]), EMPTY, AtomKind.NEQ)
    return FormulaSpec((a1, a2))


def evaluate_formula(fs: FormulaSpec, ctx: GroupContext,
                     assignment: Mapping[Generator, object]) -> bool:
    for atom in fs.atoms:
        l = atom.lhs.evaluate(assignment, ctx)
        r = atom.rhs.evaluate(assignment, ctx)
        if (l == r) != (atom.kind is AtomKind.EQ):
            return False
    return True


def _tuple_assignment(vars_: tuple[Var, ...], tup) -> dict:
    if len(tup) != TUPLE_LEN:
        raise ValueError(f"tuple length must be {TUPLE_LEN}, got {len(tup)}")
    return dict(zip(vars_, tup))


@dataclass(frozen=True)
class FormulaReport:
    phi0_01: bool
    phi1_12: bool
    phi1_13: bool
    psi_023: bool

    @property
    def all_true(self) -> bool:
        return self.phi0_01 and self.phi1_12 and self.phi1_13 and self.psi_023


def check_formulas(ctx: GroupContext, a0, a1, a2, a3,
                   variant: SigmaVariant = SigmaVariant.REPAIRED) -> FormulaReport:
    """Evaluate the four-formula forbidden pattern on four 6-tuples.

    The contract (proved by the conjugation certificate below) is that the
    four values are never simultaneously true in a group.
    """
    asg01 = {**_tuple_assignment(XV, a0), **_tuple_assignment(YV, a1)}
    asg12 = {**_tuple_assignment(XV, a1), **_tuple_assignment(YV, a2)}
    asg13 = {**_tuple_assignment(XV, a1), **_tuple_assignment(YV, a3)}
    asg023 = {**_tuple_assignment(XV, a0), **_tuple_assignment(YV, a2),
              **_tuple_assignment(ZV, a3)}
    return FormulaReport(
        phi0_01=evaluate_formula(phi0(), ctx, asg01),
        phi1_12=evaluate_formula(phi1(), ctx, asg12),
        phi1_13=evaluate_formula(phi1(), ctx, asg13),
        psi_023=evaluate_formula(psi(variant), ctx, asg023),
    )


# ---------------------------------------------------------------------------
# the conjugation-transport certificate

@dataclass(frozen=True)
class CertificateResult:
    passed: bool
    homomorphism_ok: bool
    transport_ok: bool
    reason: str


def _conjugation_rules(drop: tuple[Generator, ...] = ()) -> dict[Generator, Generator]:
    """Letter images of conjugation by a(1,5) under the hypothesis equations."""
    rules: dict[Generator, Generator] = {
        XGen(0, 0): XGen(0, 2),
        XGen(2, 1): XGen(2, 3),
        XGen(2, 4): XGen(2, 4),
        XGen(3, 1): XGen(3, 3),
        XGen(3, 4): XGen(3, 4),
    }
    for g in drop:
        rules.pop(g, None)
    return rules


def _transport(w: Word, rules: Mapping[Generator, Generator]) -> Word | None:
    """Push conjugation to each letter and apply the letter rules.

    Returns None when a letter has no rule (the rewrite is blocked).
    """
    out = []
    for g, s in w.reduce().letters:
        if g not in rules:
            return None
        out.append((rules[g], s))
    return Word(tuple(out)).reduce()


def s8_symbolic_certificate(variant: SigmaVariant = SigmaVariant.REPAIRED,
                            drop_rules: tuple[Generator, ...] = (),
                            sigma_word: Word | None = None,
                            hom_samples: int = 200,
                            seed: int = 0) -> CertificateResult:
    """Mechanize the forbidden-configuration impossibility argument.

    Works in the free group on the 24 generators a(l,k), l<4, k<6. Checks
    (i) that conjugation by a(1,5) is a homomorphism on words, and (ii) that
    under the hypothesis equations used as rewrite rules, the conjugate of
    sigma at (a(0,0), a(2,1), a(3,4)) rewrites to sigma at
    (a(0,2), a(2,3), a(3,4)).
    """
    import random
    rng = random.Random(seed)
    gens = [XGen(l, k) for l in range(4) for k in range(6)]
    conj = Word.letter(XGen(1, 5), -1)
    conj_inv = Word.letter(XGen(1, 5), 1)

    def g_of(w: Word) -> Word:
        return (conj * w * conj_inv).reduce()

    hom_ok = True
    for _ in range(hom_samples):
        u = Word(tuple((rng.choice(gens), rng.choice((1, -1)))
                       for _ in range(rng.randrange(0, 8))))
        v = Word(tuple((rng.choice(gens), rng.choice((1, -1)))
                       for _ in range(rng.randrange(0, 8))))
        if (g_of(u) * g_of(v)).reduce() != g_of(u * v):
            hom_ok = False
            break

    word = sigma_word if sigma_word is not None else sigma_star(variant)
    src = word.substitute({X: Word.of(XGen(0, 0)), Y: Word.of(XGen(2, 1)),
                           Z: Word.of(XGen(3, 4))})
    tgt = word.substitute({X: Word.of(XGen(0, 2)), Y: Word.of(XGen(2, 3)),
                           Z: Word.of(XGen(3, 4))})
    rules = _conjugation_rules(drop_rules)
    image = _transport(src, rules)
    if image is None:
        return CertificateResult(False, hom_ok, False,
                                 "rewrite blocked: a letter has no conjugation rule")
    transport_ok = image == tgt.reduce()
    reason = "ok" if (hom_ok and transport_ok) else "transported word differs from target"
    return CertificateResult(hom_ok and transport_ok, hom_ok, transport_ok, reason)
