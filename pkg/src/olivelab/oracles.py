"""Independent brute-force oracles used by the test suites.

Each oracle recomputes a result by a method unrelated to the production code
path: letter-by-letter collection for the tiered-group product, all-injections
search for structure embedding, and direct enumeration for ladder triples.
"""
from __future__ import annotations

import itertools

from .kgroup import KElement, KParams, pair_rank


def element_to_letters(a: KElement) -> list[tuple[int, int]]:
    """Canonical word of an element: level 2, then 1, then 0, indices ascending."""
    out = []
    for level, bits in ((2, a.v2), (1, a.v1), (0, a.v0)):
        v = bits
        while v:
            low = v & -v
            out.append((level, low.bit_length() - 1))
            v ^= low
    out.sort(key=lambda l: (-l[0], l[1]))
    return out


def collect_letters(word: list[tuple[int, int]], p: KParams,
                    max_steps: int = 10_000_000) -> KElement:
    """Leftmost-first collection of an explicit letter word.

    Repeatedly finds the leftmost adjacent pair that is cancellable or out of
    canonical order; same-level swaps at level j+1 emit the level-j letter at
    the colex rank of the two indices, inserted right of the swapped pair.
    """
    w = list(word)

    def key(letter):
        return (-letter[0], letter[1])

    steps = 0
    while True:
        steps += 1
        if steps > max_steps:
            raise RuntimeError("collection did not terminate")
        for t in range(len(w) - 1):
            x, y = w[t], w[t + 1]
            if x == y:
                del w[t:t + 2]
                break
            if key(x) > key(y):
                jx, ix = x
                jy, iy = y
                w[t], w[t + 1] = y, x
                if jx == jy and jx > 0:
                    w.insert(t + 2, (jx - 1, pair_rank(ix, iy)))
                break
        else:
            break
    v = [0, 0, 0]
    for (j, i) in w:
        v[j] ^= 1 << i
    v0 = v[0]
    if p.mask is not None:
        v0 &= ~(1 << p.mask)
    return KElement(v[2], v[1], v0)


def mul_via_collection(a: KElement, b: KElement, p: KParams) -> KElement:
    """Product oracle: concatenate canonical words, then collect."""
    return collect_letters(element_to_letters(a) + element_to_letters(b), p)


def embed_all_injections(A, B):
    """Induced-substructure embedding oracle: try every injective map.

    A and B are relational.FinStructure values. Returns a mapping dict or
    None; intended for structures of at most ~7 points.
    """
    rels_a = [A.P, A.Q0, A.Q1]
    rels_b = [B.P, B.Q0, B.Q1]
    arities = [2, A.sig.k[0] + 1, A.sig.k[1] + 1]
    for img in itertools.permutations(range(B.n), A.n):
        ok = True
        for rel_a, rel_b, ar in zip(rels_a, rels_b, arities):
            if not ok:
                break
            for tup in itertools.product(range(A.n), repeat=ar):
                mapped = tuple(img[i] for i in tup)
                if (tup in rel_a) != (mapped in rel_b):
                    ok = False
                    break
        if ok:
            return dict(enumerate(img))
    return None


def triples_by_enumeration(rows: list[list[int]]) -> set[tuple[int, int, int]]:
    """Ladder triple oracle: direct scan of the interval-constancy condition."""
    lam = len(rows)
    out = set()
    for a, b, g in itertools.combinations(range(lam), 3):
        if all(rows[g][d] == 0 for d in range(a, b + 1)):
            out.add((a, b, g))
    return out
