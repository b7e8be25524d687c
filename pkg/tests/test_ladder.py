import random

import pytest
from hypothesis import given, settings, strategies as st

from olivelab import oracles
from olivelab.kgroup import SPair, enumerate_S_star
from olivelab.ladder import (F_beta, GammaSets, J_of, Ladder, LadderError,
                             all_ladders, check_F_beta, check_gen_map,
                             gamma_sets, ladder_count, ladder_from_json,
                             ladder_to_json, random_ladder, s_pair)
from olivelab.words import XGen


L4 = Ladder.from_rows([[], [0], [0, 0], [0, 0, 1]])


def test_shape_validation():
    with pytest.raises(LadderError):
        Ladder.from_rows([[0]])
    with pytest.raises(LadderError):
        Ladder.from_rows([[], [2]])
    with pytest.raises(LadderError):
        Ladder(0, 2, ())


def test_J_examples():
    assert J_of(Ladder.from_rows([[], [0], [0, 0]])) == ((0, 1, 2),)
    assert J_of(L4) == ((0, 1, 2), (0, 1, 3))
    assert J_of(Ladder.from_rows([[], [0]])) == ()


def test_J_matches_enumeration_oracle():
    rng = random.Random(0)
    for _ in range(60):
        lam = rng.randrange(1, 9)
        f = random_ladder(lam, rng)
        assert set(J_of(f)) == oracles.triples_by_enumeration(
            [list(r) for r in f.rows])


def test_J_monotone_under_bit_flips():
    rng = random.Random(1)
    for _ in range(40):
        f = random_ladder(6, rng)
        g = rng.randrange(1, 6)
        if not f.rows[g]:
            continue
        pos = rng.randrange(len(f.rows[g]))
        if f.rows[g][pos] == 1:
            continue
        rows = [list(r) for r in f.rows]
        rows[g][pos] = 1
        flipped = Ladder.from_rows(rows)
        before = {t for t in J_of(f) if t[2] == g}
        after = {t for t in J_of(flipped) if t[2] == g}
        assert after <= before


def test_s_pair_examples():
    assert s_pair((0, 1, 3), 2, L4) == SPair((0, 1), (2,))
    assert s_pair((0, 1, 2), 3, L4) == SPair((0, 1), ())
    assert s_pair((0, 1, 2), 0, L4) == SPair((), ())
    with pytest.raises(LadderError):
        s_pair((0, 2, 3), 1, L4)


def test_s_pair_always_lands_in_S_star():
    star = set(enumerate_S_star())
    for f in all_ladders(5):
        for t in J_of(f):
            for beta in range(5):
                assert s_pair(t, beta, f) in star
    rng = random.Random(2)
    for _ in range(100):
        f = random_ladder(8, rng)
        for t in J_of(f):
            for beta in range(8):
                assert s_pair(t, beta, f) in star


def test_gamma_examples():
    gs = gamma_sets(Ladder.from_rows([[], [1]]))
    assert gs == GammaSets((), ((0, 1),), ())
    gs0 = gamma_sets(Ladder.from_rows([[], [0]]))
    assert gs0.gamma0 == ((0, 1),) and gs0.gamma1 == ()
    assert len(gamma_sets(L4).gamma2) == 2
    assert gamma_sets(L4).gamma2 == J_of(L4)


def test_F_beta_examples():
    f3 = Ladder.from_rows([[], [0], [0, 1]])
    got = F_beta(1, f3)
    assert got == {XGen(0, 0): XGen(0, 2), XGen(2, 1): XGen(2, 3),
                   XGen(2, 4): XGen(2, 4)}
    assert F_beta(0, Ladder.from_rows([[], [0]])) == {}
    # beta = 0 only picks up the upper branch
    up = F_beta(0, Ladder.from_rows([[], [1], [0, 0]]))
    assert set(up) == {XGen(1, 1), XGen(1, 4)}


def test_check_F_beta_passes_everywhere():
    for f in all_ladders(4):
        for beta in range(4):
            assert check_F_beta(beta, f).passed
    rng = random.Random(3)
    for _ in range(200):
        f = random_ladder(rng.randrange(1, 13), rng)
        for beta in range(f.lam):
            rep = check_F_beta(beta, f)
            assert rep.passed, (f.rows, beta, rep)


def test_corrupted_map_fails():
    f = Ladder.from_rows([[], [0], [0, 0]])   # (0,1,2) in the triple set
    bad = {XGen(0, 0): XGen(0, 2), XGen(1, 1): XGen(1, 3),
           XGen(2, 4): XGen(2, 4)}
    rep = check_gen_map(bad, f)
    assert not rep.passed and not rep.domain_ok
    assert rep.witness == (0, 1, 2)
    assert check_gen_map({}, f).passed


def test_non_injective_map_fails():
    f = Ladder.from_rows([[], [0]])
    rep = check_gen_map({XGen(0, 0): XGen(0, 2), XGen(1, 0): XGen(0, 2)}, f)
    assert not rep.injective and not rep.passed


@settings(max_examples=60, derandomize=True)
@given(st.integers(1, 6), st.integers(0, 2 ** 15 - 1))
def test_json_roundtrip(lam, bits):
    slots = lam * (lam - 1) // 2
    vals = [(bits >> i) & 1 for i in range(slots)]
    rows, pos = [], 0
    for alpha in range(lam):
        rows.append(vals[pos:pos + alpha])
        pos += alpha
    f = Ladder.from_rows(rows)
    assert ladder_from_json(ladder_to_json(f)) == f


def test_json_shape_errors():
    with pytest.raises(LadderError):
        ladder_from_json({"lambda": 3, "rows": [[0]]})
    with pytest.raises(LadderError):
        ladder_from_json({"rows": []})


def test_ladder_count():
    assert ladder_count(5) == 1024
    assert sum(1 for _ in all_ladders(4)) == ladder_count(4) == 64
