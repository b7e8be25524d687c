import random

import numpy as np
import pytest

from olivelab import kbatch, kgroup, oracles
from olivelab.kgroup import (IDENTITY, KElement, KError, KInconsistencyError,
                             SPair, SPairError, k_commutator, k_generator,
                             k_identity, k_inv, k_mul, pair_rank, z_gen)
from olivelab.words import SigmaVariant


def rand_el(p, rng):
    return KElement(rng.getrandbits(p.n2), rng.getrandbits(p.n1),
                    rng.getrandbits(p.n0))


def test_identity_laws(p_toy):
    rng = random.Random(0)
    for _ in range(100):
        g = rand_el(p_toy, rng)
        assert k_mul(g, k_identity(p_toy), p_toy) == g
        assert k_mul(k_identity(p_toy), g, p_toy) == g


def test_generator_squares(p_toy, p_full):
    for p in (p_toy, p_full):
        for j, n in ((2, p.n2), (1, p.n1), (0, p.n0)):
            for i in range(0, n, max(1, n // 40)):
                g = k_generator(j, i, p)
                assert k_mul(g, g, p) == IDENTITY


def test_commutator_descends(p_full):
    got = k_commutator(k_generator(2, 0, p_full), k_generator(2, 7, p_full), p_full)
    assert got == k_generator(1, pair_rank(0, 7), p_full)
    assert pair_rank(0, 7) == 21
    got1 = k_commutator(k_generator(1, 3, p_full), k_generator(1, 9, p_full), p_full)
    assert got1 == k_generator(0, pair_rank(3, 9), p_full)


def test_cross_level_and_level0_commute(p_full):
    rng = random.Random(2)
    levels = ((2, p_full.n2), (1, p_full.n1), (0, p_full.n0))
    for _ in range(300):
        j1, n1 = levels[rng.randrange(3)]
        j2, n2 = levels[rng.randrange(3)]
        if j1 == j2 and j1 != 0:
            continue
        g1 = k_generator(j1, rng.randrange(n1), p_full)
        g2 = k_generator(j2, rng.randrange(n2), p_full)
        assert k_commutator(g1, g2, p_full) == IDENTITY


def test_inverse_examples(p_full):
    assert k_inv(IDENTITY, p_full) == IDENTITY
    g = k_generator(2, 5, p_full)
    assert k_inv(g, p_full) == g
    prod = k_mul(k_generator(2, 0, p_full), k_generator(2, 7, p_full), p_full)
    inv = k_inv(prod, p_full)
    expect = KElement(prod.v2, 1 << pair_rank(0, 7), 0)
    assert inv == expect
    rng = random.Random(3)
    for _ in range(200):
        g = rand_el(p_full, rng)
        assert k_mul(g, k_inv(g, p_full), p_full) == IDENTITY
    # generators are involutions, so both inverse laws hold on them; for
    # general elements only the right law is part of the contract (the left
    # law fails with associativity, see test_presentation_is_inconsistent)
    for j, n in ((2, p_full.n2), (1, p_full.n1), (0, p_full.n0)):
        g = k_generator(j, n // 2, p_full)
        assert k_mul(k_inv(g, p_full), g, p_full) == IDENTITY


def test_z_gen_examples(p_full):
    assert z_gen(0, 0, p_full) == k_generator(2, 0, p_full)
    assert z_gen(2, 4, p_full) == k_generator(2, 16, p_full)
    assert z_gen(1, 1, p_full) == k_generator(2, 7, p_full)
    with pytest.raises(KError):
        z_gen(3, 0, p_full)
    with pytest.raises(KError):
        z_gen(0, 6, p_full)


def test_dimension_guard(p_toy, p_full):
    with pytest.raises(KError):
        k_mul(k_generator(2, 17, p_full), IDENTITY, p_toy)


def test_ell_star_values(p_toy, p_full):
    assert kgroup.compute_ell_star(p_toy) == 0
    ell = kgroup.compute_ell_star(p_full)
    assert ell == pair_rank(pair_rank(0, 7), pair_rank(0, 16)) == 7161


def test_ell_star_paper_literal_is_identity(p_full):
    with pytest.raises(KInconsistencyError):
        kgroup.compute_ell_star(p_full, SigmaVariant.PAPER_LITERAL)


def test_k2_sigma_values(p2_full):
    p2 = p2_full
    val_masked = kgroup.eval_sigma(
        SigmaVariant.REPAIRED,
        (z_gen(0, 0, p2), z_gen(1, 1, p2), z_gen(2, 4, p2)), p2)
    assert val_masked == IDENTITY
    val_other = kgroup.eval_sigma(
        SigmaVariant.REPAIRED,
        (z_gen(0, 2, p2), z_gen(1, 3, p2), z_gen(2, 4, p2)), p2)
    assert val_other != IDENTITY
    assert kgroup.eval_sigma(SigmaVariant.REPAIRED,
                             (IDENTITY, IDENTITY, IDENTITY), p2) == IDENTITY


def test_mask_is_homomorphic_on_products(p2_toy):
    rng = random.Random(4)
    p_plain = kgroup.toy_params()
    for _ in range(300):
        a = rand_el(p_plain, rng)
        b = rand_el(p_plain, rng)
        am = KElement(a.v2, a.v1, a.v0 & ~(1 << p2_toy.mask))
        bm = KElement(b.v2, b.v1, b.v0 & ~(1 << p2_toy.mask))
        plain = k_mul(a, b, p_plain)
        masked = k_mul(am, bm, p2_toy)
        assert masked.v0 == plain.v0 & ~(1 << p2_toy.mask)


def test_toy_closure_order(p_toy):
    assert len(kgroup.enumerate_group(p_toy)) == 512


def test_collection_oracle_agrees():
    rng = random.Random(5)
    for m in (1, 2):
        p = kgroup.KParams.for_width(m)
        for _ in range(150 if m == 1 else 60):
            a = rand_el(p, rng)
            b = rand_el(p, rng)
            assert oracles.mul_via_collection(a, b, p) == k_mul(a, b, p)


def test_presentation_is_inconsistent(p_toy, p_full):
    """The relation family collapses level 0: the collection magma cannot be
    associative, and the two-path witness pins the forced identity."""
    for p in (p_toy, p_full):
        rep = kgroup.consistency_report(p, assoc_samples=300, seed=0,
                                        enumerate_closure=(p is p_toy))
        assert rep.assoc_failures > 0
        assert not rep.consistent
        bits = rep.collapse_witness["forced_identity_bits"]
        assert bits == [pair_rank(0, pair_rank(0, 2))]
    rep_toy = kgroup.consistency_report(p_toy, assoc_samples=0)
    assert rep_toy.closure_order == 512
    assert rep_toy.closure_ok


def test_level0_pairs_generic_route(p_full):
    """Dual route for the level-0 family: sampled pairs through the full
    product match the designated identity."""
    rng = random.Random(6)
    for _ in range(300):
        i = rng.randrange(p_full.n0)
        j = rng.randrange(p_full.n0)
        if i == j:
            continue
        c = k_commutator(k_generator(0, i, p_full), k_generator(0, j, p_full),
                         p_full)
        assert c == IDENTITY


def test_serialization_roundtrip(p2_full):
    rng = random.Random(7)
    el = rand_el(kgroup.full_params(), rng)
    el = KElement(el.v2, el.v1, el.v0 & ~(1 << p2_full.mask))
    doc = kgroup.element_to_json(el, p2_full, SigmaVariant.REPAIRED)
    assert doc["fingerprint"] == {"m": 6, "mask": 7161,
                                  "sigma_variant": "repaired"}
    assert kgroup.element_from_json(doc, p2_full) == el


def test_spair_validation():
    assert len(kgroup.enumerate_S_star()) == 19
    assert SPair((), ()) in kgroup.enumerate_S_star()
    assert SPair((0, 1), (2,)) in kgroup.enumerate_S_star()
    with pytest.raises(SPairError):
        SPair((0,), (1, 2))
    with pytest.raises(SPairError):
        SPair((1,), (0,))


def test_pi_s_examples(p2_full):
    p2 = p2_full
    empty = kgroup.pi_s(SPair((), ()), p2)
    assert empty.pairs == ()
    got = kgroup.pi_s(SPair((0, 1), (2,)), p2)
    want = kgroup.PartialIso.from_z(
        {(0, 0): (0, 2), (1, 0): (1, 2), (2, 1): (2, 3), (2, 4): (2, 4)}, p2)
    assert got == want


def test_verify_partial_iso_all_s_star(p2_full):
    for s in kgroup.enumerate_S_star():
        rep = kgroup.verify_partial_iso(kgroup.pi_s(s, p2_full), p2_full,
                                        samples=500, seed=0)
        assert rep.passed, (s, rep)


def test_verify_partial_iso_empty_passes(p2_full):
    rep = kgroup.verify_partial_iso(kgroup.PartialIso(()), p2_full, samples=10)
    assert rep.passed


def test_excluded_map_fails_on_mask(p2_full):
    rep = kgroup.verify_partial_iso(kgroup.excluded_conflict_map(p2_full),
                                    p2_full, samples=10)
    assert not rep.passed
    assert not rep.check("mask_compatible")
    assert "7161" in rep.detail


def test_toy_conjugator_identity(p2_toy):
    res = kgroup.toy_conjugator(kgroup.PartialIso(((0, 0),)), p2_toy)
    assert res.ok
    assert res.perm == tuple(range(len(res.carrier)))


def test_toy_conjugator_nonidentity(p2_toy):
    res = kgroup.toy_conjugator(kgroup.PartialIso(((0, 1),)), p2_toy)
    assert res.ok
    # spot check the conjugation identity on the returned permutation
    carrier = res.carrier
    index = {e: i for i, e in enumerate(carrier)}
    perm = res.perm
    inv_perm = [0] * len(perm)
    for i, v in enumerate(perm):
        inv_perm[v] = i
    x = k_generator(2, 0, p2_toy)
    phi_x = k_generator(2, 1, p2_toy)
    for t in range(0, len(carrier), 7):
        lhs = perm[index[k_mul(carrier[inv_perm[t]], x, p2_toy)]]
        rhs = index[k_mul(carrier[t], phi_x, p2_toy)]
        assert lhs == rhs


def test_toy_conjugator_multigen_blocked_by_nonassociativity(p2_toy):
    res = kgroup.toy_conjugator(kgroup.PartialIso(((0, 0), (1, 2))), p2_toy)
    assert not res.ok


def test_batch_cross_check(p_toy, p_full, p2_full):
    assert kbatch.cross_check(p_toy, 512, seed=0)
    assert kbatch.cross_check(p_full, 256, seed=1)
    assert kbatch.cross_check(p2_full, 256, seed=2)


def test_batch_corr_matches_mul(p_full):
    eng = kbatch.BatchEngine(p_full)
    rng = np.random.default_rng(9)
    a = eng.random(256, rng)
    b = eng.random(256, rng)
    v0 = a.v0 ^ b.v0
    c1 = eng.corr_into(a.v2, a.v1, b.v2, b.v1, v0)
    m = eng.mul(a, b)
    assert np.array_equal(v0, m.v0)
    assert np.array_equal(a.v1 ^ b.v1 ^ c1, m.v1)


def test_batch_relations_sweep_toy(p_toy):
    rel = kbatch.BatchEngine(p_toy).relations_sweep()
    assert rel["square_failures"] == 0
    assert rel["level2_pair_failures"] == 0
    assert rel["level1_pair_failures"] == 0
    assert rel["cross_21_failures"] == 0
    assert rel["level0_kernel_vanishes"] == 1
