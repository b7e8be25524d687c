"""Acceptance gate: one test per criterion, each printing a pass/fail line.

Criterion 2's associativity clauses are implemented exactly as stated and are
expected to fail: the relation family provably admits no associative model on
these normal forms (see notes on the presentation inconsistency in the kgroup
module and the collapse witness in its consistency report). The assertion is
kept faithful rather than weakened.
"""
import io
import itertools
import json
import random
import time
from contextlib import redirect_stdout

import pytest

from olivelab import cli, kbatch, kgroup, oracles, relational, witness, words
from olivelab.kgroup import IDENTITY, KElement, k_generator, k_mul, z_gen
from olivelab.ladder import (Ladder, all_ladders, check_F_beta, ladder_count,
                             random_ladder)
from olivelab.relational import (DEFAULT_SIG, FOUR_CYCLE, build_Nstar,
                                 disjoint_union, embeds, model_from_ladder,
                                 nsop4_amalgam, omits_forbidden, random_member)
from olivelab.words import (SigmaVariant, SymmetricGroupContext, Var,
                            evaluate_formula, phi0, phi1, psi,
                            s8_symbolic_certificate, sigma_star,
                            vanishing_profile)


def report(n: int, ok: bool, detail: str):
    print(f"[criterion {n:2d}] {'PASS' if ok else 'FAIL'} - {detail}")


def test_criterion_01_sigma_certificates():
    t0 = time.time()
    profile = vanishing_profile(SigmaVariant.REPAIRED)
    wit = words.find_nonvanishing_witness(sigma_star(SigmaVariant.REPAIRED),
                                          SymmetricGroupContext(4))
    elapsed = time.time() - t0
    ok = all(profile.values()) and wit is not None and elapsed < 5.0
    report(1, ok, f"vanishing {profile}, witness={wit is not None}, "
                  f"{elapsed:.2f}s (< 5s)")
    assert all(profile.values())
    assert wit is not None
    assert elapsed < 5.0


def test_criterion_02_toy_consistency_and_associativity():
    t0 = time.time()
    p_toy = kgroup.toy_params()
    p_full = kgroup.full_params()
    closure = len(kgroup.enumerate_group(p_toy))

    rel_reports = {}
    for name, p in (("toy", p_toy), ("full", p_full)):
        rel = kbatch.BatchEngine(p).relations_sweep()
        rel_reports[name] = rel
    rel_ok = all(
        rel["square_failures"] == 0 and rel["level2_pair_failures"] == 0
        and rel["level1_pair_failures"] == 0 and rel["cross_21_failures"] == 0
        and rel["level0_pair_failures"] == 0
        and rel["cross_level0_failures"] == 0
        for rel in rel_reports.values())

    toy_assoc = kbatch.BatchEngine(p_toy).assoc_sweep(100_000, seed=0)
    full_assoc = kbatch.BatchEngine(p_full).assoc_sweep(1_000_000, seed=0)
    elapsed = time.time() - t0

    ok = (closure == 512 and rel_ok and toy_assoc == 0 and full_assoc == 0
          and elapsed < 60.0)
    report(2, ok, f"closure={closure}, relations_ok={rel_ok}, "
                  f"assoc failures toy={toy_assoc}/1e5 full={full_assoc}/1e6, "
                  f"{elapsed:.1f}s (< 60s)")
    assert closure == 512
    assert rel_ok
    assert elapsed < 60.0
    assert toy_assoc == 0 and full_assoc == 0, (
        "associativity fails as proved unavoidable: the presented relations "
        "force a level-0 collapse (cross-level commutation makes every "
        "level-1 generator a central product of level-2 generators), so no "
        "collection product on these normal forms can be a group law; see "
        "kgroup.consistency_report for the two-path witness")


def test_criterion_03_quotient_sigma_values(p2_full):
    t0 = time.time()
    v1 = kgroup.eval_sigma(SigmaVariant.REPAIRED,
                           (z_gen(0, 0, p2_full), z_gen(1, 1, p2_full),
                            z_gen(2, 4, p2_full)), p2_full)
    v2 = kgroup.eval_sigma(SigmaVariant.REPAIRED,
                           (z_gen(0, 2, p2_full), z_gen(1, 3, p2_full),
                            z_gen(2, 4, p2_full)), p2_full)
    elapsed = time.time() - t0
    ok = v1 == IDENTITY and v2 != IDENTITY and elapsed < 5.0
    report(3, ok, f"sigma(z00,z11,z24)==e: {v1 == IDENTITY}, "
                  f"sigma(z02,z13,z24)!=e: {v2 != IDENTITY}, {elapsed:.2f}s (< 5s)")
    assert v1 == IDENTITY
    assert v2 != IDENTITY
    assert elapsed < 5.0


def test_criterion_04_partial_isos_and_conjugator(p2_full, p2_toy):
    t0 = time.time()
    all_pass = True
    for s in kgroup.enumerate_S_star():
        rep = kgroup.verify_partial_iso(kgroup.pi_s(s, p2_full), p2_full,
                                        samples=10_000, seed=0)
        all_pass = all_pass and rep.passed
    excl = kgroup.verify_partial_iso(kgroup.excluded_conflict_map(p2_full),
                                     p2_full, samples=100, seed=0)
    conj = kgroup.toy_conjugator(kgroup.PartialIso(((0, 1),)), p2_toy)
    conj_id = kgroup.toy_conjugator(kgroup.PartialIso(((2, 2),)), p2_toy)
    elapsed = time.time() - t0
    ok = (all_pass and not excl.passed and conj.ok and conj_id.ok
          and elapsed < 30.0)
    report(4, ok, f"S* 19/19: {all_pass}, excluded fails: {not excl.passed}, "
                  f"toy conjugator (nonidentity): {conj.ok}, "
                  f"{elapsed:.1f}s (< 30s)")
    assert all_pass
    assert not excl.passed
    assert conj.ok and conj.perm is not None
    assert conj_id.ok
    assert elapsed < 30.0


def test_criterion_05_witness_pipeline(p2_full):
    t0 = time.time()
    failures = undecided = findings = 0
    n_ladders = 0

    def run(f):
        nonlocal failures, undecided, findings, n_ladders
        fam = witness.build_witness(f, p2_full)
        rep = witness.verify_clause_b(fam)
        failures += len(rep.failures)
        undecided += len(rep.undecided)
        findings += len(witness.forbidden_scan(fam))
        n_ladders += 1

    for f in all_ladders(5):
        run(f)
    assert n_ladders == 1024 == ladder_count(5)
    rng = random.Random(0)
    for _ in range(100):
        run(random_ladder(8, rng))
    elapsed = time.time() - t0
    ok = failures == 0 and undecided == 0 and findings == 0 and elapsed < 600
    report(5, ok, f"{n_ladders} ladders: failures={failures}, "
                  f"undecided={undecided}, forbidden={findings}, "
                  f"{elapsed:.1f}s (< 600s)")
    assert failures == 0 and undecided == 0 and findings == 0
    assert elapsed < 600


def test_criterion_06_negative_direction():
    t0 = time.time()
    bad = 0
    checks = 0
    for lam in range(1, 7):
        for f in all_ladders(lam):
            rep = witness.negative_direction_report(f)
            bad += len(rep.failures)
            checks += rep.outside_checks + rep.all_triple_checks
    elapsed = time.time() - t0
    ok = bad == 0
    report(6, ok, f"{checks} retraction certificates, failures={bad}, "
                  f"{elapsed:.1f}s")
    assert bad == 0


def test_criterion_07_f_beta_well_defined():
    t0 = time.time()
    bad = 0
    for lam in range(1, 7):
        for f in all_ladders(lam):
            for beta in range(lam):
                if not check_F_beta(beta, f).passed:
                    bad += 1
    rng = random.Random(1)
    for _ in range(1000):
        f = random_ladder(rng.randrange(7, 13), rng)
        for beta in range(f.lam):
            if not check_F_beta(beta, f).passed:
                bad += 1
    elapsed = time.time() - t0
    ok = bad == 0
    report(7, ok, f"exhaustive lambda<=6 plus 1000 seeded lambda<=12, "
                  f"failures={bad}, {elapsed:.1f}s")
    assert bad == 0


def test_criterion_08_relational_olive():
    t0 = time.time()
    nstar = build_Nstar(DEFAULT_SIG)
    omission_bad = 0
    for f in all_ladders(5):
        if embeds(nstar, model_from_ladder(f, DEFAULT_SIG)) is not None:
            omission_bad += 1

    rng = random.Random(2)
    oracle_bad = 0
    for _ in range(500):
        A = random_member(DEFAULT_SIG, rng.randrange(1, 6), rng, density=0.5)
        B = random_member(DEFAULT_SIG, rng.randrange(1, 7), rng, density=0.5)
        if (embeds(A, B) is None) != (oracles.embed_all_injections(A, B) is None):
            oracle_bad += 1

    union_bad = 0
    for _ in range(200):
        a = random_member(DEFAULT_SIG, rng.randrange(1, 5), rng)
        b = random_member(DEFAULT_SIG, rng.randrange(1, 5), rng)
        if not omits_forbidden(disjoint_union(a, b)):
            union_bad += 1

    amalgam_bad = 0
    for _ in range(200):
        parts = tuple(random_member(DEFAULT_SIG, rng.randrange(1, 4), rng)
                      for _ in range(4))
        edges = {(i, j): disjoint_union(parts[i], parts[j])
                 for (i, j) in FOUR_CYCLE}
        _, rep = nsop4_amalgam(parts, edges)
        if not rep.passed:
            amalgam_bad += 1
    elapsed = time.time() - t0
    ok = (omission_bad == 0 and oracle_bad == 0 and union_bad == 0
          and amalgam_bad == 0 and elapsed < 600)
    report(8, ok, f"omission {omission_bad}/1024, oracle {oracle_bad}/500, "
                  f"union {union_bad}/200, amalgam {amalgam_bad}/200, "
                  f"{elapsed:.1f}s (< 600s)")
    assert omission_bad == 0
    assert oracle_bad == 0
    assert union_bad == 0
    assert amalgam_bad == 0
    assert elapsed < 600


def _forbidden_sample_count(ctx, tuples_target: int, rng: random.Random,
                            elements) -> int:
    """Count full forbidden configurations among random tuple quadruples,
    with cheap-first evaluation."""
    found = 0
    f0, f1, ps = phi0(), phi1(), psi()
    xv, yv, zv = words.XV, words.YV, words.ZV
    for _ in range(tuples_target):
        a0, a1, a2, a3 = (tuple(rng.choice(elements) for _ in range(6))
                          for _ in range(4))
        if not evaluate_formula(f0, ctx, {**dict(zip(xv, a0)),
                                          **dict(zip(yv, a1))}):
            continue
        if not evaluate_formula(f1, ctx, {**dict(zip(xv, a1)),
                                          **dict(zip(yv, a2))}):
            continue
        if not evaluate_formula(f1, ctx, {**dict(zip(xv, a1)),
                                          **dict(zip(yv, a3))}):
            continue
        if evaluate_formula(ps, ctx, {**dict(zip(xv, a0)),
                                      **dict(zip(yv, a2)),
                                      **dict(zip(zv, a3))}):
            found += 1
    return found


def test_criterion_09_certificate_and_sampling(p2_toy):
    t0 = time.time()
    cert_r = s8_symbolic_certificate(SigmaVariant.REPAIRED)
    cert_l = s8_symbolic_certificate(SigmaVariant.PAPER_LITERAL)

    rng = random.Random(3)
    toy_ctx = kgroup.KContext(p2_toy)
    toy_elements = list(kgroup.enumerate_group(p2_toy))
    found = _forbidden_sample_count(toy_ctx, 400_000, rng, toy_elements)
    for n, count in ((4, 300_000), (5, 300_000)):
        ctx = SymmetricGroupContext(n)
        elements = list(ctx.elements())
        found += _forbidden_sample_count(ctx, count, rng, elements)
    elapsed = time.time() - t0
    ok = cert_r.passed and cert_l.passed and found == 0
    report(9, ok, f"certificates repaired={cert_r.passed} "
                  f"paper-literal={cert_l.passed}, "
                  f"configurations found={found}/1e6, {elapsed:.1f}s")
    assert cert_r.passed and cert_l.passed
    assert found == 0


CLI_RUNS = [
    ("sigma-check", "--seed", "1"),
    ("kgroup-selftest", "--toy", "--assoc-samples", "100", "--seed", "1"),
    ("partial-iso-check", "--samples", "40", "--seed", "1"),
    ("toy-conjugator", "--seed", "1"),
    ("witness-verify", "--lambda", "4", "--count", "5", "--seed", "1"),
    ("forbidden-scan", "--lambda", "3", "--exhaustive", "--seed", "1"),
    ("g5-negative-check", "--lambda-max", "3", "--seed", "1"),
    ("relational-olive", "--lambda-max", "3", "--seed", "1"),
    ("nstar-build", "--seed", "1"),
    ("amalgam-check", "--count", "4", "--seed", "1"),
]


def test_criterion_10_determinism(monkeypatch, tmp_path):
    t0 = time.time()
    tree = {"nodes": [], "tree_parent": [], "linear_order": [], "P": [],
            "F0": {}, "F1": {}}
    path = tmp_path / "empty.json"
    path.write_text(json.dumps(tree))
    runs = CLI_RUNS + [("etr-validate", str(path), "--seed", "1")]
    mismatches = []
    for argv in runs:
        outs = []
        for threads in ("1", "2"):
            monkeypatch.setenv("OLIVE_THREADS", threads)
            buf = io.StringIO()
            with redirect_stdout(buf):
                cli.main(list(argv))
            outs.append(buf.getvalue())
        if outs[0] != outs[1]:
            mismatches.append(argv[0])
    elapsed = time.time() - t0
    ok = not mismatches
    report(10, ok, f"{len(runs)} subcommands x2 runs, mismatches={mismatches}, "
                   f"{elapsed:.1f}s")
    assert not mismatches
