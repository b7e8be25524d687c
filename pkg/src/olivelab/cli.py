"""Batch entry points with deterministic JSON reports.

Every subcommand prints a single JSON document to stdout and exits 0 when all
contracts in the run hold, 1 on a contract violation, and 2 on usage errors.
Reports embed the full configuration including the seed, so identical
configurations produce byte-identical output at any parallelism level.
"""
from __future__ import annotations

import argparse
import json
import random
import sys

import numpy as np

from . import etr, kbatch, kgroup, ladder, relational, runtime, witness, words
from .kgroup import KParams, SigmaVariant
from .words import SymmetricGroupContext


def _emit(command: str, config: dict, results: dict, ok: bool) -> int:
    doc = {"command": command, "config": config, "results": results, "ok": bool(ok)}
    sys.stdout.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    return 0 if ok else 1


def _usage_error(message: str) -> int:
    sys.stdout.write(json.dumps({"error": "usage", "detail": message},
                                sort_keys=True, indent=2) + "\n")
    return 2


def _variant(args) -> SigmaVariant:
    return SigmaVariant(args.variant)


# ---------------------------------------------------------------------------
# subcommands

def cmd_sigma_check(args) -> int:
    variant = _variant(args)
    profile = words.vanishing_profile(variant)
    ctx = SymmetricGroupContext(4)
    wit = words.find_nonvanishing_witness(words.sigma_star(variant), ctx)
    cert = words.s8_symbolic_certificate(variant, seed=args.seed)
    results = {
        "vanishing": profile,
        "witness_found": wit is not None,
        "witness": {repr(k): list(v) for k, v in wit.items()} if wit else None,
        "certificate": {"passed": cert.passed, "reason": cert.reason},
    }
    ok = all(profile.values()) and wit is not None and cert.passed
    return _emit("sigma-check", {"variant": variant.value, "seed": args.seed},
                 results, ok)


def cmd_kgroup_selftest(args) -> int:
    variant = _variant(args)
    results: dict = {}
    ok = True

    def run_instance(name: str, p: KParams, assoc_samples: int):
        nonlocal ok
        eng = kbatch.BatchEngine(p)
        rel = eng.relations_sweep()
        assoc_failures = eng.assoc_sweep(assoc_samples, seed=args.seed)
        inv_bad = 0
        for level, n in ((2, p.n2), (1, p.n1), (0, p.n0)):
            for i in range(n):
                if level == 0 and p.mask == i:
                    continue
                g = kgroup.k_generator(level, i, p)
                if (kgroup.k_mul(g, kgroup.k_inv(g, p), p) != kgroup.IDENTITY
                        or kgroup.k_mul(g, kgroup.IDENTITY, p) != g):
                    inv_bad += 1
        entry = {
            "relations": rel,
            "assoc_samples": assoc_samples,
            "assoc_failures": assoc_failures,
            "generator_law_failures": inv_bad,
            "engine_cross_check": kbatch.cross_check(p, 256, seed=args.seed),
        }
        if name == "toy":
            consistency = kgroup.consistency_report(
                p, assoc_samples=0, enumerate_closure=True)
            entry["closure_order"] = consistency.closure_order
            entry["expected_order"] = consistency.expected_order
            entry["collapse_witness"] = consistency.collapse_witness
            ok = ok and consistency.closure_ok
        rel_ok = (rel["square_failures"] == 0 and rel["level2_pair_failures"] == 0
                  and rel["level1_pair_failures"] == 0
                  and rel["cross_21_failures"] == 0
                  and rel["level0_pair_failures"] == 0
                  and rel["cross_level0_failures"] == 0)
        ok = ok and rel_ok and assoc_failures == 0 and inv_bad == 0 \
            and entry["engine_cross_check"]
        results[name] = entry

    toy_samples = min(args.assoc_samples, 100_000)
    run_instance("toy", kgroup.toy_params(), toy_samples)
    if not args.toy:
        run_instance("full", kgroup.full_params(), args.assoc_samples)
    config = {"variant": variant.value, "seed": args.seed, "toy_only": args.toy,
              "assoc_samples": args.assoc_samples}
    return _emit("kgroup-selftest", config, results, ok)


def cmd_partial_iso_check(args) -> int:
    variant = _variant(args)
    p2 = kgroup.make_K2(kgroup.full_params(), variant)
    per_pair = []
    ok = True
    for s in kgroup.enumerate_S_star():
        rep = kgroup.verify_partial_iso(kgroup.pi_s(s, p2), p2,
                                        samples=args.samples, seed=args.seed)
        per_pair.append({"s": repr(s), "passed": rep.passed, "detail": rep.detail})
        ok = ok and rep.passed
    excl = kgroup.verify_partial_iso(kgroup.excluded_conflict_map(p2), p2,
                                     samples=args.samples, seed=args.seed)
    ok = ok and not excl.passed
    results = {"s_star_count": len(per_pair), "per_pair": per_pair,
               "excluded_map": {"passed": excl.passed, "detail": excl.detail}}
    config = {"variant": variant.value, "seed": args.seed, "samples": args.samples}
    return _emit("partial-iso-check", config, results, ok)


def cmd_toy_conjugator(args) -> int:
    variant = _variant(args)
    p2 = kgroup.make_K2(kgroup.toy_params(), variant)
    cases = []
    ok = True
    nonidentity_success = False
    import itertools as it
    for k in (1, 2):
        for dom in it.combinations(range(3), k):
            for rng_ in it.permutations(range(3), k):
                pi = kgroup.PartialIso(tuple(zip(dom, rng_)))
                res = kgroup.toy_conjugator(pi, p2)
                entry = {"domain": list(dom), "range": list(rng_),
                         "ok": res.ok, "detail": res.detail}
                if res.ok and dom != rng_:
                    nonidentity_success = True
                cases.append(entry)
    ok = nonidentity_success and any(c["ok"] for c in cases)
    results = {"cases": cases,
               "nonidentity_conjugator_found": nonidentity_success}
    return _emit("toy-conjugator", {"variant": variant.value, "seed": args.seed},
                 results, ok)


def _ladder_stream(args):
    if args.exhaustive:
        return list(ladder.all_ladders(args.lam))
    rng = random.Random(args.seed)
    return [ladder.random_ladder(args.lam, rng) for _ in range(args.count)]


def cmd_witness_verify(args) -> int:
    variant = _variant(args)
    p2 = kgroup.make_K2(kgroup.full_params(), variant)
    ladders = _ladder_stream(args)

    def one(f):
        fam = witness.build_witness(f, p2, variant)
        rep = witness.verify_clause_b(fam)
        findings = witness.forbidden_scan(fam) if args.scan else ()
        return rep, findings

    failures = 0
    undecided = 0
    findings_total = 0
    first_failure = None
    for f, (rep, findings) in zip(ladders, runtime.parallel_map(one, ladders)):
        failures += len(rep.failures)
        undecided += len(rep.undecided)
        findings_total += len(findings)
        if first_failure is None and (rep.failures or rep.undecided or findings):
            first_failure = {"ladder_bits": list(f.bits()),
                             "failures": list(rep.failures),
                             "undecided": list(rep.undecided),
                             "forbidden": [list(q) for q in findings]}
    results = {"ladders": len(ladders), "failures": failures,
               "undecided": undecided, "forbidden_findings": findings_total,
               "first_failure": first_failure,
               "params_fingerprint": p2.fingerprint(variant)}
    config = {"lambda": args.lam, "exhaustive": args.exhaustive,
              "count": args.count, "seed": args.seed, "variant": variant.value,
              "scan": args.scan}
    ok = failures == 0 and undecided == 0 and findings_total == 0
    return _emit("witness-verify", config, results, ok)


def cmd_forbidden_scan(args) -> int:
    args.scan = True
    variant = _variant(args)
    p2 = kgroup.make_K2(kgroup.full_params(), variant)
    ladders = _ladder_stream(args)
    findings = []
    for f in ladders:
        fam = witness.build_witness(f, p2, variant)
        for q in witness.forbidden_scan(fam):
            findings.append({"ladder_bits": list(f.bits()), "quadruple": list(q)})
    results = {"ladders": len(ladders), "findings": findings,
               "params_fingerprint": p2.fingerprint(variant)}
    config = {"lambda": args.lam, "exhaustive": args.exhaustive,
              "count": args.count, "seed": args.seed, "variant": variant.value}
    return _emit("forbidden-scan", config, results, not findings)


def cmd_g5_negative_check(args) -> int:
    variant = _variant(args)
    total = {"ladders": 0, "outside_checks": 0, "all_triple_checks": 0,
             "failures": 0}
    first = None
    for lam in range(1, args.lam_max + 1):
        for f in ladder.all_ladders(lam):
            rep = witness.negative_direction_report(f, variant)
            total["ladders"] += 1
            total["outside_checks"] += rep.outside_checks
            total["all_triple_checks"] += rep.all_triple_checks
            total["failures"] += len(rep.failures)
            if first is None and rep.failures:
                first = {"ladder_bits": list(f.bits()),
                         "failures": list(rep.failures)}
    total["first_failure"] = first
    config = {"lambda_max": args.lam_max, "variant": variant.value,
              "seed": args.seed}
    return _emit("g5-negative-check", config, total, total["failures"] == 0)


def cmd_relational_olive(args) -> int:
    try:
        sig = relational.OliveSignature(tuple(int(c) for c in args.eta),
                                        tuple(int(v) for v in args.k.split(",")))
    except (ValueError, relational.SignatureError) as exc:
        return _usage_error(f"invalid signature: {exc}")
    try:
        rep = relational.check_class_olive(sig, args.lam_max)
    except relational.SignatureError as exc:
        return _usage_error(str(exc))
    results = {"ladders": rep.ladders,
               "membership_failures": rep.membership_failures,
               "omission_failures": [list(b) for b in rep.omission_failures]}
    config = {"eta": args.eta, "k": args.k, "lambda_max": args.lam_max,
              "seed": args.seed}
    return _emit("relational-olive", config, results, rep.passed)


def cmd_nstar_build(args) -> int:
    try:
        sig = relational.OliveSignature(tuple(int(c) for c in args.eta),
                                        tuple(int(v) for v in args.k.split(",")))
    except (ValueError, relational.SignatureError) as exc:
        return _usage_error(f"invalid signature: {exc}")
    M = relational.build_Nstar(sig)
    results = {"structure": relational.structure_to_json(M),
               "self_embeds": relational.embeds(M, M) is not None}
    return _emit("nstar-build", {"eta": args.eta, "k": args.k, "seed": args.seed},
                 results, True)


def cmd_amalgam_check(args) -> int:
    sig = relational.DEFAULT_SIG
    rng = random.Random(args.seed)
    union_ok = 0
    amalgam_ok = 0
    failures = []
    for trial in range(args.count):
        a = relational.random_member(sig, rng.randrange(1, 5), rng)
        b = relational.random_member(sig, rng.randrange(1, 5), rng)
        u = relational.disjoint_union(a, b)
        if relational.omits_forbidden(u):
            union_ok += 1
        else:
            failures.append({"trial": trial, "kind": "union"})
        parts = tuple(relational.random_member(sig, rng.randrange(1, 4), rng)
                      for _ in range(4))
        edges = {}
        for (i, j) in relational.FOUR_CYCLE:
            edges[(i, j)] = relational.disjoint_union(parts[i], parts[j])
        _, rep = relational.nsop4_amalgam(parts, edges)
        if rep.passed:
            amalgam_ok += 1
        else:
            failures.append({"trial": trial, "kind": "amalgam",
                             "pre": list(rep.precondition_failures)})
    results = {"trials": args.count, "union_ok": union_ok,
               "amalgam_ok": amalgam_ok, "failures": failures}
    ok = union_ok == args.count and amalgam_ok == args.count
    return _emit("amalgam-check", {"count": args.count, "seed": args.seed},
                 results, ok)


def cmd_etr_validate(args) -> int:
    try:
        tree = etr.load_tree(args.file)
    except (OSError, json.JSONDecodeError, etr.TreeError) as exc:
        return _usage_error(f"cannot load tree: {exc}")
    violations = etr.validate_etr(tree)
    results = {"nodes": len(tree.nodes),
               "violations": [v.as_json() for v in violations]}
    if not violations:
        flat = etr.derive_ftr(tree)
        results["flat"] = {"points": [repr(x) for x in flat.points],
                           "Q0": sorted([repr(a), repr(b)] for a, b in flat.Q0),
                           "Q1": sorted([repr(a), repr(b)] for a, b in flat.Q1)}
    return _emit("etr-validate", {"file": args.file, "seed": args.seed},
                 results, not violations)


# ---------------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="olivelab", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, variant=True):
        p.add_argument("--seed", type=int, default=0)
        if variant:
            p.add_argument("--variant", default=SigmaVariant.REPAIRED.value,
                           choices=[v.value for v in SigmaVariant])

    p = sub.add_parser("sigma-check", help="vanishing certificates and witnesses")
    common(p)
    p.set_defaults(fn=cmd_sigma_check)

    p = sub.add_parser("kgroup-selftest", help="relations, closure, associativity")
    common(p)
    p.add_argument("--toy", action="store_true")
    p.add_argument("--assoc-samples", type=int, default=1_000_000)
    p.set_defaults(fn=cmd_kgroup_selftest)

    p = sub.add_parser("partial-iso-check", help="verify every S* relabelling")
    common(p)
    p.add_argument("--samples", type=int, default=10_000)
    p.set_defaults(fn=cmd_partial_iso_check)

    p = sub.add_parser("toy-conjugator", help="materialize toy conjugators")
    common(p)
    p.set_defaults(fn=cmd_toy_conjugator)

    for name, fn in (("witness-verify", cmd_witness_verify),
                     ("forbidden-scan", cmd_forbidden_scan)):
        p = sub.add_parser(name)
        common(p)
        p.add_argument("--lambda", dest="lam", type=int, required=True)
        p.add_argument("--exhaustive", action="store_true")
        p.add_argument("--count", type=int, default=20)
        if name == "witness-verify":
            p.add_argument("--no-scan", dest="scan", action="store_false")
            p.set_defaults(scan=True)
        p.set_defaults(fn=fn)

    p = sub.add_parser("g5-negative-check")
    common(p)
    p.add_argument("--lambda-max", dest="lam_max", type=int, default=6)
    p.set_defaults(fn=cmd_g5_negative_check)

    p = sub.add_parser("relational-olive")
    common(p, variant=False)
    p.add_argument("--eta", default="0101")
    p.add_argument("--k", default="2,2")
    p.add_argument("--lambda-max", dest="lam_max", type=int, default=5)
    p.set_defaults(fn=cmd_relational_olive)

    p = sub.add_parser("nstar-build")
    common(p, variant=False)
    p.add_argument("--eta", default="0101")
    p.add_argument("--k", default="2,2")
    p.set_defaults(fn=cmd_nstar_build)

    p = sub.add_parser("amalgam-check")
    common(p, variant=False)
    p.add_argument("--count", type=int, default=25)
    p.set_defaults(fn=cmd_amalgam_check)

    p = sub.add_parser("etr-validate")
    common(p, variant=False)
    p.add_argument("file")
    p.set_defaults(fn=cmd_etr_validate)
    return top


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (kgroup.KError, ladder.LadderError, witness.WitnessError,
            relational.StructureError, relational.SignatureError,
            etr.TreeError, ValueError) as exc:
        return _usage_error(str(exc))


if __name__ == "__main__":
    sys.exit(main())
