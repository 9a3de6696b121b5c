"""Acceptance criteria 1-10, one PASS/FAIL line each.

Run under pytest (the lines are repeated in the terminal summary) or
directly with ``python tests/test_acceptance.py``.
"""
from __future__ import annotations

import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sunadakit.pipeline import FixtureBundle, run_bianchi_session, run_low_index, run_method_g, run_method_r, run_sunada_pairs
from sunadakit.psl2 import ProjectiveMatrix
from sunadakit.homsearch import make_record
from sunadakit.surgery import FillingSlope, PeripheralExponents, exponents_from_hom, filling_slopes

RESULTS: list[str] = []


def _checks(report, stage_prefixes):
    return [c for c in report.checks if any(c.stage.startswith(s) for s in stage_prefixes)]


def _all_pass(checks, needed: set[str]) -> tuple[bool, list[str]]:
    names = {c.name for c in checks}
    missing = sorted(needed - names)
    bad = [c.line() for c in checks if not c.passed]
    problems = bad + [f"missing check {m}" for m in missing]
    return not problems, ("; " + "; ".join(problems)) if problems else ""


def criterion_1():
    r = run_sunada_pairs(7)
    st = r.get_stage("index-p subgroups").results
    return r.passed, f"classes={st['classes']} orders={st['orders']} swap={st['outer_swap']}", 5


def criterion_2():
    r = run_sunada_pairs(11)
    st = r.get_stage("index-p subgroups").results
    return r.passed, f"classes={st['classes']} orders={st['orders']} swap={st['outer_swap']}", 60


def criterion_3():
    r = run_method_g(FixtureBundle.bundled("k11n116"))
    checks = _checks(r, ["field", "splitting mod", "exact representation", "reduction mod (7, t - 1)"])
    needed = {"discriminant", "residue degrees", "surjective", "image order"} | {
        f"image of {n}" for n in ("a", "b", "c", "mu", "lambda")
    }
    ok, bad = _all_pass(checks, needed)
    st = r.get_stage("reduction mod (7, t - 1)").results
    return ok, f"disc={r.get_stage('field').results['discriminant']} image_order={st['image_order']}{bad}", 5


def criterion_4():
    r = run_method_g(FixtureBundle.bundled("l9_34"))
    checks = _checks(r, ["splitting mod 7", "published rho7"])
    needed = {"residue degrees", "degree-one root", "image of a", "image of b", "image of c"} | {
        f"cusp {k} {f} image" for k in (0, 1) for f in ("meridian", "longitude")
    }
    ok, bad = _all_pass(checks, needed)
    st = r.get_stage("splitting mod 7").results
    return ok, f"degrees={st['degrees']} roots={st['roots']}{bad}", 5


def criterion_5():
    r = run_method_g(FixtureBundle.bundled("k11n116"), primes=(7,))
    checks = _checks(r, ["reduction mod (7, t - 1)"])
    ok, bad = _all_pass(checks, {"cover cusp counts", "cover homology"})
    covers = r.get_stage("reduction mod (7, t - 1)").results.get("covers", [])
    return ok, f"covers={[(c['cusps'], c['homology']) for c in covers]}{bad}", 5


def criterion_6():
    r = run_method_r(FixtureBundle.bundled("k11n116"), 7)
    checks = [c for c in r.checks if c.name in ("p-good Aut classes", "rho7 among p-good classes up to Aut")]
    ok, bad = _all_pass(checks, {"p-good Aut classes", "rho7 among p-good classes up to Aut"})
    st = r.get_stage("homsearch mod 7").results
    detail = (
        f"p_good_aut_classes={st['p_good_aut_classes']} (expected 2), "
        f"up to PSL conjugacy={st['p_good_inner_classes']}, surjective_raw={st['surjective_raw']}"
    )
    return ok, detail, 30


def criterion_7():
    r = run_low_index(FixtureBundle.bundled("k11n116"), 11)
    st = r.get_stage("low-index 11").results
    x = r.get_stage("low-index 11 vs method-r").results
    homs = sorted({tuple(h) for h in x["homology"]})
    return r.passed, f"classes={st['classes']} one_cusped={st['one_cusped']} rep_cover_homology={homs}", None


def criterion_8():
    r = run_bianchi_session()
    res = {s.name: s.results for s in r.stages}
    detail = (
        f"index={[res['subgroup h1']['index'], res['subgroup h2']['index']]} "
        f"invariants={[res['subgroup h1']['abelian_invariants'], res['subgroup h2']['abelian_invariants']]} "
        f"orders={[res['subgroup h1']['image_order'], res['subgroup h2']['image_order']]} "
        f"intersections={res['class intersections']['sizes']}"
    )
    return r.passed and len(r.checks) == 11, detail, 30


def criterion_9():
    e = PeripheralExponents(7, 2, 2)
    slopes = filling_slopes(e, 200)
    s_inv = pow(e.s, -1, 7)
    congruent = all((s.m - (-s.n * e.t * s_inv)) % 7 == 0 for s in slopes)
    family = all(FillingSlope(7 * a - 1, 1) in slopes for a in range(1, 5))
    b = FixtureBundle.bundled("l9_34")
    red = b.expected_reductions()[0]
    h = make_record(b.presentation, [ProjectiveMatrix.from_rows(red["images"][g], 7) for g in "abc"])
    e2 = exponents_from_hom(h, 0)
    s2 = filling_slopes(e2, 400)
    minus = all(FillingSlope(-(7 * k + 1), 1) in s2 for k in range(1, 6))
    ok = congruent and family and minus
    return ok, f"(2,2): congruent={congruent} 7a-1 family={family}; 9^2_34 (s,t)=({e2.s},{e2.t}) -(7k+1) family={minus}", 1


def criterion_10():
    import test_properties as tp

    tp.test_free_reduction_idempotent()
    tp.test_canonical_form_ignores_sign()
    tp.test_lagrange_divisibility()
    tp.test_class_invariant_under_conjugation()
    n_snf = tp.check_snf_suite(500)
    n_red = tp.check_reduction_homomorphism(100)
    n_hom = tp.check_good_implies_rep()
    return True, f"snf={n_snf} reduction_products={n_red} homs_checked={n_hom}", 60


CRITERIA = {k: globals()[f"criterion_{k}"] for k in range(1, 11)}


def run_criterion(k: int) -> tuple[bool, str]:
    t0 = time.perf_counter()
    try:
        ok, detail, limit = CRITERIA[k]()
    except AssertionError as e:
        ok, detail, limit = False, f"assertion failed: {e}", None
    dt = time.perf_counter() - t0
    if limit is not None and dt > limit:
        detail += f"; took {dt:.1f}s, over the {limit}s budget"
        ok = False
    line = f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail} [{dt:.1f}s]"
    return ok, line


@pytest.mark.parametrize("k", range(1, 11))
def test_criterion(k):
    ok, line = run_criterion(k)
    RESULTS.append(line)
    print(line)
    assert ok, line


if __name__ == "__main__":
    failed = 0
    for k in CRITERIA:
        ok, line = run_criterion(k)
        print(line, flush=True)
        failed += not ok
    sys.exit(1 if failed else 0)
