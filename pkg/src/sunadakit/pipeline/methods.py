"""End-to-end runs over fixture bundles.

Method G starts from the exact representation over a number field and
reduces it at degree-one primes; Method R searches all homomorphisms onto
PSL(2, l) directly.  Both feed the same Sunada cover analysis.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Sequence

from ..fpgroups import coset_enumerate
from ..fpgroups.covers import RelatorViolation, check_relators, cusp_count, pullback_table, rewrite_homology
from ..fpgroups.cosets import CosetTable
from ..fpgroups.lowindex import low_index_subgroups
from ..fpgroups.perms import class_meets_subgroup, perm_image
from ..homsearch import (
    HomRecord,
    SearchRefused,
    classify_p_good,
    count_homs,
    enumerate_homs,
    make_record,
    same_aut_class,
)
from ..numfield import NFMatrix, RamifiedPrime, common_roots, poly_discriminant, reduce_matrix, split_prime
from ..psl2 import ProjectiveMatrix, psl_group
from ..sunada import SUPPORTED_PRIMES, index_p_subgroups, sunada_pair
from ..surgery import FillingSlope, SurgeryError, exponents_from_hom, filling_slopes
from ..words import Presentation, Word, evaluate
from .bundle import PERIPHERAL_NAMES, FixtureBundle
from .report import RunReport

METHOD_G_PRIMES = (7, 11)
SURGERY_SLOPES = 400  # how many slopes to list when looking for a family


def _rows(m: ProjectiveMatrix) -> list[list[int]]:
    return m.rows


def _factors(inv) -> list[int]:
    return list(inv.factors)


def _nf_word(pres: Presentation, mats: dict[str, NFMatrix], w: Word) -> NFMatrix:
    K = next(iter(mats.values())).field
    gens = [mats[g] for g in pres.generators]
    return evaluate(w, gens, lambda x, y: x * y, lambda x: x.inverse(), NFMatrix.identity(K))


def _peripheral_named(pres: Presentation, rec: HomRecord) -> dict[str, ProjectiveMatrix]:
    """Images of the first cusp's meridian and longitude under the names mu, lambda."""
    if not pres.cusps:
        return {}
    c = rec.peripheral[0]
    return {"mu": c.meridian, "lambda": c.longitude}


# -- shared analysis of one representation into PSL(2, l) -------------------


def _analyse(
    report: RunReport,
    bundle: FixtureBundle,
    stage_name: str,
    images: dict[str, ProjectiveMatrix],
    expected: dict | None,
    exp_key: str,
) -> HomRecord | None:
    """Relators, surjectivity, peripheral images and Sunada covers of one rep.

    ``images`` holds one matrix per generator and, optionally, independent
    images of mu and lambda (from exact matrices) to compare against the
    cusp words.
    """
    pres = bundle.presentation
    stage = report.get_stage(stage_name)
    gens = [images[g] for g in pres.generators]
    try:
        check_relators(pres, gens)
        ok = True
    except RelatorViolation as e:
        ok = False
        report.notice(f"{stage_name}: {e}")
    stage.results["images"] = {g: _rows(images[g]) for g in pres.generators}
    report.check(stage_name, "relators hold", True, ok, bundle.source(exp_key + ".images"))
    if not ok:
        return None
    rec = make_record(pres, gens)
    stage.results["image_order"] = rec.image_order
    stage.results["surjective"] = rec.surjective
    stage.results["peripheral"] = [
        {
            "meridian": _rows(c.meridian),
            "longitude": _rows(c.longitude),
            "image_order": c.image_order,
            "p_rep": c.parabolic,
        }
        for c in rec.peripheral
    ]
    stage.results["p_rep"] = rec.p_rep
    words = _peripheral_named(pres, rec)
    for name in PERIPHERAL_NAMES:
        if name in images and name in words:
            report.check(
                stage_name,
                f"{name} image agrees with cusp word",
                _rows(images[name]),
                _rows(words[name]),
                bundle.source(exp_key + f".images.{name}"),
            )
    if expected is not None:
        pub = bundle.published_images(expected)
        for name, m in pub.items():
            actual = images.get(name) or words.get(name)
            report.check(
                stage_name,
                f"image of {name}",
                _rows(m),
                _rows(actual) if actual is not None else None,
                bundle.source(exp_key + f".images.{name}"),
            )
        for k, cusp in enumerate(expected.get("peripheral", [])):
            for field in ("meridian", "longitude"):
                want = ProjectiveMatrix.from_rows(cusp[field], expected["prime"])
                got = getattr(rec.peripheral[k], field) if k < len(rec.peripheral) else None
                report.check(
                    stage_name,
                    f"cusp {k} {field} image",
                    _rows(want),
                    _rows(got) if got is not None else None,
                    bundle.source(exp_key + f".peripheral[{k}].{field}"),
                )
        if "surjective" in expected:
            report.check(stage_name, "surjective", expected["surjective"], rec.surjective, bundle.source(exp_key + ".surjective"))
            if expected["surjective"]:
                G = psl_group(rec.prime)
                report.check(stage_name, "image order", G.order, rec.image_order, bundle.source(exp_key + ".surjective"))
        if "p_rep" in expected:
            report.check(stage_name, "p-rep", expected["p_rep"], rec.p_rep, bundle.source(exp_key + ".p_rep"))
            if expected["p_rep"]:
                for k, c in enumerate(rec.peripheral):
                    report.check(
                        stage_name,
                        f"cusp {k} meridian parabolic of order {rec.prime}",
                        True,
                        c.meridian.order() == rec.prime,
                        bundle.source(exp_key + ".p_rep"),
                    )
    if rec.surjective and rec.prime in SUPPORTED_PRIMES:
        good = classify_p_good(rec)
        stage.results["covers"] = [c.summary() for c in good.covers]
        stage.results["p_good"] = good.p_good
        if expected is not None and "covers" in expected:
            exp = expected["covers"]
            report.check(stage_name, "cover cusp counts", exp["cusps"], [c.cusp_count for c in good.covers], bundle.source(exp_key + ".covers.cusps"))
            report.check(stage_name, "cover homology", exp["homology"], [_factors(c.homology) for c in good.covers], bundle.source(exp_key + ".covers.homology"))
    return rec


# -- Method G ---------------------------------------------------------------


def _surgery_stage(report: RunReport, bundle: FixtureBundle, recs: dict[str, HomRecord]) -> None:
    plan = (bundle.expected or {}).get("surgery")
    if not plan:
        return
    reds = [r for r in bundle.expected_reductions() if r["prime"] == plan["prime"]]
    rec = recs.get(reds[0]["label"]) if reds else None
    name = "surgery"
    stage = report.stage(name, prime=plan["prime"], cusp=plan["cusp"], rep=reds[0]["label"] if reds else None)
    if rec is None:
        report.notice(f"{name}: no representation at {plan['prime']} to fill along")
        return
    try:
        e = exponents_from_hom(rec, plan["cusp"])
    except SurgeryError as err:
        report.notice(f"{name}: {err}")
        report.check(name, "peripheral exponents", "defined", str(err), bundle.source("surgery"))
        return
    slopes = filling_slopes(e, SURGERY_SLOPES)
    cusp = bundle.presentation.cusps[plan["cusp"]]
    killed = all(rec.image_of(s.filling_word(cusp.meridian, cusp.longitude)).is_identity() for s in slopes)
    stage.results.update(s=e.s, t=e.t, first_slopes=[str(s) for s in slopes[:12]])
    report.check(name, "filling words killed", True, killed, bundle.source("surgery"))
    members = [FillingSlope(m, n) for m, n in plan.get("members", [])]
    found = set(slopes)
    report.check(
        name,
        f"slope family {plan.get('slope_family', '')}".strip(),
        [[s.m, s.n] for s in members],
        [[s.m, s.n] for s in members if s in found],
        bundle.source("surgery.members"),
    )


def run_method_g(bundle: FixtureBundle, primes: Sequence[int] = METHOD_G_PRIMES) -> RunReport:
    report = RunReport(bundle.name, "method-g")
    exp = bundle.expected or {}
    recs: dict[str, HomRecord] = {}
    if bundle.field is None:
        report.notice("number field unavailable: splitting and reduction skipped")
    else:
        f = bundle.field.min_poly
        st = report.stage("field", min_poly=list(f))
        disc = poly_discriminant(f)
        st.results.update(degree=bundle.field.degree, discriminant=disc)
        if "discriminant" in exp:
            report.check("field", "discriminant", exp["discriminant"], disc, bundle.source("discriminant"))
        all_primes = sorted(set(primes) | {int(k) for k in exp.get("splitting", {})})
        splits = {}
        for l in all_primes:
            name = f"splitting mod {l}"
            st = report.stage(name, prime=l)
            try:
                sp = split_prime(f, l)
            except RamifiedPrime as e:
                report.notice(f"{name}: {e}")
                continue
            splits[l] = sp
            st.results.update(degrees=list(sp.degrees), roots=list(sp.roots))
            want = exp.get("splitting", {}).get(str(l))
            if want is None:
                continue
            key = f"splitting.{l}"
            report.check(name, "residue degrees", want["degrees"], list(sp.degrees), bundle.source(key + ".degrees"))
            if "root" in want:
                report.check(name, "degree-one root", want["root"], want["root"] if want["root"] in sp.roots else None, bundle.source(key + ".root"))
            if "root_of" in want:
                shared = common_roots(f, want["root_of"], l)
                st.results["shared_roots"] = shared
                report.check(name, "root shared with published modulus", True, bool(shared), bundle.source(key + ".root_of"))
        if bundle.matrices is not None:
            _exact_stages(report, bundle, splits, recs)
    if bundle.matrices is None:
        report.notice("exact matrices unavailable: published reductions validated instead")
        for i, red in enumerate(bundle.expected_reductions()):
            name = f"published {red['label']}"
            report.stage(name, prime=red["prime"], root=red.get("root"))
            images = bundle.published_images(red)
            rec = _analyse(report, bundle, name, images, red, f"reductions[{i}]")
            if rec is not None:
                recs[red["label"]] = rec
    _surgery_stage(report, bundle, recs)
    return report


def _exact_stages(report: RunReport, bundle: FixtureBundle, splits: dict, recs: dict[str, HomRecord]) -> None:
    pres = bundle.presentation
    mats = bundle.matrices
    st = report.stage("exact representation", generators=list(pres.generators))
    src = bundle.source("", "matrices.json").rstrip(":")
    dets = {n: m.det() == m.field.element([1]) for n, m in mats.items()}
    report.check(st.name, "determinants are 1", {n: True for n in mats}, dets, src)
    one = NFMatrix.identity(bundle.field)
    rel_ok = [_nf_word(pres, mats, r).equal_up_to_sign(one) for r in pres.relators]
    report.check(st.name, "relators are +-identity", [True] * len(rel_ok), rel_ok, src)
    if pres.cusps:
        cusp = pres.cusps[0]
        for name, w in zip(PERIPHERAL_NAMES, (cusp.meridian, cusp.longitude)):
            if name in mats:
                same = _nf_word(pres, mats, w).equal_up_to_sign(mats[name])
                report.check(st.name, f"{name} equals its cusp word", True, same, src)
    by_root = {(r["prime"], r.get("root")): (i, r) for i, r in enumerate(bundle.expected_reductions())}
    matched = set()
    for l, sp in splits.items():
        for root in sp.roots:
            name = f"reduction mod ({l}, t - {root})"
            report.stage(name, prime=l, root=root)
            try:
                images = {n: reduce_matrix(m, l, root) for n, m in mats.items()}
            except ValueError as e:
                report.notice(f"{name}: {e}")
                continue
            hit = by_root.get((l, root))
            exp_key = f"reductions[{hit[0]}]" if hit else ""
            rec = _analyse(report, bundle, name, images, hit[1] if hit else None, exp_key)
            if hit:
                matched.add(hit[1]["label"])
                if rec is not None:
                    recs[hit[1]["label"]] = rec
    for i, red in enumerate(bundle.expected_reductions()):
        if red["label"] not in matched:
            report.check(
                "exact representation",
                f"published {red['label']} located",
                [red["prime"], red.get("root")],
                None,
                bundle.source(f"reductions[{i}]"),
            )


# -- Method R ---------------------------------------------------------------


def _good_summary(recs: list[HomRecord]):
    goods = [classify_p_good(r) for r in recs if r.surjective]
    rows = []
    for g in goods:
        row = g.hom.as_dict()
        row.update(p_good=g.p_good, covers=[c.summary() for c in g.covers])
        rows.append(row)
    return goods, rows


def run_method_r(bundle: FixtureBundle, l: int) -> RunReport:
    report = RunReport(bundle.name, f"method-r mod {l}")
    name = f"homsearch mod {l}"
    st = report.stage(name, prime=l)
    try:
        recs = enumerate_homs(bundle.presentation, l)
    except SearchRefused as e:
        report.notice(f"{name}: {e}")
        return report
    goods, rows = _good_summary(recs)
    counts = count_homs(recs, l, goods)
    good = [g for g in goods if g.p_good]
    st.results.update(counts.as_dict())
    st.results["p_good_inner_classes"] = sum(g.hom.inner_classes for g in good)
    st.results["surjections"] = rows
    # p-good must imply p-rep
    report.check(name, "p-good reps are p-reps", True, all(g.hom.p_rep for g in good), "invariant")
    want = (bundle.expected or {}).get("method_r", {}).get(str(l))
    if not want:
        return report
    key = f"method_r.{l}"
    if "p_good_aut_classes" in want:
        report.check(name, "p-good Aut classes", want["p_good_aut_classes"], len(good), bundle.source(key + ".p_good_aut_classes"))
    if "p_good_inner_classes" in want:
        report.check(
            name,
            "p-good classes up to PSL conjugacy",
            want["p_good_inner_classes"],
            st.results["p_good_inner_classes"],
            bundle.source(key + ".p_good_inner_classes"),
        )
    if "p_good_at_least" in want:
        report.check(
            name,
            "p-good Aut classes (at least)",
            want["p_good_at_least"],
            len(good),
            bundle.source(key + ".p_good_at_least"),
            passed=len(good) >= want["p_good_at_least"],
        )
    if "contains" in want:
        label = want["contains"]
        red = next(r for r in bundle.expected_reductions() if r["label"] == label)
        pub = bundle.published_images(red)
        images = [pub[g] for g in bundle.presentation.generators]
        hit = [g.hom.aut_class_id for g in good if same_aut_class(images, g.hom.images)]
        report.check(name, f"{label} among p-good classes up to Aut", True, bool(hit), bundle.source(key + ".contains"))
    if "p_good_homologies" in want:
        homs = sorted({tuple(c.homology.factors) for g in good for c in g.covers})
        report.check(name, "p-good cover homologies", sorted(want["p_good_homologies"]), homs, bundle.source(key + ".p_good_homologies"))
    return report


# -- low-index --------------------------------------------------------------


def conjugacy_key(T: CosetTable) -> tuple:
    """The same key for tables of conjugate subgroups: least standard form over bases."""
    return min(tuple(map(tuple, T.rebased(b).columns())) for b in range(T.degree))


def run_low_index(bundle: FixtureBundle, n: int) -> RunReport:
    pres = bundle.presentation
    report = RunReport(bundle.name, f"low-index {n}")
    name = f"low-index {n}"
    st = report.stage(name, index=n)
    tables = low_index_subgroups(pres, n)
    cusps = [cusp_count(T, pres) for T in tables]
    one = [T for T, c in zip(tables, cusps) if c == 1]
    st.results.update(
        classes=len(tables),
        one_cusped=len(one),
        one_cusped_homology=sorted(_factors(rewrite_homology(T, pres)) for T in one),
    )
    want = (bundle.expected or {}).get("low_index", {}).get(str(n))
    if want:
        report.check(name, "subgroup classes", want["classes"], len(tables), bundle.source(f"low_index.{n}.classes"))
        report.check(name, "one-cusped covers", want["one_cusped"], len(one), bundle.source(f"low_index.{n}.one_cusped"))
    if n not in SUPPORTED_PRIMES:
        return report
    # the covers from n-good reps are among these subgroups
    xname = f"low-index {n} vs method-r"
    xs = report.stage(xname, prime=n)
    keys = {conjugacy_key(T) for T in tables}
    try:
        recs = enumerate_homs(pres, n, surjective_only=True)
    except SearchRefused as e:
        report.notice(f"{xname}: {e}")
        return report
    subs = index_p_subgroups(n)
    found, homs = [], []
    for r in recs:
        g = classify_p_good(r)
        if not g.p_good:
            continue
        for H in subs:
            T = pullback_table(pres, r.images, H)
            found.append(conjugacy_key(T) in keys)
            homs.append(_factors(rewrite_homology(T, pres)))
    xs.results.update(pullbacks=len(found), homology=homs)
    report.check(xname, "pullback subgroups found by low-index", [True] * len(found), found, "invariant")
    hwant = (bundle.expected or {}).get("method_r", {}).get(str(n), {}).get("p_good_homologies")
    if hwant is not None:
        report.check(xname, "homology of rep-derived covers", sorted(hwant), sorted({tuple(h) for h in homs}), bundle.source(f"method_r.{n}.p_good_homologies"))
    return report


# -- fixed computations -----------------------------------------------------


def run_bianchi_session(bundle: FixtureBundle | None = None) -> RunReport:
    """Two index-12 subgroups: invariants, image orders, class intersections."""
    bundle = bundle or FixtureBundle.bundled("bianchi")
    exp = bundle.expected
    pres = bundle.presentation
    report = RunReport(bundle.name, "bianchi-session")
    images = {}
    subgroups = {}
    for h, words in exp["subgroups"].items():
        gens = [pres.word(w) for w in words]
        subgroups[h] = gens
        st = report.stage(f"subgroup {h}", generators=words)
        T = coset_enumerate(pres, gens)
        inv = rewrite_homology(T, pres)
        images[h] = perm_image(T)
        st.results.update(index=T.degree, abelian_invariants=_factors(inv), image_order=images[h].order)
        report.check(st.name, "index", exp["index"][h], T.degree, bundle.source(f"index.{h}"))
        report.check(st.name, "abelian invariants", exp["abelian_invariants"][h], _factors(inv), bundle.source(f"abelian_invariants.{h}"))
        report.check(st.name, "image order", exp["image_order"][h], images[h].order, bundle.source(f"image_order.{h}"))
    st = report.stage("class intersections", elements=exp["elements"])
    sizes = []
    for k, row in enumerate(exp["intersections"]):
        h, e = row["subgroup"], row["element"]
        size = class_meets_subgroup(images[h], pres.word(exp["elements"][e]), subgroups[h])
        sizes.append(size)
        report.check(st.name, f"class of {e} meets {h}", row["size"], size, bundle.source(f"intersections[{k}]"))
    st.results["sizes"] = sizes
    return report


def run_sunada_pairs(p: int, workers: int = 1) -> RunReport:
    report = RunReport(f"PSL(2,{p})", "sunada-pairs")
    st = report.stage("index-p subgroups", prime=p)
    rep = sunada_pair(p, workers=workers)
    order = psl_group(p).order // p
    st.results.update(
        classes=len(rep.subgroups),
        orders=[H.order for H in rep.subgroups],
        almost_conjugate=rep.certificate is not None,
        outer_swap=rep.outer_swap,
        unique_pair=rep.unique_pair,
    )
    if rep.certificate is not None:
        st.results["certificate"] = rep.certificate.as_dict()
    src = "derived: |PSL(2,p)|/p"
    report.check(st.name, "classes of index-p subgroups", 2, len(rep.subgroups), "invariant")
    report.check(st.name, "subgroup orders", [order] * 2, [H.order for H in rep.subgroups], src)
    report.check(st.name, "almost conjugate, not conjugate", True, rep.certificate is not None, "invariant")
    report.check(st.name, "swapped by the outer automorphism", True, rep.outer_swap, "invariant")
    return report


# -- batch ------------------------------------------------------------------


def batch_entries(directory: str | Path) -> list[Path]:
    d = Path(directory)
    out = [p for p in d.iterdir() if p.is_dir() and (p / "presentation.txt").is_file()]
    out += [p for p in d.iterdir() if p.is_file() and p.suffix == ".txt"]
    return sorted(out, key=lambda p: p.name)


def _batch_one(args) -> tuple[str, dict]:
    path, primes = args
    bundle = FixtureBundle.load(path)
    report = RunReport(bundle.name, "method-r")
    for l in primes:
        report.merge(run_method_r(bundle, l))
    return bundle.name, report.to_dict()


def run_batch(directory: str | Path, primes: Sequence[int] = METHOD_G_PRIMES, workers: int | None = None) -> RunReport:
    """Method R over every bundle in a directory, with per-prime tallies."""
    entries = batch_entries(directory)
    report = RunReport(Path(directory).name, "batch")
    jobs = [(p, tuple(primes)) for p in entries]
    workers = workers or min(len(jobs), os.cpu_count() or 1) or 1
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_batch_one, jobs))
    else:
        results = [_batch_one(j) for j in jobs]
    good_by: dict[str, set[int]] = {}
    for name, data in results:
        sub = RunReport.from_dict(data)
        report.merge(sub, prefix=f"{name}/")
        good_by[name] = set()
        for l in primes:
            try:
                s = sub.get_stage(f"homsearch mod {l}")
            except KeyError:
                continue
            if s.results.get("p_good_aut_classes"):
                good_by[name].add(l)
    st = report.stage("tally", primes=list(primes), manifolds=len(results))
    for l in primes:
        st.results[f"with_{l}_good"] = sum(1 for g in good_by.values() if l in g)
    st.results["with_all_good"] = sum(1 for g in good_by.values() if set(primes) <= g)
    return report
