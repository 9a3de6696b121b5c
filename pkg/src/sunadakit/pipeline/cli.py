"""Command-line entry point.

Every subcommand that compares against expected values exits 0 only when
all comparisons pass, 1 when some fail and 2 on bad input.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from ..fpgroups import coset_enumerate
from ..fpgroups.cosets import CosetLimitExceeded
from ..fpgroups.covers import cover_from_table, pullback_cover
from ..homsearch import SearchRefused, classify_p_good, count_homs, enumerate_homs
from ..numfield import NumberField, RamifiedPrime, load_field, load_matrices, reduce_matrix, split_prime
from ..psl2 import ProjectiveMatrix
from ..sunada import index_p_subgroups
from ..surgery import PeripheralExponents, SurgeryError, filling_slopes
from ..words import PresentationError, WordParseError
from ..zlinalg import abelian_invariants, smith_normal_form
from .bundle import BundleError, FixtureBundle
from .methods import (
    METHOD_G_PRIMES,
    run_batch,
    run_bianchi_session,
    run_low_index,
    run_method_g,
    run_method_r,
    run_sunada_pairs,
)
from .report import RunReport

LIMIT_ENV = "SUNADAKIT_COSET_LIMIT"


def _emit(data, as_json: bool, text: str) -> None:
    if as_json:
        sys.stdout.write(json.dumps(data, indent=2) + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _emit_report(report: RunReport, args) -> int:
    _emit(report.to_dict(), args.json, report.render_text())
    if getattr(args, "output", None):
        Path(args.output).write_text(report.to_json())
    return 0 if report.passed else 1


def _parse_matrix(text: str, p: int) -> ProjectiveMatrix:
    vals = [int(v) for v in text.replace(";", ",").split(",")]
    if len(vals) != 4:
        raise ValueError(f"expected four entries a,b,c,d, got {text!r}")
    return ProjectiveMatrix(*vals, p)


# -- subcommands ------------------------------------------------------------


def cmd_sunada_pairs(args) -> int:
    return _emit_report(run_sunada_pairs(args.prime, workers=args.workers), args)


def cmd_homsearch(args) -> int:
    bundle = FixtureBundle.resolve(args.presentation)
    recs = enumerate_homs(bundle.presentation, args.prime)
    goods = [classify_p_good(r) for r in recs if r.surjective]
    counts = count_homs(recs, args.prime, goods)
    data = {"counts": counts.as_dict(), "classes": [r.as_dict() for r in recs], "p_good": [g.as_dict() for g in goods]}
    lines = [f"{bundle.name}: homomorphisms to PSL(2,{args.prime}) up to Aut"]
    for k, v in counts.as_dict().items():
        if k != "surjective_raw" or args.raw_count:
            lines.append(f"  {k}: {v}")
    for g in goods:
        homs = ", ".join(str(c.homology) for c in g.covers)
        lines.append(f"  class {g.hom.aut_class_id}: p_rep={g.hom.p_rep} p_good={g.p_good} covers: {homs}")
    _emit(data, args.json, "\n".join(lines))
    return 0


def _field_arg(args) -> NumberField:
    if args.field:
        return load_field(args.field)
    if args.poly:
        return NumberField(tuple(int(v) for v in args.poly.split(",")))
    return FixtureBundle.resolve(args.fixture).field


def cmd_split(args) -> int:
    K = _field_arg(args)
    rep = split_prime(K.min_poly, args.prime)
    _emit(rep.as_dict(), args.json, f"degrees {list(rep.degrees)} roots {list(rep.roots)}")
    return 0


def cmd_reduce(args) -> int:
    K = load_field(args.field)
    mats = load_matrices(args.matrices, K)
    out = {n: reduce_matrix(m, args.prime, args.root) for n, m in mats.items()}
    _emit({n: m.rows for n, m in out.items()}, args.json, "\n".join(f"{n}: {m}" for n, m in out.items()))
    return 0


def cmd_cover(args) -> int:
    bundle = FixtureBundle.resolve(args.presentation)
    pres = bundle.presentation
    covers = []
    if args.subgroup:
        T = coset_enumerate(pres, [pres.word(w) for w in args.subgroup], limit=args.coset_limit)
        covers.append(cover_from_table(pres, T))
    elif args.image:
        imgs = dict(item.split("=", 1) for item in args.image)
        images = [_parse_matrix(imgs[g], args.prime) for g in pres.generators]
        covers += [pullback_cover(pres, images, H) for H in index_p_subgroups(args.prime)]
    else:
        raise ValueError("give --subgroup words or --prime with --image g=a,b,c,d")
    data = [c.summary() for c in covers]
    text = "\n".join(f"degree {c.degree}: {c.cusp_count} cusp(s), H1 = {c.homology}" for c in covers)
    _emit(data, args.json, text)
    return 0


def cmd_low_index(args) -> int:
    return _emit_report(run_low_index(FixtureBundle.resolve(args.presentation), args.index), args)


def cmd_surgery(args) -> int:
    e = PeripheralExponents(args.prime, args.s, args.t)
    slopes = filling_slopes(e, args.count)
    _emit([[s.m, s.n] for s in slopes], args.json, "\n".join(str(s) for s in slopes))
    return 0


def cmd_snf(args) -> int:
    text = Path(args.matrix).read_text() if Path(args.matrix).is_file() else args.matrix
    m = json.loads(text)
    ncols = len(m[0]) if m else 0
    diag = smith_normal_form(m) if m else []
    inv = abelian_invariants(m, ncols)
    _emit({"diagonal": diag, "cokernel": list(inv.factors)}, args.json, f"diagonal {diag}\ncokernel {inv}")
    return 0


def cmd_bianchi(args) -> int:
    return _emit_report(run_bianchi_session(), args)


def cmd_method_g(args) -> int:
    return _emit_report(run_method_g(FixtureBundle.resolve(args.fixture), args.prime or METHOD_G_PRIMES), args)


def cmd_method_r(args) -> int:
    return _emit_report(run_method_r(FixtureBundle.resolve(args.fixture), args.prime), args)


def cmd_batch(args) -> int:
    return _emit_report(run_batch(args.directory, args.prime or METHOD_G_PRIMES, workers=args.workers), args)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sunadakit", description=__doc__.splitlines()[0])
    ap.add_argument(
        "--coset-limit",
        type=int,
        default=None,
        help=f"maximum cosets in coset enumeration (default from ${LIMIT_ENV})",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--json", action="store_true", help="print JSON instead of text")
        p.set_defaults(func=func)
        return p

    p = add("sunada-pairs", cmd_sunada_pairs, "certify the index-p Sunada pair in PSL(2,p)")
    p.add_argument("--prime", type=int, choices=(7, 11), required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--output", help="also write the JSON report here")

    p = add("homsearch", cmd_homsearch, "homomorphisms onto PSL(2,l) up to automorphism")
    p.add_argument("presentation", help="presentation file, bundle directory or fixture name")
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--raw-count", action="store_true", help="also print the raw (undeduplicated) count")

    p = add("split", cmd_split, "residue degrees of primes above l")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--field", help="field.json")
    g.add_argument("--poly", help="coefficients, constant term first, comma separated")
    g.add_argument("--fixture", help="bundle directory or fixture name")
    p.add_argument("--prime", type=int, required=True)

    p = add("reduce", cmd_reduce, "reduce exact matrices at a degree-one prime")
    p.add_argument("--field", required=True)
    p.add_argument("--matrices", required=True)
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--root", type=int, required=True)

    p = add("cover", cmd_cover, "cusp count and homology of a finite cover")
    p.add_argument("presentation")
    p.add_argument("--subgroup", nargs="+", help="subgroup generator words")
    p.add_argument("--prime", type=int)
    p.add_argument("--image", action="append", help="generator image, e.g. a=6,1,6,0")

    p = add("low-index", cmd_low_index, "conjugacy classes of subgroups of given index")
    p.add_argument("presentation")
    p.add_argument("--index", type=int, required=True)
    p.add_argument("--output")

    p = add("surgery", cmd_surgery, "filling slopes a peripheral-cyclic rep survives")
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--count", type=int, default=10)

    p = add("snf", cmd_snf, "Smith normal form of an integer matrix (JSON or file)")
    p.add_argument("matrix")

    p = add("bianchi-session", cmd_bianchi, "the index-12 subgroup computation")
    p.add_argument("--output")

    p = add("method-g", cmd_method_g, "number-field pipeline on a bundle")
    p.add_argument("fixture")
    p.add_argument("--prime", type=int, action="append")
    p.add_argument("--output")

    p = add("method-r", cmd_method_r, "homomorphism-search pipeline on a bundle")
    p.add_argument("fixture")
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--output")

    p = add("batch", cmd_batch, "method R over a directory of bundles")
    p.add_argument("directory")
    p.add_argument("--prime", type=int, action="append")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--output")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.coset_limit is not None:
        os.environ[LIMIT_ENV] = str(args.coset_limit)
    try:
        return args.func(args)
    except (
        BundleError,
        CosetLimitExceeded,
        PresentationError,
        RamifiedPrime,
        SearchRefused,
        SurgeryError,
        WordParseError,
        ValueError,
        KeyError,
        OSError,
    ) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
