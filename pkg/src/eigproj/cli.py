"""Command-line interface.

JSON reports go to stdout, diagnostics to stderr.  Subcommands::

    eigproj validate FILE
    eigproj analyze FILE --field 2,3 [--audit] [--timing]
    eigproj gproj CATEGORY MODULE [--field p]
    eigproj tensor CATEGORY A B [--out FILE]
    eigproj column CATEGORY Q --field p [--out FILE]
    eigproj generate (--spec FILE | --seed K | --example NAME) [--out FILE]
    eigproj poset-gpt POSET
    eigproj sweep (--posets N | --seeds K) --field 2,3 [--jobs J] [--out FILE]

FILE may be a category, poset or generator-spec file wherever a category
is expected.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Iterable, Sequence

from . import freegen
from .category import (
    MalformedCategory,
    all_mono,
    is_ei,
    is_free,
    is_skeletal,
    peeling_violation,
    validate,
)
from .cmodule import column_module, tensor_hat, validate_module
from .exactla import FieldSpec
from .formats import (
    DigestMismatch,
    MalformedFile,
    category_digest,
    category_to_json,
    dump_json,
    load_category,
    load_json,
    module_from_json,
    module_to_json,
)
from .freegen import Bounds, CapExceeded, FreeEISpec, InvalidSpec, generate_category, random_spec
from .gorenstein import InvalidModule, NotGorenstein, gproj_test, gpt_closed, gpt_closed_via_mono
from .grouprep import is_category_projective
from .poset import FinitePoset, NotAPartialOrder, enumerate_posets, poset_gpt, poset_to_category

__all__ = ["main", "build_parser", "analyze", "sweep_poset", "sweep_seed"]

_INPUT_ERRORS = (MalformedFile, MalformedCategory, NotAPartialOrder, InvalidSpec, CapExceeded, OSError)

EXAMPLES = {
    "point-biset-c2": freegen.point_biset_c2,
    "free-biset-c2": freegen.free_biset_c2,
    "chain2": freegen.chain2,
}


def _fields(text: str) -> list[int]:
    try:
        return [FieldSpec(int(x)).p for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _emit(data, out: str | None = None) -> None:
    text = dump_json(data)
    if out:
        dump_json(data, out)
    else:
        sys.stdout.write(text)


def _err(msg: str) -> None:
    print(f"eigproj: {msg}", file=sys.stderr)


# -- analysis -----------------------------------------------------------------


def _structure(cat) -> tuple[dict, dict]:
    violations = validate(cat)
    flags = {"valid": not violations}
    witnesses: dict = {"violations": [str(v) for v in violations[:50]]}
    if violations:
        return flags, witnesses
    flags["ei"] = is_ei(cat)
    flags["skeletal"] = is_skeletal(cat)
    if not (flags["ei"] and flags["skeletal"]):
        return flags, witnesses
    bad = peeling_violation(cat)
    flags["free"] = bad is None
    witnesses["not_free"] = list(bad) if bad else None
    mono, non_mono = all_mono(cat)
    flags["all_mono"] = mono
    witnesses["non_mono"] = non_mono
    return flags, witnesses


def analyze(cat, fields: Sequence[int], poset: FinitePoset | None = None, audit: bool = False) -> tuple[dict, int]:
    """Full report and exit code (0 analysed, 1 not a finite skeletal EI category)."""
    flags, witnesses = _structure(cat)
    report = {
        "digest": category_digest(cat),
        "objects": len(cat.objects),
        "morphisms": cat.n_morphisms,
        "flags": flags,
        "witnesses": witnesses,
    }
    if not all(flags.get(k, False) for k in ("valid", "ei", "skeletal")):
        return report, 1
    report["order"] = list(cat.order)
    per_field = []
    for p in fields:
        projective, where = is_category_projective(cat, p)
        block = {"p": p, "projective": projective, "gorenstein": projective, "projective_witness": list(where) if where else None}
        if not projective:
            block["gpt"] = "inapplicable"
        else:
            verdicts = [gpt_closed(cat, p, audit=audit), gpt_closed_via_mono(cat, p)]
            if poset is not None:
                v = poset_gpt(poset)
                v.p = p
                verdicts.append(v)
            block["gpt"] = [v.to_json() for v in verdicts]
        per_field.append(block)
    report["fields"] = per_field
    return report, 0


def cmd_validate(args) -> int:
    try:
        kind, cat, _ = load_category(args.path)
    except NotAPartialOrder as exc:
        _emit({"valid": False, "violations": [str(exc)]})
        return 1
    except _INPUT_ERRORS as exc:
        _err(str(exc))
        return 2
    violations = validate(cat)
    _emit({"kind": kind, "valid": not violations, "violations": [str(v) for v in violations]})
    return 0 if not violations else 1


def cmd_analyze(args) -> int:
    try:
        kind, cat, poset = load_category(args.path)
    except _INPUT_ERRORS as exc:
        _err(str(exc))
        return 2
    start = time.perf_counter()
    report, code = analyze(cat, args.field, poset, audit=args.audit)
    report = {"kind": kind, **report}
    if args.timing:
        report["timing"] = round(time.perf_counter() - start, 6)
    _emit(report, args.out)
    return code


def cmd_gproj(args) -> int:
    try:
        _, cat, _ = load_category(args.category)
        x = module_from_json(load_json(args.module), cat)
        if args.field is not None and args.field != [x.p]:
            raise MalformedFile(f"module is over F_{x.p}, not F_{args.field}")
        verdict = gproj_test(x, label=args.module)
    except (*_INPUT_ERRORS, DigestMismatch, NotGorenstein, InvalidModule) as exc:
        _err(str(exc))
        return 2
    _emit(verdict.to_json())
    return 0 if verdict.overall else 1


def cmd_tensor(args) -> int:
    try:
        _, cat, _ = load_category(args.category)
        a = module_from_json(load_json(args.a), cat)
        b = module_from_json(load_json(args.b), cat)
        if a.p != b.p:
            raise MalformedFile("modules are over different fields")
        for m in (a, b):
            bad = validate_module(m)
            if bad:
                raise InvalidModule(f"not a module: {bad[0]}")
    except (*_INPUT_ERRORS, DigestMismatch, InvalidModule) as exc:
        _err(str(exc))
        return 2
    _emit(module_to_json(tensor_hat(a, b)), args.out)
    return 0


def cmd_column(args) -> int:
    try:
        _, cat, _ = load_category(args.category)
        q = int(args.q) if args.q.isdigit() else cat.position(args.q)
        x = column_module(cat, args.field[0], q)
    except (*_INPUT_ERRORS, ValueError, IndexError) as exc:
        _err(str(exc))
        return 2
    _emit(module_to_json(x), args.out)
    return 0


def cmd_generate(args) -> int:
    try:
        if args.spec:
            spec = FreeEISpec.from_json(load_json(args.spec))
        elif args.example:
            spec = EXAMPLES[args.example]()
        else:
            spec = random_spec(args.seed, Bounds(max_morphisms=freegen.default_cap()))
        cat = generate_category(spec)
    except _INPUT_ERRORS as exc:
        _err(str(exc))
        return 2
    _emit(category_to_json(cat), args.out)
    return 0


def cmd_poset_gpt(args) -> int:
    try:
        p = FinitePoset.from_json(load_json(args.path))
    except _INPUT_ERRORS as exc:
        _err(str(exc))
        return 2
    _emit(poset_gpt(p).to_json())
    return 0


# -- sweeps ---------------------------------------------------------------------


def _verdict(v) -> bool | str:
    return "abstain" if v.verdict is None else v.verdict


def sweep_poset(job: tuple[int, FinitePoset, Sequence[int]]) -> dict:
    """Column, monomorphism and poset criteria on one poset, for each field."""
    index, poset, fields = job
    cat = poset_to_category(poset)
    combinatorial = poset_gpt(poset)
    line = {"instance": index, "poset": poset.to_json(), "poset_criterion": combinatorial.verdict, "fields": {}}
    disagree = False
    seen = set()
    for p in fields:
        column = gpt_closed(cat, p)
        mono = gpt_closed_via_mono(cat, p)
        agrees = column.consistent and column.verdict == combinatorial.verdict
        if mono.verdict is not None:
            agrees = agrees and mono.verdict == column.verdict
        disagree |= not agrees
        seen.add(column.verdict)
        line["fields"][str(p)] = {
            "column": column.verdict,
            "column_witness": column.to_json()["witness"],
            "mono": _verdict(mono),
            "projective_agrees": column.consistent,
        }
    line["field_dependent"] = len(seen) > 1
    line["disagreement"] = disagree
    return line


def sweep_seed(job: tuple[int, Sequence[int], Bounds]) -> dict:
    """Column and monomorphism criteria on one generated category, for each field."""
    seed, fields, bounds = job
    spec = random_spec(seed, bounds)
    cat = generate_category(spec, cap=bounds.max_morphisms)
    free = is_free(cat)
    mono, _ = all_mono(cat)
    line = {"seed": seed, "spec": spec.to_json(), "morphisms": cat.n_morphisms, "free": free, "all_mono": mono, "fields": {}}
    disagree = not free
    seen = set()
    for p in fields:
        projective, _ = is_category_projective(cat, p)
        if not projective:
            line["fields"][str(p)] = {"projective": False, "gpt": "inapplicable"}
            continue
        column = gpt_closed(cat, p)
        via_mono = gpt_closed_via_mono(cat, p)
        agrees = column.consistent and (via_mono.verdict is None or via_mono.verdict == column.verdict)
        disagree |= not agrees
        seen.add(column.verdict)
        line["fields"][str(p)] = {
            "projective": True,
            "column": column.verdict,
            "column_witness": column.to_json()["witness"],
            "mono": _verdict(via_mono),
            "projective_agrees": column.consistent,
        }
    line["field_dependent"] = len(seen) > 1
    line["disagreement"] = disagree
    return line


def _run(fn, jobs: Iterable, workers: int):
    if workers <= 1:
        yield from map(fn, jobs)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(fn, jobs, chunksize=8)


def cmd_sweep(args) -> int:
    if args.posets is not None:
        posets = list(enumerate_posets(args.posets))
        indices = list(range(len(posets)))
        if args.sample is not None and args.sample < len(posets):
            indices = sorted(random.Random(args.sample_seed).sample(indices, args.sample))
        jobs = [(i, posets[i], args.field) for i in indices]
        fn = sweep_poset
    else:
        bounds = Bounds(max_morphisms=args.max_morphisms)
        jobs = [(s, args.field, bounds) for s in range(args.seeds)]
        fn = sweep_seed
    out = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    count = bad = 0
    try:
        for line in _run(fn, jobs, args.jobs):
            out.write(json.dumps(line, separators=(",", ":")) + "\n")
            count += 1
            bad += line["disagreement"]
    finally:
        if args.out:
            out.close()
    print(f"eigproj: {count} instances, {bad} disagreements", file=sys.stderr)
    return 1 if bad else 0


# -- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eigproj", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check the category axioms")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("analyze", help="structural flags and tensor-closedness verdicts")
    p.add_argument("path")
    p.add_argument("--field", type=_fields, default=[2, 3])
    p.add_argument("--audit", action="store_true", help="test every pair p <= q instead of stopping at the first failure")
    p.add_argument("--timing", action="store_true", help="include wall-clock time (makes output nondeterministic)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("gproj", help="Gorenstein-projectivity of a module")
    p.add_argument("category")
    p.add_argument("module")
    p.add_argument("--field", type=_fields)
    p.set_defaults(func=cmd_gproj)

    p = sub.add_parser("tensor", help="pointwise tensor product of two modules")
    p.add_argument("category")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--out")
    p.set_defaults(func=cmd_tensor)

    p = sub.add_parser("column", help="write the column module C_q")
    p.add_argument("category")
    p.add_argument("q", help="1-based position in the admissible order, or an object id")
    p.add_argument("--field", type=_fields, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_column)

    p = sub.add_parser("generate", help="build a free EI category")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--spec")
    g.add_argument("--seed", type=int)
    g.add_argument("--example", choices=sorted(EXAMPLES))
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("poset-gpt", help="combinatorial criterion on a poset file")
    p.add_argument("path")
    p.set_defaults(func=cmd_poset_gpt)

    p = sub.add_parser("sweep", help="cross-check all criteria on a corpus, one JSON line per instance")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--posets", type=int, metavar="N", help="every labelled poset on N elements")
    g.add_argument("--seeds", type=int, metavar="K", help="generated categories for seeds 0..K-1")
    p.add_argument("--field", type=_fields, default=[2, 3])
    p.add_argument("--sample", type=int, help="random subset of this many posets")
    p.add_argument("--sample-seed", type=int, default=0)
    p.add_argument("--max-morphisms", type=int, default=60, help="morphism bound for generated categories")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
