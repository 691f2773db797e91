"""Command-line interface.

Exit status: 0 on success, 1 when the input is well formed but the requested
computation fails or reports a negative verdict, 2 on malformed input.
Vectors on the command line are written "1,0,0;0,1,0" (rows, ';'-separated).
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from . import __version__
from .centre import (
    NoWitnessError,
    NotCentralError,
    centre_certificate,
    criterion_verdicts,
    is_central_definition,
    witness_families,
)
from .documents import (
    DocumentError,
    dump_json,
    groupoid_to_doc,
    load_groupoid,
    load_presentation,
    parse_vectors,
)
from .enumeration import conjugacy_reduce, enumerate_constrained
from .fp_linalg import EnumerationLimitError, LinMap, all_subspaces, general_linear_group
from .functor import InvalidGroupoidError, export_table, groupoid_of, quotient_functor, same_over_q
from .groupoid import AmbientFamily, Groupoid, Morphism, Obj, close, validate
from .invariants import ParseError, invariant_basis, presentation_basis
from .primitive import PrimitiveSetup, lift_witness, primitive_groupoid, regular_matches_primitive

EXIT_OK, EXIT_DOMAIN, EXIT_PARSE = 0, 1, 2


class DomainFailure(Exception):
    """A computed negative verdict; carries the payload to print."""

    def __init__(self, payload: dict):
        super().__init__(payload.get("error", "negative verdict"))
        self.payload = payload


def _matrix_json(mat) -> list:
    return [list(r) for r in mat]


def _label_json(f, x) -> dict:
    i, mat = x
    return {"ambient": f.family.names[i], "matrix": _matrix_json(mat)}


def _render_text(data, prefix: str = "") -> list[str]:
    """Flatten to ``path: value`` lines; leaves are written as JSON."""
    lines = []
    if isinstance(data, dict):
        for k, v in data.items():
            lines += _render_text(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(data, list) and any(isinstance(v, (dict, list)) for v in data) and \
            not all(isinstance(v, list) and all(isinstance(e, int) for e in v) for v in data):
        if not data:
            lines.append(f"{prefix}: []")
        for j, v in enumerate(data):
            lines += _render_text(v, f"{prefix}[{j}]")
    else:
        lines.append(f"{prefix}: {json.dumps(data)}")
    return lines


def _emit(data: dict, fmt: str, out=None) -> None:
    out = out or sys.stdout
    if fmt == "json":
        out.write(dump_json(data))
    else:
        out.write("\n".join(_render_text(data)) + "\n")


def _write(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _single(g: Groupoid) -> int:
    if len(g.family.dims) != 1:
        raise ValueError("this command needs a document with a single ambient")
    return g.family.dims[0]


def _injection(text: str, n: int, p: int) -> LinMap:
    vectors = parse_vectors(text, n, p)
    eps = LinMap.from_columns(vectors, n, p)
    if not eps.is_injective():
        raise DocumentError("basis", "vectors are not independent")
    return eps


def cmd_validate(args) -> dict:
    g = load_groupoid(args.document)
    report = validate(g)
    data = {"ok": report.ok, "morphisms": len(g),
            "violations": [{"clause": v.clause, "detail": v.detail} for v in report.violations]}
    if not report.ok:
        raise DomainFailure(data)
    return data


def cmd_close(args) -> None:
    g = close(load_groupoid(args.document))
    _write(args.output, dump_json(groupoid_to_doc(g)))


def cmd_functor(args) -> dict:
    g = load_groupoid(args.document)
    f = quotient_functor(g)
    table = export_table(f)
    top = f.max_dim if args.max_dim is None else min(args.max_dim, f.max_dim)
    table["classes"] = {k: v for k, v in table["classes"].items() if int(k) <= top}
    table["sizes"] = f.sizes()[:top + 1]
    table["round_trip"] = groupoid_of(f) == g and same_over_q(f, quotient_functor(groupoid_of(f)))
    return table


def cmd_centre(args) -> dict:
    g = load_groupoid(args.document)
    f = quotient_functor(g)
    cert = centre_certificate(f)
    c = cert["centre"]
    return {
        "dimension": c.v_dim,
        "class": _label_json(f, c.x),
        "witnesses": [None if w is None else _matrix_json(w.matrix) for w in c.witnesses],
        "central_counts": cert["central_counts"],
        "factorization": cert["factorization"],
        "unique_up_to_iso": cert["unique_up_to_iso"],
    }


def cmd_is_central(args) -> dict:
    g = load_groupoid(args.document)
    f = quotient_functor(g)
    names = list(g.family.names)
    if args.ambient not in names:
        raise DocumentError("--ambient", f"unknown ambient {args.ambient!r}")
    i = names.index(args.ambient)
    eps = _injection(args.v_basis, g.family.dims[i], g.p)
    x = f.label(i, eps)
    by_definition = is_central_definition(f, eps.domain_dim, x)
    families = witness_families(f, eps.domain_dim, x)
    # no witness family exists when some ambient has no injection in the class
    verdicts = criterion_verdicts(f, eps.domain_dim, x, g) if families else []
    data = {
        "class": _label_json(f, x),
        "central_by_definition": by_definition,
        "witness_families": len(families),
        "central_by_criterion": sorted(set(verdicts)) if verdicts else None,
        "algorithms_agree": all(v == by_definition for v in verdicts) if verdicts else None,
    }
    if not by_definition:
        raise DomainFailure(data)
    return data


def cmd_primitive(args) -> dict:
    g = load_groupoid(args.document)
    n = _single(g)
    delta = _injection(args.delta, n, g.p)
    s = PrimitiveSetup(g, delta)
    target = primitive_groupoid(s)
    if args.output:
        Path(args.output).write_text(dump_json(groupoid_to_doc(target)))
    witnesses = []
    for alpha in target.sorted_morphisms():
        if alpha.is_identity():
            continue
        _, _, beta = lift_witness(s, alpha)
        witnesses.append({"descended": {"src": _matrix_json(alpha.src.space.rows),
                                        "dst": _matrix_json(alpha.dst.space.rows),
                                        "matrix": _matrix_json(alpha.matrix)},
                          "lift": {"src": _matrix_json(beta.src.space.rows),
                                   "dst": _matrix_json(beta.dst.space.rows),
                                   "matrix": _matrix_json(beta.matrix)}})
    data = {"quotient_dim": s.q_dim, "morphisms": len(target), "witnesses": witnesses}
    if args.check:
        data["pushout_regular_part_agrees"] = regular_matches_primitive(s, target=target)
    if not args.output:
        data["groupoid"] = groupoid_to_doc(target)
    return data


def cmd_invariants(args) -> dict:
    g = load_groupoid(args.document)
    _single(g)
    dims = [invariant_basis(g, d).dim for d in range(args.degree + 1)]
    data = {"degrees": list(range(args.degree + 1)), "dimensions": dims}
    if args.presentation:
        pres = load_presentation(args.presentation)
        if pres.n_vars != g.family.dims[0]:
            raise DocumentError("n_vars", "presentation and groupoid use different numbers of variables")
        presented = [presentation_basis(pres, d) for d in range(args.degree + 1)]
        equal = [invariant_basis(g, d) == b for d, b in enumerate(presented)]
        data["presented_dimensions"] = [b.dim for b in presented]
        data["verified"] = all(equal)
        if not all(equal):
            data["first_mismatch"] = equal.index(False)
            raise DomainFailure(data)
    return data


def cmd_enumerate(args) -> dict:
    n = args.ambient
    target = load_groupoid(args.target)
    delta = _injection(args.delta, n, target.p)
    if _single(target) != n - delta.domain_dim:
        raise DocumentError("--target", f"target must live on a space of dimension {n - delta.domain_dim}")
    found = enumerate_constrained(n, delta, target, exhaustive=args.exhaustive)
    reps, rep_of = conjugacy_reduce(found, n)
    out = Path(args.out) if args.out else None
    if out:
        out.mkdir(parents=True, exist_ok=True)
    entries = []
    for j, g in enumerate(found):
        name = f"groupoid_{j + 1:02d}.json"
        if out:
            (out / name).write_text(dump_json(groupoid_to_doc(g)))
        f = quotient_functor(g)
        s = PrimitiveSetup(g, delta, f)
        c = centre_certificate(f)["centre"]
        verdicts = criterion_verdicts(f, delta.domain_dim, f.label(0, delta), g)
        entries.append({
            "file": name,
            "morphisms": len(g),
            "centre_dimension": c.v_dim,
            "centre_class": _label_json(f, c.x),
            "delta_central_by_definition": True,
            "delta_central_by_criterion": all(verdicts),
            "primitive_matches_target": primitive_groupoid(s) == target,
            "orbit_representative": f"groupoid_{rep_of[j] + 1:02d}.json",
        })
    manifest = {"ambient_dim": n, "delta": _matrix_json(delta.matrix), "count": len(found),
                "orbits": len(reps), "groupoids": entries}
    if out:
        (out / "manifest.json").write_text(dump_json(manifest))
    return manifest


def cmd_selfcheck(args) -> dict:
    """Seeded random round trips on closed groupoids and centrality agreement."""
    rng = random.Random(args.seed)
    failures = []
    for t in range(args.samples):
        n = rng.choice((2, 3))
        family = AmbientFamily.single(n)
        spaces = [u for u in all_subspaces(n) if u.dim]
        gens = []
        for _ in range(rng.randint(1, 3)):
            src = rng.choice(spaces)
            dst = rng.choice([u for u in spaces if u.dim == src.dim])
            a = rng.choice(general_linear_group(src.dim))
            gens.append(Morphism(Obj(0, src), Obj(0, dst), a.matrix))
        g = close(gens, family)
        f = quotient_functor(g)
        if groupoid_of(f) != g or not same_over_q(f, quotient_functor(groupoid_of(f))):
            failures.append({"sample": t, "check": "round_trip"})
            continue
        for v in range(n + 1):
            for x in f.elements(v):
                verdicts = criterion_verdicts(f, v, x, g)
                if any(b != is_central_definition(f, v, x) for b in verdicts):
                    failures.append({"sample": t, "check": "centrality", "v_dim": v})
    data = {"seed": args.seed, "samples": args.samples, "failures": failures}
    if failures:
        raise DomainFailure(data)
    return data


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vigroupoid", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--format", choices=("json", "text"), default="text")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check the groupoid axioms")
    p.add_argument("document")
    p.set_defaults(run=cmd_validate)

    p = sub.add_parser("close", help="close under inverse, composition and restriction")
    p.add_argument("document")
    p.add_argument("-o", "--output")
    p.set_defaults(run=cmd_close)

    p = sub.add_parser("functor", help="class tables of the quotient functor")
    p.add_argument("document")
    p.add_argument("--max-dim", type=int)
    p.set_defaults(run=cmd_functor)

    p = sub.add_parser("centre", help="centre of the quotient functor")
    p.add_argument("document")
    p.set_defaults(run=cmd_centre)

    p = sub.add_parser("is-central", help="centrality of the class of an injection")
    p.add_argument("document")
    p.add_argument("--v-basis", required=True, help="columns of the injection, e.g. '1,0,0'")
    p.add_argument("--ambient", default="W")
    p.set_defaults(run=cmd_is_central)

    p = sub.add_parser("primitive", help="groupoid on W / Im(delta)")
    p.add_argument("document")
    p.add_argument("--delta", required=True)
    p.add_argument("-o", "--output")
    p.add_argument("--check", action="store_true", help="compare with the pushout functor")
    p.set_defaults(run=cmd_primitive)

    p = sub.add_parser("invariants", help="dimensions of invariant polynomials (p = 2)")
    p.add_argument("document")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--presentation")
    p.set_defaults(run=cmd_invariants)

    p = sub.add_parser("enumerate", help="groupoids with a central line and given quotient groupoid")
    p.add_argument("--ambient", type=int, required=True)
    p.add_argument("--delta", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--out")
    p.add_argument("--exhaustive", action="store_true")
    p.set_defaults(run=cmd_enumerate)

    p = sub.add_parser("selfcheck", help="seeded random consistency checks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=20)
    p.set_defaults(run=cmd_selfcheck)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        data = args.run(args)
    except (DocumentError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DomainFailure as exc:
        _emit(exc.payload, args.format)
        return EXIT_DOMAIN
    except (InvalidGroupoidError, NotCentralError, NoWitnessError, EnumerationLimitError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    if data is not None:
        _emit(data, args.format)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
