"""JSON documents for groupoids and algebra presentations.

Groupoid document::

    {"p": 2, "ambients": {"W": 3}, "close": false,
     "morphisms": [{"src_ambient": "W", "src_basis": [[1, 0, 0]],
                    "dst_ambient": "W", "dst_basis": [[1, 1, 0]],
                    "matrix": [[1]]}]}

Basis vectors are rows over the ambient's standard basis.  Column j of
``matrix`` holds the coordinates, in ``dst_basis``, of the image of the j-th
vector of ``src_basis``.  Identities are implicit.  With ``close`` true the
listed morphisms are generators and the document denotes their closure.

Presentation document::

    {"n_vars": 3, "terms": [{"generators": ["x2", "x3", "x1*(x1+x2)"],
                             "module_generator": "1"}]}
"""

from __future__ import annotations

import json
import re
from pathlib import Path

from .fp_linalg import Subspace, is_prime
from .groupoid import AmbientFamily, Groupoid, Morphism, Obj, close
from .invariants import AlgebraPresentation, ParseError, parse_poly

__all__ = [
    "DocumentError",
    "dump_json",
    "groupoid_from_doc",
    "groupoid_to_doc",
    "load_groupoid",
    "load_presentation",
    "load_presentation_list",
    "parse_vectors",
    "presentation_from_doc",
    "presentation_to_doc",
]


class DocumentError(ValueError):
    """A malformed document; ``field`` locates the problem."""

    def __init__(self, field: str, message: str, source: str | None = None):
        where = f"{source}: " if source else ""
        super().__init__(f"{where}{field}: {message}")
        self.field = field
        self.message = message
        self.source = source

    def located(self, source: str) -> DocumentError:
        return self if self.source else DocumentError(self.field, self.message, source)


def dump_json(data) -> str:
    """Indented JSON with innermost lists of numbers kept on one line."""
    text = json.dumps(data, indent=2, sort_keys=False)
    return re.sub(r"\[\s*([-\d,\s]*?)\s*\]",
                  lambda m: "[" + ", ".join(x.strip() for x in m.group(1).split(",") if x.strip()) + "]",
                  text) + "\n"


def _read_json(path) -> object:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise DocumentError("<file>", str(exc), str(path)) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"line {exc.lineno} column {exc.colno}", exc.msg, str(path)) from None


def _int(value, field: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise DocumentError(field, f"expected an integer, got {value!r}")
    return value


def _vector(value, n: int, p: int, field: str) -> tuple[int, ...]:
    if not isinstance(value, list) or len(value) != n:
        raise DocumentError(field, f"expected a list of {n} integers")
    return tuple(_int(x, f"{field}[{i}]") % p for i, x in enumerate(value))


def _matrix(value, rows: int, cols: int, p: int, field: str) -> tuple[tuple[int, ...], ...]:
    if not isinstance(value, list) or len(value) != rows:
        raise DocumentError(field, f"expected {rows} rows")
    return tuple(_vector(r, cols, p, f"{field}[{i}]") for i, r in enumerate(value))


def _family(doc: dict) -> tuple[AmbientFamily, dict[str, int]]:
    p = _int(doc.get("p", 2), "p")
    if not is_prime(p):
        raise DocumentError("p", f"{p} is not prime")
    ambients = doc.get("ambients")
    if not isinstance(ambients, dict) or not ambients:
        raise DocumentError("ambients", "expected a non-empty map from names to dimensions")
    names = tuple(ambients)
    dims = tuple(_int(ambients[k], f"ambients.{k}") for k in names)
    if any(d < 0 for d in dims):
        raise DocumentError("ambients", "dimensions must be nonnegative")
    return AmbientFamily(p, dims, names), {k: i for i, k in enumerate(names)}


def _morphism(entry, family: AmbientFamily, index: dict, field: str) -> Morphism:
    if not isinstance(entry, dict):
        raise DocumentError(field, "expected an object")
    p = family.p
    ends = []
    for side in ("src", "dst"):
        name = entry.get(f"{side}_ambient")
        if name not in index:
            raise DocumentError(f"{field}.{side}_ambient", f"unknown ambient {name!r}")
        i = index[name]
        n = family.dims[i]
        basis = entry.get(f"{side}_basis")
        if not isinstance(basis, list):
            raise DocumentError(f"{field}.{side}_basis", "expected a list of row vectors")
        rows = [_vector(v, n, p, f"{field}.{side}_basis[{j}]") for j, v in enumerate(basis)]
        if Subspace.span(rows, n, p).dim != len(rows):
            raise DocumentError(f"{field}.{side}_basis", "vectors are not independent")
        ends.append((i, n, rows))
    (si, sn, srows), (di, dn, drows) = ends
    k = len(srows)
    if len(drows) != k:
        raise DocumentError(field, "source and target have different dimensions")
    mat = _matrix(entry.get("matrix", [] if k == 0 else None), k, k, p, f"{field}.matrix")
    images = [tuple(sum(mat[r][j] * drows[r][c] for r in range(k)) % p for c in range(dn)) for j in range(k)]
    if k == 0:
        return Morphism(Obj(si, Subspace.zero(sn, p)), Obj(di, Subspace.zero(dn, p)), ())
    m = Morphism.from_pairs(si, di, list(zip(srows, images)), sn, dn, p)
    if m is None:
        raise DocumentError(f"{field}.matrix", "matrix is not invertible")
    return m


def groupoid_from_doc(doc, source: str | None = None) -> Groupoid:
    try:
        if not isinstance(doc, dict):
            raise DocumentError("<root>", "expected an object")
        family, index = _family(doc)
        entries = doc.get("morphisms", [])
        if not isinstance(entries, list):
            raise DocumentError("morphisms", "expected a list")
        flag = doc.get("close", False)
        if not isinstance(flag, bool):
            raise DocumentError("close", "expected true or false")
        morphs = [_morphism(e, family, index, f"morphisms[{j}]") for j, e in enumerate(entries)]
    except DocumentError as exc:
        raise (exc.located(source) if source else exc) from None
    morphs += [Morphism.identity(o) for o in family.objects()]
    g = Groupoid(family, morphs)
    return close(g) if flag else g


def groupoid_to_doc(g: Groupoid) -> dict:
    """Canonical document: canonical bases, non-identity morphisms sorted."""
    names = g.family.names
    return {
        "p": g.p,
        "ambients": dict(zip(names, g.family.dims)),
        "close": False,
        "morphisms": [
            {"src_ambient": names[m.src.ambient], "src_basis": [list(r) for r in m.src.space.rows],
             "dst_ambient": names[m.dst.ambient], "dst_basis": [list(r) for r in m.dst.space.rows],
             "matrix": [list(r) for r in m.matrix]}
            for m in g.sorted_morphisms() if not m.is_identity()
        ],
    }


def load_groupoid(path) -> Groupoid:
    return groupoid_from_doc(_read_json(path), str(path))


def _poly(text, n: int, field: str):
    if not isinstance(text, str):
        raise DocumentError(field, "expected a polynomial string")
    try:
        return parse_poly(text, n)
    except ParseError as exc:
        raise DocumentError(field, str(exc)) from None


def presentation_from_doc(doc, field: str = "") -> AlgebraPresentation:
    prefix = f"{field}." if field else ""
    if not isinstance(doc, dict):
        raise DocumentError(field or "<root>", "expected an object")
    n = _int(doc.get("n_vars"), f"{prefix}n_vars")
    terms = doc.get("terms")
    if not isinstance(terms, list) or not terms:
        raise DocumentError(f"{prefix}terms", "expected a non-empty list")
    parsed = []
    for j, t in enumerate(terms):
        where = f"{prefix}terms[{j}]"
        if not isinstance(t, dict) or not isinstance(t.get("generators"), list):
            raise DocumentError(where, "expected {generators: [...], module_generator: ...}")
        gens = tuple(_poly(s, n, f"{where}.generators[{i}]") for i, s in enumerate(t["generators"]))
        parsed.append((gens, _poly(t.get("module_generator", "1"), n, f"{where}.module_generator")))
    try:
        return AlgebraPresentation(n, tuple(parsed))
    except ValueError as exc:
        raise DocumentError(f"{prefix}terms", str(exc)) from None


def presentation_to_doc(pres: AlgebraPresentation) -> dict:
    return {"n_vars": pres.n_vars,
            "terms": [{"generators": gens, "module_generator": mod} for gens, mod in pres.as_strings()]}


def load_presentation(path) -> AlgebraPresentation:
    try:
        return presentation_from_doc(_read_json(path))
    except DocumentError as exc:
        raise exc.located(str(path)) from None


def load_presentation_list(path) -> list[AlgebraPresentation]:
    """A file holding {"n_vars": n, "presentations": [{"terms": [...]}, ...]}."""
    doc = _read_json(path)
    if not isinstance(doc, dict) or not isinstance(doc.get("presentations"), list):
        raise DocumentError("presentations", "expected a list", str(path))
    n = doc.get("n_vars")
    try:
        return [presentation_from_doc({"n_vars": n, **entry}, f"presentations[{j}]")
                for j, entry in enumerate(doc["presentations"])]
    except DocumentError as exc:
        raise exc.located(str(path)) from None


def parse_vectors(text: str, n: int, p: int = 2) -> list[tuple[int, ...]]:
    """Vectors written as "1,0,0;0,1,1"."""
    out = []
    for j, chunk in enumerate(s for s in text.split(";") if s.strip()):
        try:
            vec = tuple(int(x) % p for x in chunk.split(","))
        except ValueError:
            raise DocumentError(f"vector {j}", f"not a comma-separated list of integers: {chunk!r}") from None
        if len(vec) != n:
            raise DocumentError(f"vector {j}", f"expected {n} entries, got {len(vec)}")
        out.append(vec)
    return out
