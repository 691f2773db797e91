"""Shift functors, the evaluation map rho, centrality and the centre.

Elements of the shifted table at W are pairs (c, b): c an amalgam class in
B(V, W) and b an element of F at the pushout of c, read in the pushout's
canonical coordinates.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass

from .amalgam import AmalgamClass, b_functorial, b_set
from .fp_linalg import (
    LinMap,
    Subspace,
    enumerate_injections,
    general_linear_group,
    image,
    kernel,
    quotient,
)
from .functor import FunctorTable, GeneratedFunctor, KanExtension, groupoid_of
from .groupoid import Groupoid, Morphism

__all__ = [
    "CentralElement",
    "NoWitnessError",
    "NotCentralError",
    "SigmaTable",
    "central_elements",
    "central_join",
    "centre",
    "centre_certificate",
    "criterion_verdicts",
    "is_central_criterion",
    "is_central_definition",
    "join_class",
    "rho",
    "shift_kan_comparison",
    "sigma",
    "sigma_at",
    "witness_families",
    "witnesses",
]


class NoWitnessError(ValueError):
    pass


class NotCentralError(ValueError):
    pass


@dataclass(frozen=True)
class CentralElement:
    v_dim: int
    x: object
    witnesses: tuple = ()


def _cache(f: FunctorTable, name: str) -> dict:
    return f.__dict__.setdefault(name, {})


def _sigma_rows(f: FunctorTable, v: int, w: int) -> list[tuple[AmalgamClass, object, object, object]]:
    """All (c, b, iota_V^* b, iota_W^* b) for c in B(V, W), b in F(pushout)."""
    cache = _cache(f, "_sigma_rows")
    if (v, w) not in cache:
        rows = []
        for c in b_set(v, w, f.p):
            if c.pushout_dim > f.max_dim:
                continue
            iv, iw = c.iota_v, c.iota_w
            for b in f.elements(c.pushout_dim):
                rows.append((c, b, f.pull(b, iv), f.pull(b, iw)))
        cache[(v, w)] = rows
    return cache[(v, w)]


_ALL = object()


class SigmaTable(FunctorTable):
    """The shifted table W -> σ_V F(W), or its fibre over x when x is given."""

    def __init__(self, f: FunctorTable, v_dim: int, x=_ALL):
        if x is not _ALL and x not in f.elements(v_dim):
            raise KeyError("x is not an element of F(V)")
        self.base = f
        self.p = f.p
        self.v_dim = v_dim
        self.x = x
        self.max_dim = f.max_dim
        self._ident = LinMap.identity(v_dim, f.p)

    def elements(self, w: int) -> tuple:
        if w > self.max_dim:
            return ()
        return tuple((c, b) for c, b, xv, _ in _sigma_rows(self.base, self.v_dim, w)
                     if self.x is _ALL or xv == self.x)

    def pull(self, s, beta: LinMap):
        c, b = s
        c2, induced = b_functorial(self._ident, beta, c)
        return c2, self.base.pull(b, induced)


def sigma(f: FunctorTable, v_dim: int) -> SigmaTable:
    return SigmaTable(f, v_dim)


def sigma_at(f: FunctorTable, v_dim: int, x) -> SigmaTable:
    return SigmaTable(f, v_dim, x)


def rho(f: FunctorTable, v_dim: int, x) -> dict[int, dict]:
    """For each w <= d, the map σ_(V,x) F(W) -> F(W), (c, b) -> iota_W^* b."""
    if x not in f.elements(v_dim):
        raise KeyError("x is not an element of F(V)")
    return {w: {(c, b): y for c, b, xv, y in _sigma_rows(f, v_dim, w) if xv == x}
            for w in range(f.max_dim + 1)}


def is_central_definition(f: FunctorTable, v_dim: int, x) -> bool:
    """rho is a bijection onto F(W) for every W of dimension <= d."""
    if len(f.elements(0)) != 1:
        raise ValueError("centrality is defined for connected functors")
    cache = _cache(f, "_central")
    if (v_dim, x) not in cache:
        verdict = True
        for w, table in rho(f, v_dim, x).items():
            if Counter(table.values()) != Counter(f.elements(w)):
                verdict = False
                break
        cache[(v_dim, x)] = verdict
    return cache[(v_dim, x)]


def central_elements(f: FunctorTable) -> list[tuple[int, object]]:
    return [(v, x) for v in range(f.max_dim + 1) for x in f.elements(v)
            if is_central_definition(f, v, x)]


def witnesses(f: GeneratedFunctor, v_dim: int, x) -> tuple:
    """Per ambient, the least injection in the class x (None if there is none)."""
    out = []
    for i, n in enumerate(f.family.dims):
        found = None
        for eps in enumerate_injections(v_dim, n, f.p):
            if f.labels[v_dim][(i, eps.matrix)] == x:
                found = eps
                break
        out.append(found)
    return tuple(out)


def witness_families(f: GeneratedFunctor, v_dim: int, x) -> list[tuple[LinMap, ...]]:
    """Every family (delta_i) of injections with q(delta_i) = x."""
    per_ambient = []
    for i, n in enumerate(f.family.dims):
        per_ambient.append([eps for eps in enumerate_injections(v_dim, n, f.p)
                            if f.labels[v_dim][(i, eps.matrix)] == x])
    return [tuple(fam) for fam in itertools.product(*per_ambient)]


def _transfer_matrices(deltas: tuple[LinMap, ...]):
    """T_ij acting on coordinates of V_i: v -> delta_j(delta_i^{-1}(v))."""
    spaces = [image(d) for d in deltas]
    inverses = []
    for d, s in zip(deltas, spaces):
        coords = LinMap.from_columns([s.coords(c) for c in d.columns], s.dim, d.p)
        inverses.append(coords.inverse() if s.dim else coords)
    transfer = {}
    for i, j in itertools.product(range(len(deltas)), repeat=2):
        transfer[(i, j)] = deltas[j] @ inverses[i] if spaces[i].dim else None
    return spaces, transfer


def is_central_criterion(f: GeneratedFunctor, element: CentralElement,
                         groupoid: Groupoid | None = None) -> bool:
    """The two-condition criterion on the groupoid attached to f."""
    deltas = element.witnesses
    if len(deltas) != len(f.family.dims) or any(d is None for d in deltas):
        raise NoWitnessError("x has no representative in some ambient")
    g = groupoid_of(f) if groupoid is None else groupoid
    p = f.p
    spaces, transfer = _transfer_matrices(deltas)

    def moved(i, j, vec):
        t = transfer[(i, j)]
        return t(spaces[i].coords(vec))

    objects = f.family.objects()
    meets = {o: o.space & spaces[o.ambient] for o in objects}
    for src in objects:
        k = src.space.dim
        meet = meets[src]
        i = src.ambient
        for dst in objects:
            if dst.space.dim != k:
                continue
            j = dst.ambient
            for a in general_linear_group(k, p):
                alpha = Morphism(src, dst, a.matrix)
                inside = alpha in g
                compatible = all(alpha(v) == moved(i, j, v) for v in meet.rows)
                if inside and not compatible:
                    return False
                if not compatible:
                    continue
                pairs = [(u, w) for u, w in zip(src.space.rows, alpha.images())]
                pairs += [(v, moved(i, j, v)) for v in spaces[i].rows]
                bar = Morphism.from_pairs(i, j, pairs, src.space.n, dst.space.n, p)
                if inside != (bar is not None and bar in g):
                    return False
    return True


def criterion_verdicts(f: GeneratedFunctor, v_dim: int, x, groupoid: Groupoid | None = None) -> list[bool]:
    """The criterion evaluated for every witness family of x."""
    g = groupoid_of(f) if groupoid is None else groupoid
    return [is_central_criterion(f, CentralElement(v_dim, x, fam), g)
            for fam in witness_families(f, v_dim, x)]


def _element(f: FunctorTable, v_dim: int, x) -> CentralElement:
    w = witnesses(f, v_dim, x) if isinstance(f, GeneratedFunctor) else ()
    return CentralElement(v_dim, x, w)


def join_class(f: FunctorTable, a: CentralElement, b: CentralElement) -> tuple[AmalgamClass, object]:
    """The unique (c, z) in σ_(V,x) F(T) with iota_T^* z = y."""
    for e in (a, b):
        if not is_central_definition(f, e.v_dim, e.x):
            raise NotCentralError(f"({e.v_dim}, {e.x}) is not central")
    hits = [(c, z) for (c, z), y in rho(f, a.v_dim, a.x)[b.v_dim].items() if y == b.x]
    if len(hits) != 1:
        raise AssertionError("a central element has a non-unique preimage under rho")
    return hits[0]


def central_join(f: FunctorTable, a: CentralElement, b: CentralElement) -> CentralElement:
    c, z = join_class(f, a, b)
    return _element(f, c.pushout_dim, z)


def centre(f: FunctorTable) -> CentralElement:
    """The central element of largest dimension (least element in that dimension)."""
    found = central_elements(f)
    top = max(v for v, _ in found)
    x = min((x for v, x in found if v == top), key=repr)
    if not _factorization_holds(f, top, x, found):
        raise AssertionError("a central element does not factor through the centre")
    return _element(f, top, x)


def _factorization_holds(f: FunctorTable, c_dim: int, c, found) -> bool:
    for v, x in found:
        if not any(f.pull(c, alpha) == x for alpha in enumerate_injections(v, c_dim, f.p)):
            return False
    return True


def centre_certificate(f: FunctorTable) -> dict:
    """Centre plus the checks backing it."""
    found = central_elements(f)
    c = centre(f)
    orbit = {f.pull(c.x, a) for a in general_linear_group(c.v_dim, f.p)}
    return {
        "centre": c,
        "central_counts": [sum(1 for v, _ in found if v == k) for k in range(f.max_dim + 1)],
        "factorization": _factorization_holds(f, c.v_dim, c.x, found),
        "unique_up_to_iso": all(x in orbit for v, x in found if v == c.v_dim),
    }


def shift_kan_comparison(f: FunctorTable, v_dim: int, x, w_dim: int) -> bool:
    """Compare the Kan extension of σ_(V,x)F with the fibre of F~(V ⊕ W) over x at W.

    An element (U, (c, b)) on the left is sent to the element of F~(V ⊕ W)
    with kernel H = ker(V ⊕ W -> V ⊕ W/U -> P_c) carrying b read through the
    induced isomorphism (V ⊕ W)/H = P_c.  The check asserts this assignment
    is injective with image exactly the fibre.
    """
    p = f.p
    left = KanExtension(sigma_at(f, v_dim, x))
    right = KanExtension(f)
    n = v_dim + w_dim
    sent = []
    for u, (c, b) in left.elements(w_dim):
        _, proj_u, _ = quotient(w_dim, u)
        total = LinMap.from_columns(
            c.iota_v.columns + tuple(c.iota_w(proj_u(col)) for col in LinMap.identity(w_dim, p).columns),
            c.pushout_dim, p)
        h = kernel(total)
        _, _, sec_h = quotient(n, h)
        sent.append((h, f.pull(b, total @ sec_h)))
    include_v = LinMap.from_columns([tuple(int(i == j) for i in range(n)) for j in range(v_dim)], n, p)
    fibre = [s for s in right.elements(n) if right.pull(s, include_v) == (Subspace.zero(v_dim, p), x)]
    return len(set(sent)) == len(sent) and set(sent) == set(fibre)
