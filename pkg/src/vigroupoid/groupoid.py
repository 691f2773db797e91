"""Groupoids of linear isomorphisms between subspaces of a family of ambients.

A morphism is stored as (source object, target object, matrix) where an
object is (ambient index, Subspace) and the matrix is written in the canonical
RREF bases of the two subspaces: column j holds the coordinates of the image
of the j-th source basis vector.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, NamedTuple

from .fp_linalg import (
    LinMap,
    Matrix,
    Subspace,
    all_subspaces,
    enumerate_injections,
    general_linear_group,
    image,
    iso_matrix,
    map_from_pairs,
    restrict,
    subspaces_of,
)

__all__ = [
    "AmbientFamily",
    "Groupoid",
    "Morphism",
    "NotASubgroupError",
    "Obj",
    "ValidationReport",
    "Violation",
    "close",
    "compose_matrix",
    "fixed_space",
    "from_group",
    "generate_group",
    "gl_action",
    "sim_classes",
    "class_labels",
    "subgroups",
    "validate",
]


class NotASubgroupError(ValueError):
    pass


@lru_cache(maxsize=1 << 20)
def _matmul(a: Matrix, b: Matrix, p: int) -> Matrix:
    if not b:
        return tuple(() for _ in a)
    cols = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(r, c)) % p for c in cols) for r in a)


def compose_matrix(mat: Matrix, alpha: LinMap) -> Matrix:
    """mat ∘ alpha for a matrix mat whose column count is alpha.codomain_dim."""
    if not alpha.codomain_dim:
        return tuple((0,) * alpha.domain_dim for _ in mat)
    return _matmul(mat, alpha.matrix, alpha.p)


def _matvec(a: Matrix, v, p: int):
    return tuple(sum(x * y for x, y in zip(r, v)) % p for r in a)


@dataclass(frozen=True)
class AmbientFamily:
    p: int
    dims: tuple[int, ...]
    names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not self.dims:
            raise ValueError("an ambient family needs at least one space")
        if any(d < 0 for d in self.dims):
            raise ValueError("negative ambient dimension")
        if not self.names:
            names = ("W",) if len(self.dims) == 1 else tuple(f"W{i + 1}" for i in range(len(self.dims)))
            object.__setattr__(self, "names", names)
        if len(self.names) != len(self.dims) or len(set(self.names)) != len(self.names):
            raise ValueError("ambient names must be distinct, one per ambient")

    @classmethod
    def single(cls, n: int, p: int = 2, name: str = "W") -> AmbientFamily:
        return cls(p, (n,), (name,))

    def objects(self) -> list[Obj]:
        return [Obj(i, u) for i, n in enumerate(self.dims) for u in all_subspaces(n, self.p)]


class Obj(NamedTuple):
    ambient: int
    space: Subspace

    def sort_key(self):
        return (self.ambient, self.space.dim, self.space.rows)


class Morphism(NamedTuple):
    src: Obj
    dst: Obj
    matrix: Matrix

    @property
    def p(self) -> int:
        return self.src.space.p

    @property
    def dim(self) -> int:
        return self.src.space.dim

    @classmethod
    def identity(cls, obj: Obj) -> Morphism:
        k = obj.space.dim
        return cls(obj, obj, tuple(tuple(int(i == j) for j in range(k)) for i in range(k)))

    @classmethod
    def from_pairs(cls, src_ambient: int, dst_ambient: int, pairs, n_src: int, n_dst: int, p: int = 2):
        """Iso determined by (v, image) pairs, or None if not a well-defined iso."""
        found = map_from_pairs(pairs, n_src, n_dst, p)
        if found is None:
            return None
        src, images = found
        dst = Subspace.span(images, n_dst, p)
        if dst.dim != src.dim:
            return None
        return cls(Obj(src_ambient, src), Obj(dst_ambient, dst), iso_matrix(dst, images))

    def is_identity(self) -> bool:
        return self.src == self.dst and all(
            x == (i == j) for i, r in enumerate(self.matrix) for j, x in enumerate(r))

    def images(self) -> tuple[tuple[int, ...], ...]:
        """Images of the source basis vectors, in ambient coordinates."""
        dst = self.dst.space
        k = self.dim
        return tuple(dst.combine([self.matrix[r][j] for r in range(k)]) for j in range(k))

    def __call__(self, v):
        """Apply to a vector of the source subspace (ambient coordinates)."""
        src, dst = self.src.space, self.dst.space
        return dst.combine(_matvec(self.matrix, src.coords(v), self.p))

    def inverse(self) -> Morphism:
        k = self.dim
        inv = LinMap(self.p, k, k, self.matrix).inverse().matrix if k else ()
        return Morphism(self.dst, self.src, inv)

    def __matmul__(self, first: Morphism) -> Morphism:
        """Composition self ∘ first."""
        if first.dst != self.src:
            raise ValueError("morphisms are not composable")
        return Morphism(first.src, self.dst, _matmul(self.matrix, first.matrix, self.p))

    def restrict(self, m: Subspace) -> Morphism:
        target, mat = restrict(self.src.space, self.dst.space, self.matrix, m)
        return Morphism(Obj(self.src.ambient, m), Obj(self.dst.ambient, target), mat)

    def ambient_map(self) -> LinMap:
        """The composite F^k -> U' -> W_j, i.e. the inclusion of U' after the matrix."""
        k = self.dim
        return LinMap.from_columns(self.images(), self.dst.space.n, self.p) if k else \
            LinMap.zero(0, self.dst.space.n, self.p)

    def sort_key(self):
        return (self.src.sort_key(), self.dst.sort_key(), self.matrix)


class Groupoid:
    """A (possibly partial) set of morphisms over an ambient family."""

    def __init__(self, family: AmbientFamily, morphisms: Iterable[Morphism] = ()):
        self.family = family
        hom: dict[tuple[Obj, Obj], set] = defaultdict(set)
        for m in morphisms:
            if m.src.space.dim != m.dst.space.dim:
                raise ValueError(f"morphism between subspaces of different dimension: {m}")
            for o in (m.src, m.dst):
                if not 0 <= o.ambient < len(family.dims) or o.space.n != family.dims[o.ambient]:
                    raise ValueError(f"object {o} is not a subspace of the ambient family")
            hom[(m.src, m.dst)].add(m.matrix)
        self._hom = {k: frozenset(v) for k, v in hom.items()}
        self._key = None

    @classmethod
    def identities(cls, family: AmbientFamily) -> Groupoid:
        return cls(family, (Morphism.identity(o) for o in family.objects()))

    @property
    def p(self) -> int:
        return self.family.p

    def hom(self, src: Obj, dst: Obj) -> frozenset:
        return self._hom.get((src, dst), frozenset())

    def pairs(self):
        return self._hom.keys()

    def morphisms(self) -> Iterable[Morphism]:
        for (s, t), mats in self._hom.items():
            for a in mats:
                yield Morphism(s, t, a)

    def sorted_morphisms(self) -> list[Morphism]:
        return sorted(self.morphisms(), key=Morphism.sort_key)

    def out_of(self, src: Obj) -> list[Morphism]:
        return [Morphism(s, t, a) for (s, t), mats in self._hom.items() if s == src for a in mats]

    def __contains__(self, m: Morphism) -> bool:
        return m.matrix in self._hom.get((m.src, m.dst), ())

    def __len__(self) -> int:
        return sum(len(v) for v in self._hom.values())

    def key(self) -> tuple:
        """Canonical serialization used for equality, hashing and ordering."""
        if self._key is None:
            self._key = (self.family.p, self.family.dims, tuple(
                (s.ambient, s.space.rows, t.ambient, t.space.rows, a)
                for s, t, a in self.sorted_morphisms()))
        return self._key

    def __eq__(self, other) -> bool:
        if not isinstance(other, Groupoid):
            return NotImplemented
        return self.family == other.family and self._hom == other._hom

    def __hash__(self) -> int:
        return hash(self.key())

    def __le__(self, other: Groupoid) -> bool:
        return all(m in other for m in self.morphisms())

    def __repr__(self) -> str:
        return f"Groupoid(dims={self.family.dims}, p={self.p}, morphisms={len(self)})"

    def automorphisms(self, n_ambient: int = 0) -> list[LinMap]:
        """The group G(W_i, W_i) as linear maps."""
        n = self.family.dims[n_ambient]
        whole = Obj(n_ambient, Subspace.full(n, self.p))
        return [LinMap(self.p, n, n, a) for a in sorted(self.hom(whole, whole))]


@dataclass
class Violation:
    clause: str
    morphism: Morphism | None
    detail: str

    def __str__(self) -> str:
        return f"{self.clause}: {self.detail}"


@dataclass
class ValidationReport:
    violations: list[Violation]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def _describe(m: Morphism) -> str:
    return (f"{list(map(list, m.src.space.rows))}@{m.src.ambient} -> "
            f"{list(map(list, m.dst.space.rows))}@{m.dst.ambient} by {list(map(list, m.matrix))}")


def validate(g: Groupoid) -> ValidationReport:
    out: list[Violation] = []
    by_src = defaultdict(list)
    morphs = list(g.morphisms())
    for m in morphs:
        by_src[m.src].append(m)
    for o in g.family.objects():
        if Morphism.identity(o) not in g:
            out.append(Violation("identity", None, f"no identity on {list(map(list, o.space.rows))}@{o.ambient}"))
    for m in morphs:
        if m.src.space.dim != m.dst.space.dim:
            out.append(Violation("dimension", m, _describe(m)))
            continue
        if LinMap(g.p, m.dim, m.dim, m.matrix).rank() != m.dim:
            out.append(Violation("not-iso", m, _describe(m)))
            continue
        if m.inverse() not in g:
            out.append(Violation("inverse", m, f"inverse of {_describe(m)} missing"))
        for n in by_src[m.dst]:
            c = n @ m
            if c not in g:
                out.append(Violation("composition", m, f"{_describe(n)} after {_describe(m)} gives missing {_describe(c)}"))
        for sub in subspaces_of(m.src.space):
            if sub.dim == m.dim:
                continue
            r = m.restrict(sub)
            if r not in g:
                out.append(Violation("restriction", m, f"restriction of {_describe(m)} to "
                                     f"{list(map(list, sub.rows))} missing: {_describe(r)}"))
    return ValidationReport(out)


def close(g: Groupoid | Iterable[Morphism], family: AmbientFamily | None = None) -> Groupoid:
    """Smallest groupoid with the restriction property containing the generators."""
    if isinstance(g, Groupoid):
        family = g.family
        gens = list(g.morphisms())
    else:
        gens = list(g)
        if family is None:
            raise ValueError("a family is needed when closing a bare list of morphisms")
    seen: set[Morphism] = set()
    by_src: dict[Obj, list[Morphism]] = defaultdict(list)
    by_dst: dict[Obj, list[Morphism]] = defaultdict(list)
    work = [Morphism.identity(o) for o in family.objects()] + gens
    while work:
        m = work.pop()
        if m in seen:
            continue
        seen.add(m)
        by_src[m.src].append(m)
        by_dst[m.dst].append(m)
        work.append(m.inverse())
        for sub in subspaces_of(m.src.space):
            if sub.dim < m.dim:
                work.append(m.restrict(sub))
        for n in by_src[m.dst]:
            work.append(n @ m)
        for n in by_dst[m.src]:
            work.append(m @ n)
    return Groupoid(family, seen)


def generate_group(gens: Iterable[LinMap], n: int, p: int = 2) -> frozenset[Matrix]:
    """The matrix group generated by ``gens``."""
    eye = LinMap.identity(n, p)
    group = {eye.matrix}
    frontier = [eye.matrix]
    gens = [g.matrix if isinstance(g, LinMap) else tuple(map(tuple, g)) for g in gens]
    while frontier:
        new = []
        for a in frontier:
            for b in gens:
                c = _matmul(a, b, p)
                if c not in group:
                    group.add(c)
                    new.append(c)
        frontier = new
    return frozenset(group)


def _as_matrices(group, n: int, p: int) -> frozenset[Matrix]:
    out = set()
    for g in group:
        m = g.matrix if isinstance(g, LinMap) else tuple(tuple(int(x) % p for x in r) for r in g)
        if len(m) != n or any(len(r) != n for r in m):
            raise ValueError("group elements must be n x n matrices")
        out.add(m)
    return frozenset(out)


def from_group(group, n: int, p: int = 2) -> Groupoid:
    """The groupoid of all restrictions g|_U of the elements of a matrix group."""
    mats = _as_matrices(group, n, p)
    eye = LinMap.identity(n, p).matrix
    if eye not in mats:
        raise NotASubgroupError("identity missing")
    for a in mats:
        if LinMap(p, n, n, a).rank() != n:
            raise NotASubgroupError("non-invertible element")
        for b in mats:
            if _matmul(a, b, p) not in mats:
                raise NotASubgroupError("not closed under products")
    family = AmbientFamily.single(n, p)
    whole = Obj(0, Subspace.full(n, p))
    morphs = []
    for a in mats:
        g = Morphism(whole, whole, a)
        morphs.extend(g.restrict(u) for u in all_subspaces(n, p))
    return Groupoid(family, morphs)


def fixed_space(group, n: int, p: int = 2) -> Subspace:
    """{v : g v = v for all g}."""
    from .fp_linalg import kernel
    rows = []
    for a in _as_matrices(group, n, p):
        rows.extend(tuple((x - (i == j)) % p for j, x in enumerate(r)) for i, r in enumerate(a))
    if not rows:
        return Subspace.full(n, p)
    return kernel(LinMap(p, n, len(rows), tuple(rows)))


def subgroups(n: int, p: int = 2) -> list[frozenset[Matrix]]:
    """Subgroups of GL_n(F_p) generated by at most two elements.

    For GL_2(F_2) these are all six subgroups.
    """
    gl = general_linear_group(n, p)
    found = {generate_group([], n, p)}
    for a in gl:
        found.add(generate_group([a], n, p))
    for a, b in itertools.combinations(gl, 2):
        found.add(generate_group([a, b], n, p))
    return sorted(found, key=lambda s: (len(s), sorted(s)))


def gl_action(g: LinMap, groupoid: Groupoid) -> Groupoid:
    """Transport every morphism along g: beta = g ∘ alpha ∘ g^{-1}."""
    if len(groupoid.family.dims) != 1:
        raise ValueError("the linear action is defined on a single ambient")
    n, p = groupoid.family.dims[0], groupoid.p
    if g.domain_dim != n or g.codomain_dim != n or g.rank() != n:
        raise ValueError("g must be an invertible n x n matrix")
    out = []
    for m in groupoid.morphisms():
        pairs = [(g(u), g(w)) for u, w in zip(m.src.space.rows, m.images())]
        moved = Morphism.from_pairs(0, 0, pairs, n, n, p) if pairs else Morphism.identity(Obj(0, Subspace.zero(n, p)))
        out.append(moved)
    return Groupoid(groupoid.family, out)


def class_labels(groupoid: Groupoid, k: int) -> dict[tuple[int, Matrix], tuple[int, Matrix]]:
    """Map each injection F^k -> W_i, keyed (i, matrix), to its class label.

    The label is the lexicographically least (ambient, matrix) in the class.
    """
    p = groupoid.p
    out_of = defaultdict(list)
    for m in groupoid.morphisms():
        if m.dim == k:
            out_of[m.src].append(m)
    labels: dict = {}
    for i, n in enumerate(groupoid.family.dims):
        for eps in enumerate_injections(k, n, p):
            key = (i, eps.matrix)
            if key in labels:
                continue
            u = image(eps)
            z = [u.coords(c) for c in eps.columns]
            orbit = {key}
            for m in out_of[Obj(i, u)]:
                cols = [m.dst.space.combine(_matvec(m.matrix, c, p)) for c in z]
                rows = tuple(tuple(c[r] for c in cols) for r in range(m.dst.space.n))
                orbit.add((m.dst.ambient, rows))
            label = min(orbit)
            for member in orbit:
                labels[member] = label
    return labels


def sim_classes(groupoid: Groupoid, v_dim: int) -> list[tuple[tuple[int, LinMap], ...]]:
    """Partition of the injections F^v -> W_i into classes of the relation ~_G."""
    p = groupoid.p
    classes = defaultdict(list)
    for (i, mat), label in class_labels(groupoid, v_dim).items():
        n = groupoid.family.dims[i]
        classes[label].append((i, LinMap(p, v_dim, n, mat)))
    return [tuple(sorted(classes[lab], key=lambda t: (t[0], t[1].matrix))) for lab in sorted(classes)]
