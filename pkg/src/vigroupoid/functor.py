"""Finite presheaves on coordinate spaces F_p^k.

A table gives, for each k, a finite set of elements, and a transport
``pull(x, alpha)`` moving x in F(k) to F(j) along alpha: F^j -> F^k.  Tables
whose transport accepts only injections model presheaves on VI; full tables
accept every linear map.
"""

from __future__ import annotations

from collections import defaultdict
from functools import lru_cache

from .fp_linalg import (
    LinMap,
    Subspace,
    all_linear_maps,
    all_subspaces,
    enumerate_injections,
    general_linear_group,
    kernel,
    preimage,
    quotient,
)
from .groupoid import (
    AmbientFamily,
    Groupoid,
    Morphism,
    _as_matrices,
    _matmul,
    class_labels,
    compose_matrix,
    validate,
)

__all__ = [
    "FunctorTable",
    "GeneratedFunctor",
    "InvalidGroupoidError",
    "KanExtension",
    "RegularPart",
    "check_functoriality",
    "check_well_defined",
    "element_kernel",
    "export_table",
    "groupoid_of",
    "is_connected",
    "is_minimal",
    "is_noetherian",
    "kan_extend",
    "orbit_functor",
    "quotient_functor",
    "regular_part",
    "same_over_q",
]


class InvalidGroupoidError(ValueError):
    pass


class FunctorTable:
    """Base class: subclasses provide ``elements`` and ``pull``."""

    p: int
    max_dim: int
    full = False

    def elements(self, k: int) -> tuple:
        raise NotImplementedError

    def pull(self, x, alpha: LinMap):
        raise NotImplementedError

    def sizes(self) -> list[int]:
        return [len(self.elements(k)) for k in range(self.max_dim + 1)]


class GeneratedFunctor(FunctorTable):
    """Quotient of the injections into a family of ambients by a labelling q.

    ``labels[k]`` maps (ambient index, matrix) of every injection F^k -> W_i
    to its class label; a label is itself one of the injections in its class.
    """

    def __init__(self, family: AmbientFamily, labels: dict[int, dict]):
        self.family = family
        self.p = family.p
        self.max_dim = max(family.dims)
        self.labels = labels
        self._elements = {k: tuple(sorted(set(lab.values()))) for k, lab in labels.items()}

    def elements(self, k: int) -> tuple:
        return self._elements.get(k, ())

    def label(self, i: int, eps: LinMap):
        return self.labels[eps.domain_dim][(i, eps.matrix)]

    def pull(self, x, alpha: LinMap):
        i, mat = x
        return self.labels[alpha.domain_dim][(i, compose_matrix(mat, alpha))]

    def representative(self, x) -> tuple[int, LinMap]:
        i, mat = x
        k = len(mat[0]) if mat else 0
        return i, LinMap(self.p, k, self.family.dims[i], mat)

    def phi(self, i: int):
        n = self.family.dims[i]
        return self.label(i, LinMap.identity(n, self.p))

    def part(self, i: int, k: int) -> frozenset:
        """F_i(k): the classes of injections into the i-th ambient."""
        return frozenset(lab for (j, _), lab in self.labels.get(k, {}).items() if j == i)


def _labels_from_map(family: AmbientFamily, classify) -> dict[int, dict]:
    return {k: classify(k) for k in range(max(family.dims) + 1)}


def quotient_functor(g: Groupoid, check: bool = True) -> GeneratedFunctor:
    """The functor of injections into the ambients modulo ~_G."""
    if check:
        report = validate(g)
        if not report.ok:
            raise InvalidGroupoidError(str(report.violations[0]))
    return GeneratedFunctor(g.family, _labels_from_map(g.family, lambda k: class_labels(g, k)))


def orbit_functor(group, n: int, p: int = 2) -> GeneratedFunctor:
    """Injections into F_p^n modulo post-composition with a matrix group."""
    mats = _as_matrices(group, n, p)
    family = AmbientFamily.single(n, p)

    def classify(k):
        out = {}
        for eps in enumerate_injections(k, n, p):
            key = (0, eps.matrix)
            if key in out:
                continue
            orbit = {(0, _matmul(g, eps.matrix, p)) for g in mats}
            lab = min(orbit)
            for o in orbit:
                out[o] = lab
        return out

    return GeneratedFunctor(family, _labels_from_map(family, classify))


def groupoid_of(f: GeneratedFunctor) -> Groupoid:
    """Isomorphisms alpha: U -> U' with q(incl_U' ∘ alpha) = q(incl_U)."""
    if not isinstance(f, GeneratedFunctor):
        raise TypeError("groupoid_of needs a functor carrying q-labels")
    family, p = f.family, f.p
    by_label = defaultdict(list)
    objects = family.objects()
    for o in objects:
        by_label[f.label(o.ambient, o.space.inclusion())].append(o)
    morphs = []
    for o in objects:
        k = o.space.dim
        incl = o.space.inclusion()
        for a in general_linear_group(k, p):
            lab = f.label(o.ambient, incl @ a)
            for src in by_label.get(lab, ()):
                if src.space.dim == k:
                    morphs.append(Morphism(src, o, a.matrix))
    return Groupoid(family, morphs)


def same_over_q(f: GeneratedFunctor, g: GeneratedFunctor) -> bool:
    """True when both labellings induce the same partition of every injection set.

    The label bijection is then a class-preserving isomorphism commuting with q,
    and transport agrees because both transports are computed from q.
    """
    if f.family != g.family:
        return False
    for k in range(f.max_dim + 1):
        fwd, back = {}, {}
        lf, lg = f.labels.get(k, {}), g.labels.get(k, {})
        if lf.keys() != lg.keys():
            return False
        for key, a in lf.items():
            b = lg[key]
            if fwd.setdefault(a, b) != b or back.setdefault(b, a) != a:
                return False
    return True


@lru_cache(maxsize=None)
def _kan_factor(u: Subspace, alpha: LinMap) -> tuple[Subspace, LinMap]:
    """Factor pi_U ∘ alpha = tilde ∘ pi_K with K its kernel and tilde injective."""
    _, proj_u, _ = quotient(u.n, u)
    comp = proj_u @ alpha
    k = kernel(comp)
    _, _, sec_k = quotient(alpha.domain_dim, k)
    return k, comp @ sec_k


class KanExtension(FunctorTable):
    """Extension of a VI table to all linear maps, elements tagged by kernels."""

    full = True

    def __init__(self, base: FunctorTable):
        self.base = base
        self.p = base.p
        self.max_dim = base.max_dim
        self._cache: dict[int, tuple] = {}

    def elements(self, k: int) -> tuple:
        if k not in self._cache:
            self._cache[k] = tuple((u, y) for u in all_subspaces(k, self.p)
                                   for y in self.base.elements(k - u.dim))
        return self._cache[k]

    def pull(self, s, alpha: LinMap):
        u, y = s
        k, tilde = _kan_factor(u, alpha)
        return k, self.base.pull(y, tilde)

    def kernel(self, s) -> Subspace:
        return s[0]


def kan_extend(f: FunctorTable) -> KanExtension:
    return KanExtension(f)


def _projection_images(ft: FunctorTable, k: int, u: Subspace) -> frozenset:
    cache = ft.__dict__.setdefault("_projection_images", {})
    key = (k, u)
    if key not in cache:
        _, proj, _ = quotient(k, u)
        cache[key] = frozenset(ft.pull(t, proj) for t in ft.elements(k - u.dim))
    return cache[key]


def element_kernel(ft: FunctorTable, k: int, s, brute_force: bool = False) -> Subspace:
    """Largest U ⊆ F^k such that s comes from F(F^k / U) along the projection."""
    if not brute_force and hasattr(ft, "kernel"):
        return ft.kernel(s)
    if s not in ft.elements(k):
        raise KeyError("element not present in the table")
    hits = [u for u in all_subspaces(k, ft.p) if s in _projection_images(ft, k, u)]
    top = max(hits, key=lambda u: u.dim)
    if not all(u <= top for u in hits):
        raise ValueError("no unique maximal subspace; the table is not noetherian")
    return top


class RegularPart(FunctorTable):
    def __init__(self, ft: FunctorTable, max_dim: int | None = None):
        self.source = ft
        self.p = ft.p
        self.max_dim = ft.max_dim if max_dim is None else max_dim
        self._cache: dict[int, tuple] = {}

    def elements(self, k: int) -> tuple:
        if k > self.max_dim:
            return ()
        if k not in self._cache:
            self._cache[k] = tuple(s for s in self.source.elements(k)
                                   if element_kernel(self.source, k, s).dim == 0)
        return self._cache[k]

    def pull(self, x, alpha: LinMap):
        return self.source.pull(x, alpha)


def regular_part(ft: FunctorTable, max_dim: int | None = None) -> RegularPart:
    return RegularPart(ft, max_dim)


def is_connected(f: FunctorTable) -> bool:
    return len(f.elements(0)) == 1


def is_minimal(f: GeneratedFunctor) -> bool:
    """No F_i is contained in another F_j (checked through phi_i ∈ F_j)."""
    dims = f.family.dims
    for i, ni in enumerate(dims):
        for j in range(len(dims)):
            if i != j and f.phi(i) in f.part(j, ni):
                return False
    return True


def is_noetherian(ft: FunctorTable, d: int | None = None, check_dim: int | None = None) -> bool:
    """Check that kernels are compatible with transport and that every element
    has kernel of codimension at most d.

    Codimensions are checked up to ``check_dim`` (default d + 1), kernel
    compatibility for every linear map between spaces of dimension <= d.
    """
    d = ft.max_dim if d is None else d
    check_dim = d + 1 if check_dim is None else check_dim
    for k in range(check_dim + 1):
        for s in ft.elements(k):
            if k - element_kernel(ft, k, s).dim > d:
                return False
    for k in range(d + 1):
        elems = ft.elements(k)
        kernels = {s: element_kernel(ft, k, s) for s in elems}
        for j in range(d + 1):
            for alpha in all_linear_maps(j, k, ft.p):
                wanted = {u: preimage(alpha, u) for u in set(kernels.values())}
                for s in elems:
                    if element_kernel(ft, j, ft.pull(s, alpha)) != wanted[kernels[s]]:
                        return False
    return True


def check_well_defined(f: GeneratedFunctor) -> bool:
    """Transport of labels agrees with labels of composites, for every injection pair."""
    for k, labs in f.labels.items():
        for j in range(k + 1):
            for alpha in enumerate_injections(j, k, f.p):
                for (i, mat), lab in labs.items():
                    comp = compose_matrix(mat, alpha)
                    if f.labels[j][(i, comp)] != f.pull(lab, alpha):
                        return False
    return True


def check_functoriality(f: FunctorTable, pairs) -> bool:
    """pull(x, beta ∘ alpha) == pull(pull(x, beta), alpha) on the given pairs."""
    for alpha, beta in pairs:
        for x in f.elements(beta.codomain_dim):
            if f.pull(x, beta @ alpha) != f.pull(f.pull(x, beta), alpha):
                return False
    return True


def export_table(f: GeneratedFunctor) -> dict:
    """Per dimension, the canonical representative of every class."""
    names = f.family.names
    return {
        "p": f.p,
        "ambients": dict(zip(names, f.family.dims)),
        "classes": {
            str(k): [{"ambient": names[i], "matrix": [list(r) for r in mat]} for i, mat in f.elements(k)]
            for k in range(f.max_dim + 1)
        },
    }
