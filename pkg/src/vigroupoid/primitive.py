"""Groupoids on W / Im(delta) descending from a groupoid with delta central.

Two independent routes are provided: the direct formula over complements of
Im(delta), and the set-level pushout of the maps into W, glued along the
projection.  Their regular parts must agree.
"""

from __future__ import annotations

from collections import defaultdict, deque

from .centre import NotCentralError, is_central_definition
from .fp_linalg import (
    LinMap,
    Subspace,
    all_linear_maps,
    enumerate_injections,
    image,
    kernel,
    quotient,
)
from .functor import FunctorTable, GeneratedFunctor, element_kernel, quotient_functor
from .groupoid import AmbientFamily, Groupoid, Morphism, Obj, compose_matrix

__all__ = [
    "PrimitiveSetup",
    "PushoutFunctor",
    "lift_witness",
    "primitive_groupoid",
    "pushout_functor",
    "regular_matches_primitive",
]


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


class PrimitiveSetup:
    """A groupoid on a single ambient W with an injection delta: V -> W whose class is central."""

    def __init__(self, groupoid: Groupoid, delta: LinMap, functor: GeneratedFunctor | None = None):
        if len(groupoid.family.dims) != 1:
            raise ValueError("a single ambient is required")
        n = groupoid.family.dims[0]
        if delta.codomain_dim != n or not delta.is_injective():
            raise ValueError("delta must be an injection into the ambient")
        self.groupoid = groupoid
        self.delta = delta
        self.functor = quotient_functor(groupoid) if functor is None else functor
        x = self.functor.label(0, delta)
        if not is_central_definition(self.functor, delta.domain_dim, x):
            raise NotCentralError("the class of delta is not central")
        self.p = groupoid.p
        self.n = n
        self.centre_space = image(delta)
        self.q_dim, self.projection, self.section = quotient(n, self.centre_space)

    def _transverse(self, u: Subspace) -> bool:
        return not (u & self.centre_space).dim

    def descend(self, beta: Morphism) -> Morphism | None:
        """pi ∘ beta ∘ (pi|_N)^{-1} when N and beta(N) meet Im(delta) trivially."""
        if not (self._transverse(beta.src.space) and self._transverse(beta.dst.space)):
            return None
        pi = self.projection
        pairs = [(pi(u), pi(w)) for u, w in zip(beta.src.space.rows, beta.images())]
        return Morphism.from_pairs(0, 0, pairs, self.q_dim, self.q_dim, self.p) if pairs else \
            Morphism.identity(Obj(0, Subspace.zero(self.q_dim, self.p)))


def primitive_groupoid(s: PrimitiveSetup) -> Groupoid:
    family = AmbientFamily.single(s.q_dim, s.p)
    found = set()
    for beta in s.groupoid.morphisms():
        alpha = s.descend(beta)
        if alpha is not None:
            found.add(alpha)
    return Groupoid(family, found)


def lift_witness(s: PrimitiveSetup, alpha: Morphism):
    """Some (N, N', beta) with beta in G(N, N') descending to alpha, else None."""
    for beta in sorted(s.groupoid.morphisms(), key=Morphism.sort_key):
        if beta.dim == alpha.dim and s.descend(beta) == alpha:
            return beta.src.space, beta.dst.space, beta
    return None


class PushoutFunctor(FunctorTable):
    """Maps F^k -> W up to the relations generated by equal classes in the
    extended quotient functor and by equal composites with the projection."""

    full = True

    def __init__(self, s: PrimitiveSetup, max_dim: int | None = None):
        self.setup = s
        self.p = s.p
        self.max_dim = s.n if max_dim is None else max_dim
        self._labels: dict[int, dict] = {}
        self._edges: dict[int, tuple] = {}

    def _build(self, k: int) -> None:
        s, p = self.setup, self.p
        maps = all_linear_maps(k, s.n, p)
        index = {m.matrix: t for t, m in enumerate(maps)}
        uf = UnionFind(len(maps))
        by_kan, by_proj = defaultdict(list), defaultdict(list)
        for t, eps in enumerate(maps):
            ker = kernel(eps)
            _, _, sec = quotient(k, ker)
            by_kan[(ker, s.functor.label(0, eps @ sec))].append(t)
            by_proj[(s.projection @ eps).matrix].append(t)
        for groups in (by_kan, by_proj):
            for members in groups.values():
                for t in members[1:]:
                    uf.union(members[0], t)
        rep = {}
        for t, m in enumerate(maps):
            root = uf.find(t)
            if root not in rep or m.matrix < rep[root]:
                rep[root] = m.matrix
        self._labels[k] = {m.matrix: rep[uf.find(t)] for t, m in enumerate(maps)}
        self._edges[k] = (maps, index, by_kan, by_proj)

    def labels(self, k: int) -> dict:
        if k not in self._labels:
            self._build(k)
        return self._labels[k]

    def elements(self, k: int) -> tuple:
        return tuple(sorted(set(self.labels(k).values())))

    def class_of(self, zeta: LinMap):
        return self.labels(zeta.domain_dim)[zeta.matrix]

    def pull(self, x, alpha: LinMap):
        return self.labels(alpha.domain_dim)[compose_matrix(x, alpha)]

    def zigzag(self, a: LinMap, b: LinMap) -> list[LinMap] | None:
        """A shortest chain a = e0, e1, ..., b where consecutive maps share
        either their extended class or their composite with the projection."""
        k = a.domain_dim
        self.labels(k)
        maps, index, by_kan, by_proj = self._edges[k]
        neighbours = defaultdict(set)
        for groups in (by_kan, by_proj):
            for members in groups.values():
                for t in members:
                    neighbours[t].update(members)
        start, goal = index[a.matrix], index[b.matrix]
        prev = {start: None}
        queue = deque([start])
        while queue:
            t = queue.popleft()
            if t == goal:
                chain = []
                while t is not None:
                    chain.append(maps[t])
                    t = prev[t]
                return chain[::-1]
            for u in neighbours[t]:
                if u not in prev:
                    prev[u] = t
                    queue.append(u)
        return None


def pushout_functor(s: PrimitiveSetup, max_dim: int | None = None) -> PushoutFunctor:
    return PushoutFunctor(s, max_dim)


def regular_matches_primitive(s: PrimitiveSetup, pf: PushoutFunctor | None = None,
                              target: Groupoid | None = None) -> bool:
    """Regular classes of the pushout functor against the quotient functor of the
    primitive groupoid, matched through zeta -> class of section ∘ zeta."""
    pf = pushout_functor(s) if pf is None else pf
    target = primitive_groupoid(s) if target is None else target
    q = quotient_functor(target)
    for k in range(pf.max_dim + 1):
        regular = {e for e in pf.elements(k) if element_kernel(pf, k, e, brute_force=True).dim == 0}
        fwd, back = {}, {}
        for zeta in enumerate_injections(k, s.q_dim, s.p):
            a = q.label(0, zeta)
            b = pf.class_of(s.section @ zeta)
            if fwd.setdefault(a, b) != b or back.setdefault(b, a) != a:
                return False
        if set(back) != regular:
            return False
    return True
