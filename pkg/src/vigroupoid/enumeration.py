"""Search for groupoids on the subspaces of W with a prescribed central line
and a prescribed descended groupoid on W / Im(delta).

With delta central, a groupoid is determined by its morphisms between
subspaces containing Im(delta): these fix Im(delta) pointwise, and every other
morphism is a restriction of one of them.  The search therefore walks the
closed subsets of a small pool of such morphisms, then closes each candidate
over all subspaces and re-checks both constraints exactly.
"""

from __future__ import annotations

from collections import defaultdict, deque
from typing import Callable, Iterable

from .centre import NotCentralError, centre
from .fp_linalg import LinMap, all_subspaces, general_linear_group, image, quotient, subspaces_of
from .functor import quotient_functor
from .groupoid import (
    AmbientFamily,
    Groupoid,
    Morphism,
    Obj,
    close,
    fixed_space,
    from_group,
    gl_action,
    validate,
)
from .primitive import PrimitiveSetup, primitive_groupoid

__all__ = [
    "candidate_pool",
    "codim_one_centre_is_group",
    "closed_sets",
    "conjugacy_reduce",
    "enumerate_constrained",
]


def _induced(m: Morphism, projection: LinMap, q_dim: int) -> Morphism:
    """The map pi(U) -> pi(U') induced by a morphism fixing ker(pi) pointwise."""
    pairs = [(projection(u), projection(w)) for u, w in zip(m.src.space.rows, m.images())]
    return Morphism.from_pairs(0, 0, pairs, q_dim, q_dim, projection.p)


def candidate_pool(n: int, delta: LinMap, target: Groupoid) -> list[Morphism]:
    """Isomorphisms between subspaces containing Im(delta) that fix it pointwise
    and induce a morphism of the target on the quotient."""
    p = delta.p
    v = image(delta)
    q_dim, projection, _ = quotient(n, v)
    tops = [u for u in all_subspaces(n, p) if v <= u]
    pool = []
    for src in tops:
        for dst in tops:
            if dst.dim != src.dim:
                continue
            for a in general_linear_group(src.dim, p):
                m = Morphism(Obj(0, src), Obj(0, dst), a.matrix)
                if any(m(x) != x for x in v.rows):
                    continue
                if _induced(m, projection, q_dim) in target:
                    pool.append(m)
    return sorted(pool, key=Morphism.sort_key)


def _extend(closed: frozenset, new: Iterable[Morphism], below: Callable) -> frozenset:
    """Close ``closed ∪ new`` under inverse, composition and ``below`` restrictions."""
    seen = set(closed)
    by_src, by_dst = defaultdict(list), defaultdict(list)
    for m in closed:
        by_src[m.src].append(m)
        by_dst[m.dst].append(m)
    work = [m for m in new if m not in seen]
    while work:
        m = work.pop()
        if m in seen:
            continue
        seen.add(m)
        by_src[m.src].append(m)
        by_dst[m.dst].append(m)
        work.append(m.inverse())
        work.extend(m.restrict(s) for s in below(m.src.space))
        work.extend(n @ m for n in by_src[m.dst])
        work.extend(m @ n for n in by_dst[m.src])
    return frozenset(seen)


def closed_sets(pool: list[Morphism], start: Iterable[Morphism], below: Callable) -> list[frozenset]:
    """Every subset of the pool's closure lattice reachable from ``start``.

    A closed set D is reached by adding its elements one at a time, so the
    breadth-first walk visits every closed set generated by pool elements.
    """
    first = _extend(frozenset(), start, below)
    found = {first}
    queue = deque([first])
    while queue:
        c = queue.popleft()
        for m in pool:
            if m in c:
                continue
            d = _extend(c, [m], below)
            if d not in found:
                found.add(d)
                queue.append(d)
    return sorted(found, key=lambda s: (len(s), sorted(x.sort_key() for x in s)))


def _accepts(g: Groupoid, delta: LinMap, target: Groupoid) -> bool:
    if not validate(g).ok:
        return False
    try:
        setup = PrimitiveSetup(g, delta)
    except NotCentralError:
        return False
    return primitive_groupoid(setup) == target


def enumerate_constrained(w_dim: int, delta: LinMap, target: Groupoid,
                          exhaustive: bool = False) -> list[Groupoid]:
    """All groupoids on the subspaces of F_p^w_dim with [delta] central and
    descended groupoid equal to ``target``, sorted by canonical key.

    ``exhaustive`` walks closed sets of all isomorphisms between all subspaces,
    without using the structure above; it is only feasible for w_dim <= 2.
    """
    p = delta.p
    family = AmbientFamily.single(w_dim, p)
    if exhaustive:
        if w_dim > 2:
            raise ValueError("the exhaustive search is limited to dimension 2")
        pool = [Morphism(Obj(0, u), Obj(0, u2), a.matrix)
                for u in all_subspaces(w_dim, p) for u2 in all_subspaces(w_dim, p) if u.dim == u2.dim
                for a in general_linear_group(u.dim, p)]
        below = lambda u: [s for s in subspaces_of(u) if s.dim < u.dim]
        ids = [Morphism.identity(o) for o in family.objects()]
        candidates = [Groupoid(family, c) for c in closed_sets(pool, ids, below)]
    else:
        v = image(delta)
        q_dim, projection, _ = quotient(w_dim, v)
        tops = [u for u in all_subspaces(w_dim, p) if v <= u]
        below = lambda u: [s for s in tops if s.dim < u.dim and s <= u]
        pool = candidate_pool(w_dim, delta, target)
        ids = [Morphism.identity(Obj(0, u)) for u in tops]
        wanted = set(target.morphisms())
        candidates = []
        for c in closed_sets(pool, ids, below):
            if {_induced(m, projection, q_dim) for m in c} == wanted:
                candidates.append(close(Groupoid(family, c)))
    found = {g.key(): g for g in candidates if _accepts(g, delta, target)}
    return [found[k] for k in sorted(found)]


def conjugacy_reduce(groupoids: list[Groupoid], w_dim: int) -> tuple[list[int], list[int]]:
    """Orbits under GL(W) acting by conjugation.

    Returns (indices of representatives, representative index of each item);
    the representative of an orbit is its member with the least canonical key.
    """
    if not groupoids:
        return [], []
    p = groupoids[0].p
    keys = [g.key() for g in groupoids]
    rep_of = [-1] * len(groupoids)
    for i, g in enumerate(groupoids):
        if rep_of[i] >= 0:
            continue
        orbit = {gl_action(h, g).key() for h in general_linear_group(w_dim, p)}
        members = [j for j, k in enumerate(keys) if k in orbit]
        rep = min(members, key=lambda j: keys[j])
        for j in members:
            rep_of[j] = rep
    reps = sorted(set(rep_of))
    return reps, rep_of


def codim_one_centre_is_group(g: Groupoid) -> bool:
    """If the centre has dimension dim W - 1, the groupoid comes from a group.

    The group is G(W, W); its fixed space must then have dimension dim W - 1.
    Vacuously true for other centre dimensions.
    """
    n = g.family.dims[0]
    c = centre(quotient_functor(g))
    if c.v_dim != n - 1:
        return True
    group = g.automorphisms()
    return from_group(group, n, g.p) == g and fixed_space(group, n, g.p).dim == n - 1
