"""Spans of injections up to isomorphism and their pushouts.

A span V <- M -> W of injections is recorded by the subspace spanned by the
columns of the stacked matrix [nu; omega] inside F_p^(v+w).  Two spans are
equivalent exactly when these column spaces agree, so the subspace's RREF is a
canonical form.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import NamedTuple

from .fp_linalg import (
    LinMap,
    Subspace,
    _guard,
    all_subspaces,
    image,
    iso_matrix,
    kernel,
    preimage,
    quotient,
)

__all__ = [
    "AmalgamClass",
    "Reassociation",
    "Span",
    "arrow_up",
    "b_functorial",
    "b_set",
    "block_row",
    "direct_sum",
    "pushout",
    "reassociate",
    "span_canonicalize",
]


def block_row(f: LinMap, g: LinMap) -> LinMap:
    """[f | g] : F^a ⊕ F^b -> F^n."""
    if f.codomain_dim != g.codomain_dim:
        raise ValueError("codomains differ")
    return LinMap.from_columns(f.columns + g.columns, f.codomain_dim, f.p)


def direct_sum(f: LinMap, g: LinMap) -> LinMap:
    """f ⊕ g as a block diagonal matrix."""
    zf = (0,) * g.codomain_dim
    zg = (0,) * f.codomain_dim
    cols = [c + zf for c in f.columns] + [zg + c for c in g.columns]
    return LinMap.from_columns(cols, f.codomain_dim + g.codomain_dim, f.p)


def _stack(f: LinMap, g: LinMap) -> LinMap:
    """[f; g] : F^m -> F^(a+b)."""
    return LinMap(f.p, f.domain_dim, f.codomain_dim + g.codomain_dim, f.matrix + g.matrix)


def _first_block(v: int, w: int, p: int) -> LinMap:
    return LinMap.from_columns([tuple(int(i == j) for i in range(v + w)) for j in range(v)], v + w, p)


def _second_block(v: int, w: int, p: int) -> LinMap:
    return LinMap.from_columns([tuple(int(i == v + j) for i in range(v + w)) for j in range(w)], v + w, p)


@dataclass(frozen=True)
class Span:
    """A span of injections V <- M -> W."""

    nu: LinMap
    omega: LinMap

    def __post_init__(self):
        if self.nu.domain_dim != self.omega.domain_dim:
            raise ValueError("span legs have different sources")
        if not (self.nu.is_injective() and self.omega.is_injective()):
            raise ValueError("span legs must be injective")

    @property
    def m_dim(self) -> int:
        return self.nu.domain_dim

    @property
    def p(self) -> int:
        return self.nu.p

    def graph(self) -> Subspace:
        return image(_stack(self.nu, self.omega))


def _span_from_graph(graph: Subspace, v: int, w: int) -> Span:
    cols = graph.rows
    nu = LinMap.from_columns([c[:v] for c in cols], v, graph.p)
    omega = LinMap.from_columns([c[v:] for c in cols], w, graph.p)
    return Span(nu, omega)


def span_canonicalize(s: Span) -> Span:
    """Reduced column echelon form of [nu; omega]."""
    return _span_from_graph(s.graph(), s.nu.codomain_dim, s.omega.codomain_dim)


@dataclass(frozen=True)
class AmalgamClass:
    """An element [M, nu, omega] of B(V, W), identified by its graph subspace."""

    p: int
    v_dim: int
    w_dim: int
    graph: Subspace

    @classmethod
    def of(cls, s: Span) -> AmalgamClass:
        return cls(s.p, s.nu.codomain_dim, s.omega.codomain_dim, s.graph())

    def sort_key(self):
        return (self.graph.dim, self.graph.rows)

    @cached_property
    def span(self) -> Span:
        return _span_from_graph(self.graph, self.v_dim, self.w_dim)

    @property
    def m_dim(self) -> int:
        return self.graph.dim

    @property
    def nu(self) -> LinMap:
        return self.span.nu

    @property
    def omega(self) -> LinMap:
        return self.span.omega

    @cached_property
    def relations(self) -> Subspace:
        """K = {(nu m, -omega m)}."""
        p, v = self.p, self.v_dim
        return Subspace.span([r[:v] + tuple(-x % p for x in r[v:]) for r in self.graph.rows],
                             v + self.w_dim, p)

    @cached_property
    def _quotient(self):
        return quotient(self.v_dim + self.w_dim, self.relations)

    @property
    def pushout_dim(self) -> int:
        return self._quotient[0]

    @property
    def projection(self) -> LinMap:
        """V ⊕ W -> P."""
        return self._quotient[1]

    @property
    def section(self) -> LinMap:
        """P -> V ⊕ W, a right inverse of the projection."""
        return self._quotient[2]

    @cached_property
    def iota_v(self) -> LinMap:
        return self.projection @ _first_block(self.v_dim, self.w_dim, self.p)

    @cached_property
    def iota_w(self) -> LinMap:
        return self.projection @ _second_block(self.v_dim, self.w_dim, self.p)

    def factor(self, f: LinMap, g: LinMap) -> LinMap:
        """The map P -> N induced by a cocone f: V -> N, g: W -> N."""
        return block_row(f, g) @ self.section


@lru_cache(maxsize=None)
def b_set(v_dim: int, w_dim: int, p: int = 2) -> tuple[AmalgamClass, ...]:
    """All classes of B(F_p^v, F_p^w), ordered by m_dim then canonical span."""
    n = v_dim + w_dim
    _guard(p, n)
    v_part = Subspace.span([tuple(int(i == j) for i in range(n)) for j in range(v_dim)], n, p)
    w_part = Subspace.span([tuple(int(i == v_dim + j) for i in range(n)) for j in range(w_dim)], n, p)
    out = []
    for s in all_subspaces(n, p):
        if s.dim > min(v_dim, w_dim):
            break
        if not (s & v_part).dim and not (s & w_part).dim:
            out.append(AmalgamClass(p, v_dim, w_dim, s))
    return tuple(out)


def pushout(c: AmalgamClass) -> tuple[int, LinMap, LinMap]:
    return c.pushout_dim, c.iota_v, c.iota_w


@lru_cache(maxsize=None)
def b_functorial(alpha: LinMap, beta: LinMap, c: AmalgamClass) -> tuple[AmalgamClass, LinMap]:
    """Pull the class c back along alpha: V' -> V and beta: W' -> W.

    Returns the pulled-back class and the induced injection of pushouts P' -> P.
    """
    graph = preimage(direct_sum(alpha, beta), c.graph)
    pulled = AmalgamClass(c.p, alpha.domain_dim, beta.domain_dim, graph)
    induced = pulled.factor(c.iota_v @ alpha, c.iota_w @ beta)
    return pulled, induced


def arrow_up(delta: LinMap, epsilon: LinMap) -> tuple[AmalgamClass, LinMap, Subspace]:
    """Compare the amalgam of delta: V -> X and epsilon: U -> X with delta(V) + epsilon(U).

    Returns (class in B(V, U), iso P -> Y in the canonical basis of Y, Y).
    """
    p, v = delta.p, delta.domain_dim
    both = block_row(delta, epsilon)
    ker = kernel(both)
    graph = Subspace.span([r[:v] + tuple(-x % p for x in r[v:]) for r in ker.rows],
                          v + epsilon.domain_dim, p)
    c = AmalgamClass(p, v, epsilon.domain_dim, graph)
    into_x = c.factor(delta, epsilon)
    target = image(into_x)
    iso = LinMap(p, c.pushout_dim, target.dim, iso_matrix(target, into_x.columns))
    return c, iso, target


class Reassociation(NamedTuple):
    zeta: LinMap            # (V ⊕ W) ⊕ T  ->  V ⊕ (W ⊕ T)
    inner: AmalgamClass     # class in B(W, T)
    outer: AmalgamClass     # class in B(V, W ⊕ T)


def reassociate(first: AmalgamClass, second: AmalgamClass) -> Reassociation:
    """Rebracket (V ⊕_first W) ⊕_second T as V ⊕ (W ⊕ T).

    ``second`` must be a class in B(P, T) where P is the pushout of ``first``.
    """
    if second.v_dim != first.pushout_dim:
        raise ValueError("second class must start at the pushout of the first")
    to_v = second.iota_v @ first.iota_v
    to_w = second.iota_v @ first.iota_w
    to_t = second.iota_w
    inner, inner_iso, inner_image = arrow_up(to_w, to_t)
    inner_into = inner_image.inclusion() @ inner_iso
    outer, outer_iso, outer_image = arrow_up(to_v, inner_into)
    if outer_image.dim != second.pushout_dim:
        raise AssertionError("the rebracketed amalgam does not fill the pushout")
    # outer_image is the whole space, so its canonical basis is the standard one
    zeta = outer_iso.inverse()
    return Reassociation(zeta, inner, outer)
