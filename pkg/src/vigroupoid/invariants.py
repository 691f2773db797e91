"""Invariant subspaces of F_2[x1..xn], degree by degree.

A polynomial f is invariant under a groupoid when, for every morphism
alpha: U -> U', restricting f to U' and pulling back along alpha gives the
restriction of f to U.  Restrictions use the canonical basis of U as
coordinates.  Bases are reported in reduced echelon form over the graded
lexicographic order with x1 > x2 > ... > xn.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement

from .fp_linalg import LinMap
from .groupoid import Groupoid, Morphism

__all__ = [
    "AlgebraPresentation",
    "GradedBasis",
    "ParseError",
    "Poly2",
    "conjugate_presentation",
    "hilbert_dims",
    "invariant_basis",
    "invariant_dims",
    "maximal_morphisms",
    "parse_poly",
    "presentation_basis",
    "span_report",
    "substitute",
    "verify_presentation",
]


class ParseError(ValueError):
    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at column {position + 1}: {text!r}")
        self.text = text
        self.position = position


@dataclass(frozen=True)
class Poly2:
    """A polynomial over F_2: the set of exponent vectors with coefficient 1."""

    n_vars: int
    terms: frozenset = frozenset()

    @classmethod
    def zero(cls, n: int) -> Poly2:
        return cls(n)

    @classmethod
    def one(cls, n: int) -> Poly2:
        return cls(n, frozenset({(0,) * n}))

    @classmethod
    def var(cls, i: int, n: int) -> Poly2:
        """The variable x_{i+1}."""
        return cls(n, frozenset({tuple(int(j == i) for j in range(n))}))

    @classmethod
    def linear(cls, coefficients) -> Poly2:
        n = len(coefficients)
        return cls(n, frozenset(tuple(int(j == i) for j in range(n)) for i, c in enumerate(coefficients) if c % 2))

    def _check(self, other: Poly2) -> None:
        if self.n_vars != other.n_vars:
            raise ValueError("polynomials in different numbers of variables")

    def __add__(self, other: Poly2) -> Poly2:
        self._check(other)
        return Poly2(self.n_vars, self.terms ^ other.terms)

    __sub__ = __add__

    def __mul__(self, other: Poly2) -> Poly2:
        self._check(other)
        return Poly2(self.n_vars, _mul(self.terms, other.terms))

    def __pow__(self, e: int) -> Poly2:
        out, base = Poly2.one(self.n_vars), self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __bool__(self) -> bool:
        return bool(self.terms)

    def degrees(self) -> set[int]:
        return {sum(t) for t in self.terms}

    def degree(self) -> int:
        """Degree of a nonzero homogeneous polynomial."""
        ds = self.degrees()
        if len(ds) != 1:
            raise ValueError("not a nonzero homogeneous polynomial")
        return ds.pop()

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def sorted_terms(self) -> list[tuple[int, ...]]:
        return sorted(self.terms, key=lambda t: (sum(t), t), reverse=True)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for t in self.sorted_terms():
            factors = [f"x{i + 1}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(t) if e]
            parts.append("*".join(factors) or "1")
        return " + ".join(parts)


def _mul(a: frozenset, b: frozenset) -> frozenset:
    out: set = set()
    for s in a:
        for t in b:
            m = tuple(x + y for x, y in zip(s, t))
            if m in out:
                out.remove(m)
            else:
                out.add(m)
    return frozenset(out)


_TOKEN = re.compile(r"\s*(?:(x)(\d+)|(\d+)|(.))")


def parse_poly(text: str, n_vars: int) -> Poly2:
    """Parse a polynomial over F_2.

    Grammar: sum := product ('+' product)*; product := power ('*' power)*;
    power := atom ('^' integer)?; atom := 'x' index | integer | '(' sum ')'.
    Variables are x1..xn; integers are read modulo 2.
    """
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m.end() == pos or not text[pos:m.end()].strip():
            break
        start = m.start(1) if m.group(1) else m.start(3) if m.group(3) else m.start(4)
        if m.group(1):
            tokens.append(("var", int(m.group(2)), start))
        elif m.group(3):
            tokens.append(("int", int(m.group(3)), start))
        elif m.group(4) in "+*^()":
            tokens.append((m.group(4), None, start))
        else:
            raise ParseError(f"unexpected character {m.group(4)!r}", text, start)
        pos = m.end()
    tokens.append(("end", None, len(text)))
    index = 0

    def peek():
        return tokens[index]

    def take(kind):
        nonlocal index
        tok = tokens[index]
        if tok[0] != kind:
            raise ParseError(f"expected {kind!r}", text, tok[2])
        index += 1
        return tok

    def parse_sum():
        out = parse_product()
        while peek()[0] == "+":
            take("+")
            out = out + parse_product()
        return out

    def parse_product():
        out = parse_power()
        while peek()[0] == "*":
            take("*")
            out = out * parse_power()
        return out

    def parse_power():
        base = parse_atom()
        if peek()[0] == "^":
            take("^")
            return base ** take("int")[1]
        return base

    def parse_atom():
        kind, value, at = peek()
        if kind == "var":
            take("var")
            if not 1 <= value <= n_vars:
                raise ParseError(f"variable x{value} outside x1..x{n_vars}", text, at)
            return Poly2.var(value - 1, n_vars)
        if kind == "int":
            take("int")
            return Poly2.one(n_vars) if value % 2 else Poly2.zero(n_vars)
        if kind == "(":
            take("(")
            inner = parse_sum()
            take(")")
            return inner
        raise ParseError("expected a variable, integer or '('", text, at)

    result = parse_sum()
    if peek()[0] != "end":
        raise ParseError("trailing input", text, peek()[2])
    return result


@lru_cache(maxsize=1 << 16)
def _monomial_image(matrix, n_new: int, mono: tuple) -> frozenset:
    """Image of a monomial under x_i -> sum_j matrix[i][j] y_j."""
    for i, e in enumerate(mono):
        if e:
            rest = mono[:i] + (e - 1,) + mono[i + 1:]
            form = frozenset(tuple(int(j == c) for j in range(n_new))
                             for c, a in enumerate(matrix[i]) if a % 2)
            return _mul(_monomial_image(matrix, n_new, rest), form)
    return frozenset({(0,) * n_new})


def substitute(f: Poly2, g: LinMap) -> Poly2:
    """Pull f back along g: F_2^m -> F_2^n, so x_i becomes sum_j g[i][j] y_j."""
    if g.codomain_dim != f.n_vars:
        raise ValueError(f"map lands in F^{g.codomain_dim}, polynomial has {f.n_vars} variables")
    if g.p != 2:
        raise ValueError("polynomial substitution is implemented over F_2")
    out: set = set()
    for t in f.terms:
        out ^= _monomial_image(g.matrix, g.domain_dim, t)
    return Poly2(g.domain_dim, frozenset(out))


@lru_cache(maxsize=None)
def monomials(n: int, d: int) -> tuple[tuple[int, ...], ...]:
    """Degree-d monomials in n variables, largest first in graded lex order."""
    if n == 0:
        return ((),) if d == 0 else ()
    out = []
    for combo in combinations_with_replacement(range(n), d):
        e = [0] * n
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return tuple(sorted(out, reverse=True))


@lru_cache(maxsize=None)
def _bit_index(n: int, d: int) -> dict:
    monos = monomials(n, d)
    return {m: len(monos) - 1 - i for i, m in enumerate(monos)}


def _to_bits(terms, n: int, d: int) -> int:
    index = _bit_index(n, d)
    out = 0
    for t in terms:
        out ^= 1 << index[t]
    return out


def _from_bits(bits: int, n: int, d: int) -> Poly2:
    monos = monomials(n, d)
    top = len(monos) - 1
    return Poly2(n, frozenset(monos[top - b] for b in range(bits.bit_length()) if bits >> b & 1))


def _reduced_echelon(vectors) -> list[int]:
    """Reduced echelon basis of the span, leading monomial largest first."""
    pivots: dict[int, int] = {}
    for v in vectors:
        for b, row in pivots.items():
            if v >> b & 1:
                v ^= row
        if not v:
            continue
        lead = v.bit_length() - 1
        for b in list(pivots):
            if pivots[b] >> lead & 1:
                pivots[b] ^= v
        pivots[lead] = v
    return [pivots[b] for b in sorted(pivots, reverse=True)]


@dataclass(frozen=True)
class GradedBasis:
    degree: int
    n_vars: int
    polys: tuple[Poly2, ...]

    @classmethod
    def from_bits(cls, degree: int, n_vars: int, vectors) -> GradedBasis:
        rows = _reduced_echelon(vectors)
        return cls(degree, n_vars, tuple(_from_bits(r, n_vars, degree) for r in rows))

    @classmethod
    def span_of(cls, degree: int, n_vars: int, polys) -> GradedBasis:
        vecs = []
        for f in polys:
            if f.n_vars != n_vars or (f and f.degrees() != {degree}):
                raise ValueError(f"{f} is not homogeneous of degree {degree}")
            vecs.append(_to_bits(f.terms, n_vars, degree))
        return cls.from_bits(degree, n_vars, vecs)

    @property
    def dim(self) -> int:
        return len(self.polys)

    def bits(self) -> list[int]:
        return [_to_bits(f.terms, self.n_vars, self.degree) for f in self.polys]

    def __contains__(self, f: Poly2) -> bool:
        return self.dim == GradedBasis.span_of(self.degree, self.n_vars, self.polys + (f,)).dim

    def __le__(self, other: GradedBasis) -> bool:
        joined = GradedBasis.from_bits(self.degree, self.n_vars, self.bits() + other.bits())
        return joined.dim == other.dim


def maximal_morphisms(g: Groupoid) -> list[Morphism]:
    """Non-identity morphisms that are not restrictions of a morphism with a larger source.

    Invariance under these implies invariance under all morphisms.
    """
    from .fp_linalg import subspaces_of

    restricted = set()
    for m in g.morphisms():
        k = m.dim
        for s in subspaces_of(m.src.space):
            if s.dim == k - 1:
                restricted.add(m.restrict(s))
    return sorted((m for m in g.morphisms() if m not in restricted and not m.is_identity()),
                  key=Morphism.sort_key)


def _conditions(g: Groupoid) -> list[tuple]:
    if g.p != 2:
        raise ValueError("invariant polynomials are implemented for p = 2")
    if len(g.family.dims) != 1:
        raise ValueError("a single ambient is required")
    cache = g.__dict__.setdefault("_invariant_conditions", None)
    if cache is None:
        cache = []
        for m in maximal_morphisms(g):
            cache.append((m.dim, m.ambient_map().matrix, m.src.space.inclusion().matrix))
        g.__dict__["_invariant_conditions"] = cache
    return cache


def invariant_basis(g: Groupoid, d: int) -> GradedBasis:
    """Basis of the degree-d polynomials satisfying every morphism's condition."""
    n = g.family.dims[0]
    conditions = _conditions(g)
    monos = monomials(n, d)
    # one combined condition word per source monomial; its null combinations are the invariants
    words = []
    for mono in monos:
        word, shift = 0, 0
        for k, moved, incl in conditions:
            diff = _monomial_image(moved, k, mono) ^ _monomial_image(incl, k, mono)
            word |= _to_bits(diff, k, d) << shift
            shift += len(monomials(k, d))
        words.append(word)
    index = _bit_index(n, d)
    pivots: dict[int, tuple[int, int]] = {}
    solutions = []
    for mono, word in zip(monos, words):
        track = 1 << index[mono]
        while word:
            lead = word.bit_length() - 1
            if lead not in pivots:
                pivots[lead] = (word, track)
                break
            w, t = pivots[lead]
            word ^= w
            track ^= t
        if not word:
            solutions.append(track)
    return GradedBasis.from_bits(d, n, solutions)


def invariant_dims(g: Groupoid, max_degree: int) -> list[int]:
    return [invariant_basis(g, d).dim for d in range(max_degree + 1)]


@dataclass(frozen=True)
class AlgebraPresentation:
    """Sum over terms of F_2[generators] * module_generator."""

    n_vars: int
    terms: tuple[tuple[tuple[Poly2, ...], Poly2], ...]

    def __post_init__(self):
        for gens, module in self.terms:
            for f in gens + (module,):
                if f.n_vars != self.n_vars:
                    raise ValueError("all polynomials must use the same variables")
                if not f or not f.is_homogeneous():
                    raise ValueError(f"{f} is not a nonzero homogeneous polynomial")
            if any(f.degree() == 0 for f in gens):
                raise ValueError("free generators must have positive degree")

    @classmethod
    def parse(cls, n_vars: int, terms) -> AlgebraPresentation:
        """``terms`` is a list of (generator strings, module generator string)."""
        return cls(n_vars, tuple((tuple(parse_poly(s, n_vars) for s in gens), parse_poly(mod, n_vars))
                                 for gens, mod in terms))

    def as_strings(self) -> list[tuple[list[str], str]]:
        return [([str(f) for f in gens], str(mod)) for gens, mod in self.terms]


def _weighted_exponents(degrees: tuple[int, ...], total: int):
    if not degrees:
        if total == 0:
            yield ()
        return
    first, rest = degrees[0], degrees[1:]
    for e in range(total // first + 1):
        for tail in _weighted_exponents(rest, total - e * first):
            yield (e,) + tail


def presentation_basis(pres: AlgebraPresentation, d: int) -> GradedBasis:
    n = pres.n_vars
    vectors = []
    for gens, module in pres.terms:
        m = module.degree()
        if m > d:
            continue
        for exps in _weighted_exponents(tuple(f.degree() for f in gens), d - m):
            prod = module
            for f, e in zip(gens, exps):
                if e:
                    prod = prod * f ** e
            vectors.append(_to_bits(prod.terms, n, d))
    return GradedBasis.from_bits(d, n, vectors)


def span_report(g: Groupoid, pres: AlgebraPresentation, max_degree: int) -> list[dict]:
    """Per degree: invariant dim, presented dim, containment and equality."""
    out = []
    for d in range(max_degree + 1):
        inv, pre = invariant_basis(g, d), presentation_basis(pres, d)
        out.append({"degree": d, "invariant_dim": inv.dim, "presented_dim": pre.dim,
                    "contained": pre <= inv, "equal": inv == pre})
    return out


def verify_presentation(g: Groupoid, pres: AlgebraPresentation, max_degree: int) -> bool:
    """Degree-wise span equality for every degree up to ``max_degree``."""
    if pres.n_vars != g.family.dims[0]:
        raise ValueError("presentation and groupoid use different numbers of variables")
    return all(invariant_basis(g, d) == presentation_basis(pres, d) for d in range(max_degree + 1))


def hilbert_dims(degrees, d: int) -> int:
    """Coefficient of t^d in the product of 1 / (1 - t^k) over the given degrees."""
    if any(k < 1 for k in degrees):
        raise ValueError("generator degrees must be positive")
    coeff = [1] + [0] * d
    for k in degrees:
        for i in range(k, d + 1):
            coeff[i] += coeff[i - k]
    return coeff[d]


def conjugate_presentation(g: LinMap, pres: AlgebraPresentation) -> AlgebraPresentation:
    """Pull every polynomial back along g^{-1}; presents the invariants of g acting on the groupoid."""
    inv = g.inverse()
    return AlgebraPresentation(pres.n_vars, tuple(
        (tuple(substitute(f, inv) for f in gens), substitute(module, inv)) for gens, module in pres.terms))
