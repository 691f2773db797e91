"""Exact linear algebra over a prime field F_p.

Vectors are tuples of residues, matrices are tuples of rows.  Subspaces are
kept in reduced row echelon form so that equality and hashing are structural.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

Vector = tuple[int, ...]
Matrix = tuple[tuple[int, ...], ...]

ENUMERATION_LIMIT = 2 ** 20

__all__ = [
    "ENUMERATION_LIMIT",
    "EnumerationLimitError",
    "LinMap",
    "Subspace",
    "all_linear_maps",
    "all_subspaces",
    "all_vectors",
    "enumerate_injections",
    "enumerate_isos",
    "gaussian_binomial",
    "general_linear_group",
    "image",
    "intersect",
    "is_prime",
    "kernel",
    "map_from_pairs",
    "preimage",
    "quotient",
    "rank",
    "restrict",
    "rref",
    "span_sum",
    "subspaces_of",
]


class EnumerationLimitError(ValueError):
    """Raised when an enumeration would exceed ENUMERATION_LIMIT objects."""


def is_prime(p: int) -> bool:
    return p >= 2 and all(p % q for q in range(2, int(p ** 0.5) + 1))


def _check_prime(p: int) -> None:
    if not is_prime(p):
        raise ValueError(f"{p} is not a prime")


def _guard(p: int, n: int) -> None:
    if p ** n > ENUMERATION_LIMIT:
        raise EnumerationLimitError(f"p^n = {p}^{n} exceeds the enumeration limit")


def _echelon(rows, p: int, ncols: int) -> tuple[list[list[int]], list[int]]:
    """Gauss-Jordan elimination. Returns (nonzero reduced rows, pivot columns)."""
    work = [[x % p for x in r] for r in rows]
    work = [r for r in work if any(r)]
    pivots: list[int] = []
    top = 0
    for c in range(ncols):
        if top == len(work):
            break
        hit = next((i for i in range(top, len(work)) if work[i][c]), None)
        if hit is None:
            continue
        work[top], work[hit] = work[hit], work[top]
        lead = work[top][c]
        if lead != 1:
            inv = pow(lead, p - 2, p)
            work[top] = [(x * inv) % p for x in work[top]]
        prow = work[top]
        for i in range(len(work)):
            f = work[i][c]
            if i != top and f:
                work[i] = [(a - f * b) % p for a, b in zip(work[i], prow)]
        pivots.append(c)
        top += 1
    return work[:top], pivots


def rref(m: Matrix, p: int = 2) -> Matrix:
    """Reduced row echelon form of ``m``; zero rows are kept at the bottom."""
    if not m:
        return ()
    ncols = len(m[0])
    rows, _ = _echelon(m, p, ncols)
    zero = (0,) * ncols
    return tuple(tuple(r) for r in rows) + (zero,) * (len(m) - len(rows))


def rank(m: Matrix, p: int = 2) -> int:
    if not m:
        return 0
    return len(_echelon(m, p, len(m[0]))[0])


def gaussian_binomial(n: int, k: int, p: int) -> int:
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= p ** (n - i) - 1
        den *= p ** (i + 1) - 1
    return num // den


class Subspace:
    """Subspace of F_p^n stored by its canonical RREF basis (rows)."""

    __slots__ = ("p", "n", "rows", "pivots", "_hash")

    def __init__(self, p: int, n: int, rows: Matrix, pivots: tuple[int, ...] | None = None):
        self.p = p
        self.n = n
        self.rows = rows
        if pivots is None:
            pivots = tuple(next(i for i, x in enumerate(r) if x) for r in rows)
        self.pivots = pivots
        self._hash = hash((p, n, rows))

    @classmethod
    def span(cls, vectors, n: int, p: int = 2) -> Subspace:
        rows, pivots = _echelon(vectors, p, n)
        return cls(p, n, tuple(tuple(r) for r in rows), tuple(pivots))

    @classmethod
    def zero(cls, n: int, p: int = 2) -> Subspace:
        return cls(p, n, (), ())

    @classmethod
    def full(cls, n: int, p: int = 2) -> Subspace:
        return cls(p, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)), tuple(range(n)))

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def basis(self) -> Matrix:
        return self.rows

    def sort_key(self):
        return (self.dim, self.rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.p == other.p and self.n == other.n and self.rows == other.rows

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Subspace(n={self.n}, p={self.p}, rows={[list(r) for r in self.rows]})"

    def coords(self, v: Vector) -> Vector:
        """Coordinates of v in the canonical basis (v must lie in the subspace)."""
        return tuple(v[c] for c in self.pivots)

    def combine(self, coefficients) -> Vector:
        p = self.p
        out = [0] * self.n
        for a, row in zip(coefficients, self.rows):
            if a:
                for i, x in enumerate(row):
                    if x:
                        out[i] = (out[i] + a * x) % p
        return tuple(out)

    def reduce(self, v: Vector) -> Vector:
        """Reduce v modulo the subspace: the result vanishes on pivot columns."""
        p = self.p
        out = list(v)
        for c, row in zip(self.pivots, self.rows):
            a = out[c]
            if a:
                out = [(x - a * y) % p for x, y in zip(out, row)]
        return tuple(out)

    def __contains__(self, v) -> bool:
        return not any(self.reduce(tuple(v)))

    def __le__(self, other: Subspace) -> bool:
        return all(r in other for r in self.rows)

    def __add__(self, other: Subspace) -> Subspace:
        return span_sum(self, other)

    def __and__(self, other: Subspace) -> Subspace:
        return intersect(self, other)

    def inclusion(self) -> LinMap:
        """The map F_p^dim -> F_p^n sending e_j to the j-th basis row."""
        return LinMap.from_columns(self.rows, self.n, self.p)


@dataclass(frozen=True)
class LinMap:
    """Linear map F_p^domain_dim -> F_p^codomain_dim; columns are images of e_j."""

    p: int
    domain_dim: int
    codomain_dim: int
    matrix: Matrix

    @classmethod
    def from_matrix(cls, rows, p: int = 2, domain_dim: int | None = None) -> LinMap:
        rows = tuple(tuple(int(x) % p for x in r) for r in rows)
        if domain_dim is None:
            if not rows:
                raise ValueError("domain_dim is required for a matrix with no rows")
            domain_dim = len(rows[0])
        if any(len(r) != domain_dim for r in rows):
            raise ValueError("ragged matrix")
        return cls(p, domain_dim, len(rows), rows)

    @classmethod
    def from_columns(cls, columns, codomain_dim: int, p: int = 2) -> LinMap:
        columns = [tuple(c) for c in columns]
        rows = tuple(tuple(c[i] % p for c in columns) for i in range(codomain_dim))
        return cls(p, len(columns), codomain_dim, rows)

    @classmethod
    def identity(cls, n: int, p: int = 2) -> LinMap:
        return cls(p, n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def zero(cls, domain_dim: int, codomain_dim: int, p: int = 2) -> LinMap:
        return cls(p, domain_dim, codomain_dim, ((0,) * domain_dim,) * codomain_dim)

    @property
    def columns(self) -> tuple[Vector, ...]:
        return tuple(tuple(r[j] for r in self.matrix) for j in range(self.domain_dim))

    def __call__(self, v: Vector) -> Vector:
        p = self.p
        return tuple(sum(a * b for a, b in zip(r, v)) % p for r in self.matrix)

    def __matmul__(self, other: LinMap) -> LinMap:
        """Composition self ∘ other."""
        if other.codomain_dim != self.domain_dim:
            raise ValueError("dimension mismatch in composition")
        p = self.p
        cols = other.columns
        rows = tuple(tuple(sum(a * b for a, b in zip(r, c)) % p for c in cols) for r in self.matrix)
        return LinMap(p, other.domain_dim, self.codomain_dim, rows)

    def rank(self) -> int:
        return rank(self.matrix, self.p)

    def is_injective(self) -> bool:
        return self.rank() == self.domain_dim

    def inverse(self) -> LinMap:
        n = self.domain_dim
        if self.codomain_dim != n:
            raise ValueError("only square maps can be inverted")
        eye = [tuple(int(i == j) for j in range(n)) for i in range(n)]
        aug = [tuple(r) + e for r, e in zip(self.matrix, eye)]
        rows, pivots = _echelon(aug, self.p, 2 * n)
        if len(rows) < n or pivots[n - 1] >= n:
            raise ValueError("map is not invertible")
        return LinMap(self.p, n, n, tuple(tuple(r[n:]) for r in rows))

    def transpose(self) -> LinMap:
        return LinMap(self.p, self.codomain_dim, self.domain_dim, self.columns)


def all_vectors(n: int, p: int = 2):
    return itertools.product(range(p), repeat=n)


def kernel(f: LinMap) -> Subspace:
    n = f.domain_dim
    rows, pivots = _echelon(f.matrix, f.p, n)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for c in free:
        v = [0] * n
        v[c] = 1
        for r, pc in zip(rows, pivots):
            v[pc] = (-r[c]) % f.p
        basis.append(v)
    return Subspace.span(basis, n, f.p)


def image(f: LinMap) -> Subspace:
    return Subspace.span(f.columns, f.codomain_dim, f.p)


def _same_ambient(a: Subspace, b: Subspace) -> None:
    if a.n != b.n or a.p != b.p:
        raise ValueError("subspaces live in different ambient spaces")


def span_sum(a: Subspace, b: Subspace) -> Subspace:
    _same_ambient(a, b)
    return Subspace.span(a.rows + b.rows, a.n, a.p)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    _same_ambient(a, b)
    if not a.dim or not b.dim:
        return Subspace.zero(a.n, a.p)
    # solve sum(s_i a_i) = sum(t_j b_j); the s-part of the kernel gives the intersection
    stacked = LinMap.from_columns(a.rows + tuple(tuple(-x % a.p for x in r) for r in b.rows), a.n, a.p)
    k = kernel(stacked)
    return Subspace.span([a.combine(v[: a.dim]) for v in k.rows], a.n, a.p)


def preimage(f: LinMap, s: Subspace) -> Subspace:
    """{v : f(v) in s}."""
    _, proj, _ = quotient(f.codomain_dim, s)
    return kernel(proj @ f)


@lru_cache(maxsize=None)
def all_subspaces(n: int, p: int = 2) -> tuple[Subspace, ...]:
    """Every subspace of F_p^n, sorted by (dimension, canonical basis)."""
    _check_prime(p)
    _guard(p, n)
    found = []
    for k in range(n + 1):
        for pivots in itertools.combinations(range(n), k):
            # free entries: to the right of each pivot, outside pivot columns
            slots = [(r, c) for r, pc in enumerate(pivots) for c in range(pc + 1, n) if c not in pivots]
            for values in itertools.product(range(p), repeat=len(slots)):
                rows = [[0] * n for _ in range(k)]
                for r, pc in enumerate(pivots):
                    rows[r][pc] = 1
                for (r, c), x in zip(slots, values):
                    rows[r][c] = x
                found.append(Subspace(p, n, tuple(tuple(r) for r in rows), pivots))
    found.sort(key=Subspace.sort_key)
    return tuple(found)


@lru_cache(maxsize=None)
def subspaces_of(u: Subspace) -> tuple[Subspace, ...]:
    """All subspaces of u, in the global order of all_subspaces."""
    return tuple(m for m in all_subspaces(u.n, u.p) if m.dim <= u.dim and m <= u)


@lru_cache(maxsize=None)
def enumerate_injections(k: int, n: int, p: int = 2) -> tuple[LinMap, ...]:
    """All injective maps F_p^k -> F_p^n, columns chosen in lexicographic order."""
    _check_prime(p)
    _guard(p, n)
    vectors = [v for v in all_vectors(n, p)]
    out: list[LinMap] = []

    def extend(cols, space):
        if len(cols) == k:
            out.append(LinMap.from_columns(cols, n, p))
            return
        for v in vectors:
            if v not in space:
                extend(cols + [v], Subspace.span(space.rows + (v,), n, p))

    if k <= n:
        extend([], Subspace.zero(n, p))
    return tuple(out)


def general_linear_group(k: int, p: int = 2) -> tuple[LinMap, ...]:
    return enumerate_injections(k, k, p)


def enumerate_isos(a: Subspace, b: Subspace) -> tuple[LinMap, ...]:
    """Isomorphisms a -> b as dim x dim matrices in the canonical bases."""
    if a.dim != b.dim:
        return ()
    return general_linear_group(a.dim, a.p)


@lru_cache(maxsize=None)
def all_linear_maps(j: int, n: int, p: int = 2) -> tuple[LinMap, ...]:
    """Every linear map F_p^j -> F_p^n."""
    _guard(p, j * n)
    out = []
    for entries in itertools.product(range(p), repeat=j * n):
        rows = tuple(tuple(entries[r * j:(r + 1) * j]) for r in range(n))
        out.append(LinMap(p, j, n, rows))
    return tuple(out)


@lru_cache(maxsize=None)
def quotient(n: int, u: Subspace) -> tuple[int, LinMap, LinMap]:
    """Return (q_dim, projection F^n -> F^q, section F^q -> F^n).

    The section is the inclusion of the standard coordinates that are not
    pivots of u; the projection reduces modulo u and keeps those coordinates.
    """
    if u.n != n:
        raise ValueError("subspace is not in F_p^n")
    p = u.p
    free = [c for c in range(n) if c not in u.pivots]
    proj_cols = []
    for c in range(n):
        e = tuple(int(i == c) for i in range(n))
        r = u.reduce(e)
        proj_cols.append(tuple(r[f] for f in free))
    projection = LinMap.from_columns(proj_cols, len(free), p)
    section = LinMap.from_columns([tuple(int(i == f) for i in range(n)) for f in free], n, p)
    return len(free), projection, section


def map_from_pairs(pairs, n_src: int, n_dst: int, p: int = 2):
    """Linear map determined by (v, f(v)) pairs on their span.

    Returns (source subspace S, images of S's canonical basis) or None when the
    pairs are inconsistent with linearity.
    """
    rows, pivots = _echelon([tuple(v) + tuple(w) for v, w in pairs], p, n_src + n_dst)
    if any(pc >= n_src for pc in pivots):
        return None
    src = Subspace(p, n_src, tuple(tuple(r[:n_src]) for r in rows), tuple(pivots))
    return src, tuple(tuple(r[n_src:]) for r in rows)


def iso_matrix(dst: Subspace, images) -> Matrix:
    """Matrix whose columns are coordinates of ``images`` in the basis of dst."""
    cols = [dst.coords(w) for w in images]
    return tuple(tuple(c[i] for c in cols) for i in range(dst.dim))


def restrict(src: Subspace, dst: Subspace, matrix: Matrix, m: Subspace) -> tuple[Subspace, Matrix]:
    """Restrict the iso src -> dst (given in canonical bases) to m ⊆ src.

    Returns (alpha(m), matrix of the restriction in canonical bases).
    """
    if not m <= src:
        raise ValueError("m is not contained in the source subspace")
    images = [dst.combine(_mat_vec(matrix, src.coords(v), src.p)) for v in m.rows]
    target = Subspace.span(images, dst.n, dst.p)
    return target, iso_matrix(target, images)


def _mat_vec(matrix: Matrix, v: Vector, p: int) -> Vector:
    return tuple(sum(a * b for a, b in zip(r, v)) % p for r in matrix)
