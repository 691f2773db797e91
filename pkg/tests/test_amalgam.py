import itertools

from vigroupoid.amalgam import (
    AmalgamClass,
    Span,
    arrow_up,
    b_functorial,
    b_set,
    reassociate,
    span_canonicalize,
)
from vigroupoid.fp_linalg import LinMap, Subspace, enumerate_injections, general_linear_group, image

from oracles import maps_between


def test_b_set_sizes():
    assert len(b_set(1, 1)) == 2
    assert len(b_set(1, 2)) == 4
    assert [c.m_dim for c in b_set(1, 2)] == [0, 1, 1, 1]
    assert len(b_set(0, 3)) == 1
    assert len(b_set(2, 2)) == 16


def test_b_set_matches_orbit_count_over_f3():
    # classes of iso spans F_3 <- F_3 -> F_3 under GL_1(F_3): 4 spans, 2 orbits
    spans = {(a.matrix, b.matrix) for a in general_linear_group(1, 3) for b in general_linear_group(1, 3)}
    orbits = set()
    for a, b in spans:
        orbit = frozenset((LinMap(3, 1, 1, a) @ g, LinMap(3, 1, 1, b) @ g) for g in general_linear_group(1, 3))
        orbits.add(orbit)
    assert len(spans) == 4 and len(orbits) == 2
    assert sum(c.m_dim == 1 for c in b_set(1, 1, 3)) == 2


def test_span_canonical_form_ignores_automorphisms_of_m():
    s = Span(LinMap.identity(1), LinMap.identity(1))
    assert span_canonicalize(s) == s
    nu = LinMap.from_matrix([[1, 0], [0, 1], [1, 1]])
    omega = LinMap.from_matrix([[0, 1], [1, 0]])
    for g in general_linear_group(2):
        assert AmalgamClass.of(Span(nu @ g, omega @ g)) == AmalgamClass.of(Span(nu, omega))


def test_pushout_examples():
    free = b_set(2, 1)[0]
    assert free.pushout_dim == 3
    assert free.iota_v.columns == ((1, 0, 0), (0, 1, 0))
    assert free.iota_w.columns == ((0, 0, 1),)
    glued = AmalgamClass.of(Span(LinMap.identity(1), LinMap.identity(1)))
    assert glued.pushout_dim == 1
    assert glued.iota_v == glued.iota_w == LinMap.identity(1)
    for c in b_set(2, 2):
        assert c.pushout_dim == 4 - c.m_dim
        assert c.iota_v @ c.nu == c.iota_w @ c.omega
        assert c.iota_v.is_injective() and c.iota_w.is_injective()


def test_b_functorial_identity_and_empty():
    for c in b_set(2, 2):
        pulled, induced = b_functorial(LinMap.identity(2), LinMap.identity(2), c)
        assert pulled == c and induced == LinMap.identity(c.pushout_dim)
        beta = enumerate_injections(1, 2)[0]
        pulled, induced = b_functorial(LinMap.zero(0, 2), beta, c)
        assert pulled.m_dim == 0 and induced == c.iota_w @ beta


def test_b_functorial_composition_law():
    dims = range(3)
    for v, w in itertools.product(dims, repeat=2):
        for c in b_set(v, w):
            for v1, w1 in itertools.product(range(v + 1), range(w + 1)):
                for a in enumerate_injections(v1, v):
                    for b in enumerate_injections(w1, w):
                        c1, i1 = b_functorial(a, b, c)
                        for v2, w2 in itertools.product(range(v1 + 1), range(w1 + 1)):
                            a2 = enumerate_injections(v2, v1)[-1]
                            b2 = enumerate_injections(w2, w1)[-1]
                            c2, i2 = b_functorial(a2, b2, c1)
                            c3, i3 = b_functorial(a @ a2, b @ b2, c)
                            assert c2 == c3 and i1 @ i2 == i3


def test_arrow_up_examples():
    e1 = LinMap.from_columns([(1, 0)], 2)
    e2 = LinMap.from_columns([(0, 1)], 2)
    c, iso, y = arrow_up(e1, e2)
    assert c.m_dim == 0 and y.dim == 2
    c, iso, y = arrow_up(e1, e1)
    assert c.m_dim == 1 and c.pushout_dim == 1 and y == image(e1)
    assert iso == LinMap.identity(1)


def test_reassociate_trivial_and_collapsed():
    first = b_set(1, 1)[0]
    second = b_set(2, 1)[0]
    r = reassociate(first, second)
    assert r.zeta == LinMap.identity(3)
    assert r.inner.m_dim == 0 and r.outer.m_dim == 0
    full = AmalgamClass.of(Span(LinMap.identity(1), LinMap.identity(1)))
    r = reassociate(full, full)
    assert r.zeta == LinMap.identity(1)
    assert r.inner.pushout_dim == 1 and r.outer.pushout_dim == 1


def test_reassociate_compatible_with_injections():
    for first in b_set(1, 1) + b_set(2, 1):
        for second in b_set(first.pushout_dim, 1):
            r = reassociate(first, second)
            inner, outer = r.inner, r.outer
            v_into = outer.iota_v
            w_into = outer.iota_w @ inner.iota_v
            t_into = outer.iota_w @ inner.iota_w
            assert r.zeta @ second.iota_v @ first.iota_v == v_into
            assert r.zeta @ second.iota_v @ first.iota_w == w_into
            assert r.zeta @ second.iota_w == t_into


def test_factor_is_the_unique_cocone_map():
    c = b_set(1, 2)[2]
    for f in maps_between(1, 2):
        for g in maps_between(2, 2):
            if f @ c.nu == g @ c.omega:
                h = c.factor(f, g)
                assert h @ c.iota_v == f and h @ c.iota_w == g
    assert Subspace.full(c.pushout_dim).dim == 2
