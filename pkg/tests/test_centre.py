import itertools

import pytest

from vigroupoid.centre import (
    CentralElement,
    NoWitnessError,
    NotCentralError,
    central_elements,
    central_join,
    centre,
    centre_certificate,
    criterion_verdicts,
    is_central_criterion,
    is_central_definition,
    rho,
    sigma,
    witnesses,
)
from vigroupoid.fp_linalg import LinMap, Subspace, enumerate_injections, general_linear_group, image
from vigroupoid.functor import quotient_functor
from vigroupoid.groupoid import AmbientFamily, Groupoid, fixed_space, from_group, generate_group, subgroups

SHEAR3 = LinMap.from_matrix([[1, 1, 0], [0, 1, 0], [0, 0, 1]])


def shear_functor():
    return quotient_functor(from_group(generate_group([LinMap.from_matrix([[1, 1], [0, 1]])], 2), 2))


def span_class_count(v, w, m):
    """Orbits of injective spans F^v <- F^m -> F^w under GL_m, counted directly."""
    seen, orbits = set(), 0
    group = general_linear_group(m)
    for nu in enumerate_injections(m, v):
        for omega in enumerate_injections(m, w):
            if (nu.matrix, omega.matrix) in seen:
                continue
            orbits += 1
            seen.update(((nu @ g).matrix, (omega @ g).matrix) for g in group)
    return orbits


def test_sigma_at_zero_is_the_functor():
    f = shear_functor()
    s = sigma(f, 0)
    assert [len(s.elements(k)) for k in range(3)] == [len(f.elements(k)) for k in range(3)]


def test_sigma_sizes_against_span_counts():
    f = quotient_functor(Groupoid.identities(AmbientFamily.single(2)))
    sizes = [1, 3, 6]
    for v, w in itertools.product(range(3), repeat=2):
        expected = sum(span_class_count(v, w, m) * sizes[v + w - m]
                       for m in range(min(v, w) + 1) if v + w - m <= 2)
        assert len(sigma(f, v).elements(w)) == expected


def test_rho_is_surjective():
    for group in subgroups(2):
        f = quotient_functor(from_group(group, 2))
        for v in range(3):
            for x in f.elements(v):
                for w, table in rho(f, v, x).items():
                    assert set(table.values()) == set(f.elements(w))


def test_basepoint_is_central():
    for group in subgroups(2):
        f = quotient_functor(from_group(group, 2))
        assert is_central_definition(f, 0, f.elements(0)[0])


def test_central_classes_of_group_groupoids_lie_in_fixed_space():
    for group in subgroups(2):
        f = quotient_functor(from_group(group, 2))
        fixed = fixed_space(group, 2)
        for v in range(3):
            for eps in enumerate_injections(v, 2):
                x = f.label(0, eps)
                assert is_central_definition(f, v, x) == (image(eps) <= fixed)


def test_central_elements_are_stable_under_restriction():
    f = quotient_functor(from_group(generate_group([SHEAR3], 3), 3))
    for v, x in central_elements(f):
        for t in range(v + 1):
            for alpha in enumerate_injections(t, v):
                assert is_central_definition(f, t, f.pull(x, alpha))


def test_centre_examples():
    f = quotient_functor(Groupoid.identities(AmbientFamily.single(3)))
    c = centre(f)
    assert c.v_dim == 3
    _, rep = f.representative(c.x)
    assert image(rep) == Subspace.full(3)
    c = centre(shear_functor())
    _, rep = shear_functor().representative(c.x)
    assert c.v_dim == 1 and image(rep) == Subspace.span([(1, 0)], 2)
    cert = centre_certificate(shear_functor())
    assert cert["factorization"] and cert["unique_up_to_iso"]
    assert cert["central_counts"] == [1, 1, 0]


def test_central_join():
    f = quotient_functor(from_group(generate_group([SHEAR3], 3), 3))
    base = CentralElement(0, f.elements(0)[0], witnesses(f, 0, f.elements(0)[0]))
    line1 = f.label(0, LinMap.from_columns([(1, 0, 0)], 3))
    line3 = f.label(0, LinMap.from_columns([(0, 0, 1)], 3))
    a = CentralElement(1, line1, witnesses(f, 1, line1))
    b = CentralElement(1, line3, witnesses(f, 1, line3))
    assert central_join(f, base, a).x == line1
    assert central_join(f, a, a).x == line1
    joined = central_join(f, a, b)
    _, rep = f.representative(joined.x)
    assert joined.v_dim == 2 and image(rep) == Subspace.span([(1, 0, 0), (0, 0, 1)], 3)
    moved = f.label(0, LinMap.from_columns([(0, 1, 0)], 3))
    with pytest.raises(NotCentralError):
        central_join(f, a, CentralElement(1, moved))


def test_criterion_agrees_with_definition_for_listed_setups(enumerated_trivial, e1_line):
    for g in enumerated_trivial:
        f = quotient_functor(g)
        x = f.label(0, e1_line)
        assert all(criterion_verdicts(f, 1, x, g))
        assert is_central_definition(f, 1, x)


def test_criterion_needs_a_witness_in_every_ambient():
    two = AmbientFamily(2, (1, 2), ("A", "B"))
    f = quotient_functor(Groupoid.identities(two))
    plane = f.label(1, LinMap.identity(2))
    with pytest.raises(NoWitnessError):
        is_central_criterion(f, CentralElement(2, plane, witnesses(f, 2, plane)))
