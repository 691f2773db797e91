import json

import pytest

from vigroupoid.cli import main
from vigroupoid.enumeration import candidate_pool, codim_one_centre_is_group, conjugacy_reduce, enumerate_constrained
from vigroupoid.fp_linalg import LinMap, general_linear_group, image
from vigroupoid.groupoid import AmbientFamily, Groupoid, from_group, gl_action, validate
from vigroupoid.invariants import invariant_basis, invariant_dims, verify_presentation

from conftest import data_path


def test_small_case_agrees_with_exhaustive_search():
    line = LinMap.from_columns([(1, 0)], 2)
    target = Groupoid.identities(AmbientFamily.single(1))
    fast = enumerate_constrained(2, line, target)
    slow = enumerate_constrained(2, line, target, exhaustive=True)
    assert fast == slow
    assert len(fast) == 2


def test_pool_fixes_the_central_line(e1_line, upper_target):
    line = image(e1_line)
    for m in candidate_pool(3, e1_line, upper_target):
        assert line <= m.src.space and line <= m.dst.space
        assert m((1, 0, 0)) == (1, 0, 0)


def test_enumerated_groupoids_are_valid_and_distinct(enumerated_trivial, enumerated_upper):
    for found in (enumerated_trivial, enumerated_upper):
        assert all(validate(g).ok for g in found)
        assert len(set(found)) == len(found)


def test_orbit_counts(enumerated_trivial, enumerated_upper):
    assert len(conjugacy_reduce(enumerated_trivial, 3)[0]) == 7
    assert len(conjugacy_reduce(enumerated_upper, 3)[0]) == 8


def test_orbits_share_invariant_dimensions(enumerated_trivial, enumerated_upper):
    for found in (enumerated_trivial, enumerated_upper):
        _, rep_of = conjugacy_reduce(found, 3)
        for j, g in enumerate(found):
            assert invariant_dims(g, 8) == invariant_dims(found[rep_of[j]], 8)
    identities = Groupoid.identities(AmbientFamily.single(3))
    assert conjugacy_reduce([identities], 3) == ([0], [0])


@pytest.mark.parametrize("which,degree", [("trivial", 3), ("upper", 4)])
def test_invariant_spans_separate_the_lists(enumerated_trivial, enumerated_upper, which, degree):
    found = enumerated_trivial if which == "trivial" else enumerated_upper

    def spans(g, top):
        return tuple(tuple(sorted(invariant_basis(g, d).bits())) for d in range(top + 1))

    assert len({spans(g, degree) for g in found}) == len(found)
    assert len({spans(g, degree - 1) for g in found}) < len(found)


def test_lists_are_closed_under_the_stabiliser(enumerated_trivial, enumerated_upper,
                                               trivial_target, upper_target):
    for found, target in ((enumerated_trivial, trivial_target), (enumerated_upper, upper_target)):
        found_set = set(found)
        for h in general_linear_group(3):
            if h((1, 0, 0)) != (1, 0, 0):
                continue
            induced = LinMap.from_matrix([row[1:] for row in h.matrix[1:]])
            if gl_action(induced, target) != target:
                continue
            assert {gl_action(h, g) for g in found} == found_set


def test_three_free_quadratic_items_share_an_orbit(enumerated_trivial, listed_trivial):
    reps, rep_of = conjugacy_reduce(enumerated_trivial, 3)
    matched = []
    for pres in listed_trivial[1:4]:
        hits = [j for j, g in enumerate(enumerated_trivial) if verify_presentation(g, pres, 8)]
        assert len(hits) == 1
        matched.append(rep_of[hits[0]])
    assert len(set(matched)) == 1


def test_polynomial_cases_are_group_groupoids(enumerated_trivial):
    for g in enumerated_trivial:
        assert codim_one_centre_is_group(g)
    group = from_group(general_linear_group(2), 2)
    assert codim_one_centre_is_group(group)


@pytest.mark.parametrize("target_file,golden", [
    ("trivial_2.json", "trivial_target"),
    ("upper_triangular_2.json", "upper_triangular_target"),
])
def test_golden_files_regenerate(tmp_path, target_file, golden):
    target = str(data_path("targets", target_file))
    assert main(["enumerate", "--ambient", "3", "--delta", "1,0,0", "--target", target,
                 "--out", str(tmp_path)]) == 0
    expected = data_path("golden", golden)
    names = sorted(p.name for p in expected.iterdir())
    assert sorted(p.name for p in tmp_path.iterdir()) == names
    for name in names:
        assert (tmp_path / name).read_text() == expected.joinpath(name).read_text()
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert all(e["delta_central_by_criterion"] and e["primitive_matches_target"] for e in manifest["groupoids"])
