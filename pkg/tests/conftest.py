import random
import re
from collections import defaultdict
from importlib import resources

import pytest
from hypothesis import settings

from vigroupoid.documents import load_groupoid, load_presentation_list
from vigroupoid.enumeration import enumerate_constrained
from vigroupoid.fp_linalg import LinMap
from vigroupoid.groupoid import AmbientFamily, Groupoid, from_group, generate_group

from oracles import random_groupoid

settings.register_profile("fixed", derandomize=True, max_examples=60, deadline=None)
settings.load_profile("fixed")

SAMPLE_SEED = 20260315

CRITERIA = {
    1: "enumeration counts 15 and 12",
    2: "presentations match invariant spans through degree 12",
    3: "groupoid -> functor -> groupoid round trips",
    4: "centrality by definition agrees with the two-condition criterion; centres of group groupoids",
    5: "pushout regular part matches the descended groupoid; kernel law",
    6: "codimension-one centre forces a group groupoid",
    7: "Kan extension and shift coherence",
    8: "structural property suites",
}


def data_path(*parts):
    return resources.files("vigroupoid").joinpath("data", *parts)


@pytest.fixture(scope="session")
def e1_line():
    return LinMap.from_columns([(1, 0, 0)], 3)


@pytest.fixture(scope="session")
def trivial_target():
    return Groupoid.identities(AmbientFamily.single(2))


@pytest.fixture(scope="session")
def upper_target():
    return from_group(generate_group([LinMap.from_matrix([[1, 1], [0, 1]])], 2), 2)


@pytest.fixture(scope="session")
def enumerated_trivial(e1_line, trivial_target):
    return enumerate_constrained(3, e1_line, trivial_target)


@pytest.fixture(scope="session")
def enumerated_upper(e1_line, upper_target):
    return enumerate_constrained(3, e1_line, upper_target)


@pytest.fixture(scope="session")
def listed_trivial():
    return load_presentation_list(data_path("presentations_trivial_target.json"))


@pytest.fixture(scope="session")
def listed_upper():
    return load_presentation_list(data_path("presentations_b2_target.json"))


@pytest.fixture(scope="session")
def random_sample():
    """50 random closed groupoids on F_2^2 and 50 on F_2^3."""
    rng = random.Random(SAMPLE_SEED)
    return [random_groupoid(rng, 2) for _ in range(50)] + [random_groupoid(rng, 3) for _ in range(50)]


@pytest.fixture(scope="session")
def groupoid_file():
    return lambda name: load_groupoid(data_path("groupoids", name))


_outcomes = defaultdict(list)


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d)", report.nodeid)
    if m and (report.when == "call" or report.outcome != "passed"):
        _outcomes[int(m.group(1))].append(report.outcome == "passed")


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for k, text in CRITERIA.items():
        results = _outcomes.get(k)
        verdict = "NOT RUN" if not results else "PASS" if all(results) else "FAIL"
        terminalreporter.write_line(f"criterion {k}: {verdict}  ({text})")
