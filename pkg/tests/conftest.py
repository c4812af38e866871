import itertools

import networkx as nx
import numpy as np
import pytest

from treecount.graph import Graph
from treecount.template import TemplateTree


def triangle():
    return Graph.from_edges(3, [0, 1, 2], [1, 2, 0])


def path_graph(n):
    return Graph.from_edges(n, range(n - 1), range(1, n))


def erdos_renyi(n, p, seed):
    nxg = nx.gnp_random_graph(n, p, seed=seed)
    e = np.array(list(nxg.edges()), dtype=np.int64).reshape(-1, 2)
    return Graph.from_edges(n, e[:, 0], e[:, 1])


def random_tree(t, rng):
    """Uniform labelled tree via a random Pruefer sequence."""
    if t == 1:
        return TemplateTree(1, ())
    if t == 2:
        return TemplateTree(2, ((0, 1),))
    seq = rng.integers(0, t, size=t - 2).tolist()
    return TemplateTree(t, tuple(nx.from_prufer_sequence(seq).edges()))


def brute_force_automorphisms(tpl):
    edges = set(tpl.edges)
    count = 0
    for perm in itertools.permutations(range(tpl.t)):
        if all((min(perm[u], perm[v]), max(perm[u], perm[v])) in edges for u, v in tpl.edges):
            count += 1
    return count


@pytest.fixture
def k3():
    return triangle()


@pytest.fixture
def p3():
    return TemplateTree.path(3)


# acceptance reporting: one PASS/FAIL line per criterion in the terminal summary

_criteria = {}


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    number, title = marker
    ok = report.outcome == "passed"
    if report.when == "call" or not ok:
        prev = _criteria.get(number, (title, True))
        _criteria[number] = (title, prev[1] and ok)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        report.criterion = tuple(marker.args)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok = _criteria[number]
        terminalreporter.write_line(f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}")
