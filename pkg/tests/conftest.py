import numpy as np
import pytest

from ksrg import oracles
from ksrg.components import components
from ksrg.experiments import add_graph_observer, remove_graph_observer

# per-criterion outcome lines of the acceptance suite, printed in the terminal summary
ACCEPTANCE_LINES = {}

# graphs seen by the replicate observer, and how many of them were checked against BFS
GRAPH_AUDIT = {"graphs": 0, "bfs_checked": 0, "failures": []}
BFS_LIMIT = 1000


def audit_graph(graph, summary=None):
    """Component identities on every graph; union-find vs BFS when small."""
    GRAPH_AUDIT["graphs"] += 1
    try:
        summ = summary if summary is not None else components(graph)
        nv = graph.n_vertices
        assert sum(summ.sizes) == nv
        assert sum(ell * c for ell, c in summ.size_census.items()) == nv
        if nv <= BFS_LIMIT:
            parts = oracles.bfs_partition(nv, graph.edge_indices())
            uf = {}
            for i, lab in enumerate(summ.labels):
                uf.setdefault(int(lab), set()).add(i)
            assert sorted(map(sorted, uf.values())) == sorted(map(sorted, parts))
            GRAPH_AUDIT["bfs_checked"] += 1
    except AssertionError as exc:
        GRAPH_AUDIT["failures"].append(repr(exc))
        raise


@pytest.fixture(scope="session", autouse=True)
def _graph_audit():
    add_graph_observer(audit_graph)
    yield GRAPH_AUDIT
    remove_graph_observer(audit_graph)


def record_acceptance(number, passed, detail):
    line = f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
