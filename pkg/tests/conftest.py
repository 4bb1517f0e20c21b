import math

import pytest

from treehu.diffraction import lattice_orbit_diffraction
from treehu.graph_core import named_graph

NAMED = {
    "K4": ("complete", [4]),
    "K33": ("complete_bipartite", [3]),
    "petersen": ("petersen", []),
    "ladder24": ("circular_ladder", [24]),
}


def tau(q):
    return 2 * math.pi / math.log(q)


@pytest.fixture(scope="session")
def graphs():
    return {key: named_graph(name, params) for key, (name, params) in NAMED.items()}


@pytest.fixture(scope="session")
def measures(graphs):
    return {key: lattice_orbit_diffraction(g) for key, g in graphs.items()}


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
