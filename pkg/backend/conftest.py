# backend/conftest.py
import os
import tempfile

# Settings are cached on first use, so point them at a scratch database and
# relax the rate limit before any application module is imported.
_scratch = tempfile.mkdtemp(prefix="metricdim-tests-")
os.environ.setdefault("DATABASE_URL", f"sqlite:///{_scratch}/experiments.db")
os.environ.setdefault("SOLVE_RATE_LIMIT", "1000/minute")

import networkx as nx
import pytest

from family_service import generate_from_string
from graph_service import Graph


def to_graph(edges, n=None) -> Graph:
    edges = [tuple(e) for e in edges]
    if n is None:
        n = 1 + max(max(e) for e in edges) if edges else 0
    return Graph(n, tuple(edges))


def to_networkx(g: Graph) -> nx.Graph:
    G = nx.Graph()
    G.add_nodes_from(range(g.n))
    G.add_edges_from(g.edges)
    return G


def from_networkx(G: nx.Graph) -> Graph:
    G = nx.convert_node_labels_to_integers(G, ordering="sorted")
    return Graph(G.number_of_nodes(), tuple(G.edges()))


def family(text: str) -> Graph:
    return generate_from_string(text)[0]


# 1-indexed edges of the 18-vertex tree whose metric dimension is 5
EXAMPLE_TREE_EDGES = [
    (1, 4), (1, 8), (1, 2), (2, 10), (2, 3), (2, 6), (3, 5), (5, 12), (5, 11),
    (11, 13), (6, 7), (7, 14), (7, 15), (7, 9), (9, 16), (9, 17), (9, 18),
]


@pytest.fixture
def example_tree() -> Graph:
    return Graph(18, tuple((u - 1, v - 1) for u, v in EXAMPLE_TREE_EDGES))


@pytest.fixture
def example_cnf() -> str:
    # (x1 or not x2 or x3) and (x2 or x3 or not x4)
    return "c example\np cnf 4 2\n1 -2 3 0\n2 3 -4 0\n"


@pytest.fixture
def small_corpus():
    """Connected graphs with known metric dimension."""
    return [
        ("path:5", 1),
        ("cycle:6", 2),
        ("complete:5", 4),
        ("complete_bipartite:2x3", 3),
        ("grid:4x3", 2),
        ("fan:7", 3),
        ("wheel:8", 3),
        ("petersen2:5", 3),
        ("prism:5", 2),
        ("prism:6", 3),
        ("hypercube:3", 3),
        ("hamming:k=2,a=3", 3),
    ]
