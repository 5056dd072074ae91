# backend/test_family_service.py
import math
from collections import Counter
from itertools import combinations

import networkx as nx
import pytest

from conftest import to_networkx
from errors import InputError
from family_schema import FamilySpec, RandomSpec
from family_service import (
    erdos_renyi,
    generate,
    generate_from_string,
    grid_coordinates,
    grid_index,
    hamming_labels,
    hexagon,
    hexagon_faces,
    honeycomb,
    parse_spec,
    prufer_decode,
    prufer_encode,
    sbm,
    uniform_tree,
)
from graph_service import all_pairs_distances, is_connected, is_tree, twin_classes
from rng import SplitMix64, derive_seed


@pytest.mark.parametrize(
    "text, n, m",
    [
        ("path:5", 5, 4),
        ("cycle:6", 6, 6),
        ("complete:5", 5, 10),
        ("kst:2x3", 5, 6),
        ("grid:4x3", 12, 17),
        ("grid:2x2x2", 8, 12),
        ("fan:7", 8, 13),
        ("wheel:8", 9, 16),
        ("q:4", 16, 32),
        ("hamming:k=2,a=4", 16, 48),
        ("prism:5", 10, 15),
        ("petersen2:5", 10, 15),
        ("empty:3", 3, 0),
    ],
)
def test_family_sizes(text, n, m):
    g, _ = generate_from_string(text)
    assert (g.n, g.m) == (n, m)


def test_petersen_graph_matches_networkx():
    g = generate(FamilySpec(kind="petersen2", n=5))
    assert nx.is_isomorphic(to_networkx(g), nx.petersen_graph())


def test_hypercube_matches_networkx():
    g, _ = generate_from_string("hypercube:4")
    assert nx.is_isomorphic(to_networkx(g), nx.hypercube_graph(4))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_hexagon_network_size(n):
    g = hexagon(n)
    assert g.n == 3 * n * n - 3 * n + 1
    assert is_connected(g)


def test_hexagon_corner_degrees():
    g = hexagon(3)
    assert sorted(g.degrees.tolist()).count(3) == 6
    assert max(g.degrees.tolist()) == 6


@pytest.mark.parametrize("n", [1, 2, 3])
def test_honeycomb_is_bounded_dual(n):
    g = honeycomb(n)
    faces = hexagon_faces(n + 1)
    host = hexagon(n + 1)
    assert g.n == len(faces) == 6 * n * n
    for x, y, z in faces:
        assert host.has_edge(x, y) and host.has_edge(x, z) and host.has_edge(y, z)
    for f, h in combinations(range(g.n), 2):
        shares_side = len(set(faces[f]) & set(faces[h])) == 2
        assert g.has_edge(f, h) == shares_side, (faces[f], faces[h])
    degrees = g.degrees.tolist()
    assert max(degrees) <= 3
    if n >= 2:
        assert max(degrees) == 3
    assert is_connected(g)


def test_honeycomb_one_is_a_hexagon():
    assert nx.is_isomorphic(to_networkx(honeycomb(1)), nx.cycle_graph(6))


def test_hamming_labels_follow_vertex_order():
    labels = hamming_labels(2, 3)
    assert labels[:4] == ["00", "01", "02", "10"]
    d = all_pairs_distances(generate(FamilySpec(kind="hamming", k=2, a=3)))
    for u in range(9):
        for v in range(9):
            expected = sum(x != y for x, y in zip(labels[u], labels[v]))
            assert d.values[u, v] == expected


def test_grid_coordinates_are_row_major():
    assert grid_index((4, 3), (0, 2)) == 2
    assert grid_coordinates((4, 3), 11) == (3, 2)


def test_nested_join_and_union():
    spec = parse_spec("join:complete:1/(union:path:2/path:3)")
    assert spec.kind == "join"
    assert spec.right.kind == "disjoint_union"
    g = generate(spec)
    assert (g.n, g.m) == (6, 5 + 1 + 2)
    assert parse_spec(spec.label) == spec


def test_spec_labels_round_trip():
    for text in ["grid:4x3x2", "hamming:k=3,a=4", "complete_bipartite:2x5", "fan:12"]:
        spec = parse_spec(text)
        assert parse_spec(spec.label) == spec


def test_bad_specs():
    with pytest.raises(InputError):
        parse_spec("cycle:2")
    with pytest.raises(InputError):
        parse_spec("fan")
    with pytest.raises(InputError):
        parse_spec("grid:4x0")
    with pytest.raises(InputError, match="seed"):
        parse_spec("er:n=10,p=0.5")
    with pytest.raises(InputError):
        parse_spec("er:n=10,p=1.5,seed=1")
    with pytest.raises(InputError):
        parse_spec("sbm:sizes=5x5,p=0.5x0.1x0.2x0.5,seed=1")


def test_random_specs_parse():
    spec = parse_spec("sbm:sizes=50x50,p=0.5x0.1x0.1x0.5,seed=3")
    assert isinstance(spec, RandomSpec)
    assert spec.sizes == (50, 50)
    assert spec.probs == ((0.5, 0.1), (0.1, 0.5))
    tree = parse_spec("tree:n=30,seed=9")
    assert tree.kind == "uniform_tree"


def test_prufer_decode_matches_networkx():
    code = [3, 3, 0, 5, 5, 1]
    g = prufer_decode(code)
    oracle = nx.from_prufer_sequence(code)
    assert set(g.edges) == {tuple(sorted(e)) for e in oracle.edges()}
    assert prufer_encode(g) == code


def test_prufer_encode_matches_networkx_on_random_tree():
    g = uniform_tree(40, SplitMix64(11))
    assert prufer_encode(g) == nx.to_prufer_sequence(to_networkx(g))


def test_prufer_rejects_bad_sequences():
    with pytest.raises(InputError):
        prufer_decode([0, 9], 4)
    with pytest.raises(InputError):
        prufer_decode([0], 4)


def test_uniform_tree_is_seeded():
    a = uniform_tree(50, SplitMix64(5))
    b = uniform_tree(50, SplitMix64(5))
    c = uniform_tree(50, SplitMix64(6))
    assert a == b
    assert a != c
    assert is_tree(a)


def test_erdos_renyi_is_seeded():
    a = erdos_renyi(30, 0.3, SplitMix64(1))
    assert a == erdos_renyi(30, 0.3, SplitMix64(1))
    assert erdos_renyi(10, 0.0, SplitMix64(1)).m == 0
    assert erdos_renyi(10, 1.0, SplitMix64(1)).m == 45


def test_sbm_blocks():
    g = sbm([4, 4], [[1.0, 0.0], [0.0, 1.0]], SplitMix64(2))
    assert g.m == 12
    assert not is_connected(g)


def test_splitmix_reference_value():
    assert SplitMix64(0).next_u64() == 0xE220A8397B1DCDAF


def test_derive_seed_is_stable_and_spread():
    seeds = [derive_seed(42, i) for i in range(100)]
    assert seeds == [derive_seed(42, i) for i in range(100)]
    assert len(set(seeds)) == 100


def test_randbelow_and_sample_ranges():
    rng = SplitMix64(3)
    assert all(0 <= rng.randbelow(7) < 7 for _ in range(200))
    sample = rng.sample(20, 5)
    assert len(set(sample)) == 5 and all(0 <= x < 20 for x in sample)


@pytest.mark.parametrize("k, a", [(2, 3), (3, 3), (2, 5), (3, 4)])
def test_hamming_adjacency_is_one_differing_coordinate(k, a):
    g = generate(FamilySpec(kind="hamming", k=k, a=a))
    labels = hamming_labels(k, a)
    assert g.n == a ** k
    for u, v in combinations(range(g.n), 2):
        differ = sum(x != y for x, y in zip(labels[u], labels[v]))
        assert g.has_edge(u, v) == (differ == 1), (labels[u], labels[v])


@pytest.mark.parametrize(
    "text",
    ["complete_bipartite:2x3", "complete:5", "fan:4", "join:complete:2/empty:3", "union:path:2/cycle:4", "grid:3x2"],
)
def test_twins_see_everyone_else_alike(text):
    g, _ = generate_from_string(text)
    d = all_pairs_distances(g).values
    for cls in twin_classes(g):
        for u, v in combinations(cls, 2):
            others = [w for w in range(g.n) if w not in (u, v)]
            assert (d[u, others] == d[v, others]).all(), (u, v)


def test_twins_of_random_graphs():
    for i in range(30):
        g = erdos_renyi(9, 0.5, SplitMix64(derive_seed(21, i)))
        d = all_pairs_distances(g).values
        for cls in twin_classes(g):
            for u, v in combinations(cls, 2):
                others = [w for w in range(g.n) if w not in (u, v)]
                assert (d[u, others] == d[v, others]).all()


def test_uniform_tree_frequencies_on_five_vertices():
    rng = SplitMix64(2024)
    samples = 12500
    counts = Counter(tuple(prufer_encode(uniform_tree(5, rng))) for _ in range(samples))
    assert len(counts) == 125
    p = 1 / 125
    mean, sigma = samples * p, math.sqrt(samples * p * (1 - p))
    assert all(abs(c - mean) <= 5 * sigma for c in counts.values())


def test_prufer_round_trip_on_sampled_trees():
    for i in range(60):
        rng = SplitMix64(derive_seed(77, i))
        n = 2 + rng.randbelow(60)
        code = [rng.randbelow(n) for _ in range(n - 2)]
        tree = prufer_decode(code, n)
        assert is_tree(tree)
        assert prufer_encode(tree) == code
        sampled = uniform_tree(n, rng)
        assert prufer_decode(prufer_encode(sampled), n) == sampled


@pytest.mark.parametrize("n, p", [(60, 0.3), (40, 0.05), (80, 0.5)])
def test_erdos_renyi_edge_count(n, p):
    pairs = n * (n - 1) // 2
    mean, sigma = p * pairs, math.sqrt(pairs * p * (1 - p))
    for i in range(20):
        g = erdos_renyi(n, p, SplitMix64(derive_seed(n, i)))
        assert abs(g.m - mean) <= 4 * sigma, (i, g.m)
