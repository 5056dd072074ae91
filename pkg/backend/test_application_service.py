# backend/test_application_service.py
from itertools import combinations

import networkx as nx
import pytest

from application_service import (
    canonical_form,
    embed_sequences,
    hamming_landmarks,
    high_degree_labeling,
    is_isomorphic,
    locate_source,
    minimum_resolving_sets,
    spread_simulate,
)
from conftest import family, to_graph, to_networkx
from errors import InconsistentObservationError, InputError, ObserversNotDoublyResolvingError
from exact_service import brute_force_variant
from family_service import erdos_renyi, uniform_tree
from graph_service import Graph, all_pairs_distances
from rng import SplitMix64, derive_seed


# --- source localisation ----------------------------------------------------


def test_centre_of_path_from_equal_times():
    assert locate_source(family("path:5"), [0, 4], [9, 9]) == 2


def test_path_sources_for_every_start_time():
    g = family("path:6")
    for source in range(6):
        for t0 in range(-5, 6):
            observations = spread_simulate(g, source, t0, [0, 5])
            assert locate_source(g, [0, 5], observations) == source


def test_observations_as_mapping():
    g = family("path:6")
    assert locate_source(g, [0, 5], {5: 7, 0: 10}) == 4


def test_single_observer_is_rejected():
    with pytest.raises(ObserversNotDoublyResolvingError):
        locate_source(family("path:5"), [0], [3])


def test_observers_must_be_doubly_resolving():
    with pytest.raises(ObserversNotDoublyResolvingError):
        locate_source(family("path:6"), [0, 1], [3, 4])


def test_impossible_times():
    with pytest.raises(InconsistentObservationError):
        locate_source(family("path:5"), [0, 4], [0, 10])


def test_missing_times():
    with pytest.raises(InputError):
        locate_source(family("path:5"), [0, 4], {0: 1})


def _check_localisation(g: Graph):
    observers = brute_force_variant(g, "doubly").witness
    for source in range(g.n):
        for t0 in range(-5, 6):
            observations = spread_simulate(g, source, t0, observers)
            assert locate_source(g, observers, observations) == source


def test_grid_localisation():
    _check_localisation(family("grid:5x4"))


def test_tree_localisation():
    for i in range(5):
        rng = SplitMix64(derive_seed(31, i))
        _check_localisation(uniform_tree(4 + rng.randbelow(8), rng))


def test_localisation_on_small_corpus(small_corpus):
    for text, _ in small_corpus:
        _check_localisation(family(text))


@pytest.mark.slow
def test_tree_localisation_corpus():
    for i in range(20):
        rng = SplitMix64(derive_seed(37, i))
        _check_localisation(uniform_tree(4 + rng.randbelow(12), rng))


# --- canonical labelling ----------------------------------------------------


def test_minimum_resolving_sets_of_cycle():
    sets = minimum_resolving_sets(all_pairs_distances(family("cycle:4")))
    assert sets == [(0, 1), (0, 3), (1, 2), (2, 3)]


def test_canonical_form_is_invariant_under_relabeling(small_corpus):
    for text, _ in small_corpus[:8]:
        g = family(text)
        reference = canonical_form(g)
        for i in range(10):
            perm = SplitMix64(derive_seed(5, i)).sample(g.n, g.n)
            h = g.relabel(perm)
            assert canonical_form(h).key == reference.key, text


def test_labeling_maps_graph_onto_matrix():
    g = family("petersen2:5")
    form = canonical_form(g)
    n = form.n
    for u, v in g.edges:
        assert form.matrix[form.labeling[u] * n + form.labeling[v]] == 1
    assert sum(form.matrix) == 2 * g.m
    assert form.rows()[0].count("1") == 3


def test_five_vertex_graphs_fall_into_34_classes():
    pairs = list(combinations(range(5), 2))
    keys = set()
    for mask in range(1 << len(pairs)):
        edges = tuple(p for bit, p in enumerate(pairs) if mask >> bit & 1)
        keys.add(canonical_form(Graph(5, edges)).key)
    assert len(keys) == 34


def test_regular_graphs_told_apart():
    assert not is_isomorphic(family("complete_bipartite:3x3"), family("prism:3"))
    assert not is_isomorphic(family("cycle:6"), family("union:cycle:3/cycle:3"))
    assert is_isomorphic(family("prism:4"), family("hypercube:3"))


def test_trees_with_equal_degree_sequences():
    spread = to_graph([(0, 1), (1, 2), (2, 3), (3, 4), (1, 5), (3, 6)])
    clustered = to_graph([(0, 1), (1, 2), (2, 3), (3, 4), (1, 5), (2, 6)])
    assert sorted(spread.degrees.tolist()) == sorted(clustered.degrees.tolist())
    assert not is_isomorphic(spread, clustered)


def test_isomorphism_agrees_with_networkx():
    for i in range(30):
        a = erdos_renyi(7, 0.4, SplitMix64(derive_seed(11, i)))
        b = erdos_renyi(7, 0.4, SplitMix64(derive_seed(12, i)))
        assert is_isomorphic(a, b) == nx.is_isomorphic(to_networkx(a), to_networkx(b))
        assert is_isomorphic(a, a.relabel(SplitMix64(i).sample(7, 7)))


# --- high-degree labelling --------------------------------------------------


def test_high_degree_labeling_on_complete_graph():
    result = high_degree_labeling(family("complete:8"))
    assert result.patterns_unique
    assert not result.degrees_distinct
    assert not result.success


def test_high_degree_labeling_on_star():
    result = high_degree_labeling(family("join:complete:1/empty:8"))
    assert result.selected[0] == 0
    assert not result.patterns_unique


def test_high_degree_labeling_on_random_graphs():
    unique = 0
    for i in range(100):
        g = erdos_renyi(128, 0.5, SplitMix64(derive_seed(128, i)))
        result = high_degree_labeling(g)
        assert len(result.selected) == 21
        degrees = g.degrees.tolist()
        chosen = [degrees[v] for v in result.selected]
        rest = [d for v, d in enumerate(degrees) if v not in set(result.selected)]
        assert min(chosen) >= max(rest)
        assert result.degrees_distinct == (len(set(chosen)) == len(chosen))
        assert result.success == (result.patterns_unique and result.degrees_distinct)
        unique += result.patterns_unique
    assert unique >= 90


def test_high_degree_labeling_success_on_single_vertex():
    result = high_degree_labeling(Graph(1))
    assert result.selected == [0]
    assert result.patterns_unique and result.degrees_distinct
    assert result.success


# --- sequence embedding -----------------------------------------------------


def test_landmarks_embed_all_sequences():
    landmarks = hamming_landmarks(4, 3)
    assert len(landmarks) <= 12
    embedding = embed_sequences(4, 3, landmarks)
    assert embedding.injective
    assert embedding.complete
    assert len(embedding.vectors) == 64


def test_single_landmark_collides():
    embedding = embed_sequences(4, 3, ["000"])
    assert not embedding.injective


def test_embedding_of_chosen_sequences():
    embedding = embed_sequences(2, 3, ["000", "011"], ["101", "110"])
    assert embedding.vectors == [[2, 2], [2, 2]]
    assert not embedding.complete
    assert embedding.to_csv().splitlines()[0] == "sequence,000,011"


def test_embedding_rejects_bad_strings():
    with pytest.raises(InputError, match="length"):
        embed_sequences(4, 3, ["00"])
    with pytest.raises(InputError, match="alphabet"):
        embed_sequences(4, 3, ["00z"])
    with pytest.raises(InputError):
        embed_sequences(4, 3, [])
