# backend/application_service.py
import logging
import math
from itertools import combinations, permutations
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from application_schema import CanonicalForm, HighDegreeLabeling, SequenceEmbedding, SpreadObservation
from approx_service import ich
from errors import InconsistentObservationError, InputError, ObserversNotDoublyResolvingError
from exact_service import brute_force_beta
from family_service import DIGITS, hamming_labels
from graph_service import DistanceMatrix, Graph, all_pairs_distances, check_members, connected_components, is_connected, twin_classes
from resolving_service import first_collision, is_doubly_resolving

logger = logging.getLogger(__name__)

Observations = Union[Mapping[int, int], Sequence[SpreadObservation], Sequence[int]]


# --- source localisation ----------------------------------------------------

def spread_simulate(g: Graph, source: int, t0: int, observers: Sequence[int]) -> List[SpreadObservation]:
    """Arrival times of a unit-speed spread started at `source` at time t0."""
    if not is_connected(g):
        raise InputError("spread simulation needs a connected graph")
    observers = check_members(g.n, observers)
    if not observers:
        raise InputError("at least one observer is required")
    check_members(g.n, [source])
    d = all_pairs_distances(g)
    return [SpreadObservation(observer=r, arrival_time=t0 + int(d.values[source, r])) for r in observers]


def _times(observers: List[int], observations: Observations) -> List[int]:
    if isinstance(observations, Mapping):
        by_observer = dict(observations)
    elif observations and isinstance(observations[0], SpreadObservation):
        by_observer = {o.observer: o.arrival_time for o in observations}
    else:
        if len(observations) != len(observers):
            raise InputError(f"{len(observers)} observers but {len(observations)} arrival times")
        by_observer = dict(zip(observers, observations))
    missing = [r for r in observers if r not in by_observer]
    if missing:
        raise InputError(f"no arrival time for observers {missing}")
    return [int(by_observer[r]) for r in observers]


def locate_source(g: Graph, observers: Sequence[int], observations: Observations) -> int:
    """Recover the source from arrival times without knowing the start time.

    Differences are anchored at the first observer: the source is the vertex v
    with d(v, r) - d(v, r_1) = t_r - t_r1 for every observer r.
    """
    if not is_connected(g):
        raise InputError("source localisation needs a connected graph")
    observers = check_members(g.n, observers)
    if len(observers) < 2:
        raise ObserversNotDoublyResolvingError(
            f"a doubly resolving observer set needs at least 2 members, got {len(observers)}"
        )
    d = all_pairs_distances(g)
    check = is_doubly_resolving(d, observers)
    if not check:
        u, v = check.witness
        raise ObserversNotDoublyResolvingError(f"observers cannot tell sources {u} and {v} apart")

    times = np.asarray(_times(observers, observations), dtype=np.int64)
    cols = d.columns(observers)
    signature = cols - cols[:, :1]
    matches = np.flatnonzero((signature == (times - times[0])[None, :]).all(axis=1))
    if matches.size == 0:
        raise InconsistentObservationError("no vertex explains the observed arrival times")
    if matches.size > 1:
        raise ObserversNotDoublyResolvingError(f"vertices {matches.tolist()} explain the observations equally")
    source = int(matches[0])
    logger.info(f"located source {source} (start time {int(times[0] - cols[source, 0])})")
    return source


# --- canonical labelling ----------------------------------------------------

def minimum_resolving_sets(d: DistanceMatrix, beta: Optional[int] = None) -> List[Tuple[int, ...]]:
    """Every resolving set of minimum size, in lexicographic order."""
    if beta is None:
        beta = brute_force_beta(d).beta
    values = d.values
    return [r for r in combinations(range(d.n), beta) if first_collision(values[:, list(r)]) is None]


def _connected_canonical(g: Graph) -> Tuple[bytes, List[int]]:
    """Smallest flattened adjacency over all minimum resolving sets and their orders."""
    n = g.n
    if n == 1:
        return b"\x00", [0]
    d = all_pairs_distances(g)
    adj = g.adjacency.toarray().astype(np.uint8)
    twin_of = {}
    for cls in twin_classes(g):
        for v in cls:
            twin_of[v] = cls[0]

    best: Optional[bytes] = None
    best_order: List[int] = []
    for r in minimum_resolving_sets(d):
        for pi in permutations(r):
            # twins are interchangeable: keep only orders listing them ascending
            last: Dict[int, int] = {}
            skip = False
            for v in pi:
                cls = twin_of[v]
                if cls in last and last[cls] > v:
                    skip = True
                    break
                last[cls] = v
            if skip:
                continue
            keys = d.values[list(pi), :]
            order = np.lexsort(keys[::-1])
            flat = adj[np.ix_(order, order)].tobytes()
            if best is None or flat < best:
                best, best_order = flat, order.tolist()
    return best, best_order


def canonical_form(g: Graph) -> CanonicalForm:
    """Canonical adjacency matrix; components are canonised separately and
    concatenated in order of (size, canonical matrix)."""
    if g.n == 0:
        return CanonicalForm(n=0, matrix=(), labeling=())
    parts = []
    for members in connected_components(g):
        flat, order = _connected_canonical(g.induced_subgraph(members))
        parts.append((len(members), flat, [members[i] for i in order]))
    parts.sort(key=lambda part: (part[0], part[1]))
    order = [v for _, _, vertices in parts for v in vertices]
    adj = g.adjacency.toarray().astype(np.uint8)
    matrix = adj[np.ix_(order, order)].reshape(-1)
    labeling = [0] * g.n
    for position, v in enumerate(order):
        labeling[v] = position
    return CanonicalForm(n=g.n, matrix=tuple(int(x) for x in matrix), labeling=tuple(labeling))


def is_isomorphic(g1: Graph, g2: Graph) -> bool:
    if g1.n != g2.n or g1.m != g2.m:
        return False
    if sorted(g1.degrees.tolist()) != sorted(g2.degrees.tolist()):
        return False
    return canonical_form(g1).key == canonical_form(g2).key


def high_degree_labeling(g: Graph) -> HighDegreeLabeling:
    """Label vertices by adjacency to the ceil(3 log2 n) highest-degree vertices."""
    n = g.n
    if n == 0:
        return HighDegreeLabeling(selected=[], labels=[], patterns_unique=True, degrees_distinct=True)
    count = min(n, math.ceil(3 * math.log2(n))) if n > 1 else 1
    deg = g.degrees.tolist()
    selected = sorted(range(n), key=lambda v: (-deg[v], v))[:count]
    adj = g.adjacency.toarray()[:, selected]
    labels = ["".join(str(int(x)) for x in row) for row in adj.tolist()]
    chosen_degrees = [deg[v] for v in selected]
    return HighDegreeLabeling(
        selected=selected,
        labels=labels,
        patterns_unique=len(set(labels)) == n,
        degrees_distinct=len(set(chosen_degrees)) == len(chosen_degrees),
    )


# --- sequence embedding -----------------------------------------------------

def _digits(strings: Sequence[str], a: int, k: int, what: str) -> np.ndarray:
    alphabet = DIGITS[:a]
    out = np.zeros((len(strings), k), dtype=np.int64)
    for i, s in enumerate(strings):
        if len(s) != k:
            raise InputError(f"{what} {s!r} has length {len(s)}, expected {k}")
        for j, ch in enumerate(s):
            pos = alphabet.find(ch)
            if pos < 0:
                raise InputError(f"{what} {s!r} uses {ch!r}, outside the alphabet {alphabet!r}")
            out[i, j] = pos
    return out


def hamming_distance_matrix(k: int, a: int) -> DistanceMatrix:
    """Distances of H_{k,a} computed from the strings, in hamming(k, a) order."""
    codes = _digits(hamming_labels(k, a), a, k, "vertex")
    return DistanceMatrix((codes[:, None, :] != codes[None, :, :]).sum(axis=2))


def hamming_landmarks(a: int, k: int) -> List[str]:
    """Landmark strings picked by the entropy heuristic on H_{k,a}."""
    labels = hamming_labels(k, a)
    result = ich(hamming_distance_matrix(k, a))
    return [labels[v] for v in result.witness]


def embed_sequences(a: int, k: int, landmarks: Sequence[str], sequences: Optional[Sequence[str]] = None) -> SequenceEmbedding:
    """Hamming distances of every sequence to every landmark.

    Without `sequences` all a^k strings are embedded.
    """
    if a < 2 or k < 1:
        raise InputError(f"need a >= 2 and k >= 1, got a={a}, k={k}")
    if not landmarks:
        raise InputError("at least one landmark is required")
    sequences = list(sequences) if sequences is not None else hamming_labels(k, a)
    marks = _digits(landmarks, a, k, "landmark")
    seqs = _digits(sequences, a, k, "sequence")
    vectors = (seqs[:, None, :] != marks[None, :, :]).sum(axis=2)
    distinct = {s: tuple(v) for s, v in zip(sequences, vectors.tolist())}
    return SequenceEmbedding(
        a=a,
        k=k,
        landmarks=list(landmarks),
        sequences=sequences,
        vectors=vectors.tolist(),
        injective=len(set(distinct.values())) == len(distinct),
        complete=len(distinct) == a ** k,
    )
