# backend/exact_service.py
import logging
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
from networkx.algorithms import isomorphism
from scipy.sparse.csgraph import breadth_first_order

from approx_service import ich
from config import get_settings
from errors import InputError, UnresolvableError
from family_schema import FamilySpec
from family_service import complete, complete_bipartite, disjoint_union, empty, generate, grid_index, hexagon_coordinates, join
from graph_service import INF, DistanceMatrix, Graph, all_pairs_distances, check_members, connected_components, diameter, is_connected, is_tree, truncate_distances, twin_classes
from resolving_service import GeneralTable, Variant, is_resolving, parse_variant, resolves_table, strong_coverage
from result_schema import Beta2Report, BetaInterval, BetaResult, Method

logger = logging.getLogger(__name__)

# Exact metric dimension of the hypercube Q_k for k = 1..10.
HYPERCUBE_BETA = {1: 1, 2: 2, 3: 3, 4: 4, 5: 4, 6: 5, 7: 6, 8: 6, 9: 7, 10: 7}

CodesFn = Callable[[Tuple[int, ...], np.ndarray], np.ndarray]


# --- lexicographic subset search --------------------------------------------

def _compress(keys: np.ndarray) -> np.ndarray:
    _, inverse = np.unique(keys, return_inverse=True)
    return inverse.reshape(-1).astype(np.int64)


def _column_codes(table) -> np.ndarray:
    """Per-column ranks of the table entries, so every code is below n_rows."""
    raw = table.columns(range(table.n_cols))
    codes = np.empty(raw.shape, dtype=np.int64)
    for c in range(raw.shape[1]):
        codes[:, c] = _compress(raw[:, c])
    return codes


def _lex_search(n_rows: int, n_cols: int, k: int, column_codes: CodesFn, spread: int) -> Optional[Tuple[int, ...]]:
    """First k-subset of columns, in lexicographic order, whose codes separate every row.

    `spread` bounds the number of distinct codes a single column can contribute;
    a prefix whose largest class cannot be split by the remaining columns is cut.
    """
    if n_rows <= 1:
        return tuple(range(k)) if k <= n_cols else None
    if k == 0 or k > n_cols:
        return None
    capacity = [spread ** r for r in range(k + 1)]

    def extend(prefix: Tuple[int, ...], ids: np.ndarray, start: int, left: int) -> Optional[Tuple[int, ...]]:
        if left == 1:
            cols = np.arange(start, n_cols)
            if cols.size == 0:
                return None
            block = column_codes(prefix, cols)
            keys = ids[:, None] * (int(block.max()) + 1) + block
            keys.sort(axis=0)
            ok = ~(keys[1:] == keys[:-1]).any(axis=0)
            hits = np.flatnonzero(ok)
            return prefix + (int(cols[hits[0]]),) if hits.size else None
        for c in range(start, n_cols - left + 1):
            col = column_codes(prefix, np.array([c]))[:, 0]
            refined = _compress(ids * (int(col.max()) + 1) + col)
            if int(np.bincount(refined).max()) > capacity[left - 1]:
                continue
            found = extend(prefix + (c,), refined, c + 1, left - 1)
            if found is not None:
                return found
        return None

    return extend((), np.zeros(n_rows, dtype=np.int64), 0, k)


def _matrix_twin_bound(d: DistanceMatrix) -> int:
    """Twin lower bound read off a distance matrix.

    Rows u and v that agree outside columns u and v can only be separated by u or
    v. Groups of such rows are cliques of the relation on graph metrics and then
    contribute size - 1; any other group still forces one member.
    """
    values = d.values
    n = d.n
    if n < 2:
        return 0
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    twin = np.zeros((n, n), dtype=bool)
    idx = np.arange(n)
    for u in range(n):
        mism = values[u][None, :] != values
        outside = mism.sum(axis=1) - mism[:, u] - mism[idx, idx]
        row = outside == 0
        row[u] = False
        twin[u] = row
        for v in np.flatnonzero(row[u + 1:]).tolist():
            parent[find(u)] = find(u + 1 + v)
    groups: Dict[int, List[int]] = {}
    for v in range(n):
        groups.setdefault(find(v), []).append(v)
    bound = 0
    for members in groups.values():
        if len(members) < 2:
            continue
        sub = twin[np.ix_(members, members)]
        clique = bool((sub | np.eye(len(members), dtype=bool)).all())
        bound += len(members) - 1 if clique else 1
    return bound


def _value_bound(d, codes: np.ndarray) -> int:
    """Counting bound: distinct vectors available must cover every row."""
    n = d.n_rows
    if isinstance(d, DistanceMatrix) and np.array_equal(d.values == 0, np.eye(n, dtype=bool)):
        # zeros only on the diagonal: only landmarks see a 0, everyone else
        # sees one of s nonzero values
        s = max(int(np.unique(d.values[:, c][d.values[:, c] != 0]).size) for c in range(d.n_cols))
        k = 0
        while n - k > s ** k:
            k += 1
        return k
    s = int(codes.max()) + 1 if codes.size else 1
    k = 0
    while s ** k < n:
        k += 1
    return k


def lower_bound(d) -> int:
    """Largest of the twin and counting bounds (twin bound only for square metrics)."""
    if d.n_rows <= 1:
        return 0
    codes = _column_codes(d)
    bound = _value_bound(d, codes)
    if isinstance(d, DistanceMatrix):
        bound = max(bound, _matrix_twin_bound(d))
    return bound


def find_resolving_set(d, k: int) -> Optional[List[int]]:
    """Lexicographically first resolving column set of size exactly k, if any."""
    codes = _column_codes(d)
    spread = int(codes.max()) + 1 if codes.size else 1
    found = _lex_search(d.n_rows, d.n_cols, k, lambda prefix, cols: codes[:, cols], spread)
    return None if found is None else list(found)


def brute_force_beta(d: Union[DistanceMatrix, GeneralTable]) -> BetaResult:
    """Smallest resolving column set by exhaustive lexicographic search.

    Works on any table: graph distance matrices, truncated matrices and
    multilateration tables alike.

    Args:
        d: DistanceMatrix or GeneralTable

    Returns:
        BetaResult whose witness is the lexicographically smallest optimal set
    """
    n = d.n_rows
    if n <= 1:
        return BetaResult(beta=0, witness=[], method=Method.brute_force)
    everything = resolves_table(d, range(d.n_cols))
    if not everything:
        raise UnresolvableError(everything.witness)

    codes = _column_codes(d)
    spread = int(codes.max()) + 1
    start = max(1, lower_bound(d))
    logger.debug(f"brute force on {n} rows starts at size {start}")
    for k in range(start, d.n_cols + 1):
        found = _lex_search(n, d.n_cols, k, lambda prefix, cols: codes[:, cols], spread)
        if found is not None:
            logger.info(f"brute force: beta={k} on {n} rows")
            return BetaResult(beta=k, witness=list(found), method=Method.brute_force)
        logger.debug(f"no resolving set of size {k}")
    # unreachable: the full column set resolves
    raise UnresolvableError(everything.witness or (0, 1))


def _doubly_search(d: DistanceMatrix) -> BetaResult:
    n = d.n
    if n < 2:
        raise InputError("doubly resolving sets need at least two vertices")
    if not d.is_finite():
        raise InputError("doubly resolving sets need finite distances (connected graph)")
    values = d.values
    top = int(values.max())

    def codes(prefix, cols):
        if not prefix:
            return np.zeros((n, len(cols)), dtype=np.int64)
        return values[:, cols] - values[:, [prefix[0]]] + top

    start = max(2, lower_bound(d))
    for k in range(start, n + 1):
        found = _lex_search(n, n, k, codes, 2 * top + 1)
        if found is not None:
            return BetaResult(beta=k, witness=list(found), method=Method.brute_force)
    raise InputError("no doubly resolving set exists")


def _strong_search(g: Graph, d: DistanceMatrix) -> BetaResult:
    if not is_connected(g):
        raise InputError("strong resolvability is only defined on connected graphs")
    n = g.n
    if n <= 1:
        return BetaResult(beta=0, witness=[], method=Method.brute_force)
    iu, iv = np.triu_indices(n, 1)
    pair_count = iu.size
    full = (1 << pair_count) - 1
    table = np.stack([strong_coverage(d, s)[iu, iv] for s in range(n)])
    cover = [sum(1 << int(p) for p in np.flatnonzero(row)) for row in table]
    # highest-index vertex able to cover each pair; u and v always cover (u, v)
    last_cover = (n - 1 - np.argmax(table[::-1], axis=0)).tolist()

    def extend(prefix, mask, start, left):
        if mask == full:
            return prefix if left == 0 else None
        if left == 0:
            return None
        lowest = (~mask & (mask + 1)).bit_length() - 1
        if last_cover[lowest] < start:
            return None
        for c in range(start, n - left + 1):
            found = extend(prefix + (c,), mask | cover[c], c + 1, left - 1)
            if found is not None:
                return found
        return None

    start = max(1, lower_bound(d))
    for k in range(start, n + 1):
        found = extend((), 0, 0, k)
        if found is not None:
            return BetaResult(beta=k, witness=list(found), method=Method.brute_force)
    raise InputError("no strong resolving set exists")


def brute_force_variant(g: Graph, variant: Union[Variant, str], d: Optional[DistanceMatrix] = None) -> BetaResult:
    """Smallest set for the doubly, strong or truncated predicate."""
    if isinstance(variant, str):
        variant = parse_variant(variant)
    if d is None:
        d = all_pairs_distances(g)
    if variant.kind == "resolving":
        return brute_force_beta(d)
    if variant.kind == "truncated":
        return brute_force_beta(truncate_distances(d, variant.k))
    if variant.kind == "doubly":
        if not is_connected(g):
            raise InputError("doubly resolving sets are only defined on connected graphs")
        return _doubly_search(d)
    return _strong_search(g, d)


# --- trees ------------------------------------------------------------------

def tree_beta(g: Graph) -> BetaResult:
    """Metric dimension of a tree: leaves minus exterior major vertices.

    Each leaf walks its leg up to the first vertex of degree >= 3; the smallest
    leaf of every such vertex is dropped from the witness.
    """
    if not is_tree(g):
        raise InputError("tree_beta requires a tree (connected and acyclic)")
    if g.n == 1:
        return BetaResult(beta=0, witness=[], method=Method.tree_formula)
    deg = g.degrees.tolist()
    leaves = [v for v, dv in enumerate(deg) if dv == 1]
    if max(deg) <= 2:
        return BetaResult(beta=1, witness=[leaves[0]], method=Method.tree_formula)

    indptr = g.adjacency.indptr.tolist()
    indices = g.adjacency.indices.tolist()
    legs: Dict[int, List[int]] = {}
    for leaf in leaves:
        prev, cur = -1, leaf
        while deg[cur] < 3:
            a = indptr[cur]
            nxt = indices[a] if indices[a] != prev else indices[a + 1]
            prev, cur = cur, nxt
        legs.setdefault(cur, []).append(leaf)
    witness = sorted(leaf for owned in legs.values() for leaf in owned[1:])
    return BetaResult(beta=len(witness), witness=witness, method=Method.tree_formula)


# --- closed forms -----------------------------------------------------------

def fan_resolving_set(n: int) -> List[int]:
    """Resolving set of the fan F_n built block by block (hub 0, path 1..n)."""
    if n < 7:
        raise InputError(f"the block construction needs n >= 7, got {n}")
    members = []
    for j in range(n // 5):
        members += [5 * j + 2, 5 * j + 4]
    tail = n % 5
    if tail in (2, 3):
        members.append(n)
    elif tail == 4:
        members += [n - 2, n]
    return sorted(members)


def closed_form_beta(spec: FamilySpec) -> Optional[int]:
    """Known value of beta for the family, or None outside a formula's range."""
    kind = spec.kind
    if kind == "path" and spec.n >= 2:
        return 1
    if kind == "cycle":
        return 2
    if kind == "complete" and spec.n >= 2:
        return spec.n - 1
    if kind == "complete_bipartite" and spec.s + spec.t >= 3:
        return spec.s + spec.t - 2
    if kind == "grid" and min(spec.dims) > 1:
        return len(spec.dims)
    if kind in ("fan", "wheel") and spec.n >= 7:
        return (2 * spec.n + 2) // 5
    if kind == "hamming" and spec.k == 2:
        return 2 * (2 * spec.a - 1) // 3
    if kind == "hypercube" or (kind == "hamming" and spec.a == 2):
        return HYPERCUBE_BETA.get(spec.k)
    if kind in ("hexagon", "honeycomb") and spec.n >= 2:
        return 3
    if kind == "prism":
        return 2 if spec.n % 2 else 3
    if kind == "petersen2":
        return 3
    return None


def _wheel_witness(n: int, d: DistanceMatrix) -> Optional[List[int]]:
    base = fan_resolving_set(n)
    candidates = [base]
    if n in base:
        for swap in (n - 1, n - 2):
            if swap not in base:
                candidates.append(sorted(set(base) - {n} | {swap}))
    for members in candidates:
        if is_resolving(d, members):
            return members
    return None


def _constructive_witness(spec: FamilySpec, d: DistanceMatrix) -> Optional[List[int]]:
    kind = spec.kind
    if kind == "path":
        return [0]
    if kind == "cycle":
        return [0, 1]
    if kind == "complete":
        return list(range(spec.n - 1))
    if kind == "complete_bipartite":
        return list(range(spec.s - 1)) + list(range(spec.s, spec.s + spec.t - 1))
    if kind == "grid":
        dims = spec.dims
        corners = [0]
        for axis in range(1, len(dims)):
            coord = [0] * len(dims)
            coord[axis] = dims[axis] - 1
            corners.append(grid_index(dims, coord))
        return sorted(corners)
    if kind == "fan":
        return fan_resolving_set(spec.n)
    if kind == "wheel":
        return _wheel_witness(spec.n, d)
    if kind == "hexagon":
        r = spec.n - 1
        index = {c: i for i, c in enumerate(hexagon_coordinates(spec.n))}
        return sorted(index[c] for c in ((r, -r, 0), (r, 0, -r), (0, r, -r)))
    return None


def family_beta(spec: FamilySpec, max_search_vertices: int = 400) -> BetaResult:
    """Metric dimension of a named family.

    Closed forms come with a verified witness, either constructed directly or
    found by a lexicographic search at the formula's size. Outside a formula's
    range the generated graph goes to brute force.
    """
    g = generate(spec)
    d = all_pairs_distances(g)
    beta = closed_form_beta(spec)
    if beta is None:
        logger.info(f"{spec.label}: no closed form applies, using brute force")
        return brute_force_beta(d)

    witness = _constructive_witness(spec, d)
    if witness is not None and len(witness) == beta and is_resolving(d, witness):
        return BetaResult(beta=beta, witness=witness, method=Method.closed_form)
    if witness is not None:
        logger.warning(f"{spec.label}: constructed set {witness} failed verification")

    if g.n > max_search_vertices:
        raise InputError(
            f"{spec.label} has {g.n} vertices; witness search is limited to {max_search_vertices}"
        )
    found = find_resolving_set(d, beta)
    if found is not None:
        return BetaResult(beta=beta, witness=found, method=Method.closed_form)
    logger.warning(f"{spec.label}: no resolving set of size {beta}, falling back to brute force")
    return brute_force_beta(d)


# --- bounds and structure ---------------------------------------------------

def twin_lower_bound(g: Graph) -> int:
    return sum(len(c) - 1 for c in twin_classes(g))


def diameter_lower_bound(g: Graph) -> int:
    """Smallest k with delta^k + k >= n."""
    if g.n < 2:
        raise InputError("diameter bound needs at least two vertices")
    delta = diameter(g)
    if delta == INF:
        raise InputError("diameter bound needs a connected graph")
    k = 1
    while delta ** k + k < g.n:
        k += 1
    return k


def spanning_tree(g: Graph) -> Graph:
    """Breadth-first spanning tree rooted at vertex 0."""
    _, pred = breadth_first_order(g.adjacency, 0, directed=False, return_predecessors=True)
    return Graph(g.n, tuple((v, int(pred[v])) for v in range(1, g.n)))


def unicyclic_interval(g: Graph) -> BetaInterval:
    if g.n < 3 or g.m != g.n or not is_connected(g):
        raise InputError("unicyclic_interval needs a connected graph with exactly n edges")
    b = tree_beta(spanning_tree(g)).beta
    return BetaInterval(lo=max(1, b - 2), hi=b + 1)


def _to_networkx(g: Graph) -> nx.Graph:
    G = nx.Graph()
    G.add_nodes_from(range(g.n))
    G.add_edges_from(g.edges)
    return G


def beta2_necessary_properties(g: Graph, pair: Sequence[int]) -> Beta2Report:
    """Check the structural properties every graph resolved by two vertices has."""
    pair = check_members(g.n, pair)
    if len(pair) != 2:
        raise InputError(f"expected a pair of vertices, got {len(pair)}")
    d = all_pairs_distances(g)
    if not is_resolving(d, pair):
        raise InputError(f"{pair} does not resolve the graph")
    if any(is_resolving(d, [v]) for v in range(g.n)):
        raise InputError("the graph is resolved by a single vertex, so the pair is not minimum")

    G = _to_networkx(g)
    k5 = isomorphism.GraphMatcher(G, nx.complete_graph(5)).subgraph_is_monomorphic()
    k33 = isomorphism.GraphMatcher(G, nx.complete_bipartite_graph(3, 3)).subgraph_is_monomorphic()

    u, v = pair
    dist = d.values[u]
    # number of shortest paths from u, processed in BFS layers
    paths = np.zeros(g.n, dtype=object)
    paths[u] = 1
    for w in np.argsort(dist, kind="stable").tolist():
        if w == u or dist[w] == INF:
            continue
        paths[w] = sum(paths[x] for x in g.neighbors[w] if dist[x] == dist[w] - 1)
    route = nx.shortest_path(G, u, v)
    deg = g.degrees
    return Beta2Report(
        pair=(u, v),
        no_k5_subgraph=not k5,
        no_k33_subgraph=not k33,
        unique_shortest_path=paths[v] == 1,
        path_degrees_at_most_5=all(int(deg[w]) <= 5 for w in route),
        endpoint_degrees_at_most_3=int(deg[u]) <= 3 and int(deg[v]) <= 3,
        path=route,
    )


def is_n_minus_two_family(g: Graph) -> bool:
    """True iff g is K_{s,t}, K_s + complement(K_t) (t >= 2) or K_s + (K_1 u K_t)."""
    n = g.n
    G = _to_networkx(g)
    candidates = []
    for s in range(1, n):
        t = n - s
        if s <= t:
            candidates.append(complete_bipartite(s, t))
        if t >= 2:
            candidates.append(join(complete(s), empty(t)))
        if t >= 2:
            candidates.append(join(complete(s), disjoint_union(complete(1), complete(t - 1))))
    for h in candidates:
        if h.m == g.m and nx.is_isomorphic(G, _to_networkx(h)):
            return True
    return False


def _component_beta(g: Graph) -> int:
    if g.n <= 1:
        return 0
    if is_tree(g):
        return tree_beta(g).beta
    return brute_force_beta(all_pairs_distances(g)).beta


def disconnected_beta(g: Graph) -> int:
    """Sum of the components' metric dimensions.

    With two or more components every component is charged at least one
    landmark, isolated vertices included.
    """
    components = connected_components(g)
    if len(components) <= 1:
        return _component_beta(g)
    return sum(max(1, _component_beta(g.induced_subgraph(c))) for c in components)


def solve_graph(g: Graph, method: str = "brute", spec: Optional[FamilySpec] = None,
                variant: Union[Variant, str, None] = None) -> BetaResult:
    """Dispatch used by the CLI and the API."""
    settings = get_settings()
    variant = parse_variant(variant) if isinstance(variant, str) or variant is None else variant
    if method == "family":
        if spec is None:
            raise InputError("method 'family' needs a family spec (e.g. a '# family:' header)")
        if generate(spec) != g:
            raise InputError(f"graph does not match family {spec.label}")
        return family_beta(spec, max_search_vertices=settings.WITNESS_SEARCH_MAX_VERTICES)
    if method == "tree":
        return tree_beta(g)
    if method == "ich":
        d = all_pairs_distances(g)
        if variant.kind == "truncated":
            d = truncate_distances(d, variant.k)
        return ich(d, epsilon=settings.ICH_EPSILON)
    if method == "brute":
        return brute_force_variant(g, variant)
    raise InputError(f"unknown method {method!r}; expected brute, family, tree or ich")
