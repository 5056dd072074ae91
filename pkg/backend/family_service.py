# backend/family_service.py
"""
Generators for the named graph families and the random models.

Labelling conventions:
  path / cycle      vertices 0..n-1 in order
  complete_bipartite  part A is 0..s-1, part B is s..s+t-1
  grid              row-major, last coordinate varies fastest
  fan / wheel       hub is 0, path or cycle vertices are 1..n in order
  hamming / hypercube  base-a digits of the index, most significant first
  hexagon           cube coordinates (x, y, z), x + y + z = 0, sorted
  honeycomb         bounded triangles of hexagon(n+1), sorted by their corners
  prism / petersen2 outer cycle 0..n-1, inner vertex n+i attached to i
  join / union      right operand shifted by the left operand's n
"""
import logging
from collections import defaultdict
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import ValidationError

from errors import InputError
from family_schema import FamilySpec, RandomSpec
from graph_service import Graph, is_tree
from rng import SplitMix64

logger = logging.getLogger(__name__)

DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"


def build_spec(cls, **params):
    """Construct a FamilySpec/RandomSpec, surfacing validation failures as InputError."""
    try:
        return cls(**params)
    except ValidationError as e:
        err = e.errors()[0]
        msg = err["msg"].removeprefix("Value error, ")
        where = ".".join(str(x) for x in err.get("loc", ()))
        raise InputError(f"{where}: {msg}" if where else msg) from None


# --- deterministic families -------------------------------------------------

def empty(n: int) -> Graph:
    return Graph(n)


def path(n: int) -> Graph:
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)))


def cycle(n: int) -> Graph:
    return Graph(n, tuple((i, (i + 1) % n) for i in range(n)))


def complete(n: int) -> Graph:
    return Graph(n, tuple(combinations(range(n), 2)))


def complete_bipartite(s: int, t: int) -> Graph:
    return Graph(s + t, tuple((i, s + j) for i in range(s) for j in range(t)))


def join(g1: Graph, g2: Graph) -> Graph:
    """Disjoint union plus every edge between the two sides."""
    shift = g1.n
    edges = list(g1.edges)
    edges += [(u + shift, v + shift) for u, v in g2.edges]
    edges += [(u, shift + v) for u in range(g1.n) for v in range(g2.n)]
    return Graph(g1.n + g2.n, tuple(edges))


def disjoint_union(g1: Graph, g2: Graph) -> Graph:
    shift = g1.n
    edges = list(g1.edges) + [(u + shift, v + shift) for u, v in g2.edges]
    return Graph(g1.n + g2.n, tuple(edges))


def star(m: int) -> Graph:
    """K_{1,m}: centre 0, leaves 1..m."""
    return join(complete(1), empty(m))


def fan(n: int) -> Graph:
    return join(complete(1), path(n))


def wheel(n: int) -> Graph:
    return join(complete(1), cycle(n))


def grid(dims: Sequence[int]) -> Graph:
    dims = tuple(int(x) for x in dims)
    index = np.arange(int(np.prod(dims))).reshape(dims)
    edges: List[Tuple[int, int]] = []
    for axis, size in enumerate(dims):
        if size < 2:
            continue
        lo = np.take(index, range(size - 1), axis=axis).ravel()
        hi = np.take(index, range(1, size), axis=axis).ravel()
        edges += list(zip(lo.tolist(), hi.tolist()))
    return Graph(index.size, tuple(edges))


def grid_index(dims: Sequence[int], coord: Sequence[int]) -> int:
    return int(np.ravel_multi_index(tuple(coord), tuple(dims)))


def grid_coordinates(dims: Sequence[int], v: int) -> Tuple[int, ...]:
    return tuple(int(x) for x in np.unravel_index(v, tuple(dims)))


def hamming(k: int, a: int) -> Graph:
    n = a ** k
    edges = []
    for v in range(n):
        for pos in range(k):
            weight = a ** (k - 1 - pos)
            digit = (v // weight) % a
            for other in range(digit + 1, a):
                edges.append((v, v + (other - digit) * weight))
    return Graph(n, tuple(edges))


def hypercube(k: int) -> Graph:
    return hamming(k, 2)


def hamming_labels(k: int, a: int) -> List[str]:
    """String of each vertex of hamming(k, a), in vertex order."""
    if a > len(DIGITS):
        raise InputError(f"alphabet size {a} exceeds the {len(DIGITS)} printable symbols")
    labels = []
    for v in range(a ** k):
        chars = []
        for pos in range(k):
            chars.append(DIGITS[(v // a ** (k - 1 - pos)) % a])
        labels.append("".join(chars))
    return labels


def hexagon_coordinates(n: int) -> List[Tuple[int, int, int]]:
    r = n - 1
    return [
        (x, y, -x - y)
        for x in range(-r, r + 1)
        for y in range(-r, r + 1)
        if abs(x + y) <= r
    ]


# Three of the six unit moves on the triangular lattice; the other three are their negatives.
_HEX_STEPS = ((1, -1, 0), (1, 0, -1), (0, 1, -1))


def hexagon(n: int) -> Graph:
    coords = hexagon_coordinates(n)
    index = {c: i for i, c in enumerate(coords)}
    edges = []
    for c, i in index.items():
        for step in _HEX_STEPS:
            nb = (c[0] + step[0], c[1] + step[1], c[2] + step[2])
            if nb in index:
                edges.append((i, index[nb]))
    return Graph(len(coords), tuple(edges))


def hexagon_faces(n: int) -> List[Tuple[int, int, int]]:
    """Bounded triangular faces of hexagon(n) as sorted vertex triples."""
    coords = hexagon_coordinates(n)
    index = {c: i for i, c in enumerate(coords)}
    e1, e2, e3 = _HEX_STEPS
    faces = []
    for c in coords:
        for u, w in ((e1, e2), (e2, e3)):
            p = (c[0] + u[0], c[1] + u[1], c[2] + u[2])
            q = (c[0] + w[0], c[1] + w[1], c[2] + w[2])
            if p in index and q in index:
                faces.append(tuple(sorted((index[c], index[p], index[q]))))
    return sorted(faces)


def honeycomb(n: int) -> Graph:
    """Bounded dual of hexagon(n+1): one vertex per triangle, edges across shared sides."""
    faces = hexagon_faces(n + 1)
    sides: Dict[Tuple[int, int], List[int]] = defaultdict(list)
    for f, (x, y, z) in enumerate(faces):
        for side in ((x, y), (x, z), (y, z)):
            sides[side].append(f)
    edges = [tuple(owners) for owners in sides.values() if len(owners) == 2]
    return Graph(len(faces), tuple(edges))


def prism(n: int) -> Graph:
    edges = []
    for i in range(n):
        edges.append((i, (i + 1) % n))
        edges.append((n + i, n + (i + 1) % n))
        edges.append((i, n + i))
    return Graph(2 * n, tuple(edges))


def petersen2(n: int) -> Graph:
    """Generalised Petersen graph P(n, 2)."""
    edges = []
    for i in range(n):
        edges.append((i, (i + 1) % n))
        edges.append((n + i, n + (i + 2) % n))
        edges.append((i, n + i))
    return Graph(2 * n, tuple(edges))


def generate(spec: FamilySpec) -> Graph:
    kind = spec.kind
    if kind == "path":
        return path(spec.n)
    if kind == "cycle":
        return cycle(spec.n)
    if kind == "complete":
        return complete(spec.n)
    if kind == "complete_bipartite":
        return complete_bipartite(spec.s, spec.t)
    if kind == "grid":
        return grid(spec.dims)
    if kind == "fan":
        return fan(spec.n)
    if kind == "wheel":
        return wheel(spec.n)
    if kind == "hypercube":
        return hypercube(spec.k)
    if kind == "hamming":
        return hamming(spec.k, spec.a)
    if kind == "honeycomb":
        return honeycomb(spec.n)
    if kind == "hexagon":
        return hexagon(spec.n)
    if kind == "prism":
        return prism(spec.n)
    if kind == "petersen2":
        return petersen2(spec.n)
    if kind == "empty":
        return empty(spec.n)
    if kind == "join":
        return join(generate(spec.left), generate(spec.right))
    if kind == "disjoint_union":
        return disjoint_union(generate(spec.left), generate(spec.right))
    raise InputError(f"unknown family {kind!r}")


# --- random models ----------------------------------------------------------

def prufer_decode(code: Sequence[int], n: Optional[int] = None) -> Graph:
    """Labelled tree of the sequence, in linear time."""
    if n is None:
        n = len(code) + 2
    if n == 1:
        if code:
            raise InputError("a one-vertex tree has an empty sequence")
        return Graph(1)
    if len(code) != n - 2:
        raise InputError(f"sequence for {n} vertices must have length {n - 2}, got {len(code)}")
    if any(not 0 <= x < n for x in code):
        raise InputError(f"sequence entries must lie in 0..{n - 1}")
    degree = [1] * n
    for x in code:
        degree[x] += 1
    ptr = 0
    while degree[ptr] != 1:
        ptr += 1
    leaf = ptr
    edges = []
    for v in code:
        edges.append((leaf, v))
        degree[v] -= 1
        if degree[v] == 1 and v < ptr:
            leaf = v
        else:
            ptr += 1
            while degree[ptr] != 1:
                ptr += 1
            leaf = ptr
    edges.append((leaf, n - 1))
    return Graph(n, tuple(edges))


def prufer_encode(g: Graph) -> List[int]:
    """Inverse of prufer_decode for labelled trees."""
    if not is_tree(g):
        raise InputError("Prüfer encoding requires a tree")
    n = g.n
    if n <= 2:
        return []
    # parent pointers with n-1 as root
    parent = [-1] * n
    seen = [False] * n
    stack = [n - 1]
    seen[n - 1] = True
    while stack:
        v = stack.pop()
        for w in g.neighbors[v]:
            if not seen[w]:
                seen[w] = True
                parent[w] = v
                stack.append(w)
    degree = [len(nb) for nb in g.neighbors]
    ptr = degree.index(1)
    leaf = ptr
    code = []
    for _ in range(n - 2):
        nxt = parent[leaf]
        code.append(nxt)
        degree[nxt] -= 1
        if degree[nxt] == 1 and nxt < ptr:
            leaf = nxt
        else:
            ptr += 1
            while degree[ptr] != 1:
                ptr += 1
            leaf = ptr
    return code


def uniform_tree(n: int, rng: SplitMix64) -> Graph:
    """Uniform labelled tree: decode a uniform random sequence."""
    if n <= 2:
        return path(n)
    return prufer_decode([rng.randbelow(n) for _ in range(n - 2)], n)


def erdos_renyi(n: int, p: float, rng: SplitMix64) -> Graph:
    """G(n, p); pairs (i, j), i < j, are drawn in lexicographic order."""
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return Graph(n, tuple(edges))


def community_of(sizes: Sequence[int]) -> List[int]:
    """Community index of each vertex; communities occupy contiguous blocks."""
    out = []
    for c, size in enumerate(sizes):
        out += [c] * size
    return out


def sbm(sizes: Sequence[int], probs: Sequence[Sequence[float]], rng: SplitMix64) -> Graph:
    block = community_of(sizes)
    n = len(block)
    edges = [
        (i, j)
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < probs[block[i]][block[j]]
    ]
    return Graph(n, tuple(edges))


def generate_random(spec: RandomSpec) -> Graph:
    rng = SplitMix64(spec.seed)
    if spec.kind == "uniform_tree":
        return uniform_tree(spec.n, rng)
    if spec.kind == "erdos_renyi":
        return erdos_renyi(spec.n, spec.p, rng)
    return sbm(spec.sizes, spec.probs, rng)


# --- spec strings -----------------------------------------------------------

_ALIASES = {
    "er": "erdos_renyi",
    "gnp": "erdos_renyi",
    "tree": "uniform_tree",
    "union": "disjoint_union",
    "bipartite": "complete_bipartite",
    "kst": "complete_bipartite",
    "hx": "hexagon",
    "hc": "honeycomb",
    "q": "hypercube",
}


def _split_operands(text: str) -> Tuple[str, str]:
    depth = 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "/" and depth == 0:
            return _unwrap(text[:i]), _unwrap(text[i + 1:])
    raise InputError(f"expected two operands separated by '/', got {text!r}")


def _unwrap(text: str) -> str:
    text = text.strip()
    while text.startswith("(") and text.endswith(")"):
        text = text[1:-1].strip()
    return text


def _keywords(text: str) -> Dict[str, str]:
    out = {}
    for part in text.split(","):
        key, sep, value = part.partition("=")
        if not sep:
            raise InputError(f"expected key=value, got {part!r}")
        out[key.strip()] = value.strip()
    return out


def _int(value: str, name: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise InputError(f"{name} must be an integer, got {value!r}")


def _float(value: str, name: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise InputError(f"{name} must be a number, got {value!r}")


def parse_spec(text: str) -> Union[FamilySpec, RandomSpec]:
    """Parse CLI spec strings such as "fan:12", "grid:4x3x2", "hamming:k=3,a=4",
    "er:n=100,p=0.5,seed=7", "sbm:sizes=50x50,p=0.5x0.1x0.1x0.5,seed=3" or
    "join:complete:1/path:4" (operands may be parenthesised)."""
    head, sep, rest = text.strip().partition(":")
    kind = _ALIASES.get(head.strip().lower(), head.strip().lower())
    if not sep:
        raise InputError(f"spec {text!r} must look like kind:parameters")

    if kind in ("join", "disjoint_union"):
        left, right = _split_operands(rest)
        lspec, rspec = parse_spec(left), parse_spec(right)
        if not isinstance(lspec, FamilySpec) or not isinstance(rspec, FamilySpec):
            raise InputError(f"{kind} operands must be deterministic families")
        return build_spec(FamilySpec, kind=kind, left=lspec, right=rspec)

    if kind in ("uniform_tree", "erdos_renyi", "sbm"):
        kw = _keywords(rest)
        if "seed" not in kw:
            raise InputError(f"random spec {text!r} needs an explicit seed")
        params = {"kind": kind, "seed": _int(kw["seed"], "seed")}
        if kind in ("uniform_tree", "erdos_renyi"):
            params["n"] = _int(kw.get("n", ""), "n")
        if kind == "erdos_renyi":
            params["p"] = _float(kw.get("p", ""), "p")
        if kind == "sbm":
            sizes = [_int(x, "sizes") for x in kw.get("sizes", "").split("x")]
            flat = [_float(x, "p") for x in kw.get("p", "").split("x")]
            c = len(sizes)
            if len(flat) != c * c:
                raise InputError(f"sbm needs {c * c} probabilities for {c} communities, got {len(flat)}")
            params["sizes"] = tuple(sizes)
            params["probs"] = tuple(tuple(flat[i * c:(i + 1) * c]) for i in range(c))
        return build_spec(RandomSpec, **params)

    if kind == "grid":
        return build_spec(FamilySpec, kind=kind, dims=tuple(_int(x, "dims") for x in rest.split("x")))
    if kind == "complete_bipartite":
        parts = rest.replace(",", "x").split("x")
        if len(parts) != 2:
            raise InputError(f"complete_bipartite expects SxT, got {rest!r}")
        return build_spec(FamilySpec, kind=kind, s=_int(parts[0], "s"), t=_int(parts[1], "t"))
    if kind == "hamming":
        kw = _keywords(rest)
        return build_spec(FamilySpec, kind=kind, k=_int(kw.get("k", ""), "k"), a=_int(kw.get("a", ""), "a"))
    if kind == "hypercube":
        value = _keywords(rest).get("k", "") if "=" in rest else rest
        return build_spec(FamilySpec, kind=kind, k=_int(value, "k"))
    value = _keywords(rest).get("n", "") if "=" in rest else rest
    return build_spec(FamilySpec, kind=kind, n=_int(value, "n"))


def generate_from_string(text: str) -> Tuple[Graph, Union[FamilySpec, RandomSpec]]:
    spec = parse_spec(text)
    if isinstance(spec, RandomSpec):
        return generate_random(spec), spec
    return generate(spec), spec
