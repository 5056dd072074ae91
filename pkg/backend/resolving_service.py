# backend/resolving_service.py
import logging
from dataclasses import dataclass
from typing import Hashable, List, Optional, Protocol, Sequence, Tuple, Union

import numpy as np

from errors import InputError
from graph_service import INF, DistanceMatrix, Graph, all_pairs_distances, check_members, is_connected, truncate_distances

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]


class Table(Protocol):
    """Rows are items, columns are landmarks; DistanceMatrix and GeneralTable both qualify."""

    @property
    def n_rows(self) -> int: ...

    @property
    def n_cols(self) -> int: ...

    def columns(self, members: Sequence[int]) -> np.ndarray: ...


class GeneralTable:
    """Item x function table over an arbitrary alphabet.

    Values are only compared for equality within a column, so each column is
    stored as integer codes in order of first appearance.
    """

    def __init__(self, rows: Sequence[Sequence[Hashable]],
                 row_labels: Optional[Sequence[str]] = None,
                 column_labels: Optional[Sequence[str]] = None):
        rows = [list(r) for r in rows]
        width = len(rows[0]) if rows else 0
        if any(len(r) != width for r in rows):
            raise InputError("table rows must all have the same length")
        codes = np.zeros((len(rows), width), dtype=np.int64)
        for c in range(width):
            seen = {}
            for r, row in enumerate(rows):
                codes[r, c] = seen.setdefault(row[c], len(seen))
        codes.setflags(write=False)
        self.codes = codes
        self.row_labels = list(row_labels) if row_labels is not None else [str(i) for i in range(len(rows))]
        self.column_labels = list(column_labels) if column_labels is not None else [str(i) for i in range(width)]
        if len(self.row_labels) != len(rows) or len(self.column_labels) != width:
            raise InputError("label count does not match the table shape")

    @property
    def n_rows(self) -> int:
        return self.codes.shape[0]

    @property
    def n_cols(self) -> int:
        return self.codes.shape[1]

    def columns(self, members: Sequence[int]) -> np.ndarray:
        return self.codes[:, list(members)]

    def column_index(self, label: str) -> int:
        try:
            return self.column_labels.index(label)
        except ValueError:
            raise InputError(f"unknown column {label!r}")


@dataclass(frozen=True)
class Resolution:
    """Outcome of a resolvability check; truthy iff resolved.

    On failure `witness` holds one pair (u, v), u < v, that the set leaves
    unseparated.
    """

    resolved: bool
    witness: Optional[Pair] = None

    def __bool__(self) -> bool:
        return self.resolved


def first_collision(keys: np.ndarray) -> Optional[Pair]:
    """Some pair of equal rows of `keys`, or None if all rows are distinct."""
    rows = keys.shape[0]
    if rows < 2:
        return None
    if keys.shape[1] == 0:
        return (0, 1)
    order = np.lexsort(keys.T[::-1])
    ordered = keys[order]
    same = (ordered[1:] == ordered[:-1]).all(axis=1)
    hits = np.flatnonzero(same)
    if hits.size == 0:
        return None
    u, v = int(order[hits[0]]), int(order[hits[0] + 1])
    return (min(u, v), max(u, v))


def _resolution(keys: np.ndarray) -> Resolution:
    pair = first_collision(keys)
    return Resolution(True) if pair is None else Resolution(False, pair)


def distance_vector(d: DistanceMatrix, v: int, r: Sequence[int]) -> Tuple[int, ...]:
    """(d(r_1, v), ..., d(r_k, v)) in the order of r."""
    members = check_members(d.n, r)
    if not 0 <= v < d.n:
        raise InputError(f"vertex {v} out of range for {d.n} vertices")
    return tuple(int(d.values[m, v]) for m in members)


def resolves_table(m: Table, cols: Sequence[int]) -> Resolution:
    """Induced row vectors on `cols` are pairwise distinct."""
    cols = check_members(m.n_cols, cols)
    return _resolution(m.columns(cols))


def is_resolving(d: DistanceMatrix, r: Sequence[int]) -> Resolution:
    return resolves_table(d, r)


def doubly_keys(d: DistanceMatrix, r: Sequence[int]) -> np.ndarray:
    """Distance vectors to r with the first coordinate subtracted from every coordinate."""
    cols = d.columns(r)
    if (cols == INF).any():
        raise InputError("doubly resolving sets need finite distances (connected graph)")
    return cols[:, 1:] - cols[:, :1]


def is_doubly_resolving(d: DistanceMatrix, r: Sequence[int]) -> Resolution:
    r = check_members(d.n, r)
    if len(r) < 2:
        raise InputError(f"doubly resolving sets need at least 2 members, got {len(r)}")
    return _resolution(doubly_keys(d, r))


def strong_coverage(d: DistanceMatrix, s: int) -> np.ndarray:
    """Boolean n x n matrix: pair (u, v) is strongly resolved by s."""
    row = d.values[s]
    # v lies beyond u on a geodesic from s, or u beyond v
    beyond = row[None, :] == row[:, None] + d.values
    return beyond | beyond.T


def is_strongly_resolving(g: Graph, d: DistanceMatrix, s: Sequence[int]) -> Resolution:
    if not is_connected(g):
        raise InputError("strong resolvability is only defined on connected graphs")
    s = check_members(d.n, s)
    n = d.n
    covered = np.eye(n, dtype=bool)
    for member in s:
        covered |= strong_coverage(d, member)
    missing = np.argwhere(~covered)
    if missing.size == 0:
        return Resolution(True)
    u, v = (int(x) for x in missing[0])
    return Resolution(False, (min(u, v), max(u, v)))


@dataclass(frozen=True)
class Variant:
    """One of resolving, doubly, strong or truncated:k."""

    kind: str = "resolving"
    k: Optional[int] = None

    def __str__(self) -> str:
        return f"truncated:{self.k}" if self.kind == "truncated" else self.kind


def parse_variant(text: str) -> Variant:
    text = (text or "resolving").strip().lower()
    if text in ("resolving", "doubly", "strong"):
        return Variant(text)
    head, sep, value = text.partition(":")
    if head == "truncated" and sep:
        try:
            k = int(value)
        except ValueError:
            raise InputError(f"truncation level must be an integer, got {value!r}")
        if k < 1:
            raise InputError(f"truncation level must be at least 1, got {k}")
        return Variant("truncated", k)
    raise InputError(f"unknown variant {text!r}; expected resolving, doubly, strong or truncated:k")


def verify(g: Graph, members: Sequence[int], variant: Union[Variant, str] = "resolving",
           d: Optional[DistanceMatrix] = None) -> Resolution:
    if isinstance(variant, str):
        variant = parse_variant(variant)
    if d is None:
        d = all_pairs_distances(g)
    if variant.kind == "resolving":
        return is_resolving(d, members)
    if variant.kind == "doubly":
        return is_doubly_resolving(d, members)
    if variant.kind == "strong":
        return is_strongly_resolving(g, d, members)
    return is_resolving(truncate_distances(d, variant.k), members)
