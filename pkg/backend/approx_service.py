# backend/approx_service.py
import logging
import math
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from errors import AllocationError, InputError, UnresolvableError
from result_schema import BetaResult, EntropyState, Method, SbmAllocation

logger = logging.getLogger(__name__)

DEFAULT_EPSILON = 1e-12


def _class_sizes(ids: np.ndarray) -> np.ndarray:
    return np.bincount(ids)


def _refine(ids: np.ndarray, column: np.ndarray) -> np.ndarray:
    _, inverse = np.unique(np.stack([ids, column], axis=1), axis=0, return_inverse=True)
    return inverse.reshape(-1).astype(np.int64)


def _spread_score(sizes: np.ndarray) -> float:
    """Sum of s*log(s); lower means higher entropy for a fixed n."""
    sizes = sizes[sizes > 1].astype(np.float64)
    return float((sizes * np.log(sizes)).sum())


def _exact_product(sizes: np.ndarray) -> int:
    product = 1
    for s in sizes.tolist():
        if s > 1:
            product *= s ** s
    return product


def _entropy(sizes: np.ndarray, n: int) -> float:
    probs = sizes[sizes > 0] / n
    return float(-(probs * np.log(probs)).sum())


def _state(ids: np.ndarray, members: List[int]) -> EntropyState:
    order = np.argsort(ids, kind="stable")
    bounds = np.flatnonzero(np.diff(ids[order])) + 1
    classes = [sorted(part.tolist()) for part in np.split(order, bounds)] if ids.size else []
    classes.sort(key=lambda c: c[0])
    sizes = _class_sizes(ids) if ids.size else np.zeros(0, dtype=np.int64)
    return EntropyState(
        members=list(members),
        classes=classes,
        class_count=len(classes),
        entropy=_entropy(sizes, ids.size) if ids.size else 0.0,
    )


def _better(candidate: Tuple[float, np.ndarray, int], best: Tuple[float, np.ndarray, int], epsilon: float) -> bool:
    score, sizes, count = candidate
    best_score, best_sizes, best_count = best
    if abs(score - best_score) > epsilon * max(1.0, abs(score), abs(best_score)):
        return score < best_score
    exact, best_exact = _exact_product(sizes), _exact_product(best_sizes)
    if exact != best_exact:
        return exact < best_exact
    # equal entropy: prefer more classes; equal counts keep the lower index
    return count > best_count


def ich_trace(d, epsilon: float = DEFAULT_EPSILON) -> Iterator[EntropyState]:
    """Greedy landmark selection, yielding the partition after every step.

    Each step adds the column whose refinement of the current partition has
    the highest Shannon entropy. Ties go to the larger class count, then to
    the smaller column index. Stops once every row is alone in its class.
    """
    n = d.n_rows
    ids = np.zeros(n, dtype=np.int64)
    members: List[int] = []
    if n <= 1:
        return
    table = d.columns(range(d.n_cols))
    while True:
        count = int(ids.max()) + 1
        if count == n:
            return
        best = None
        best_col = -1
        best_ids = None
        for c in range(d.n_cols):
            refined = _refine(ids, table[:, c])
            sizes = _class_sizes(refined)
            candidate = (_spread_score(sizes), sizes, sizes.size)
            if best is None or _better(candidate, best, epsilon):
                best, best_col, best_ids = candidate, c, refined
        if best[2] == count:
            # no column splits any class: two rows coincide everywhere
            order = np.lexsort(table.T[::-1])
            rows = table[order]
            hit = int(np.flatnonzero((rows[1:] == rows[:-1]).all(axis=1))[0])
            u, v = int(order[hit]), int(order[hit + 1])
            raise UnresolvableError((min(u, v), max(u, v)))
        ids = best_ids
        members.append(best_col)
        logger.debug(f"ich step {len(members)}: column {best_col}, {best[2]} classes")
        yield _state(ids, members)


def ich(d, epsilon: float = DEFAULT_EPSILON) -> BetaResult:
    """Information Content Heuristic on a distance matrix or general table."""
    members: List[int] = []
    for state in ich_trace(d, epsilon):
        members = state.members
    logger.info(f"ich: {len(members)} landmarks for {d.n_rows} rows")
    return BetaResult(beta=len(members), witness=members, method=Method.ich)


# --- random models ----------------------------------------------------------

def er_subset_size(n: int, p: float) -> int:
    """Size of a random subset that resolves G(n, p) with high probability."""
    if n < 2:
        raise InputError(f"n must be at least 2, got {n}")
    if not 0.0 < p < 1.0:
        raise InputError(f"p must lie strictly between 0 and 1, got {p}")
    value = -3.0 * math.log(n) / math.log(p * p + (1 - p) * (1 - p))
    return math.ceil(value - 1e-9)


def _check_sbm(sizes: Sequence[int], probs: Sequence[Sequence[float]]) -> Tuple[np.ndarray, np.ndarray]:
    sizes = np.asarray(sizes, dtype=np.int64)
    probs = np.asarray(probs, dtype=np.float64)
    c = sizes.size
    if c == 0 or sizes.min() < 1:
        raise InputError("community sizes must be positive")
    if probs.shape != (c, c):
        raise InputError(f"probability matrix must be {c}x{c}, got shape {probs.shape}")
    if (probs < 0).any() or (probs > 1).any():
        raise InputError("probabilities must lie in [0, 1]")
    if not np.array_equal(probs, probs.T):
        raise InputError("probability matrix must be symmetric")
    return sizes, probs


def _collision(probs: np.ndarray) -> np.ndarray:
    """q[i, j, l]: chance a vertex of community l sees members of i and j alike."""
    return probs[:, None, :] * probs[None, :, :] + (1 - probs[:, None, :]) * (1 - probs[None, :, :])


def sbm_failure_bound(sizes: Sequence[int], probs: Sequence[Sequence[float]], k: Sequence[int]) -> float:
    """First-moment bound on the chance that k_l random landmarks per community fail to resolve.

    sum over i <= j of |V_i||V_j| prod_l q_ijl ** k_l, with the exponent on the
    whole bracket and the literal |V_i||V_j| factor on the diagonal.
    """
    sizes, probs = _check_sbm(sizes, probs)
    k = np.asarray(k, dtype=np.int64)
    if k.shape != sizes.shape:
        raise InputError(f"expected {sizes.size} landmark counts, got {k.size}")
    if (k < 0).any() or (k > sizes).any():
        raise InputError("landmark counts must lie between 0 and the community size")
    terms = np.prod(_collision(probs) ** k[None, None, :], axis=2)
    weight = np.outer(sizes, sizes).astype(np.float64)
    upper = np.triu(np.ones_like(weight, dtype=bool))
    return float((weight * terms)[upper].sum())


def sbm_allocate(sizes: Sequence[int], probs: Sequence[Sequence[float]], threshold: float) -> SbmAllocation:
    """Greedy allocation: add one landmark at a time where the bound drops most.

    Ties on the resulting bound go to the community with fewer landmarks so
    far, then to the lower index.
    """
    if threshold <= 0:
        raise InputError(f"threshold must be positive, got {threshold}")
    sizes_arr, _ = _check_sbm(sizes, probs)
    k = [0] * sizes_arr.size
    bound = sbm_failure_bound(sizes, probs, k)
    floor = sbm_failure_bound(sizes, probs, sizes_arr.tolist())
    if floor > threshold:
        raise AllocationError(floor, threshold)
    while bound > threshold:
        best: Optional[Tuple[float, int, int]] = None
        for ell in range(len(k)):
            if k[ell] >= sizes_arr[ell]:
                continue
            k[ell] += 1
            trial = sbm_failure_bound(sizes, probs, k)
            k[ell] -= 1
            key = (trial, k[ell], ell)
            if best is None or key < best:
                best = key
        bound, _, ell = best
        k[ell] += 1
    logger.info(f"sbm allocation {k} reaches bound {bound:.3g} <= {threshold:g}")
    return SbmAllocation(k=k, bound=bound)


def min_single_community_k(n: int, p: float, threshold: float) -> int:
    """Smallest k with n^2 (p^2 + (1-p)^2)^k <= threshold, solved directly."""
    q = p * p + (1 - p) * (1 - p)
    if n * n <= threshold:
        return 0
    if q >= 1.0:
        raise InputError("p in {0, 1} never separates vertices")
    return max(0, math.ceil(math.log(threshold / (n * n)) / math.log(q) - 1e-9))
