# backend/experiment_service.py
"""
Seeded experiments behind `cli.py experiment` and POST /api/experiments.

Sample i of a run with master seed s uses derive_seed(s, i), so samples are
independent of each other and of the order they are computed in.

Row columns:
  random-trees  sample, seed, n, beta, beta_over_n
  er-bound      trial, seed, n, p, size, resolved
  er-zigzag     x, p, sample, seed, edges, beta_hat, log_n_beta
  sbm-alloc     threshold, k, total, bound, trials, resolved_rate
"""
import json
import logging
import math
import time
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple

import numpy as np
from sqlalchemy.orm import Session

from approx_service import er_subset_size, ich, sbm_allocate
from errors import InputError
from exact_service import tree_beta
from family_service import community_of, erdos_renyi, sbm, uniform_tree
from graph_service import all_pairs_distances, truncate_distances
from report_model import ExperimentRecord
from report_schema import ExperimentReport, ExperimentSummary
from resolving_service import is_resolving
from rng import SplitMix64, derive_seed

logger = logging.getLogger(__name__)

Rows = List[List[Any]]


# --- parameter parsing ------------------------------------------------------

def _get(params: Mapping[str, Any], key: str, default: Any, cast: Callable[[str], Any]) -> Any:
    if key not in params:
        return default
    value = params[key]
    if not isinstance(value, str):
        return value
    try:
        return cast(value)
    except ValueError:
        raise InputError(f"parameter {key}={value!r} is not a valid {cast.__name__}")


def _float_list(text: str) -> List[float]:
    return [float(x) for x in text.replace("x", ",").split(",") if x]


def _int_list(text: str) -> List[int]:
    return [int(x) for x in text.replace("x", ",").split(",") if x]


def _square(values: List[float], c: int) -> List[List[float]]:
    if len(values) != c * c:
        raise InputError(f"expected {c * c} probabilities for {c} communities, got {len(values)}")
    return [values[i * c:(i + 1) * c] for i in range(c)]


def aggregate(values: List[float]) -> Dict[str, float]:
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        return {}
    return {
        "mean": float(arr.mean()),
        "variance": float(arr.var(ddof=1)) if arr.size > 1 else 0.0,
        "min": float(arr.min()),
        "max": float(arr.max()),
    }


# --- experiments ------------------------------------------------------------

def _random_trees(params, seed) -> Tuple[Dict[str, Any], List[str], Rows, Dict[str, Dict[str, float]]]:
    n = _get(params, "n", 2000, int)
    samples = _get(params, "samples", 200, int)
    if n < 1 or samples < 1:
        raise InputError("random-trees needs n >= 1 and samples >= 1")
    rows = []
    for i in range(samples):
        s = derive_seed(seed, i)
        beta = tree_beta(uniform_tree(n, SplitMix64(s))).beta
        rows.append([i, s, n, beta, beta / n])
    betas = [row[3] for row in rows]
    aggregates = {
        "beta_over_n": aggregate([row[4] for row in rows]),
        # variance of beta itself, scaled by n
        "beta_variance_per_n": {"value": aggregate(betas).get("variance", 0.0) / n},
    }
    return {"n": n, "samples": samples}, ["sample", "seed", "n", "beta", "beta_over_n"], rows, aggregates


def _er_bound(params, seed):
    n = _get(params, "n", 128, int)
    p = _get(params, "p", 0.5, float)
    trials = _get(params, "trials", 100, int)
    size = _get(params, "size", er_subset_size(n, p), int)
    if not 0 <= size <= n:
        raise InputError(f"subset size {size} outside 0..{n}")
    rows = []
    for i in range(trials):
        s = derive_seed(seed, i)
        rng = SplitMix64(s)
        g = erdos_renyi(n, p, rng)
        members = sorted(rng.sample(n, size))
        resolved = bool(is_resolving(all_pairs_distances(g), members))
        rows.append([i, s, n, p, size, int(resolved)])
    aggregates = {"resolved": aggregate([row[5] for row in rows])}
    columns = ["trial", "seed", "n", "p", "size", "resolved"]
    return {"n": n, "p": p, "trials": trials, "size": size}, columns, rows, aggregates


def _er_zigzag(params, seed):
    n = _get(params, "n", 64, int)
    xs = _get(params, "xs", [round(0.1 * i, 1) for i in range(1, 10)], _float_list)
    samples = _get(params, "samples", 3, int)
    if n < 2:
        raise InputError("er-zigzag needs n >= 2")
    rows = []
    index = 0
    for x in xs:
        if not 0 < x <= 1:
            raise InputError(f"x must lie in (0, 1], got {x}")
        p = n ** (x - 1)
        for j in range(samples):
            s = derive_seed(seed, index)
            index += 1
            g = erdos_renyi(n, p, SplitMix64(s))
            beta_hat = ich(all_pairs_distances(g)).beta
            rows.append([x, p, j, s, g.m, beta_hat, math.log(beta_hat) / math.log(n) if beta_hat else 0.0])
    aggregates = {"log_n_beta": aggregate([row[6] for row in rows])}
    columns = ["x", "p", "sample", "seed", "edges", "beta_hat", "log_n_beta"]
    return {"n": n, "xs": xs, "samples": samples}, columns, rows, aggregates


def _sbm_alloc(params, seed):
    sizes = _get(params, "sizes", [50, 50], _int_list)
    probs = _square(_get(params, "p", [0.5, 0.1, 0.1, 0.5], _float_list), len(sizes))
    thresholds = _get(params, "thresholds", [1.0, 0.1, 0.01], _float_list)
    trials = _get(params, "trials", 20, int)
    block = community_of(sizes)
    rows = []
    index = 0
    for threshold in thresholds:
        allocation = sbm_allocate(sizes, probs, threshold)
        hits = 0
        for _ in range(trials):
            s = derive_seed(seed, index)
            index += 1
            rng = SplitMix64(s)
            g = sbm(sizes, probs, rng)
            members = []
            start = 0
            for ell, k in enumerate(allocation.k):
                members += [start + v for v in rng.sample(sizes[ell], k)]
                start += sizes[ell]
            # adjacency information only
            adjacency = truncate_distances(all_pairs_distances(g), 1)
            hits += bool(is_resolving(adjacency, sorted(members)))
        rate = hits / trials if trials else 0.0
        rows.append([threshold, "x".join(str(k) for k in allocation.k), allocation.total, allocation.bound, trials, rate])
    aggregates = {"total": aggregate([row[2] for row in rows]), "resolved_rate": aggregate([row[5] for row in rows])}
    columns = ["threshold", "k", "total", "bound", "trials", "resolved_rate"]
    used = {"sizes": sizes, "p": probs, "thresholds": thresholds, "trials": trials, "vertices": len(block)}
    return used, columns, rows, aggregates


EXPERIMENTS = {
    "random-trees": _random_trees,
    "er-bound": _er_bound,
    "er-zigzag": _er_zigzag,
    "sbm-alloc": _sbm_alloc,
}


def run_experiment(name: str, params: Optional[Mapping[str, Any]] = None, seed: int = 0) -> ExperimentReport:
    if name not in EXPERIMENTS:
        raise InputError(f"unknown experiment {name!r}; expected one of {', '.join(EXPERIMENTS)}")
    if not 0 <= seed < 2**64:
        raise InputError(f"seed must lie in [0, 2^64), got {seed}")
    started = time.perf_counter()
    used, columns, rows, aggregates = EXPERIMENTS[name](dict(params or {}), seed)
    elapsed = time.perf_counter() - started
    logger.info(f"experiment {name} (seed {seed}): {len(rows)} rows in {elapsed:.2f}s")
    return ExperimentReport(
        name=name,
        parameters=used,
        seed=seed,
        columns=columns,
        rows=rows,
        aggregates=aggregates,
        wall_clock=elapsed,
    )


def parse_params(pairs: List[str]) -> Dict[str, str]:
    """["n=100", "p=0.5"] -> {"n": "100", "p": "0.5"}"""
    params = {}
    for pair in pairs or []:
        key, sep, value = pair.partition("=")
        if not sep or not key.strip():
            raise InputError(f"parameter {pair!r} must look like key=value")
        params[key.strip()] = value.strip()
    return params


# --- persistence ------------------------------------------------------------

def _to_report(record: ExperimentRecord) -> ExperimentReport:
    return ExperimentReport(
        id=record.id,
        name=record.name,
        seed=int(record.seed),
        parameters=json.loads(record.parameters),
        columns=json.loads(record.columns),
        rows=json.loads(record.rows),
        aggregates=json.loads(record.aggregates),
        wall_clock=record.wall_clock,
        created_at=record.created_at,
    )


def store_report(db: Session, report: ExperimentReport) -> ExperimentReport:
    record = ExperimentRecord(
        name=report.name,
        seed=str(report.seed),
        parameters=json.dumps(report.parameters),
        columns=json.dumps(report.columns),
        rows=json.dumps(report.rows),
        aggregates=json.dumps(report.aggregates),
        wall_clock=report.wall_clock,
    )
    db.add(record)
    db.commit()
    db.refresh(record)
    logger.info(f"stored experiment {report.name} as report {record.id}")
    return _to_report(record)


def list_reports(db: Session, name: Optional[str] = None) -> List[ExperimentSummary]:
    query = db.query(ExperimentRecord)
    if name:
        query = query.filter(ExperimentRecord.name == name)
    records = query.order_by(ExperimentRecord.id).all()
    return [
        ExperimentSummary(
            id=r.id,
            name=r.name,
            seed=int(r.seed),
            samples=len(json.loads(r.rows)),
            wall_clock=r.wall_clock,
            created_at=r.created_at,
        )
        for r in records
    ]


def get_report(db: Session, report_id: int) -> Optional[ExperimentReport]:
    record = db.query(ExperimentRecord).filter(ExperimentRecord.id == report_id).first()
    return _to_report(record) if record else None
