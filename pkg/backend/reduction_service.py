# backend/reduction_service.py
"""3-SAT to metric dimension, as an executable construction.

Vertex numbering: one block of six per variable in the order
T, a1, b1, F, b2, a2 (the six-cycle read around), then one block of five per
clause in the order c1..c5 with c2 the centre of the star. Labels are
1-indexed, e.g. "a1_3" or "c4_2".
"""
import itertools
import logging
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from pydantic import ValidationError

from errors import InputError
from graph_service import Graph, all_pairs_distances, check_members
from reduction_schema import SatFormula
from resolving_service import Resolution, is_resolving

logger = logging.getLogger(__name__)

VARIABLE_ROLES = ("T", "a1", "b1", "F", "b2", "a2")
CLAUSE_ROLES = ("c1", "c2", "c3", "c4", "c5")


@dataclass(frozen=True)
class ReductionGraph:
    formula: SatFormula
    graph: Graph
    labels: Dict[str, int]

    def vertex(self, role: str, index: int) -> int:
        return self.labels[f"{role}_{index}"]

    def label_of(self, v: int) -> str:
        for name, u in self.labels.items():
            if u == v:
                return name
        raise InputError(f"vertex {v} out of range")

    def label_text(self) -> str:
        return "".join(f"{v} {name}\n" for name, v in sorted(self.labels.items(), key=lambda kv: kv[1]))


@dataclass(frozen=True)
class AssignmentWitness:
    """Candidate set built from an assignment plus the outcome of verifying it."""

    members: List[int]
    satisfies: bool
    resolution: Resolution


def make_formula(num_vars: int, clauses: Sequence[Sequence[int]]) -> SatFormula:
    try:
        return SatFormula(num_vars=num_vars, clauses=tuple(tuple(c) for c in clauses))
    except ValidationError as e:
        raise InputError(e.errors()[0]["msg"])


def parse_dimacs(text: str) -> SatFormula:
    """Read "p cnf n m" followed by 0-terminated clauses; "c" lines are comments."""
    header = None
    literals: List[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise InputError(f"line {lineno}: header must be 'p cnf <vars> <clauses>'")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise InputError(f"line {lineno}: header counts must be integers")
            continue
        if header is None:
            raise InputError(f"line {lineno}: clause before the 'p cnf' header")
        try:
            literals.extend(int(tok) for tok in line.split())
        except ValueError:
            raise InputError(f"line {lineno}: clauses are signed integers, got {line!r}")
    if header is None:
        raise InputError("missing 'p cnf' header")

    clauses, current = [], []
    for lit in literals:
        if lit == 0:
            if len(current) != 3:
                raise InputError(f"clause {len(clauses) + 1} has {len(current)} literals, expected 3")
            clauses.append(current)
            current = []
        else:
            current.append(lit)
    if current:
        raise InputError("last clause is not terminated by 0")
    num_vars, num_clauses = header
    if len(clauses) != num_clauses:
        raise InputError(f"header announces {num_clauses} clauses, found {len(clauses)}")
    return make_formula(num_vars, clauses)


def format_dimacs(formula: SatFormula) -> str:
    lines = [f"p cnf {formula.num_vars} {formula.num_clauses}"]
    lines += [" ".join(str(lit) for lit in clause) + " 0" for clause in formula.clauses]
    return "\n".join(lines) + "\n"


def sat_to_graph(formula: SatFormula) -> ReductionGraph:
    n, m = formula.num_vars, formula.num_clauses
    labels: Dict[str, int] = {}
    for i in range(1, n + 1):
        for offset, role in enumerate(VARIABLE_ROLES):
            labels[f"{role}_{i}"] = 6 * (i - 1) + offset
    for j in range(1, m + 1):
        for offset, role in enumerate(CLAUSE_ROLES):
            labels[f"{role}_{j}"] = 6 * n + 5 * (j - 1) + offset

    edges: List[Tuple[int, int]] = []
    for i in range(1, n + 1):
        ring = [labels[f"{role}_{i}"] for role in VARIABLE_ROLES]
        edges += [(ring[t], ring[(t + 1) % 6]) for t in range(6)]
    for j in range(1, m + 1):
        centre = labels[f"c2_{j}"]
        edges += [(centre, labels[f"{role}_{j}"]) for role in ("c1", "c3", "c4", "c5")]

    for j, clause in enumerate(formula.clauses, start=1):
        signs = {abs(lit): lit > 0 for lit in clause}
        c1, c3 = labels[f"c1_{j}"], labels[f"c3_{j}"]
        for i in range(1, n + 1):
            t, f = labels[f"T_{i}"], labels[f"F_{i}"]
            edges += [(t, c1), (f, c1)]
            if i not in signs:
                edges += [(f, c3), (t, c3)]
            elif signs[i]:
                edges.append((f, c3))
            else:
                edges.append((t, c3))
    g = Graph(6 * n + 5 * m, tuple(edges))
    logger.info(f"reduction graph: {n} variables, {m} clauses, {g.n} vertices, {g.m} edges")
    return ReductionGraph(formula=formula, graph=g, labels=labels)


def _check_assignment(rg: ReductionGraph, assignment: Sequence[bool]) -> List[bool]:
    assignment = [bool(x) for x in assignment]
    if len(assignment) != rg.formula.num_vars:
        raise InputError(f"expected {rg.formula.num_vars} truth values, got {len(assignment)}")
    return assignment


def assignment_to_resolving_set(rg: ReductionGraph, assignment: Sequence[bool]) -> AssignmentWitness:
    """{c4_j} plus a1_i for true and b1_i for false variables, verified on the graph."""
    assignment = _check_assignment(rg, assignment)
    members = [rg.vertex("c4", j) for j in range(1, rg.formula.num_clauses + 1)]
    members += [rg.vertex("a1" if value else "b1", i) for i, value in enumerate(assignment, start=1)]
    members.sort()
    resolution = is_resolving(all_pairs_distances(rg.graph), members)
    satisfies = rg.formula.satisfied_by(assignment)
    if satisfies and not resolution:
        logger.warning(f"satisfying assignment gave a non-resolving set; pair {resolution.witness}")
    return AssignmentWitness(members=members, satisfies=satisfies, resolution=resolution)


def resolving_set_to_assignment(rg: ReductionGraph, members: Sequence[int]) -> List[bool]:
    """x_i is true iff a1_i or a2_i belongs to the set."""
    n, m = rg.formula.num_vars, rg.formula.num_clauses
    members = check_members(rg.graph.n, members)
    if len(members) != n + m:
        raise InputError(f"expected a resolving set of size {n + m}, got {len(members)}")
    check = is_resolving(all_pairs_distances(rg.graph), members)
    if not check:
        raise InputError(f"set does not resolve the reduction graph: {check.witness} collide")
    chosen = set(members)
    return [rg.vertex("a1", i) in chosen or rg.vertex("a2", i) in chosen for i in range(1, n + 1)]


def required_groups(rg: ReductionGraph) -> List[List[int]]:
    """Vertex groups every resolving set has to hit."""
    n, m = rg.formula.num_vars, rg.formula.num_clauses
    groups = [[rg.vertex(role, i) for role in ("a1", "a2", "b1", "b2")] for i in range(1, n + 1)]
    groups += [[rg.vertex("c4", j), rg.vertex("c5", j)] for j in range(1, m + 1)]
    return groups


def all_assignments(num_vars: int):
    for values in itertools.product((True, False), repeat=num_vars):
        yield list(values)
