# backend/graph_router.py
import logging
from typing import Optional, Tuple

from fastapi import APIRouter, HTTPException, Request
from slowapi import Limiter
from slowapi.util import get_remote_address

from application_schema import CanonicalForm
from application_service import canonical_form
from config import get_settings
from errors import InputError, MetricDimensionError
from exact_service import solve_graph
from family_schema import FamilySpec
from family_service import generate_from_string, parse_spec
from graph_schema import CanonRequest, GenerateRequest, GenerateResponse, GraphSource, SolveRequest, VerifyRequest, VerifyResponse
from graph_service import Graph, all_pairs_distances, format_edge_list, parse_edge_list
from resolving_service import verify
from result_schema import BetaResult

logger = logging.getLogger(__name__)

router = APIRouter(tags=["graphs"])
settings = get_settings()
limiter = Limiter(key_func=get_remote_address)


def raise_http(e: MetricDimensionError):
    """InputError -> 400, any other domain failure -> 422."""
    status = 400 if isinstance(e, InputError) else 422
    raise HTTPException(status_code=status, detail=str(e))


def load_graph(source: GraphSource) -> Tuple[Graph, Optional[FamilySpec]]:
    if source.spec is not None:
        g, spec = generate_from_string(source.spec)
        return g, spec if isinstance(spec, FamilySpec) else None
    g, metadata = parse_edge_list(source.graph)
    family = metadata.get("family")
    spec = parse_spec(family) if family else None
    return g, spec if isinstance(spec, FamilySpec) else None


def check_size(g: Graph, limit: int, what: str):
    if g.n > limit:
        raise InputError(f"{what} is limited to {limit} vertices, graph has {g.n}")


@router.post("/generate", response_model=GenerateResponse)
async def generate_graph(body: GenerateRequest):
    try:
        g, spec = generate_from_string(body.spec)
    except MetricDimensionError as e:
        raise_http(e)
    return GenerateResponse(
        label=spec.label,
        n=g.n,
        m=g.m,
        edges=list(g.edges),
        text=format_edge_list(g, {"family": spec.label}),
    )


@router.post("/solve", response_model=BetaResult)
@limiter.limit(settings.SOLVE_RATE_LIMIT)
async def solve(request: Request, body: SolveRequest):
    try:
        g, spec = load_graph(body)
        if body.method in ("brute", "ich"):
            check_size(g, settings.BRUTE_FORCE_MAX_VERTICES, "exhaustive search")
        result = solve_graph(g, body.method, spec=spec, variant=body.variant)
    except MetricDimensionError as e:
        raise_http(e)
    logger.info(f"solve {body.method}: n={g.n} beta={result.beta}")
    return result


@router.post("/verify", response_model=VerifyResponse)
async def verify_set(body: VerifyRequest):
    try:
        g, _ = load_graph(body)
        d = all_pairs_distances(g)
        check = verify(g, body.members, body.variant, d)
    except MetricDimensionError as e:
        raise_http(e)
    vectors = d.columns(body.members).tolist() if g.n <= 200 else None
    return VerifyResponse(resolved=check.resolved, witness=check.witness, vectors=vectors)


@router.post("/canon", response_model=CanonicalForm)
@limiter.limit(settings.SOLVE_RATE_LIMIT)
async def canon(request: Request, body: CanonRequest):
    try:
        g, _ = load_graph(body)
        check_size(g, settings.CANONICAL_MAX_VERTICES, "canonical labelling")
        return canonical_form(g)
    except MetricDimensionError as e:
        raise_http(e)
