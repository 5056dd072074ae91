# backend/test_routers.py
from unittest.mock import patch

import pytest
from httpx import ASGITransport, AsyncClient

from errors import UnresolvableError
from main import app


def client():
    return AsyncClient(transport=ASGITransport(app=app), base_url="http://test")


@pytest.mark.asyncio
async def test_health():
    async with client() as ac:
        response = await ac.get("/")
    assert response.status_code == 200
    assert response.json()["status"] == "running"


@pytest.mark.asyncio
async def test_generate():
    async with client() as ac:
        response = await ac.post("/api/generate", json={"spec": "petersen2:5"})
    assert response.status_code == 200
    body = response.json()
    assert (body["n"], body["m"]) == (10, 15)
    assert body["text"].startswith("# family: petersen2:5\n10 15\n")


@pytest.mark.asyncio
async def test_generate_rejects_bad_specs():
    async with client() as ac:
        malformed = await ac.post("/api/generate", json={"spec": "fan"})
        invalid = await ac.post("/api/generate", json={"spec": "cycle:2"})
    assert malformed.status_code == 422
    assert invalid.status_code == 400


@pytest.mark.asyncio
async def test_solve_by_spec_and_by_text():
    async with client() as ac:
        by_spec = await ac.post("/api/solve", json={"spec": "fan:12", "method": "family"})
        by_text = await ac.post("/api/solve", json={"graph": "5 4\n0 1\n1 2\n2 3\n3 4\n"})
    assert by_spec.status_code == 200
    assert by_spec.json() == {"beta": 5, "witness": [2, 4, 7, 9, 12], "method": "closed_form"}
    assert by_text.json()["witness"] == [0]


@pytest.mark.asyncio
async def test_solve_variant_and_heuristic():
    async with client() as ac:
        doubly = await ac.post("/api/solve", json={"spec": "path:6", "variant": "doubly"})
        greedy = await ac.post("/api/solve", json={"spec": "complete:4", "method": "ich"})
    assert doubly.json()["beta"] == 2
    assert greedy.json() == {"beta": 3, "witness": [0, 1, 2], "method": "ich"}


@pytest.mark.asyncio
async def test_solve_errors():
    async with client() as ac:
        both = await ac.post("/api/solve", json={"spec": "path:3", "graph": "2 1\n0 1\n"})
        too_big = await ac.post("/api/solve", json={"spec": "path:100"})
        unknown = await ac.post("/api/solve", json={"spec": "path:5", "method": "magic"})
    assert both.status_code == 422
    assert too_big.status_code == 400
    assert "limited to" in too_big.json()["detail"]
    assert unknown.status_code == 400


@pytest.mark.asyncio
async def test_unresolvable_maps_to_422():
    with patch("graph_router.solve_graph", side_effect=UnresolvableError((0, 1))):
        async with client() as ac:
            response = await ac.post("/api/solve", json={"spec": "path:3"})
    assert response.status_code == 422
    assert "identical" in response.json()["detail"]


@pytest.mark.asyncio
async def test_verify():
    async with client() as ac:
        good = await ac.post("/api/verify", json={"spec": "cycle:6", "members": [0, 1]})
        bad = await ac.post("/api/verify", json={"spec": "cycle:6", "members": [0, 3]})
        out_of_range = await ac.post("/api/verify", json={"spec": "cycle:6", "members": [0, 6]})
    assert good.json()["resolved"] is True
    assert good.json()["vectors"][3] == [3, 2]
    assert bad.json()["resolved"] is False
    assert bad.json()["witness"] == [1, 5]
    assert out_of_range.status_code == 400


@pytest.mark.asyncio
async def test_canon():
    async with client() as ac:
        a = await ac.post("/api/canon", json={"spec": "prism:4"})
        b = await ac.post("/api/canon", json={"spec": "hypercube:3"})
        big = await ac.post("/api/canon", json={"spec": "path:40"})
    assert a.status_code == 200
    assert a.json()["matrix"] == b.json()["matrix"]
    assert big.status_code == 400


@pytest.mark.asyncio
async def test_experiment_round_trip():
    request = {"name": "random-trees", "seed": 5, "params": {"n": "25", "samples": "3"}, "store": True}
    async with client() as ac:
        created = await ac.post("/api/experiments", json=request)
        assert created.status_code == 200
        report_id = created.json()["id"]
        listed = await ac.get("/api/experiments", params={"name": "random-trees"})
        fetched = await ac.get(f"/api/experiments/{report_id}")
        missing = await ac.get("/api/experiments/999999")
    assert any(s["id"] == report_id for s in listed.json())
    assert fetched.json()["rows"] == created.json()["rows"]
    assert missing.status_code == 404


@pytest.mark.asyncio
async def test_experiment_errors():
    async with client() as ac:
        unknown = await ac.post("/api/experiments", json={"name": "nope", "seed": 1})
        negative = await ac.post("/api/experiments", json={"name": "er-bound", "seed": -1})
    assert unknown.status_code == 400
    assert negative.status_code == 422
