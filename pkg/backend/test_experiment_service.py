# backend/test_experiment_service.py
from types import SimpleNamespace

import pytest

from approx_service import er_subset_size
from db import SessionLocal, init_db
from errors import InputError
from experiment_service import aggregate, get_report, list_reports, parse_params, run_experiment, store_report
from report_schema import ExperimentReport


@pytest.fixture
def db():
    init_db()
    session = SessionLocal()
    try:
        yield session
    finally:
        session.close()


def test_runs_are_reproducible():
    params = {"n": "40", "samples": "6"}
    first = run_experiment("random-trees", params, seed=7)
    second = run_experiment("random-trees", params, seed=7)
    assert first.rows == second.rows
    assert first.aggregates == second.aggregates
    assert run_experiment("random-trees", params, seed=8).rows != first.rows


def test_random_trees_rows():
    report = run_experiment("random-trees", {"n": "30", "samples": "4"}, seed=1)
    assert report.columns == ["sample", "seed", "n", "beta", "beta_over_n"]
    assert len(report.rows) == 4
    assert report.column("n") == [30] * 4
    assert set(report.aggregates) == {"beta_over_n", "beta_variance_per_n"}


def test_er_bound_defaults_to_formula_size():
    report = run_experiment("er-bound", {"n": "30", "trials": "5"}, seed=3)
    assert report.parameters["size"] == er_subset_size(30, 0.5)
    assert all(value in (0, 1) for value in report.column("resolved"))


def test_er_zigzag_rows():
    report = run_experiment("er-zigzag", {"n": "16", "xs": "0.5,1.0", "samples": "2"}, seed=5)
    assert len(report.rows) == 4
    assert report.column("x") == [0.5, 0.5, 1.0, 1.0]
    assert all(beta >= 1 for beta in report.column("beta_hat"))


def test_sbm_alloc_grows_as_threshold_shrinks():
    params = {"sizes": "10x10", "p": "0.5x0.1x0.1x0.5", "thresholds": "10,1", "trials": "2"}
    report = run_experiment("sbm-alloc", params, seed=9)
    totals = report.column("total")
    assert totals[0] <= totals[1]
    assert all(0.0 <= rate <= 1.0 for rate in report.column("resolved_rate"))


def test_bad_requests():
    with pytest.raises(InputError, match="unknown experiment"):
        run_experiment("zigzag", {}, seed=0)
    with pytest.raises(InputError):
        run_experiment("random-trees", {"n": "lots"}, seed=0)
    with pytest.raises(InputError):
        run_experiment("random-trees", {}, seed=-1)
    with pytest.raises(InputError):
        run_experiment("sbm-alloc", {"sizes": "10x10", "p": "0.5,0.1"}, seed=0)


def test_parse_params():
    assert parse_params(["n=100", " p = 0.5 "]) == {"n": "100", "p": "0.5"}
    assert parse_params([]) == {}
    with pytest.raises(InputError):
        parse_params(["n"])


def test_aggregate():
    stats = aggregate([1.0, 2.0, 3.0])
    assert stats == {"mean": 2.0, "variance": 1.0, "min": 1.0, "max": 3.0}
    assert aggregate([]) == {}
    assert aggregate([4.0])["variance"] == 0.0


def test_report_output():
    report = run_experiment("random-trees", {"n": "20", "samples": "3"}, seed=2)
    lines = report.to_tsv().splitlines()
    assert lines[0] == "sample\tseed\tn\tbeta\tbeta_over_n"
    assert len(lines) == 4
    assert report.summary().startswith("# experiment=random-trees seed=2 samples=3")


def test_store_list_and_fetch(db):
    report = run_experiment("random-trees", {"n": "20", "samples": "3"}, seed=2**63 + 5)
    stored = store_report(db, report)
    assert stored.id is not None
    assert stored.created_at is not None
    assert stored.seed == 2**63 + 5

    fetched = get_report(db, stored.id)
    assert fetched.rows == report.rows
    assert fetched.aggregates == report.aggregates

    summaries = list_reports(db, name="random-trees")
    assert any(s.id == stored.id and s.samples == 3 for s in summaries)
    assert all(s.name == "random-trees" for s in summaries)
    assert get_report(db, 10**9) is None


@pytest.mark.slow
def test_random_tree_constants():
    report = run_experiment("random-trees", {}, seed=2024)
    assert 0.1388 <= report.aggregates["beta_over_n"]["mean"] <= 0.1428
    assert 0.03 <= report.aggregates["beta_variance_per_n"]["value"] <= 0.10


@pytest.mark.slow
def test_er_subset_resolves_with_high_probability():
    report = run_experiment("er-bound", {}, seed=2024)
    assert report.parameters["size"] == 21
    assert sum(report.column("resolved")) >= 95


def test_report_reads_from_attributes():
    record = SimpleNamespace(
        name="random-trees", parameters={"n": 5}, seed=3, columns=["beta"], rows=[[1], [2]],
        aggregates={"beta": {"mean": 1.5}}, wall_clock=0.25, id=7, created_at=None,
    )
    report = ExperimentReport.model_validate(record)
    assert report.id == 7
    assert report.column("beta") == [1, 2]
    with pytest.raises(ValueError):
        ExperimentReport(name="x", parameters={}, seed=0, columns=["a", "b"], rows=[[1]])
