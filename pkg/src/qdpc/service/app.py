"""HTTP facade over the library.

Every endpoint is a stateless wrapper: decode the request model, call the
corresponding library routine, re-encode the result.  Domain errors
(ValueError, IndexError) surface as 400 responses; request-shape errors are
pydantic 422s.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..data import (
    Dataset,
    DistanceOracle,
    QueryLedger,
    dataset_from_json,
    derive_seed,
    generate_gaussian_mixture,
    generate_uniform_ball,
)
from ..decision import decide_same_cluster
from ..dpc import Kernel, Thresholds, assign_clusters, build_forest, forest_to_json, raw_densities
from ..qmf import QmfConfig, quantum_decide
from ..scaling import decision_benchmark, fit_power_law, height_scaling
from ..toy import load_toy_fixture, toy_experiment
from . import schemas


def _dataset(payload: schemas.DatasetPayload) -> Dataset:
    body = payload.model_dump()
    metric = body.pop("metric", "euclidean")
    return dataset_from_json(body, metric=metric)


def _kernel(spec: schemas.KernelSpec) -> Kernel:
    return Kernel(spec.kind, spec.d_c)


def _generate(family: str, n: int, d: int, seed: int, radius=1.0, k=10, box=100.0,
              covariance="random") -> Dataset:
    if family == "uniform":
        return generate_uniform_ball(n, d, radius=radius, seed=seed)
    return generate_gaussian_mixture(n, d, k=k, box=box, seed=seed, covariance=covariance)


def create_app() -> FastAPI:
    app = FastAPI(title="qdpc", version="0.1.0")

    @app.exception_handler(ValueError)
    def _domain_error(request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(IndexError)
    def _index_error(request: Request, exc: IndexError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/generate", response_model=schemas.GenerateResponse)
    def generate(req: schemas.GenerateRequest):
        dataset = _generate(
            req.family, req.n, req.d, req.seed,
            radius=req.radius, k=req.k, box=req.box, covariance=req.covariance,
        )
        return {"dataset": dataset.to_json()}

    @app.post("/cluster", response_model=schemas.ClusterResponse)
    def cluster(req: schemas.ClusterRequest):
        dataset = _dataset(req.dataset)
        oracle = DistanceOracle(dataset, QueryLedger(memoized=True))
        forest = build_forest(oracle, _kernel(req.kernel))
        assignment = assign_clusters(forest, Thresholds(req.rho_c, req.delta_c))
        body = forest_to_json(forest, assignment)
        body["classical_queries"] = oracle.ledger.classical_queries
        return body

    @app.post("/decide", response_model=schemas.DecideResponse)
    def decide(req: schemas.DecideRequest):
        dataset = _dataset(req.dataset)
        oracle = DistanceOracle(dataset, QueryLedger(memoized=True))
        out = decide_same_cluster(
            oracle, _kernel(req.kernel), Thresholds(req.rho_c, req.delta_c), req.i, req.j
        )
        return {
            "same_cluster": out.same_cluster,
            "root_i": out.root_i,
            "root_j": out.root_j,
            "classical_queries": out.classical_queries,
        }

    @app.post("/qdecide", response_model=schemas.QDecideResponse)
    def qdecide(req: schemas.QDecideRequest):
        dataset = _dataset(req.dataset)
        kernel = _kernel(req.kernel)
        thresholds = Thresholds(req.rho_c, req.delta_c)
        oracle = DistanceOracle(dataset, QueryLedger(memoized=True))
        classical = decide_same_cluster(oracle, kernel, thresholds, req.i, req.j)
        profile = raw_densities(dataset, kernel)
        config = QmfConfig(
            epsilon=req.epsilon, growth=req.growth, cutoff_factor=req.cutoff_factor
        )
        yes = 0
        agree = 0
        charged = 0.0
        rounds = 0.0
        calls = 0.0
        for rep in range(req.repeats):
            rng = np.random.default_rng(derive_seed(req.seed, rep))
            out = quantum_decide(
                DistanceOracle(dataset, QueryLedger(memoized=False)),
                kernel, thresholds, req.i, req.j, req.epsilon,
                config=config, rng=rng, profile=profile,
            )
            yes += out.same_cluster
            agree += out.same_cluster == classical.same_cluster
            charged += out.charged_queries
            rounds += out.grover_iterations
            calls += out.nearest_higher_calls
        return {
            "classical": {
                "same_cluster": classical.same_cluster,
                "root_i": classical.root_i,
                "root_j": classical.root_j,
                "classical_queries": classical.classical_queries,
            },
            "quantum": {
                "yes_rate": yes / req.repeats,
                "agreement_rate": agree / req.repeats,
                "mean_charged_queries": charged / req.repeats,
                "mean_grover_iterations": rounds / req.repeats,
                "mean_nearest_higher_calls": calls / req.repeats,
            },
            "repeats": req.repeats,
        }

    @app.post("/heights", response_model=schemas.HeightsResponse)
    def heights(req: schemas.HeightsRequest):
        report = height_scaling(
            req.family, req.d, req.n_grid,
            runs=req.runs, seed=req.seed, d_c=req.d_c, threads=req.threads,
        )
        entries = [
            {
                "family": e.family, "d": e.d, "n": e.n,
                "run_count": e.runs, "mean_H": e.mean_height,
            }
            for e in report.entries
        ]
        long = [
            {
                "family": e.family, "d": e.d, "n": e.n,
                "run": run, "height": h, "d_c": c,
            }
            for e in report.entries
            for run, (h, c) in enumerate(zip(e.heights, e.cutoffs))
        ]
        fit = None
        if report.fit is not None:
            fit = {
                "family": req.family, "d": req.d,
                "slope": report.fit.slope, "d_eff": report.fit.d_eff,
                "r2": report.fit.r_squared, "intercept": report.fit.intercept,
            }
        return {"entries": entries, "long": long, "fit": fit}

    @app.post("/fit", response_model=schemas.FitPayload)
    def fit(req: schemas.FitRequest):
        res = fit_power_law(req.points)
        return {
            "family": req.family, "d": req.d,
            "slope": res.slope, "d_eff": res.d_eff,
            "r2": res.r_squared, "intercept": res.intercept,
        }

    @app.post("/qbench", response_model=schemas.QBenchResponse)
    def qbench(req: schemas.QBenchRequest):
        if req.dataset is not None:
            dataset = _dataset(req.dataset)
        else:
            if req.family is None or req.n is None or req.d is None:
                raise ValueError("provide either dataset or family with n and d")
            dataset = _generate(req.family, req.n, req.d, req.seed)
        if req.pairs is not None:
            pairs = [(int(i), int(j)) for i, j in req.pairs]
        else:
            rng = np.random.default_rng(derive_seed(req.seed, dataset.n, req.num_pairs))
            pairs = [
                tuple(int(v) for v in rng.choice(dataset.n, size=2, replace=False))
                for _ in range(req.num_pairs)
            ]
        report = decision_benchmark(
            dataset, pairs, _kernel(req.kernel), Thresholds(req.rho_c, req.delta_c),
            epsilon=req.epsilon, repeats=req.repeats, seed=req.seed,
        )
        return {
            "n": report.n,
            "rows": [
                {
                    "i": r.i, "j": r.j, "same_cluster": r.same_cluster,
                    "classical_queries": r.classical_queries,
                    "quantum_mean_charged": r.quantum_mean_charged,
                    "quantum_mean_rounds": r.quantum_mean_rounds,
                    "agreement_rate": r.agreement_rate, "repeats": r.repeats,
                }
                for r in report.rows
            ],
            "classical_queries_mean": report.classical_queries_mean,
            "quantum_charged_mean": report.quantum_charged_mean,
            "agreement_rate": report.agreement_rate,
            "quantum_below_classical": report.quantum_below_classical,
        }

    @app.post("/toy", response_model=schemas.ToyResponse)
    def toy(req: schemas.ToyRequest):
        if req.fixture is not None:
            rho = np.asarray(req.fixture.rho, dtype=float)
            dist = np.asarray(req.fixture.dist, dtype=float)
        else:
            rho, dist = load_toy_fixture()
        stats = toy_experiment(rho, dist, runs=req.runs, seed=req.seed)
        rows = [
            {"element": e, "quantum_mean": q, "classical_mean": c, "runs": stats.runs}
            for e, q, c in zip(stats.elements, stats.quantum_mean, stats.classical_mean)
        ]
        return {"rows": rows}

    return app


app = create_app()
