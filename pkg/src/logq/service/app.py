"""HTTP service exposing the metrics, fitting, and simulation operations.

Domain errors (bad values, infeasible models, malformed data) surface as
422 responses with a human-readable detail string; everything else is a
plain JSON payload mirroring the library results.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__, estimators, metrics, reference, simulator
from ..errors import LogqError
from . import schemas


def _scenario_from_request(req: schemas.SimulateRequest) -> simulator.SimulationScenario:
    if req.scenario == "power-mult":
        kwargs = {"alpha": req.alpha, "beta_true": req.beta_true}
        if req.beta_candidates is not None:
            kwargs["beta_candidates"] = tuple(req.beta_candidates)
        kind = simulator.PowerMultiplicative(**kwargs)
    else:
        cls = (
            simulator.ConstantMultiplicative
            if req.scenario == "const-mult"
            else simulator.ConstantAdditive
        )
        kwargs = {"c": req.c}
        if req.candidates is not None:
            kwargs["candidates"] = tuple(req.candidates)
        kind = cls(**kwargs)
    return simulator.SimulationScenario(kind, req.sigma, req.replications, req.seed)


def _fit(req: schemas.FitRequest) -> estimators.FitResult:
    if req.model == "constant":
        return estimators.fit_constant(req.data.ys, req.criterion)
    data = estimators.XYDataset(req.data.xs, req.data.ys)
    if req.model == "linear":
        return estimators.fit_linear(data, req.criterion)
    return estimators.fit_power(data, req.criterion)


def _model_payload(model) -> schemas.FittedModel:
    family = type(model).__name__.lower()
    parameters = {k: float(v) for k, v in vars(model).items()}
    return schemas.FittedModel(family=family, parameters=parameters)


def create_app() -> FastAPI:
    app = FastAPI(title="logq accuracy service", version=__version__)

    @app.exception_handler(LogqError)
    async def _domain_error(request: Request, exc: LogqError) -> JSONResponse:
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/metrics/accuracy-ratio", response_model=schemas.RatioResponse)
    def accuracy_ratio(req: schemas.RatioRequest) -> schemas.RatioResponse:
        return schemas.RatioResponse(
            accuracy_ratio=metrics.accuracy_ratio(req.prediction, req.actual),
            log_accuracy_ratio=metrics.log_accuracy_ratio(req.prediction, req.actual),
        )

    @app.post("/metrics/change-measures", response_model=schemas.ChangeMeasuresResponse)
    def change_measures(req: schemas.ChangeMeasuresRequest) -> schemas.ChangeMeasuresResponse:
        return schemas.ChangeMeasuresResponse(measures=metrics.relative_change_measures(req.f, req.g))

    @app.post("/metrics/evaluate", response_model=schemas.MetricReportResponse)
    def evaluate(req: schemas.PairedDataRequest) -> schemas.MetricReportResponse:
        obs = metrics.PairedObservations(req.actuals, req.predictions)
        report = metrics.evaluate_all(obs)
        return schemas.MetricReportResponse(
            n=obs.n,
            mape=report.mape,
            smape=report.smape,
            mer=report.mer,
            sum_sq_ln_q=report.sum_sq_ln_q,
            mean_ln_q=report.mean_ln_q,
            lsd=report.lsd,
            q_product=report.q_product,
        )

    @app.post("/fit", response_model=schemas.FitResponse)
    def fit(req: schemas.FitRequest) -> schemas.FitResponse:
        result = _fit(req)
        residuals = (
            None if result.ln_q_residuals is None else [float(v) for v in result.ln_q_residuals]
        )
        return schemas.FitResponse(
            model=_model_payload(result.model),
            criterion=result.criterion.value,
            objective=result.objective,
            n_over=result.n_over,
            n_under=result.n_under,
            converged=result.converged,
            iterations=result.iterations,
            q_product=result.q_product,
            ln_q_residuals=residuals,
            xs=[float(v) for v in req.data.xs],
        )

    @app.post("/simulate", response_model=schemas.SimulateResponse)
    def simulate(req: schemas.SimulateRequest) -> schemas.SimulateResponse:
        scenario = _scenario_from_request(req)
        tally = simulator.run_experiment(scenario)
        cells = {}
        for metric, cell in tally.counts.items():
            cells[metric.value] = schemas.TallyCell(
                correct=cell.correct,
                under=cell.under,
                over=cell.over,
                ties=cell.ties,
                percent_correct=tally.percent(metric, "correct"),
                percent_under=tally.percent(metric, "under"),
                percent_over=tally.percent(metric, "over"),
            )
        return schemas.SimulateResponse(
            scenario=req.scenario,
            sigma=req.sigma,
            replications=req.replications,
            seed=req.seed,
            metrics=cells,
        )

    @app.post("/simulate/tables", response_model=schemas.TablesResponse)
    def tables(req: schemas.TablesRequest) -> schemas.TablesResponse:
        suite = simulator.run_table_suite(req.seed, req.replications)
        documents = suite.table_documents()
        payloads = [
            schemas.TablePayload(
                name=name,
                title=doc.title,
                columns=list(doc.columns),
                rows=[list(row) for row in doc.rows],
            )
            for name, doc in documents.items()
        ]
        if req.replications >= reference.MIN_REPLICATIONS_FOR_COMPARISON:
            comparison = [
                schemas.ComparisonLine(
                    table=line.table,
                    sigma=line.sigma,
                    metric=line.metric,
                    outcome=line.outcome,
                    observed=line.observed,
                    reference=line.reference,
                    deviation=line.deviation,
                    within_tolerance=line.within_tolerance,
                )
                for line in reference.compare_with_reference(suite)
            ]
            note = None
        else:
            comparison = None
            note = (
                "insufficient replications for a reference comparison: "
                f"{req.replications} < {reference.MIN_REPLICATIONS_FOR_COMPARISON}"
            )
        return schemas.TablesResponse(
            seed=req.seed,
            replications=req.replications,
            tables=payloads,
            comparison=comparison,
            comparison_note=note,
        )

    return app
