"""Request/response models for the HTTP service."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field


class RatioRequest(BaseModel):
    prediction: float
    actual: float


class RatioResponse(BaseModel):
    accuracy_ratio: float
    log_accuracy_ratio: float


class ChangeMeasuresRequest(BaseModel):
    f: float
    g: float


class ChangeMeasuresResponse(BaseModel):
    measures: dict[str, float]


class PairedDataRequest(BaseModel):
    actuals: list[float] = Field(min_length=1)
    predictions: list[float] = Field(min_length=1)


class MetricReportResponse(BaseModel):
    n: int
    mape: float
    smape: float
    mer: float
    sum_sq_ln_q: float
    mean_ln_q: float
    lsd: float | None
    q_product: float


class XYData(BaseModel):
    xs: list[float] = Field(min_length=1)
    ys: list[float] = Field(min_length=1)


class FitRequest(BaseModel):
    data: XYData
    model: Literal["constant", "linear", "power"]
    criterion: Literal["mape", "lnq", "ols", "lad"]


class FittedModel(BaseModel):
    family: str
    parameters: dict[str, float]


class FitResponse(BaseModel):
    model: FittedModel
    criterion: str
    objective: float
    n_over: int
    n_under: int
    converged: bool
    iterations: int
    q_product: float | None
    ln_q_residuals: list[float] | None
    xs: list[float]


class SimulateRequest(BaseModel):
    scenario: Literal["power-mult", "const-mult", "const-add"]
    sigma: float = Field(gt=0)
    replications: int = Field(ge=1, le=1_000_000)
    seed: int = Field(ge=0)
    # structural overrides; the defaults reproduce the published setup
    alpha: float = 3.03
    beta_true: float = 0.943
    beta_candidates: list[float] | None = None
    c: float = 10.0
    candidates: list[float] | None = None


class TallyCell(BaseModel):
    correct: int
    under: int
    over: int
    ties: int
    percent_correct: float
    percent_under: float
    percent_over: float


class SimulateResponse(BaseModel):
    scenario: str
    sigma: float
    replications: int
    seed: int
    metrics: dict[str, TallyCell]


class TablesRequest(BaseModel):
    seed: int = Field(ge=0)
    replications: int = Field(ge=1, le=1_000_000, default=10_000)


class TablePayload(BaseModel):
    name: str
    title: str
    columns: list[str]
    rows: list[list[float]]


class ComparisonLine(BaseModel):
    table: str
    sigma: float
    metric: str
    outcome: str
    observed: float
    reference: float
    deviation: float
    within_tolerance: bool


class TablesResponse(BaseModel):
    seed: int
    replications: int
    tables: list[TablePayload]
    comparison: list[ComparisonLine] | None
    comparison_note: str | None
