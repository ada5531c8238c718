"""Monte Carlo experiments scoring accuracy measures as model selectors.

Each experiment draws many replications of noisy data from a known true
model, asks four accuracy measures (MAPE, sum of squared log ratios, LSD,
SMAPE) to pick the best candidate from a fixed menu that contains the
truth, and tallies how often each measure picks correctly versus an
under- or over-estimating candidate.  Replications are mutually
independent: every (master_seed, replication_index) pair derives its own
random stream, so runs are reproducible at any level of parallelism and
partial tallies merge associatively.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Union

import numpy as np

from . import metrics
from .dataio import TableDocument
from .errors import DomainError
from .estimators import XYDataset
from .models import Constant, ModelForm, Power, predict

__all__ = [
    "SelectionMetric",
    "PowerMultiplicative",
    "ConstantMultiplicative",
    "ConstantAdditive",
    "ScenarioKind",
    "SimulationScenario",
    "Selection",
    "CellCounts",
    "SelectionTally",
    "TableSuiteResult",
    "replication_rng",
    "generate_replication",
    "select_best_model",
    "run_replication_range",
    "run_experiment",
    "run_table_suite",
    "MULTIPLICATIVE_SIGMAS",
    "ADDITIVE_SIGMAS",
]

logger = logging.getLogger(__name__)

DEFAULT_X_GRID = tuple(float(x) for x in range(50, 1501, 50))
DEFAULT_N_POINTS = 30

MULTIPLICATIVE_SIGMAS = (0.1, 0.2, 0.3, 0.4)
ADDITIVE_SIGMAS = (1.0, 1.5, 2.0, 2.5)


class SelectionMetric(str, Enum):
    """Accuracy measure used to rank candidate models."""

    MAPE = "mape"
    SUM_SQ_LNQ = "sum_sq_ln_q"
    LSD = "lsd"
    SMAPE = "smape"


def _candidate_tuple(values, true_value: float, label: str) -> tuple[float, ...]:
    out = tuple(float(v) for v in values)
    if len(out) < 2:
        raise DomainError(f"{label} needs at least two candidates")
    if sum(1 for v in out if v == true_value) != 1:
        raise DomainError(f"{label} must contain the true value exactly once")
    return out


@dataclass(frozen=True)
class PowerMultiplicative:
    """y = exp(alpha) * x**beta_true * eps, eps log-normal with geometric mean 1.

    Candidates share alpha and differ in the exponent, so picking a beta
    below beta_true means picking a model that under-predicts everywhere
    on the grid.
    """

    alpha: float = 3.03
    beta_true: float = 0.943
    beta_candidates: tuple[float, ...] = (0.92, 0.93, 0.943, 0.95, 0.96)
    x_grid: tuple[float, ...] = DEFAULT_X_GRID

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "beta_candidates",
            _candidate_tuple(self.beta_candidates, self.beta_true, "beta_candidates"),
        )
        grid = tuple(float(x) for x in self.x_grid)
        if len(grid) < 2 or any(x <= 0.0 for x in grid):
            raise DomainError("x_grid must hold at least two positive values")
        object.__setattr__(self, "x_grid", grid)

    def candidate_models(self) -> list[ModelForm]:
        scale = math.exp(self.alpha)
        return [Power(scale, b) for b in self.beta_candidates]

    def candidate_parameters(self) -> tuple[float, ...]:
        return self.beta_candidates

    def true_parameter(self) -> float:
        return self.beta_true


class _ConstantKind:
    """Shared behaviour of the two constant-model scenario kinds."""

    def __post_init__(self) -> None:
        if self.c <= 0.0:
            raise DomainError("true constant must be positive")
        cands = _candidate_tuple(self.candidates, self.c, "candidates")
        if any(v <= 0.0 for v in cands):
            raise DomainError("candidates must be positive")
        object.__setattr__(self, "candidates", cands)
        if self.n_points < 2:
            raise DomainError("n_points must be at least 2")

    def candidate_models(self) -> list[ModelForm]:
        return [Constant(v) for v in self.candidates]

    def candidate_parameters(self) -> tuple[float, ...]:
        return self.candidates

    def true_parameter(self) -> float:
        return self.c


@dataclass(frozen=True)
class ConstantMultiplicative(_ConstantKind):
    """y = c * eps, eps log-normal with geometric mean 1."""

    c: float = 10.0
    candidates: tuple[float, ...] = (8.0, 9.0, 10.0, 11.0, 12.0)
    n_points: int = DEFAULT_N_POINTS


@dataclass(frozen=True)
class ConstantAdditive(_ConstantKind):
    """y = c + e, e normal; any non-positive draw is redrawn point by point."""

    c: float = 10.0
    candidates: tuple[float, ...] = (8.0, 9.0, 10.0, 11.0, 12.0)
    n_points: int = DEFAULT_N_POINTS


ScenarioKind = Union[PowerMultiplicative, ConstantMultiplicative, ConstantAdditive]


@dataclass(frozen=True)
class SimulationScenario:
    """A scenario kind plus noise level, replication count, and seed."""

    kind: ScenarioKind
    sigma: float
    replications: int
    master_seed: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.sigma) and self.sigma > 0.0):
            raise DomainError(f"sigma must be positive, got {self.sigma}")
        if self.replications < 1:
            raise DomainError("replications must be at least 1")
        if self.master_seed < 0:
            raise DomainError("master_seed must be non-negative")


class Selection(NamedTuple):
    index: int
    tied: bool


@dataclass(frozen=True)
class CellCounts:
    """Selection outcomes for one metric: correct/under/over partition the
    replications; ties counts how many selections needed tie-breaking."""

    correct: int = 0
    under: int = 0
    over: int = 0
    ties: int = 0

    def __add__(self, other: "CellCounts") -> "CellCounts":
        return CellCounts(
            self.correct + other.correct,
            self.under + other.under,
            self.over + other.over,
            self.ties + other.ties,
        )


@dataclass(frozen=True)
class SelectionTally:
    """Aggregated selection outcomes over a block of replications."""

    replications: int
    counts: dict[SelectionMetric, CellCounts]

    def merged(self, other: "SelectionTally") -> "SelectionTally":
        if set(self.counts) != set(other.counts):
            raise DomainError("cannot merge tallies over different metric sets")
        return SelectionTally(
            self.replications + other.replications,
            {m: self.counts[m] + other.counts[m] for m in self.counts},
        )

    def percent(self, metric: SelectionMetric | str, outcome: str) -> float:
        """Percentage of replications with the given outcome ('correct', 'under', 'over')."""
        cell = self.counts[SelectionMetric(metric)]
        return 100.0 * getattr(cell, outcome) / self.replications


def replication_rng(master_seed: int, replication_index: int) -> np.random.Generator:
    # Seeding the generator with the (seed, index) pair, rather than
    # jumping a shared stream, keeps replications independent of execution
    # order and safe to draw in parallel.
    return np.random.default_rng(np.random.SeedSequence((master_seed, replication_index)))


def generate_replication(scenario: SimulationScenario, replication_index: int) -> XYDataset:
    """Draw one replication's dataset; deterministic in (master_seed, index)."""
    if not 0 <= replication_index < scenario.replications:
        raise DomainError(
            f"replication_index must be in [0, {scenario.replications}), got {replication_index}"
        )
    rng = replication_rng(scenario.master_seed, replication_index)
    kind = scenario.kind
    if isinstance(kind, PowerMultiplicative):
        xs = np.asarray(kind.x_grid, dtype=float)
        noise = np.exp(rng.normal(0.0, scenario.sigma, xs.size))
        ys = math.exp(kind.alpha) * xs ** kind.beta_true * noise
    elif isinstance(kind, ConstantMultiplicative):
        xs = np.arange(1, kind.n_points + 1, dtype=float)
        ys = kind.c * np.exp(rng.normal(0.0, scenario.sigma, xs.size))
    else:
        xs = np.arange(1, kind.n_points + 1, dtype=float)
        ys = kind.c + rng.normal(0.0, scenario.sigma, xs.size)
        redrawn = 0
        while True:
            bad = ys <= 0.0
            n_bad = int(np.count_nonzero(bad))
            if n_bad == 0:
                break
            redrawn += n_bad
            ys[bad] = kind.c + rng.normal(0.0, scenario.sigma, n_bad)
        if redrawn:
            logger.debug(
                "replication %d: redrew %d non-positive additive draws", replication_index, redrawn
            )
    return XYDataset(xs, ys)


def _metric_value_rows(ys: np.ndarray, predictions: np.ndarray) -> dict[SelectionMetric, np.ndarray]:
    # One row per candidate; reuses the metrics kernels so selection agrees
    # bit-for-bit with scoring candidates one at a time.
    ln_q = metrics._ln_q_values(ys, predictions)
    return {
        SelectionMetric.MAPE: metrics._mape_values(ys, predictions),
        SelectionMetric.SUM_SQ_LNQ: metrics._sum_sq_values(ln_q),
        SelectionMetric.LSD: metrics._lsd_values(ln_q),
        SelectionMetric.SMAPE: metrics._smape_values(ys, predictions),
    }


def _argmin_selection(values: np.ndarray) -> Selection:
    index = int(np.argmin(values))
    tied = int(np.count_nonzero(values == values[index])) > 1
    return Selection(index, tied)


def _candidate_predictions(kind: ScenarioKind, xs: np.ndarray) -> np.ndarray:
    rows = np.vstack([np.asarray(predict(m, xs), dtype=float) for m in kind.candidate_models()])
    if np.any(rows <= 0.0) or not np.all(np.isfinite(rows)):
        raise DomainError("every candidate model must predict positive values on the x grid")
    return rows


def select_best_model(
    data: XYDataset, candidates: list[ModelForm], metric: SelectionMetric | str
) -> Selection:
    """Index of the candidate minimising the metric; ties go to the earliest index."""
    metric = SelectionMetric(metric)
    rows = np.vstack([np.asarray(predict(m, data.xs), dtype=float) for m in candidates])
    if rows.shape[0] < 2:
        raise DomainError("need at least two candidate models")
    if np.any(rows <= 0.0) or not np.all(np.isfinite(rows)):
        raise DomainError("every candidate model must predict positive values on the x grid")
    return _argmin_selection(_metric_value_rows(data.ys, rows)[metric])


def run_replication_range(scenario: SimulationScenario, start: int, stop: int) -> SelectionTally:
    """Tally selections for replication indices [start, stop).

    Disjoint ranges of the same scenario can run anywhere and be combined
    with ``SelectionTally.merged``; the result equals a single full run.
    """
    if not 0 <= start <= stop <= scenario.replications:
        raise DomainError(f"bad replication range [{start}, {stop})")
    if stop == start:
        return SelectionTally(0, {m: CellCounts() for m in SelectionMetric})
    kind = scenario.kind
    params = kind.candidate_parameters()
    true_param = kind.true_parameter()
    prediction_rows = _candidate_predictions(kind, generate_replication(scenario, start).xs)
    tallies = {m: [0, 0, 0, 0] for m in SelectionMetric}
    for index in range(start, stop):
        data = generate_replication(scenario, index)
        value_rows = _metric_value_rows(data.ys, prediction_rows)
        for metric, values in value_rows.items():
            selection = _argmin_selection(values)
            chosen = params[selection.index]
            if chosen == true_param:
                slot = 0
            elif chosen < true_param:
                slot = 1
            else:
                slot = 2
            cell = tallies[metric]
            cell[slot] += 1
            cell[3] += selection.tied
    return SelectionTally(
        stop - start,
        {m: CellCounts(*tallies[m]) for m in SelectionMetric},
    )


def run_experiment(scenario: SimulationScenario) -> SelectionTally:
    """Run every replication of a scenario and tally the selections."""
    return run_replication_range(scenario, 0, scenario.replications)


@dataclass(frozen=True)
class TableSuiteResult:
    """Tallies for the full default experiment grid, keyed by noise level."""

    master_seed: int
    replications: int
    power: dict[float, SelectionTally]
    constant_multiplicative: dict[float, SelectionTally]
    constant_additive: dict[float, SelectionTally]

    def table_documents(self) -> dict[str, TableDocument]:
        """Render the five standard tables (percentages rounded to one decimal)."""
        metric_order = list(SelectionMetric)
        correct_columns = ("sigma",) + tuple(m.value for m in metric_order)
        bias_columns = ("sigma",) + tuple(
            f"{m.value}_{outcome}" for m in metric_order for outcome in ("under", "over")
        )

        def correct_rows(cells: dict[float, SelectionTally]):
            return tuple(
                (sigma,) + tuple(round(tally.percent(m, "correct"), 1) for m in metric_order)
                for sigma, tally in cells.items()
            )

        def bias_rows(cells: dict[float, SelectionTally]):
            rows = []
            for sigma, tally in cells.items():
                row = [sigma]
                for m in metric_order:
                    row.append(round(tally.percent(m, "under"), 1))
                    row.append(round(tally.percent(m, "over"), 1))
                rows.append(tuple(row))
            return tuple(rows)

        return {
            "Table1": TableDocument(
                "Percent of replications selecting the true power model, by noise level",
                correct_columns,
                correct_rows(self.power),
            ),
            "Table2": TableDocument(
                "Percent selecting the true constant under multiplicative noise",
                correct_columns,
                correct_rows(self.constant_multiplicative),
            ),
            "Table3": TableDocument(
                "Percent selecting under-/over-estimating constants, multiplicative noise",
                bias_columns,
                bias_rows(self.constant_multiplicative),
            ),
            "Table4": TableDocument(
                "Percent selecting the true constant under additive noise",
                correct_columns,
                correct_rows(self.constant_additive),
            ),
            "Table5": TableDocument(
                "Percent selecting under-/over-estimating constants, additive noise",
                bias_columns,
                bias_rows(self.constant_additive),
            ),
        }


def run_table_suite(
    master_seed: int,
    replications: int = 10_000,
    multiplicative_sigmas: tuple[float, ...] = MULTIPLICATIVE_SIGMAS,
    additive_sigmas: tuple[float, ...] = ADDITIVE_SIGMAS,
) -> TableSuiteResult:
    """Run the default grid of twelve experiment cells.

    Four power-model cells and four constant cells under multiplicative
    noise, plus four constant cells under additive noise; the bias tables
    are different views of the same constant-cell runs, not extra
    simulation.  Each cell gets its own child seed derived from
    master_seed, so the suite is reproducible as a whole.
    """
    if master_seed < 0:
        raise DomainError("master_seed must be non-negative")
    cells = (
        [("power", sigma) for sigma in multiplicative_sigmas]
        + [("const-mult", sigma) for sigma in multiplicative_sigmas]
        + [("const-add", sigma) for sigma in additive_sigmas]
    )
    children = np.random.SeedSequence(master_seed).spawn(len(cells))
    seeds = [int(child.generate_state(1, dtype=np.uint64)[0]) for child in children]
    results: dict[str, dict[float, SelectionTally]] = {
        "power": {},
        "const-mult": {},
        "const-add": {},
    }
    kinds = {
        "power": PowerMultiplicative(),
        "const-mult": ConstantMultiplicative(),
        "const-add": ConstantAdditive(),
    }
    for (name, sigma), seed in zip(cells, seeds):
        scenario = SimulationScenario(kinds[name], sigma, replications, seed)
        results[name][sigma] = run_experiment(scenario)
    return TableSuiteResult(
        master_seed=master_seed,
        replications=replications,
        power=results["power"],
        constant_multiplicative=results["const-mult"],
        constant_additive=results["const-add"],
    )
