"""Published benchmark rates for the default Monte Carlo experiment grid.

The integer percentages below are the published reference results for the
default scenarios of ``run_table_suite``: the same generating models,
candidate menus, noise grids, and 10,000 replications per cell.  A
reproduction is expected to land within ``TOLERANCE_PERCENT_POINTS`` of
every cell (the binomial standard error at 10,000 replications is about
half a point).  Comparisons are made on unrounded percentages.

Comparing a run with fewer than ``MIN_REPLICATIONS_FOR_COMPARISON``
replications against these values is statistically meaningless, so
callers gate on that before reporting pass/fail.
"""

from __future__ import annotations

from dataclasses import dataclass

from .simulator import SelectionMetric, TableSuiteResult

__all__ = [
    "TOLERANCE_PERCENT_POINTS",
    "MIN_REPLICATIONS_FOR_COMPARISON",
    "POWER_CORRECT",
    "CONSTANT_MULTIPLICATIVE_CORRECT",
    "CONSTANT_MULTIPLICATIVE_BIAS",
    "CONSTANT_ADDITIVE_CORRECT",
    "CONSTANT_ADDITIVE_BIAS",
    "ReferenceComparison",
    "compare_with_reference",
]

TOLERANCE_PERCENT_POINTS = 5.0
MIN_REPLICATIONS_FOR_COMPARISON = 10_000

_M = SelectionMetric

# Percent of replications selecting the true model, by noise level.
POWER_CORRECT = {
    0.1: {_M.MAPE: 86.0, _M.SUM_SQ_LNQ: 88.0, _M.LSD: 82.0, _M.SMAPE: 82.0},
    0.2: {_M.MAPE: 43.0, _M.SUM_SQ_LNQ: 59.0, _M.LSD: 48.0, _M.SMAPE: 52.0},
    0.3: {_M.MAPE: 19.0, _M.SUM_SQ_LNQ: 43.0, _M.LSD: 28.0, _M.SMAPE: 35.0},
    0.4: {_M.MAPE: 7.0, _M.SUM_SQ_LNQ: 34.0, _M.LSD: 16.0, _M.SMAPE: 27.0},
}

CONSTANT_MULTIPLICATIVE_CORRECT = {
    0.1: {_M.MAPE: 97.0, _M.SUM_SQ_LNQ: 100.0, _M.LSD: 98.0, _M.SMAPE: 98.0},
    0.2: {_M.MAPE: 57.0, _M.SUM_SQ_LNQ: 81.0, _M.LSD: 72.0, _M.SMAPE: 75.0},
    0.3: {_M.MAPE: 27.0, _M.SUM_SQ_LNQ: 62.0, _M.LSD: 45.0, _M.SMAPE: 54.0},
    0.4: {_M.MAPE: 11.0, _M.SUM_SQ_LNQ: 52.0, _M.LSD: 29.0, _M.SMAPE: 39.0},
}

# (percent selecting an under-estimating candidate, percent over-estimating).
CONSTANT_MULTIPLICATIVE_BIAS = {
    0.1: {_M.MAPE: (3.0, 0.0), _M.SUM_SQ_LNQ: (0.0, 0.0), _M.LSD: (0.0, 2.0), _M.SMAPE: (2.0, 0.0)},
    0.2: {_M.MAPE: (41.0, 2.0), _M.SUM_SQ_LNQ: (9.0, 10.0), _M.LSD: (3.0, 25.0), _M.SMAPE: (11.0, 14.0)},
    0.3: {_M.MAPE: (69.0, 4.0), _M.SUM_SQ_LNQ: (18.0, 20.0), _M.LSD: (4.0, 51.0), _M.SMAPE: (21.0, 25.0)},
    0.4: {_M.MAPE: (88.0, 1.0), _M.SUM_SQ_LNQ: (23.0, 25.0), _M.LSD: (4.0, 67.0), _M.SMAPE: (31.0, 30.0)},
}

CONSTANT_ADDITIVE_CORRECT = {
    1.0: {_M.MAPE: 97.0, _M.SUM_SQ_LNQ: 100.0, _M.LSD: 100.0, _M.SMAPE: 98.0},
    1.5: {_M.MAPE: 78.0, _M.SUM_SQ_LNQ: 90.0, _M.LSD: 92.0, _M.SMAPE: 87.0},
    2.0: {_M.MAPE: 54.0, _M.SUM_SQ_LNQ: 76.0, _M.LSD: 82.0, _M.SMAPE: 74.0},
    2.5: {_M.MAPE: 34.0, _M.SUM_SQ_LNQ: 60.0, _M.LSD: 72.0, _M.SMAPE: 64.0},
}

# The published sigma=2.5 MAPE pair is internally inconsistent: with the
# correct rate of 34 the row sums to 89, not 100, and reproductions give
# an under rate near 64.  The value is kept verbatim; comparison callers
# report it honestly rather than patching it.
CONSTANT_ADDITIVE_BIAS = {
    1.0: {_M.MAPE: (3.0, 0.0), _M.SUM_SQ_LNQ: (0.0, 0.0), _M.LSD: (0.0, 0.0), _M.SMAPE: (0.0, 2.0)},
    1.5: {_M.MAPE: (20.0, 2.0), _M.SUM_SQ_LNQ: (8.0, 2.0), _M.LSD: (3.0, 5.0), _M.SMAPE: (6.0, 7.0)},
    2.0: {_M.MAPE: (42.0, 0.0), _M.SUM_SQ_LNQ: (20.0, 4.0), _M.LSD: (7.0, 11.0), _M.SMAPE: (12.0, 14.0)},
    2.5: {_M.MAPE: (54.0, 1.0), _M.SUM_SQ_LNQ: (34.0, 15.0), _M.LSD: (11.0, 17.0), _M.SMAPE: (16.0, 20.0)},
}


@dataclass(frozen=True)
class ReferenceComparison:
    """One observed-versus-published cell comparison, in percent points."""

    table: str
    sigma: float
    metric: str
    outcome: str
    observed: float
    reference: float

    @property
    def deviation(self) -> float:
        return abs(self.observed - self.reference)

    @property
    def within_tolerance(self) -> bool:
        return self.deviation <= TOLERANCE_PERCENT_POINTS


def _correct_lines(table, cells, reference):
    for sigma, expected in reference.items():
        tally = cells.get(sigma)
        if tally is None:
            continue
        for metric, ref_value in expected.items():
            yield ReferenceComparison(
                table, sigma, metric.value, "correct", tally.percent(metric, "correct"), ref_value
            )


def _bias_lines(table, cells, reference):
    for sigma, expected in reference.items():
        tally = cells.get(sigma)
        if tally is None:
            continue
        for metric, (ref_under, ref_over) in expected.items():
            yield ReferenceComparison(
                table, sigma, metric.value, "under", tally.percent(metric, "under"), ref_under
            )
            yield ReferenceComparison(
                table, sigma, metric.value, "over", tally.percent(metric, "over"), ref_over
            )


def compare_with_reference(suite: TableSuiteResult) -> list[ReferenceComparison]:
    """Compare a suite's unrounded percentages against every published cell.

    Only noise levels present in both the suite and the reference grid are
    compared, so a suite run on a reduced grid yields a shorter list.
    """
    lines: list[ReferenceComparison] = []
    lines.extend(_correct_lines("Table1", suite.power, POWER_CORRECT))
    lines.extend(
        _correct_lines("Table2", suite.constant_multiplicative, CONSTANT_MULTIPLICATIVE_CORRECT)
    )
    lines.extend(
        _bias_lines("Table3", suite.constant_multiplicative, CONSTANT_MULTIPLICATIVE_BIAS)
    )
    lines.extend(_correct_lines("Table4", suite.constant_additive, CONSTANT_ADDITIVE_CORRECT))
    lines.extend(_bias_lines("Table5", suite.constant_additive, CONSTANT_ADDITIVE_BIAS))
    return lines
