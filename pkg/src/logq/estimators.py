"""Fitting constant, straight-line, and power-curve models to positive data.

Four fitting criteria are supported, differing in which residual they
square or take absolutely:

    mape  minimise mean |y - yhat| / y          (relative to the actual)
    lnq   minimise sum ln(yhat / y)^2           (log accuracy ratio)
    ols   minimise sum (y - yhat)^2
    lad   minimise sum |y - yhat|

Where a closed form exists it is used: the constant fits are a weighted
median, mean, or geometric mean; ``ols`` lines are ordinary least squares;
the ``lnq`` power fit is least squares on the log-log scale.  The ``mape``
and ``lad`` line fits are weighted least-absolute-deviation problems and
are solved to global optimality as linear programs.  The remaining fits
reduce, after profiling out the multiplier, to a one-dimensional search
that is seeded from a dense grid plus the closed-form anchors and then
polished, so multiple local minima are handled without luck-based
multi-starts.

A fit under ``lnq`` is geometric-mean unbiased by construction: the
product of its accuracy ratios is 1, i.e. the residual logs sum to zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.optimize
import scipy.sparse

from .errors import DomainError, RankDeficiencyError
from .metrics import _positive_array
from .models import Constant, Linear, ModelForm, Power, predict

__all__ = [
    "FitCriterion",
    "XYDataset",
    "Diagnostics",
    "FitResult",
    "weighted_median",
    "fit_constant",
    "fit_linear",
    "fit_power",
    "diagnostics",
]

# Hard ceiling on objective evaluations per fit; exceeding it marks the
# result as not converged instead of looping forever.
ITERATION_CAP = 20_000


class FitCriterion(str, Enum):
    """Objective minimised when fitting a model."""

    MIN_MAPE = "mape"
    LNQ_LEAST_SQUARES = "lnq"
    OLS = "ols"
    LAD = "lad"


@dataclass(eq=False)
class XYDataset:
    """Paired predictor/response data; responses must be strictly positive."""

    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self) -> None:
        self.xs = np.asarray(self.xs, dtype=float)
        self.ys = _positive_array(self.ys, "ys")
        if self.xs.ndim != 1:
            raise DomainError(f"xs must be one-dimensional, got shape {self.xs.shape}")
        if not np.all(np.isfinite(self.xs)):
            raise DomainError("xs must contain only finite values")
        if self.xs.size != self.ys.size:
            raise DomainError(f"length mismatch: {self.xs.size} xs vs {self.ys.size} ys")
        if self.ys.size < 2:
            raise DomainError("need at least two observations to fit x-dependent models")

    @property
    def n(self) -> int:
        return int(self.ys.size)


@dataclass(frozen=True)
class Diagnostics:
    """Log-ratio residual summary for a model on a dataset."""

    ln_q_residuals: np.ndarray
    q_product: float
    n_over: int
    n_under: int


@dataclass(eq=False)
class FitResult:
    """A fitted model plus the objective value and residual diagnostics.

    ``objective`` is expressed on the same scale as the corresponding
    aggregate measure (a mean for ``mape``, sums for the others).  The
    log-ratio diagnostic fields are None when the fitted model predicts a
    non-positive value at some data point, which can happen for the
    absolute-error criteria; ``n_over``/``n_under`` are always counted.
    """

    model: ModelForm
    criterion: FitCriterion
    objective: float
    ln_q_residuals: np.ndarray | None
    q_product: float | None
    n_over: int
    n_under: int
    converged: bool
    iterations: int


def weighted_median(values, weights) -> float:
    """Value minimising sum w_i |v - values_i| over v.

    Sorts by value and returns the first point where the cumulative weight
    reaches half the total, so an exact even split resolves to the lower
    value.  Weights must be positive.
    """
    v = np.asarray(values, dtype=float)
    w = np.asarray(weights, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise DomainError("weighted_median needs a non-empty 1-D array of values")
    if w.shape != v.shape:
        raise DomainError("weights must match values in shape")
    if not (np.all(np.isfinite(v)) and np.all(np.isfinite(w))):
        raise DomainError("values and weights must be finite")
    if np.any(w <= 0.0):
        raise DomainError("weights must be strictly positive")
    order = np.argsort(v, kind="stable")
    cumulative = np.cumsum(w[order])
    k = int(np.searchsorted(cumulative, 0.5 * cumulative[-1]))
    return float(v[order][k])


def _objective(criterion: FitCriterion, actuals: np.ndarray, predictions: np.ndarray) -> float:
    # Same arithmetic as the metrics module; predictions may be
    # non-positive under the absolute-error criteria.
    if criterion is FitCriterion.MIN_MAPE:
        return float(np.abs((actuals - predictions) / actuals).mean())
    if criterion is FitCriterion.LNQ_LEAST_SQUARES:
        d = np.log(predictions) - np.log(actuals)
        return float((d * d).sum())
    if criterion is FitCriterion.OLS:
        d = actuals - predictions
        return float((d * d).sum())
    return float(np.abs(actuals - predictions).sum())


def _diagnostics_from_predictions(predictions: np.ndarray, ys: np.ndarray) -> Diagnostics:
    if not np.all(np.isfinite(predictions)) or np.any(predictions <= 0.0):
        raise DomainError(
            "model predicts non-positive values at data points; "
            "log-ratio diagnostics are undefined"
        )
    ln_q = np.log(predictions) - np.log(ys)
    return Diagnostics(
        ln_q_residuals=ln_q,
        q_product=float(np.exp(ln_q.sum())),
        n_over=int(np.count_nonzero(predictions > ys)),
        n_under=int(np.count_nonzero(predictions < ys)),
    )


def diagnostics(model: ModelForm, data: XYDataset) -> Diagnostics:
    """Log-ratio residuals of a model on a dataset; requires positive predictions."""
    predictions = np.asarray(predict(model, data.xs), dtype=float)
    return _diagnostics_from_predictions(predictions, data.ys)


def _result(
    model: ModelForm,
    criterion: FitCriterion,
    ys: np.ndarray,
    predictions: np.ndarray,
    converged: bool = True,
    iterations: int = 0,
) -> FitResult:
    objective = _objective(criterion, ys, predictions)
    if np.all(predictions > 0.0):
        diag = _diagnostics_from_predictions(predictions, ys)
        return FitResult(
            model=model,
            criterion=criterion,
            objective=objective,
            ln_q_residuals=diag.ln_q_residuals,
            q_product=diag.q_product,
            n_over=diag.n_over,
            n_under=diag.n_under,
            converged=converged,
            iterations=iterations,
        )
    return FitResult(
        model=model,
        criterion=criterion,
        objective=objective,
        ln_q_residuals=None,
        q_product=None,
        n_over=int(np.count_nonzero(predictions > ys)),
        n_under=int(np.count_nonzero(predictions < ys)),
        converged=converged,
        iterations=iterations,
    )


def fit_constant(ys, criterion: FitCriterion | str) -> FitResult:
    """Best single predicted value for a batch of positive observations.

    Every criterion has a closed form: the 1/y-weighted median (``mape``),
    the geometric mean (``lnq``), the arithmetic mean (``ols``), and the
    median (``lad``).  Medians resolve even splits to the lower value.
    """
    criterion = FitCriterion(criterion)
    arr = _positive_array(ys, "ys")
    if criterion is FitCriterion.MIN_MAPE:
        c = weighted_median(arr, 1.0 / arr)
    elif criterion is FitCriterion.LAD:
        c = weighted_median(arr, np.ones_like(arr))
    elif criterion is FitCriterion.OLS:
        c = float(arr.mean())
    else:
        c = float(np.exp(np.log(arr).mean()))
    predictions = np.full(arr.size, c)
    return _result(Constant(c), criterion, arr, predictions)


def _weighted_lad_line(xs: np.ndarray, ys: np.ndarray, weights: np.ndarray):
    # Split-residual LP: minimise w.(u + v) s.t. a + b x_i + u_i - v_i = y_i,
    # u, v >= 0.  Feasible and bounded, so HiGHS returns a global optimum.
    n = xs.size
    cost = np.concatenate([np.zeros(2), weights, weights])
    coef = scipy.sparse.csc_matrix(np.column_stack([np.ones(n), xs]))
    eye = scipy.sparse.identity(n, format="csc")
    a_eq = scipy.sparse.hstack([coef, eye, -eye], format="csc")
    bounds = [(None, None)] * 2 + [(0.0, None)] * (2 * n)
    res = scipy.optimize.linprog(cost, A_eq=a_eq, b_eq=ys, bounds=bounds, method="highs")
    if not res.success:  # not reachable for well-posed data; fail loudly
        raise RuntimeError(f"LAD line solve failed: {res.message}")
    nit = int(getattr(res, "nit", 0) or 0)
    return float(res.x[0]), float(res.x[1]), nit


def _refine_bounded(fn, left: float, right: float):
    """Polish a bracketed 1-D minimum; returns (x, fn(x), hit_iteration_cap)."""
    span = right - left
    res = scipy.optimize.minimize_scalar(
        fn,
        bounds=(left, right),
        method="bounded",
        options={"xatol": max(span * 1e-12, 1e-15), "maxiter": 500},
    )
    return float(res.x), float(res.fun), not bool(getattr(res, "success", True))


def _local_minima_brackets(points: np.ndarray, values: list[float]):
    # Indices whose value is no larger than both neighbours; endpoints
    # count with a single neighbour.  Returns (left, right) bracket pairs.
    brackets = []
    last = len(points) - 1
    for i, val in enumerate(values):
        lower = values[i - 1] if i > 0 else math.inf
        upper = values[i + 1] if i < last else math.inf
        if val <= lower and val <= upper:
            brackets.append((points[max(i - 1, 0)], points[min(i + 1, last)]))
    return brackets


def _slope_ratio_intervals(xs: np.ndarray):
    # Open intervals of c on which 1 + c x keeps one sign at every data
    # point: sign +1 (all positive) always has a neighbourhood of c = 0;
    # sign -1 (all negative) exists only when no x is zero and the x all
    # share a sign.
    positive = xs[xs > 0.0]
    negative = xs[xs < 0.0]
    lo = -1.0 / positive.max() if positive.size else -math.inf
    hi = 1.0 / np.abs(negative).max() if negative.size else math.inf
    intervals = [(lo, hi, 1.0)]
    if not np.any(xs == 0.0):
        if negative.size == 0:
            intervals.append((-math.inf, -1.0 / positive.min(), -1.0))
        elif positive.size == 0:
            intervals.append((1.0 / np.abs(negative).min(), math.inf, -1.0))
    return intervals


def _interval_samples(lo: float, hi: float, anchors) -> np.ndarray:
    points: list[float] = [a for a in anchors if lo < a < hi]
    finite = [abs(v) for v in (lo, hi) if math.isfinite(v)]
    scale = max(max(finite), 1e-6) if finite else 1.0
    for a in list(points):
        # dense neighbourhood around each anchor so its basin is bracketed
        points.extend(a + max(abs(a), scale) * np.linspace(-0.6, 0.6, 25))
    if math.isfinite(lo) and math.isfinite(hi):
        span = hi - lo
        points.extend(lo + span * t for t in np.linspace(1e-3, 1.0 - 1e-3, 81))
        # extra resolution against the boundaries, where the objective
        # blows up but minima can hide
        points.extend(lo + span * 10.0 ** -k for k in range(2, 10))
        points.extend(hi - span * 10.0 ** -k for k in range(2, 10))
    elif math.isfinite(lo):
        points.extend(lo + scale * 10.0 ** (k / 2.0) for k in range(-16, 22))
    elif math.isfinite(hi):
        points.extend(hi - scale * 10.0 ** (k / 2.0) for k in range(-16, 22))
    else:
        points.extend(s * 10.0 ** (k / 2.0) for s in (-1.0, 1.0) for k in range(-16, 22))
        points.append(0.0)
    inside = [p for p in points if lo < p < hi and math.isfinite(p)]
    return np.unique(np.asarray(inside, dtype=float))


def _lnq_line(xs: np.ndarray, ys: np.ndarray):
    """Least squares on ln(yhat/y) for a straight line.

    Parametrised as yhat = k (1 + c x).  For fixed c the optimal ln|k| is
    minus the mean of ln|1 + c x_i| - ln y_i, a closed form that also
    zeroes the mean log residual, so only c is searched.  Each sign of k
    gives one feasible c-interval; both are searched when non-empty.
    """
    ln_y = np.log(ys)
    evaluations = [0]

    def profile(c: float, sign: float):
        evaluations[0] += 1
        g = sign * (1.0 + c * xs)
        d = np.log(g) - ln_y
        centered = d - d.mean()
        return float((centered * centered).sum())

    anchors = [0.0]
    design = np.column_stack([np.ones(xs.size), xs])
    (a0, b0), *_ = np.linalg.lstsq(design, ys, rcond=None)
    if a0 != 0.0 and math.isfinite(b0 / a0):
        anchors.append(b0 / a0)

    best: tuple[float, float, float] | None = None
    capped = False
    for lo, hi, sign in _slope_ratio_intervals(xs):
        samples = _interval_samples(lo, hi, anchors)
        if samples.size == 0:
            continue
        values = [profile(c, sign) for c in samples]
        for left, right in _local_minima_brackets(samples, values):
            if left == right:
                continue
            c_opt, val, hit_cap = _refine_bounded(lambda c: profile(c, sign), left, right)
            capped = capped or hit_cap
            if best is None or val < best[0]:
                best = (val, c_opt, sign)
        if best is None or values[int(np.argmin(values))] < best[0]:
            i = int(np.argmin(values))
            best = (values[i], float(samples[i]), sign)

    assert best is not None
    _, c_opt, sign = best
    d = np.log(sign * (1.0 + c_opt * xs)) - ln_y
    k = sign * math.exp(-d.mean())
    converged = not capped and evaluations[0] <= ITERATION_CAP
    return float(k), float(k * c_opt), converged, evaluations[0]


def fit_linear(data: XYDataset, criterion: FitCriterion | str) -> FitResult:
    """Fit a straight line y = a + b x under the given criterion.

    ``ols`` is the usual closed form; ``lad`` and ``mape`` are solved as
    linear programs (globally optimal); ``lnq`` runs the profiled
    one-dimensional search described in ``_lnq_line``.  Raises
    RankDeficiencyError when every x is identical.
    """
    criterion = FitCriterion(criterion)
    xs, ys = data.xs, data.ys
    if float(np.ptp(xs)) == 0.0:
        raise RankDeficiencyError("all x values identical; the slope is not identifiable")
    if criterion is FitCriterion.OLS:
        design = np.column_stack([np.ones(data.n), xs])
        (a, b), *_ = np.linalg.lstsq(design, ys, rcond=None)
        return _result(Linear(float(a), float(b)), criterion, ys, a + b * xs)
    if criterion in (FitCriterion.LAD, FitCriterion.MIN_MAPE):
        weights = np.ones_like(ys) if criterion is FitCriterion.LAD else 1.0 / ys
        a, b, nit = _weighted_lad_line(xs, ys, weights)
        return _result(Linear(a, b), criterion, ys, a + b * xs, iterations=nit)
    a, b, converged, evaluations = _lnq_line(xs, ys)
    return _result(Linear(a, b), criterion, ys, a + b * xs, converged, evaluations)


def fit_power(data: XYDataset, criterion: FitCriterion | str) -> FitResult:
    """Fit a power curve y = a x**b under the given criterion.

    Requires strictly positive x.  Under ``lnq`` the fit is ordinary least
    squares on (ln x, ln y), a closed form.  The other criteria profile
    out the multiplier at fixed exponent (closed forms again: a weighted
    median or a ratio of dot products) and search the exponent on a grid
    around the log-log solution, polishing each local minimum.
    """
    criterion = FitCriterion(criterion)
    xs, ys = data.xs, data.ys
    if np.any(xs <= 0.0):
        raise DomainError("power model fits need strictly positive x")
    ln_x = np.log(xs)
    ln_y = np.log(ys)
    if float(np.ptp(ln_x)) == 0.0:
        raise RankDeficiencyError("all x values identical; the exponent is not identifiable")
    slope, intercept = np.polyfit(ln_x, ln_y, 1)
    if criterion is FitCriterion.LNQ_LEAST_SQUARES:
        model = Power(math.exp(float(intercept)), float(slope))
        return _result(model, criterion, ys, predict(model, xs))

    # Normalised basis t_i = (x_i / x_max)^b stays in (0, 1], so large
    # exponents cannot overflow during the search.
    ln_x_ref = float(ln_x.max())
    shifted = ln_x - ln_x_ref
    evaluations = [0]

    def multiplier(b: float, t: np.ndarray) -> float:
        if criterion is FitCriterion.OLS:
            return float((ys * t).sum() / (t * t).sum())
        if criterion is FitCriterion.LAD:
            return weighted_median(ys / t, t)
        return weighted_median(ys / t, t / ys)

    def profile(b: float) -> float:
        evaluations[0] += 1
        t = np.exp(b * shifted)
        return _objective(criterion, ys, multiplier(b, t) * t)

    b0 = float(slope)
    span = max(4.0, 2.0 * abs(b0) + 2.0)
    grid = np.unique(np.concatenate([np.linspace(b0 - span, b0 + span, 221), [b0]]))
    values = [profile(b) for b in grid]
    best_b, best_val = float(grid[int(np.argmin(values))]), min(values)
    capped = False
    for left, right in _local_minima_brackets(grid, values):
        if left == right:
            continue
        b_opt, val, hit_cap = _refine_bounded(profile, left, right)
        capped = capped or hit_cap
        if val < best_val:
            best_b, best_val = b_opt, val
    t = np.exp(best_b * shifted)
    a = math.exp(math.log(multiplier(best_b, t)) - best_b * ln_x_ref)
    model = Power(a, best_b)
    converged = not capped and evaluations[0] <= ITERATION_CAP
    return _result(model, criterion, ys, predict(model, xs), converged, evaluations[0])
