"""Relative prediction-accuracy measures built on the accuracy ratio.

The accuracy ratio Q = predicted/actual compares a prediction with the
observed outcome on a multiplicative scale.  Its logarithm ln(Q) treats
over- and under-prediction symmetrically (swapping the two arguments only
flips the sign) and is additive across compounding ratios, which makes it
a better basis for aggregate accuracy measures than percentage errors.

Aggregates come in two groups: the percentage-error family (MAPE, SMAPE,
MER) on the raw scale, and the log-ratio family (sum of squared ln Q, the
log standard deviation LSD) on the multiplicative scale.  All results are
dimensionless fractions; multiply by 100 at display time if percentages
are wanted.  Every observation must be strictly positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "PairedObservations",
    "MetricReport",
    "accuracy_ratio",
    "log_accuracy_ratio",
    "mape",
    "mer",
    "smape",
    "sum_sq_ln_q",
    "lsd",
    "relative_change_measures",
    "evaluate_all",
]


def _positive_array(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise DomainError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise DomainError(f"{name} must contain at least one value")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must contain only finite values")
    if np.any(arr <= 0.0):
        raise DomainError(f"{name} must be strictly positive")
    return arr


def _positive_scalar(value: float, name: str) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise DomainError(f"{name} must be a finite positive number, got {value}")
    return value


@dataclass(eq=False)
class PairedObservations:
    """Parallel actual/predicted series of equal length, strictly positive."""

    actuals: np.ndarray
    predictions: np.ndarray

    def __post_init__(self) -> None:
        self.actuals = _positive_array(self.actuals, "actuals")
        self.predictions = _positive_array(self.predictions, "predictions")
        if self.actuals.size != self.predictions.size:
            raise DomainError(
                f"length mismatch: {self.actuals.size} actuals vs "
                f"{self.predictions.size} predictions"
            )

    @property
    def n(self) -> int:
        return int(self.actuals.size)


@dataclass(frozen=True)
class MetricReport:
    """Every aggregate measure evaluated on one batch of paired observations.

    ``lsd`` is None when the batch has a single observation (it needs a
    sample variance).  All other fields are always populated.
    """

    mape: float
    smape: float
    mer: float
    sum_sq_ln_q: float
    mean_ln_q: float
    lsd: float | None
    q_product: float


# Array kernels.  Each accepts stacked prediction rows against a shared
# actuals vector (broadcasting over the leading axes), so the simulator can
# score many candidate models in one call with identical arithmetic.

def _ln_q_values(actuals: np.ndarray, predictions: np.ndarray) -> np.ndarray:
    # log(p) - log(a) rather than log(p / a): the subtraction form makes
    # the swap antisymmetry exact in floating point.
    return np.log(predictions) - np.log(actuals)


def _mape_values(actuals: np.ndarray, predictions: np.ndarray) -> np.ndarray:
    return np.abs((actuals - predictions) / actuals).mean(axis=-1)


def _mer_values(actuals: np.ndarray, predictions: np.ndarray) -> np.ndarray:
    return np.abs((actuals - predictions) / predictions).mean(axis=-1)


def _smape_values(actuals: np.ndarray, predictions: np.ndarray) -> np.ndarray:
    return (np.abs(actuals - predictions) / (0.5 * (actuals + predictions))).mean(axis=-1)


def _sum_sq_values(ln_q: np.ndarray) -> np.ndarray:
    return (ln_q * ln_q).sum(axis=-1)


def _lsd_values(ln_q: np.ndarray) -> np.ndarray:
    # sqrt(sum((s^2/2 - r_i)^2) / (n - 1)) where s^2 is the sample variance
    # of the r_i = ln Q_i.  The s^2/2 shift centres the statistic on the
    # median-scale correction of a log-normal ratio, so a model that is
    # merely noisy but multiplicatively unbiased is not over-penalised.
    n = ln_q.shape[-1]
    s2 = ln_q.var(axis=-1, ddof=1)
    centered = 0.5 * np.expand_dims(s2, axis=-1) - ln_q
    return np.sqrt((centered * centered).sum(axis=-1) / (n - 1))


def accuracy_ratio(prediction: float, actual: float) -> float:
    """Ratio predicted/actual; exactly 1.0 marks a perfect prediction."""
    prediction = _positive_scalar(prediction, "prediction")
    actual = _positive_scalar(actual, "actual")
    return prediction / actual


def log_accuracy_ratio(prediction: float, actual: float) -> float:
    """ln(predicted/actual), computed as ln(predicted) - ln(actual).

    Positive for over-prediction, negative for under-prediction, and the
    sign flip under argument swap is exact (not merely approximate).
    """
    prediction = _positive_scalar(prediction, "prediction")
    actual = _positive_scalar(actual, "actual")
    return math.log(prediction) - math.log(actual)


def mape(observations: PairedObservations) -> float:
    """Mean of |actual - predicted| / actual."""
    return float(_mape_values(observations.actuals, observations.predictions))


def mer(observations: PairedObservations) -> float:
    """Mean of |actual - predicted| / predicted (error relative to the prediction)."""
    return float(_mer_values(observations.actuals, observations.predictions))


def smape(observations: PairedObservations) -> float:
    """Mean of |actual - predicted| over the average of the two values.

    Symmetric under exchanging actuals with predictions, and bounded
    above by 2 for positive data.
    """
    return float(_smape_values(observations.actuals, observations.predictions))


def sum_sq_ln_q(observations: PairedObservations) -> float:
    """Sum of squared log accuracy ratios, the least-squares criterion on the log scale."""
    ln_q = _ln_q_values(observations.actuals, observations.predictions)
    return float(_sum_sq_values(ln_q))


def lsd(observations: PairedObservations) -> float:
    """Log standard deviation accuracy measure; needs at least two observations."""
    if observations.n < 2:
        raise DomainError("lsd needs at least two observations")
    ln_q = _ln_q_values(observations.actuals, observations.predictions)
    return float(_lsd_values(ln_q))


def relative_change_measures(f: float, g: float) -> dict[str, float]:
    """Seven classical indicators of the relative change from f to g.

    All seven agree to first order for small changes and zero out at
    g == f; they differ in how they normalise.  Keys are stable:

    - ``rel_error``:         (f - g) / f
    - ``mer_form``:          (f - g) / g
    - ``smape_form``:        (f - g) / ((f + g) / 2)
    - ``log_change``:        ln(g / f)
    - ``geometric_form``:    (f - g) / sqrt(f g)
    - ``balanced``:          (f - g) / min(f, g)
    - ``inverted_balanced``: (f - g) / max(f, g)
    """
    f = _positive_scalar(f, "f")
    g = _positive_scalar(g, "g")
    diff = f - g
    return {
        "rel_error": diff / f,
        "mer_form": diff / g,
        "smape_form": diff / (0.5 * (f + g)),
        "log_change": math.log(g) - math.log(f),
        "geometric_form": diff / math.sqrt(f * g),
        "balanced": diff / min(f, g),
        "inverted_balanced": diff / max(f, g),
    }


def evaluate_all(observations: PairedObservations) -> MetricReport:
    """Evaluate every aggregate measure in one pass.

    The product of accuracy ratios ``q_product`` equals exp(sum ln Q); a
    value of 1 means the prediction set is unbiased in the geometric-mean
    sense.
    """
    actuals = observations.actuals
    predictions = observations.predictions
    ln_q = _ln_q_values(actuals, predictions)
    return MetricReport(
        mape=float(_mape_values(actuals, predictions)),
        smape=float(_smape_values(actuals, predictions)),
        mer=float(_mer_values(actuals, predictions)),
        sum_sq_ln_q=float(_sum_sq_values(ln_q)),
        mean_ln_q=float(ln_q.mean()),
        lsd=float(_lsd_values(ln_q)) if observations.n >= 2 else None,
        q_product=float(np.exp(ln_q.sum())),
    )
