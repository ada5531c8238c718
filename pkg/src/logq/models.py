"""Prediction model families: constant level, straight line, power curve."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError

__all__ = ["Constant", "Linear", "Power", "ModelForm", "predict"]


@dataclass(frozen=True)
class Constant:
    """Flat prediction y = c regardless of x."""

    c: float


@dataclass(frozen=True)
class Linear:
    """Straight line y = a + b x."""

    a: float
    b: float


@dataclass(frozen=True)
class Power:
    """Power curve y = a * x**b, defined for x > 0; the multiplier a must be positive."""

    a: float
    b: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a) and self.a > 0.0):
            raise DomainError(f"power multiplier must be positive, got {self.a}")


ModelForm = Union[Constant, Linear, Power]


def predict(model: ModelForm, x) -> float | np.ndarray:
    """Evaluate a model at a scalar or array of x values.

    Returns a float for scalar input, an ndarray otherwise.  Power models
    reject non-positive x.
    """
    xs = np.asarray(x, dtype=float)
    scalar = xs.ndim == 0
    if isinstance(model, Constant):
        out = np.full(xs.shape, float(model.c))
    elif isinstance(model, Linear):
        out = model.a + model.b * xs
    elif isinstance(model, Power):
        if np.any(xs <= 0.0):
            raise DomainError("power model predictions need x > 0")
        out = model.a * xs ** model.b
    else:
        raise TypeError(f"unknown model form: {model!r}")
    return float(out) if scalar else out
