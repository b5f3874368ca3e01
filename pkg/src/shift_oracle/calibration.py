"""Temperature scaling fitted by minimizing mean NLL on labeled logits.

A single scalar temperature divides the logits before softmax. The fit is a
golden-section search on ln T over [ln 0.01, ln 100]; the optimum is snapped
to a boundary (and flagged) when the objective keeps improving toward it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import PredictionSet, softmax_rows
from .errors import InvalidInput

T_MIN = 0.01
T_MAX = 100.0
LN_T_TOL = 1e-4

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class TemperatureModel:
    temperature: float
    nll_at_fit: float
    clamped: bool = False

    def __post_init__(self):
        if not (T_MIN <= self.temperature <= T_MAX):
            raise InvalidInput(f"temperature must lie in [{T_MIN}, {T_MAX}]")


def mean_nll(logits: np.ndarray, labels: np.ndarray, temperature: float) -> float:
    """Mean negative log-likelihood of the temperature-scaled softmax."""
    z = logits / temperature
    z = z - z.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(z).sum(axis=1))
    return float(np.mean(log_norm - z[np.arange(len(labels)), labels]))


def _golden_section(f, lo: float, hi: float, tol: float) -> float:
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return (a + b) / 2.0


def fit_temperature(logits, labels) -> TemperatureModel:
    """Fit T minimizing mean NLL; clamps to [0.01, 100] when monotone."""
    logits = np.asarray(logits, dtype=float)
    labels = np.asarray(labels, dtype=int)
    if logits.ndim != 2 or logits.size == 0:
        raise InvalidInput("logits must be a non-empty 2-D matrix")
    if not np.all(np.isfinite(logits)):
        raise InvalidInput("logits contains non-finite entries")
    if len(labels) != logits.shape[0]:
        raise InvalidInput("labels length must match logits rows")
    if np.any(labels < 0) or np.any(labels >= logits.shape[1]):
        raise InvalidInput("label index out of range")

    def objective(ln_t: float) -> float:
        return mean_nll(logits, labels, math.exp(ln_t))

    lo, hi = math.log(T_MIN), math.log(T_MAX)
    # Coarse grid first: brackets the minimum for the golden-section refinement
    # and, on plateaus (NLL numerically flat for extreme T), lands on the
    # smallest ln T so the boundary snap below behaves like the true argmin.
    grid = np.linspace(lo, hi, 65)
    values = [objective(g) for g in grid]
    best = int(np.argmin(values))
    bracket_lo = grid[max(best - 1, 0)]
    bracket_hi = grid[min(best + 1, len(grid) - 1)]
    ln_t = _golden_section(objective, bracket_lo, bracket_hi, LN_T_TOL)
    spacing = grid[1] - grid[0]
    temperature = math.exp(ln_t)
    clamped = False
    for bound_ln, bound_t in ((lo, T_MIN), (hi, T_MAX)):
        if abs(ln_t - bound_ln) <= 2 * spacing and objective(bound_ln) <= objective(ln_t):
            temperature, clamped = bound_t, True
    return TemperatureModel(temperature, mean_nll(logits, labels, temperature), clamped)


def apply_temperature(logits, model: TemperatureModel, name: str = "") -> PredictionSet:
    """Softmax of logits divided by the fitted temperature."""
    return softmax_rows(logits, model.temperature, name=name)
