"""Aggregate metrics and robust linear fitting across many target sets."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInput, InvalidInput, MissingLabels

SIEGEL_REPEATED_MEDIANS = "siegel-repeated-medians"


@dataclass(frozen=True)
class ReportEntry:
    target_name: str
    method: str
    predicted_accuracy: float
    true_accuracy: float | None = None


@dataclass
class EstimateReport:
    """Flat table of per-(target, method) accuracy estimates plus run metadata."""

    entries: list[ReportEntry] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        keys = [(e.target_name, e.method) for e in self.entries]
        if len(set(keys)) != len(keys):
            raise InvalidInput("duplicate (target, method) entry in report")

    def add(self, entry: ReportEntry) -> None:
        if any(e.target_name == entry.target_name and e.method == entry.method for e in self.entries):
            raise InvalidInput(f"duplicate entry for ({entry.target_name}, {entry.method})")
        self.entries.append(entry)

    def methods(self) -> list[str]:
        seen = dict.fromkeys(e.method for e in self.entries)
        return list(seen)


def mae(report: EstimateReport, method: str, display_points: bool = False) -> float:
    """Mean absolute gap between predicted and true accuracy for one method.

    With display_points=True the value is scaled by 100 (accuracy points).
    """
    selected = [e for e in report.entries if e.method == method]
    if not selected:
        raise InvalidInput(f"no entries for method {method!r}")
    if any(e.true_accuracy is None for e in selected):
        raise MissingLabels("every entry needs a true accuracy to compute MAE")
    value = float(np.mean([abs(e.predicted_accuracy - e.true_accuracy) for e in selected]))
    return 100.0 * value if display_points else value


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    method: str = SIEGEL_REPEATED_MEDIANS

    def __post_init__(self):
        if not (np.isfinite(self.slope) and np.isfinite(self.intercept)):
            raise InvalidInput("fit parameters must be finite")


def siegel_fit(xs, ys) -> LinearFit:
    """Repeated-medians line fit: slope = median_i median_{j != i} pairwise
    slope, skipping equal-x pairs; intercept = median_i (y_i - slope*x_i)."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1 or len(xs) < 2:
        raise InvalidInput("need two equal-length 1-D vectors with at least 2 points")
    if np.all(xs == xs[0]):
        raise DegenerateInput("all x values equal; slope undefined")
    inner = []
    for i in range(len(xs)):
        dx = xs - xs[i]
        valid = dx != 0
        inner.append(np.median((ys[valid] - ys[i]) / dx[valid]))
    slope = float(np.median(inner))
    intercept = float(np.median(ys - slope * xs))
    return LinearFit(slope, intercept)


def apply_fit(fit: LinearFit, predicted: float) -> float:
    """Map a raw estimate through the fitted line, clamped to [0, 1]."""
    return min(1.0, max(0.0, fit.slope * predicted + fit.intercept))
