"""Prediction containers, softmax, and confidence score functions.

A PredictionSet is the universal input to every estimator: an (n, k) matrix of
class probabilities, optionally paired with integer labels. Scores map each
probability row to a scalar where higher means "more likely correct".
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, MissingLabels

ROW_SUM_TOL = 1e-6


class ScoreKind(enum.Enum):
    MAX_CONFIDENCE = "max-confidence"
    NEGATIVE_ENTROPY = "negative-entropy"


@dataclass(frozen=True)
class PredictionSet:
    """Class-probability matrix with optional ground-truth labels.

    Rows are renormalized if they miss sum 1 by at most ``ROW_SUM_TOL`` and
    rejected otherwise. Immutable after construction.
    """

    probs: np.ndarray
    labels: np.ndarray | None = None
    name: str = ""

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.ndim != 2 or probs.size == 0:
            raise InvalidInput("probs must be a non-empty 2-D matrix")
        if not np.all(np.isfinite(probs)):
            raise InvalidInput("probs contains non-finite entries")
        if np.any(probs < -ROW_SUM_TOL) or np.any(probs > 1 + ROW_SUM_TOL):
            raise InvalidInput("probability entries must lie in [0, 1]")
        sums = probs.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > ROW_SUM_TOL):
            raise InvalidInput("every probability row must sum to 1 within 1e-6")
        probs = np.clip(probs, 0.0, 1.0)
        probs = probs / probs.sum(axis=1, keepdims=True)
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=int)
            if labels.ndim != 1 or len(labels) != self.n:
                raise InvalidInput("labels must be a length-n vector")
            if np.any(labels < 0) or np.any(labels >= self.k):
                raise InvalidInput("label indices must lie in {0..k-1}")
            labels.setflags(write=False)
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.probs.shape[0]

    @property
    def k(self) -> int:
        return self.probs.shape[1]


@dataclass(frozen=True)
class ScoreVector:
    """Per-example confidence scores with the kind that produced them."""

    scores: np.ndarray
    kind: ScoreKind

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=float)
        scores.setflags(write=False)
        object.__setattr__(self, "scores", scores)

    def __len__(self) -> int:
        return len(self.scores)


def softmax_rows(logits, temperature: float = 1.0, name: str = "") -> PredictionSet:
    """Row-wise temperature softmax, computed with max-subtraction."""
    logits = np.asarray(logits, dtype=float)
    if logits.ndim != 2 or logits.size == 0:
        raise InvalidInput("logits must be a non-empty 2-D matrix")
    if not np.all(np.isfinite(logits)):
        raise InvalidInput("logits contains non-finite entries")
    if not (np.isfinite(temperature) and temperature > 0):
        raise InvalidInput("temperature must be a positive real")
    z = logits / temperature
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return PredictionSet(e / e.sum(axis=1, keepdims=True), name=name)


def resolved_argmax(probs: np.ndarray) -> np.ndarray:
    """Row argmax with ties resolved to the lowest class index."""
    return np.argmax(probs, axis=1)


def score(preds: PredictionSet, kind: ScoreKind) -> ScoreVector:
    """Confidence score of each row: max probability or negative entropy."""
    if kind is ScoreKind.MAX_CONFIDENCE:
        s = preds.probs.max(axis=1)
    else:
        p = preds.probs
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(p > 0, p * np.log(np.where(p > 0, p, 1.0)), 0.0)
        s = terms.sum(axis=1)
    return ScoreVector(s, kind)


def correctness(preds: PredictionSet) -> np.ndarray:
    """Boolean vector: resolved argmax equals the label."""
    if preds.labels is None:
        raise MissingLabels("correctness requires labels")
    return resolved_argmax(preds.probs) == preds.labels


def error_rate(preds: PredictionSet) -> float:
    """Fraction of rows whose resolved argmax differs from the label."""
    return float(1.0 - correctness(preds).mean())
