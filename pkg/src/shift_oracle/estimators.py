"""Accuracy estimators for unlabeled target data.

Five methods: average thresholded confidence (ATC, with either score kind),
average confidence (AC), difference of confidences (DOC), confidence-histogram
importance reweighting (IM), and two-model disagreement (GDE). All return an
``Estimate`` whose predicted_error is clamped to [0, 1]; out-of-range raw
values are preserved in the diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .data import (
    PredictionSet,
    ScoreKind,
    ScoreVector,
    correctness,
    error_rate,
    resolved_argmax,
    score,
)
from .errors import InvalidInput, MissingLabels

METHOD_ATC_MC = "atc-mc"
METHOD_ATC_NE = "atc-ne"
METHOD_AC = "ac"
METHOD_DOC = "doc"
METHOD_IM = "im"
METHOD_GDE = "gde"

DEFAULT_IM_BINS = 10


@dataclass(frozen=True)
class AtcModel:
    """Fitted score threshold; -inf/+inf encode all-correct/all-wrong fits."""

    threshold: float
    kind: ScoreKind
    source_error: float
    n_source: int


@dataclass(frozen=True)
class BinTable:
    """Equal-width confidence histogram shared by source and target."""

    edges: np.ndarray
    source_mass: np.ndarray
    source_err_rate: np.ndarray
    target_mass: np.ndarray

    def __post_init__(self):
        if np.any(np.diff(self.edges) <= 0):
            raise InvalidInput("bin edges must be strictly increasing")
        if np.any(self.source_mass < 0) or np.any(self.target_mass < 0):
            raise InvalidInput("bin masses must be nonnegative")


@dataclass(frozen=True)
class Estimate:
    method: str
    predicted_error: float
    predicted_accuracy: float
    diagnostics: dict = field(default_factory=dict)


def _clamped_estimate(method: str, raw_error: float, diagnostics: dict | None = None) -> Estimate:
    diag = dict(diagnostics or {})
    err = min(1.0, max(0.0, raw_error))
    if err != raw_error:
        diag["raw_error"] = float(raw_error)
        diag["clamped"] = 1.0
    return Estimate(method, float(err), float(1.0 - err), diag)


def _count_below(sorted_scores: np.ndarray, t: float) -> int:
    return int(np.searchsorted(sorted_scores, t, side="left"))


def scan_threshold(scores: np.ndarray, n_incorrect: int) -> float:
    """Candidate-scan threshold rule: over all distinct score values plus
    +/-inf, minimize |count{s < t} - n_incorrect|, smallest t on ties."""
    sorted_scores = np.sort(scores)
    candidates = np.concatenate(([-np.inf], np.unique(scores), [np.inf]))
    counts = np.searchsorted(sorted_scores, candidates, side="left")
    counts[-1] = len(scores)
    gaps = np.abs(counts - n_incorrect)
    return float(candidates[int(np.argmin(gaps))])


def fit_atc(source_scores: ScoreVector, source_correct) -> AtcModel:
    """Pick the threshold whose below-count matches the source error count."""
    correct = np.asarray(source_correct, dtype=bool)
    scores = source_scores.scores
    n = len(scores)
    if len(correct) != n or n == 0:
        raise InvalidInput("scores and correctness flags must have equal nonzero length")
    n_incorrect = int((~correct).sum())
    if n_incorrect == 0:
        t = -np.inf
    elif n_incorrect == n:
        t = np.inf
    else:
        sorted_scores = np.sort(scores)
        t = float(sorted_scores[n_incorrect])
        if _count_below(sorted_scores, t) != n_incorrect:
            t = scan_threshold(scores, n_incorrect)
    return AtcModel(t, source_scores.kind, n_incorrect / n, n)


def atc_estimate(model: AtcModel, target_scores: ScoreVector) -> Estimate:
    """Predicted error = fraction of target scores strictly below the threshold."""
    if target_scores.kind is not model.kind:
        raise InvalidInput("target score kind does not match the fitted model")
    method = METHOD_ATC_MC if model.kind is ScoreKind.MAX_CONFIDENCE else METHOD_ATC_NE
    err = float(np.mean(target_scores.scores < model.threshold))
    return _clamped_estimate(method, err, {"threshold": float(model.threshold)})


def ac_estimate(target: PredictionSet) -> Estimate:
    """Predicted accuracy = mean maximum softmax confidence on the target."""
    acc = float(target.probs.max(axis=1).mean())
    return _clamped_estimate(METHOD_AC, 1.0 - acc)


def doc_estimate(source: PredictionSet, target: PredictionSet) -> Estimate:
    """Source error plus the drop in mean confidence from source to target.

    The sign is chosen so that lower target confidence predicts higher error;
    the opposite-sign variant is reported under diagnostics["alternate_sign_error"].
    """
    if source.labels is None:
        raise MissingLabels("DOC requires labeled source data")
    err_s = error_rate(source)
    conf_s = float(source.probs.max(axis=1).mean())
    conf_t = float(target.probs.max(axis=1).mean())
    raw = err_s + conf_s - conf_t
    return _clamped_estimate(
        METHOD_DOC, raw, {"alternate_sign_error": err_s + conf_t - conf_s}
    )


def build_bin_table(
    source_scores,
    source_correct,
    target_scores,
    bins: int,
    score_range: tuple[float, float],
) -> BinTable:
    """Equal-width histogram of scores with per-bin source error rates."""
    if bins < 2:
        raise InvalidInput("need at least 2 bins")
    lo, hi = score_range
    if not hi > lo:
        raise InvalidInput("empty score range")
    source_scores = np.asarray(source_scores, dtype=float)
    target_scores = np.asarray(target_scores, dtype=float)
    correct = np.asarray(source_correct, dtype=bool)
    edges = np.linspace(lo, hi, bins + 1)

    def bin_index(s):
        idx = np.floor((s - lo) / (hi - lo) * bins).astype(int)
        return np.clip(idx, 0, bins - 1)

    src_idx = bin_index(source_scores)
    tgt_idx = bin_index(target_scores)
    src_counts = np.bincount(src_idx, minlength=bins).astype(float)
    err_counts = np.bincount(src_idx, weights=(~correct).astype(float), minlength=bins)
    rates = np.where(src_counts > 0, err_counts / np.maximum(src_counts, 1), 0.0)
    return BinTable(
        edges=edges,
        source_mass=src_counts / len(source_scores),
        source_err_rate=rates,
        target_mass=np.bincount(tgt_idx, minlength=bins).astype(float) / len(target_scores),
    )


def im_estimate_from_scores(
    source_scores,
    source_correct,
    target_scores,
    bins: int = DEFAULT_IM_BINS,
    score_range: tuple[float, float] = (0.0, 1.0),
    method: str = METHOD_IM,
) -> Estimate:
    """Target error as the target-mass-weighted sum of per-bin source error rates.

    Bins with target mass but no source mass fall back to the global source
    error and raise a diagnostic flag.
    """
    table = build_bin_table(source_scores, source_correct, target_scores, bins, score_range)
    correct = np.asarray(source_correct, dtype=bool)
    global_err = float((~correct).mean())
    empty = (table.source_mass == 0) & (table.target_mass > 0)
    per_bin_err = np.where(table.source_mass > 0, table.source_err_rate, global_err)
    raw = float((table.target_mass * per_bin_err).sum())
    diag = {}
    if empty.any():
        diag["empty_source_bin_target_mass"] = float(table.target_mass[empty].sum())
    return _clamped_estimate(method, raw, diag)


def im_estimate(source: PredictionSet, target: PredictionSet, bins: int = DEFAULT_IM_BINS) -> Estimate:
    """IM on maximum-confidence scores over their achievable range [1/k, 1]."""
    if source.labels is None:
        raise MissingLabels("IM requires labeled source data")
    if source.k != target.k:
        raise InvalidInput("source and target class counts differ")
    src = score(source, ScoreKind.MAX_CONFIDENCE).scores
    tgt = score(target, ScoreKind.MAX_CONFIDENCE).scores
    return im_estimate_from_scores(
        src, correctness(source), tgt, bins=bins, score_range=(1.0 / source.k, 1.0)
    )


def gde_estimate(target_a: PredictionSet, target_b: PredictionSet) -> Estimate:
    """Predicted error = disagreement rate of the two models' resolved argmaxes."""
    if target_a.probs.shape != target_b.probs.shape:
        raise InvalidInput("the two prediction sets must have identical shape")
    disagree = resolved_argmax(target_a.probs) != resolved_argmax(target_b.probs)
    return _clamped_estimate(METHOD_GDE, float(disagree.mean()))
