"""Error estimation under covariate- and label-shift assumptions.

Includes the EM fixed point that maximizes the label-shift likelihood
objective over class-prior reweightings, and a Monte-Carlo witness showing
that the covariate-shift and label-shift reweightings of the same source
distribution disagree (so no single assumption-free estimator exists).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import PredictionSet, correctness
from .errors import InvalidInput, Unconverged

MLLS_TOL = 1e-8
MLLS_MAX_ITER = 10_000


@dataclass(frozen=True)
class ImportanceWeights:
    """Per-class weights w_y approximating the target/source prior ratio."""

    per_class: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.per_class, dtype=float)
        if w.ndim != 1 or np.any(w < 0) or not np.all(np.isfinite(w)):
            raise InvalidInput("weights must be a finite nonnegative vector")
        w.setflags(write=False)
        object.__setattr__(self, "per_class", w)


@dataclass(frozen=True)
class GaussianMixtureSpec:
    """Two unit-variance Gaussian class conditionals with mixing weights
    alpha (source) and beta (target) on the class-0 component."""

    mu1: float
    mu2: float
    alpha: float
    beta: float

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0) or not (0.0 < self.beta < 1.0):
            raise InvalidInput("alpha and beta must lie strictly inside (0, 1)")


@dataclass(frozen=True)
class Example1Result:
    e1: float
    e2: float
    se_e1: float
    se_e2: float
    se_diff: float


def _weighted_error(weights: np.ndarray, err: np.ndarray) -> float:
    raw = float(np.mean(weights * err))
    return min(1.0, max(0.0, raw))


def covariate_shift_error(source: PredictionSet, ratios) -> float:
    """Mean of density-ratio-weighted 0-1 errors on labeled source data."""
    ratios = np.asarray(ratios, dtype=float)
    if len(ratios) != source.n:
        raise InvalidInput("need one density ratio per source example")
    if np.any(ratios < 0) or not np.all(np.isfinite(ratios)):
        raise InvalidInput("density ratios must be finite and nonnegative")
    err = (~correctness(source)).astype(float)
    return _weighted_error(ratios, err)


def label_shift_error(source: PredictionSet, weights: ImportanceWeights) -> float:
    """Mean of class-weighted 0-1 errors on labeled source data."""
    err = (~correctness(source)).astype(float)
    labels = source.labels
    if labels is None:
        raise InvalidInput("label-shift reweighting requires labeled source data")
    if labels.max() >= len(weights.per_class):
        raise InvalidInput("class index out of range for the supplied weights")
    return _weighted_error(weights.per_class[labels], err)


def mlls_fixed_point(
    source_label_marginal,
    target: PredictionSet,
    tol: float = MLLS_TOL,
    max_iter: int = MLLS_MAX_ITER,
):
    """EM iteration on the implied target prior q (q_y proportional to w_y p_s(y)).

    Returns (q, objective_history); the objective is the mean log-likelihood
    of the target points under the reweighted source posteriors, and is
    non-decreasing across iterations.
    """
    p_s = np.asarray(source_label_marginal, dtype=float)
    if p_s.ndim != 1 or len(p_s) != target.k:
        raise InvalidInput("source label marginal must have one entry per class")
    if np.any(p_s <= 0):
        raise InvalidInput("source label marginal must be strictly positive")
    if abs(p_s.sum() - 1.0) > 1e-6:
        raise InvalidInput("source label marginal must sum to 1")

    ratio = target.probs / p_s  # p_s(y|x) / p_s(y), up to the evolving prior
    q = p_s.copy()
    history = []
    for _ in range(max_iter):
        u = ratio * q
        totals = u.sum(axis=1)
        history.append(float(np.mean(np.log(totals))))
        q_next = (u / totals[:, None]).mean(axis=0)
        if np.max(np.abs(q_next - q)) < tol:
            q = q_next
            break
        q = q_next
    else:
        raise Unconverged("EM prior iteration did not converge", last_iterate=q)
    history.append(float(np.mean(np.log((ratio * q).sum(axis=1)))))
    return q, np.asarray(history)


def estimate_label_shift_weights(
    source_label_marginal,
    target: PredictionSet,
    tol: float = MLLS_TOL,
    max_iter: int = MLLS_MAX_ITER,
) -> ImportanceWeights:
    """Per-class weights w_y = q_y / p_s(y) from the EM fixed point.

    By construction q is a simplex point, so sum_y w_y p_s(y) = 1.
    """
    p_s = np.asarray(source_label_marginal, dtype=float)
    q, _ = mlls_fixed_point(source_label_marginal, target, tol=tol, max_iter=max_iter)
    return ImportanceWeights(q / p_s)


def _normal_pdf(x: np.ndarray, mu: float) -> np.ndarray:
    return np.exp(-0.5 * (x - mu) ** 2) / math.sqrt(2.0 * math.pi)


def example1_errors(
    spec: GaussianMixtureSpec,
    classifier_threshold: float,
    samples: int,
    seed: int,
) -> Example1Result:
    """Monte-Carlo estimates of the covariate-shift (E1) and label-shift (E2)
    reweighted errors of the threshold classifier 1{x > tau}.

    Both expectations are taken over the same source draw, so their standard
    errors (and the paired standard error of the difference) are comparable.
    """
    if samples < 1000:
        raise InvalidInput("need at least 1000 Monte-Carlo samples")
    rng = np.random.default_rng(seed)
    y = (rng.random(samples) >= spec.alpha).astype(int)  # class 0 w.p. alpha
    mu = np.where(y == 0, spec.mu1, spec.mu2)
    x = rng.normal(mu, 1.0)
    pred = (x > classifier_threshold).astype(int)
    err = (pred != y).astype(float)

    p_s = spec.alpha * _normal_pdf(x, spec.mu1) + (1 - spec.alpha) * _normal_pdf(x, spec.mu2)
    p_t = spec.beta * _normal_pdf(x, spec.mu1) + (1 - spec.beta) * _normal_pdf(x, spec.mu2)
    w_cov = p_t / p_s
    w_lab = np.where(y == 0, spec.beta / spec.alpha, (1 - spec.beta) / (1 - spec.alpha))

    a = w_cov * err
    b = w_lab * err
    scale = math.sqrt(samples)
    return Example1Result(
        e1=float(a.mean()),
        e2=float(b.mean()),
        se_e1=float(a.std(ddof=1) / scale),
        se_e2=float(b.std(ddof=1) / scale),
        se_diff=float((a - b).std(ddof=1) / scale),
    )
