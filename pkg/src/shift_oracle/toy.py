"""Spurious-feature simulation: a 2-feature binary task where one feature is
fully predictive with margin gamma and the other is a +/-1 feature that merely
correlates with the label.

The invariant feature is uniform on [gamma, b] (sign matching the label); the
spurious feature agrees with the label with probability p (source) or p'
(target). Linear-sigmoid classifiers on these two features admit a closed-form
accuracy, which serves as the analytic oracle for every estimator experiment.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .data import PredictionSet, ScoreKind, correctness, score
from .errors import EmptyGroup, InvalidInput, OutOfTheoremScope
from .estimators import (
    DEFAULT_IM_BINS,
    ac_estimate,
    atc_estimate,
    doc_estimate,
    fit_atc,
    gde_estimate,
    im_estimate,
)

GDE_NOISE_SCALE = 0.05


class Role(enum.Enum):
    SOURCE = "source"
    TARGET = "target"


@dataclass(frozen=True)
class ToyConfig:
    gamma: float
    c: float
    p_spr: float
    p_spr_target: float
    n: int
    seed: int
    c_target: float | None = None

    def __post_init__(self):
        if not (0 < self.gamma < self.c):
            raise InvalidInput("need 0 < gamma < c")
        if not (0.5 < self.p_spr < 1.0):
            raise InvalidInput("source agreement probability must lie in (0.5, 1)")
        if not (0.0 <= self.p_spr_target <= 1.0):
            raise InvalidInput("target agreement probability must lie in [0, 1]")
        if self.n < 1:
            raise InvalidInput("sample count must be positive")
        if self.c_target is not None and not (self.gamma < self.c_target <= self.c):
            raise InvalidInput("target support bound must lie in (gamma, c]")

    def support_bound(self, role: Role) -> float:
        if role is Role.TARGET and self.c_target is not None:
            return self.c_target
        return self.c

    def agreement_prob(self, role: Role) -> float:
        return self.p_spr if role is Role.SOURCE else self.p_spr_target


@dataclass(frozen=True)
class LinearSigmoidClassifier:
    """f(x) = [1/(1+e^z), e^z/(1+e^z)] with z = w_inv*x_inv + w_spr*x_spr."""

    w_inv: float
    w_spr: float


@dataclass(frozen=True)
class ToySample:
    x_inv: np.ndarray
    x_spr: np.ndarray
    y: np.ndarray

    @property
    def n(self) -> int:
        return len(self.y)


def stream_rng(seed: int, *stream: int) -> np.random.Generator:
    """Independent, reproducible RNG stream keyed by (seed, stream ids)."""
    return np.random.default_rng([seed, *stream])


def sample_toy(config: ToyConfig, role: Role, rng: np.random.Generator | None = None) -> ToySample:
    """Draw n labeled points for the given role; deterministic given the seed.

    Source and target use distinct derived streams so experiments that draw
    both never share randomness.
    """
    if rng is None:
        rng = stream_rng(config.seed, 0 if role is Role.SOURCE else 1)
    n = config.n
    b = config.support_bound(role)
    p = config.agreement_prob(role)
    y = rng.integers(0, 2, n)
    sign = 2 * y - 1
    x_inv = rng.uniform(config.gamma, b, n) * sign
    agree = rng.random(n) < p
    x_spr = np.where(agree, sign, -sign)
    return ToySample(x_inv, x_spr.astype(float), y)


def toy_predict(clf: LinearSigmoidClassifier, sample: ToySample, name: str = "") -> PredictionSet:
    z = clf.w_inv * sample.x_inv + clf.w_spr * sample.x_spr
    p1 = 1.0 / (1.0 + np.exp(-z))
    return PredictionSet(np.column_stack([1.0 - p1, p1]), labels=sample.y, name=name)


def toy_true_accuracy(clf: LinearSigmoidClassifier, config: ToyConfig, role: Role) -> float:
    """Closed-form accuracy under the uniform invariant-feature distribution.

    Within the group whose spurious feature opposes the decision direction,
    the misclassified fraction is the part of [gamma, b] below |w_spr|/w_inv.
    """
    if clf.w_inv <= 0:
        raise OutOfTheoremScope("closed-form accuracy requires w_inv > 0")
    if clf.w_spr == 0:
        return 1.0
    b = config.support_bound(role)
    p = config.agreement_prob(role)
    q = (abs(clf.w_spr) / clf.w_inv - config.gamma) / (b - config.gamma)
    q = min(1.0, max(0.0, q))
    if clf.w_spr > 0:
        return p + (1.0 - p) * (1.0 - q)
    return (1.0 - p) + p * (1.0 - q)


def minority_margin(sample: ToySample) -> float:
    """Smallest |x_inv| among points whose spurious feature opposes the label."""
    minority = sample.x_spr * (2 * sample.y - 1) < 0
    if not minority.any():
        raise EmptyGroup("no minority-group examples in the sample")
    return float(np.abs(sample.x_inv[minority]).min())


@dataclass(frozen=True)
class ConsistencyRow:
    p_target: float
    true_acc: float
    atc_mc: float
    atc_ne: float
    ac: float
    doc: float
    im: float
    gde: float


def run_consistency_experiment(
    clf: LinearSigmoidClassifier,
    config: ToyConfig,
    p_grid,
    im_bins: int = DEFAULT_IM_BINS,
) -> list[ConsistencyRow]:
    """Fit thresholds on a fresh source sample, then sweep the target agreement
    probability and record every estimator next to the analytic truth.

    The disagreement baseline uses the same classifier with both weights
    perturbed once by U[-0.05, 0.05] noise.
    """
    if clf.w_inv <= 0:
        raise OutOfTheoremScope("experiment requires w_inv > 0")
    source = sample_toy(config, Role.SOURCE, rng=stream_rng(config.seed, 0))
    source_preds = toy_predict(clf, source, name="source")
    src_correct = correctness(source_preds)
    model_mc = fit_atc(score(source_preds, ScoreKind.MAX_CONFIDENCE), src_correct)
    model_ne = fit_atc(score(source_preds, ScoreKind.NEGATIVE_ENTROPY), src_correct)
    noise = stream_rng(config.seed, 1).uniform(-GDE_NOISE_SCALE, GDE_NOISE_SCALE, 2)
    clf_b = LinearSigmoidClassifier(clf.w_inv + noise[0], clf.w_spr + noise[1])

    rows = []
    for i, p_target in enumerate(p_grid):
        cfg = ToyConfig(
            config.gamma, config.c, config.p_spr, float(p_target),
            config.n, config.seed, config.c_target,
        )
        target = sample_toy(cfg, Role.TARGET, rng=stream_rng(config.seed, 2, i))
        target_preds = toy_predict(clf, target, name=f"p={p_target}")
        rows.append(
            ConsistencyRow(
                p_target=float(p_target),
                true_acc=toy_true_accuracy(clf, cfg, Role.TARGET),
                atc_mc=atc_estimate(model_mc, score(target_preds, ScoreKind.MAX_CONFIDENCE)).predicted_accuracy,
                atc_ne=atc_estimate(model_ne, score(target_preds, ScoreKind.NEGATIVE_ENTROPY)).predicted_accuracy,
                ac=ac_estimate(target_preds).predicted_accuracy,
                doc=doc_estimate(source_preds, target_preds).predicted_accuracy,
                im=im_estimate(source_preds, target_preds, bins=im_bins).predicted_accuracy,
                gde=gde_estimate(target_preds, toy_predict(clf_b, target)).predicted_accuracy,
            )
        )
    return rows


def run_biased_support_experiment(
    clf: LinearSigmoidClassifier, config: ToyConfig
) -> tuple[float, float]:
    """(true accuracy, ATC estimate) when the target support shrinks to c_target.

    The threshold is fitted on the full-support source, so part of the
    misclassified target mass sits above it and ATC overestimates accuracy.
    """
    if config.c_target is None:
        raise InvalidInput("biased-support experiment needs c_target set")
    if clf.w_inv <= 0 or clf.w_spr <= 0:
        raise OutOfTheoremScope("biased-support analysis assumes w_inv > 0 and w_spr > 0")
    ratio = clf.w_spr / clf.w_inv
    if not (config.gamma < ratio < config.c_target):
        raise OutOfTheoremScope("need gamma < w_spr/w_inv < c_target")
    source = sample_toy(config, Role.SOURCE, rng=stream_rng(config.seed, 0))
    source_preds = toy_predict(clf, source, name="source")
    model = fit_atc(score(source_preds, ScoreKind.MAX_CONFIDENCE), correctness(source_preds))
    target = sample_toy(config, Role.TARGET, rng=stream_rng(config.seed, 2))
    target_preds = toy_predict(clf, target, name="target")
    est = atc_estimate(model, score(target_preds, ScoreKind.MAX_CONFIDENCE))
    return toy_true_accuracy(clf, config, Role.TARGET), est.predicted_accuracy
