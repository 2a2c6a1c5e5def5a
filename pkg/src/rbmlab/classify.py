"""Three classifiers over labelled bit records.

All of them consume records whose last two bits are the class code and
predict BENIGN or ATTACK for a bare feature vector. Ties always resolve
toward BENIGN (the lower class ordinal) so results are reproducible.
"""

from __future__ import annotations

import dataclasses

import numpy as np
from scipy.special import expit

from .data import LABEL_BITS, LABEL_WIDTH, ClassLabel, Dataset
from .errors import DimensionError
from .model import RbmParams, _as_float_matrix, free_energy


def _feature_matrix(features, width: int) -> np.ndarray:
    arr = _as_float_matrix(features)
    if arr.shape[1] != width:
        raise DimensionError(f"expected {width} feature bits per row, got {arr.shape[1]}")
    return arr


def label_completions(features, width: int | None = None):
    """The two full records formed by appending each class code."""
    arr = _as_float_matrix(features)
    if width is not None and arr.shape[1] != width - LABEL_WIDTH:
        raise DimensionError(
            f"expected {width - LABEL_WIDTH} feature bits per row, got {arr.shape[1]}")
    out = {}
    for label, bits in LABEL_BITS.items():
        tail = np.tile(np.asarray(bits, dtype=np.float64), (arr.shape[0], 1))
        out[label] = np.hstack([arr, tail])
    return out[ClassLabel.BENIGN], out[ClassLabel.ATTACK]


def free_energy_gap(params: RbmParams, features):
    """F(features + attack code) - F(features + benign code).

    Positive means the benign completion is the more probable one. Accepts
    a single feature vector or a matrix of rows.
    """
    single = np.asarray(features).ndim == 1
    benign, attack = label_completions(features, params.n_visible)
    gap = free_energy(params, attack) - free_energy(params, benign)
    if single:
        return float(np.atleast_1d(gap)[0])
    return np.atleast_1d(gap)


def _reconstruction_label_probs(params: RbmParams, features, cycles: int):
    # label bits start at maximum entropy; passes keep everything as
    # probabilities so the result is deterministic
    arr = _as_float_matrix(features)
    if arr.shape[1] != params.n_visible - LABEL_WIDTH:
        raise DimensionError(
            f"expected {params.n_visible - LABEL_WIDTH} feature bits per row, "
            f"got {arr.shape[1]}")
    v = np.hstack([arr, np.full((arr.shape[0], LABEL_WIDTH), 0.5)])
    for _ in range(max(1, cycles)):
        hp = expit(params.hidden_bias + v @ params.weights)
        vp = expit(params.visible_bias + hp @ params.weights.T)
        v = np.hstack([arr, vp[:, -LABEL_WIDTH:]])
    return v[:, -LABEL_WIDTH:]


def rbm_classify(params: RbmParams, features, method: str = "free_energy",
                 cycles: int = 1) -> ClassLabel:
    """Label one feature vector with a trained machine.

    method 'free_energy' compares the free energies of the two label
    completions (the gap doubles as a confidence score; see
    free_energy_gap). method 'reconstruction' instead reconstructs the
    label bits from clamped features and picks the nearer code. Exact
    ties go to BENIGN.
    """
    return rbm_classify_batch(params, np.atleast_2d(np.asarray(features)),
                              method, cycles)[0]


def rbm_classify_batch(params: RbmParams, features, method: str = "free_energy",
                       cycles: int = 1) -> list[ClassLabel]:
    if method == "free_energy":
        gap = free_energy_gap(params, features)
        return [ClassLabel.BENIGN if g >= 0 else ClassLabel.ATTACK
                for g in np.atleast_1d(gap)]
    if method == "reconstruction":
        probs = _reconstruction_label_probs(params, features, cycles)
        p_benign = (1.0 - probs[:, 0]) * probs[:, 1]
        p_attack = probs[:, 0] * (1.0 - probs[:, 1])
        return [ClassLabel.BENIGN if pb >= pa else ClassLabel.ATTACK
                for pb, pa in zip(p_benign, p_attack)]
    raise ValueError(f"unknown method {method!r}")


def knn_classify(train: Dataset, query, k: int = 3) -> ClassLabel:
    """k nearest neighbours by Hamming distance over feature bits.

    Distance ties are broken by lower record index; a tied vote among the
    neighbours goes to BENIGN.
    """
    return knn_classify_batch(train, np.atleast_2d(np.asarray(query)), k)[0]


def knn_classify_batch(train: Dataset, queries, k: int = 3) -> list[ClassLabel]:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > len(train):
        raise ValueError(f"k={k} exceeds the {len(train)} training records")
    qm = _feature_matrix(queries, train.feature_width)
    tm = train.features().astype(np.float64)
    labels = train.labels()
    # Hamming distance via inner products: |q| + |t| - 2 q.t for 0/1 bits
    dists = (qm.sum(axis=1)[:, None] + tm.sum(axis=1)[None, :]
             - 2.0 * qm @ tm.T).astype(np.int64)
    out = []
    for row in dists:
        nearest = np.argsort(row, kind="stable")[:k]  # stable: index breaks ties
        votes_attack = sum(1 for i in nearest if labels[i] is ClassLabel.ATTACK)
        votes_benign = k - votes_attack
        out.append(ClassLabel.ATTACK if votes_attack > votes_benign else ClassLabel.BENIGN)
    return out


@dataclasses.dataclass(frozen=True)
class NbModel:
    """Bernoulli naive Bayes factors, class order (BENIGN, ATTACK)."""

    log_prior: np.ndarray   # shape (2,)
    log_p_one: np.ndarray   # shape (2, n_features): log P(bit=1 | class)
    log_p_zero: np.ndarray  # shape (2, n_features): log P(bit=0 | class)

    @property
    def n_features(self) -> int:
        return self.log_p_one.shape[1]


def nb_fit(train: Dataset) -> NbModel:
    """Fit per-class Bernoulli factors with add-one (Laplace) smoothing.

    A value never seen for a class gets probability 1/(n_class + 2), so
    no likelihood is ever exactly zero.
    """
    labels = train.labels()
    feats = train.features().astype(np.float64)
    rows = []
    priors = []
    for lab in (ClassLabel.BENIGN, ClassLabel.ATTACK):
        mask = labels == lab
        n = int(mask.sum())
        if n == 0:
            raise ValueError(f"training data has no {lab.name} records")
        ones = feats[mask].sum(axis=0)
        rows.append((ones + 1.0) / (n + 2.0))
        priors.append(n / len(train))
    p_one = np.vstack(rows)
    return NbModel(np.log(priors), np.log(p_one), np.log1p(-p_one))


def nb_classify(model: NbModel, query) -> ClassLabel:
    """Most probable class by log posterior; ties go to BENIGN."""
    return nb_classify_batch(model, np.atleast_2d(np.asarray(query)))[0]


def nb_classify_batch(model: NbModel, queries) -> list[ClassLabel]:
    qm = _feature_matrix(queries, model.n_features)
    scores = model.log_prior[None, :] + qm @ model.log_p_one.T \
        + (1.0 - qm) @ model.log_p_zero.T
    return [ClassLabel.BENIGN if s[0] >= s[1] else ClassLabel.ATTACK for s in scores]
