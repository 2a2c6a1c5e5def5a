"""Minibatch gradient-ascent training, agnostic to the model-term source.

One update step computes the data term from the batch (conditional
probabilities, not samples), subtracts whichever model-term estimate the
sampler provides, and moves every parameter by learning_rate times the
difference. Contrastive divergence and annealer-driven training differ
only in the sampler object passed in.

No momentum, no weight decay, no learning-rate schedule: the update rule
is exactly theta + learning_rate * gradient.
"""

from __future__ import annotations

import dataclasses
import time

import numpy as np
from scipy.special import expit

from .errors import TrainingDivergenceError, TrainingError
from .model import (ENUMERATION_LIMIT, Gradient, RbmParams, _as_float_matrix,
                    apply_update, free_energy, gradient_data_term, init_params,
                    log_likelihood_exact)
from .samplers import make_sampler
from .seeding import STREAM_INIT, STREAM_TRAIN, spawn_rng


@dataclasses.dataclass(frozen=True)
class TrainConfig:
    """Knobs for one training run.

    batch_size is a cap: a short final batch is used as-is with its true
    size. rng_seed feeds a private generator that drives epoch shuffles
    and any sampler randomness, in that order, so runs with equal seeds
    are reproducible bit for bit. The optional early stop ends training
    once the epoch reconstruction error has failed to improve by at least
    early_stop_min_delta for early_stop_patience consecutive epochs.
    """

    learning_rate: float
    epochs: int
    batch_size: int
    cd_k: int = 1
    scale_s: float = 1.0
    rng_seed: int = 0
    early_stop_patience: int | None = None
    early_stop_min_delta: float = 1e-5

    def __post_init__(self):
        if not np.isfinite(self.learning_rate) or self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be a positive real, got {self.learning_rate}")
        if self.epochs < 0:
            raise ValueError(f"epochs must be >= 0, got {self.epochs}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.cd_k < 1:
            raise ValueError(f"cd_k must be >= 1, got {self.cd_k}")
        if not np.isfinite(self.scale_s) or self.scale_s <= 0:
            raise ValueError(f"scale_s must be a positive real, got {self.scale_s}")
        if self.early_stop_patience is not None and self.early_stop_patience < 1:
            raise ValueError("early_stop_patience must be >= 1 when set")
        if self.early_stop_min_delta < 0:
            raise ValueError("early_stop_min_delta must be >= 0")


@dataclasses.dataclass(frozen=True)
class EpochStats:
    epoch: int
    reconstruction_error: float
    log_likelihood: float | None  # None when the model is too large to enumerate
    seconds: float


@dataclasses.dataclass(frozen=True)
class TrainResult:
    params: RbmParams
    history: tuple[EpochStats, ...]


def reconstruction_error(params: RbmParams, records) -> float:
    """Mean squared error of the one-pass probability reconstruction."""
    vm = _as_float_matrix(records, params.n_visible)
    hp = expit(params.hidden_bias + vm @ params.weights)
    vp = expit(params.visible_bias + hp @ params.weights.T)
    return float(np.mean((vm - vp) ** 2))


def train(params: RbmParams, records, config: TrainConfig, sampler) -> TrainResult:
    """Run config.epochs passes over records, one update per minibatch.

    Records are reshuffled every epoch. Each epoch is logged with its
    reconstruction error over the full dataset, the exact log-likelihood
    when the model is small enough to enumerate, and wall time. Sampler
    failures and divergent updates surface with epoch/step attached.
    """
    vm = _as_float_matrix(records, params.n_visible)
    if vm.shape[0] == 0:
        raise ValueError("records is empty")
    enumerable = params.n_visible + params.n_hidden <= ENUMERATION_LIMIT
    rng = spawn_rng(config.rng_seed, STREAM_TRAIN)
    history = []
    stall, best_err = 0, np.inf
    for epoch in range(config.epochs):
        t0 = time.perf_counter()
        order = rng.permutation(vm.shape[0])
        shuffled = vm[order]
        for step, start in enumerate(range(0, vm.shape[0], config.batch_size)):
            batch = shuffled[start:start + config.batch_size]
            data_term = gradient_data_term(params, batch)
            try:
                model_term = sampler.model_term(params, batch, rng)
            except Exception as exc:
                raise TrainingError(
                    f"sampler {getattr(sampler, 'kind', type(sampler).__name__)!r} "
                    f"failed at epoch {epoch} step {step}: {exc}") from exc
            grad = Gradient(data_term.weights - model_term.e_vh,
                            data_term.visible_bias - model_term.e_v,
                            data_term.hidden_bias - model_term.e_h)
            try:
                params = apply_update(params, grad, config.learning_rate)
            except TrainingDivergenceError as exc:
                raise TrainingDivergenceError(
                    f"epoch {epoch} step {step}: {exc}") from exc
        err = reconstruction_error(params, vm)
        ll = log_likelihood_exact(params, vm) if enumerable else None
        # parameters can saturate so far that energies overflow while every
        # individual update stays finite; probabilities then sit at exact
        # 0/1 and reconstruction error alone cannot tell. that is still
        # divergence, so the data's free energies must stay finite too
        finite_energy = bool(np.isfinite(free_energy(params, vm)).all())
        if not np.isfinite(err) or not finite_energy \
                or (ll is not None and not np.isfinite(ll)):
            raise TrainingDivergenceError(
                f"epoch {epoch}: non-finite training statistics (reconstruction "
                f"error {err}, log-likelihood {ll}, finite free energies: "
                f"{finite_energy}); lower the learning rate")
        history.append(EpochStats(epoch, err, ll, time.perf_counter() - t0))
        if config.early_stop_patience is not None:
            if err < best_err - config.early_stop_min_delta:
                best_err, stall = err, 0
            else:
                stall += 1
                if stall >= config.early_stop_patience:
                    break
    return TrainResult(params, tuple(history))


@dataclasses.dataclass(frozen=True)
class TrainerSettings:
    """Everything needed to train a machine from scratch on a dataset.

    Bundles the architecture, the TrainConfig fields and the sampler
    choice so higher-level workflows can be configured in one object.
    sampler is one of 'cd', 'exact', 'annealer' (the emulator);
    num_reads=None lets annealer reads track the batch size.
    """

    n_hidden: int
    learning_rate: float = 0.1
    epochs: int = 30
    batch_size: int = 32
    sampler: str = "cd"
    cd_k: int = 1
    scale_s: float = 1.0
    num_reads: int | None = None
    sweeps: int = 50
    weight_scale: float = 0.01
    early_stop_patience: int | None = None
    early_stop_min_delta: float = 1e-5

    def config(self, seed: int) -> TrainConfig:
        return TrainConfig(self.learning_rate, self.epochs, self.batch_size,
                           self.cd_k, self.scale_s, seed,
                           self.early_stop_patience, self.early_stop_min_delta)


def fit_rbm(records, settings: TrainerSettings, seed: int = 0) -> TrainResult:
    """Initialise and train a machine on full-width records."""
    vm = _as_float_matrix(records)
    params = init_params(vm.shape[1], settings.n_hidden,
                         spawn_rng(seed, STREAM_INIT), settings.weight_scale)
    sampler = make_sampler(settings.sampler, cd_k=settings.cd_k,
                           scale_s=settings.scale_s, num_reads=settings.num_reads,
                           sweeps=settings.sweeps)
    return train(params, vm, settings.config(seed), sampler)
