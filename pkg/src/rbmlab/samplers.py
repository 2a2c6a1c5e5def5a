"""Estimators for the model-expectation half of the likelihood gradient.

Training needs <v_i h_j>, <v_i> and <h_j> under the current model. Four
interchangeable sources are provided:

  cd                 k alternations of the conditionals started at the
                     data batch (contrastive divergence)
  exact              enumeration of the joint distribution
  annealer_emulator  temperature-ramped Gibbs sweeps on the bipolar form,
                     standing in for quantum annealing hardware
  annealer_remote    reads from a physical annealer behind a transport
                     client, chains resolved by majority vote

All of them return a ModelTermEstimate so the training loop does not care
which physics produced the numbers.
"""

from __future__ import annotations

import dataclasses

import numpy as np
from scipy.special import expit

from . import chimera
from .errors import DimensionError
from .ising import bipartite_blocks, bipolar_to_binary, rbm_to_ising
from .model import (RbmParams, _as_float_matrix, enumerate_states, free_energy,
                    hidden_activation_probs, _hidden_side_free_energy)

DEFAULT_ANNEAL_SWEEPS = 50
DEFAULT_ANNEAL_READS = 10000
# the ramp starts at ten times the target temperature
ANNEAL_BETA_START_FRACTION = 0.1


@dataclasses.dataclass(frozen=True)
class ModelTermEstimate:
    """Estimated expectations: e_vh (N, M), e_v (N,), e_h (M,), all in [0, 1]."""

    e_vh: np.ndarray
    e_v: np.ndarray
    e_h: np.ndarray

    def __post_init__(self):
        vh = np.array(self.e_vh, dtype=np.float64)
        v = np.array(self.e_v, dtype=np.float64)
        h = np.array(self.e_h, dtype=np.float64)
        if vh.ndim != 2 or v.ndim != 1 or h.ndim != 1:
            raise DimensionError("e_vh must be a matrix, e_v and e_h vectors")
        if vh.shape != (v.shape[0], h.shape[0]):
            raise DimensionError(
                f"e_vh shape {vh.shape} does not match e_v/e_h lengths "
                f"({v.shape[0]}, {h.shape[0]})")
        for name, arr in (("e_vh", vh), ("e_v", v), ("e_h", h)):
            if not np.isfinite(arr).all():
                raise ValueError(f"{name} contains non-finite entries")
            if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
                raise ValueError(f"{name} entries must lie in [0, 1]")
        for arr in (vh, v, h):
            arr.setflags(write=False)
        object.__setattr__(self, "e_vh", vh)
        object.__setattr__(self, "e_v", v)
        object.__setattr__(self, "e_h", h)


def cd_model_term(params: RbmParams, batch, k: int = 1,
                  rng: np.random.Generator | None = None) -> ModelTermEstimate:
    """Contrastive-divergence estimate from k alternations per record.

    The first hidden activation and all visible reconstructions stay
    probabilities; hidden states between rounds are binarised by Bernoulli
    draws. The final V', H' probability rows form the products, averaged
    over the batch. With k=1 no randomness is consumed at all.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > 1 and rng is None:
        raise ValueError("k > 1 binarises intermediate hidden states and needs rng")
    vm = _as_float_matrix(batch, params.n_visible)
    m = vm.shape[0]
    if m == 0:
        raise ValueError("batch is empty")
    w, b, c = params.weights, params.visible_bias, params.hidden_bias
    hp = expit(c + vm @ w)
    vp = expit(b + hp @ w.T)
    hp = expit(c + vp @ w)
    for _ in range(k - 1):
        hbin = (rng.random(hp.shape) < hp).astype(np.float64)
        vp = expit(b + hbin @ w.T)
        hp = expit(c + vp @ w)
    return ModelTermEstimate(vp.T @ hp / m, vp.mean(axis=0), hp.mean(axis=0))


def exact_model_expectations(params: RbmParams) -> ModelTermEstimate:
    """True expectations by enumerating the smaller layer.

    Guarded by the same capacity limit as exact likelihood.
    """
    if params.n_visible <= params.n_hidden:
        states = enumerate_states(params.n_visible).astype(np.float64)
        logw = -free_energy(params, states)
        p = np.exp(logw - logw.max())
        p /= p.sum()
        hp = hidden_activation_probs(params, states)
        e_vh = (states * p[:, None]).T @ hp
        return ModelTermEstimate(e_vh, p @ states, p @ hp)
    states = enumerate_states(params.n_hidden).astype(np.float64)
    logw = -_hidden_side_free_energy(params, states)
    p = np.exp(logw - logw.max())
    p /= p.sum()
    vp = expit(params.visible_bias + states @ params.weights.T)
    e_vh = (vp * p[:, None]).T @ states
    return ModelTermEstimate(e_vh, p @ vp, p @ states)


def gibbs_chain(params: RbmParams, v0, cycles: int,
                rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Alternating Gibbs sampling from starting visible state(s) v0.

    One cycle samples the hidden layer given the visible layer, then the
    visible given the hidden; after `cycles` cycles the hidden layer is
    sampled once more so the returned (v, h) is a joint draw. cycles=0
    returns v0 itself with h ~ P(h|v0). A 2-d v0 runs one independent
    chain per row under the single generator.
    """
    if cycles < 0:
        raise ValueError(f"cycles must be >= 0, got {cycles}")
    single = np.asarray(v0).ndim == 1
    v = _as_float_matrix(v0, params.n_visible)
    w, b, c = params.weights, params.visible_bias, params.hidden_bias
    for _ in range(cycles):
        hp = expit(c + v @ w)
        h = (rng.random(hp.shape) < hp).astype(np.float64)
        vp = expit(b + h @ w.T)
        v = (rng.random(vp.shape) < vp).astype(np.float64)
    hp = expit(c + v @ w)
    h = (rng.random(hp.shape) < hp).astype(np.float64)
    v8, h8 = v.astype(np.uint8), h.astype(np.uint8)
    return (v8[0], h8[0]) if single else (v8, h8)


def annealer_emulator_sample(params: RbmParams, scale_s: float = 1.0,
                             num_reads: int = DEFAULT_ANNEAL_READS,
                             sweeps: int = DEFAULT_ANNEAL_SWEEPS,
                             rng: np.random.Generator | None = None
                             ) -> tuple[np.ndarray, np.ndarray]:
    """Software stand-in for annealing hardware.

    Builds the bipolar form of the model at temperature scale_s and, for
    each read, ramps a Gibbs chain from ten times the target temperature
    down to the target over `sweeps` full sweeps (one sweep updates the
    visible block then the hidden block). Reads start from uniform random
    spins and are returned as binary (visible, hidden) row pairs, ideally
    distributed as exp(-E_binary/scale_s)/Z.
    """
    if num_reads < 1:
        raise ValueError(f"num_reads must be >= 1, got {num_reads}")
    if sweeps < 1:
        raise ValueError(f"sweeps must be >= 1, got {sweeps}")
    if rng is None:
        raise ValueError("an explicit rng is required for reproducible reads")
    problem = rbm_to_ising(params, scale_s)
    f_v, f_h, j = bipartite_blocks(problem, params.n_visible)
    betas = np.geomspace(ANNEAL_BETA_START_FRACTION, 1.0, sweeps) if sweeps > 1 \
        else np.array([1.0])
    s_v = np.where(rng.random((num_reads, params.n_visible)) < 0.5, -1.0, 1.0)
    s_h = np.where(rng.random((num_reads, params.n_hidden)) < 0.5, -1.0, 1.0)
    for beta in betas:
        # P(s=+1 | rest) = sigmoid(-2 beta local_field)
        local = f_v + s_h @ j.T
        s_v = np.where(rng.random(local.shape) < expit(-2.0 * beta * local), 1.0, -1.0)
        local = f_h + s_v @ j
        s_h = np.where(rng.random(local.shape) < expit(-2.0 * beta * local), 1.0, -1.0)
    return bipolar_to_binary(s_v), bipolar_to_binary(s_h)


def model_term_from_samples(visible, hidden) -> ModelTermEstimate:
    """Plain averages over rows of joint (visible, hidden) samples."""
    v = _as_float_matrix(visible)
    h = _as_float_matrix(hidden)
    if v.shape[0] != h.shape[0]:
        raise DimensionError(f"sample counts differ: {v.shape[0]} vs {h.shape[0]}")
    if v.shape[0] == 0:
        raise ValueError("no samples given")
    return ModelTermEstimate(v.T @ h / v.shape[0], v.mean(axis=0), h.mean(axis=0))


class CdSampler:
    """Contrastive divergence; the only kind that reads the data batch."""

    kind = "cd"

    def __init__(self, k: int = 1):
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        self.k = k

    def model_term(self, params, batch, rng):
        return cd_model_term(params, batch, self.k, rng)


class ExactSampler:
    """Enumeration, for small models; ignores the batch and the rng."""

    kind = "exact"

    def model_term(self, params, batch, rng):
        return exact_model_expectations(params)


class AnnealerEmulatorSampler:
    """Annealed-Gibbs reads; num_reads=None tracks the batch size."""

    kind = "annealer_emulator"

    def __init__(self, scale_s: float = 1.0, num_reads: int | None = None,
                 sweeps: int = DEFAULT_ANNEAL_SWEEPS):
        if scale_s <= 0 or not np.isfinite(scale_s):
            raise ValueError(f"scale_s must be a positive real, got {scale_s}")
        if num_reads is not None and num_reads < 1:
            raise ValueError(f"num_reads must be >= 1, got {num_reads}")
        if sweeps < 1:
            raise ValueError(f"sweeps must be >= 1, got {sweeps}")
        self.scale_s = scale_s
        self.num_reads = num_reads
        self.sweeps = sweeps

    def model_term(self, params, batch, rng):
        reads = self.num_reads if self.num_reads is not None \
            else _as_float_matrix(batch, params.n_visible).shape[0]
        v, h = annealer_emulator_sample(params, self.scale_s, reads, self.sweeps, rng)
        return model_term_from_samples(v, h)


class RemoteAnnealerSampler:
    """Reads from physical hardware through an AnnealerClient transport.

    The logical problem is chain-embedded on the client's Chimera graph,
    submitted with a 20 microsecond anneal per read, and each raw read is
    majority-vote resolved back to logical units. No transport ships with
    this package; constructing the sampler requires a client object.
    """

    kind = "annealer_remote"

    def __init__(self, client, graph: chimera.ChimeraGraph,
                 scale_s: float = 1.0, num_reads: int | None = None,
                 anneal_time_microseconds: float = 20.0,
                 chain_coupling: float = chimera.DEFAULT_CHAIN_COUPLING):
        if client is None:
            raise ValueError("remote annealing needs a transport client; "
                             "none is bundled with this package")
        self.client = client
        self.graph = graph
        self.scale_s = scale_s
        self.num_reads = num_reads
        self.anneal_time_microseconds = anneal_time_microseconds
        self.chain_coupling = chain_coupling

    def model_term(self, params, batch, rng):
        reads = self.num_reads if self.num_reads is not None \
            else _as_float_matrix(batch, params.n_visible).shape[0]
        emb = chimera.build_chimera_embedding(params.n_visible, params.n_hidden,
                                              self.graph, self.chain_coupling)
        physical = chimera.embed_problem(rbm_to_ising(params, self.scale_s), emb)
        raw = np.asarray(self.client.submit(physical, reads,
                                            self.anneal_time_microseconds))
        if raw.ndim != 2 or raw.shape[0] != reads:
            raise DimensionError(f"client returned shape {raw.shape}, "
                                 f"expected ({reads}, {self.graph.num_qubits})")
        pairs = [chimera.resolve_chains(row, emb, rng) for row in raw]
        return model_term_from_samples(np.stack([p[0] for p in pairs]),
                                       np.stack([p[1] for p in pairs]))


def make_sampler(kind: str, *, cd_k: int = 1, scale_s: float = 1.0,
                 num_reads: int | None = None, sweeps: int = DEFAULT_ANNEAL_SWEEPS,
                 client=None, graph: chimera.ChimeraGraph | None = None):
    """Build a sampler by kind name; 'annealer' means the emulator."""
    if kind == "cd":
        return CdSampler(cd_k)
    if kind == "exact":
        return ExactSampler()
    if kind in ("annealer", "annealer_emulator"):
        return AnnealerEmulatorSampler(scale_s, num_reads, sweeps)
    if kind == "annealer_remote":
        if graph is None:
            graph = chimera.ChimeraGraph(16)
        return RemoteAnnealerSampler(client, graph, scale_s, num_reads)
    raise ValueError(f"unknown sampler kind {kind!r}")
