"""Bernoulli restricted Boltzmann machine: parameters and exact quantities.

The model assigns a configuration of visible units v in {0,1}^N and hidden
units h in {0,1}^M the energy

    E(v, h) = -b.v - c.h - v.W.h

with weights W of shape (N, M), visible biases b and hidden biases c. The
joint distribution is exp(-E) / Z. Everything here is exact arithmetic on
that definition; sampling-based estimation lives in `samplers`.

Binary vectors are plain numpy arrays validated at the public boundaries,
not a wrapper class. Exact likelihood enumerates the smaller layer, so it
is available whenever N + M <= ENUMERATION_LIMIT.
"""

from __future__ import annotations

import dataclasses

import numpy as np
from scipy.special import expit, logsumexp

from .errors import CapacityError, DataFormatError, DimensionError, TrainingDivergenceError

ENUMERATION_LIMIT = 24  # largest N + M handled by exact enumeration

MODEL_FORMAT_HEADER = "RBM-MODEL v1"


def _as_float_matrix(records, width: int | None = None) -> np.ndarray:
    """Validate a batch of binary rows and return it as float64 (n, width)."""
    arr = np.asarray(records, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise DimensionError(f"expected a vector or matrix of bits, got ndim={arr.ndim}")
    if width is not None and arr.shape[1] != width:
        raise DimensionError(f"expected rows of length {width}, got {arr.shape[1]}")
    if arr.size and not np.isin(arr, (0.0, 1.0)).all():
        bad = arr[~np.isin(arr, (0.0, 1.0))].flat[0]
        raise ValueError(f"binary data may contain only 0 and 1, found {bad!r}")
    return arr


def as_binary_vector(bits, length: int | None = None) -> np.ndarray:
    """Validate a single binary vector, returning uint8."""
    arr = np.asarray(bits)
    if arr.ndim != 1:
        raise DimensionError(f"expected a 1-d bit vector, got ndim={arr.ndim}")
    if length is not None and arr.shape[0] != length:
        raise DimensionError(f"expected length {length}, got {arr.shape[0]}")
    return _as_float_matrix(arr, width=arr.shape[0])[0].astype(np.uint8)


@dataclasses.dataclass(frozen=True)
class RbmParams:
    """Weights and biases of one machine.

    weights: (n_visible, n_hidden) real matrix, entry [i, j] couples
    visible unit i to hidden unit j. visible_bias and hidden_bias are the
    matching vectors. All entries must be finite at all times, including
    mid-training. Arrays are write-protected; updates build new instances.
    """

    weights: np.ndarray
    visible_bias: np.ndarray
    hidden_bias: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64)
        b = np.array(self.visible_bias, dtype=np.float64)
        c = np.array(self.hidden_bias, dtype=np.float64)
        if w.ndim != 2:
            raise DimensionError(f"weights must be 2-d, got ndim={w.ndim}")
        if b.ndim != 1 or c.ndim != 1:
            raise DimensionError("bias vectors must be 1-d")
        if w.shape[0] < 1 or w.shape[1] < 1:
            raise DimensionError("need at least one visible and one hidden unit")
        if b.shape[0] != w.shape[0]:
            raise DimensionError(
                f"visible_bias length {b.shape[0]} != weights rows {w.shape[0]}")
        if c.shape[0] != w.shape[1]:
            raise DimensionError(
                f"hidden_bias length {c.shape[0]} != weights columns {w.shape[1]}")
        for name, arr in (("weights", w), ("visible_bias", b), ("hidden_bias", c)):
            if not np.isfinite(arr).all():
                raise ValueError(f"{name} contains non-finite entries")
        for arr in (w, b, c):
            arr.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "visible_bias", b)
        object.__setattr__(self, "hidden_bias", c)

    @property
    def n_visible(self) -> int:
        return self.weights.shape[0]

    @property
    def n_hidden(self) -> int:
        return self.weights.shape[1]


def init_params(n_visible: int, n_hidden: int, rng: np.random.Generator,
                weight_scale: float = 0.01) -> RbmParams:
    """Fresh parameters: small zero-mean Gaussian weights, zero biases."""
    if weight_scale < 0 or not np.isfinite(weight_scale):
        raise ValueError(f"weight_scale must be finite and >= 0, got {weight_scale}")
    w = rng.normal(0.0, weight_scale, size=(n_visible, n_hidden))
    return RbmParams(w, np.zeros(n_visible), np.zeros(n_hidden))


def energy(params: RbmParams, v, h):
    """E(v, h) for one pair of binary vectors, or elementwise over batches."""
    vm = _as_float_matrix(v, params.n_visible)
    hm = _as_float_matrix(h, params.n_hidden)
    if vm.shape[0] != hm.shape[0]:
        raise DimensionError(f"batch sizes differ: {vm.shape[0]} vs {hm.shape[0]}")
    e = (-vm @ params.visible_bias
         - hm @ params.hidden_bias
         - np.einsum("ti,ij,tj->t", vm, params.weights, hm))
    return float(e[0]) if np.asarray(v).ndim == 1 else e


def hidden_activation_probs(params: RbmParams, v):
    """P(h_j = 1 | v) = sigmoid(c_j + (v.W)_j), rowwise over a batch."""
    vm = _as_float_matrix(v, params.n_visible)
    probs = expit(params.hidden_bias + vm @ params.weights)
    return probs[0] if np.asarray(v).ndim == 1 else probs


def visible_activation_probs(params: RbmParams, h):
    """P(v_i = 1 | h) = sigmoid(b_i + (W.h)_i), rowwise over a batch."""
    hm = _as_float_matrix(h, params.n_hidden)
    probs = expit(params.visible_bias + hm @ params.weights.T)
    return probs[0] if np.asarray(h).ndim == 1 else probs


def free_energy(params: RbmParams, v):
    """F(v) = -b.v - sum_j softplus(c_j + (v.W)_j); exp(-F) marginalises h."""
    vm = _as_float_matrix(v, params.n_visible)
    act = params.hidden_bias + vm @ params.weights
    f = -vm @ params.visible_bias - np.logaddexp(0.0, act).sum(axis=1)
    return float(f[0]) if np.asarray(v).ndim == 1 else f


def _hidden_side_free_energy(params: RbmParams, h):
    # mirror of free_energy with the layers swapped: exp(-G) marginalises v
    hm = _as_float_matrix(h, params.n_hidden)
    act = params.visible_bias + hm @ params.weights.T
    return -hm @ params.hidden_bias - np.logaddexp(0.0, act).sum(axis=1)


def enumerate_states(n: int) -> np.ndarray:
    """All 2^n binary vectors of length n, most significant bit first."""
    if n < 1:
        raise DimensionError(f"need n >= 1, got {n}")
    if n > ENUMERATION_LIMIT:
        raise CapacityError(f"will not enumerate 2^{n} states (limit 2^{ENUMERATION_LIMIT})")
    idx = np.arange(2 ** n, dtype=np.int64)
    return ((idx[:, None] >> np.arange(n - 1, -1, -1)) & 1).astype(np.uint8)


def _check_enumerable(params: RbmParams) -> None:
    total = params.n_visible + params.n_hidden
    if total > ENUMERATION_LIMIT:
        raise CapacityError(
            f"exact enumeration needs n_visible + n_hidden <= {ENUMERATION_LIMIT}, "
            f"got {total}")


def log_partition(params: RbmParams) -> float:
    """log Z by enumerating the smaller layer (guarded by ENUMERATION_LIMIT)."""
    _check_enumerable(params)
    if params.n_visible <= params.n_hidden:
        states = enumerate_states(params.n_visible)
        return float(logsumexp(-free_energy(params, states)))
    states = enumerate_states(params.n_hidden)
    return float(logsumexp(-_hidden_side_free_energy(params, states)))


def log_likelihood_exact(params: RbmParams, records) -> float:
    """Total log-likelihood sum_t log P(v_t) over the given records.

    Only for models with n_visible + n_hidden <= ENUMERATION_LIMIT; larger
    models raise CapacityError rather than return an approximation.
    """
    _check_enumerable(params)
    vm = _as_float_matrix(records, params.n_visible)
    if vm.shape[0] == 0:
        raise ValueError("records is empty")
    return float(-free_energy(params, vm).sum() - vm.shape[0] * log_partition(params))


@dataclasses.dataclass(frozen=True)
class Gradient:
    """Per-parameter gradient direction, same shapes as RbmParams arrays."""

    weights: np.ndarray
    visible_bias: np.ndarray
    hidden_bias: np.ndarray


def gradient_data_term(params: RbmParams, batch) -> Gradient:
    """Data-dependent halves of the log-likelihood gradient, batch means.

    Hidden factors are the conditional probabilities P(h|v), not samples:
    weights term (1/m) sum_t outer(v_t, P(h|v_t)), bias terms the plain
    means of v_t and P(h|v_t).
    """
    vm = _as_float_matrix(batch, params.n_visible)
    m = vm.shape[0]
    if m == 0:
        raise ValueError("batch is empty")
    hp = expit(params.hidden_bias + vm @ params.weights)
    return Gradient(vm.T @ hp / m, vm.mean(axis=0), hp.mean(axis=0))


def apply_update(params: RbmParams, grad: Gradient, learning_rate: float) -> RbmParams:
    """One ascent step: theta + learning_rate * grad, as a new RbmParams."""
    pieces = (("weights", grad.weights, params.weights),
              ("visible_bias", grad.visible_bias, params.visible_bias),
              ("hidden_bias", grad.hidden_bias, params.hidden_bias))
    for name, arr, target in pieces:
        arr = np.asarray(arr)
        if arr.shape != target.shape:
            raise DimensionError(
                f"gradient {name} shape {arr.shape} does not match {target.shape}")
        if not np.isfinite(arr).all():
            raise TrainingDivergenceError(f"gradient {name} contains non-finite entries")
    with np.errstate(over="ignore"):
        w = params.weights + learning_rate * np.asarray(grad.weights)
        b = params.visible_bias + learning_rate * np.asarray(grad.visible_bias)
        c = params.hidden_bias + learning_rate * np.asarray(grad.hidden_bias)
    for name, arr in (("weights", w), ("visible_bias", b), ("hidden_bias", c)):
        if not np.isfinite(arr).all():
            raise TrainingDivergenceError(
                f"update produced non-finite {name} (diverged; lower the learning rate)")
    return RbmParams(w, b, c)


def save_model(params: RbmParams, path) -> None:
    """Write a model file: header, sizes, then weight rows and bias lines.

    Values are decimal with 17 significant digits, so loading reproduces
    the exact float64 bits.
    """
    def fmt(row):
        return " ".join(f"{x:.17g}" for x in row)

    lines = [MODEL_FORMAT_HEADER, str(params.n_visible), str(params.n_hidden)]
    lines.extend(fmt(row) for row in params.weights)
    lines.append(fmt(params.visible_bias))
    lines.append(fmt(params.hidden_bias))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def load_model(path) -> RbmParams:
    """Read a model file written by save_model, validating as it goes."""
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or lines[0] != MODEL_FORMAT_HEADER:
        raise DataFormatError(f"{path}: missing '{MODEL_FORMAT_HEADER}' header")
    if len(lines) < 3:
        raise DataFormatError(f"{path}: truncated before size lines")
    try:
        n_visible, n_hidden = int(lines[1]), int(lines[2])
    except ValueError as exc:
        raise DataFormatError(f"{path}: size lines must be integers") from exc
    if n_visible < 1 or n_hidden < 1:
        raise DataFormatError(f"{path}: sizes must be positive, got {n_visible}, {n_hidden}")
    expected = 3 + n_visible + 2
    if len(lines) != expected:
        raise DataFormatError(f"{path}: expected {expected} lines, found {len(lines)}")

    def parse(line, count, what):
        parts = line.split()
        if len(parts) != count:
            raise DataFormatError(f"{path}: {what} needs {count} values, found {len(parts)}")
        try:
            vals = np.array([float(p) for p in parts])
        except ValueError as exc:
            raise DataFormatError(f"{path}: non-numeric value in {what}") from exc
        if not np.isfinite(vals).all():
            raise DataFormatError(f"{path}: non-finite value in {what}")
        return vals

    w = np.stack([parse(lines[3 + i], n_hidden, f"weight row {i}")
                  for i in range(n_visible)])
    b = parse(lines[3 + n_visible], n_visible, "visible biases")
    c = parse(lines[4 + n_visible], n_hidden, "hidden biases")
    return RbmParams(w, b, c)
