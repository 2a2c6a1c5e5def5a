"""Mapping between the binary machine and a bipolar Ising problem.

An Ising problem over spins s in {-1,+1}^n has energy

    E(s) = sum_i field_i * s_i + sum_{i<j} coupling_ij * s_i * s_j.

Rewriting the machine's energy with v = (s+1)/2 bit by bit gives fields
of magnitude b_i/2 + (row sum of W)/4 on visible spins, c_j/2 + (column
sum of W)/4 on hidden spins, and couplings of magnitude W_ij/4. The
overall sign is fixed so that low machine energy corresponds to low Ising
energy, which makes the two energies differ by a configuration-independent
constant. Dividing every value by `scale_s` makes a unit-temperature
Boltzmann sample of the problem distribute as exp(-E_binary/scale_s)/Z.
"""

from __future__ import annotations

import dataclasses
from typing import Protocol

import numpy as np

from .errors import DimensionError
from .model import RbmParams, _as_float_matrix


@dataclasses.dataclass(frozen=True)
class IsingProblem:
    """Fields and pairwise couplings over spins indexed 0..num_spins-1.

    couplings maps index pairs (i, j) with i < j to real strengths; absent
    pairs are zero. For problems produced by rbm_to_ising, spins 0..N-1
    are the visible units and N..N+M-1 the hidden units.
    """

    num_spins: int
    fields: np.ndarray
    couplings: dict[tuple[int, int], float]

    def __post_init__(self):
        f = np.array(self.fields, dtype=np.float64)
        if f.ndim != 1 or f.shape[0] != self.num_spins:
            raise DimensionError(
                f"fields must have shape ({self.num_spins},), got {f.shape}")
        if not np.isfinite(f).all():
            raise ValueError("fields contain non-finite entries")
        for (i, j), val in self.couplings.items():
            if not (0 <= i < j < self.num_spins):
                raise ValueError(f"coupling key ({i}, {j}) must satisfy 0 <= i < j < num_spins")
            if not np.isfinite(val):
                raise ValueError(f"coupling ({i}, {j}) is non-finite")
        f.setflags(write=False)
        object.__setattr__(self, "fields", f)


def ising_energy(problem: IsingProblem, spins) -> float:
    """E(s) for one bipolar configuration."""
    s = np.asarray(spins, dtype=np.float64)
    if s.shape != (problem.num_spins,):
        raise DimensionError(f"spins must have shape ({problem.num_spins},), got {s.shape}")
    if not np.isin(s, (-1.0, 1.0)).all():
        raise ValueError("spins must be -1 or +1")
    e = float(problem.fields @ s)
    for (i, j), val in problem.couplings.items():
        e += val * s[i] * s[j]
    return e


def rbm_to_ising(params: RbmParams, scale_s: float = 1.0) -> IsingProblem:
    """Bipolar form of the machine's distribution at temperature scale_s.

    Sampling the returned problem at unit temperature and converting spins
    back to bits draws from exp(-E_binary(v,h)/scale_s) / Z.
    """
    if scale_s <= 0 or not np.isfinite(scale_s):
        raise ValueError(f"scale_s must be a positive real, got {scale_s}")
    n, m = params.n_visible, params.n_hidden
    w = params.weights
    # sign flipped relative to the bias convention so that energies align
    vis_fields = -(params.visible_bias / 2.0 + w.sum(axis=1) / 4.0) / scale_s
    hid_fields = -(params.hidden_bias / 2.0 + w.sum(axis=0) / 4.0) / scale_s
    couplings = {}
    for i in range(n):
        for j in range(m):
            couplings[(i, n + j)] = float(-w[i, j] / 4.0 / scale_s)
    return IsingProblem(n + m, np.concatenate([vis_fields, hid_fields]), couplings)


def bipartite_blocks(problem: IsingProblem, n_visible: int):
    """Split a visible/hidden-structured problem into dense blocks.

    Returns (visible fields, hidden fields, coupling matrix of shape
    (n_visible, n_hidden)). Raises if any coupling sits inside one layer.
    """
    if not 0 < n_visible < problem.num_spins:
        raise DimensionError(f"n_visible must lie in (0, {problem.num_spins})")
    n_hidden = problem.num_spins - n_visible
    j = np.zeros((n_visible, n_hidden))
    for (a, b), val in problem.couplings.items():
        if a >= n_visible or b < n_visible:
            raise ValueError(f"coupling ({a}, {b}) is not between the two layers")
        j[a, b - n_visible] = val
    return problem.fields[:n_visible], problem.fields[n_visible:], j


def binary_to_bipolar(bits) -> np.ndarray:
    """{0,1} -> {-1,+1}, elementwise; shape preserved."""
    arr = _as_float_matrix(np.atleast_2d(bits))
    out = (2.0 * arr - 1.0).astype(np.int8)
    return out[0] if np.asarray(bits).ndim == 1 else out


def bipolar_to_binary(spins) -> np.ndarray:
    """{-1,+1} -> {0,1}, elementwise; shape preserved."""
    arr = np.asarray(spins, dtype=np.float64)
    if not np.isin(arr, (-1.0, 1.0)).all():
        bad = arr[~np.isin(arr, (-1.0, 1.0))].flat[0]
        raise ValueError(f"bipolar data may contain only -1 and +1, found {bad!r}")
    return ((arr + 1) // 2).astype(np.uint8)


class AnnealerClient(Protocol):
    """Transport contract for a physical annealer backend.

    Implementations take an IsingProblem already restricted to the
    hardware graph and return one bipolar row per read, each covering
    every physical qubit index.
    """

    def submit(self, problem: IsingProblem, num_reads: int,
               anneal_time_microseconds: float = 20.0) -> np.ndarray: ...
