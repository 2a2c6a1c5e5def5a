"""Tour of the core model type: energies, conditionals, exact likelihood.

Run as: python3 demos/01_model_basics.py
"""

import numpy as np

from rbmlab.model import (RbmParams, energy, free_energy, hidden_activation_probs,
                          init_params, load_model, log_likelihood_exact,
                          log_partition, save_model)
from rbmlab.seeding import STREAM_INIT, spawn_rng

# A machine is just three arrays: visible bias, hidden bias and the
# coupling matrix between the layers. This one has 3 visible and 2
# hidden units, written out by hand.
params = RbmParams(weights=[[0.5, -0.2], [0.1, 0.3], [-0.4, 0.6]],
                   visible_bias=[0.1, -0.1, 0.2],
                   hidden_bias=[0.3, -0.3])
print(f"machine: {params.n_visible} visible, {params.n_hidden} hidden")

# Joint energy of one configuration of both layers.
v = np.array([1.0, 0.0, 1.0])
h = np.array([1.0, 1.0])
print(f"E(v={v.astype(int)}, h={h.astype(int)}) = {energy(params, v, h):+.4f}")

# Hidden units are conditionally independent given the visible layer.
print("P(h_j = 1 | v) =", np.round(hidden_activation_probs(params, v), 4))

# The free energy folds the hidden layer away analytically, so the
# marginal probability of a visible vector needs no hidden enumeration.
logp = -free_energy(params, v) - log_partition(params)
print(f"free energy F(v) = {free_energy(params, v):+.4f}")
print(f"P(v) = exp(-F(v) - log Z) = {np.exp(logp):.4f}")

# Summing P(v) over all 8 visible vectors must give exactly 1.
grid = np.array([[int(b) for b in f"{k:03b}"] for k in range(8)], dtype=float)
total = np.exp(-free_energy(params, grid) - log_partition(params)).sum()
print(f"sum over all visible states = {total:.12f}")

# Exact log-likelihood of a tiny dataset (sum over records).
records = np.array([[1, 0, 1], [1, 1, 1], [0, 0, 1]], dtype=float)
print(f"log-likelihood of 3 records = {log_likelihood_exact(params, records):+.4f}")

# Random initialisation and a save/load round trip; the text format
# keeps every float exactly.
fresh = init_params(3, 2, spawn_rng(0, STREAM_INIT), weight_scale=0.01)
save_model(fresh, "demo_model.rbm")
back = load_model("demo_model.rbm")
print("round trip exact:", bool(np.array_equal(back.weights, fresh.weights)))
