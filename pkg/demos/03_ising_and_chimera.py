"""From a machine to annealer form: Ising mapping, emulated reads,
hardware-graph embedding and chain repair.

Run as: python3 demos/03_ising_and_chimera.py
"""

import numpy as np

from rbmlab.chimera import (ChimeraGraph, build_chimera_embedding, embed_problem,
                            resolve_chains)
from rbmlab.ising import binary_to_bipolar, ising_energy, rbm_to_ising
from rbmlab.model import RbmParams, energy, enumerate_states, log_partition
from rbmlab.samplers import annealer_emulator_sample
from rbmlab.seeding import STREAM_GENERATE, STREAM_TIEBREAK, spawn_rng

rng = np.random.default_rng(42)
params = RbmParams(rng.normal(0, 0.7, (3, 3)),
                   rng.normal(0, 0.7, 3), rng.normal(0, 0.7, 3))

# The bipolar form shifts every configuration's energy by one constant,
# so both forms share a Boltzmann distribution.
problem = rbm_to_ising(params)
states = enumerate_states(3).astype(float)
joint_v = np.repeat(states, 8, axis=0)
joint_h = np.tile(states, (8, 1))
offsets = energy(params, joint_v, joint_h) - np.array(
    [ising_energy(problem, s) for s in binary_to_bipolar(np.hstack([joint_v, joint_h]))])
print(f"energy offset over all 64 states: {offsets.min():+.6f} .. {offsets.max():+.6f}")

# Emulated annealer reads against the exact Boltzmann table.
v, h = annealer_emulator_sample(params, scale_s=1.0, num_reads=20000, sweeps=50,
                                rng=spawn_rng(0, STREAM_GENERATE))
codes = (np.hstack([v, h]) @ (1 << np.arange(5, -1, -1))).astype(int)
empirical = np.bincount(codes, minlength=64) / len(codes)
exact = np.exp(-energy(params, joint_v, joint_h) - log_partition(params))
print(f"total variation, 20000 reads vs exact: {0.5 * np.abs(empirical - exact).sum():.4f}")

# Mapping a 64+64 machine onto the 2048-qubit hardware graph: every
# logical unit becomes a ferromagnetic chain of 16 physical qubits.
graph = ChimeraGraph(16)
emb = build_chimera_embedding(64, 64, graph)
print(f"C16 embedding: {len(emb.visible_chains)}+{len(emb.hidden_chains)} chains, "
      f"{len(emb.coupling_edges)} logical couplings")

# A broken qubit at the end of a chain just shortens it.
broken = ChimeraGraph(16, broken_qubits={graph.qubit_index(0, 0, 0, 0)})
emb_b = build_chimera_embedding(64, 64, broken)
print(f"with one broken qubit: visible chain 0 has {len(emb_b.visible_chains[0])} "
      f"qubits, {len(emb_b.missing_couplings)} couplings lost")

# Physical reads may disagree inside a chain; a majority vote per chain
# recovers the logical state, with exact ties settled by a fair coin.
small = build_chimera_embedding(3, 3, ChimeraGraph(2))
phys = embed_problem(problem, small)
print(f"3+3 machine on C2: chains of {len(small.visible_chains[0])} qubits, "
      f"{phys.num_spins} physical spins")
read = np.ones(phys.num_spins)
read[small.visible_chains[0][0]] = -1.0  # break visible chain 0: a 1-1 tie
vis, hid = resolve_chains(read, small, spawn_rng(0, STREAM_TIEBREAK))
print(f"resolved read: visible {vis.astype(int)}, hidden {hid.astype(int)}")
