"""Train a machine on 4x4 bars-and-stripes two ways and compare.

The 30 distinct patterns bound the reachable mean log-likelihood at
-log(30) per record. Contrastive divergence takes a biased gradient
step; drawing the model term from the annealer emulator instead tracks
the true gradient more closely and trains a noticeably better model.

Run as: python3 demos/02_train_bars_and_stripes.py
"""

import math

from rbmlab.fixtures import bars_and_stripes
from rbmlab.samplers import gibbs_chain
from rbmlab.seeding import STREAM_GENERATE, spawn_rng
from rbmlab.training import TrainerSettings, fit_rbm

patterns = bars_and_stripes(4, 4).astype(float)
bound = -math.log(len(patterns))
print(f"dataset: {len(patterns)} distinct 16-bit patterns")
print(f"entropy bound on the mean log-likelihood: {bound:.4f}")

plans = {
    "cd-1": TrainerSettings(n_hidden=8, learning_rate=0.2, epochs=500,
                            batch_size=30),
    "annealer": TrainerSettings(n_hidden=8, learning_rate=0.5, epochs=500,
                                batch_size=30, sampler="annealer",
                                num_reads=512, sweeps=30),
}
pattern_set = {tuple(row) for row in patterns.astype(int)}

for name, settings in plans.items():
    result = fit_rbm(patterns, settings, seed=7)
    print(f"\n{name} likelihood trajectory:")
    for st in [*result.history[::125], result.history[-1]]:
        print(f"  epoch {st.epoch:>4}  mean loglik "
              f"{st.log_likelihood / len(patterns):+.4f}")

    # sample the trained model with long Gibbs chains and count draws
    # that land on a true pattern; blind guessing lands 30/65536 = 0.05%
    rng = spawn_rng(7, STREAM_GENERATE)
    starts = (rng.random((500, 16)) < 0.5).astype(float)
    v, _ = gibbs_chain(result.params, starts, cycles=200, rng=rng)
    hits = sum(tuple(row) in pattern_set for row in v)
    print(f"  samples landing on a valid pattern: {hits}/500 "
          f"({100 * hits / 500:.1f}%, chance is 0.05%)")
