"""Both class-balancing schemes on the bundled imbalanced fixture.

Scheme 1 undersamples the majority class into balanced parts and lets
the per-part models vote. Scheme 2 trains a generative model on the
skewed table and tops the minority class up with synthetic records.
Settings here are scaled down to run in about a minute; the acceptance
suite exercises the full-size versions.

Run as: python3 demos/04_balancing_schemes.py
"""

from rbmlab.balance import run_scheme1, run_scheme2
from rbmlab.data import split_train_test
from rbmlab.fixtures import imbalanced_fixture
from rbmlab.seeding import STREAM_SPLIT, spawn_rng
from rbmlab.training import TrainerSettings

dataset = imbalanced_fixture(2000, seed=5)
counts = {lab.name: n for lab, n in dataset.class_counts().items()}
print(f"fixture: {len(dataset)} records, {counts}")

train, test = split_train_test(dataset, 100, 100, spawn_rng(9, STREAM_SPLIT))
print(f"train {len(train)} records, test {len(test)} records (100 per class)")

trainer = TrainerSettings(n_hidden=24, learning_rate=0.1, epochs=30, batch_size=64)

print("\nscheme 1: 4 balanced parts, free-energy classifier, majority vote")
rep1 = run_scheme1(train, test, 4, trainer, "rbm", seed=13)
print(rep1.to_text())

print("\nscheme 2: top up attack records with Gibbs-sampled synthetics")
rep2 = run_scheme2(train, test, trainer, seed=13)
print(rep2.to_text())
print(f"(synthetic records appended: {rep2.synthetic_added})")
