"""Two workflows for learning from class-imbalanced record tables.

Undersampling-with-voting cuts the majority class into balanced parts,
trains one classifier per part, and lets the ensemble vote. Synthetic
oversampling instead trains a generative machine on the imbalanced table,
samples records from it, keeps the ones whose label bits decode to the
minority class, and tops the table up to parity before training ordinary
classifiers on the result.

Both emit report objects that render as aligned text tables and as
comma-separated rows with documented headers.
"""

from __future__ import annotations

import dataclasses
import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .classify import knn_classify_batch, nb_classify_batch, nb_fit, rbm_classify_batch
from .data import ClassLabel, Dataset, partition_for_undersampling
from .errors import UndefinedMetricError
from .metrics import accuracy, confusion, f1, precision, recall
from .model import RbmParams
from .samplers import annealer_emulator_sample, gibbs_chain
from .seeding import STREAM_GENERATE, STREAM_TRAIN, derive_seed, spawn_rng
from .training import TrainerSettings, fit_rbm

log = logging.getLogger(__name__)

CLASSIFIER_KINDS = ("rbm", "knn", "nb")
DEFAULT_GIBBS_CYCLES = 50
SYNTH_CHUNK_ROUNDS = 30  # cap on generation rounds when hunting minority rows


def majority_vote(predictions) -> list[ClassLabel]:
    """Combine per-model prediction lists record by record.

    predictions is a sequence of equal-length label sequences, one per
    model. The most common label wins; a tie between top counts yields
    INDETERMINATE, which the scoring rules then count as an error.
    """
    preds = [list(p) for p in predictions]
    if not preds:
        raise ValueError("no prediction lists given")
    n = len(preds[0])
    if any(len(p) != n for p in preds):
        raise ValueError("prediction lists differ in length")
    out = []
    for i in range(n):
        counts = {lab: 0 for lab in ClassLabel}
        for p in preds:
            counts[p[i]] += 1
        best = max(counts.values())
        winners = [lab for lab, cnt in counts.items() if cnt == best]
        out.append(winners[0] if len(winners) == 1 else ClassLabel.INDETERMINATE)
    return out


def generate_synthetic(params: RbmParams, method: str, count: int,
                       gibbs_cycles: int = DEFAULT_GIBBS_CYCLES,
                       rng: np.random.Generator | None = None,
                       scale_s: float = 1.0, sweeps: int = 50) -> np.ndarray:
    """Draw `count` full-width records from a trained machine.

    method 'gibbs' runs one independent chain per record from uniform
    random start bits for gibbs_cycles cycles and keeps the visible
    layer. method 'annealer' takes the visible layer of emulator reads.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if rng is None:
        raise ValueError("an explicit rng is required for reproducible generation")
    if method == "gibbs":
        if gibbs_cycles < 0:
            raise ValueError(f"gibbs_cycles must be >= 0, got {gibbs_cycles}")
        v0 = (rng.random((count, params.n_visible)) < 0.5).astype(np.uint8)
        v, _ = gibbs_chain(params, v0, gibbs_cycles, rng)
        return v
    if method == "annealer":
        v, _ = annealer_emulator_sample(params, scale_s, count, sweeps, rng)
        return v
    raise ValueError(f"unknown generation method {method!r}")


def balance_with_synthetic(train: Dataset, synthetic,
                           minority: ClassLabel | None = None) -> Dataset:
    """Append minority-labelled synthetic records until the classes match.

    Synthetic rows are kept only if their label bits decode to the
    minority class; they are appended in order of generation. If the
    filtered pool is too small the shortfall is logged and everything
    available is appended.
    """
    counts = train.class_counts()
    n_ben, n_att = counts[ClassLabel.BENIGN], counts[ClassLabel.ATTACK]
    if minority is None:
        minority = ClassLabel.ATTACK if n_att <= n_ben else ClassLabel.BENIGN
    if minority is ClassLabel.INDETERMINATE:
        raise ValueError("minority must be BENIGN or ATTACK")
    needed = abs(n_ben - n_att)
    if needed == 0:
        log.info("balance: classes already equal, nothing appended")
        return train
    pool = Dataset(np.asarray(synthetic, dtype=np.uint8)) \
        if not isinstance(synthetic, Dataset) else synthetic
    if pool.width != train.width:
        raise ValueError(f"synthetic width {pool.width} != train width {train.width}")
    keep = np.flatnonzero(pool.labels() == minority)
    if keep.shape[0] < needed:
        log.warning("balance: need %d %s records, pool holds only %d; appending all",
                    needed, minority.name, keep.shape[0])
        keep_idx = keep
    else:
        keep_idx = keep[:needed]
    if keep_idx.shape[0] == 0:
        return train
    return Dataset(np.concatenate([train.records, pool.records[keep_idx]]))


def _fit_predict(kind: str, train_ds: Dataset, test_features, trainer: TrainerSettings,
                 seed: int, knn_k: int) -> list[ClassLabel]:
    if kind == "rbm":
        result = fit_rbm(train_ds.records, trainer, seed)
        return rbm_classify_batch(result.params, test_features)
    if kind == "knn":
        return knn_classify_batch(train_ds, test_features, knn_k)
    if kind == "nb":
        return nb_classify_batch(nb_fit(train_ds), test_features)
    raise ValueError(f"unknown classifier kind {kind!r}; pick from {CLASSIFIER_KINDS}")


def _check_two_class_test(test: Dataset) -> np.ndarray:
    truth = test.labels()
    for lab in (ClassLabel.BENIGN, ClassLabel.ATTACK):
        if not (truth == lab).any():
            raise ValueError(f"test set has no {lab.name} records; scores need both classes")
    if (truth == ClassLabel.INDETERMINATE).any():
        raise ValueError("test set contains indeterminate-label records")
    return truth


def _class_accuracies(preds, truth) -> tuple[float, float, float]:
    """(benign recall %, attack recall %, total accuracy %)."""
    cm_b = confusion(preds, truth, ClassLabel.BENIGN)
    cm_a = confusion(preds, truth, ClassLabel.ATTACK)
    return 100.0 * recall(cm_b), 100.0 * recall(cm_a), accuracy(cm_a)


@dataclasses.dataclass(frozen=True)
class Scheme1Row:
    label: str
    records: int | None  # None for summary rows
    benign_accuracy: float
    attack_accuracy: float
    total_accuracy: float


@dataclasses.dataclass(frozen=True)
class Scheme1Report:
    """Per-part accuracies plus the average, spread and vote summary.

    CSV header: part,records,benign_accuracy_pct,attack_accuracy_pct,
    total_accuracy_pct. Summary rows carry an empty records cell.
    """

    parts: tuple[Scheme1Row, ...]
    average: Scheme1Row
    std_dev: Scheme1Row
    vote: Scheme1Row

    def rows(self) -> list[Scheme1Row]:
        return [*self.parts, self.average, self.std_dev, self.vote]

    def to_text(self) -> str:
        lines = [f"{'part':<14}{'records':>9}{'benign%':>10}{'attack%':>10}{'total%':>10}"]
        for row in self.rows():
            rec = "-" if row.records is None else str(row.records)
            lines.append(f"{row.label:<14}{rec:>9}{row.benign_accuracy:>10.2f}"
                         f"{row.attack_accuracy:>10.2f}{row.total_accuracy:>10.2f}")
        return "\n".join(lines)

    def csv_lines(self) -> list[str]:
        lines = ["part,records,benign_accuracy_pct,attack_accuracy_pct,total_accuracy_pct"]
        for row in self.rows():
            rec = "" if row.records is None else str(row.records)
            lines.append(f"{row.label},{rec},{row.benign_accuracy:.6f},"
                         f"{row.attack_accuracy:.6f},{row.total_accuracy:.6f}")
        return lines


def run_scheme1(train: Dataset, test: Dataset, n_parts: int, trainer: TrainerSettings,
                classifier: str = "rbm", seed: int = 0, threads: int = 1,
                knn_k: int = 3) -> Scheme1Report:
    """Undersample into balanced parts, train per part, vote on the test set.

    Part i trains under the derived seed (train stream, i), so the run is
    reproducible from `seed` regardless of thread count: per-part results
    are merged in part order.
    """
    if classifier not in CLASSIFIER_KINDS:
        raise ValueError(f"unknown classifier kind {classifier!r}; pick from {CLASSIFIER_KINDS}")
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    truth = _check_two_class_test(test)
    parts = partition_for_undersampling(train, n_parts)
    feats = test.features().astype(np.float64)

    def work(item):
        idx, part = item
        return _fit_predict(classifier, part, feats, trainer,
                            derive_seed(seed, STREAM_TRAIN, idx), knn_k)

    if threads == 1:
        all_preds = [work(item) for item in enumerate(parts)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            all_preds = list(pool.map(work, enumerate(parts)))

    part_rows = []
    for idx, preds in enumerate(all_preds):
        ben, att, tot = _class_accuracies(preds, truth)
        part_rows.append(Scheme1Row(f"part-{idx + 1}", len(parts[idx]), ben, att, tot))
    cols = np.array([[r.benign_accuracy, r.attack_accuracy, r.total_accuracy]
                     for r in part_rows])
    avg = Scheme1Row("average", None, *cols.mean(axis=0))
    std = Scheme1Row("std-dev", None, *cols.std(axis=0, ddof=1))
    ben, att, tot = _class_accuracies(majority_vote(all_preds), truth)
    return Scheme1Report(tuple(part_rows), avg, std, Scheme1Row("majority-vote", None, ben, att, tot))


@dataclasses.dataclass(frozen=True)
class Scheme2Row:
    classifier: str
    variant: str
    attack_precision: float | None
    attack_recall: float | None
    attack_f1: float | None
    benign_precision: float | None
    benign_recall: float | None
    benign_f1: float | None
    total_accuracy: float


@dataclasses.dataclass(frozen=True)
class Scheme2Report:
    """Balanced-versus-imbalanced scores per classifier.

    CSV header: classifier,variant,attack_precision,attack_recall,
    attack_f1,benign_precision,benign_recall,benign_f1,
    total_accuracy_pct. Undefined metrics render as 'undef'.
    """

    rows: tuple[Scheme2Row, ...]
    synthetic_added: int
    shortfall: int

    @staticmethod
    def _cell(value, width=10, decimals=4):
        return f"{'undef':>{width}}" if value is None else f"{value:>{width}.{decimals}f}"

    def to_text(self) -> str:
        head = (f"{'classifier':<12}{'variant':<20}{'prec-att':>10}{'rec-att':>10}"
                f"{'f1-att':>10}{'prec-ben':>10}{'rec-ben':>10}{'f1-ben':>10}{'total%':>9}")
        lines = [head]
        for r in self.rows:
            lines.append(f"{r.classifier:<12}{r.variant:<20}"
                         + self._cell(r.attack_precision) + self._cell(r.attack_recall)
                         + self._cell(r.attack_f1) + self._cell(r.benign_precision)
                         + self._cell(r.benign_recall) + self._cell(r.benign_f1)
                         + f"{r.total_accuracy:>9.2f}")
        lines.append(f"synthetic records appended: {self.synthetic_added}"
                     + (f" (short by {self.shortfall})" if self.shortfall else ""))
        return "\n".join(lines)

    def csv_lines(self) -> list[str]:
        def cell(v):
            return "undef" if v is None else f"{v:.6f}"

        lines = ["classifier,variant,attack_precision,attack_recall,attack_f1,"
                 "benign_precision,benign_recall,benign_f1,total_accuracy_pct"]
        for r in self.rows:
            lines.append(",".join([r.classifier, r.variant,
                                   cell(r.attack_precision), cell(r.attack_recall),
                                   cell(r.attack_f1), cell(r.benign_precision),
                                   cell(r.benign_recall), cell(r.benign_f1),
                                   f"{r.total_accuracy:.6f}"]))
        return lines


def _score_variant(kind: str, variant: str, train_ds: Dataset, feats, truth,
                   trainer: TrainerSettings, seed: int, knn_k: int) -> Scheme2Row:
    preds = _fit_predict(kind, train_ds, feats, trainer, seed, knn_k)
    vals = {}
    for lab, prefix in ((ClassLabel.ATTACK, "attack"), (ClassLabel.BENIGN, "benign")):
        cm = confusion(preds, truth, lab)
        for name, fn in (("precision", precision), ("recall", recall), ("f1", f1)):
            try:
                vals[f"{prefix}_{name}"] = fn(cm)
            except UndefinedMetricError:
                vals[f"{prefix}_{name}"] = None
    total = accuracy(confusion(preds, truth, ClassLabel.ATTACK))
    return Scheme2Row(kind, variant, vals["attack_precision"], vals["attack_recall"],
                      vals["attack_f1"], vals["benign_precision"], vals["benign_recall"],
                      vals["benign_f1"], total)


def run_scheme2(train: Dataset, test: Dataset, trainer: TrainerSettings,
                method: str = "gibbs", classifiers=CLASSIFIER_KINDS,
                gibbs_cycles: int = DEFAULT_GIBBS_CYCLES, synth_count: int | None = None,
                seed: int = 0, knn_k: int = 3) -> Scheme2Report:
    """Equalise the classes with machine-generated records, then compare.

    A machine is trained on the imbalanced table, synthetic records are
    drawn from it (synth_count per round when given, otherwise twice the
    shortfall, for up to SYNTH_CHUNK_ROUNDS rounds or until enough
    minority-labelled rows exist), and every requested classifier is
    scored on the test set twice: trained on the balanced table and on
    the original one.
    """
    classifiers = tuple(classifiers)
    if not classifiers:
        raise ValueError("no classifier kinds requested")
    for kind in classifiers:
        if kind not in CLASSIFIER_KINDS:
            raise ValueError(f"unknown classifier kind {kind!r}; pick from {CLASSIFIER_KINDS}")
    truth = _check_two_class_test(test)
    counts = train.class_counts()
    n_ben, n_att = counts[ClassLabel.BENIGN], counts[ClassLabel.ATTACK]
    minority = ClassLabel.ATTACK if n_att <= n_ben else ClassLabel.BENIGN
    needed = abs(n_ben - n_att)

    generator = fit_rbm(train.records, trainer, derive_seed(seed, STREAM_TRAIN))
    rng = spawn_rng(seed, STREAM_GENERATE)
    pool_rows = []
    have = 0
    chunk = synth_count if synth_count is not None else max(2 * needed, 1000)
    for _ in range(SYNTH_CHUNK_ROUNDS):
        if needed == 0 or have >= needed:
            break
        batch = generate_synthetic(generator.params, method, chunk, gibbs_cycles,
                                   rng, trainer.scale_s, trainer.sweeps)
        pool_rows.append(batch)
        have += int((Dataset(batch).labels() == minority).sum())
        if synth_count is not None:  # caller fixed the budget: one round only
            break
    pool = np.concatenate(pool_rows) if pool_rows else np.empty((0, train.width), np.uint8)
    balanced = balance_with_synthetic(train, pool, minority)
    added = len(balanced) - len(train)
    shortfall = needed - added

    feats = test.features().astype(np.float64)
    variant = f"balanced-{method}"
    rows = []
    for kind in classifiers:
        rows.append(_score_variant(kind, variant, balanced, feats, truth, trainer,
                                   derive_seed(seed, STREAM_TRAIN, 1), knn_k))
        rows.append(_score_variant(kind, "imbalanced", train, feats, truth, trainer,
                                   derive_seed(seed, STREAM_TRAIN, 2), knn_k))
    return Scheme2Report(tuple(rows), added, max(0, shortfall))


def save_report(report, path_prefix) -> tuple[str, str]:
    """Write PREFIX.txt and PREFIX.csv for either report type."""
    txt_path, csv_path = f"{path_prefix}.txt", f"{path_prefix}.csv"
    with open(txt_path, "w", encoding="ascii") as fh:
        fh.write(report.to_text() + "\n")
    with open(csv_path, "w", encoding="ascii") as fh:
        fh.write("\n".join(report.csv_lines()) + "\n")
    return txt_path, csv_path
