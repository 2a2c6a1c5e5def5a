"""Binary record tables with a two-bit class code in the last columns.

A record is a row of 0/1 values; the final two bits encode the class:
01 benign, 10 attack, 00 and 11 indeterminate. Everything upstream of
the classifiers treats records as opaque bit rows plus that decode rule.
"""

from __future__ import annotations

import dataclasses
import enum
import logging

import numpy as np

from .errors import DataFormatError, DimensionError

log = logging.getLogger(__name__)

LABEL_WIDTH = 2


class ClassLabel(enum.Enum):
    # benign sorts before attack; tie rules rely on this ordinal
    BENIGN = 0
    ATTACK = 1
    INDETERMINATE = 2


LABEL_BITS = {ClassLabel.BENIGN: (0, 1), ClassLabel.ATTACK: (1, 0)}


def decode_label(record) -> ClassLabel:
    """Class of one record from its trailing bit pair."""
    rec = np.asarray(record)
    if rec.ndim != 1 or rec.shape[0] <= LABEL_WIDTH:
        raise DimensionError(
            f"a record needs at least {LABEL_WIDTH + 1} bits, got shape {rec.shape}")
    pair = (int(rec[-2]), int(rec[-1]))
    if pair == (0, 1):
        return ClassLabel.BENIGN
    if pair == (1, 0):
        return ClassLabel.ATTACK
    return ClassLabel.INDETERMINATE


def decode_labels(records) -> np.ndarray:
    """Vectorised decode_label over rows; returns an object array of labels."""
    arr = np.asarray(records)
    code = 2 * arr[:, -2].astype(int) + arr[:, -1].astype(int)
    out = np.empty(arr.shape[0], dtype=object)
    out[code == 1] = ClassLabel.BENIGN
    out[code == 2] = ClassLabel.ATTACK
    out[(code == 0) | (code == 3)] = ClassLabel.INDETERMINATE
    return out


@dataclasses.dataclass(frozen=True)
class Dataset:
    """An immutable (n_records, width) uint8 matrix of 0/1 values."""

    records: np.ndarray

    def __post_init__(self):
        arr = np.array(self.records, dtype=np.uint8)
        if arr.ndim != 2:
            raise DimensionError(f"records must be 2-d, got ndim={arr.ndim}")
        if arr.shape[1] <= LABEL_WIDTH:
            raise DimensionError(
                f"records need more than {LABEL_WIDTH} columns, got {arr.shape[1]}")
        src = np.asarray(self.records)
        if src.size and not np.isin(src, (0, 1)).all():
            bad = src[~np.isin(src, (0, 1))].flat[0]
            raise ValueError(f"records may contain only 0 and 1, found {bad!r}")
        arr.setflags(write=False)
        object.__setattr__(self, "records", arr)

    def __len__(self) -> int:
        return self.records.shape[0]

    @property
    def width(self) -> int:
        return self.records.shape[1]

    @property
    def feature_width(self) -> int:
        return self.width - LABEL_WIDTH

    def features(self) -> np.ndarray:
        return self.records[:, :-LABEL_WIDTH]

    def labels(self) -> np.ndarray:
        return decode_labels(self.records)

    def class_counts(self) -> dict[ClassLabel, int]:
        labels = self.labels()
        return {lab: int((labels == lab).sum()) for lab in ClassLabel}

    def subset(self, indices) -> "Dataset":
        return Dataset(self.records[np.asarray(indices, dtype=np.intp)])


def load_binary_table(path, skip_header: bool = False) -> Dataset:
    """Parse a comma-separated table of 0/1 values into a Dataset.

    Every cell must be the single character 0 or 1 and every row the same
    width; violations raise DataFormatError naming the line and column.
    """
    rows = []
    width = None
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            if lineno == 1 and skip_header:
                continue
            line = line.strip()
            if not line:
                continue
            cells = [c.strip() for c in line.split(",")]
            for col, cell in enumerate(cells, start=1):
                if cell not in ("0", "1"):
                    raise DataFormatError(
                        f"{path}: line {lineno}, column {col}: "
                        f"expected 0 or 1, found {cell!r}")
            if width is None:
                width = len(cells)
            elif len(cells) != width:
                raise DataFormatError(
                    f"{path}: line {lineno}: row has {len(cells)} values, "
                    f"expected {width}")
            rows.append(cells)
    if not rows:
        raise DataFormatError(f"{path}: no data rows")
    if width <= LABEL_WIDTH:
        raise DataFormatError(
            f"{path}: rows need more than {LABEL_WIDTH} columns, got {width}")
    return Dataset(np.array(rows, dtype=np.uint8))


def save_binary_table(dataset, path) -> None:
    """Write records as comma-separated 0/1 rows (inverse of load)."""
    records = dataset.records if isinstance(dataset, Dataset) else np.asarray(dataset)
    with open(path, "w", encoding="ascii") as fh:
        for row in records:
            fh.write(",".join(str(int(x)) for x in row) + "\n")


def dedupe(dataset: Dataset) -> Dataset:
    """Drop exact duplicate records, keeping first occurrences in order."""
    _, first = np.unique(dataset.records, axis=0, return_index=True)
    keep = np.sort(first)
    removed = len(dataset) - keep.shape[0]
    if removed:
        log.info("dedupe: removed %d duplicate records (%d left)", removed, keep.shape[0])
    return dataset.subset(keep)


def _class_indices(dataset: Dataset, drop_warn: str) -> dict[ClassLabel, np.ndarray]:
    labels = dataset.labels()
    out = {lab: np.flatnonzero(labels == lab)
           for lab in (ClassLabel.BENIGN, ClassLabel.ATTACK)}
    n_ind = int((labels == ClassLabel.INDETERMINATE).sum())
    if n_ind:
        log.warning("%s: excluding %d indeterminate-label records", drop_warn, n_ind)
    return out


def split_train_test(dataset: Dataset, test_benign: int, test_attack: int,
                     rng: np.random.Generator) -> tuple[Dataset, Dataset]:
    """Draw a stratified test set without replacement; rest is training.

    Exactly test_benign benign and test_attack attack records are drawn.
    Indeterminate records are excluded from both sides with a logged
    count. Row order follows the original table.
    """
    by_class = _class_indices(dataset, "split_train_test")
    want = {ClassLabel.BENIGN: test_benign, ClassLabel.ATTACK: test_attack}
    test_idx = []
    train_idx = []
    for lab in (ClassLabel.BENIGN, ClassLabel.ATTACK):
        pool = by_class[lab]
        if want[lab] < 0:
            raise ValueError(f"test count for {lab.name} must be >= 0")
        if want[lab] > pool.shape[0]:
            raise ValueError(
                f"asked for {want[lab]} {lab.name} test records, dataset has "
                f"only {pool.shape[0]}")
        chosen = rng.choice(pool, size=want[lab], replace=False)
        mask = np.zeros(pool.shape[0], dtype=bool)
        mask[np.searchsorted(pool, np.sort(chosen))] = True
        test_idx.append(np.sort(chosen))
        train_idx.append(pool[~mask])
    train = dataset.subset(np.sort(np.concatenate(train_idx)))
    test = dataset.subset(np.sort(np.concatenate(test_idx)))
    return train, test


def partition_for_undersampling(train: Dataset, n_parts: int) -> list[Dataset]:
    """Split the majority class across n_parts balanced sub-datasets.

    The first n_parts-1 parts take one minority-sized slice of majority
    records each; the last part takes the remaining majority records and
    its minority copy is topped up by cycling minority records from the
    start, so every part comes out exactly class-balanced. Each part
    contains the full minority set at least once.
    """
    if n_parts < 2:
        raise ValueError(f"n_parts must be >= 2, got {n_parts}")
    counts = train.class_counts()
    if counts[ClassLabel.INDETERMINATE]:
        raise ValueError("partitioning requires a train set without indeterminate records")
    n_ben, n_att = counts[ClassLabel.BENIGN], counts[ClassLabel.ATTACK]
    if n_ben == 0 or n_att == 0:
        raise ValueError("both classes must be present to partition")
    majority = ClassLabel.BENIGN if n_ben >= n_att else ClassLabel.ATTACK
    minority = ClassLabel.ATTACK if majority is ClassLabel.BENIGN else ClassLabel.BENIGN
    labels = train.labels()
    maj_idx = np.flatnonzero(labels == majority)
    min_idx = np.flatnonzero(labels == minority)
    n_maj, n_min = maj_idx.shape[0], min_idx.shape[0]
    if n_maj - (n_parts - 1) * n_min < 1:
        raise ValueError(
            f"cannot cut {n_maj} majority records into {n_parts} parts of at "
            f"least {n_min} each; use fewer parts")
    parts = []
    for p in range(n_parts):
        if p < n_parts - 1:
            maj_slice = maj_idx[p * n_min:(p + 1) * n_min]
        else:
            maj_slice = maj_idx[(n_parts - 1) * n_min:]
        rows = [train.records[maj_slice], train.records[min_idx]]
        extra = maj_slice.shape[0] - n_min  # top up by cycling the minority set
        if extra > 0:
            cycled = min_idx[np.arange(extra) % n_min]
            rows.append(train.records[cycled])
        parts.append(Dataset(np.concatenate(rows)))
    return parts
