"""Record tables, label decoding, splits and balanced partitions."""

import logging

import numpy as np
import pytest

from rbmlab.data import (LABEL_BITS, LABEL_WIDTH, ClassLabel, Dataset, decode_label,
                         decode_labels, dedupe, load_binary_table,
                         partition_for_undersampling, save_binary_table,
                         split_train_test)
from rbmlab.errors import DataFormatError, DimensionError
from rbmlab.seeding import STREAM_SPLIT, spawn_rng


def labelled(feature_rows, label):
    """Append the class bit pair to each feature row."""
    rows = np.asarray(feature_rows, dtype=np.uint8)
    tail = np.tile(np.array(LABEL_BITS[label], dtype=np.uint8), (rows.shape[0], 1))
    return np.hstack([rows, tail])


def toy_dataset(n_benign, n_attack, width=6, seed=0):
    rng = np.random.default_rng(seed)
    ben = labelled((rng.random((n_benign, width - 2)) < 0.5), ClassLabel.BENIGN)
    att = labelled((rng.random((n_attack, width - 2)) < 0.5), ClassLabel.ATTACK)
    return Dataset(np.vstack([ben, att]))


def distinct_dataset(n_benign, n_attack):
    """Rows whose features encode their index, so every row is unique."""
    total = n_benign + n_attack
    bits = max(total - 1, 1).bit_length()
    idx = np.arange(total)
    feats = (idx[:, None] >> np.arange(bits - 1, -1, -1)) & 1
    rows = np.vstack([labelled(feats[:n_benign], ClassLabel.BENIGN),
                      labelled(feats[n_benign:], ClassLabel.ATTACK)])
    return Dataset(rows)


# ----------------------------------------------------------------- labels

def test_decode_label_all_four_codes():
    assert decode_label([1, 1, 0, 1]) is ClassLabel.BENIGN
    assert decode_label([1, 1, 1, 0]) is ClassLabel.ATTACK
    assert decode_label([1, 1, 0, 0]) is ClassLabel.INDETERMINATE
    assert decode_label([1, 1, 1, 1]) is ClassLabel.INDETERMINATE


def test_decode_label_needs_room_for_features():
    with pytest.raises(DimensionError):
        decode_label([0, 1])
    with pytest.raises(DimensionError):
        decode_label([[1, 1, 0, 1]])


def test_decode_labels_matches_scalar_decode():
    rows = np.array([[1, 0, 0, 1], [0, 0, 1, 0], [1, 1, 0, 0], [0, 1, 1, 1]])
    got = decode_labels(rows)
    assert list(got) == [decode_label(r) for r in rows]


def test_label_ordering_benign_first():
    # tie-break rules depend on this ordering
    assert ClassLabel.BENIGN.value < ClassLabel.ATTACK.value < ClassLabel.INDETERMINATE.value
    assert LABEL_BITS[ClassLabel.BENIGN] == (0, 1)
    assert LABEL_BITS[ClassLabel.ATTACK] == (1, 0)
    assert LABEL_WIDTH == 2


# ---------------------------------------------------------------- dataset

def test_dataset_accessors():
    ds = toy_dataset(3, 2, width=7)
    assert len(ds) == 5
    assert ds.width == 7 and ds.feature_width == 5
    assert ds.features().shape == (5, 5)
    counts = ds.class_counts()
    assert counts[ClassLabel.BENIGN] == 3
    assert counts[ClassLabel.ATTACK] == 2
    assert counts[ClassLabel.INDETERMINATE] == 0
    sub = ds.subset([4, 0])
    np.testing.assert_array_equal(sub.records[0], ds.records[4])


def test_dataset_validation():
    with pytest.raises(DimensionError):
        Dataset(np.zeros(4))
    with pytest.raises(DimensionError):
        Dataset(np.zeros((3, 2)))  # no room for features
    with pytest.raises(ValueError):
        Dataset(np.full((2, 4), 2))


def test_dataset_records_are_write_protected():
    ds = toy_dataset(2, 2)
    with pytest.raises(ValueError):
        ds.records[0, 0] = 1


# ------------------------------------------------------------------- files

def test_table_roundtrip(tmp_path):
    ds = toy_dataset(4, 3, width=6, seed=2)
    path = tmp_path / "t.csv"
    save_binary_table(ds, path)
    again = load_binary_table(path)
    np.testing.assert_array_equal(again.records, ds.records)
    # exact file layout: one comma-separated bit row per record
    first = path.read_text().splitlines()[0]
    assert first == ",".join(str(int(x)) for x in ds.records[0])


def test_load_skips_header_when_asked(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("a,b,c,d\n1,0,0,1\n0,1,1,0\n")
    ds = load_binary_table(path, skip_header=True)
    assert len(ds) == 2
    with pytest.raises(DataFormatError, match="line 1, column 1"):
        load_binary_table(path)


def test_load_errors_name_line_and_column(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1,0,0,1\n1,0,2,1\n")
    with pytest.raises(DataFormatError, match="line 2, column 3"):
        load_binary_table(path)
    path.write_text("1,0,0,1\n1,0\n")
    with pytest.raises(DataFormatError, match="line 2"):
        load_binary_table(path)
    path.write_text("\n\n")
    with pytest.raises(DataFormatError, match="no data rows"):
        load_binary_table(path)
    path.write_text("0,1\n1,0\n")
    with pytest.raises(DataFormatError):
        load_binary_table(path)


def test_load_ignores_blank_lines_and_spaces(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("1, 0, 0, 1\n\n0,1,1,0\n\n")
    ds = load_binary_table(path)
    assert len(ds) == 2


# ------------------------------------------------------------------ dedupe

def test_dedupe_keeps_first_occurrence_order():
    rows = np.array([[1, 0, 0, 1],
                     [0, 1, 0, 1],
                     [1, 0, 0, 1],   # dup of row 0
                     [1, 1, 0, 1],
                     [0, 1, 0, 1]])  # dup of row 1
    out = dedupe(Dataset(rows))
    np.testing.assert_array_equal(out.records, rows[[0, 1, 3]])


def test_dedupe_logs_removed_count(caplog):
    rows = np.array([[1, 0, 0, 1], [1, 0, 0, 1], [1, 0, 0, 1]])
    with caplog.at_level(logging.INFO, logger="rbmlab.data"):
        out = dedupe(Dataset(rows))
    assert len(out) == 1
    assert "removed 2 duplicate" in caplog.text


def test_dedupe_no_duplicates_is_identity():
    ds = distinct_dataset(5, 3)
    out = dedupe(ds)
    np.testing.assert_array_equal(out.records, ds.records)


# ------------------------------------------------------------------- split

def test_split_counts_and_disjointness():
    ds = toy_dataset(40, 25, width=8, seed=5)
    train, test = split_train_test(ds, 10, 5, spawn_rng(0, STREAM_SPLIT))
    assert test.class_counts()[ClassLabel.BENIGN] == 10
    assert test.class_counts()[ClassLabel.ATTACK] == 5
    assert train.class_counts()[ClassLabel.BENIGN] == 30
    assert train.class_counts()[ClassLabel.ATTACK] == 20
    assert len(train) + len(test) == len(ds)
    # no record row index is shared: rebuild index sets via row matching
    all_rows = {tuple(r) for r in ds.records}
    assert {tuple(r) for r in train.records} | {tuple(r) for r in test.records} <= all_rows


def test_split_is_seed_deterministic():
    ds = toy_dataset(30, 20, seed=6)
    a_train, a_test = split_train_test(ds, 8, 4, spawn_rng(3, STREAM_SPLIT))
    b_train, b_test = split_train_test(ds, 8, 4, spawn_rng(3, STREAM_SPLIT))
    np.testing.assert_array_equal(a_test.records, b_test.records)
    np.testing.assert_array_equal(a_train.records, b_train.records)
    c_test = split_train_test(ds, 8, 4, spawn_rng(4, STREAM_SPLIT))[1]
    assert not np.array_equal(a_test.records, c_test.records)


def test_split_preserves_row_order():
    ds = distinct_dataset(12, 8)
    train, test = split_train_test(ds, 3, 3, spawn_rng(1, STREAM_SPLIT))
    row_pos = {tuple(r): i for i, r in enumerate(ds.records)}
    for part in (train, test):
        positions = [row_pos[tuple(r)] for r in part.records]
        assert positions == sorted(positions)


def test_split_excludes_indeterminate_with_warning(caplog):
    ds = toy_dataset(10, 6, seed=8)
    bad = np.array([[1, 0, 1, 0, 0, 0], [1, 0, 1, 0, 1, 1]], dtype=np.uint8)
    mixed = Dataset(np.vstack([ds.records, bad]))
    with caplog.at_level(logging.WARNING, logger="rbmlab.data"):
        train, test = split_train_test(mixed, 2, 2, spawn_rng(2, STREAM_SPLIT))
    assert "2 indeterminate" in caplog.text
    for part in (train, test):
        assert part.class_counts()[ClassLabel.INDETERMINATE] == 0
    assert len(train) + len(test) == len(mixed) - 2


def test_split_rejects_overdraw():
    ds = toy_dataset(5, 5, seed=9)
    with pytest.raises(ValueError, match="only 5"):
        split_train_test(ds, 6, 2, spawn_rng(0, STREAM_SPLIT))
    with pytest.raises(ValueError):
        split_train_test(ds, 2, -1, spawn_rng(0, STREAM_SPLIT))


# --------------------------------------------------------------- partition

def test_partition_shapes_on_large_imbalance():
    # 18000 majority over 3450 minority in 5 parts: four parts of 6900 and
    # one of 8400 whose minority half is topped up by 750 cycled records
    ds = toy_dataset(18000, 3450, width=6, seed=10)
    parts = partition_for_undersampling(ds, 5)
    assert [len(p) for p in parts] == [6900, 6900, 6900, 6900, 8400]
    for p in parts:
        counts = p.class_counts()
        assert counts[ClassLabel.BENIGN] == counts[ClassLabel.ATTACK]


def test_partition_covers_majority_exactly_once():
    ds = toy_dataset(100, 30, seed=11)
    parts = partition_for_undersampling(ds, 3)
    maj_rows = [tuple(r) for p in parts for r in p.records
                if decode_label(r) is ClassLabel.BENIGN]
    expected = [tuple(r) for r in ds.records if decode_label(r) is ClassLabel.BENIGN]
    assert sorted(maj_rows) == sorted(expected)


def test_partition_minority_full_copy_plus_cycle():
    ds = toy_dataset(10, 4, seed=12)
    parts = partition_for_undersampling(ds, 2)
    # part 0: 4 majority + 4 minority; part 1: 6 majority + 4 + 2 cycled
    assert [len(p) for p in parts] == [8, 12]
    min_rows = [tuple(r) for r in ds.records if decode_label(r) is ClassLabel.ATTACK]
    last = [tuple(r) for r in parts[1].records if decode_label(r) is ClassLabel.ATTACK]
    assert last == min_rows + min_rows[:2]  # cycling restarts at the first record


def test_partition_attack_can_be_majority():
    ds = toy_dataset(4, 10, seed=13)
    parts = partition_for_undersampling(ds, 2)
    for p in parts:
        counts = p.class_counts()
        assert counts[ClassLabel.BENIGN] == counts[ClassLabel.ATTACK]


def test_partition_guards():
    ds = toy_dataset(10, 4, seed=14)
    with pytest.raises(ValueError):
        partition_for_undersampling(ds, 1)
    # 3 parts of >= 4 majority each needs at least 9 majority; 10 works,
    # but 4 parts would need 13
    partition_for_undersampling(ds, 3)
    with pytest.raises(ValueError, match="fewer parts"):
        partition_for_undersampling(ds, 4)
    only_ben = Dataset(labelled(np.zeros((4, 4), dtype=np.uint8), ClassLabel.BENIGN))
    with pytest.raises(ValueError):
        partition_for_undersampling(only_ben, 2)
    with_ind = Dataset(np.vstack([ds.records,
                                  np.array([[0, 0, 0, 0, 1, 1]], dtype=np.uint8)]))
    with pytest.raises(ValueError, match="indeterminate"):
        partition_for_undersampling(with_ind, 2)
