"""Command-line workbench.

Subcommands: fixture, train, generate, evaluate, scheme1, scheme2.
Exit codes: 0 success, 2 bad arguments, 3 unreadable or malformed data,
4 training failure (divergence). Artifacts written under a fixed seed
are byte-stable across runs; wall-clock timings appear only in log
lines, bracketed at the end of each epoch line.
"""

from __future__ import annotations

import argparse
import sys

from . import balance, classify, data, fixtures, metrics, model, training
from .errors import (CapacityError, DataFormatError, DimensionError, EmbeddingError,
                     TrainingError)
from .seeding import STREAM_GENERATE, STREAM_SPLIT, spawn_rng


def positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def nonnegative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return value


def positive_float(text: str) -> float:
    value = float(text)
    if not value > 0 or value != value or value == float("inf"):
        raise argparse.ArgumentTypeError(f"must be a positive real, got {text}")
    return value


def unit_fraction(text: str) -> float:
    value = float(text)
    if not 0.0 < value < 0.5:
        raise argparse.ArgumentTypeError(f"must lie in (0, 0.5), got {text}")
    return value


def _add_trainer_args(p: argparse.ArgumentParser, hidden_required: bool = True) -> None:
    p.add_argument("--hidden", type=positive_int, required=hidden_required,
                   help="number of hidden units")
    p.add_argument("--epochs", type=nonnegative_int, default=30, help="training epochs")
    p.add_argument("--lr", type=positive_float, default=0.1, help="learning rate")
    p.add_argument("--batch", type=positive_int, default=32, help="minibatch size cap")
    p.add_argument("--sampler", choices=("cd", "exact", "annealer"), default="cd",
                   help="model-term source (annealer = software emulator)")
    p.add_argument("--cd-k", type=positive_int, default=1,
                   help="alternations per contrastive-divergence step")
    p.add_argument("--scale-s", type=positive_float, default=1.0,
                   help="sampling temperature for the annealer emulator")
    p.add_argument("--reads", type=positive_int, default=None,
                   help="annealer reads per update (default: the batch size)")
    p.add_argument("--sweeps", type=positive_int, default=50,
                   help="annealer temperature-ramp sweeps per read")
    p.add_argument("--weight-scale", type=positive_float, default=0.01,
                   help="std-dev of the initial weights")


def _trainer_from_args(args) -> training.TrainerSettings:
    return training.TrainerSettings(
        n_hidden=args.hidden, learning_rate=args.lr, epochs=args.epochs,
        batch_size=args.batch, sampler=args.sampler, cd_k=args.cd_k,
        scale_s=args.scale_s, num_reads=args.reads, sweeps=args.sweeps,
        weight_scale=args.weight_scale)


def _load(args) -> data.Dataset:
    return data.load_binary_table(args.data, skip_header=args.skip_header)


def _split(ds: data.Dataset, args):
    rng = spawn_rng(args.seed, STREAM_SPLIT)
    return data.split_train_test(ds, args.test_benign, args.test_attack, rng)


def cmd_fixture(args) -> int:
    ds = fixtures.imbalanced_fixture(args.records, args.minority_fraction,
                                     args.flip_prob, args.features, args.seed)
    data.save_binary_table(ds, args.out)
    counts = ds.class_counts()
    print(f"wrote {len(ds)} records ({counts[data.ClassLabel.BENIGN]} benign, "
          f"{counts[data.ClassLabel.ATTACK]} attack) to {args.out}")
    return 0


def cmd_train(args) -> int:
    ds = _load(args)
    result = training.fit_rbm(ds.records, _trainer_from_args(args), args.seed)
    for st in result.history:
        ll = "n/a" if st.log_likelihood is None else f"{st.log_likelihood:.6f}"
        print(f"epoch {st.epoch:>4}  recon-err {st.reconstruction_error:.6f}  "
              f"loglik {ll}  [{st.seconds:.3f}s]")
    model.save_model(result.params, args.out)
    print(f"wrote model ({result.params.n_visible} visible, "
          f"{result.params.n_hidden} hidden) to {args.out}", file=sys.stderr)
    return 0


def cmd_generate(args) -> int:
    params = model.load_model(args.model)
    rng = spawn_rng(args.seed, STREAM_GENERATE)
    records = balance.generate_synthetic(params, args.method, args.count,
                                         args.cycles, rng, args.scale_s, args.sweeps)
    data.save_binary_table(records, args.out)
    print(f"wrote {args.count} generated records to {args.out}")
    return 0


def cmd_evaluate(args) -> int:
    params = model.load_model(args.model)
    ds = _load(args)
    labels = ds.labels()
    keep = [i for i, lab in enumerate(labels) if lab is not data.ClassLabel.INDETERMINATE]
    if len(keep) < len(labels):
        print(f"ignoring {len(labels) - len(keep)} indeterminate-label records",
              file=sys.stderr)
    if not keep:
        raise DataFormatError(f"{args.data}: no benign or attack records to score")
    ds = ds.subset(keep)
    truth = list(ds.labels())
    preds = classify.rbm_classify_batch(params, ds.features().astype(float))
    cm_a = metrics.confusion(preds, truth, data.ClassLabel.ATTACK)
    print(f"records {len(ds)}  total-accuracy {metrics.accuracy(cm_a):.2f}%")
    for lab, cm in ((data.ClassLabel.ATTACK, cm_a),
                    (data.ClassLabel.BENIGN,
                     metrics.confusion(preds, truth, data.ClassLabel.BENIGN))):
        def cell(fn):
            try:
                return f"{fn(cm):.4f}"
            except Exception:
                return "undef"
        print(f"{lab.name.lower():<7} precision {cell(metrics.precision)}  "
              f"recall {cell(metrics.recall)}  f1 {cell(metrics.f1)}")
    return 0


def cmd_scheme1(args) -> int:
    train_ds, test_ds = _split(_load(args), args)
    report = balance.run_scheme1(train_ds, test_ds, args.parts,
                                 _trainer_from_args(args), args.classifier,
                                 args.seed, args.threads, args.knn_k)
    print(report.to_text())
    txt, csv = balance.save_report(report, args.out)
    print(f"wrote {txt} and {csv}", file=sys.stderr)
    return 0


def cmd_scheme2(args) -> int:
    train_ds, test_ds = _split(_load(args), args)
    kinds = tuple(k.strip() for k in args.classifiers.split(",") if k.strip())
    report = balance.run_scheme2(train_ds, test_ds, _trainer_from_args(args),
                                 args.method, kinds, args.cycles, args.synth_count,
                                 args.seed, args.knn_k)
    print(report.to_text())
    txt, csv = balance.save_report(report, args.out)
    print(f"wrote {txt} and {csv}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rbmlab",
        description="train, sample and evaluate Bernoulli restricted Boltzmann "
                    "machines; balance labelled bit tables by undersampling with "
                    "voting or by synthetic oversampling")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fixture", help="write a bundled imbalanced dataset")
    p.add_argument("--records", type=positive_int, default=4000)
    p.add_argument("--minority-fraction", type=unit_fraction,
                   default=fixtures.DEFAULT_MINORITY_FRACTION)
    p.add_argument("--flip-prob", type=float, default=fixtures.DEFAULT_FLIP_PROB)
    p.add_argument("--features", type=positive_int, default=fixtures.DEFAULT_FEATURE_WIDTH)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fixture)

    p = sub.add_parser("train", help="train a machine on full-width records")
    p.add_argument("--data", required=True)
    p.add_argument("--skip-header", action="store_true")
    _add_trainer_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="model file to write")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("generate", help="sample records from a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--count", type=positive_int, required=True)
    p.add_argument("--method", choices=("gibbs", "annealer"), default="gibbs")
    p.add_argument("--cycles", type=nonnegative_int, default=balance.DEFAULT_GIBBS_CYCLES,
                   help="Gibbs cycles per record (gibbs method)")
    p.add_argument("--scale-s", type=positive_float, default=1.0)
    p.add_argument("--sweeps", type=positive_int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("evaluate", help="score a saved model as a classifier")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--skip-header", action="store_true")
    p.set_defaults(func=cmd_evaluate)

    for name, fn in (("scheme1", cmd_scheme1), ("scheme2", cmd_scheme2)):
        p = sub.add_parser(name, help=("undersample into voted parts" if name == "scheme1"
                                       else "oversample with generated records"))
        p.add_argument("--data", required=True)
        p.add_argument("--skip-header", action="store_true")
        p.add_argument("--test-benign", type=positive_int, required=True,
                       help="benign records held out for scoring")
        p.add_argument("--test-attack", type=positive_int, required=True,
                       help="attack records held out for scoring")
        _add_trainer_args(p)
        p.add_argument("--knn-k", type=positive_int, default=3)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", required=True, help="report path prefix")
        if name == "scheme1":
            p.add_argument("--parts", type=positive_int, default=5)
            p.add_argument("--classifier", choices=balance.CLASSIFIER_KINDS, default="rbm")
            p.add_argument("--threads", type=positive_int, default=1,
                           help="worker cap for per-part training")
        else:
            p.add_argument("--classifiers", default="rbm,knn,nb",
                           help="comma-separated kinds to compare")
            p.add_argument("--method", choices=("gibbs", "annealer"), default="gibbs")
            p.add_argument("--cycles", type=nonnegative_int,
                           default=balance.DEFAULT_GIBBS_CYCLES)
            p.add_argument("--synth-count", type=positive_int, default=None,
                           help="fixed generation budget (default: adaptive)")
        p.set_defaults(func=fn)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (DataFormatError, FileNotFoundError, IsADirectoryError, PermissionError,
            DimensionError, CapacityError, EmbeddingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except TrainingError as exc:
        print(f"error: training failed: {exc}", file=sys.stderr)
        return 4
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
