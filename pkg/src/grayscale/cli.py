"""Command line entry point: ``grayscale-erc <command> [options]``.

Commands: build-labels, train-teacher, train-student, eval, alpha-sweep.
Options come from ``--config`` (flat ``key = value`` file) and are
overridden by flags. Exit status is 0 on success, 2 on configuration
errors and 3 on data or schema errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

from grayscale import pipeline
from grayscale.config import RunConfig, load_config
from grayscale.errors import ConfigurationError, DataError, InputError
from grayscale.labels import LabelMethod, read_labels, write_labels
from grayscale.metrics import excluded_indices, write_report
from grayscale.model import load_params, read_logits, save_params, write_logits
from grayscale.resources import resolve_path

logger = logging.getLogger("grayscale")

EXIT_CONFIG = 2
EXIT_DATA = 3


def _common(parser):
    g = parser.add_argument_group("run options")
    g.add_argument("--config", help="flat key = value config file")
    g.add_argument("--train", help="training corpus (JSONL)")
    g.add_argument("--dev", help="dev corpus (JSONL)")
    g.add_argument("--test", help="test corpus (JSONL)")
    g.add_argument("--corpus", help="corpus to operate on (defaults to --train, or --test for eval)")
    g.add_argument("--inventory", help="built-in inventory name or inventory JSON file")
    g.add_argument("--embeddings", dest="embeddings_path", help="word-vector text file")
    g.add_argument("--method", choices=[m.value for m in LabelMethod])
    g.add_argument("--alpha", type=float)
    g.add_argument("--lr", dest="learning_rate", type=float)
    g.add_argument("--epochs", type=int)
    g.add_argument("--teacher-epochs", type=int)
    g.add_argument("--batch-size", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--window", type=int)
    g.add_argument("--future-turns", type=int, choices=(0, 2))
    g.add_argument("--select-best-dev", action="store_true", default=None)
    g.add_argument("--exclude-class", dest="exclude", action="append", metavar="EMOTION")
    g.add_argument("--teacher-logits", help="teacher logits JSONL")
    g.add_argument("--teacher", dest="teacher_params", help="frozen teacher params JSON")
    g.add_argument("--labels", help="grayscale labels JSONL")
    g.add_argument("--output-dir", "-o")
    g.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="grayscale-erc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("build-labels", "write per-sample grayscale labels"),
        ("train-teacher", "train a one-hot teacher and dump its logits"),
        ("train-student", "train a student with the joint loss and evaluate it"),
        ("eval", "evaluate saved params on a corpus"),
        ("alpha-sweep", "train one student per alpha and tabulate scores"),
    ):
        p = sub.add_parser(name, help=help_text)
        _common(p)
        if name == "eval":
            p.add_argument("--params", required=False, help="student params JSON")
        if name == "alpha-sweep":
            p.add_argument("--alphas", type=float, nargs="+")
    return parser


def resolve_config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    overrides = {k: v for k, v in vars(args).items() if k not in ("config", "command", "corpus", "params", "verbose")}
    cfg.update(overrides)
    return cfg.validate()


def _out_dir(cfg) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _teacher_logits(cfg, res, corpus):
    if cfg.teacher_logits:
        return read_logits(resolve_path(cfg.teacher_logits), k=res.inventory.k)
    if cfg.teacher_params:
        params = load_params(resolve_path(cfg.teacher_params), res.inventory)
        return pipeline.teacher_logits_from_params(params, corpus, res.table, cfg.label_method, cfg.window)
    return None


def _labels_for(cfg, res, corpus, samples):
    if cfg.labels:
        labels = read_labels(resolve_path(cfg.labels), k=res.inventory.k)
        missing = [s.sample_id for s in samples if s.sample_id not in labels]
        if missing:
            raise ConfigurationError(f"labels file has no entry for {missing[:5]}")
        return labels
    return pipeline.build_labels(samples, cfg.label_method, res, _teacher_logits(cfg, res, corpus))


def cmd_build_labels(args, cfg):
    res = pipeline.load_resources(cfg)
    corpus = pipeline.load_split(args.corpus or cfg.train, res.inventory)
    samples = pipeline.student_samples(corpus, cfg.window)
    method = cfg.label_method
    labels = pipeline.build_labels(samples, method, res, _teacher_logits(cfg, res, corpus))
    path = _out_dir(cfg) / "labels.jsonl"
    write_labels(path, ((s.sample_id, labels[s.sample_id]) for s in samples))
    print(f"wrote {len(samples)} {method.value} labels to {path}")
    print("emotion\tmean_entropy")
    for emotion, h in pipeline.label_entropy_summary(samples, labels, res.inventory).items():
        print(f"{emotion}\t{h:.6f}")
    return 0


def cmd_train_teacher(args, cfg):
    res = pipeline.load_resources(cfg)
    corpus = pipeline.load_split(args.corpus or cfg.train, res.inventory)
    tcfg = cfg.teacher_config()
    params, logits = pipeline.train_teacher(corpus, res, tcfg, future_turns=tcfg.future_turns)
    out = _out_dir(cfg)
    save_params(params, out / "teacher_params.json")
    write_logits(out / "teacher_logits.jsonl", logits)
    kind = "future-self" if tcfg.future_turns else "self"
    print(f"trained {kind} teacher for {tcfg.epochs} epochs on {len(logits)} samples; final loss {params.history[-1]:.6f}")
    print(f"wrote {out / 'teacher_params.json'} and {out / 'teacher_logits.jsonl'}")
    return 0


def _write_predictions(path, samples, pred, inventory):
    lines = [
        json.dumps({"sample_id": s.sample_id, "gold": inventory.names[s.gold], "pred": inventory.names[int(p)]})
        for s, p in zip(samples, pred)
    ]
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def _write_history(path, history):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["epoch", "mean_loss"])
    for i, loss in enumerate(history, 1):
        w.writerow([i, f"{loss:.9g}"])
    path.write_text(buf.getvalue(), encoding="utf-8")


def _splits(cfg, inventory):
    splits = {}
    for name in ("dev", "test"):
        path = getattr(cfg, name)
        if path:
            splits[name] = pipeline.load_split(path, inventory)
    return splits


def cmd_train_student(args, cfg):
    from grayscale.plotting import plot_confusion

    res = pipeline.load_resources(cfg)
    train_corpus = pipeline.load_split(cfg.train, res.inventory)
    splits = _splits(cfg, res.inventory)
    samples = pipeline.student_samples(train_corpus, cfg.window)
    loss_cfg = cfg.loss_config()
    labels = _labels_for(cfg, res, train_corpus, samples) if loss_cfg.alpha > 0 else None
    run = pipeline.run_student(
        train_corpus,
        res,
        cfg.train_config(),
        loss_cfg,
        labels=labels,
        eval_splits=splits,
        dev_corpus=splits.get("dev") if cfg.select_best_dev else None,
        excluded=cfg.exclude,
    )
    out = _out_dir(cfg)
    save_params(run.params, out / "student_params.json")
    _write_history(out / "train_log.csv", run.params.history)
    print(f"trained student ({cfg.label_method.value}, alpha={loss_cfg.alpha:g}) on {len(run.samples)} samples")
    for name, result in run.evals.items():
        write_report(result, out / f"eval_{name}.json")
        split_samples, pred = run.predictions[name]
        _write_predictions(out / f"predictions_{name}.jsonl", split_samples, pred, res.inventory)
        plot_confusion(result, out / f"confusion_{name}.png", title=f"{name} confusion")
        print(f"{name}\t{pipeline.headline_name(result)}\t{result.headline:.6f}")
    return 0


def cmd_eval(args, cfg):
    from grayscale.plotting import plot_confusion

    res = pipeline.load_resources(cfg)
    params_path = args.params or str(Path(cfg.output_dir) / "student_params.json")
    params = load_params(resolve_path(params_path), res.inventory)
    corpus = pipeline.load_split(args.corpus or cfg.test, res.inventory)
    samples, pred, result = pipeline.evaluate_params(params, corpus, res, cfg.window, cfg.exclude)
    out = _out_dir(cfg)
    write_report(result, out / "eval_report.json")
    plot_confusion(result, out / "confusion.png")
    print(f"samples\t{len(samples)}")
    for key in ("weighted_f1", "macro_f1", "micro_f1"):
        value = getattr(result, key)
        print(f"{key}\t{'undefined' if value is None else f'{value:.6f}'}")
    return 0


def cmd_alpha_sweep(args, cfg):
    from grayscale.plotting import plot_alpha_sweep

    alphas = args.alphas or cfg.alphas
    if not alphas:
        raise ConfigurationError("alpha-sweep needs --alphas (or 'alphas' in the config)")
    res = pipeline.load_resources(cfg)
    train_corpus = pipeline.load_split(cfg.train, res.inventory)
    splits = _splits(cfg, res.inventory)
    teacher = None
    if cfg.label_method.needs_teacher:
        teacher = _teacher_logits(cfg, res, train_corpus)
    rows = pipeline.alpha_sweep(
        [float(a) for a in alphas],
        train_corpus,
        res,
        cfg.train_config(),
        cfg.label_method,
        teacher_logits=teacher,
        dev_corpus=splits.get("dev"),
        test_corpus=splits.get("test"),
        excluded=cfg.exclude,
    )
    metric = "macro_f1" if excluded_indices(res.inventory, cfg.exclude) else "weighted_f1"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["alpha", f"dev_{metric}", f"test_{metric}"])
    for r in rows:
        w.writerow([f"{r['alpha']:g}"] + ["" if r[s] is None else f"{r[s]:.9g}" for s in ("dev", "test")])
    out = _out_dir(cfg)
    (out / "alpha_sweep.csv").write_text(buf.getvalue(), encoding="utf-8")
    plot_alpha_sweep(rows, out / "alpha_sweep.png", metric_name=metric, title=f"{cfg.label_method.value}")
    sys.stdout.write(buf.getvalue())
    return 0


COMMANDS = {
    "build-labels": cmd_build_labels,
    "train-teacher": cmd_train_teacher,
    "train-student": cmd_train_student,
    "eval": cmd_eval,
    "alpha-sweep": cmd_alpha_sweep,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](args, cfg)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, InputError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
