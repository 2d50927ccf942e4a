"""Library-level orchestration used by the CLI: labels, teacher, student, sweep."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from grayscale.corpus import TrainingSample, enumerate_samples, parse_corpus
from grayscale.embeddings import EmbeddingTable, load_embeddings, merge_aliases
from grayscale.errors import ConfigurationError, InputError
from grayscale.inventory import EmotionInventory, resolve_inventory
from grayscale.labels import GrayscaleLabel, LabelMethod, build_label
from grayscale.metrics import EvalResult, evaluate
from grayscale.model import (
    LossConfig,
    ModelParams,
    TrainConfig,
    featurize_all,
    predict,
    predict_logits,
    teacher_pipeline,
    train,
)
from grayscale.resources import bundled_path, resolve_path

logger = logging.getLogger(__name__)


@dataclass
class Resources:
    inventory: EmotionInventory
    table: EmbeddingTable
    aliases: dict


def load_resources(cfg) -> Resources:
    inventory = resolve_inventory(cfg.inventory)
    emb = cfg.embeddings_path or str(bundled_path("toy_embeddings.txt"))
    table = load_embeddings(resolve_path(emb))
    return Resources(inventory, table, merge_aliases(cfg.aliases))


def load_split(path, inventory):
    if path is None:
        raise ConfigurationError("no corpus path given")
    return parse_corpus(resolve_path(path), inventory)


def student_samples(corpus, window) -> list[TrainingSample]:
    """Past-only renderings; students never see future turns."""
    samples = enumerate_samples(corpus, future_turns=0, window=window)
    assert all(s.future_turns_used == 0 for s in samples)
    return samples


def teacher_logits_from_params(params: ModelParams, corpus, table, method: LabelMethod, window: int):
    samples = enumerate_samples(corpus, future_turns=method.teacher_future_turns, window=window)
    logits = predict_logits(params, featurize_all(samples, table))
    return {s.sample_id: logits[i] for i, s in enumerate(samples)}


def build_labels(
    samples: Sequence[TrainingSample],
    method,
    res: Resources,
    teacher_logits: Optional[Mapping[str, np.ndarray]] = None,
) -> dict[str, GrayscaleLabel]:
    method = LabelMethod.parse(method)
    if method.needs_teacher and teacher_logits is None:
        raise ConfigurationError(f"method {method.value} needs teacher logits or teacher params")
    out = {}
    for s in samples:
        logits = None
        if method.needs_teacher:
            if s.sample_id not in teacher_logits:
                raise ConfigurationError(f"no teacher logits for sample {s.sample_id}")
            logits = teacher_logits[s.sample_id]
        out[s.sample_id] = build_label(
            method, s.gold, res.inventory, table=res.table, aliases=res.aliases, logits=logits
        )
    return out


def label_entropy_summary(samples, labels, inventory) -> dict[str, float]:
    """Mean label entropy (nats) per gold emotion; emotions without samples are omitted."""
    buckets: dict[int, list[float]] = {}
    for s in samples:
        p = labels[s.sample_id].probs
        nz = p[p > 0]
        buckets.setdefault(s.gold, []).append(float(-(nz * np.log(nz)).sum()))
    return {inventory.names[g]: float(np.mean(v)) for g, v in sorted(buckets.items())}


@dataclass
class StudentRun:
    params: ModelParams
    samples: list
    labels: Optional[dict]
    evals: dict  # split name -> EvalResult
    predictions: dict  # split name -> (samples, pred array)


def evaluate_params(params, corpus, res: Resources, window: int, excluded=None):
    samples = student_samples(corpus, window)
    pred = predict(params, featurize_all(samples, res.table))
    result = evaluate([s.gold for s in samples], pred, res.inventory, excluded)
    return samples, pred, result


def run_student(
    train_corpus,
    res: Resources,
    train_config: TrainConfig,
    loss_config: LossConfig,
    labels: Optional[Mapping[str, GrayscaleLabel]] = None,
    teacher_logits=None,
    eval_splits: Optional[dict] = None,
    dev_corpus=None,
    excluded=None,
) -> StudentRun:
    """Train a student on past-only renderings and evaluate it on each split.

    Labels are built from ``loss_config.label_method`` when not given; with
    ``alpha == 0`` none are used.
    """
    if train_config.future_turns != 0:
        raise InputError("student inputs never include future turns")
    samples = student_samples(train_corpus, train_config.window)
    if loss_config.alpha == 0:
        labels = None
    elif labels is None:
        labels = build_labels(samples, loss_config.label_method, res, teacher_logits)
    dev_samples = student_samples(dev_corpus, train_config.window) if dev_corpus is not None else None
    params = train(samples, labels, train_config, loss_config, res.table, res.inventory, dev=dev_samples)
    evals, preds = {}, {}
    for name, corpus in (eval_splits or {}).items():
        split_samples, pred, result = evaluate_params(params, corpus, res, train_config.window, excluded)
        evals[name] = result
        preds[name] = (split_samples, pred)
    return StudentRun(params, samples, labels, evals, preds)


def train_teacher(corpus, res: Resources, config: TrainConfig, future_turns: int = 0):
    return teacher_pipeline(corpus, res.table, config, res.inventory, future_turns=future_turns)


def alpha_sweep(
    alphas: Sequence[float],
    train_corpus,
    res: Resources,
    train_config: TrainConfig,
    method,
    teacher_logits=None,
    dev_corpus=None,
    test_corpus=None,
    excluded=None,
) -> list[dict]:
    """One student per alpha, all sharing the seed and one label set."""
    if len(alphas) < 2:
        raise ConfigurationError("an alpha sweep needs at least two alpha values")
    method = LabelMethod.parse(method)
    samples = student_samples(train_corpus, train_config.window)
    labels = None
    if any(a > 0 for a in alphas):
        labels = build_labels(samples, method, res, teacher_logits)
    splits = {}
    if dev_corpus is not None:
        splits["dev"] = dev_corpus
    if test_corpus is not None:
        splits["test"] = test_corpus
    rows = []
    for a in alphas:
        run = run_student(
            train_corpus,
            res,
            train_config,
            LossConfig(alpha=float(a), label_method=method),
            labels=labels if a > 0 else None,
            eval_splits=splits,
            excluded=excluded,
        )
        row = {"alpha": float(a)}
        for name in ("dev", "test"):
            row[name] = run.evals[name].headline if name in run.evals else None
        rows.append(row)
    return rows


def headline_name(result: EvalResult) -> str:
    return "macro_f1" if result.excluded else "weighted_f1"
