"""Mean-of-embeddings linear softmax classifier and the joint loss.

The same model serves as teacher (trained on one-hot targets only, then
frozen) and as student (trained on one-hot plus grayscale targets):

    L = CE(onehot, p) + alpha * CE(grayscale, p)

with both cross-entropies averaged over the batch.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

from grayscale.corpus import DEFAULT_WINDOW, enumerate_samples, is_marker
from grayscale.errors import ConfigurationError, InputError, SchemaError
from grayscale.inventory import EmotionInventory
from grayscale.labels import GrayscaleLabel, LabelMethod, check_simplex, format_float, softmax

logger = logging.getLogger(__name__)

EPSILON_LOG = 1e-12


@dataclass(frozen=True, eq=False)
class ModelParams:
    weights: np.ndarray  # (k, d)
    bias: np.ndarray  # (k,)
    inventory: EmotionInventory
    history: tuple = field(default=(), compare=False)

    def __post_init__(self):
        W = np.array(self.weights, dtype=np.float64)
        b = np.array(self.bias, dtype=np.float64)
        if W.ndim != 2 or b.shape != (W.shape[0],):
            raise InputError(f"inconsistent shapes: weights {W.shape}, bias {b.shape}")
        if W.shape[0] != self.inventory.k:
            raise InputError(f"weights have {W.shape[0]} rows but the inventory has {self.inventory.k} emotions")
        if not (np.all(np.isfinite(W)) and np.all(np.isfinite(b))):
            raise InputError("parameters must be finite")
        W.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "weights", W)
        object.__setattr__(self, "bias", b)

    @property
    def k(self) -> int:
        return self.weights.shape[0]

    @property
    def feature_dim(self) -> int:
        return self.weights.shape[1]

    @classmethod
    def zeros(cls, inventory: EmotionInventory, dim: int) -> "ModelParams":
        return cls(np.zeros((inventory.k, dim)), np.zeros(inventory.k), inventory)


@dataclass(frozen=True, eq=False)
class Prediction:
    logits: np.ndarray
    probs: np.ndarray

    @property
    def label(self) -> int:
        return int(np.argmax(self.probs))


@dataclass(frozen=True)
class LossConfig:
    alpha: float = 1.0
    label_method: LabelMethod = LabelMethod.CATEGORY
    epsilon_log: float = EPSILON_LOG

    def __post_init__(self):
        if not math.isfinite(self.alpha) or self.alpha < 0:
            raise ConfigurationError(f"alpha must be finite and >= 0, got {self.alpha}")
        if not 0 < self.epsilon_log <= 1e-6:
            raise ConfigurationError(f"epsilon_log must be in (0, 1e-6], got {self.epsilon_log}")
        object.__setattr__(self, "label_method", LabelMethod.parse(self.label_method))


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.5
    epochs: int = 100
    batch_size: int = 8
    seed: int = 0
    window: int = DEFAULT_WINDOW
    future_turns: int = 0
    select_best_dev: bool = False

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ConfigurationError(f"learning_rate must be positive, got {self.learning_rate}")
        if int(self.epochs) < 1 or int(self.batch_size) < 1:
            raise ConfigurationError("epochs and batch_size must be positive")
        if self.window < 1:
            raise ConfigurationError(f"window must be >= 1, got {self.window}")
        if self.future_turns not in (0, 2):
            raise ConfigurationError(f"future_turns must be 0 or 2, got {self.future_turns}")


def featurize(sample, table) -> np.ndarray:
    """Mean embedding of the known words; markers are skipped, unknown words too."""
    vecs = []
    for token in sample.rendered.lower().split():
        if is_marker(token):
            continue
        v = table.vectors.get(token)
        if v is not None:
            vecs.append(v)
    if not vecs:
        return np.zeros(table.dim)
    return np.mean(vecs, axis=0)


def featurize_all(samples, table) -> np.ndarray:
    if not samples:
        return np.zeros((0, table.dim))
    return np.stack([featurize(s, table) for s in samples])


def _check_features(params: ModelParams, x: np.ndarray):
    if x.shape[-1] != params.feature_dim:
        raise InputError(f"feature dim {x.shape[-1]} does not match model dim {params.feature_dim}")


def forward(params: ModelParams, features) -> Prediction:
    x = np.asarray(features, dtype=np.float64)
    _check_features(params, x)
    logits = params.weights @ x + params.bias
    return Prediction(logits=logits, probs=softmax(logits))


def predict_logits(params: ModelParams, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.shape[0] == 0:
        return np.zeros((0, params.k))
    _check_features(params, X)
    return X @ params.weights.T + params.bias


def predict(params: ModelParams, X) -> np.ndarray:
    """Predicted emotion index per row (ties go to the lowest index)."""
    return np.argmax(predict_logits(params, X), axis=1)


def _as_probs(g) -> np.ndarray:
    return g.probs if isinstance(g, GrayscaleLabel) else np.asarray(g, dtype=np.float64)


def loss_onehot(probs, gold_index: int, eps: float = EPSILON_LOG) -> float:
    p = np.asarray(probs, dtype=np.float64)
    check_simplex(p)
    if not 0 <= gold_index < p.size:
        raise InputError(f"gold index {gold_index} out of range for k={p.size}")
    return -math.log(max(p[gold_index], eps))


def loss_grayscale(probs, g, eps: float = EPSILON_LOG) -> float:
    p = np.asarray(probs, dtype=np.float64)
    g = _as_probs(g)
    check_simplex(p)
    check_simplex(g)
    if p.shape != g.shape:
        raise InputError(f"shape mismatch: probs {p.shape}, label {g.shape}")
    return -math.fsum(g * np.log(np.maximum(p, eps)))


def loss_total(probs, gold_index: int, g, alpha: float, eps: float = EPSILON_LOG) -> float:
    lb = loss_onehot(probs, gold_index, eps)
    if alpha == 0:
        return lb
    return lb + alpha * loss_grayscale(probs, g, eps)


def loss_gradient(params: ModelParams, features, gold_index: int, g, alpha: float):
    """Gradient ``(dW, db)`` of :func:`loss_total` for one sample."""
    x = np.asarray(features, dtype=np.float64)
    p = forward(params, x).probs
    o = np.zeros(params.k)
    o[gold_index] = 1.0
    dlogits = p - o
    if alpha != 0:
        dlogits = dlogits + alpha * (p - _as_probs(g))
    return np.outer(dlogits, x), dlogits


def _label_matrix(samples, labels, k) -> np.ndarray:
    if isinstance(labels, Mapping):
        missing = [s.sample_id for s in samples if s.sample_id not in labels]
        if missing:
            raise InputError(f"no grayscale label for samples {missing[:5]}")
        rows = [labels[s.sample_id] for s in samples]
    else:
        rows = list(labels)
        if len(rows) != len(samples):
            raise InputError(f"{len(rows)} labels for {len(samples)} samples")
    G = np.stack([_as_probs(r) for r in rows])
    if G.shape[1] != k:
        raise InputError(f"labels have {G.shape[1]} classes, model has {k}")
    return G


def _batch_loss(P, gold, G, alpha, eps):
    logp = np.log(np.maximum(P, eps))
    lb = -logp[np.arange(len(gold)), gold]
    if alpha == 0:
        return lb
    return lb + alpha * -(G * logp).sum(axis=1)


def train(
    samples: Sequence,
    labels,
    config: TrainConfig,
    loss_config: LossConfig,
    table,
    inventory: EmotionInventory,
    dev: Optional[Sequence] = None,
) -> ModelParams:
    """Mini-batch gradient descent from zero parameters.

    ``labels`` is a sample_id -> label mapping or a sequence aligned with
    ``samples``; it must be given exactly when ``alpha > 0``. Each epoch's
    mean training loss is kept in ``ModelParams.history``.
    """
    if not samples:
        raise InputError("cannot train on an empty sample list")
    alpha = loss_config.alpha
    if alpha > 0 and labels is None:
        raise ConfigurationError("alpha > 0 needs grayscale labels")
    if alpha == 0 and labels is not None:
        raise ConfigurationError("grayscale labels given but alpha is 0")
    X = featurize_all(samples, table)
    gold = np.array([s.gold for s in samples], dtype=np.int64)
    k = inventory.k
    if np.any(gold < 0) or np.any(gold >= k):
        raise InputError("sample gold index out of range")
    O = np.eye(k)[gold]
    G = _label_matrix(samples, labels, k) if alpha > 0 else None

    select = config.select_best_dev and dev
    if select:
        from grayscale.metrics import evaluate

        X_dev = featurize_all(dev, table)
        gold_dev = [s.gold for s in dev]

    W = np.zeros((k, table.dim))
    b = np.zeros(k)
    rng = np.random.default_rng(config.seed)
    lr = config.learning_rate
    n = len(samples)
    history = []
    best = None
    for epoch in range(int(config.epochs)):
        order = rng.permutation(n)
        total = 0.0
        for start in range(0, n, int(config.batch_size)):
            idx = order[start : start + int(config.batch_size)]
            Xb = X[idx]
            P = softmax(Xb @ W.T + b)
            total += float(_batch_loss(P, gold[idx], None if G is None else G[idx], alpha, loss_config.epsilon_log).sum())
            dlogits = P - O[idx]
            if alpha != 0:
                dlogits = dlogits + alpha * (P - G[idx])
            W -= lr * (dlogits.T @ Xb / len(idx))
            b -= lr * dlogits.mean(axis=0)
        history.append(total / n)
        logger.info("epoch %d mean loss %.6f", epoch + 1, history[-1])
        if select:
            pred = np.argmax(X_dev @ W.T + b, axis=1)
            score = evaluate(gold_dev, pred, inventory).headline
            if best is None or score > best[0]:
                best = (score, W.copy(), b.copy(), epoch + 1)
    if best is not None:
        logger.info("selected epoch %d (dev score %.6f)", best[3], best[0])
        W, b = best[1], best[2]
    return ModelParams(W, b, inventory, history=tuple(history))


def teacher_pipeline(corpus, table, config: TrainConfig, inventory: EmotionInventory, future_turns: int = 0):
    """Train a one-hot teacher on its own renderings and return it with its logits.

    ``future_turns=0`` gives the self teacher, ``2`` the future-self teacher.
    The returned logits are keyed by sample id, so a student that reads
    past-only renderings of the same corpus can look them up.
    """
    config = replace(config, future_turns=future_turns)
    samples = enumerate_samples(corpus, future_turns=future_turns, window=config.window)
    params = train(samples, None, config, LossConfig(alpha=0.0, label_method=LabelMethod.ONE_HOT), table, inventory)
    logits = predict_logits(params, featurize_all(samples, table))
    return params, {s.sample_id: logits[i] for i, s in enumerate(samples)}


def save_params(params: ModelParams, path) -> None:
    doc = {
        "dim": params.feature_dim,
        "k": params.k,
        "emotions": list(params.inventory.names),
        "weights": [format_float(x) for x in params.weights.ravel()],
        "bias": [format_float(x) for x in params.bias],
    }
    Path(path).write_text(json.dumps(doc) + "\n", encoding="utf-8")


def load_params(path, inventory: EmotionInventory) -> ModelParams:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigurationError(f"params file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg}", path=path, line=exc.lineno) from None
    try:
        dim, k = int(doc["dim"]), int(doc["k"])
        W = np.asarray(doc["weights"], dtype=np.float64).reshape(k, dim)
        b = np.asarray(doc["bias"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad params file: {exc}", path=path) from None
    emotions = doc.get("emotions")
    if emotions is not None and tuple(emotions) != inventory.names:
        raise SchemaError(f"params were trained on emotions {emotions}, not {list(inventory.names)}", path=path)
    try:
        return ModelParams(W, b, inventory)
    except InputError as exc:
        raise SchemaError(str(exc), path=path) from None


def write_logits(path, logits: Mapping[str, np.ndarray], order: Optional[Sequence[str]] = None) -> None:
    ids = list(order) if order is not None else list(logits)
    lines = [json.dumps({"sample_id": sid, "logits": [format_float(x) for x in logits[sid]]}) for sid in ids]
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def read_logits(path, k: Optional[int] = None) -> dict[str, np.ndarray]:
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"teacher logits file not found: {path}")
    out = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                vec = np.asarray(rec["logits"], dtype=np.float64)
                sid = str(rec["sample_id"])
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise SchemaError(f"bad logits record: {exc}", path=path, line=lineno) from None
            if vec.ndim != 1 or (k is not None and vec.size != k) or not np.all(np.isfinite(vec)):
                raise SchemaError(f"logits must be {k} finite numbers", path=path, line=lineno)
            out[sid] = vec
    return out
