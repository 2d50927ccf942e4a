"""Grayscale label construction.

Every builder maps a gold emotion (plus, depending on the method, an
embedding table or a teacher's logits) to a probability vector over the
inventory. Category and word-embedding labels depend on the gold emotion
only; the self-family depends on the utterance through the teacher.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from grayscale.errors import (
    ConfigurationError,
    DegenerateInputError,
    InputError,
    SchemaError,
)
from grayscale.inventory import EmotionInventory

SIMPLEX_TOL = 1e-9
RENORM_TOL = 1e-12

SAME_EMOTION_SCORE = 1.0
SAME_CATEGORY_SCORE = 0.5
ADJUSTED_GOLD_MASS = 0.5


class LabelMethod(str, enum.Enum):
    ONE_HOT = "one-hot"
    CATEGORY = "category"
    WORD_EMBEDDING = "word-embedding"
    SELF = "self"
    SELF_ADJUST = "self-adjust"
    FUTURE_SELF_ADJUST = "future-self-adjust"

    @classmethod
    def parse(cls, value) -> "LabelMethod":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            choices = ", ".join(m.value for m in cls)
            raise ConfigurationError(f"unknown label method {value!r}; choose from {choices}") from None

    @property
    def needs_teacher(self) -> bool:
        return self in (LabelMethod.SELF, LabelMethod.SELF_ADJUST, LabelMethod.FUTURE_SELF_ADJUST)

    @property
    def teacher_future_turns(self) -> int:
        """How many future turns the teacher for this method reads."""
        return 2 if self is LabelMethod.FUTURE_SELF_ADJUST else 0


def _readonly(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ScoreVector:
    """Nonnegative pre-normalization scores, one per emotion."""

    scores: np.ndarray

    def __post_init__(self):
        s = _readonly(self.scores)
        if s.ndim != 1 or s.size == 0:
            raise InputError(f"scores must be a nonempty 1-d vector, got shape {s.shape}")
        if not np.all(np.isfinite(s)):
            raise InputError("scores must be finite")
        if np.any(s < 0):
            raise InputError(f"scores must be nonnegative, got {s.tolist()}")
        object.__setattr__(self, "scores", s)

    def __len__(self):
        return self.scores.size

    def tolist(self):
        return self.scores.tolist()


@dataclass(frozen=True, eq=False)
class GrayscaleLabel:
    """A point on the probability simplex tagged with the method that built it."""

    probs: np.ndarray
    method: LabelMethod

    def __post_init__(self):
        p = _readonly(self.probs)
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "method", LabelMethod.parse(self.method))
        check_simplex(p)

    def __len__(self):
        return self.probs.size

    def __eq__(self, other):
        if not isinstance(other, GrayscaleLabel):
            return NotImplemented
        return self.method is other.method and np.array_equal(self.probs, other.probs)

    def tolist(self):
        return self.probs.tolist()

    @property
    def argmax(self) -> int:
        return int(np.argmax(self.probs))


def check_simplex(p, tol: float = SIMPLEX_TOL) -> None:
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 1 or p.size == 0:
        raise InputError(f"expected a nonempty 1-d probability vector, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise InputError("probability vector has non-finite entries")
    if np.any(p < 0) or np.any(p > 1):
        raise InputError(f"probabilities must lie in [0, 1], got {p.tolist()}")
    total = math.fsum(p)
    if abs(total - 1.0) > tol:
        raise InputError(f"probabilities sum to {total!r}, not 1")


def is_simplex(p, tol: float = SIMPLEX_TOL) -> bool:
    try:
        check_simplex(p, tol)
    except InputError:
        return False
    return True


def _renormalize(p: np.ndarray) -> np.ndarray:
    total = math.fsum(p)
    if abs(total - 1.0) > RENORM_TOL:
        p = p / total
    return p


def one_hot(gt_index: int, k: int) -> np.ndarray:
    o = np.zeros(k)
    o[gt_index] = 1.0
    return o


def category_scores(gt_index: int, inventory: EmotionInventory) -> ScoreVector:
    """1 for the gold emotion, 0.5 for emotions sharing its sentiment, else 0."""
    gt_index = inventory.check_index(gt_index)
    gold_cat = inventory.category(gt_index)
    s = np.zeros(inventory.k)
    for i in range(inventory.k):
        if i == gt_index:
            s[i] = SAME_EMOTION_SCORE
        elif inventory.category(i) == gold_cat:
            s[i] = SAME_CATEGORY_SCORE
    return ScoreVector(s)


def normalize_linear(s: ScoreVector, method=LabelMethod.CATEGORY) -> GrayscaleLabel:
    if not isinstance(s, ScoreVector):
        s = ScoreVector(s)
    total = math.fsum(s.scores)
    if total <= 0:
        raise DegenerateInputError("cannot normalize an all-zero score vector")
    return GrayscaleLabel(s.scores / total, method)


def word_embedding_scores(gt_index: int, inventory: EmotionInventory, table, aliases=None) -> ScoreVector:
    """Cosine similarity of each emotion word to the gold one, negatives clamped to 0.

    The gold entry is pinned to exactly 1.
    """
    from grayscale.embeddings import cosine, emotion_vector

    gt_index = inventory.check_index(gt_index)
    vectors = [emotion_vector(n, table, aliases) for n in inventory.names]
    w_gt = vectors[gt_index]
    s = np.empty(inventory.k)
    for i, w in enumerate(vectors):
        s[i] = 1.0 if i == gt_index else max(cosine(w, w_gt), 0.0)
    return ScoreVector(s)


def softmax(logits) -> np.ndarray:
    z = np.asarray(logits, dtype=np.float64)
    z = z - np.max(z, axis=-1, keepdims=True)
    e = np.exp(z)
    return e / np.sum(e, axis=-1, keepdims=True)


def softmax_label(logits, method=LabelMethod.SELF) -> GrayscaleLabel:
    z = np.asarray(logits, dtype=np.float64)
    if z.ndim != 1 or z.size == 0:
        raise InputError(f"logits must be a nonempty 1-d vector, got shape {z.shape}")
    if not np.all(np.isfinite(z)):
        raise InputError("logits must be finite")
    return GrayscaleLabel(softmax(z), method)


def self_adjust(g: GrayscaleLabel, gt_index: int, method=LabelMethod.SELF_ADJUST) -> GrayscaleLabel:
    """Move the gold emotion to mass 0.5 when the label's argmax misses it.

    The argmax breaks ties toward the lowest index. When it already equals
    ``gt_index`` the probabilities are returned untouched (retagged). Otherwise
    the gold entry becomes 0.5 and the remaining mass keeps its proportions.
    """
    probs = g.probs if isinstance(g, GrayscaleLabel) else _readonly(g)
    check_simplex(probs)
    k = probs.size
    if isinstance(gt_index, bool) or not 0 <= int(gt_index) < k:
        raise InputError(f"gold index {gt_index!r} out of range for k={k}")
    gt_index = int(gt_index)
    if int(np.argmax(probs)) == gt_index:
        return GrayscaleLabel(probs, method)
    rest = 1.0 - probs[gt_index]
    adjusted = probs * (ADJUSTED_GOLD_MASS / rest)
    adjusted[gt_index] = ADJUSTED_GOLD_MASS
    return GrayscaleLabel(_renormalize(adjusted), method)


def build_label(
    method,
    gt_index: int,
    inventory: EmotionInventory,
    *,
    table=None,
    aliases=None,
    logits=None,
) -> GrayscaleLabel:
    """Dispatch to the construction method named by ``method``."""
    method = LabelMethod.parse(method)
    gt_index = inventory.check_index(gt_index)
    if method is LabelMethod.ONE_HOT:
        return GrayscaleLabel(one_hot(gt_index, inventory.k), method)
    if method is LabelMethod.CATEGORY:
        return normalize_linear(category_scores(gt_index, inventory), method)
    if method is LabelMethod.WORD_EMBEDDING:
        if table is None:
            raise ConfigurationError("word-embedding labels need an embedding table")
        return normalize_linear(word_embedding_scores(gt_index, inventory, table, aliases), method)
    if logits is None:
        raise ConfigurationError(f"{method.value} labels need teacher logits")
    if len(logits) != inventory.k:
        raise InputError(f"expected {inventory.k} logits, got {len(logits)}")
    g = softmax_label(logits, LabelMethod.SELF)
    if method is LabelMethod.SELF:
        return g
    return self_adjust(g, gt_index, method)


def format_float(x: float) -> float:
    """Round to 9 significant digits; ``json`` then prints the short form."""
    return float(f"{x:.9g}")


def write_labels(path, records: Iterable[tuple[str, GrayscaleLabel]]) -> None:
    """Write ``{sample_id, method, probs}`` JSON lines."""
    lines = []
    for sample_id, label in records:
        rec = {
            "sample_id": sample_id,
            "method": label.method.value,
            "probs": [format_float(x) for x in label.probs],
        }
        lines.append(json.dumps(rec))
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def read_labels(path, k: Optional[int] = None) -> dict[str, GrayscaleLabel]:
    """Inverse of :func:`write_labels`. Rows are re-normalized after the 9-digit rounding."""
    out = {}
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                sample_id = str(rec["sample_id"])
                probs = np.asarray(rec["probs"], dtype=np.float64)
                method = LabelMethod.parse(rec["method"])
            except (json.JSONDecodeError, KeyError, TypeError, ValueError, ConfigurationError) as exc:
                raise SchemaError(f"bad label record: {exc}", path=path, line=lineno) from None
            if k is not None and probs.size != k:
                raise SchemaError(f"expected {k} probabilities, got {probs.size}", path=path, line=lineno)
            try:
                check_simplex(probs, tol=1e-6)
            except InputError as exc:
                raise SchemaError(str(exc), path=path, line=lineno) from None
            out[sample_id] = GrayscaleLabel(probs / math.fsum(probs), method)
    return out
