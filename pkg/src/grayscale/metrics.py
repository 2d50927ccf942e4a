"""ERC evaluation: confusion matrices and weighted / macro / micro F1.

A class that is never gold and never predicted has no F1. It is dropped
from macro averages and carries zero weight in the weighted average.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from grayscale.errors import InputError, UndefinedMetricError
from grayscale.inventory import EmotionInventory


def confusion_matrix(gold: Sequence[int], pred: Sequence[int], k: int) -> np.ndarray:
    """Counts with rows = gold class, columns = predicted class."""
    gold = np.asarray(gold, dtype=np.int64).ravel()
    pred = np.asarray(pred, dtype=np.int64).ravel()
    if gold.shape != pred.shape:
        raise InputError(f"gold ({gold.size}) and pred ({pred.size}) differ in length")
    for name, arr in (("gold", gold), ("pred", pred)):
        if arr.size and (arr.min() < 0 or arr.max() >= k):
            raise InputError(f"{name} index out of range for k={k}")
    cm = np.zeros((k, k), dtype=np.int64)
    np.add.at(cm, (gold, pred), 1)
    return cm


def _counts(confusion):
    cm = np.asarray(confusion, dtype=np.int64)
    if cm.ndim != 2 or cm.shape[0] != cm.shape[1] or np.any(cm < 0):
        raise InputError("confusion must be a square matrix of nonnegative counts")
    tp = np.diag(cm)
    fp = cm.sum(axis=0) - tp
    fn = cm.sum(axis=1) - tp
    return tp, fp, fn


def per_class_f1(confusion) -> np.ndarray:
    """F1 per class; NaN marks a class absent from both gold and predictions."""
    tp, fp, fn = _counts(confusion)
    denom = 2 * tp + fp + fn
    f1 = np.full(tp.shape, np.nan)
    defined = denom > 0
    f1[defined] = 2 * tp[defined] / denom[defined]
    return f1


def weighted_f1(confusion) -> float:
    cm = np.asarray(confusion)
    support = cm.sum(axis=1)
    total = support.sum()
    if total == 0:
        raise UndefinedMetricError("weighted F1 is undefined with zero support")
    f1 = np.nan_to_num(per_class_f1(cm), nan=0.0)
    return float(math.fsum(support * f1) / total)


def _kept(k, excluded):
    excluded = set(int(i) for i in (excluded or ()))
    return [c for c in range(k) if c not in excluded]


def macro_f1(confusion, excluded: Iterable[int] = ()) -> float:
    f1 = per_class_f1(confusion)
    vals = [f1[c] for c in _kept(len(f1), excluded) if not np.isnan(f1[c])]
    if not vals:
        raise UndefinedMetricError("macro F1 is undefined: no class with gold or predicted samples")
    return float(math.fsum(vals) / len(vals))


def micro_f1(confusion, excluded: Iterable[int] = ()) -> float:
    tp, fp, fn = _counts(confusion)
    kept = _kept(len(tp), excluded)
    tp_s, fp_s, fn_s = (int(a[kept].sum()) for a in (tp, fp, fn))
    denom = 2 * tp_s + fp_s + fn_s
    if denom == 0:
        raise UndefinedMetricError("micro F1 is undefined: no counted samples")
    return 2 * tp_s / denom


def _maybe(fn, *args):
    try:
        return fn(*args)
    except UndefinedMetricError:
        return None


@dataclass(frozen=True, eq=False)
class EvalResult:
    confusion: np.ndarray
    per_class_f1: np.ndarray
    weighted_f1: Optional[float]
    macro_f1: Optional[float]
    micro_f1: Optional[float]
    excluded: tuple[int, ...]
    inventory: Optional[EmotionInventory] = None

    @property
    def support(self) -> np.ndarray:
        return self.confusion.sum(axis=1)

    @property
    def headline(self) -> float:
        """Macro F1 when classes are excluded (DailyDialog protocol), else weighted F1."""
        value = self.macro_f1 if self.excluded else self.weighted_f1
        return float("nan") if value is None else value

    def to_dict(self) -> dict:
        names = self.inventory.names if self.inventory is not None else [str(i) for i in range(len(self.per_class_f1))]
        return {
            "weighted_f1": _round(self.weighted_f1),
            "macro_f1": _round(self.macro_f1),
            "micro_f1": _round(self.micro_f1),
            "excluded": [names[i] for i in self.excluded],
            "per_class": [
                {
                    "emotion": names[c],
                    "f1": None if np.isnan(f) else _round(float(f)),
                    "support": int(s),
                }
                for c, (f, s) in enumerate(zip(self.per_class_f1, self.support))
            ],
            "confusion": self.confusion.tolist(),
        }


def _round(x):
    return None if x is None else float(f"{x:.9g}")


def excluded_indices(inventory: EmotionInventory, names: Optional[Iterable[str]] = None) -> tuple[int, ...]:
    """Indices of ``names``, defaulting to the inventory's own exclusions."""
    names = inventory.excluded if names is None else tuple(names)
    return tuple(sorted(inventory.index(n.strip().lower()) for n in names))


def evaluate(gold, pred, inventory: EmotionInventory, excluded: Optional[Iterable[str]] = None) -> EvalResult:
    cm = confusion_matrix(gold, pred, inventory.k)
    ex = excluded_indices(inventory, excluded)
    return EvalResult(
        confusion=cm,
        per_class_f1=per_class_f1(cm),
        weighted_f1=_maybe(weighted_f1, cm),
        macro_f1=_maybe(macro_f1, cm, ex),
        micro_f1=_maybe(micro_f1, cm, ex),
        excluded=ex,
        inventory=inventory,
    )


def write_report(result: EvalResult, path) -> None:
    Path(path).write_text(json.dumps(result.to_dict(), indent=2) + "\n", encoding="utf-8")
