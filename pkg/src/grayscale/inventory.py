"""Emotion inventories and their sentiment categories.

The four built-in inventories follow the public ERC benchmarks: emotion order
is the order the datasets list their labels in, and every emotion carries one
coarse sentiment category.
"""

from __future__ import annotations

import json
import operator
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping

from grayscale.errors import ConfigurationError, InputError, SchemaError
from grayscale.resources import resolve_path

CATEGORIES = ("positive", "negative", "neutral")


@dataclass(frozen=True)
class EmotionInventory:
    """Ordered emotion names plus a name -> sentiment category map.

    ``excluded`` lists emotions left out of macro/micro F1 by default
    (DailyDialog drops neutral).
    """

    names: tuple[str, ...]
    category_of: Mapping[str, str]
    name: str = "custom"
    excluded: tuple[str, ...] = field(default=())

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if len(names) < 2:
            raise InputError("an inventory needs at least two emotions")
        if len(set(names)) != len(names):
            raise InputError(f"duplicate emotion names in {names}")
        for n in names:
            if not n or n != n.lower() or n.strip() != n:
                raise InputError(f"emotion names must be nonempty lowercase, got {n!r}")
        cats = dict(self.category_of)
        missing = [n for n in names if n not in cats]
        if missing:
            raise InputError(f"no sentiment category for {missing}")
        extra = sorted(set(cats) - set(names))
        if extra:
            raise InputError(f"categories given for unknown emotions {extra}")
        for n, c in cats.items():
            if c not in CATEGORIES:
                raise InputError(f"category of {n!r} must be one of {CATEGORIES}, got {c!r}")
        object.__setattr__(self, "category_of", MappingProxyType(cats))
        excluded = tuple(self.excluded)
        for n in excluded:
            if n not in cats:
                raise InputError(f"excluded emotion {n!r} is not in the inventory")
        object.__setattr__(self, "excluded", excluded)

    @property
    def k(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise InputError(f"{name!r} is not an emotion of inventory {self.name!r}") from None

    def category(self, i: int) -> str:
        return self.category_of[self.names[i]]

    def check_index(self, i) -> int:
        if isinstance(i, bool):
            raise InputError(f"emotion index must be an integer, got {i!r}")
        try:
            i = operator.index(i)
        except TypeError:
            raise InputError(f"emotion index must be an integer, got {i!r}") from None
        if not 0 <= i < self.k:
            raise InputError(f"emotion index {i} out of range for k={self.k}")
        return i

    def permuted(self, order: Iterable[int]) -> "EmotionInventory":
        """Same emotions listed as ``[names[j] for j in order]``."""
        order = list(order)
        if sorted(order) != list(range(self.k)):
            raise InputError(f"{order} is not a permutation of range({self.k})")
        return EmotionInventory(
            names=tuple(self.names[j] for j in order),
            category_of=dict(self.category_of),
            name=self.name,
            excluded=self.excluded,
        )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "names": list(self.names),
            "categories": {n: self.category_of[n] for n in self.names},
            "excluded": list(self.excluded),
        }


def _make(name, spec, excluded=()):
    return EmotionInventory(
        names=tuple(n for n, _ in spec),
        category_of=dict(spec),
        name=name,
        excluded=excluded,
    )


BUILTIN_INVENTORIES: Mapping[str, EmotionInventory] = MappingProxyType(
    {
        "iemocap": _make(
            "iemocap",
            [
                ("happy", "positive"),
                ("sad", "negative"),
                ("angry", "negative"),
                ("excited", "positive"),
                ("frustrated", "negative"),
                ("neutral", "neutral"),
            ],
        ),
        "dailydialog": _make(
            "dailydialog",
            [
                ("anger", "negative"),
                ("disgust", "negative"),
                ("fear", "negative"),
                ("joy", "positive"),
                ("surprise", "neutral"),
                ("sadness", "negative"),
                ("neutral", "neutral"),
            ],
            excluded=("neutral",),
        ),
        "meld": _make(
            "meld",
            [
                ("anger", "negative"),
                ("disgust", "negative"),
                ("sadness", "negative"),
                ("joy", "positive"),
                ("surprise", "neutral"),
                ("fear", "negative"),
                ("neutral", "neutral"),
            ],
        ),
        "emorynlp": _make(
            "emorynlp",
            [
                ("joyful", "positive"),
                ("peaceful", "positive"),
                ("powerful", "positive"),
                ("scared", "negative"),
                ("mad", "negative"),
                ("sad", "negative"),
                ("neutral", "neutral"),
            ],
        ),
    }
)


def builtin_inventory(name: str) -> EmotionInventory:
    try:
        return BUILTIN_INVENTORIES[name.lower()]
    except KeyError:
        raise ConfigurationError(
            f"unknown inventory {name!r}; built-ins are {sorted(BUILTIN_INVENTORIES)}"
        ) from None


def load_inventory(path) -> EmotionInventory:
    """Read an inventory from JSON: ``{"names": [...], "categories": {...}}``.

    Optional keys are ``name`` and ``excluded``.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigurationError(f"inventory file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg}", path=path, line=exc.lineno) from None
    if not isinstance(raw, dict) or "names" not in raw or "categories" not in raw:
        raise SchemaError("inventory needs 'names' and 'categories'", path=path)
    try:
        return EmotionInventory(
            names=tuple(raw["names"]),
            category_of=raw["categories"],
            name=raw.get("name", path.stem),
            excluded=tuple(raw.get("excluded", ())),
        )
    except InputError as exc:
        raise SchemaError(str(exc), path=path) from None


def resolve_inventory(spec: str) -> EmotionInventory:
    """A built-in name, or a path to an inventory JSON file."""
    if spec.lower() in BUILTIN_INVENTORIES:
        return BUILTIN_INVENTORIES[spec.lower()]
    path = resolve_path(spec)
    if not path.exists():
        raise ConfigurationError(
            f"{spec!r} is neither a built-in inventory {sorted(BUILTIN_INVENTORIES)} nor a file"
        )
    return load_inventory(path)
