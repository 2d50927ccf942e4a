"""Run configuration: a flat ``key = value`` file overridden by CLI flags.

Values are Python-style literals: quoted strings, numbers, ``true``/``false``
and comma-separated lists (``alphas = 0, 0.5, 1``). ``#`` starts a comment
line. Alias overrides use dotted keys, e.g. ``embeddings.aliases.sadness = "sad"``.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

from grayscale.corpus import DEFAULT_WINDOW
from grayscale.errors import ConfigurationError
from grayscale.labels import LabelMethod
from grayscale.model import LossConfig, TrainConfig
from grayscale.resources import resolve_path

ALIAS_PREFIX = "embeddings.aliases."
PATH_KEYS = ("train", "dev", "test", "embeddings_path", "output_dir", "teacher_logits", "teacher_params", "labels")
_KEY_RENAMES = {"embeddings.path": "embeddings_path", "lr": "learning_rate"}


@dataclass
class RunConfig:
    train: Optional[str] = None
    dev: Optional[str] = None
    test: Optional[str] = None
    inventory: str = "bundled:toy_inventory.json"
    method: str = LabelMethod.CATEGORY.value
    alpha: float = 1.0
    embeddings_path: Optional[str] = None
    aliases: dict = field(default_factory=dict)
    learning_rate: float = 0.5
    epochs: int = 100
    batch_size: int = 8
    seed: int = 0
    window: int = DEFAULT_WINDOW
    future_turns: Optional[int] = None
    teacher_epochs: Optional[int] = None
    select_best_dev: bool = False
    output_dir: str = "runs"
    teacher_logits: Optional[str] = None
    teacher_params: Optional[str] = None
    labels: Optional[str] = None
    exclude: Optional[list] = None
    alphas: Optional[list] = None

    def validate(self) -> "RunConfig":
        LabelMethod.parse(self.method)
        if self.alpha < 0:
            raise ConfigurationError(f"alpha must be >= 0, got {self.alpha}")
        self.train_config()
        return self

    def train_config(self, epochs: Optional[int] = None, future_turns: int = 0) -> TrainConfig:
        return TrainConfig(
            learning_rate=float(self.learning_rate),
            epochs=int(self.epochs if epochs is None else epochs),
            batch_size=int(self.batch_size),
            seed=int(self.seed),
            window=int(self.window),
            future_turns=future_turns,
            select_best_dev=bool(self.select_best_dev),
        )

    def teacher_config(self) -> TrainConfig:
        """Teacher settings; future turns default to what the label method expects."""
        future = self.label_method.teacher_future_turns if self.future_turns is None else int(self.future_turns)
        return self.train_config(epochs=self.teacher_epochs, future_turns=future)

    def loss_config(self, alpha: Optional[float] = None) -> LossConfig:
        return LossConfig(alpha=float(self.alpha if alpha is None else alpha), label_method=self.method)

    @property
    def label_method(self) -> LabelMethod:
        return LabelMethod.parse(self.method)

    def update(self, values: dict) -> "RunConfig":
        known = {f.name for f in fields(self)}
        for key, value in values.items():
            if value is None:
                continue
            if key not in known:
                raise ConfigurationError(f"unknown config key {key!r}")
            if key == "aliases":
                self.aliases.update(value)
            else:
                setattr(self, key, value)
        return self


def _parse_value(raw: str, path, lineno):
    text = raw.strip()
    lowered = text.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    if lowered in ("none", "null"):
        return None
    try:
        value = ast.literal_eval(text)
    except (ValueError, SyntaxError):
        raise ConfigurationError(f"{path}:{lineno}: cannot parse value {text!r} (quote strings)") from None
    if isinstance(value, tuple):
        value = list(value)
    return value


def parse_config_text(text: str, path="<config>") -> dict:
    values: dict = {}
    aliases: dict = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigurationError(f"{path}:{lineno}: expected 'key = value'")
        key, raw = stripped.split("=", 1)
        key = key.strip()
        value = _parse_value(raw, path, lineno)
        if key.startswith(ALIAS_PREFIX):
            aliases[key[len(ALIAS_PREFIX):].lower()] = value
            continue
        key = _KEY_RENAMES.get(key, key).replace("-", "_")
        values[key] = value
    if aliases:
        values["aliases"] = aliases
    return values


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigurationError(f"config file not found: {path}") from None
    values = parse_config_text(text, path)
    # relative paths in a config file are relative to the file
    for key in PATH_KEYS:
        if isinstance(values.get(key), str):
            values[key] = str(resolve_path(values[key], base=path.parent))
    if isinstance(values.get("inventory"), str) and values["inventory"].endswith(".json"):
        values["inventory"] = str(resolve_path(values["inventory"], base=path.parent))
    cfg = RunConfig()
    cfg.update(values)
    return cfg
