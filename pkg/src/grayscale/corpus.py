"""Conversation corpora and model-input rendering.

A corpus is a JSON-lines file with one utterance per line::

    {"dialogue_id": "d1", "speaker": "A", "text": "hi there", "emotion": "joy"}

Utterances are grouped by ``dialogue_id`` in order of first appearance.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from grayscale.errors import ConfigurationError, InputError, SchemaError
from grayscale.inventory import EmotionInventory

logger = logging.getLogger(__name__)

CLS_TOKEN = "<cls>"
SPEAKER_TOKEN = "<spk:{}>"
SPEAKER_TOKEN_RE = re.compile(r"^<spk:\d+>$")
DEFAULT_WINDOW = 12
FUTURE_TURNS_CHOICES = (0, 2)

_WS = re.compile(r"\s+")


@dataclass(frozen=True)
class Utterance:
    speaker_id: str
    text: str
    gold: int


@dataclass(frozen=True)
class Dialogue:
    dialogue_id: str
    turns: tuple[Utterance, ...]

    def __len__(self):
        return len(self.turns)

    def speaker_slots(self) -> dict[str, int]:
        """Speaker id -> ordinal of first appearance."""
        slots: dict[str, int] = {}
        for turn in self.turns:
            slots.setdefault(turn.speaker_id, len(slots))
        return slots


@dataclass(frozen=True)
class TrainingSample:
    sample_id: str
    rendered: str
    gold: int
    dialogue_id: str
    turn_index: int
    future_turns_used: int = 0


def normalize_text(text: str) -> str:
    return _WS.sub(" ", text).strip()


def parse_corpus(path, inventory: EmotionInventory) -> list[Dialogue]:
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"corpus file not found: {path}")
    grouped: dict[str, list[Utterance]] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"invalid JSON: {exc.msg}", path=path, line=lineno) from None
            if not isinstance(rec, dict):
                raise SchemaError("record must be a JSON object", path=path, line=lineno)
            missing = [f for f in ("dialogue_id", "speaker", "text", "emotion") if f not in rec]
            if missing:
                raise SchemaError(f"missing fields {missing}", path=path, line=lineno)
            text = normalize_text(str(rec["text"]))
            if not text:
                raise SchemaError("empty utterance text", path=path, line=lineno)
            emotion = str(rec["emotion"]).strip().lower()
            if emotion not in inventory.names:
                raise SchemaError(
                    f"emotion {rec['emotion']!r} not in inventory {list(inventory.names)}",
                    path=path,
                    line=lineno,
                )
            utt = Utterance(speaker_id=str(rec["speaker"]), text=text, gold=inventory.index(emotion))
            grouped.setdefault(str(rec["dialogue_id"]), []).append(utt)
    if not grouped:
        logger.warning("corpus %s is empty", path)
    return [Dialogue(did, tuple(turns)) for did, turns in grouped.items()]


def _segment(slots, turn) -> str:
    return f" {SPEAKER_TOKEN.format(slots[turn.speaker_id])} {turn.text}"


def render_input(d: Dialogue, t: int, future_turns: int = 0, window: int = DEFAULT_WINDOW) -> TrainingSample:
    """Classification marker, then speaker-tagged context up to turn ``t``.

    With ``future_turns=2`` up to two following turns are appended in the
    same format.
    """
    if not 0 <= t < len(d.turns):
        raise InputError(f"turn {t} out of range for dialogue {d.dialogue_id!r} of length {len(d.turns)}")
    if future_turns not in FUTURE_TURNS_CHOICES:
        raise InputError(f"future_turns must be one of {FUTURE_TURNS_CHOICES}, got {future_turns!r}")
    if window < 1:
        raise InputError(f"window must be >= 1, got {window}")
    slots = d.speaker_slots()
    parts = [CLS_TOKEN]
    for j in range(max(0, t - window + 1), t + 1):
        parts.append(_segment(slots, d.turns[j]))
    future = d.turns[t + 1 : t + 1 + future_turns]
    for turn in future:
        parts.append(_segment(slots, turn))
    return TrainingSample(
        sample_id=f"{d.dialogue_id}:{t}",
        rendered="".join(parts),
        gold=d.turns[t].gold,
        dialogue_id=d.dialogue_id,
        turn_index=t,
        future_turns_used=len(future),
    )


def enumerate_samples(
    corpus: Sequence[Dialogue], future_turns: int = 0, window: int = DEFAULT_WINDOW
) -> list[TrainingSample]:
    return [
        render_input(d, t, future_turns=future_turns, window=window)
        for d in corpus
        for t in range(len(d.turns))
    ]


def is_marker(token: str) -> bool:
    return token == CLS_TOKEN or bool(SPEAKER_TOKEN_RE.match(token))
