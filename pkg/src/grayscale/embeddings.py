"""Word vectors in the plain text format (``word v1 ... vd`` per line).

The optional ``count dim`` header that FastText and word2vec write is
auto-detected. Lookups are case-insensitive: keys are lowercased on load and
the first spelling seen wins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, Optional

import numpy as np

from grayscale.errors import (
    ConfigurationError,
    DataError,
    DegenerateInputError,
    InputError,
    MissingEmbeddingError,
    ParseError,
)

# Fallback spellings for the emotion names of the built-in inventories.
DEFAULT_ALIASES: Mapping[str, tuple[str, ...]] = MappingProxyType(
    {
        "happy": ("happy", "joy"),
        "joy": ("joy", "happy"),
        "joyful": ("joyful", "joy", "happy"),
        "sad": ("sad", "sadness"),
        "sadness": ("sadness", "sad"),
        "anger": ("anger", "angry"),
        "angry": ("angry", "anger"),
        "mad": ("mad", "angry"),
        "neutral": ("neutral", "neutrality"),
        "neutrality": ("neutrality", "neutral"),
        "scared": ("scared", "fear"),
        "fear": ("fear", "scared"),
        "surprise": ("surprise", "surprised"),
        "disgust": ("disgust", "disgusted"),
        "excited": ("excited",),
        "frustrated": ("frustrated",),
        "peaceful": ("peaceful",),
        "powerful": ("powerful",),
    }
)


@dataclass(frozen=True, eq=False)
class EmbeddingTable:
    dim: int
    vectors: Mapping[str, np.ndarray]

    def __post_init__(self):
        if not isinstance(self.dim, int) or self.dim <= 0:
            raise InputError(f"embedding dim must be a positive integer, got {self.dim!r}")
        frozen = {}
        any_nonzero = False
        for word, vec in self.vectors.items():
            v = np.array(vec, dtype=np.float64)
            if v.shape != (self.dim,):
                raise InputError(f"vector for {word!r} has shape {v.shape}, expected ({self.dim},)")
            if not np.all(np.isfinite(v)):
                raise InputError(f"vector for {word!r} has non-finite entries")
            v.setflags(write=False)
            frozen[word] = v
            any_nonzero = any_nonzero or bool(np.any(v))
        if not any_nonzero:
            raise DegenerateInputError("embedding table has no nonzero vector")
        object.__setattr__(self, "vectors", MappingProxyType(frozen))

    def __contains__(self, word):
        return word.lower() in self.vectors

    def __len__(self):
        return len(self.vectors)

    def get(self, word) -> Optional[np.ndarray]:
        return self.vectors.get(word.lower())


def _is_header(tokens) -> bool:
    if len(tokens) != 2:
        return False
    try:
        int(tokens[0])
        int(tokens[1])
    except ValueError:
        return False
    return True


def load_embeddings(path, vocabulary_filter: Optional[Iterable[str]] = None) -> EmbeddingTable:
    path = Path(path)
    wanted = None if vocabulary_filter is None else {w.lower() for w in vocabulary_filter}
    vectors: dict[str, np.ndarray] = {}
    dim = None
    try:
        fh = path.open(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigurationError(f"embeddings file not found: {path}") from None
    with fh:
        for lineno, line in enumerate(fh, 1):
            tokens = line.split()
            if not tokens:
                continue
            if lineno == 1 and _is_header(tokens):
                dim = int(tokens[1])
                if dim <= 0:
                    raise ParseError(f"header declares dim {dim}", path=path, line=lineno)
                continue
            if len(tokens) < 2:
                raise ParseError("expected a word followed by its vector", path=path, line=lineno)
            word, fields = tokens[0], tokens[1:]
            if dim is None:
                dim = len(fields)
            if len(fields) != dim:
                raise ParseError(
                    f"expected {dim} components for {word!r}, got {len(fields)}", path=path, line=lineno
                )
            try:
                vec = np.array([float(x) for x in fields])
            except ValueError:
                raise ParseError(f"non-numeric component in vector for {word!r}", path=path, line=lineno) from None
            if not np.all(np.isfinite(vec)):
                raise ParseError(f"non-finite component in vector for {word!r}", path=path, line=lineno)
            key = word.lower()
            if wanted is not None and key not in wanted:
                continue
            vectors.setdefault(key, vec)
    if not vectors:
        raise DataError(f"no vectors loaded from {path}")
    return EmbeddingTable(dim=dim, vectors=vectors)


def save_embeddings(table: EmbeddingTable, path, header: bool = True) -> None:
    lines = []
    if header:
        lines.append(f"{len(table)} {table.dim}")
    for word, vec in table.vectors.items():
        lines.append(" ".join([word] + [f"{x:.9g}" for x in vec]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def cosine(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise InputError(f"cosine needs two vectors of equal length, got {a.shape} and {b.shape}")
    na = math.sqrt(float(np.dot(a, a)))
    nb = math.sqrt(float(np.dot(b, b)))
    if na == 0.0 or nb == 0.0:
        raise DegenerateInputError("cosine of a zero-norm vector is undefined")
    c = float(np.dot(a, b)) / (na * nb)
    return min(1.0, max(-1.0, c))


def _alias_keys(name, alias_map):
    tried = []
    aliases = DEFAULT_ALIASES if alias_map is None else alias_map
    entry = aliases.get(name, ())
    if isinstance(entry, str):
        entry = (entry,)
    for key in (*entry, name):
        key = key.lower()
        if key not in tried:
            tried.append(key)
    return tried


def merge_aliases(overrides: Optional[Mapping[str, object]]) -> dict:
    """Default alias map with user entries taking precedence."""
    merged = dict(DEFAULT_ALIASES)
    for name, value in (overrides or {}).items():
        merged[name.lower()] = (value,) if isinstance(value, str) else tuple(value)
    return merged


def emotion_vector(name: str, table: EmbeddingTable, alias_map=None) -> np.ndarray:
    """Vector for an emotion word, trying its aliases before the name itself."""
    tried = _alias_keys(name.lower(), alias_map)
    for key in tried:
        vec = table.vectors.get(key)
        if vec is not None:
            return vec
    raise MissingEmbeddingError(name, tried)
