"""Grayscale (soft) emotion labels for emotion recognition in conversation."""

from grayscale.errors import (
    ConfigurationError,
    DataError,
    DegenerateInputError,
    GrayscaleError,
    InputError,
    MissingEmbeddingError,
    ParseError,
    SchemaError,
    UndefinedMetricError,
)
from grayscale.inventory import EmotionInventory, builtin_inventory, load_inventory
from grayscale.labels import (
    GrayscaleLabel,
    LabelMethod,
    ScoreVector,
    build_label,
    category_scores,
    normalize_linear,
    self_adjust,
    softmax_label,
    word_embedding_scores,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "DataError",
    "DegenerateInputError",
    "EmotionInventory",
    "GrayscaleError",
    "GrayscaleLabel",
    "InputError",
    "LabelMethod",
    "MissingEmbeddingError",
    "ParseError",
    "SchemaError",
    "ScoreVector",
    "UndefinedMetricError",
    "build_label",
    "builtin_inventory",
    "category_scores",
    "load_inventory",
    "normalize_linear",
    "self_adjust",
    "softmax_label",
    "word_embedding_scores",
]
