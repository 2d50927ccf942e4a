"""Access to the bundled toy corpus, embeddings and inventory."""

from importlib import resources
from pathlib import Path

BUNDLED_PREFIX = "bundled:"


def bundled_path(name: str) -> Path:
    return Path(str(resources.files("grayscale") / "data" / name))


def resolve_path(spec, base=None) -> Path:
    """Resolve ``bundled:<file>`` to package data; relative paths against ``base``."""
    spec = str(spec)
    if spec.startswith(BUNDLED_PREFIX):
        return bundled_path(spec[len(BUNDLED_PREFIX):])
    path = Path(spec)
    if base is not None and not path.is_absolute():
        path = Path(base) / path
    return path
