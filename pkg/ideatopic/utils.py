"""ideatopic - Topic mining for brainstorming transcripts.

This module provides utility functions and the exception hierarchy used
throughout the package.
"""

from __future__ import annotations

import hashlib
import json
import sys
import warnings
from pathlib import Path
from typing import Any

try:  # pragma: no cover
    if sys.version_info >= (3, 11):
        import tomllib
    else:
        import tomli as tomllib
    HAS_TOML = True
except ImportError:  # pragma: no cover
    HAS_TOML = False


class IdeaTopicError(Exception):
    """Base class for all errors raised by `ideatopic`."""


class ConfigError(IdeaTopicError, ValueError):
    """Raised when the pipeline configuration is invalid."""


class StageError(IdeaTopicError, RuntimeError):
    """Raised when a pipeline stage fails; carries the stage name."""

    def __init__(self, stage: str, message: str) -> None:
        super().__init__(f"Stage `{stage}` failed: {message}")
        self.stage = stage


def _simple_warning_format(
    message: Warning | str,
    category: type[Warning],  # noqa: ARG001
    filename: str,
    lineno: int,
    line: str | None = None,  # noqa: ARG001
) -> str:  # pragma: no cover
    """Format warnings without code context."""
    return (
        f"---------------------\n"
        f"⚠️  *** WARNING *** ⚠️\n"
        f"{message}\n"
        f"Location: {filename}:{lineno}\n"
        f"---------------------\n"
    )


def warn(
    message: str | Warning,
    category: type[Warning] = UserWarning,
    stacklevel: int = 1,
) -> None:
    """Emit a warning with a custom format specific to this package."""
    original_format = warnings.formatwarning
    warnings.formatwarning = _simple_warning_format
    try:
        warnings.warn(message, category, stacklevel=stacklevel + 1)
    finally:
        warnings.formatwarning = original_format


def sha256_file(path: str | Path) -> str:
    """Return the hex SHA-256 digest of a file's contents."""
    digest = hashlib.sha256()
    with Path(path).open("rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def sha256_json(data: Any) -> str:
    """Return the hex SHA-256 digest of a canonical JSON encoding of `data`."""
    encoded = json.dumps(data, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(encoded.encode()).hexdigest()


def load_toml_table(path: Path) -> dict[str, Any]:
    """Return the `[tool.ideatopic]` table of a `pyproject.toml` file."""
    if not HAS_TOML:  # pragma: no cover
        msg = (
            "❌ No toml support found in your Python installation."
            " Please install it with `pip install tomli` or use a YAML config file."
        )
        raise ImportError(msg)
    with path.open("rb") as f:
        data = tomllib.load(f)
    return dict(data.get("tool", {}).get("ideatopic", {}))


def parse_int_list(value: str) -> list[int]:
    """Parse a comma-separated list of integers, e.g. `2,4,6`."""
    try:
        return [int(part) for part in value.split(",") if part.strip()]
    except ValueError:
        msg = f"Invalid comma-separated integer list: '{value}'"
        raise ValueError(msg) from None


def get_package_version(package_name: str) -> str | None:
    """Returns the version of the given package.

    Parameters
    ----------
    package_name
        The name of the package to find the version of.

    Returns
    -------
    The version of the package, or None if the package is not found.

    """
    import importlib.metadata

    try:
        return importlib.metadata.version(package_name)
    except importlib.metadata.PackageNotFoundError:
        return None
