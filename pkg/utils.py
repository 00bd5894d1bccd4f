import hashlib
import json
import platform
from importlib import metadata
from pathlib import Path
from typing import Any, Dict, Mapping, Sequence

import numpy as np

from core.errors import ConfigError

CODE_VERSION = "1.0.0"


def write_series(path: Path, columns: Mapping[str, Sequence[float]]) -> Path:
    """
    Writes equal-length columns as a CSV file with a header row.

    Values are written with 17 significant digits, so identical runs give
    byte-identical files.

    Args:
        path: Destination file.
        columns: Column name to values, in output order.

    Returns:
        The path written.
    """
    names = list(columns)
    data = np.column_stack([np.asarray(columns[n], dtype=float) for n in names])
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(
        path, data, fmt="%.17g", delimiter=",", header=",".join(names), comments=""
    )
    return path


def read_series(path: Path) -> Dict[str, np.ndarray]:
    """
    Reads a CSV file with a header row into named float columns.

    Raises:
        ConfigError: If the file is missing or cannot be parsed.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Series file not found: {path}")
    try:
        table = np.genfromtxt(path, delimiter=",", names=True, dtype=float)
    except ValueError as e:
        raise ConfigError(f"Could not parse series file {path}: {e}") from e
    table = np.atleast_1d(table)
    return {name: np.asarray(table[name], dtype=float) for name in table.dtype.names}


def config_hash(config: Mapping[str, Any]) -> str:
    """SHA256 of the canonical JSON form of a configuration mapping."""
    canonical = json.dumps(config, sort_keys=True, default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def provenance(config: Mapping[str, Any]) -> Dict[str, Any]:
    """
    Collects the provenance block of a report.

    Returns:
        Config hash, code version, and the versions of the numerical stack.
    """
    versions = {}
    for package in ("numpy", "scipy", "pydantic"):
        try:
            versions[package] = metadata.version(package)
        except metadata.PackageNotFoundError:
            versions[package] = "unknown"
    return {
        "config_hash": config_hash(config),
        "code_version": CODE_VERSION,
        "python": platform.python_version(),
        "packages": versions,
    }
