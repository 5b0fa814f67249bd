"""On-disk cache with atomic publish (write to a temp file, then rename)."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

ENV_VAR = "DVLAB_CACHE_DIR"


def cache_dir() -> Path:
    root = os.environ.get(ENV_VAR)
    path = Path(root) if root else Path.home() / ".cache" / "dvlab"
    path.mkdir(parents=True, exist_ok=True)
    return path


def _atomic_write(path: Path, write) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            write(fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: Path, obj) -> None:
    data = json.dumps(obj, indent=1, sort_keys=True).encode()
    _atomic_write(Path(path), lambda fh: fh.write(data))


def read_json(path: Path):
    with open(path, "rb") as fh:
        return json.load(fh)


def write_array(path: Path, arr: np.ndarray) -> None:
    _atomic_write(Path(path), lambda fh: np.save(fh, arr, allow_pickle=False))


def read_array(path: Path) -> np.ndarray:
    return np.load(path, allow_pickle=False)
