"""Deterministic, atomic file artifacts.

Identical inputs must produce byte-identical outputs, so the npz writer pins
zip entry timestamps (np.savez stamps wall-clock time) and all writes go
through a temp-file + rename.
"""

from __future__ import annotations

import hashlib
import io
import json
import os
import tempfile
import zipfile
from pathlib import Path

import numpy as np

TOOL_NAME = "tbr"

_ZIP_EPOCH = (1980, 1, 1, 0, 0, 0)


def tool_version() -> str:
    from . import __version__

    return __version__


def canonical_json(obj) -> str:
    """JSON with sorted keys and no incidental whitespace variation."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=True)


def config_hash(config: dict) -> str:
    """Stable sha256 fingerprint of a configuration mapping."""
    return hashlib.sha256(canonical_json(config).encode()).hexdigest()[:16]


def meta_block(config: dict | None = None, **extra) -> dict:
    meta = {"tool": TOOL_NAME, "version": tool_version()}
    if config is not None:
        meta["config"] = config
        meta["config_hash"] = config_hash(config)
    meta.update(extra)
    return meta


def write_bytes_atomic(path, data: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_text_atomic(path, text: str) -> None:
    write_bytes_atomic(path, text.encode())


def write_json_atomic(path, obj) -> None:
    write_text_atomic(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def save_npz_deterministic(path, arrays: dict[str, np.ndarray]) -> None:
    """np.load-compatible .npz with fixed zip timestamps."""
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w", zipfile.ZIP_DEFLATED) as zf:
        for name in sorted(arrays):
            payload = io.BytesIO()
            np.save(payload, np.asarray(arrays[name]), allow_pickle=False)
            info = zipfile.ZipInfo(name + ".npy", date_time=_ZIP_EPOCH)
            info.compress_type = zipfile.ZIP_DEFLATED
            info.external_attr = 0o600 << 16
            zf.writestr(info, payload.getvalue())
    write_bytes_atomic(path, buf.getvalue())
