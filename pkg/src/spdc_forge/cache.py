"""Optional on-disk memoization of expensive decomposition tensors.

Set the environment variable ``SPDC_FORGE_CACHE`` to a directory to enable
caching; keys are content hashes of all parameters entering the tensors.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

import numpy as np


def cache_dir() -> Path | None:
    d = os.environ.get("SPDC_FORGE_CACHE")
    if not d:
        return None
    p = Path(d)
    p.mkdir(parents=True, exist_ok=True)
    return p


def cache_key(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:32]


def load_arrays(key: str) -> dict | None:
    d = cache_dir()
    if d is None:
        return None
    path = d / f"{key}.npz"
    if not path.exists():
        return None
    with np.load(path, allow_pickle=False) as z:
        return {k: z[k] for k in z.files}


def save_arrays(key: str, arrays: dict) -> None:
    d = cache_dir()
    if d is None:
        return
    tmp = d / f"{key}.tmp.npz"
    np.savez(tmp, **arrays)
    tmp.replace(d / f"{key}.npz")
