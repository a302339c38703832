"""On-disk cache of Hecke matrices.

One JSON file per (p, k, variant, precision, guard, version).  Matrices are
stored as rows of space-separated decimal strings, under a header that
repeats the key and a sha256 of the matrix text, so files are portable and
can be compared byte for byte.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .arith import PadicMatrix, ResidueRing

log = logging.getLogger(__name__)

CACHE_FORMAT = "eisgen-hecke-cache"
CACHE_VERSION = 1
CACHE_ENV = "EISGEN_CACHE"


def default_cache_dir() -> Path | None:
    v = os.environ.get(CACHE_ENV)
    return Path(v) if v else None


def _rows(m: PadicMatrix) -> list[str]:
    return [" ".join(str(int(x)) for x in row) for row in m.entries]


def _matrix_hash(ts: list[list[str]], up: list[str]) -> str:
    h = hashlib.sha256()
    for block in ts + [up]:
        h.update(("\n".join(block) + "\n--\n").encode())
    return h.hexdigest()


def cache_path(root: Path, p: int, k: int, variant: str, precision: int, guard: int) -> Path:
    return Path(root) / f"hecke_p{p}_k{k}_{variant}_B{precision}_g{guard}_v{__version__}.json"


def save(root: Path, p: int, k: int, variant: str, precision: int, guard: int, mats: dict) -> Path:
    ts = [_rows(t) for t in mats["T"]]
    up = _rows(mats["U"])
    doc = {
        "format": CACHE_FORMAT,
        "format_version": CACHE_VERSION,
        "tool_version": __version__,
        "p": p, "k": k, "variant": variant, "precision": precision, "guard": guard,
        "d": mats["T"][0].rows if mats["T"] else 0,
        "dimension_formula": mats["dimension_formula"],
        "basis_hash": _matrix_hash(ts, up),
        "T": ts,
        "U": up,
    }
    path = cache_path(root, p, k, variant, precision, guard)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    with os.fdopen(fd, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
    os.replace(tmp, path)
    return path


def _parse(block: list[str], d: int, ring: ResidueRing) -> PadicMatrix:
    arr = np.array([[int(x) for x in row.split()] for row in block], dtype=object).reshape(d, d)
    if np.any(arr < 0) or np.any(arr >= ring.modulus):
        raise ValueError("entry out of range")
    return PadicMatrix(arr, ring)


def load(root: Path, p: int, k: int, variant: str, precision: int, guard: int) -> dict | None:
    """Cached matrices, or None when absent; a damaged file is logged and ignored."""
    path = cache_path(root, p, k, variant, precision, guard)
    if not path.exists():
        return None
    try:
        doc = json.loads(path.read_text())
        key = (doc["format"], doc["format_version"], doc["tool_version"], doc["p"], doc["k"],
               doc["variant"], doc["precision"], doc["guard"])
        want = (CACHE_FORMAT, CACHE_VERSION, __version__, p, k, variant, precision, guard)
        if key != want:
            raise ValueError(f"header mismatch {key} != {want}")
        if _matrix_hash(doc["T"], doc["U"]) != doc["basis_hash"]:
            raise ValueError("matrix hash mismatch")
        ring = ResidueRing(p, precision)
        d = int(doc["d"])
        ts = [_parse(b, d, ring) for b in doc["T"]]
        up = _parse(doc["U"], d, ring)
    except (ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
        log.warning("cache file %s is corrupt (%s); rebuilding", path, exc)
        return None
    return {"T": ts, "U": up, "dimension_formula": int(doc["dimension_formula"]), "space": None}
