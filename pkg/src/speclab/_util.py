"""Shared plumbing: deterministic RNG, bounded parallel maps, canonical JSON."""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence

import numpy as np

THREADS_ENV = "SPECLAB_THREADS"


class NumericalError(RuntimeError):
    """Internal numerical breakdown (non-convergence, broken monotonicity)."""


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator; identical draws for identical (seed, stream)."""
    key = (int(seed) + int(stream) * 0x9E3779B97F4A7C15) % (1 << 64)
    return np.random.Generator(np.random.Philox(key=key))


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "").strip()
    if raw:
        try:
            n = int(raw)
        except ValueError as exc:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc
        if n < 1:
            raise ValueError(f"{THREADS_ENV} must be >= 1, got {n}")
        return n
    return os.cpu_count() or 1


def parallel_map(fn: Callable, items: Sequence) -> list:
    """Order-preserving map over items, bounded by SPECLAB_THREADS workers."""
    workers = min(worker_count(), max(len(items), 1))
    if workers == 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def canonical_json(obj) -> str:
    """Deterministic JSON text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, separators=(",", ": "), allow_nan=False) + "\n"


def jsonable(value):
    """Coerce numpy scalars/arrays and nested containers to plain JSON types."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    return value


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """UTF-8, LF line endings, fixed column order."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_csv_cell(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _csv_cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)
