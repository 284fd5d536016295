"""Residual reports, deterministic JSON serialization and sample fan-out."""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable


def worker_count() -> int:
    env = os.environ.get("RMX_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return min(4, os.cpu_count() or 1)


def parallel_map(fn: Callable, items: Iterable) -> list:
    """Order-preserving map; results never depend on the worker count."""
    items = list(items)
    workers = worker_count()
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def make_report(family: str, identity: str, samples: int, max_residual: float,
                seed: int, tol: float | None = None) -> dict:
    rep = {"family": family, "identity": identity, "samples": int(samples),
           "max_residual": float(max_residual), "seed": int(seed)}
    if tol is not None:
        rep["tolerance"] = float(tol)
        rep["passed"] = bool(max_residual < tol)
    return rep


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, repr-precision floats."""
    return json.dumps(obj, sort_keys=True, indent=2, default=_default)


def _default(o):
    if isinstance(o, complex):
        return [o.real, o.imag]
    if hasattr(o, "tolist"):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def write_atomic(path: str, text: str) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)
