"""Small shared helpers: [x]+, deterministic JSON/CSV formatting, atomic writes."""
from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Sequence

import numpy as np


def plus(x: float) -> float:
    """[x]+ = max(x, 0)."""
    return x if x > 0.0 else 0.0


def fmt_float(v: float, raw: bool = False) -> str:
    if raw:
        return repr(float(v))
    return f"{float(v):.6f}"


def _dump(obj: Any, raw: bool, parts: list[str]) -> None:
    if isinstance(obj, dict):
        parts.append("{")
        for k, (key, val) in enumerate(obj.items()):
            if k:
                parts.append(", ")
            parts.append(json.dumps(str(key)))
            parts.append(": ")
            _dump(val, raw, parts)
        parts.append("}")
    elif isinstance(obj, (list, tuple)):
        parts.append("[")
        for k, val in enumerate(obj):
            if k:
                parts.append(", ")
            _dump(val, raw, parts)
        parts.append("]")
    elif isinstance(obj, bool):
        parts.append("true" if obj else "false")
    elif obj is None:
        parts.append("null")
    elif isinstance(obj, (int, np.integer)):
        parts.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        parts.append(fmt_float(float(obj), raw))
    elif isinstance(obj, str):
        parts.append(json.dumps(obj))
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def json_dumps(obj: Any, raw: bool = False) -> str:
    """Serialize to JSON with deterministic key order and float formatting.

    Floats are written with 6 fixed decimals unless raw=True (full repr),
    so identical invocations produce byte-identical documents.
    """
    parts: list[str] = []
    _dump(obj, raw, parts)
    parts.append("\n")
    return "".join(parts)


def write_text_atomic(path: str, text: str) -> None:
    """Write via a temp file and rename so readers never see partial output."""
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def thread_count() -> int:
    raw = os.environ.get("CAPBOUND_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def parallel_map(fn: Callable, items: Sequence) -> list:
    """Map preserving input order; CAPBOUND_THREADS>1 enables a thread pool.

    Results are collected by index, so the reduction order (and therefore
    any downstream output) does not depend on the schedule.
    """
    n = thread_count()
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
