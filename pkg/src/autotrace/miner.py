"""Non-overlapping repeated sub-string mining over token strings.

The pipeline is suffix array -> LCP -> two candidates per rank-adjacent
suffix pair -> greedy longest-first disjoint selection.  The heavy lifting
lives in a kernel module: the compiled ``_kernels`` extension when it is
importable, otherwise the numpy fallback in ``_kernels_py``.  Set
``AUTOTRACE_PURE=1`` to force the fallback.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from types import ModuleType
from typing import Sequence

import numpy as np

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

if _compiled is not None and os.environ.get("AUTOTRACE_PURE") != "1":
    kernels: ModuleType = _compiled
    BACKEND = "compiled"
else:
    kernels = _kernels_py
    BACKEND = "python"


def get_kernels(name: str) -> ModuleType:
    if name == "python":
        return _kernels_py
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


def available_backends() -> list[str]:
    return ["python"] + (["compiled"] if _compiled is not None else [])


@dataclass(frozen=True)
class SuffixStructures:
    sa: np.ndarray
    lcp: np.ndarray


@dataclass(frozen=True, order=True)
class RepeatCandidate:
    length: int
    substring_id: int
    start: int


@dataclass
class Repeat:
    tokens: tuple[int, ...]
    starts: list[int] = field(default_factory=list)

    @property
    def length(self) -> int:
        return len(self.tokens)


@dataclass
class RepeatResult:
    """Selected repeats, in the order they were first selected.

    ``selections`` keeps the raw (length, id, start) picks; ``repeats``
    groups them per distinct sub-string.
    """

    n: int
    repeats: list[Repeat] = field(default_factory=list)
    selections: list[RepeatCandidate] = field(default_factory=list)

    def intervals(self) -> list[tuple[int, int]]:
        return sorted((c.start, c.start + c.length) for c in self.selections)

    def as_dict(self) -> dict[tuple[int, ...], list[int]]:
        return {r.tokens: sorted(r.starts) for r in self.repeats}


def densify(s: Sequence) -> np.ndarray:
    """Map tokens to dense int64 symbols, preserving their numeric order."""
    if isinstance(s, str):
        raw = np.fromiter((ord(c) for c in s), dtype=np.uint64, count=len(s))
    elif isinstance(s, np.ndarray):
        raw = s.astype(np.uint64, copy=False)
    else:
        raw = np.fromiter(s, dtype=np.uint64, count=len(s))
    if raw.size == 0:
        return np.empty(0, dtype=np.int64)
    _, inverse = np.unique(raw, return_inverse=True)
    return inverse.astype(np.int64).reshape(-1)


def build_suffix_structures(s: Sequence, backend: ModuleType | None = None) -> SuffixStructures:
    k = backend or kernels
    dense = densify(s)
    sa = k.suffix_array(dense)
    return SuffixStructures(sa, k.lcp_array(dense, sa))


def generate_candidates(s: Sequence, min_len: int = 0, backend: ModuleType | None = None) -> list[RepeatCandidate]:
    """All candidates in suffix-array order, with their dense sub-string ids."""
    k = backend or kernels
    dense = densify(s)
    sa = k.suffix_array(dense)
    lcp = k.lcp_array(dense, sa)
    lens, starts = k.candidates(sa, lcp, min_len)
    if min_len < 1:
        ids = np.full(len(lens), -1, dtype=np.int64)
        real = lens > 0
        if real.any():
            ids[real] = k.substring_ids(sa, lcp, lens[real], starts[real])
    else:
        ids = k.substring_ids(sa, lcp, lens, starts)
    return [RepeatCandidate(int(a), int(b), int(c)) for a, b, c in zip(lens, ids, starts)]


def find_repeats(s: Sequence, min_len: int = 1, backend: ModuleType | None = None) -> RepeatResult:
    if min_len < 1:
        raise ValueError("min_len must be >= 1")
    k = backend or kernels
    tokens = list(s) if not isinstance(s, np.ndarray) else s.tolist()
    if isinstance(s, str):
        tokens = [ord(c) for c in s]
    n = len(tokens)
    result = RepeatResult(n)
    if n < 2 * min_len:
        return result
    lens, ids, starts = k.mine(densify(s), min_len)
    by_id: dict[tuple[int, int], Repeat] = {}
    for length, ident, start in zip(lens.tolist(), ids.tolist(), starts.tolist()):
        result.selections.append(RepeatCandidate(length, ident, start))
        rep = by_id.get((length, ident))
        if rep is None:
            rep = by_id[(length, ident)] = Repeat(tuple(tokens[start : start + length]))
            result.repeats.append(rep)
        rep.starts.append(start)
    return result


def coverage_of(result: RepeatResult, n: int | None = None) -> int:
    total = sum(c.length for c in result.selections)
    if n is not None and total > n:
        raise ValueError("selected intervals exceed the string length")
    return total
