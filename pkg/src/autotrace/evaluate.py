"""Checking and scoring trace selections against the coverage objective.

A matching assigns each trace a set of half-open intervals of the token
string.  It is valid when every trace meets the minimum length, every
interval spells its trace, and no two intervals overlap.  Quality is
measured by coverage, then by the number of matched intervals, then by
how few distinct traces are used.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .miner import RepeatResult
from .streamio import AnnotatedEvent, TaskEvent, TraceBegin, TraceEnd
from .tokens import hash_task

Interval = tuple[int, int]
Number = Union[int, float, Fraction]


@dataclass
class Matching:
    traces: dict[tuple[int, ...], list[Interval]] = field(default_factory=dict)

    def add(self, trace: tuple[int, ...], interval: Interval) -> None:
        self.traces.setdefault(tuple(trace), []).append(interval)

    def intervals(self) -> list[Interval]:
        return sorted(iv for ivs in self.traces.values() for iv in ivs)

    def coverage(self) -> int:
        return sum(b - a for a, b in self.intervals())

    def interval_count(self) -> int:
        return sum(len(v) for v in self.traces.values())

    def trace_count(self) -> int:
        return sum(1 for v in self.traces.values() if v)

    def objective(self) -> tuple[int, int, int]:
        return self.coverage(), self.interval_count(), -self.trace_count()


@dataclass(frozen=True)
class Violation:
    kind: str  # "min_length", "bounds", "content" or "disjointness"
    detail: str
    indices: tuple[int, ...] = ()


def validate_matching(m: Matching, s: Sequence, min_len: int) -> Violation | None:
    """First violated constraint, or None for a valid matching."""
    n = len(s)
    for trace, ivs in m.traces.items():
        if ivs and len(trace) < min_len:
            return Violation("min_length", f"trace of length {len(trace)} < {min_len}", ivs[0])
        for a, b in ivs:
            if not 0 <= a < b <= n:
                return Violation("bounds", f"interval [{a}, {b}) outside [0, {n})", (a, b))
            if b - a != len(trace) or tuple(s[a:b]) != trace:
                return Violation("content", f"interval [{a}, {b}) does not spell its trace", (a, b))
    ivs = m.intervals()
    for (a1, b1), (a2, b2) in zip(ivs, ivs[1:]):
        if a2 < b1:
            return Violation("disjointness", f"[{a1}, {b1}) overlaps [{a2}, {b2})", (a1, b1, a2, b2))
    return None


def matching_from_result(result: RepeatResult) -> Matching:
    m = Matching()
    for rep in result.repeats:
        for start in rep.starts:
            m.add(rep.tokens, (start, start + rep.length))
    return m


class StreamStructureError(ValueError):
    pass


def traced_mask(events: Iterable[AnnotatedEvent]) -> list[tuple[bool, bool | None]]:
    """Per task: (inside a trace, first occurrence flag of that trace or None).

    Raises StreamStructureError on nested, unmatched or empty traces.
    """
    out: list[tuple[bool, bool | None]] = []
    open_id: int | None = None
    first: bool | None = None
    body = 0
    for e in events:
        if isinstance(e, TraceBegin):
            if open_id is not None:
                raise StreamStructureError(f"tbegin {e.trace_id} nested inside trace {open_id}")
            open_id, first, body = e.trace_id, e.first_occurrence, 0
        elif isinstance(e, TraceEnd):
            if open_id != e.trace_id:
                raise StreamStructureError(f"tend {e.trace_id} does not close an open trace")
            if body == 0:
                raise StreamStructureError(f"trace {e.trace_id} is empty")
            open_id = None
        elif isinstance(e, TaskEvent):
            out.append((open_id is not None, first if open_id is not None else None))
            body += 1
        else:
            raise StreamStructureError(f"unknown event {e!r}")
    if open_id is not None:
        raise StreamStructureError(f"trace {open_id} is never closed")
    return out


def matching_from_events(events: Sequence[AnnotatedEvent]) -> tuple[list[int], Matching]:
    """Token string and trace matching implied by an annotated stream."""
    tokens: list[int] = []
    m = Matching()
    by_id: dict[int, tuple[int, ...]] = {}
    start: int | None = None
    for e in events:
        if isinstance(e, TaskEvent):
            tokens.append(hash_task(e.task))
        elif isinstance(e, TraceBegin):
            if start is not None:
                raise StreamStructureError("nested tbegin")
            start = len(tokens)
        elif isinstance(e, TraceEnd):
            if start is None:
                raise StreamStructureError("tend without tbegin")
            body = tuple(tokens[start:])
            if by_id.setdefault(e.trace_id, body) != body:
                raise StreamStructureError(f"trace id {e.trace_id} wraps two different task sequences")
            m.add(body, (start, len(tokens)))
            start = None
    if start is not None:
        raise StreamStructureError("unterminated trace")
    return tokens, m


class InstanceTooLarge(ValueError):
    pass


def _disjoint_repeats(s: tuple, min_len: int) -> set[tuple]:
    """Sub-strings of length >= min_len with two non-overlapping occurrences."""
    n = len(s)
    found = set()
    for length in range(min_len, n // 2 + 1):
        first: dict[tuple, int] = {}
        for i in range(n - length + 1):
            sub = s[i : i + length]
            if i - first.setdefault(sub, i) >= length:
                found.add(sub)
    return found


def brute_force_best(s: Sequence, min_len: int, max_n: int = 30) -> Matching:
    """Exhaustively optimal matching for tiny strings.

    An interval is usable when its content, of length >= min_len, has two
    non-overlapping occurrences somewhere in ``s``; the matching need not
    use both.  Maximizes coverage, then the number of intervals, then
    minimizes the number of distinct traces.
    """
    s = tuple(s)
    n = len(s)
    if n > max_n:
        raise InstanceTooLarge(f"brute force limited to n <= {max_n}, got {n}")
    if min_len < 1:
        raise ValueError("min_len must be >= 1")
    usable = _disjoint_repeats(s, min_len)
    moves = [[L for L in range(min_len, n - i + 1) if s[i : i + L] in usable] for i in range(n + 1)]
    # best (coverage, intervals) for each suffix, ignoring the trace count
    opt = [(0, 0)] * (n + 1)
    for i in range(n - 1, -1, -1):
        best = opt[i + 1]
        for L in moves[i]:
            best = max(best, (L + opt[i + L][0], 1 + opt[i + L][1]))
        opt[i] = best

    memo: dict[tuple[int, frozenset], tuple[int, tuple]] = {}

    def fewest(i: int, used: frozenset) -> tuple[int, tuple]:
        # (extra distinct traces, chosen (start, length) pairs) among optimal completions
        if i == n:
            return 0, ()
        key = (i, used)
        if key in memo:
            return memo[key]
        best: tuple[int, tuple] | None = None
        if opt[i + 1] == opt[i]:
            best = fewest(i + 1, used)
        for L in moves[i]:
            if (L + opt[i + L][0], 1 + opt[i + L][1]) != opt[i]:
                continue
            sub = s[i : i + L]
            extra = 0 if sub in used else 1
            rest, picks = fewest(i + L, used | {sub})
            cand = (extra + rest, ((i, L),) + picks)
            if best is None or cand[0] < best[0]:
                best = cand
        memo[key] = best
        return best

    m = Matching()
    for start, L in fewest(0, frozenset())[1]:
        m.add(s[start : start + L], (start, start + L))
    return m


@dataclass(frozen=True)
class CostParams:
    alpha: Number = Fraction(1, 1000)
    alpha_m: Number = Fraction(12, 10000)
    alpha_r: Number = Fraction(1, 10000)
    c: Number = Fraction(2, 10000)

    def __post_init__(self) -> None:
        if not self.alpha_r < self.alpha <= self.alpha_m:
            raise ValueError("cost parameters need alpha_r < alpha <= alpha_m")
        if self.c < 0:
            raise ValueError("replay constant c must be non-negative")


@dataclass
class CostReport:
    total: Number
    rows: list[tuple[int, str, Number]]
    tasks: int
    replays: int

    def speedup_vs_untraced(self, params: CostParams) -> Number:
        return (params.alpha * self.tasks) / self.total if self.total else 0


def simulate_cost(events: Iterable[AnnotatedEvent], p: CostParams = CostParams()) -> CostReport:
    """Charge every task by how it reaches the runtime.

    Untraced tasks cost alpha, tasks in a recording cost alpha_m, tasks in
    a replay cost alpha_r, and each replay adds c once.  Rows are
    (task index, kind, charge); the c row carries the replay's first index.
    """
    rows: list[tuple[int, str, Number]] = []
    total: Number = 0
    index = 0
    replays = 0
    open_id: int | None = None
    recording = False
    body = 0
    for e in events:
        if isinstance(e, TraceBegin):
            if open_id is not None:
                raise StreamStructureError(f"tbegin {e.trace_id} nested inside trace {open_id}")
            open_id, recording, body = e.trace_id, e.first_occurrence, 0
            if not recording:
                rows.append((index, "replay_overhead", p.c))
                total += p.c
                replays += 1
        elif isinstance(e, TraceEnd):
            if open_id != e.trace_id or body == 0:
                raise StreamStructureError(f"malformed tend {e.trace_id}")
            open_id = None
        elif isinstance(e, TaskEvent):
            if open_id is None:
                kind, charge = "untraced", p.alpha
            elif recording:
                kind, charge = "record", p.alpha_m
            else:
                kind, charge = "replay", p.alpha_r
            rows.append((index, kind, charge))
            total += charge
            index += 1
            body += 1
        else:
            raise StreamStructureError(f"unknown event {e!r}")
    if open_id is not None:
        raise StreamStructureError(f"trace {open_id} is never closed")
    return CostReport(total, rows, index, replays)


def traced_fraction_report(events: Iterable[AnnotatedEvent], window: int = 5000) -> list[tuple[int, float]]:
    """For each task index, the share of the last ``window`` tasks that were traced.

    Early indices divide by the number of tasks seen so far.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    mask = [inside for inside, _ in traced_mask(events)]
    out = []
    prefix = [0]
    for inside in mask:
        prefix.append(prefix[-1] + inside)
    for i in range(len(mask)):
        lo = max(0, i + 1 - window)
        out.append((i, (prefix[i + 1] - prefix[lo]) / (i + 1 - lo)))
    return out


def write_cost_csv(path, report: CostReport) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "kind", "charge"])
        for index, kind, charge in report.rows:
            w.writerow([index, kind, repr(float(charge))])


def write_fraction_csv(path, series: Sequence[tuple[int, float]]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "fraction"])
        for index, frac in series:
            w.writerow([index, repr(float(frac))])
