"""Slow, obviously-correct reference implementations used by the tests."""

from __future__ import annotations

from autotrace.streamio import TaskEvent, TraceBegin, TraceEnd
from autotrace.tokens import is_untraceable


def naive_suffix_array(s) -> list[int]:
    s = list(s)
    return sorted(range(len(s)), key=lambda i: s[i:])


def naive_lcp(s, sa) -> list[int]:
    s = list(s)
    out = []
    for a, b in zip(sa, sa[1:]):
        k = 0
        while a + k < len(s) and b + k < len(s) and s[a + k] == s[b + k]:
            k += 1
        out.append(k)
    return out


def longest_disjoint_repeat(s) -> int:
    """Longest L such that some length-L substring occurs twice without overlap."""
    s = tuple(s)
    n = len(s)
    for L in range(n // 2, 0, -1):
        seen: dict[tuple, int] = {}
        for i in range(n - L + 1):
            sub = s[i : i + L]
            j = seen.setdefault(sub, i)
            if i - j >= L:
                return L
    return 0


def has_disjoint_pair(s, sub) -> bool:
    s, sub = tuple(s), tuple(sub)
    L = len(sub)
    starts = [i for i in range(len(s) - L + 1) if s[i : i + L] == sub]
    return bool(starts) and starts[-1] - starts[0] >= L


def suffix_patterns(stream, patterns, floor=0):
    """Patterns that end at the last position of ``stream``, as (index, start)."""
    n = len(stream)
    hits = []
    for idx, p in enumerate(patterns):
        start = n - len(p)
        if start >= floor and tuple(stream[start:]) == tuple(p):
            hits.append((idx, start))
    return hits


def live_prefixes(stream, patterns, floor=0):
    """Starts s >= floor where stream[s:] is a proper prefix of some pattern."""
    n = len(stream)
    out = set()
    for s in range(floor, n):
        seg = tuple(stream[s:])
        for p in patterns:
            if len(p) > len(seg) and tuple(p[: len(seg)]) == seg:
                out.add(s)
    return sorted(out)


class ReferenceReplayer:
    """Explicit pointer-list replayer over a fixed pattern set.

    Every position keeps its own match attempt; nothing is shared.
    Decision rules: counts bump on every appearance, the best completed
    match is (score, -id, -start)-maximal, it waits while an unfinished
    match started no later could still finish with a higher score, and
    tasks no attempt covers are released.
    """

    def __init__(self, patterns, counts, params):
        self.patterns = [tuple(p) for p in patterns]
        self.count = list(counts)
        self.last_seen = [0] * len(self.patterns)
        self.replayed = [False] * len(self.patterns)
        self.params = params
        self.tokens: list[int] = []
        self.tasks: list = []
        self.emitted = 0  # index of the oldest unreleased task
        self.count_floor = 0
        self.completed: list[tuple[int, int]] = []  # (pattern index, start)

    def score(self, idx: int) -> float:
        p = self.params
        now = len(self.tokens) - 1
        count = min(self.count[idx], p.count_cap)
        decay = p.decay ** ((now - self.last_seen[idx]) / p.decay_interval)
        bonus = p.replay_bonus if self.replayed[idx] else 1.0
        return len(self.patterns[idx]) * count * decay * bonus

    def _release(self, upto: int) -> list:
        out = [TaskEvent(t) for t in self.tasks[self.emitted : upto]]
        self.emitted = max(self.emitted, upto)
        return out

    def push(self, task, token) -> list:
        self.tokens.append(token)
        self.tasks.append(task)
        i = len(self.tokens) - 1
        for idx, _ in suffix_patterns(self.tokens, self.patterns, self.count_floor):
            self.count[idx] += 1
            self.last_seen[idx] = i
        self.completed += suffix_patterns(self.tokens, self.patterns, self.emitted)
        events = []
        while self.completed:
            idx, start = max(self.completed, key=lambda c: (self.score(c[0]), -c[0], -c[1]))
            target = self.score(idx)
            blocked = False
            for s in live_prefixes(self.tokens, self.patterns, self.emitted):
                if s > start:
                    continue
                seg = tuple(self.tokens[s:])
                for q, p in enumerate(self.patterns):
                    if len(p) > len(seg) and p[: len(seg)] == seg and self.score(q) > target:
                        blocked = True
            if blocked:
                break
            end = start + len(self.patterns[idx])
            events += self._release(start)
            events.append(TraceBegin(idx, not self.replayed[idx]))
            events += self._release(end)
            events.append(TraceEnd(idx))
            self.replayed[idx] = True
            self.completed = [c for c in self.completed if c[1] >= end]
        horizon = min([c[1] for c in self.completed], default=len(self.tokens))
        live = live_prefixes(self.tokens, self.patterns, self.emitted)
        if live:
            horizon = min(horizon, live[0])
        events += self._release(horizon)
        return events

    def flush(self) -> list:
        self.completed = []
        self.count_floor = len(self.tokens)
        return self._release(len(self.tokens))


def untraceable_inside_trace(events) -> bool:
    inside = False
    for e in events:
        if isinstance(e, TraceBegin):
            inside = True
        elif isinstance(e, TraceEnd):
            inside = False
        elif inside and e.task.untraceable:
            return True
    return False


def untraceable_token(x: int) -> int:
    t = x | (1 << 63)
    assert is_untraceable(t)
    return t
