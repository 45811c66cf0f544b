"""Online recognition of candidate traces in the live task stream.

Candidates mined by the finder go into a token trie.  Conceptually every
incoming token starts a match pointer at the root and advances the live
ones; a pointer reaching a trace's terminal node is a completed match.
All pointers are tracked at once by running the trie as an Aho-Corasick
automaton.  The best-scoring completed match is replayed as soon as no
live pointer that started at or before it could still reach a trace that
scores higher: tasks queued before it are released untraced, then the
match is wrapped in ``tbegin``/``tend``.  A task that no live pointer covers is
released immediately, so nothing waits longer than the longest candidate.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .miner import RepeatResult
from .streamio import AnnotatedEvent, TaskEvent, TraceBegin, TraceEnd
from .tokens import TaskDescriptor, is_untraceable


@dataclass(frozen=True)
class ScoreParams:
    count_cap: int = 100
    decay: float = 0.99
    decay_interval: int = 100
    replay_bonus: float = 1.1


@dataclass
class TraceLeaf:
    trace_id: int
    tokens: tuple[int, ...]
    count: int = 0
    last_seen: int = 0
    replayed: bool = False

    @property
    def length(self) -> int:
        return len(self.tokens)


class TrieNode:
    __slots__ = ("children", "leaf", "depth", "fail", "out", "live", "below")

    def __init__(self, depth: int = 0):
        self.children: dict[int, TrieNode] = {}
        self.leaf: TraceLeaf | None = None
        self.depth = depth
        # automaton links, valid after CandidateTrie.link()
        self.fail: TrieNode | None = None
        self.out: TrieNode | None = None
        self.live: TrieNode | None = None
        self.below: tuple[TraceLeaf, ...] = ()


class CandidateTrie:
    """Token trie over candidate traces, doubling as a multi-pattern automaton.

    ``fail`` points at the longest proper suffix that is also a trie path,
    ``out`` at the nearest node on the fail chain (self included) that ends
    a trace, and ``live`` at the nearest one that can still be extended.
    ``below`` holds the traces reachable by extending a node.
    """

    def __init__(self) -> None:
        self.root = TrieNode()
        self.leaves: list[TraceLeaf] = []
        self.dirty = True

    def __len__(self) -> int:
        return len(self.leaves)

    def lookup(self, tokens: Iterable[int]) -> TraceLeaf | None:
        node = self.root
        for t in tokens:
            node = node.children.get(t)
            if node is None:
                return None
        return node.leaf

    def insert(self, tokens: tuple[int, ...], count: int, now: int) -> TraceLeaf:
        node = self.root
        for t in tokens:
            child = node.children.get(t)
            if child is None:
                child = node.children[t] = TrieNode(node.depth + 1)
                self.dirty = True
            node = child
        if node.leaf is None:
            node.leaf = TraceLeaf(len(self.leaves), tokens, count, now)
            self.leaves.append(node.leaf)
            self.dirty = True
        else:
            node.leaf.count = max(node.leaf.count, count)
        return node.leaf

    def link(self) -> None:
        root = self.root
        root.fail, root.out, root.live = None, None, root
        order = [root]
        for child in root.children.values():
            child.fail = root
        for u in order:  # breadth first; the list grows while iterating
            if u is not root:
                u.out = u if u.leaf is not None else u.fail.out
                u.live = u if u.children else u.fail.live
            for tok, v in u.children.items():
                if u is not root:
                    f = u.fail
                    while f is not root and tok not in f.children:
                        f = f.fail
                    v.fail = f.children.get(tok, root)
                order.append(v)
        for u in reversed(order):
            parts = [(c.leaf,) + c.below if c.leaf is not None else c.below for c in u.children.values()]
            # single-child chains share one tuple, keeping this linear in trie size
            u.below = parts[0] if len(parts) == 1 else tuple(x for part in parts for x in part)
        self.dirty = False

    def step(self, node: TrieNode, token: int) -> TrieNode:
        root = self.root
        while node is not root and token not in node.children:
            node = node.fail
        return node.children.get(token, root)


def score(leaf: TraceLeaf, now: int, params: ScoreParams = ScoreParams()) -> float:
    count = min(leaf.count, params.count_cap)
    decay = params.decay ** ((now - leaf.last_seen) / params.decay_interval)
    bonus = params.replay_bonus if leaf.replayed else 1.0
    return leaf.length * count * decay * bonus


def split_candidate(tokens: tuple[int, ...], min_len: int, max_len: int | None) -> list[tuple[int, ...]]:
    """Cut a repeat at untraceable tokens, then into pieces of at most max_len.

    Pieces shorter than min_len (typically the tail) are dropped.
    """
    segments, cur = [], []
    for t in tokens:
        if is_untraceable(t):
            if cur:
                segments.append(tuple(cur))
            cur = []
        else:
            cur.append(t)
    if cur:
        segments.append(tuple(cur))
    pieces = []
    for seg in segments:
        step = max_len or len(seg)
        for lo in range(0, len(seg), step):
            piece = seg[lo : lo + step]
            if len(piece) >= min_len:
                pieces.append(piece)
    return pieces


def ingest_candidates(
    result: RepeatResult,
    trie: CandidateTrie,
    min_len: int,
    max_len: int | None = None,
    now: int = 0,
) -> list[TraceLeaf]:
    touched = []
    for rep in result.repeats:
        for piece in split_candidate(rep.tokens, min_len, max_len):
            touched.append(trie.insert(piece, len(rep.starts), now))
    return touched


@dataclass
class Match:
    leaf: TraceLeaf
    start: int
    end: int


@dataclass
class TraceReplayer:
    """Matches the live stream against the trie and decides what to replay.

    The automaton state is the deepest trie node spelling a suffix of the
    unreleased tasks; every shorter such suffix on its fail chain is an
    in-flight match.  The best completed match is held back only while a
    match that started at or before it can still complete a trace with a
    higher score; otherwise it is replayed at once.
    """

    min_trace_length: int = 25
    max_trace_length: int | None = None
    params: ScoreParams = field(default_factory=ScoreParams)

    def __post_init__(self) -> None:
        self.trie = CandidateTrie()
        self.pending: deque[tuple[int, TaskDescriptor, int]] = deque()
        self.state = self.trie.root
        self.watch = self.trie.root
        # completed matches per trace id, in start order
        self.completed: dict[int, deque[Match]] = {}
        self.next_index = 0
        self.replays: list[Match] = []

    def ingest(self, result: RepeatResult) -> list[TraceLeaf]:
        return ingest_candidates(
            result, self.trie, self.min_trace_length, self.max_trace_length, self.next_index
        )

    @property
    def floor(self) -> int:
        """Index of the oldest task not yet emitted."""
        return self.pending[0][0] if self.pending else self.next_index

    def live_start(self) -> int | None:
        """Start of the earliest in-flight match, if any."""
        live = self.state.live
        if live is None or live is self.trie.root:
            return None
        return self.next_index - live.depth

    def _relink(self) -> None:
        # new trie paths may spell suffixes that started before the last step
        self.trie.link()
        self.state = self.trie.root
        for _, _, tok in self.pending:
            self.state = self.trie.step(self.state, tok)
        self.watch = self.state

    def _ending_here(self, node: TrieNode) -> list[Match]:
        end = self.next_index + 1
        done = []
        node = node.out
        while node is not None:
            done.append(Match(node.leaf, end - node.depth, end))
            node = node.fail.out
        return done

    def advance(self, token: int) -> list[Match]:
        """Step the automaton along ``token``; return matches ending here.

        Occurrence counts are refreshed from a second walk that ignores
        replay decisions, so a trace is counted whenever it appears even if
        an overlapping replay took its tasks.
        """
        if self.trie.dirty:
            self._relink()
        i = self.next_index
        self.watch = self.trie.step(self.watch, token)
        for m in self._ending_here(self.watch):
            m.leaf.count += 1
            m.leaf.last_seen = i
        self.state = self.trie.step(self.state, token)
        return self._ending_here(self.state)

    def push(self, task: TaskDescriptor, token: int) -> list[AnnotatedEvent]:
        i = self.next_index
        completed = self.advance(token)
        self.pending.append((i, task, token))
        self.next_index += 1
        for m in completed:
            self.completed.setdefault(m.leaf.trace_id, deque()).append(m)
        events: list[AnnotatedEvent] = []
        while self.completed:
            best, scores = self._best()
            if self._outbid(best, scores):
                break
            events += self.select_and_emit(best)
        horizon = min([q[0].start for q in self.completed.values()], default=self.next_index)
        live = self.live_start()
        if live is not None:
            horizon = min(horizon, live)
        events += self._release_before(horizon)
        return events

    def _score(self, leaf: TraceLeaf, scores: dict[int, float]) -> float:
        s = scores.get(leaf.trace_id)
        if s is None:
            s = scores[leaf.trace_id] = score(leaf, self.next_index - 1, self.params)
        return s

    def _best(self) -> tuple[Match, dict[int, float]]:
        """Highest score; ties go to the lower trace id, then the earlier start."""
        scores: dict[int, float] = {}
        trace_id = max(
            self.completed,
            key=lambda tid: (self._score(self.completed[tid][0].leaf, scores), -tid),
        )
        return self.completed[trace_id][0], scores

    def _outbid(self, best: Match, scores: dict[int, float]) -> bool:
        """Could a match in flight since ``best.start`` or earlier still end above it?"""
        target = scores[best.leaf.trace_id]
        root = self.trie.root
        node = self.state.live
        while node is not None and node is not root and self.next_index - node.depth <= best.start:
            if any(self._score(leaf, scores) > target for leaf in node.below):
                return True
            node = node.fail.live
        return False

    def select_and_emit(self, best: Match) -> list[AnnotatedEvent]:
        """Replay ``best``: untraced prefix, then begin / tasks / end."""
        events = self._release_before(best.start)
        events.append(TraceBegin(best.leaf.trace_id, not best.leaf.replayed))
        while self.pending and self.pending[0][0] < best.end:
            events.append(TaskEvent(self.pending.popleft()[1]))
        events.append(TraceEnd(best.leaf.trace_id))
        best.leaf.replayed = True
        self.replays.append(best)
        for tid in list(self.completed):
            q = self.completed[tid]
            while q and q[0].start < best.end:
                q.popleft()
            if not q:
                del self.completed[tid]
        self._trim_state()
        return events

    def _trim_state(self) -> None:
        # forget in-flight matches that began on already emitted tasks
        limit = self.next_index - self.floor
        while self.state.depth > limit:
            self.state = self.state.fail

    def _release_before(self, index: int) -> list[AnnotatedEvent]:
        events: list[AnnotatedEvent] = []
        while self.pending and self.pending[0][0] < index:
            events.append(TaskEvent(self.pending.popleft()[1]))
        self._trim_state()
        return events

    def flush(self) -> list[AnnotatedEvent]:
        """Emit everything still pending untraced and forget all matches."""
        self.completed = {}
        events = self._release_before(self.next_index)
        self.state = self.watch = self.trie.root
        return events
