"""History buffering, multi-scale analysis scheduling and result ingestion.

Tokens accumulate in a fixed-capacity buffer.  Every ``C`` tokens a slice
of the buffer chosen by the ruler sequence is copied and mined on a
background worker; the full buffer is mined (and then cleared) when it
reaches capacity.  Completed results are only ingested at token counts
that every replica computes identically, so replicated engines make the
same decisions no matter how fast their workers are.
"""

from __future__ import annotations

import threading
import time
from collections import deque
from concurrent.futures import Future, ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

from .miner import RepeatResult, find_repeats


def ruler(k: int) -> int:
    """2-adic valuation of k: 1, 2, 3, 4, ... -> 0, 1, 0, 2, ..."""
    if k < 1:
        raise ValueError("ruler() needs a positive integer")
    return (k & -k).bit_length() - 1


def analysis_slice(k: int, scale: int) -> tuple[int, int] | None:
    """Buffer range to mine after the k-th token since the last clear."""
    if scale < 1 or k < 1:
        raise ValueError("k and scale must be positive")
    if k % scale:
        return None
    length = (1 << ruler(k // scale)) * scale
    return k - length, k


@dataclass
class HistoryBuffer:
    capacity: int
    tokens: list[int] = field(default_factory=list)
    appended_total: int = 0

    def append(self, token: int) -> None:
        if len(self.tokens) >= self.capacity:
            raise OverflowError("history buffer is full")
        self.tokens.append(token)
        self.appended_total += 1

    def clear(self) -> None:
        self.tokens = []


@dataclass
class AnalysisJob:
    job_id: int
    bounds: tuple[int, int]
    slice: tuple[int, ...]
    issued_at: int
    future: Future

    @property
    def done(self) -> bool:
        return self.future.done()

    @property
    def result(self) -> RepeatResult | None:
        return self.future.result() if self.future.done() else None


class ReplicaGroup:
    """All-reduce of per-job "did I have to wait" flags across N nodes."""

    def __init__(self, size: int, timeout: float = 60.0):
        if size < 1:
            raise ValueError("group size must be positive")
        self.size = size
        self.timeout = timeout
        self._cond = threading.Condition()
        self._rounds: dict[int, list] = {}

    def agree(self, key: int, flag: bool) -> bool:
        with self._cond:
            rnd = self._rounds.setdefault(key, [0, False, 0])
            rnd[0] += 1
            rnd[1] = rnd[1] or flag
            self._cond.notify_all()
            deadline = time.monotonic() + self.timeout
            while rnd[0] < self.size:
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    raise TimeoutError(f"replica group stalled on job {key}")
                self._cond.wait(remaining)
            result = rnd[1]
            rnd[2] += 1
            if rnd[2] == self.size:
                del self._rounds[key]
            return result


@dataclass
class IngestionBarrier:
    """Agreed number of tokens to process past a job's issue point.

    ``trajectory`` records ``(processed, job_id, wait_count)`` after every
    ingestion; ``waits`` the ``(processed, job_id)`` points where this
    node itself blocked.
    """

    granule: int
    wait_count: int = 0
    group: ReplicaGroup | None = None
    trajectory: list[tuple[int, int, int]] = field(default_factory=list)
    waits: list[tuple[int, int]] = field(default_factory=list)

    def due(self, job: AnalysisJob, processed: int) -> bool:
        return processed >= job.issued_at + self.wait_count

    def resolve(self, job: AnalysisJob, processed: int, waited: bool) -> None:
        if waited:
            self.waits.append((processed, job.job_id))
        anyone = self.group.agree(job.job_id, waited) if self.group else waited
        if anyone:
            lag = processed - job.issued_at
            self.wait_count = max(self.wait_count, lag) + self.granule
        self.trajectory.append((processed, job.job_id, self.wait_count))


class _InlineExecutor:
    """Runs jobs at submission; used with ``workers=0``."""

    def submit(self, fn, *args) -> Future:
        fut: Future = Future()
        try:
            fut.set_result(fn(*args))
        except BaseException as exc:  # pragma: no cover - surfaced via result()
            fut.set_exception(exc)
        return fut

    def shutdown(self, wait: bool = True, cancel_futures: bool = False) -> None:
        pass


class TraceFinder:
    def __init__(
        self,
        batchsize: int = 5000,
        multi_scale_factor: int = 250,
        min_trace_length: int = 25,
        workers: int = 1,
        latency: Callable[[int], float] | None = None,
        group: ReplicaGroup | None = None,
    ):
        if batchsize < 1 or multi_scale_factor < 1 or min_trace_length < 1:
            raise ValueError("batchsize, multi_scale_factor and min_trace_length must be positive")
        self.batchsize = batchsize
        self.scale = multi_scale_factor
        self.min_len = min_trace_length
        self.latency = latency
        self.buffer = HistoryBuffer(batchsize)
        self.barrier = IngestionBarrier(multi_scale_factor, group=group)
        self.pending: deque[AnalysisJob] = deque()
        self.submitted: list[AnalysisJob] = []
        self.ingested: list[tuple[int, int]] = []
        self._next_id = 0
        self._executor = ThreadPoolExecutor(max_workers=workers) if workers > 0 else _InlineExecutor()

    def _mine(self, job_id: int, tokens: tuple[int, ...]) -> RepeatResult:
        if self.latency is not None:
            delay = self.latency(job_id)
            if delay > 0:
                time.sleep(delay)
        return find_repeats(tokens, self.min_len)

    def on_token(self, token: int) -> list[AnalysisJob]:
        self.buffer.append(token)
        k = len(self.buffer.tokens)
        full = k == self.batchsize
        bounds = (0, k) if full else analysis_slice(k, self.scale)
        jobs = []
        if bounds is not None:
            lo, hi = bounds
            piece = tuple(self.buffer.tokens[lo:hi])
            job = AnalysisJob(
                self._next_id,
                bounds,
                piece,
                self.buffer.appended_total,
                self._executor.submit(self._mine, self._next_id, piece),
            )
            self._next_id += 1
            self.pending.append(job)
            self.submitted.append(job)
            jobs.append(job)
        if full:
            self.buffer.clear()
        return jobs

    def ingest_ready_jobs(self, processed: int) -> list[tuple[AnalysisJob, RepeatResult]]:
        """Results whose agreed ingestion point has been reached, in submission order."""
        out = []
        while self.pending and self.barrier.due(self.pending[0], processed):
            job = self.pending.popleft()
            waited = not job.future.done()
            result = job.future.result()
            self.barrier.resolve(job, processed, waited)
            self.ingested.append((processed, job.job_id))
            out.append((job, result))
        return out

    def close(self) -> None:
        self._executor.shutdown(wait=True, cancel_futures=True)
        self.pending.clear()
