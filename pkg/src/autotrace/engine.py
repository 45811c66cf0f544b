"""End-to-end tracing engine and replicated-node simulation."""

from __future__ import annotations

import random
import threading
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

from .finder import ReplicaGroup, TraceFinder
from .replayer import ScoreParams, TraceReplayer
from .streamio import AnnotatedEvent, TaskEvent, TraceBegin, format_events
from .tokens import TaskDescriptor, hash_task


@dataclass(frozen=True)
class EngineConfig:
    min_trace_length: int = 25
    max_trace_length: int | None = None
    batchsize: int = 5000
    multi_scale_factor: int = 250
    workers: int = 1
    latency: Callable[[int], float] | None = None
    scoring: ScoreParams = field(default_factory=ScoreParams)

    def __post_init__(self) -> None:
        if self.min_trace_length < 1:
            raise ValueError("min_trace_length must be >= 1")
        if self.max_trace_length is not None and self.max_trace_length < self.min_trace_length:
            raise ValueError("max_trace_length must be >= min_trace_length")
        if self.batchsize < 1 or self.multi_scale_factor < 1:
            raise ValueError("batchsize and multi_scale_factor must be positive")
        if self.workers < 0:
            raise ValueError("workers must be >= 0")


class TracingEngine:
    """Feeds each task through the finder and the replayer, in that order.

    ``decisions`` logs ``(token_index, text)`` for every job ingestion and
    every trace emission.
    """

    def __init__(self, config: EngineConfig = EngineConfig(), group: ReplicaGroup | None = None):
        self.config = config
        self.finder = TraceFinder(
            config.batchsize,
            config.multi_scale_factor,
            config.min_trace_length,
            workers=config.workers,
            latency=config.latency,
            group=group,
        )
        self.replayer = TraceReplayer(config.min_trace_length, config.max_trace_length, config.scoring)
        self.decisions: list[tuple[int, str]] = []
        self.processed = 0
        self.front_path_seconds = 0.0

    def execute(self, task: TaskDescriptor) -> list[AnnotatedEvent]:
        t0 = time.perf_counter()
        index = self.processed
        token = hash_task(task)
        self.finder.on_token(token)
        self.processed += 1
        for job, result in self.finder.ingest_ready_jobs(self.processed):
            added = self.replayer.ingest(result)
            self.decisions.append(
                (index, f"ingest job={job.job_id} slice={job.bounds[0]}:{job.bounds[1]} "
                        f"candidates={len(added)} wait_count={self.finder.barrier.wait_count}")
            )
        events = self.replayer.push(task, token)
        for e in events:
            if isinstance(e, TraceBegin):
                m = self.replayer.replays[-1]
                kind = "record" if e.first_occurrence else "replay"
                self.decisions.append((m.start, f"{kind} trace={e.trace_id} length={m.end - m.start}"))
        self.front_path_seconds += time.perf_counter() - t0
        return events

    def finish(self) -> list[AnnotatedEvent]:
        self.finder.close()
        return self.replayer.flush()


@dataclass
class EngineRun:
    events: list[AnnotatedEvent]
    decisions: list[tuple[int, str]]
    trajectory: list[tuple[int, int, int]]
    waits: list[tuple[int, int]]
    tasks: int
    front_path_seconds: float

    @property
    def per_token_seconds(self) -> float:
        return self.front_path_seconds / self.tasks if self.tasks else 0.0


def run_engine(
    tasks: Sequence[TaskDescriptor],
    config: EngineConfig = EngineConfig(),
    group: ReplicaGroup | None = None,
) -> EngineRun:
    engine = TracingEngine(config, group)
    events: list[AnnotatedEvent] = []
    try:
        for t in tasks:
            events.extend(engine.execute(t))
    finally:
        events.extend(engine.finish())
    return EngineRun(
        events,
        engine.decisions,
        engine.finder.barrier.trajectory,
        engine.finder.barrier.waits,
        len(tasks),
        engine.front_path_seconds,
    )


def random_latency(seed: int, max_seconds: float) -> Callable[[int], float]:
    """Per-job delay in [0, max_seconds), reproducible from (seed, job id)."""

    def latency(job_id: int) -> float:
        return random.Random(seed * 1_000_003 + job_id).random() * max_seconds

    return latency


@dataclass
class ReplicationRun:
    nodes: int
    seeds: list[int]
    runs: list[EngineRun]
    outputs: list[str]
    ok: bool
    first_divergence: int | None = None
    message: str = ""


def _first_difference(a: list[AnnotatedEvent], b: list[AnnotatedEvent]) -> int:
    """Token index of the first differing event (tasks seen before it)."""
    tasks = 0
    for x, y in zip(a, b):
        if x != y:
            return tasks
        if isinstance(x, TaskEvent):
            tasks += 1
    return tasks


def run_replicated(
    tasks: Sequence[TaskDescriptor],
    config: EngineConfig = EngineConfig(),
    nodes: int = 2,
    seeds: Sequence[int] | None = None,
    max_latency: float = 0.002,
    latencies: Sequence[Callable[[int], float] | None] | None = None,
) -> ReplicationRun:
    """Run ``nodes`` engines on the same stream with independent job latencies.

    Each node runs on its own thread; the nodes only share the
    all-reduce of wait flags.  ``latencies`` overrides the per-node
    latency hooks derived from ``seeds``.
    """
    if nodes < 2:
        raise ValueError("replication needs at least two nodes")
    seeds = list(seeds) if seeds is not None else list(range(nodes))
    if len(seeds) != nodes:
        raise ValueError("need one latency seed per node")
    if latencies is None:
        latencies = [random_latency(s, max_latency) if max_latency > 0 else None for s in seeds]
    group = ReplicaGroup(nodes)
    runs: list[EngineRun | None] = [None] * nodes
    errors: list[BaseException] = []

    def node_main(rank: int) -> None:
        try:
            cfg = replace(config, latency=latencies[rank])
            runs[rank] = run_engine(tasks, cfg, group)
        except BaseException as exc:
            errors.append(exc)

    threads = [threading.Thread(target=node_main, args=(r,)) for r in range(nodes)]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    if errors:
        raise errors[0]
    done = [r for r in runs if r is not None]
    outputs = [format_events(r.events) for r in done]
    rep = ReplicationRun(nodes, seeds, done, outputs, True)
    for rank in range(1, nodes):
        if outputs[rank] != outputs[0]:
            rep.ok = False
            rep.first_divergence = _first_difference(done[0].events, done[rank].events)
            rep.message = f"node {rank} diverges from node 0 at token {rep.first_divergence}"
            break
        if done[rank].trajectory != done[0].trajectory:
            rep.ok = False
            rep.message = f"node {rank} wait_count trajectory differs from node 0"
            break
    return rep
