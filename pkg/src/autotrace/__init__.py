"""Online identification and replay of repeated task sequences."""

from .engine import EngineConfig, EngineRun, ReplicationRun, TracingEngine, run_engine, run_replicated
from .evaluate import (
    CostParams,
    CostReport,
    Matching,
    Violation,
    brute_force_best,
    matching_from_events,
    simulate_cost,
    traced_fraction_report,
    validate_matching,
)
from .finder import TraceFinder, analysis_slice, ruler
from .generators import GeneratorSpec, generate
from .miner import BACKEND, RepeatResult, find_repeats
from .replayer import ScoreParams, TraceReplayer
from .streamio import (
    StreamParseError,
    TaskEvent,
    TraceBegin,
    TraceEnd,
    format_events,
    format_tasks,
    parse_events,
    parse_tasks,
    strip_markers,
)
from .tokens import Privilege, RegionArg, TaskDescriptor, hash_task, task, tokenize_stream

__all__ = [
    "BACKEND",
    "CostParams",
    "CostReport",
    "EngineConfig",
    "EngineRun",
    "GeneratorSpec",
    "Matching",
    "Privilege",
    "RegionArg",
    "RepeatResult",
    "ReplicationRun",
    "ScoreParams",
    "StreamParseError",
    "TaskDescriptor",
    "TaskEvent",
    "TraceBegin",
    "TraceEnd",
    "TraceFinder",
    "TraceReplayer",
    "TracingEngine",
    "Violation",
    "analysis_slice",
    "brute_force_best",
    "find_repeats",
    "format_events",
    "format_tasks",
    "generate",
    "hash_task",
    "matching_from_events",
    "parse_events",
    "parse_tasks",
    "ruler",
    "run_engine",
    "run_replicated",
    "simulate_cost",
    "strip_markers",
    "task",
    "tokenize_stream",
    "traced_fraction_report",
    "validate_matching",
]
