"""Line-oriented text formats for task streams and annotated streams.

Task stream::

    task DOT R:read:val x1:read:val t1:write:val
    untraceable CHECK

Annotated stream adds ``tbegin <id> <record|replay>`` and ``tend <id>``.
Blank lines are ignored; anything else that does not parse is an error
carrying its 1-based line number.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

from .tokens import Privilege, RegionArg, TaskDescriptor


class StreamParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class TaskEvent:
    task: TaskDescriptor


@dataclass(frozen=True)
class TraceBegin:
    trace_id: int
    first_occurrence: bool


@dataclass(frozen=True)
class TraceEnd:
    trace_id: int


AnnotatedEvent = Union[TaskEvent, TraceBegin, TraceEnd]

_PRIVS = {p.value: p for p in Privilege}


def _check_ident(text: str, what: str, lineno: int) -> str:
    if not text or not text.isascii() or any(c.isspace() or c == ":" for c in text):
        raise StreamParseError(lineno, f"bad {what} {text!r}")
    return text


def _parse_arg(text: str, lineno: int) -> RegionArg:
    parts = text.split(":")
    if len(parts) not in (3, 4):
        raise StreamParseError(lineno, f"malformed region argument {text!r}")
    region_id = _check_ident(parts[0], "region id", lineno)
    if parts[1] not in _PRIVS:
        raise StreamParseError(lineno, f"unknown privilege {parts[1]!r}")
    fields = parts[2].split(",")
    for f in fields:
        if not f:
            raise StreamParseError(lineno, f"empty field in {text!r}")
    if len(set(fields)) != len(fields):
        raise StreamParseError(lineno, f"duplicate field in {text!r}")
    partition = _check_ident(parts[3], "partition id", lineno) if len(parts) == 4 else None
    return RegionArg(region_id, tuple(fields), _PRIVS[parts[1]], partition)


def _parse_task_words(words: list[str], lineno: int) -> TaskDescriptor:
    kind = words[0]
    if len(words) < 2:
        raise StreamParseError(lineno, f"{kind} line without a task name")
    name = _check_ident(words[1], "task name", lineno)
    args = tuple(_parse_arg(w, lineno) for w in words[2:])
    return TaskDescriptor(name, args, untraceable=(kind == "untraceable"))


def _lines(text: str) -> Iterable[tuple[int, list[str]]]:
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.isascii():
            raise StreamParseError(lineno, "non-ASCII input")
        words = line.split()
        if words:
            yield lineno, words


def parse_tasks(text: str) -> list[TaskDescriptor]:
    out = []
    for lineno, words in _lines(text):
        if words[0] not in ("task", "untraceable"):
            raise StreamParseError(lineno, f"unexpected keyword {words[0]!r}")
        out.append(_parse_task_words(words, lineno))
    return out


def format_task(t: TaskDescriptor) -> str:
    words = ["untraceable" if t.untraceable else "task", t.task_name]
    for a in t.args:
        item = f"{a.region_id}:{a.privilege.value}:{','.join(a.fields)}"
        if a.partition_id is not None:
            item += f":{a.partition_id}"
        words.append(item)
    return " ".join(words)


def format_tasks(tasks: Iterable[TaskDescriptor]) -> str:
    return "".join(format_task(t) + "\n" for t in tasks)


def format_event(e: AnnotatedEvent) -> str:
    if isinstance(e, TaskEvent):
        return format_task(e.task)
    if isinstance(e, TraceBegin):
        return f"tbegin {e.trace_id} {'record' if e.first_occurrence else 'replay'}"
    return f"tend {e.trace_id}"


def format_events(events: Iterable[AnnotatedEvent]) -> str:
    return "".join(format_event(e) + "\n" for e in events)


def _parse_id(word: str, lineno: int) -> int:
    if not word.isdigit():
        raise StreamParseError(lineno, f"bad trace id {word!r}")
    return int(word)


def parse_events(text: str) -> list[AnnotatedEvent]:
    out: list[AnnotatedEvent] = []
    for lineno, words in _lines(text):
        kw = words[0]
        if kw in ("task", "untraceable"):
            out.append(TaskEvent(_parse_task_words(words, lineno)))
        elif kw == "tbegin":
            if len(words) != 3 or words[2] not in ("record", "replay"):
                raise StreamParseError(lineno, "expected 'tbegin <id> <record|replay>'")
            out.append(TraceBegin(_parse_id(words[1], lineno), words[2] == "record"))
        elif kw == "tend":
            if len(words) != 2:
                raise StreamParseError(lineno, "expected 'tend <id>'")
            out.append(TraceEnd(_parse_id(words[1], lineno)))
        else:
            raise StreamParseError(lineno, f"unexpected keyword {kw!r}")
    return out


def strip_markers(events: Iterable[AnnotatedEvent]) -> list[TaskDescriptor]:
    return [e.task for e in events if isinstance(e, TaskEvent)]
