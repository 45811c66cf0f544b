"""Task descriptors and their conversion into hash tokens.

Every downstream analysis works on plain integer sequences, so the only
job of this module is to turn a task (name + region arguments) into a
stable 64-bit value.  Python's built-in ``hash`` is salted per process
and therefore unusable here: replicated nodes must agree on every token.
"""

from __future__ import annotations

import enum
import hashlib
import struct
from dataclasses import dataclass, field
from typing import Iterable, Sequence

UNTRACEABLE_BIT = 1 << 63
_LOW_MASK = UNTRACEABLE_BIT - 1


class Privilege(enum.Enum):
    READ = "read"
    WRITE = "write"
    READ_WRITE = "read_write"
    REDUCE = "reduce"


@dataclass(frozen=True)
class RegionArg:
    region_id: str
    fields: tuple[str, ...]
    privilege: Privilege
    partition_id: str | None = None

    def __post_init__(self) -> None:
        if isinstance(self.fields, list):
            object.__setattr__(self, "fields", tuple(self.fields))
        if isinstance(self.privilege, str):
            object.__setattr__(self, "privilege", Privilege(self.privilege))
        if not self.fields:
            raise ValueError(f"region {self.region_id!r} has no fields")
        if len(set(self.fields)) != len(self.fields):
            raise ValueError(f"region {self.region_id!r} has duplicate fields")


@dataclass(frozen=True)
class TaskDescriptor:
    """One task launch: a name plus the ordered region arguments.

    ``untraceable`` marks operations that must never end up inside a
    trace (the engine flushes around them).
    """

    task_name: str
    args: tuple[RegionArg, ...] = ()
    untraceable: bool = field(default=False)

    def __post_init__(self) -> None:
        if isinstance(self.args, list):
            object.__setattr__(self, "args", tuple(self.args))


def _put_str(buf: bytearray, text: str) -> None:
    raw = text.encode("utf-8")
    buf += struct.pack("<I", len(raw))
    buf += raw


def canonical_bytes(t: TaskDescriptor) -> bytes:
    """Length-prefixed encoding with a fixed field order."""
    buf = bytearray()
    _put_str(buf, t.task_name)
    buf += struct.pack("<I", len(t.args))
    for arg in t.args:
        _put_str(buf, arg.region_id)
        _put_str(buf, arg.privilege.value)
        buf += struct.pack("<I", len(arg.fields))
        for f in arg.fields:
            _put_str(buf, f)
        if arg.partition_id is None:
            buf += b"\x00"
        else:
            buf += b"\x01"
            _put_str(buf, arg.partition_id)
    return bytes(buf)


def hash_task(t: TaskDescriptor) -> int:
    digest = hashlib.blake2b(canonical_bytes(t), digest_size=8).digest()
    value = int.from_bytes(digest, "little") & _LOW_MASK
    if t.untraceable:
        value |= UNTRACEABLE_BIT
    return value


def is_untraceable(token: int) -> bool:
    return bool(token & UNTRACEABLE_BIT)


def tokenize_stream(ts: Iterable[TaskDescriptor]) -> list[int]:
    return [hash_task(t) for t in ts]


def task(name: str, *args: tuple, untraceable: bool = False) -> TaskDescriptor:
    """Shorthand constructor used by generators and tests.

    Each positional arg is ``(region_id, privilege, fields[, partition_id])``.
    """
    regions = []
    for a in args:
        region_id, priv, fields = a[0], a[1], a[2]
        if isinstance(fields, str):
            fields = (fields,)
        part = a[3] if len(a) > 3 else None
        regions.append(RegionArg(region_id, tuple(fields), Privilege(priv), part))
    return TaskDescriptor(name, tuple(regions), untraceable)


def period_of(tokens: Sequence[int]) -> int:
    """Smallest p >= 1 with tokens[i] == tokens[i + p] everywhere."""
    n = len(tokens)
    for p in range(1, n + 1):
        if all(tokens[i] == tokens[i + p] for i in range(n - p)):
            return p
    return n
