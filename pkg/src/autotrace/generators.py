"""Synthetic task-stream generators standing in for real applications."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .tokens import TaskDescriptor, task

KINDS = ("jacobi", "periodic", "periodic_with_noise", "nested_loops", "random")


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    iterations: int = 100
    period: int = 6
    noise_rate: float = 0.0
    seed: int = 0
    alphabet: int = 50
    length: int = 1000
    inner: int = 4

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        if self.iterations < 0 or self.length < 0:
            raise ValueError("iterations and length must be non-negative")
        if self.period < 1 or self.alphabet < 1 or self.inner < 0:
            raise ValueError("period and alphabet must be positive, inner non-negative")
        if not 0.0 <= self.noise_rate <= 1.0:
            raise ValueError("noise_rate must lie in [0, 1]")


def jacobi(iterations: int) -> list[TaskDescriptor]:
    """Main loop of ``x = (b - dot(R, x)) / d`` with x ping-ponging between two regions."""
    out = []
    for i in range(iterations):
        src, dst = ("x1", "x2") if i % 2 == 0 else ("x2", "x1")
        out.append(task("DOT", ("R", "read", "f"), (src, "read", "f"), ("t1", "write", "f")))
        out.append(task("SUB", ("b", "read", "f"), ("t1", "read", "f"), ("t2", "write", "f")))
        out.append(task("DIV", ("t2", "read", "f"), ("d", "read", "f"), (dst, "write", "f")))
    return out


def _body(period: int) -> list[TaskDescriptor]:
    return [task(f"OP{j}", (f"in{j}", "read", "f"), (f"out{j}", "write", "f")) for j in range(period)]


def periodic(period: int, iterations: int) -> list[TaskDescriptor]:
    return _body(period) * iterations


CONVERGENCE_CHECK = task("CHECK", ("residual", "read", "f"), ("norm", "reduce", "f"))


def periodic_with_noise(period: int, iterations: int, noise_rate: float, seed: int) -> list[TaskDescriptor]:
    """Periodic loop with a convergence check dropped in after random tasks."""
    rng = random.Random(seed)
    out = []
    for _ in range(iterations):
        for t in _body(period):
            out.append(t)
            if rng.random() < noise_rate:
                out.append(CONVERGENCE_CHECK)
    return out


def nested_loops(iterations: int, inner: int) -> list[TaskDescriptor]:
    pre = task("PRE", ("state", "read_write", "f"))
    inner_body = [
        task("STENCIL", ("grid", "read", "f", "interior"), ("tmp", "write", "f")),
        task("COPY", ("tmp", "read", "f"), ("grid", "write", "f", "interior")),
    ]
    post = task("REDUCE", ("grid", "read", "f"), ("stats", "reduce", "f"))
    return ([pre] + inner_body * inner + [post]) * iterations


def random_stream(alphabet: int, length: int, seed: int) -> list[TaskDescriptor]:
    rng = random.Random(seed)
    pool = [task(f"R{j}", (f"reg{j}", "read_write", "f")) for j in range(alphabet)]
    return [pool[rng.randrange(alphabet)] for _ in range(length)]


def generate(spec: GeneratorSpec) -> list[TaskDescriptor]:
    spec.validate()
    if spec.kind == "jacobi":
        return jacobi(spec.iterations)
    if spec.kind == "periodic":
        return periodic(spec.period, spec.iterations)
    if spec.kind == "periodic_with_noise":
        return periodic_with_noise(spec.period, spec.iterations, spec.noise_rate, spec.seed)
    if spec.kind == "nested_loops":
        return nested_loops(spec.iterations, spec.inner)
    return random_stream(spec.alphabet, spec.length, spec.seed)
