"""Deterministic discrete-event kernel.

Time is an integer count of nanoseconds. Events fire in ``(fire_at, seq)``
order, where ``seq`` is the insertion counter, so two runs with the same
configuration and seed process events identically.
"""
from __future__ import annotations

import hashlib
import heapq
from dataclasses import dataclass, field
from typing import Any, Callable, TextIO

import numpy as np

NS = 1
US = 1_000
MS = 1_000_000
S = 1_000_000_000


def ms(x: float) -> int:
    return int(round(x * MS))


def us(x: float) -> int:
    return int(round(x * US))


def seconds(x: float) -> int:
    return int(round(x * S))


def to_ms(t: int) -> float:
    return t / MS


class SchedulingError(ValueError):
    pass


@dataclass(order=True)
class Event:
    fire_at: int
    seq: int
    kind: str = field(compare=False)
    handler: Callable[..., Any] | None = field(compare=False, default=None)
    args: tuple = field(compare=False, default=())
    detail: str = field(compare=False, default="")
    cancelled: bool = field(compare=False, default=False)


def derive_seed(global_seed: int, stream_id: str) -> list[int]:
    """Stable 128-bit key for a named stream (independent of PYTHONHASHSEED)."""
    digest = hashlib.sha256(f"{int(global_seed)}/{stream_id}".encode()).digest()
    return [int.from_bytes(digest[i:i + 4], "little") for i in range(0, 16, 4)]


def make_rng(global_seed: int, stream_id: str) -> np.random.Generator:
    # Philox is counter-based; each (seed, stream_id) gets its own key.
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(derive_seed(global_seed, stream_id))))


class Simulator:
    """Virtual clock + priority queue + named random streams."""

    def __init__(self, seed: int = 0, trace: TextIO | None = None):
        self.seed = int(seed)
        self._now = 0
        self._seq = 0
        self._queue: list[Event] = []
        self._streams: dict[str, np.random.Generator] = {}
        self.trace = trace
        self.processed = 0

    def now(self) -> int:
        return self._now

    def schedule(self, t: int, kind: str, handler: Callable[..., Any] | None = None,
                 *args: Any, detail: str = "") -> Event:
        t = int(t)
        if t < self._now:
            raise SchedulingError(f"cannot schedule {kind!r} at {t} ns, clock is at {self._now} ns")
        ev = Event(t, self._seq, kind, handler, args, detail)
        self._seq += 1
        heapq.heappush(self._queue, ev)
        return ev

    def schedule_in(self, delay: int, kind: str, handler=None, *args, detail: str = "") -> Event:
        return self.schedule(self._now + int(delay), kind, handler, *args, detail=detail)

    @staticmethod
    def cancel(ev: Event) -> None:
        ev.cancelled = True

    def pending(self) -> int:
        return sum(1 for e in self._queue if not e.cancelled)

    def run_until(self, t_end: int) -> int:
        t_end = int(t_end)
        if t_end < self._now:
            raise SchedulingError(f"run_until({t_end}) is before now ({self._now})")
        count = 0
        q = self._queue
        trace = self.trace
        while q and q[0].fire_at <= t_end:
            ev = heapq.heappop(q)
            if ev.cancelled:
                continue
            self._now = ev.fire_at
            if trace is not None:
                detail = ev.detail
                trace.write(f"{ev.fire_at}\t{ev.seq}\t{ev.kind}\t{detail}\n")
            if ev.handler is not None:
                ev.handler(*ev.args)
            count += 1
        self._now = t_end
        self.processed += count
        return count

    def rng(self, stream_id: str) -> np.random.Generator:
        gen = self._streams.get(stream_id)
        if gen is None:
            gen = make_rng(self.seed, stream_id)
            self._streams[stream_id] = gen
        return gen
