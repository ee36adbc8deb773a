"""Cascaded TDM-PON upstream: queues, report/grant cycles, LS-DBA and Pred-DBA."""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .kernel import MS, US

FIBER_NS_PER_M = 5
DEFAULT_GUARD = 1 * US
DEFAULT_MAX_CYCLE = 1 * MS
DEFAULT_MARGIN = 0.10
DEFAULT_WINDOW = 10
SEGMENT_BITS = 9000 * 8


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


@dataclass
class PonSegment:
    """One TDM-PON: its upstream capacity, fiber length and polling-cycle budget.

    ``max_cycle`` is the polling period. Grants of one cycle must fit in
    ``window = max_cycle - 2 * prop_delay`` so that every report reaches the
    OLT before the next cycle is computed.
    """

    name: str
    capacity_bps: int
    length_m: float
    guard_time: int = DEFAULT_GUARD
    max_cycle: int = DEFAULT_MAX_CYCLE
    onu_ids: list = field(default_factory=list)

    def __post_init__(self):
        self.capacity_bps = int(self.capacity_bps)
        if self.capacity_bps <= 0:
            raise ValueError(f"{self.name}: capacity_bps must be positive")
        if self.length_m < 0:
            raise ValueError(f"{self.name}: length_m must be >= 0")
        if not 0 <= self.guard_time < self.max_cycle:
            raise ValueError(f"{self.name}: need 0 <= guard_time < max_cycle")
        if self.window <= len(self.onu_ids) * self.guard_time:
            raise ValueError(f"{self.name}: polling window too short for {len(self.onu_ids)} ONUs")

    @property
    def prop_delay(self) -> int:
        return int(round(self.length_m * FIBER_NS_PER_M))

    @property
    def window(self) -> int:
        return self.max_cycle - 2 * self.prop_delay

    def duration_of(self, bits: int) -> int:
        return _ceil_div(int(bits) * 1_000_000_000, self.capacity_bps)

    def bits_in(self, duration: int) -> int:
        return max(0, int(duration)) * self.capacity_bps // 1_000_000_000

    def fair_share_bits(self) -> int:
        """Default LS cap: equal split of one polling window, guards excluded."""
        n = max(1, len(self.onu_ids))
        per_onu = (self.window - n * self.guard_time) // n
        return self.bits_in(per_onu)


def check_ls_config(seg: PonSegment, b_max_bits: int) -> None:
    n = len(seg.onu_ids)
    if b_max_bits <= 0:
        raise ValueError(f"{seg.name}: b_max_bits must be positive")
    worst = n * (seg.duration_of(b_max_bits) + seg.guard_time)
    if worst > seg.window:
        raise ValueError(
            f"{seg.name}: {n} x (b_max/capacity + guard) = {worst} ns exceeds the "
            f"{seg.window} ns grant window of a {seg.max_cycle} ns cycle")


@dataclass(frozen=True)
class Report:
    onu_id: object
    queued_bits: int
    sent_at: int

    def __post_init__(self):
        if self.queued_bits < 0:
            raise ValueError("queued_bits must be >= 0")


@dataclass(frozen=True)
class Grant:
    onu_id: object
    start: int
    duration: int
    granted_bits: int
    predicted_bits: int = 0

    @property
    def end(self) -> int:
        return self.start + self.duration


class QueueEntry:
    """A run of bits waiting at an ONU. ``frame`` is the owning frame state or None."""

    __slots__ = ("stream_id", "frame_id", "remaining_bits", "enqueue_time", "frame", "total_bits")

    def __init__(self, stream_id, frame_id, bits, enqueue_time, frame=None):
        self.stream_id = stream_id
        self.frame_id = frame_id
        self.remaining_bits = int(bits)
        self.total_bits = int(bits)
        self.enqueue_time = int(enqueue_time)
        self.frame = frame

    def __repr__(self):
        return (f"QueueEntry({self.stream_id!r}, {self.frame_id}, remaining={self.remaining_bits}, "
                f"t={self.enqueue_time})")


class OnuQueue:
    """FIFO upstream buffer of one ONU, ordered by enqueue time."""

    def __init__(self, onu_id, capacity_bits: int = 2**40):
        self.onu_id = onu_id
        self.capacity_bits = int(capacity_bits)
        self.fifo: deque[QueueEntry] = deque()
        self.depth_bits = 0
        self.drops = 0
        self.dropped_bits = 0

    def __len__(self):
        return len(self.fifo)

    def depth_at(self, t: int) -> int:
        """Bits already present at time ``t`` (entries registered ahead of time excluded)."""
        # entries are time ordered and future ones are few: walk from the tail
        total = self.depth_bits
        for e in reversed(self.fifo):
            if e.enqueue_time <= t:
                break
            total -= e.remaining_bits
        return total


def enqueue(queue: OnuQueue, entry: QueueEntry) -> bool:
    if queue.depth_bits + entry.remaining_bits > queue.capacity_bits:
        queue.drops += 1
        queue.dropped_bits += entry.remaining_bits
        return False
    fifo = queue.fifo
    if not fifo or fifo[-1].enqueue_time <= entry.enqueue_time:
        fifo.append(entry)
    else:
        # entries can be registered ahead of their arrival; keep time order
        i = len(fifo)
        while i > 0 and fifo[i - 1].enqueue_time > entry.enqueue_time:
            i -= 1
        fifo.insert(i, entry)
    queue.depth_bits += entry.remaining_bits
    return True


@dataclass
class Departure:
    entry: QueueEntry
    bits: int
    depart: int
    end: int
    arrival: int

    @property
    def completes_entry(self) -> bool:
        return self.entry.remaining_bits == 0


def transmit(queue: OnuQueue, grant: Grant, seg: PonSegment) -> list[Departure]:
    """Serve the queue head-first inside ``grant``.

    Bits leave back-to-back; an entry that has not yet arrived makes the ONU
    wait (inside the grant) for it. Partial service leaves the head in place
    with fewer remaining bits.
    """
    return transmit_merged([queue], grant, seg)


def transmit_merged(queues: Sequence[OnuQueue], grant: Grant, seg: PonSegment) -> list[Departure]:
    """Like :func:`transmit` over several queues of one ONU, oldest head first."""
    for q in queues:
        if grant.onu_id != q.onu_id:
            raise ValueError(f"grant for {grant.onu_id!r} applied to queue {q.onu_id!r}")
    out: list[Departure] = []
    budget = grant.granted_bits
    cursor = grant.start
    end = grant.start + grant.duration
    cap = seg.capacity_bps
    prop = seg.prop_delay
    while budget > 0 and cursor < end:
        queue = None
        head = None
        for q in queues:
            if q.fifo and (head is None or q.fifo[0].enqueue_time < head.enqueue_time):
                queue, head = q, q.fifo[0]
        if head is None:
            break
        if head.enqueue_time > cursor:
            if head.enqueue_time >= end:
                break
            cursor = head.enqueue_time
        fit = (end - cursor) * cap // 1_000_000_000
        bits = min(head.remaining_bits, budget, fit)
        if bits <= 0:
            break
        dur = -(-bits * 1_000_000_000 // cap)
        head.remaining_bits -= bits
        queue.depth_bits -= bits
        budget -= bits
        done = cursor + dur
        out.append(Departure(head, bits, cursor, done, done + prop))
        cursor = done
        if head.remaining_bits == 0:
            queue.fifo.popleft()
    return out


def cycle_length(grants: Sequence[Grant], seg: PonSegment) -> int:
    """Span from the first grant start to the guard after the last grant."""
    if not grants:
        return 0
    first = min(g.start for g in grants)
    last = max(g.end for g in grants)
    return last + seg.guard_time - first


def ls_dba(reports: Sequence[Report], seg: PonSegment, b_max_bits: int | None = None,
           start: int = 0) -> list[Grant]:
    """Limited service: each ONU gets min(report, b_max), packed in ONU-id order."""
    if b_max_bits is None:
        b_max_bits = seg.fair_share_bits()
    if b_max_bits <= 0:
        raise ValueError("b_max_bits must be positive")
    grants = []
    cursor = start
    for r in sorted(reports, key=lambda r: _onu_key(r.onu_id)):
        bits = min(r.queued_bits, b_max_bits)
        dur = seg.duration_of(bits)
        grants.append(Grant(r.onu_id, cursor, dur, bits))
        cursor += dur + seg.guard_time
    return grants


def _onu_key(onu_id):
    return (0, onu_id, "") if isinstance(onu_id, int) else (1, 0, str(onu_id))


@dataclass
class PredictionRecord:
    """Sliding-window forecast of one stream's next frame size and arrival."""

    stream_id: str
    window: int = DEFAULT_WINDOW
    sizes: deque = field(default_factory=deque)
    gaps: deque = field(default_factory=deque)
    last_gen: int | None = None
    predicted_size_bits: float | None = None
    predicted_arrival: int | None = None
    onu_id: object = None
    default_gap: int | None = None

    def __post_init__(self):
        if self.window < 1:
            raise ValueError("prediction window must be >= 1")

    @property
    def observations(self) -> int:
        return len(self.sizes)

    @property
    def history_window(self) -> list[tuple[int, int | None]]:
        gaps = [None] * (len(self.sizes) - len(self.gaps)) + list(self.gaps)
        return list(zip(self.sizes, gaps))

    def gap_std(self) -> float:
        n = len(self.gaps)
        if n < 2:
            return float("inf")
        m = sum(self.gaps) / n
        return (sum((g - m) ** 2 for g in self.gaps) / n) ** 0.5


def predict_next(rec: PredictionRecord, observed) -> PredictionRecord:
    """Fold one observed frame into ``rec``; return the same record updated.

    Predicted size is the mean of the last W sizes; predicted arrival is the
    observed generation time plus the mean of the last W gaps.
    """
    if observed.stream_id != rec.stream_id:
        raise ValueError(f"frame of {observed.stream_id!r} fed to predictor of {rec.stream_id!r}")
    if rec.last_gen is not None:
        rec.gaps.append(observed.gen_time - rec.last_gen)
        if len(rec.gaps) > rec.window:
            rec.gaps.popleft()
    rec.sizes.append(observed.size_bits)
    if len(rec.sizes) > rec.window:
        rec.sizes.popleft()
    rec.last_gen = observed.gen_time
    rec.predicted_size_bits = sum(rec.sizes) / len(rec.sizes)
    if rec.gaps:
        gap = sum(rec.gaps) / len(rec.gaps)
    else:
        gap = rec.default_gap
    rec.predicted_arrival = None if gap is None else observed.gen_time + int(round(gap))
    return rec


class WindowMeanPredictor:
    """Reference predictor: arithmetic means over a sliding window."""

    def __init__(self, window: int = DEFAULT_WINDOW, default_gap: int | None = None):
        self.window = window
        self.default_gap = default_gap
        self.records: dict[str, PredictionRecord] = {}

    def update(self, frame) -> PredictionRecord:
        rec = self.records.get(frame.stream_id)
        if rec is None:
            rec = PredictionRecord(frame.stream_id, window=self.window, default_gap=self.default_gap)
            self.records[frame.stream_id] = rec
        return predict_next(rec, frame)

    def predict(self, stream_id: str) -> tuple[float, int] | None:
        rec = self.records.get(stream_id)
        if rec is None or rec.predicted_size_bits is None or rec.predicted_arrival is None:
            return None
        return rec.predicted_size_bits, rec.predicted_arrival


def pred_dba(predictions: Iterable[PredictionRecord], reports: Sequence[Report], seg: PonSegment,
             margin: float = DEFAULT_MARGIN, b_max_bits: int | None = None, start: int = 0,
             rotate: int = 0) -> list[Grant]:
    """Predictive DBA: grant forecast frames before they are reported.

    An ONU with in-window predictions gets ``sum(size * (1 + margin))`` on top of
    its limited-service share of the reported backlog, in a slot that starts no
    earlier than the first predicted arrival. ONUs without predictions are
    served exactly as by :func:`ls_dba`. Predicted bits take precedence when the
    window is oversubscribed.
    """
    if b_max_bits is None:
        b_max_bits = seg.fair_share_bits()
    window_end = start + seg.window
    guard = seg.guard_time
    per_onu: dict = {}
    for rec in predictions:
        if rec.predicted_size_bits is None or rec.predicted_arrival is None:
            continue
        if rec.predicted_arrival > window_end:
            continue
        # round off float noise first so 1e5 * 1.1 does not become 110001
        want = math.ceil(round(rec.predicted_size_bits * (1.0 + margin), 6))
        ready = max(start, rec.predicted_arrival)
        bits, first = per_onu.get(rec.onu_id, (0, ready))
        per_onu[rec.onu_id] = (bits + want, min(first, ready))

    ordered = sorted(reports, key=lambda r: _onu_key(r.onu_id))
    n = len(ordered)
    if n and rotate:
        k = rotate % n
        ordered = ordered[k:] + ordered[:k]

    budget = seg.bits_in(seg.window - n * guard)
    pred_alloc = {}
    for onu, (bits, ready) in sorted(per_onu.items(), key=lambda kv: (kv[1][1], _onu_key(kv[0]))):
        take = min(bits, budget)
        pred_alloc[onu] = (take, ready)
        budget -= take
    react_alloc = {}
    for r in ordered:
        take = min(r.queued_bits, b_max_bits, budget)
        react_alloc[r.onu_id] = take
        budget -= take

    plain = [r.onu_id for r in ordered if r.onu_id not in pred_alloc]
    predicted = sorted((ready, _onu_key(onu), onu) for onu, (_, ready) in pred_alloc.items())
    predicted = deque(predicted)
    plain = deque(plain)
    grants = []
    cursor = start
    remaining_slots = len(plain) + len(predicted)
    while plain or predicted:
        if predicted and predicted[0][0] <= cursor:
            onu = predicted.popleft()[2]
        elif plain:
            onu = plain.popleft()
        else:
            ready, _, onu = predicted.popleft()
            # never jump so late that the guards of the slots still to come no longer fit
            cursor = max(cursor, min(ready, window_end - guard * remaining_slots))
        remaining_slots -= 1
        pbits = pred_alloc.get(onu, (0, 0))[0]
        want = pbits + react_alloc.get(onu, 0)
        room = window_end - cursor - guard * (remaining_slots + 1)
        bits = min(want, seg.bits_in(max(room, 0)))
        dur = seg.duration_of(bits)
        grants.append(Grant(onu, cursor, dur, bits, min(pbits, bits)))
        cursor += dur + guard
    return grants


class Hop:
    """A path element for the latency floor: propagation + serialization."""

    def __init__(self, rate_bps: float, prop_delay: int = 0, name: str = ""):
        self.capacity_bps = rate_bps
        self.prop_delay = prop_delay
        self.name = name


def min_path_latency(path: Sequence, frame_bits: int) -> int:
    """Sum of propagation and serialization over every hop, ignoring queues.

    Rounded down so it stays a valid floor for integer-ns measurements.
    """
    if not path:
        raise ValueError("path must contain at least one hop")
    total = 0.0
    for hop in path:
        total += hop.prop_delay + frame_bits * 1e9 / hop.capacity_bps
    return int(total)
