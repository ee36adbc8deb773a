"""Per-frame records and the QoE aggregates computed from them."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .handover import QoeRequirements
from .kernel import MS

RECORD_HEADER = ["stream_id", "frame_id", "gen_ns", "wifi_done_ns", "sf_depart_ns",
                 "mf_depart_ns", "delivered_ns", "dropped", "reason"]

SUMMARY_HEADER = ["load", "dba_mode", "handover_mode", "stream", "mean_latency_ms", "jitter_ms",
                  "p99_latency_ms", "wireless_latency_ms", "delivered_count", "drop_count",
                  "offered_load_normalized", "qoe_ok"]


class FrameRecord:
    __slots__ = ("stream_id", "frame_id", "size_bits", "gen_time", "wifi_done_time", "sf_depart_time",
                 "mf_depart_time", "delivered_time", "dropped", "reason")

    def __init__(self, stream_id, frame_id, gen_time, size_bits=0):
        self.stream_id = stream_id
        self.frame_id = frame_id
        self.size_bits = size_bits
        self.gen_time = gen_time
        self.wifi_done_time = None
        self.sf_depart_time = None
        self.mf_depart_time = None
        self.delivered_time = None
        self.dropped = False
        self.reason = ""

    @property
    def delivered(self) -> bool:
        return self.delivered_time is not None and not self.dropped

    def drop(self, reason: str) -> None:
        if self.delivered_time is None:
            self.dropped = True
            if not self.reason:
                self.reason = reason

    def row(self) -> list:
        def f(x):
            return "" if x is None else str(int(x))
        return [self.stream_id, str(self.frame_id), f(self.gen_time), f(self.wifi_done_time),
                f(self.sf_depart_time), f(self.mf_depart_time), f(self.delivered_time),
                "1" if self.dropped else "0", self.reason]

    def __repr__(self):
        return f"FrameRecord({self.stream_id!r}, {self.frame_id}, gen={self.gen_time}, delivered={self.delivered_time})"


class DroppedFrameError(ValueError):
    pass


def e2e_latency(rec: FrameRecord) -> int:
    if not rec.delivered:
        raise DroppedFrameError(f"{rec.stream_id}#{rec.frame_id} was not delivered")
    return rec.delivered_time - rec.gen_time


def wireless_latency(rec: FrameRecord) -> int:
    if rec.wifi_done_time is None:
        raise DroppedFrameError(f"{rec.stream_id}#{rec.frame_id} never left the wireless hop")
    return rec.wifi_done_time - rec.gen_time


@dataclass(frozen=True)
class JitterResult:
    value: float
    defined: bool


def jitter(latencies: Sequence[float]) -> JitterResult:
    """Population standard deviation; reported as 0 (flagged undefined) below two samples."""
    n = len(latencies)
    if n < 2:
        return JitterResult(0.0, False)
    arr = np.asarray(latencies, dtype=float)
    return JitterResult(float(arr.std()), True)


def interdelivery_jitter(delivered_times: Sequence[float]) -> JitterResult:
    """Alternative definition: std of the gaps between consecutive deliveries."""
    if len(delivered_times) < 3:
        return JitterResult(0.0, False)
    return jitter(np.diff(np.asarray(delivered_times, dtype=float)))


@dataclass
class StreamSummary:
    stream: str
    mean_latency_ms: float = 0.0
    jitter_ms: float = 0.0
    p99_latency_ms: float = 0.0
    wireless_latency_ms: float = 0.0
    delivered_count: int = 0
    drop_count: int = 0
    qoe_ok: bool = True


@dataclass
class RunSummary:
    streams: list = field(default_factory=list)
    aggregate: StreamSummary = field(default_factory=lambda: StreamSummary("all"))
    generated: int = 0
    in_flight: int = 0
    offered_load_normalized: float = 0.0
    load_denominator: str = "internal_pon_upstream"
    warmup_ns: int = 0
    total_delivered: int = 0
    total_dropped: int = 0

    @property
    def delivered_count(self) -> int:
        return self.aggregate.delivered_count

    @property
    def drop_count(self) -> int:
        return self.aggregate.drop_count

    @property
    def mean_latency_ms(self) -> float:
        return self.aggregate.mean_latency_ms

    @property
    def jitter_ms(self) -> float:
        return self.aggregate.jitter_ms

    @property
    def qoe_ok(self) -> bool:
        return self.aggregate.qoe_ok


def qoe_ok(summary, req: QoeRequirements | None = None) -> bool:
    """Both bounds inclusive. A :class:`RunSummary` passes only if every stream passes."""
    req = req or QoeRequirements()
    if isinstance(summary, RunSummary):
        return all(qoe_ok(s, req) for s in summary.streams)
    return (summary.mean_latency_ms * MS <= req.max_latency + 1e-9
            and summary.jitter_ms * MS <= req.max_jitter + 1e-9)


def _stream_summary(name: str, lats: np.ndarray, wlats: np.ndarray, drops: int,
                    req: QoeRequirements) -> StreamSummary:
    s = StreamSummary(name, delivered_count=int(lats.size), drop_count=int(drops))
    if lats.size:
        s.mean_latency_ms = float(lats.mean()) / MS
        s.jitter_ms = jitter(lats).value / MS
        s.p99_latency_ms = float(np.percentile(lats, 99)) / MS
    if wlats.size:
        s.wireless_latency_ms = float(wlats.mean()) / MS
    s.qoe_ok = qoe_ok(s, req)
    return s


def summarize(records: Iterable[FrameRecord], warmup_ns: int = 0, offered_load: float = 0.0,
              req: QoeRequirements | None = None, in_flight: int | None = None) -> RunSummary:
    """Aggregate delivered frames generated after ``warmup_ns``.

    Conservation counts (generated / delivered / dropped / in flight) cover
    every record, warm-up included.
    """
    req = req or QoeRequirements()
    records = list(records)
    per: dict[str, tuple[list, list, list]] = {}
    generated = len(records)
    total_delivered = total_dropped = 0
    for r in records:
        lat, wl, dr = per.setdefault(r.stream_id, ([], [], [0]))
        if r.dropped:
            total_dropped += 1
        elif r.delivered_time is not None:
            total_delivered += 1
        if r.gen_time < warmup_ns:
            continue
        if r.dropped:
            dr[0] += 1
        elif r.delivered_time is not None:
            lat.append(r.delivered_time - r.gen_time)
            if r.wifi_done_time is not None:
                wl.append(r.wifi_done_time - r.gen_time)
    out = RunSummary(generated=generated, offered_load_normalized=offered_load, warmup_ns=warmup_ns)
    all_l, all_w, all_d = [], [], 0
    for name in sorted(per):
        lat, wl, dr = per[name]
        out.streams.append(_stream_summary(name, np.asarray(lat, dtype=np.int64),
                                           np.asarray(wl, dtype=np.int64), dr[0], req))
        all_l.extend(lat)
        all_w.extend(wl)
        all_d += dr[0]
    out.aggregate = _stream_summary("all", np.asarray(all_l, dtype=np.int64),
                                    np.asarray(all_w, dtype=np.int64), all_d, req)
    out.aggregate.qoe_ok = all(s.qoe_ok for s in out.streams)
    out.in_flight = generated - total_delivered - total_dropped if in_flight is None else in_flight
    out.total_delivered = total_delivered
    out.total_dropped = total_dropped
    return out


def _fmt(x: float) -> str:
    return repr(float(x)) if math.isfinite(x) else "nan"


def write_records_csv(path, records: Iterable[FrameRecord]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RECORD_HEADER)
        for r in records:
            w.writerow(r.row())


def read_records_csv(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def summary_rows(summary: RunSummary, load: float, dba: str, handover: str) -> list[list[str]]:
    rows = []
    for s in summary.streams + [summary.aggregate]:
        rows.append([_fmt(load), dba, handover, s.stream, _fmt(s.mean_latency_ms), _fmt(s.jitter_ms),
                     _fmt(s.p99_latency_ms), _fmt(s.wireless_latency_ms), str(s.delivered_count),
                     str(s.drop_count), _fmt(summary.offered_load_normalized), "1" if s.qoe_ok else "0"])
    return rows


def write_summary_csv(path, rows: Iterable[list[str]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_HEADER)
        for row in rows:
            w.writerow(row)
