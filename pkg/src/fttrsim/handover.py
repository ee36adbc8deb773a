"""QoE-triggered seamless handover between WAPs of one MF."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .kernel import MS
from .wifi import StaRadio, WifiParams, rssi_dbm


@dataclass(frozen=True)
class QoeRequirements:
    max_latency: int = 20 * MS
    max_jitter: int = 15 * MS

    def __post_init__(self):
        if self.max_latency <= 0 or self.max_jitter <= 0:
            raise ValueError("QoE bounds must be positive")


@dataclass
class HandoverPolicy:
    qoe: QoeRequirements = field(default_factory=QoeRequirements)
    stats_window: int = 32
    ru_trend_window: int = 20
    min_ru_slope: float = 0.0
    low_mcs_threshold: int = 2
    hysteresis_db: float = 6.0
    min_available_bps: float = 0.0
    cooldown: int = 500 * MS
    sensing_delay: int = 2 * MS

    def __post_init__(self):
        if self.stats_window < 1 or self.ru_trend_window < 1:
            raise ValueError("windows must be >= 1")
        if self.hysteresis_db < 0:
            raise ValueError("hysteresis_db must be >= 0")


class HandoverPhase(enum.Enum):
    MONITORING = "Monitoring"
    SENSING_REQUESTED = "SensingRequested"
    REPORT_RECEIVED = "ReportReceived"
    TARGET_SELECTED = "TargetSelected"
    PATH_PRE_ESTABLISHED = "PathPreEstablished"
    SWITCHING = "Switching"


_ORDER = list(HandoverPhase)


class PhaseError(RuntimeError):
    pass


@dataclass
class StaHandoverState:
    sta_id: object
    phase: HandoverPhase = HandoverPhase.MONITORING
    entered: dict = field(default_factory=dict)
    cooldown_until: int = -1
    history: list = field(default_factory=list)
    target: object = None
    path: object = None

    def advance(self, to: HandoverPhase, t: int) -> None:
        """Move one step along the fixed phase order, or back to Monitoring."""
        cur = _ORDER.index(self.phase)
        nxt = _ORDER.index(to)
        if to is not HandoverPhase.MONITORING and nxt != cur + 1:
            raise PhaseError(f"{self.sta_id}: illegal transition {self.phase.value} -> {to.value}")
        self.phase = to
        self.entered[to] = t
        self.history.append((t, to))

    def in_cooldown(self, t: int) -> bool:
        return t < self.cooldown_until


@dataclass
class RollingStats:
    """Latency samples (ns) of recently delivered frames plus an RU-demand trace."""

    window: int = 32
    ru_window: int = 20
    latencies: list = field(default_factory=list)
    ru_trace: list = field(default_factory=list)

    def add_latency(self, lat: int) -> None:
        self.latencies.append(lat)
        if len(self.latencies) > self.window:
            del self.latencies[0]

    def add_ru(self, ru: int) -> None:
        self.ru_trace.append(ru)
        if len(self.ru_trace) > self.ru_window + 1:
            del self.ru_trace[0]

    @property
    def full(self) -> bool:
        return len(self.latencies) >= self.window

    def mean(self) -> float:
        return sum(self.latencies) / len(self.latencies) if self.latencies else 0.0

    def std(self) -> float:
        n = len(self.latencies)
        if n < 2:
            return 0.0
        m = self.mean()
        return math.sqrt(sum((x - m) ** 2 for x in self.latencies) / n)

    def ru_slope(self) -> float:
        """Average per-sample RU increase from the oldest sample in the window."""
        tr = self.ru_trace
        if len(tr) < 2:
            return 0.0
        return (tr[-1] - min(tr[:-1])) / (len(tr) - 1)


def evaluate_trigger(stats: RollingStats, radio: StaRadio, policy: HandoverPolicy,
                     now: int = 0, state: StaHandoverState | None = None) -> bool:
    if state is not None and state.in_cooldown(now):
        return False
    if not stats.full:
        return False
    qoe_breach = (stats.mean() > policy.qoe.max_latency) or (stats.std() > policy.qoe.max_jitter)
    low_mcs = radio.link_down or radio.mcs_index <= policy.low_mcs_threshold
    if not qoe_breach or not low_mcs:
        return False
    return stats.ru_slope() > policy.min_ru_slope


@dataclass
class WapSite:
    wap_id: object
    position: tuple[float, float, float]


@dataclass
class SensingReport:
    sta_id: object
    entries: list  # (wap_id, rssi_dbm)
    measured_at: int
    current_wap: object = None

    def rssi(self, wap_id) -> float:
        for w, r in self.entries:
            if w == wap_id:
                return r
        raise KeyError(wap_id)


def _dist(a, b) -> float:
    return math.dist(a, b)


def build_sensing_report(sta: StaRadio, waps: Sequence[WapSite], params: WifiParams, t: int,
                         walls_between=None) -> SensingReport:
    """RSSI of every WAP at the STA, from the same path-loss model as the data link."""
    entries = []
    for w in waps:
        walls = walls_between(sta.position, w.position) if walls_between else 0
        entries.append((w.wap_id, rssi_dbm(params, _dist(sta.position, w.position), walls)))
    if sta.associated_wap is not None and all(w != sta.associated_wap for w, _ in entries):
        raise ValueError(f"sensing set for {sta.sta_id} lacks its current WAP {sta.associated_wap}")
    return SensingReport(sta.sta_id, entries, t, sta.associated_wap)


def select_target(report: SensingReport, wap_loads: Mapping, stream_bps: float,
                  policy: HandoverPolicy, wap_capacity: Mapping | float = 9.6e9):
    """Best neighbor by RSSI among those clearing hysteresis and with headroom."""
    cur = report.current_wap
    cur_rssi = report.rssi(cur) if cur is not None else -math.inf
    need = max(stream_bps, policy.min_available_bps)
    cands = []
    for wap, r in report.entries:
        if wap == cur:
            continue
        if r < cur_rssi + policy.hysteresis_db:
            continue
        cap = wap_capacity[wap] if isinstance(wap_capacity, Mapping) else wap_capacity
        load = wap_loads.get(wap, 0.0)
        if cap - load < need:
            continue
        cands.append((-r, load, str(wap), wap))
    if not cands:
        return None
    cands.sort(key=lambda c: (c[0], c[1], c[2]))
    return cands[0][3]


@dataclass
class PathHandle:
    sta_id: object
    old_wap: object
    new_wap: object
    established_at: int
    active: bool = True


class AdmissionError(RuntimeError):
    pass


def pre_establish(sta_id, old_wap, target_wap, t: int, sf_headroom_bps: float,
                  stream_bps: float) -> PathHandle:
    """Install forwarding for the target SF before the switch.

    Raises :class:`AdmissionError` when the target SF cannot absorb the stream.
    """
    if sf_headroom_bps < stream_bps:
        raise AdmissionError(f"SF of {target_wap} has {sf_headroom_bps:.0f} bps headroom, "
                             f"stream needs {stream_bps:.0f}")
    return PathHandle(sta_id, old_wap, target_wap, t)


def execute_handover(radio: StaRadio, path: PathHandle, known_waps) -> object:
    """Atomically re-associate; returns the previous WAP."""
    if path.new_wap not in known_waps:
        raise AdmissionError(f"target {path.new_wap} disappeared")
    old = radio.associated_wap
    radio.associated_wap = path.new_wap
    path.active = False
    return old


HANDOVER_AUDIT_HEADER = ["time_ns", "sta_id", "phase", "old_wap", "new_wap",
                         "trigger_latency_ms", "trigger_jitter_ms"]
