"""WAP-STA wireless hop: path loss, MCS selection, airtime, uplink scheduling, EDCA."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .kernel import US

ACCESS_CLASSES = ("voice", "video", "best_effort", "background")
# lower value = served first by the coordinated scheduler
CLASS_PRIORITY = {c: i for i, c in enumerate(ACCESS_CLASSES)}


@dataclass
class WifiParams:
    tx_power_dbm: float = 18.0
    noise_floor_dbm: float = -94.0
    channel_bandwidth_mhz: int = 160
    per_ppdu_overhead: int = 100 * US
    max_ppdu_time: int = 2000 * US
    max_aggregate_rate_bps: float = 9.6e9
    pl0_db: float = 46.4
    exponent: float = 3.0
    wall_loss_db: float = 10.0
    ru_count: int = 74
    slot_time: int = 9 * US
    sifs: int = 16 * US

    def __post_init__(self):
        if not math.isfinite(self.tx_power_dbm):
            raise ValueError("tx_power_dbm must be finite")
        if self.max_aggregate_rate_bps <= 0:
            raise ValueError("max_aggregate_rate_bps must be positive")
        if self.max_ppdu_time <= 0:
            raise ValueError("max_ppdu_time must be positive")


@dataclass(frozen=True)
class McsRow:
    mcs_index: int
    min_snr_db: float
    phy_rate_bps: float


class McsTable:
    def __init__(self, rows: Iterable[McsRow]):
        self.rows = sorted(rows, key=lambda r: r.mcs_index)
        if not self.rows:
            raise ValueError("MCS table is empty")
        for a, b in zip(self.rows, self.rows[1:]):
            if not (b.min_snr_db > a.min_snr_db and b.phy_rate_bps > a.phy_rate_bps):
                raise ValueError(f"MCS rows {a.mcs_index}->{b.mcs_index}: min_snr and phy_rate must both increase")
        self._by_index = {r.mcs_index: r for r in self.rows}

    def __len__(self):
        return len(self.rows)

    def __getitem__(self, idx: int) -> McsRow:
        return self._by_index[idx]

    @property
    def top(self) -> McsRow:
        return self.rows[-1]

    @property
    def bottom(self) -> McsRow:
        return self.rows[0]

    @classmethod
    def from_csv(cls, path) -> "McsTable":
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            rows = [McsRow(int(r["mcs_index"]), float(r["min_snr_db"]), float(r["phy_rate_bps"])) for r in reader]
        return cls(rows)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["mcs_index", "min_snr_db", "phy_rate_bps"])
            for r in self.rows:
                w.writerow([r.mcs_index, repr(float(r.min_snr_db)), repr(float(r.phy_rate_bps))])


# 802.11ax, 160 MHz, 2 spatial streams, 0.8 us GI
_DEFAULT_RATES_MBPS = (144.1, 288.2, 432.4, 576.5, 864.7, 1152.9, 1297.1, 1441.2, 1729.4, 1921.6, 2161.8, 2401.9)
_DEFAULT_MIN_SNR = (2.0, 5.0, 9.0, 12.0, 15.0, 19.0, 22.0, 25.0, 28.0, 32.0, 35.0, 38.0)


def default_mcs_table() -> McsTable:
    return McsTable(McsRow(i, s, r * 1e6) for i, (s, r) in enumerate(zip(_DEFAULT_MIN_SNR, _DEFAULT_RATES_MBPS)))


def path_loss_db(distance_m: float, walls: int = 0, params: WifiParams | None = None) -> float:
    p = params or WifiParams()
    d = max(float(distance_m), 0.1)
    return p.pl0_db + 10.0 * p.exponent * math.log10(d) + walls * p.wall_loss_db


def rssi_dbm(params: WifiParams, distance_m: float, walls: int = 0) -> float:
    return params.tx_power_dbm - path_loss_db(distance_m, walls, params)


def snr_db(params: WifiParams, distance_m: float, walls: int = 0) -> float:
    return rssi_dbm(params, distance_m, walls) - params.noise_floor_dbm


LINK_DOWN = None


def select_mcs(table: McsTable, snr: float) -> tuple[int, float] | None:
    """Highest row whose threshold is met (inclusive); ``LINK_DOWN`` below the table."""
    best = None
    for row in table.rows:
        if row.min_snr_db <= snr:
            best = row
        else:
            break
    if best is None:
        return LINK_DOWN
    return best.mcs_index, best.phy_rate_bps


def airtime(bits: int, phy_rate_bps: float, params: WifiParams) -> int:
    if phy_rate_bps <= 0:
        raise ValueError("phy_rate_bps must be positive")
    return params.per_ppdu_overhead + math.ceil(bits * 1e9 / phy_rate_bps)


def ppdu_plan(bits: int, phy_rate_bps: float, params: WifiParams) -> list[tuple[int, int]]:
    """Split a frame into PPDUs of at most ``max_ppdu_time`` payload each.

    Returns ``(payload_bits, airtime_ns)`` per PPDU.
    """
    per_ppdu = max(1, int(params.max_ppdu_time * phy_rate_bps // 1e9))
    plan = []
    left = int(bits)
    while True:
        chunk = min(left, per_ppdu)
        plan.append((chunk, airtime(chunk, phy_rate_bps, params)))
        left -= chunk
        if left <= 0:
            break
    return plan


def frame_airtime(bits: int, phy_rate_bps: float, params: WifiParams) -> int:
    return sum(t for _, t in ppdu_plan(bits, phy_rate_bps, params))


def ru_demand(stream_bps: float, phy_rate_bps: float | None, params: WifiParams) -> int:
    """Resource units needed to carry ``stream_bps`` at the current MCS."""
    if stream_bps <= 0:
        return 0
    if not phy_rate_bps:
        return params.ru_count + 1
    return math.ceil(stream_bps / (phy_rate_bps / params.ru_count))


@dataclass
class StaRadio:
    sta_id: object
    position: tuple[float, float, float]
    associated_wap: object = None
    rssi_dbm: float = -math.inf
    snr_db: float = -math.inf
    mcs_index: int | None = None
    phy_rate_bps: float | None = None
    ru_demand: int = 0
    access_class: str = "video"

    def __post_init__(self):
        if self.access_class not in CLASS_PRIORITY:
            raise ValueError(f"unknown access class {self.access_class!r}")

    @property
    def link_down(self) -> bool:
        return self.mcs_index is None


# ---------------------------------------------------------------- scheduled uplink

@dataclass
class UplinkRequest:
    """Backlog of one STA as seen by the WiFi control unit."""

    sta_id: object
    phy_rate_bps: float
    access_class: str = "video"
    frames: list = field(default_factory=list)  # (ready_time, bits), FIFO


@dataclass(frozen=True)
class Interval:
    sta_id: object
    frame_index: int
    start: int
    end: int
    bits: int


class RoundRobin:
    """Rotating pointer over STA ids, per access class."""

    def __init__(self):
        self.last_served: dict = {}
        self.counter = 0

    def pick(self, candidates: Sequence[tuple[str, object]]):
        """``candidates``: (access_class, sta_id). Priority class first, then least recently served."""
        best = min(CLASS_PRIORITY[c] for c, _ in candidates)
        tier = [s for c, s in candidates if CLASS_PRIORITY[c] == best]
        return min(tier, key=lambda s: (self.last_served.get(s, -1), str(s)))

    def served(self, sta_id) -> None:
        self.counter += 1
        self.last_served[sta_id] = self.counter


def scheduled_uplink(stas: Sequence[UplinkRequest], horizon: int, params: WifiParams,
                     start: int = 0) -> list[Interval]:
    """Contention-free uplink plan for one WAP up to ``horizon``.

    Each interval carries one head-of-line frame at its STA's rate.
    """
    rr = RoundRobin()
    heads = {s.sta_id: 0 for s in stas}
    by_id = {s.sta_id: s for s in stas}
    cursor = start
    out: list[Interval] = []
    while cursor < horizon:
        ready = []
        next_ready = None
        for s in stas:
            i = heads[s.sta_id]
            if i >= len(s.frames):
                continue
            t, _ = s.frames[i]
            if t <= cursor:
                ready.append((s.access_class, s.sta_id))
            elif next_ready is None or t < next_ready:
                next_ready = t
        if not ready:
            if next_ready is None or next_ready >= horizon:
                break
            cursor = next_ready
            continue
        sid = rr.pick(ready)
        rr.served(sid)
        s = by_id[sid]
        i = heads[sid]
        bits = s.frames[i][1]
        dur = frame_airtime(bits, s.phy_rate_bps, params)
        out.append(Interval(sid, i, cursor, cursor + dur, bits))
        heads[sid] = i + 1
        cursor += dur
    return out


# ------------------------------------------------------------------------- EDCA

@dataclass(frozen=True)
class EdcaClass:
    cw_min: int
    cw_max: int
    aifsn: int


DEFAULT_EDCA = {
    "voice": EdcaClass(3, 7, 2),
    "video": EdcaClass(7, 15, 2),
    "best_effort": EdcaClass(15, 1023, 3),
    "background": EdcaClass(15, 1023, 7),
}


@dataclass
class ContentionOutcome:
    kind: str  # "winner" | "collision" | "idle"
    winner: object = None
    colliders: tuple = ()
    slots: int = 0  # idle slots elapsed before the transmission started


class EdcaState:
    """Per-STA contention windows for one WAP."""

    def __init__(self, classes: dict[str, EdcaClass] | None = None):
        self.classes = classes or DEFAULT_EDCA
        self.cw: dict = {}

    def window(self, sta: StaRadio) -> int:
        return self.cw.get(sta.sta_id, self.classes[sta.access_class].cw_min)


def edca_contend(active: Sequence[StaRadio], state: EdcaState, rng: np.random.Generator,
                 forced_backoff: dict | None = None) -> ContentionOutcome:
    """One contention round among backlogged STAs.

    Each draws ``uniform{0..CW}`` plus its class AIFSN; a unique minimum wins
    and resets its CW, tied minima collide and double CW up to CW_max.
    ``forced_backoff`` pins draws for tests.
    """
    if not active:
        return ContentionOutcome("idle")
    counts = {}
    for sta in active:
        cls = state.classes[sta.access_class]
        if forced_backoff is not None and sta.sta_id in forced_backoff:
            b = forced_backoff[sta.sta_id]
        else:
            b = int(rng.integers(0, state.window(sta) + 1))
        counts[sta.sta_id] = cls.aifsn + b
    low = min(counts.values())
    tied = [s for s in active if counts[s.sta_id] == low]
    if len(tied) == 1:
        w = tied[0]
        state.cw[w.sta_id] = state.classes[w.access_class].cw_min
        return ContentionOutcome("winner", w.sta_id, (), low)
    for s in tied:
        cls = state.classes[s.access_class]
        state.cw[s.sta_id] = min(2 * (state.window(s) + 1) - 1, cls.cw_max)
    return ContentionOutcome("collision", None, tuple(s.sta_id for s in tied), low)
