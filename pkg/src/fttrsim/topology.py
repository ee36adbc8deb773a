"""Scenario description, validation, geometry and world construction."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace

from .handover import HandoverPolicy, QoeRequirements
from .kernel import MS, S, seconds
from .pon import DEFAULT_GUARD, DEFAULT_MARGIN, DEFAULT_MAX_CYCLE, DEFAULT_WINDOW, PonSegment
from .traffic import PRESET_DATARATES, TrafficProfile, profile_for
from .wifi import CLASS_PRIORITY, McsTable, WifiParams, default_mcs_table, rssi_dbm, select_mcs, snr_db

MAX_WAPS_PER_INTERNAL_PON = 8
DBA_MODES = ("ls", "pred")
WIFI_MODES = ("scheduled", "edca")
HANDOVER_MODES = ("on", "off")

Vec = tuple  # (x, y, z) in metres


@dataclass
class PonConfig:
    capacity_bps: float
    length_m: float
    guard_time: int = DEFAULT_GUARD
    max_cycle: int = DEFAULT_MAX_CYCLE


@dataclass
class Room:
    room_id: int
    mf: int
    lo: Vec
    hi: Vec
    wap: Vec | None = None

    @property
    def wap_position(self) -> Vec:
        if self.wap is not None:
            return self.wap
        return ((self.lo[0] + self.hi[0]) / 2, (self.lo[1] + self.hi[1]) / 2, self.hi[2])

    def contains(self, p: Vec, eps: float = 1e-9) -> bool:
        return all(self.lo[i] - eps <= p[i] <= self.hi[i] + eps for i in range(3))


@dataclass
class StaSpec:
    sta_id: int
    mf: int
    position: Vec
    profile: str = "8K"
    access_class: str = "video"
    peer: int | None = None


@dataclass
class MobilityLeg:
    sta_id: int
    start: Vec
    end: Vec
    speed: float
    start_time: int = 0

    @property
    def duration(self) -> int:
        return int(round(math.dist(self.start, self.end) / self.speed * S))

    @property
    def end_time(self) -> int:
        return self.start_time + self.duration

    def at(self, t: int) -> Vec:
        if t <= self.start_time:
            return self.start
        if t >= self.end_time or self.duration == 0:
            return self.end
        f = (t - self.start_time) / self.duration
        return tuple(a + (b - a) * f for a, b in zip(self.start, self.end))


@dataclass
class Scenario:
    external_pon: PonConfig = field(default_factory=lambda: PonConfig(50e9, 20_000.0))
    internal_pon: PonConfig = field(default_factory=lambda: PonConfig(10e9, 20.0))
    n_mfs: int = 2
    rooms: list = field(default_factory=list)
    stas: list = field(default_factory=list)
    mobility: list = field(default_factory=list)
    dba_mode: str = "ls"
    wifi_mode: str = "scheduled"
    handover: str = "on"
    seed: int = 0
    duration: int = 10 * S
    load: float | None = None
    wifi: WifiParams = field(default_factory=WifiParams)
    policy: HandoverPolicy = field(default_factory=HandoverPolicy)
    mcs_table_path: str | None = None
    margin: float = DEFAULT_MARGIN
    prediction_window: int = DEFAULT_WINDOW
    mobility_period: int = 100 * MS
    warmup_fraction: float = 0.05
    sta_queue_bits: int = 2**34
    sf_queue_bits: int = 2**34
    mf_queue_bits: int = 2**36
    ext_down_bps: float = 50e9
    int_down_bps: float = 10e9
    profiles: dict = field(default_factory=dict)  # label -> TrafficProfile overrides
    forced_handovers: list = field(default_factory=list)  # (time_ns, sta_id, room_id)

    def profile(self, label: str) -> TrafficProfile:
        if label in self.profiles:
            return self.profiles[label]
        return profile_for(label)

    def mcs_table(self) -> McsTable:
        return McsTable.from_csv(self.mcs_table_path) if self.mcs_table_path else default_mcs_table()


def row_rooms(n_mfs: int, per_mf: int, size: Vec = (10.0, 10.0, 3.0)) -> list[Room]:
    """Rooms side by side along x; each MF owns its own premises."""
    rooms = []
    for m in range(n_mfs):
        for j in range(per_mf):
            lo = (j * size[0], 0.0, 0.0)
            hi = ((j + 1) * size[0], size[1], size[2])
            rooms.append(Room(m * per_mf + j, m, lo, hi))
    return rooms


def default_scenario(resolution: str = "8K", pairs: int = 8) -> Scenario:
    """1 OLT, human-side MF 0 and machine-side MF 1, 8 rooms each, one STA pair per room index."""
    sc = Scenario(rooms=row_rooms(2, 8))
    for i in range(pairs):
        x = 10.0 * i + 3.0
        sc.stas.append(StaSpec(i, 0, (x, 5.0, 1.0), resolution, peer=pairs + i))
        sc.stas.append(StaSpec(pairs + i, 1, (x, 5.0, 1.0), resolution, peer=i))
    sc.stas.sort(key=lambda s: s.sta_id)
    return sc


def demo_scenario(resolution: str = "8K", handover: str = "on", dwell: float = 5.0) -> Scenario:
    """One machine STA walking 0 -> 20 m through three rooms, peer static."""
    sc = Scenario(rooms=row_rooms(2, 8), handover=handover)
    sc.stas = [StaSpec(0, 0, (5.0, 5.0, 1.0), resolution, peer=1),
               StaSpec(1, 1, (5.0, 5.0, 1.0), resolution, peer=0)]
    leg = MobilityLeg(1, (5.0, 5.0, 1.0), (25.0, 5.0, 1.0), 1.0, 1 * S)
    sc.mobility = [leg]
    sc.duration = leg.end_time + seconds(dwell)
    return sc


# ------------------------------------------------------------------ geometry

def position_at(legs, start: Vec, t: int) -> Vec:
    """Piecewise-linear position; stationary before, between and after legs."""
    pos = start
    for leg in sorted(legs, key=lambda l: l.start_time):
        if t < leg.start_time:
            break
        pos = leg.at(t)
    return pos


def _slab(p: Vec, q: Vec, room: Room):
    """Parameter interval of segment p->q inside the box, or None."""
    t0, t1 = 0.0, 1.0
    for i in range(3):
        d = q[i] - p[i]
        if abs(d) < 1e-12:
            if p[i] < room.lo[i] - 1e-9 or p[i] > room.hi[i] + 1e-9:
                return None
            continue
        a = (room.lo[i] - p[i]) / d
        b = (room.hi[i] - p[i]) / d
        if a > b:
            a, b = b, a
        t0, t1 = max(t0, a), min(t1, b)
        if t0 > t1:
            return None
    return t0, t1


def count_walls(p: Vec, q: Vec, rooms) -> int:
    """Distinct room-boundary crossings strictly between the endpoints."""
    cuts = []
    for room in rooms:
        iv = _slab(p, q, room)
        if iv is None or iv[1] - iv[0] < 1e-9:
            continue
        for t in iv:
            if 1e-9 < t < 1 - 1e-9:
                cuts.append(t)
    cuts.sort()
    n = 0
    last = None
    for t in cuts:
        if last is None or t - last > 1e-7:
            n += 1
            last = t
    return n


# ---------------------------------------------------------------- validation

def validate(sc: Scenario) -> list[str]:
    v = []
    for name, cfg in (("external_pon", sc.external_pon), ("internal_pon", sc.internal_pon)):
        if cfg.capacity_bps <= 0:
            v.append(f"{name}.capacity_bps: must be positive")
        if cfg.length_m < 0:
            v.append(f"{name}.length_m: must be >= 0")
        if cfg.max_cycle <= 2 * cfg.length_m * 5 + cfg.guard_time:
            v.append(f"{name}.max_cycle: too short for the fiber round trip")
    if sc.external_pon.max_cycle != sc.internal_pon.max_cycle:
        v.append("internal_pon.max_cycle: must equal external_pon.max_cycle (shared polling clock)")
    if sc.n_mfs < 1:
        v.append("layout.n_mfs: need at least one MF")
    seen_rooms = set()
    per_mf: dict[int, int] = {}
    for r in sc.rooms:
        p = f"room.{r.room_id}"
        if r.room_id in seen_rooms:
            v.append(f"{p}: duplicate room id (each SF hosts exactly one WAP)")
        seen_rooms.add(r.room_id)
        if not 0 <= r.mf < sc.n_mfs:
            v.append(f"{p}.mf: MF {r.mf} does not exist")
        if any(r.hi[i] <= r.lo[i] for i in range(3)):
            v.append(f"{p}.box: empty box")
        per_mf[r.mf] = per_mf.get(r.mf, 0) + 1
    for m, n in sorted(per_mf.items()):
        if n > MAX_WAPS_PER_INTERNAL_PON:
            v.append(f"layout.mf.{m}: {n} WAPs on one internal PON exceeds the "
                     f"{MAX_WAPS_PER_INTERNAL_PON}-WAP limit")
    ids = set()
    for s in sc.stas:
        p = f"sta.{s.sta_id}"
        if s.sta_id in ids:
            v.append(f"{p}: duplicate STA id")
        ids.add(s.sta_id)
        if not any(r.mf == s.mf and r.contains(s.position) for r in sc.rooms):
            v.append(f"{p}.position: STA {s.sta_id} at {s.position} is outside all rooms of MF {s.mf}")
        if s.profile not in sc.profiles and s.profile.upper() not in PRESET_DATARATES \
                and s.profile not in PRESET_DATARATES:
            v.append(f"{p}.profile: unknown profile {s.profile!r}")
        if s.access_class not in CLASS_PRIORITY:
            v.append(f"{p}.access_class: unknown class {s.access_class!r}")
    for s in sc.stas:
        if s.peer is not None and s.peer not in ids:
            v.append(f"sta.{s.sta_id}.peer: no STA {s.peer}")
        if s.peer == s.sta_id:
            v.append(f"sta.{s.sta_id}.peer: a STA cannot stream to itself")
    by_sta: dict = {}
    for i, leg in enumerate(sc.mobility):
        p = f"mobility.{i}"
        if leg.sta_id not in ids:
            v.append(f"{p}.sta: no STA {leg.sta_id}")
        if not leg.speed > 0:
            v.append(f"{p}.speed: must be > 0")
            continue
        by_sta.setdefault(leg.sta_id, []).append((leg.start_time, leg.end_time, i))
        sta = next((s for s in sc.stas if s.sta_id == leg.sta_id), None)
        if sta is not None:
            for name, pt in (("from", leg.start), ("to", leg.end)):
                if not any(r.mf == sta.mf and r.contains(pt) for r in sc.rooms):
                    v.append(f"{p}.{name}: {pt} is outside all rooms of MF {sta.mf}")
    for sid, spans in by_sta.items():
        spans.sort()
        for a, b in zip(spans, spans[1:]):
            if b[0] < a[1]:
                v.append(f"mobility.{b[2]}.start: overlaps leg {a[2]} of STA {sid}")
    if sc.dba_mode not in DBA_MODES:
        v.append(f"scenario.dba: {sc.dba_mode!r} not in {DBA_MODES}")
    if sc.wifi_mode not in WIFI_MODES:
        v.append(f"scenario.wifi: {sc.wifi_mode!r} not in {WIFI_MODES}")
    if sc.handover not in HANDOVER_MODES:
        v.append(f"scenario.handover: {sc.handover!r} not in {HANDOVER_MODES}")
    if sc.duration < 0:
        v.append("scenario.duration: must be >= 0")
    if sc.load is not None and not 0 < sc.load <= 1.2:
        v.append("scenario.load: must be in (0, 1.2]")
    if sc.margin < 0:
        v.append("dba.margin: must be >= 0")
    if sc.prediction_window < 1:
        v.append("dba.window: must be >= 1")
    if sc.mobility_period <= 0:
        v.append("scenario.mobility_period: must be positive")
    if not 0 <= sc.warmup_fraction < 1:
        v.append("metrics.warmup_fraction: must be in [0, 1)")
    for i, (t, sid, room) in enumerate(sc.forced_handovers):
        if sid not in ids:
            v.append(f"force.{i}.sta: no STA {sid}")
        if room not in seen_rooms:
            v.append(f"force.{i}.room: no room {room}")
    return v


class ScenarioError(ValueError):
    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


# ------------------------------------------------------------------- world

@dataclass
class WapNode:
    wap_id: int
    mf: int
    room: Room
    position: Vec


@dataclass
class StaNode:
    spec: StaSpec
    profile: TrafficProfile
    wap_id: int | None
    rssi_dbm: float
    snr_db: float
    mcs: tuple | None


@dataclass
class World:
    scenario: Scenario
    external: PonSegment
    internal: list  # PonSegment per MF
    waps: dict  # wap_id -> WapNode
    stas: dict  # sta_id -> StaNode
    mcs_table: McsTable
    wifi_cap_bps: float

    def waps_of(self, mf: int) -> list[WapNode]:
        return [w for w in self.waps.values() if w.mf == mf]

    def link(self, pos: Vec, wap: WapNode) -> tuple[float, float, int]:
        """(rssi, snr, walls) between a position and a WAP."""
        p = self.scenario.wifi
        walls = count_walls(pos, wap.position, [r for r in self.scenario.rooms if r.mf == wap.mf])
        d = math.dist(pos, wap.position)
        return rssi_dbm(p, d, walls), snr_db(p, d, walls), walls

    def strongest(self, pos: Vec, mf: int) -> tuple[int | None, float, float]:
        best = None
        for w in sorted(self.waps_of(mf), key=lambda w: w.wap_id):
            r, s, _ = self.link(pos, w)
            if best is None or r > best[1]:
                best = (w.wap_id, r, s)
        return best if best is not None else (None, -math.inf, -math.inf)

    def dump(self) -> list[str]:
        lines = [f"olt external_pon {self.external.capacity_bps} bps {self.external.length_m} m"]
        for m, seg in enumerate(self.internal):
            lines.append(f"mf {m} internal_pon {seg.capacity_bps} bps {seg.length_m} m")
        for w in sorted(self.waps.values(), key=lambda w: w.wap_id):
            lines.append(f"sf/wap {w.wap_id} mf {w.mf} at {_fmt_vec(w.position)}")
        for s in sorted(self.stas.values(), key=lambda s: s.spec.sta_id):
            lines.append(f"sta {s.spec.sta_id} mf {s.spec.mf} at {_fmt_vec(s.spec.position)} "
                         f"wap {s.wap_id} profile {s.profile.label} peer {s.spec.peer}")
        lines.append(f"wifi_aggregate_cap_bps {self.wifi_cap_bps}")
        return lines


def _fmt_vec(v: Vec) -> str:
    return ",".join(repr(float(x)) for x in v)


def build(sc: Scenario) -> World:
    errs = validate(sc)
    if errs:
        raise ScenarioError(errs)
    ext_cfg, int_cfg = sc.external_pon, sc.internal_pon
    waps = {r.room_id: WapNode(r.room_id, r.mf, r, r.wap_position) for r in sc.rooms}
    internal = []
    for m in range(sc.n_mfs):
        onus = sorted(w.wap_id for w in waps.values() if w.mf == m)
        internal.append(PonSegment(f"internal{m}", int_cfg.capacity_bps, int_cfg.length_m,
                                   int_cfg.guard_time, int_cfg.max_cycle, onus))
    external = PonSegment("external", ext_cfg.capacity_bps, ext_cfg.length_m, ext_cfg.guard_time,
                          ext_cfg.max_cycle, list(range(sc.n_mfs)))
    table = sc.mcs_table()
    world = World(sc, external, internal, waps, {}, table, sc.wifi.max_aggregate_rate_bps)
    for s in sc.stas:
        wap_id, r, snr = world.strongest(s.position, s.mf)
        mcs = select_mcs(table, snr) if wap_id is not None else None
        world.stas[s.sta_id] = StaNode(s, sc.profile(s.profile), wap_id, r, snr, mcs)
    return world


# ------------------------------------------------------------ scenario file

def _vec(text: str) -> Vec:
    parts = [float(x) for x in text.split(",")]
    if len(parts) != 3:
        raise ValueError(f"expected x,y,z, got {text!r}")
    return tuple(parts)


class ParseError(ValueError):
    pass


def _time(text: str) -> int:
    """Seconds by default; suffixes ns, us, ms, s accepted."""
    t = text.strip()
    for suf, mul in (("ns", 1), ("us", 1_000), ("ms", MS), ("s", S)):
        if t.endswith(suf):
            return int(round(float(t[: -len(suf)]) * mul))
    return int(round(float(t) * S))


def parse_scenario(text: str) -> Scenario:
    """Line-oriented ``section.key = value`` format; ``#`` starts a comment."""
    sc = Scenario()
    layout = {"n_mfs": 2, "rooms_per_mf": 8, "room_size": (10.0, 10.0, 3.0)}
    rooms: dict[int, dict] = {}
    stas: dict[int, dict] = {}
    legs: dict[int, dict] = {}
    forced: dict[int, dict] = {}
    profiles: dict[str, dict] = {}
    default_profile = "8K"
    wifi_kw, policy_kw, qoe_kw = {}, {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"line {lineno}: expected 'section.key = value'")
        key, val = (x.strip() for x in line.split("=", 1))
        parts = key.split(".")
        try:
            _assign(sc, parts, val, layout, rooms, stas, legs, forced, profiles, wifi_kw, policy_kw, qoe_kw)
            if parts == ["scenario", "resolution"]:
                default_profile = val
        except ParseError as e:
            raise ParseError(f"line {lineno}: {e}") from None
        except (ValueError, KeyError, TypeError) as e:
            raise ParseError(f"line {lineno}: bad value for {key}: {e}") from None

    sc.n_mfs = int(layout["n_mfs"])
    generated = {r.room_id: r for r in row_rooms(sc.n_mfs, int(layout["rooms_per_mf"]), layout["room_size"])}
    for rid, kv in rooms.items():
        base = generated.get(rid) or Room(rid, 0, (0.0, 0.0, 0.0), layout["room_size"])
        lo, hi = base.lo, base.hi
        if "box" in kv:
            b = [float(x) for x in kv["box"].split(",")]
            if len(b) != 6:
                raise ParseError(f"room.{rid}.box: expected x0,y0,z0,x1,y1,z1")
            lo, hi = tuple(b[:3]), tuple(b[3:])
        generated[rid] = Room(rid, int(kv.get("mf", base.mf)), lo, hi,
                              _vec(kv["wap"]) if "wap" in kv else base.wap)
    sc.rooms = [generated[k] for k in sorted(generated)]
    for label, kv in profiles.items():
        rate = float(kv.pop("datarate_bps", PRESET_DATARATES.get(label, 0.0)))
        kw = {k: (int(v) if k == "interarrival_mean" else float(v)) for k, v in kv.items()}
        sc.profiles[label] = TrafficProfile(label, rate, **kw)
    for sid, kv in sorted(stas.items()):
        sc.stas.append(StaSpec(sid, int(kv.get("mf", 0)), _vec(kv["position"]),
                               kv.get("profile", default_profile), kv.get("access_class", "video"),
                               int(kv["peer"]) if kv.get("peer", "") not in ("", "none") else None))
    for i, kv in sorted(legs.items()):
        sc.mobility.append(MobilityLeg(int(kv["sta"]), _vec(kv["from"]), _vec(kv["to"]),
                                       float(kv["speed"]), _time(kv.get("start", "0"))))
    for i, kv in sorted(forced.items()):
        sc.forced_handovers.append((_time(kv["time"]), int(kv["sta"]), int(kv["room"])))
    if wifi_kw:
        sc.wifi = replace(sc.wifi, **wifi_kw)
    if qoe_kw:
        policy_kw["qoe"] = QoeRequirements(**qoe_kw)
    if policy_kw:
        sc.policy = replace(sc.policy, **policy_kw)
    return sc


def _coerce(cls, name: str, val: str):
    for f in fields(cls):
        if f.name == name:
            kind = f.type if isinstance(f.type, str) else getattr(f.type, "__name__", "")
            if kind.startswith("int"):
                return int(float(val))
            return float(val)
    raise ParseError(f"unknown key {name!r}")


def _assign(sc, parts, val, layout, rooms, stas, legs, forced, profiles, wifi_kw, policy_kw, qoe_kw):
    sec = parts[0]
    if sec == "scenario" and len(parts) == 2:
        k = parts[1]
        if k == "dba":
            sc.dba_mode = val
        elif k == "wifi":
            sc.wifi_mode = val
        elif k == "handover":
            sc.handover = val
        elif k == "seed":
            sc.seed = int(val)
        elif k == "duration":
            sc.duration = _time(val)
        elif k == "load":
            sc.load = None if val in ("", "none") else float(val)
        elif k == "resolution":
            pass
        elif k == "mobility_period":
            sc.mobility_period = _time(val)
        elif k == "mcs_table":
            sc.mcs_table_path = val
        else:
            raise ParseError(f"unknown key scenario.{k}")
    elif sec in ("external_pon", "internal_pon") and len(parts) == 2:
        cfg = getattr(sc, sec)
        k = parts[1]
        if k in ("guard_time", "max_cycle"):
            setattr(cfg, k, _time(val))
        elif k in ("capacity_bps", "length_m"):
            setattr(cfg, k, float(val))
        else:
            raise ParseError(f"unknown key {sec}.{k}")
    elif sec == "downstream" and len(parts) == 2 and parts[1] in ("ext_bps", "int_bps"):
        setattr(sc, "ext_down_bps" if parts[1] == "ext_bps" else "int_down_bps", float(val))
    elif sec == "layout" and len(parts) == 2:
        k = parts[1]
        if k in ("n_mfs", "rooms_per_mf"):
            layout[k] = int(val)
        elif k == "room_size":
            layout[k] = _vec(val)
        else:
            raise ParseError(f"unknown key layout.{k}")
    elif sec in ("room", "sta", "mobility", "force") and len(parts) == 3:
        target = {"room": rooms, "sta": stas, "mobility": legs, "force": forced}[sec]
        target.setdefault(int(parts[1]), {})[parts[2]] = val
    elif sec == "profile" and len(parts) == 3:
        profiles.setdefault(parts[1], {})[parts[2]] = val
    elif sec == "wifi" and len(parts) == 2:
        wifi_kw[parts[1]] = _coerce(WifiParams, parts[1], val)
    elif sec == "policy" and len(parts) == 2:
        k = parts[1]
        if k in ("max_latency", "max_jitter"):
            qoe_kw[k] = _time(val)
        elif k in ("cooldown", "sensing_delay"):
            policy_kw[k] = _time(val)
        else:
            policy_kw[k] = _coerce(HandoverPolicy, k, val)
    elif sec == "dba" and len(parts) == 2:
        if parts[1] == "margin":
            sc.margin = float(val)
        elif parts[1] == "window":
            sc.prediction_window = int(val)
        else:
            raise ParseError(f"unknown key dba.{parts[1]}")
    elif sec == "metrics" and parts[1:] == ["warmup_fraction"]:
        sc.warmup_fraction = float(val)
    elif sec == "queue" and len(parts) == 2 and parts[1] in ("sta_bits", "sf_bits", "mf_bits"):
        setattr(sc, {"sta_bits": "sta_queue_bits", "sf_bits": "sf_queue_bits",
                     "mf_bits": "mf_queue_bits"}[parts[1]], int(float(val)))
    else:
        raise ParseError(f"unknown key {'.'.join(parts)}")


def dump_scenario(sc: Scenario) -> str:
    """Inverse of :func:`parse_scenario` for the fields it understands."""
    out = [f"scenario.dba = {sc.dba_mode}", f"scenario.wifi = {sc.wifi_mode}",
           f"scenario.handover = {sc.handover}", f"scenario.seed = {sc.seed}",
           f"scenario.duration = {sc.duration}ns"]
    if sc.load is not None:
        out.append(f"scenario.load = {sc.load!r}")
    for name in ("external_pon", "internal_pon"):
        cfg = getattr(sc, name)
        out += [f"{name}.capacity_bps = {cfg.capacity_bps!r}", f"{name}.length_m = {cfg.length_m!r}",
                f"{name}.guard_time = {cfg.guard_time}ns", f"{name}.max_cycle = {cfg.max_cycle}ns"]
    out.append(f"layout.n_mfs = {sc.n_mfs}")
    out.append("layout.rooms_per_mf = 0")
    for r in sc.rooms:
        out.append(f"room.{r.room_id}.mf = {r.mf}")
        out.append(f"room.{r.room_id}.box = {_fmt_vec(r.lo)},{_fmt_vec(r.hi)}")
        if r.wap is not None:
            out.append(f"room.{r.room_id}.wap = {_fmt_vec(r.wap)}")
    for s in sc.stas:
        p = f"sta.{s.sta_id}"
        out += [f"{p}.mf = {s.mf}", f"{p}.position = {_fmt_vec(s.position)}", f"{p}.profile = {s.profile}",
                f"{p}.access_class = {s.access_class}", f"{p}.peer = {'none' if s.peer is None else s.peer}"]
    for i, leg in enumerate(sc.mobility):
        p = f"mobility.{i}"
        out += [f"{p}.sta = {leg.sta_id}", f"{p}.from = {_fmt_vec(leg.start)}", f"{p}.to = {_fmt_vec(leg.end)}",
                f"{p}.speed = {leg.speed!r}", f"{p}.start = {leg.start_time}ns"]
    for i, (t, sid, room) in enumerate(sc.forced_handovers):
        out += [f"force.{i}.time = {t}ns", f"force.{i}.sta = {sid}", f"force.{i}.room = {room}"]
    return "\n".join(out) + "\n"


def load_scenario(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())
