"""Event-driven runtime tying traffic, WiFi, the cascaded PONs and handover together."""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import TextIO

from .handover import (AdmissionError, HandoverPhase, RollingStats, StaHandoverState, WapSite,
                       build_sensing_report, evaluate_trigger, execute_handover, pre_establish,
                       select_target)
from .kernel import MS, Simulator
from .metrics import FrameRecord, RunSummary, summarize
from .pon import (Grant, Hop, OnuQueue, PredictionRecord, QueueEntry, Report, check_ls_config,
                  enqueue, ls_dba, pred_dba, transmit_merged)
from .topology import Scenario, World, build, count_walls, position_at
from .traffic import FrameStream
from .wifi import EdcaState, RoundRobin, StaRadio, edca_contend, ppdu_plan, ru_demand, select_mcs

DBA_AUDIT_HEADER = ["cycle_idx", "onu_id", "reported_bits", "granted_bits", "grant_start_ns", "grant_dur_ns"]


class InvariantError(AssertionError):
    pass


class Frame:
    __slots__ = ("rec", "sta", "size", "sf_left", "dropped")

    def __init__(self, rec, sta, size):
        self.rec = rec
        self.sta = sta
        self.size = size
        self.sf_left = 0
        self.dropped = False


class Reseq:
    """Releases a stream's frames in generation order."""

    __slots__ = ("next_id", "buf", "last")

    def __init__(self):
        self.next_id = 0
        self.buf: dict = {}
        self.last = 0


class StaRt:
    def __init__(self, node, rng, stream_id):
        spec = node.spec
        self.sid = spec.sta_id
        self.spec = spec
        self.mf = spec.mf
        self.peer = spec.peer
        self.profile = node.profile
        self.bps = node.profile.datarate_bps
        self.stream_id = stream_id
        self.rng = rng
        self.stream = FrameStream(stream_id, node.profile,
                                  start_offset=int(rng.integers(0, node.profile.interarrival_mean)))
        self.radio = StaRadio(spec.sta_id, spec.position, node.wap_id, node.rssi_dbm, node.snr_db,
                              None if node.mcs is None else node.mcs[0],
                              None if node.mcs is None else node.mcs[1], 0, spec.access_class)
        self.queue: deque[Frame] = deque()
        self.backlog = 0
        self.records: list[FrameRecord] = []
        self.reseq = Reseq()
        self.pending = None  # next XrFrame to emit
        self.legs = []
        self.positions: list = []  # (frame_id, position) for moving STAs


class SfRt:
    def __init__(self, wid, mf, sc: Scenario):
        self.wid = wid
        self.mf = mf
        self.xr = OnuQueue(wid, sc.sf_queue_bits)
        self.bg = OnuQueue(wid, sc.sf_queue_bits)
        self.bg_rate = 0
        self.bg_sent = 0
        self.last_report = 0
        self.grant: Grant | None = None
        self.stas: set = set()
        self.busy_until = 0
        self.rr = RoundRobin()
        self.edca = EdcaState()
        self.kick_pending = False


class MfRt:
    def __init__(self, m, seg, sc: Scenario):
        self.m = m
        self.seg = seg
        self.sfs: list[SfRt] = []
        self.xr = OnuQueue(m, sc.mf_queue_bits)
        self.bg = OnuQueue(m, sc.mf_queue_bits)
        self.grant: Grant | None = None
        self.last_report = 0
        self.down_busy = 0
        self.bg_batch = 0
        self.bg_latest = 0


@dataclass
class SimResult:
    scenario: Scenario
    world: World
    records: list
    summary: RunSummary
    dba_audit: dict = field(default_factory=dict)
    handover_audit: list = field(default_factory=list)
    handovers: int = 0
    in_flight_structural: int = 0
    positions: dict = field(default_factory=dict)
    mobility_samples: dict = field(default_factory=dict)
    collisions: int = 0
    events: int = 0


class FttrSimulation:
    def __init__(self, scenario: Scenario, trace: TextIO | None = None, audit: bool = False):
        self.sc = scenario
        self.world = build(scenario)
        self.sim = Simulator(scenario.seed, trace)
        self.audit = audit
        self.dba_audit: dict = {}
        self.ho_audit: list = []
        self.handovers = 0
        self.collisions = 0
        self.table = self.world.mcs_table
        self.params = scenario.wifi
        self.policy = scenario.policy
        self.period = scenario.internal_pon.max_cycle
        self.mfs = [MfRt(m, seg, scenario) for m, seg in enumerate(self.world.internal)]
        self.sfs: dict[int, SfRt] = {}
        for w in sorted(self.world.waps.values(), key=lambda w: w.wap_id):
            sf = SfRt(w.wap_id, w.mf, scenario)
            self.sfs[w.wap_id] = sf
            self.mfs[w.mf].sfs.append(sf)
        self.b_max = {}
        for mf in self.mfs:
            if mf.sfs:
                self.b_max[mf.m] = mf.seg.fair_share_bits()
                check_ls_config(mf.seg, self.b_max[mf.m])
        self.ext = self.world.external
        self.ext_b_max = self.ext.fair_share_bits()
        self.olt_busy = 0
        self.stas: dict[int, StaRt] = {}
        for sid in sorted(self.world.stas):
            node = self.world.stas[sid]
            st = StaRt(node, self.sim.rng(f"traffic.sta{sid}"), f"sta{sid}")
            st.legs = [l for l in scenario.mobility if l.sta_id == sid]
            st.stats = RollingStats(self.policy.stats_window, self.policy.ru_trend_window)
            st.ho = StaHandoverState(sid)
            st.radio.ru_demand = ru_demand(st.bps, st.radio.phy_rate_bps, self.params)
            self.stas[sid] = st
            if st.radio.associated_wap is not None:
                self.sfs[st.radio.associated_wap].stas.add(sid)
        self._set_background()
        self.end = scenario.duration
        self.mobility_samples: dict = {}

    # ------------------------------------------------------------ setup

    def _xr_bps(self, mf: int) -> float:
        return sum(s.bps for s in self.stas.values() if s.mf == mf)

    def _set_background(self):
        """CBR fill per SF so the internal PON carries the target normalized load."""
        load = self.sc.load
        self.offered_load = 0.0
        for mf in self.mfs:
            cap = mf.seg.capacity_bps
            xr = self._xr_bps(mf.m)
            bg = 0.0
            if load is not None and mf.sfs:
                bg = max(0.0, load * cap - xr)
                per = int(bg // len(mf.sfs))
                for sf in mf.sfs:
                    sf.bg_rate = per
                bg = per * len(mf.sfs)
            self.offered_load = max(self.offered_load, (xr + bg) / cap)

    def sf_capacity_bps(self, mf: int) -> float:
        return self.b_max[mf] * 1e9 / self.period

    def committed_bps(self, wid) -> float:
        sf = self.sfs[wid]
        return sf.bg_rate + sum(self.stas[s].bps for s in sf.stas)

    # ------------------------------------------------------------- run

    def run(self) -> SimResult:
        sim = self.sim
        end = self.end
        for sid, st in self.stas.items():
            st.pending = st.stream.next_frame(st.rng)
            if st.pending.gen_time <= end:
                sim.schedule(st.pending.gen_time, "gen", self._on_gen, st, detail=f"sta{sid}")
            if st.legs:
                first = min(l.start_time for l in st.legs)
                last = max(l.end_time for l in st.legs)
                self.mobility_samples[sid] = []
                # one update per period of movement, the last one at or after arrival
                t = first + self.sc.mobility_period
                while t <= end and t < last + self.sc.mobility_period:
                    sim.schedule(t, "move", self._on_move, st, detail=f"sta{sid}")
                    t += self.sc.mobility_period
        for t, sid, room in self.sc.forced_handovers:
            if t <= end:
                sim.schedule(t, "force_ho", self._on_forced, self.stas[sid], room, detail=f"sta{sid}->{room}")
        if end > 0 and self.mfs:
            sim.schedule(0, "tick", self._on_tick, 0, detail="0")
        events = sim.run_until(end)
        return self._finish(events)

    # ------------------------------------------------------- generation

    def _on_gen(self, st: StaRt):
        fr = st.pending
        rec = FrameRecord(st.stream_id, fr.frame_id, fr.gen_time, fr.size_bits)
        st.records.append(rec)
        if st.legs:
            st.positions.append(position_at(st.legs, st.spec.position, fr.gen_time))
        if st.backlog + fr.size_bits > self.sc.sta_queue_bits:
            rec.drop("sta_overflow")
            self._skip(st, fr.frame_id)
        else:
            st.queue.append(Frame(rec, st, fr.size_bits))
            st.backlog += fr.size_bits
            if st.radio.associated_wap is not None:
                self._kick(self.sfs[st.radio.associated_wap])
        st.pending = st.stream.next_frame(st.rng)
        if st.pending.gen_time <= self.end:
            self.sim.schedule(st.pending.gen_time, "gen", self._on_gen, st, detail=st.stream_id)

    # -------------------------------------------------------------- wifi

    def _kick(self, sf: SfRt):
        now = self.sim.now()
        if sf.busy_until > now or sf.kick_pending:
            return
        cands = [self.stas[s] for s in sorted(sf.stas)
                 if self.stas[s].queue and not self.stas[s].radio.link_down]
        if not cands:
            return
        if self.sc.wifi_mode == "scheduled":
            sid = sf.rr.pick([(c.radio.access_class, c.sid) for c in cands])
            sf.rr.served(sid)
            self._air(sf, self.stas[sid], now)
            return
        out = edca_contend([c.radio for c in cands], sf.edca, self.sim.rng(f"edca.{sf.wid}"))
        wait = self.params.sifs + out.slots * self.params.slot_time
        if out.kind == "winner":
            self._air(sf, self.stas[out.winner], now + wait)
            return
        self.collisions += 1
        lost = 0
        for sid in out.colliders:
            c = self.stas[sid]
            lost = max(lost, ppdu_plan(c.queue[0].size, c.radio.phy_rate_bps, self.params)[0][1])
        sf.busy_until = now + wait + lost
        self._free_at(sf)

    def _free_at(self, sf: SfRt):
        sf.kick_pending = True
        self.sim.schedule(sf.busy_until, "wifi_free", self._on_free, sf, detail=f"wap{sf.wid}")

    def _on_free(self, sf: SfRt):
        sf.kick_pending = False
        self._kick(sf)

    def _air(self, sf: SfRt, st: StaRt, start: int):
        fr = st.queue.popleft()
        st.backlog -= fr.size
        t = start
        stream = st.stream_id
        fid = fr.rec.frame_id
        for bits, dur in ppdu_plan(fr.size, st.radio.phy_rate_bps, self.params):
            t += dur
            if fr.dropped:
                continue
            if enqueue(sf.xr, QueueEntry(stream, fid, bits, t, fr)):
                fr.sf_left += bits
            else:
                fr.dropped = True
                fr.rec.drop("sf_overflow")
                self._skip(st, fid)
        fr.rec.wifi_done_time = t
        sf.busy_until = t
        self._free_at(sf)

    # -------------------------------------------------------------- PON

    def _on_tick(self, k: int):
        T = self.sim.now()
        for mf in self.mfs:
            if mf.sfs:
                self._internal_cycle(mf, T, k)
        self._external_cycle(T, k)
        nxt = T + self.period
        if nxt <= self.end:
            self.sim.schedule(nxt, "tick", self._on_tick, k + 1, detail=str(k + 1))

    def _serve(self, xr: OnuQueue, bg: OnuQueue, g: Grant, seg):
        """Predicted bits go to the XR queue first; the rest serves both queues in arrival order."""
        if g.granted_bits <= 0:
            return []
        deps = []
        start = g.start
        left = g.granted_bits
        if g.predicted_bits:
            deps = transmit_merged([xr], Grant(g.onu_id, g.start, g.duration, g.predicted_bits), seg)
            if deps:
                start = deps[-1].end
                left -= sum(d.bits for d in deps)
        if left > 0 and start < g.end:
            deps += transmit_merged([xr, bg], Grant(g.onu_id, start, g.end - start, left), seg)
        return deps

    @staticmethod
    def _xr_forecasts(onus, window_end: int) -> list[PredictionRecord]:
        """XR bits queued or scheduled to land at each ONU before ``window_end``."""
        preds = []
        for onu in onus:
            for e in onu.xr.fifo:
                if e.enqueue_time > window_end:
                    break
                preds.append(PredictionRecord(e.stream_id, predicted_size_bits=e.remaining_bits,
                                              predicted_arrival=e.enqueue_time, onu_id=onu.xr.onu_id))
        return preds

    def _internal_cycle(self, mf: MfRt, T: int, k: int):
        seg = mf.seg
        reports = []
        pred = self.sc.dba_mode == "pred"
        for sf in mf.sfs:
            g = sf.grant
            rt = T
            if g is not None:
                for d in self._serve(sf.xr, sf.bg, g, seg):
                    e = d.entry
                    if e.frame is None:
                        mf.bg_batch += d.bits
                        if d.arrival > mf.bg_latest:
                            mf.bg_latest = d.arrival
                        continue
                    fr = e.frame
                    fr.sf_left -= d.bits
                    if fr.sf_left == 0 and e.remaining_bits == 0 and not fr.dropped:
                        fr.rec.sf_depart_time = d.end
                        if not enqueue(mf.xr, QueueEntry(fr.rec.stream_id, fr.rec.frame_id, fr.size,
                                                         d.arrival, fr)):
                            fr.dropped = True
                            fr.rec.drop("mf_overflow")
                            self._skip(fr.sta, fr.rec.frame_id)
                rt = g.end
            sf.last_report = rt
            # under Pred-DBA the XR T-CONT is granted from the schedule, not the report
            queued = sf.bg.depth_at(rt) if pred else sf.xr.depth_at(rt) + sf.bg.depth_at(rt)
            reports.append(Report(sf.wid, queued, rt))
            if sf.bg_rate:
                due = sf.bg_rate * T // 1_000_000_000 - sf.bg_sent
                if due > 0:
                    sf.bg_sent += due
                    enqueue(sf.bg, QueueEntry(None, -1, due, T))
        if mf.bg_batch:
            enqueue(mf.bg, QueueEntry(None, -1, mf.bg_batch, max(mf.bg_latest, T)))
            mf.bg_batch = 0
        start = T + seg.prop_delay
        b_max = self.b_max[mf.m]
        if self.sc.dba_mode == "ls":
            grants = ls_dba(reports, seg, b_max, start)
        else:
            preds = self._xr_forecasts(mf.sfs, start + seg.window)
            grants = pred_dba(preds, reports, seg, self.sc.margin, b_max, start, rotate=k)
        for g in grants:
            self.sfs[g.onu_id].grant = g
        if self.audit:
            self._audit(seg.name, k, reports, grants)

    def _external_cycle(self, T: int, k: int):
        seg = self.ext
        pred = self.sc.dba_mode == "pred"
        reports = []
        deps = []
        for mf in self.mfs:
            g = mf.grant
            rt = T
            if g is not None:
                deps += self._serve(mf.xr, mf.bg, g, seg)
                rt = g.end
            mf.last_report = rt
            queued = mf.bg.depth_at(rt) if pred else mf.xr.depth_at(rt) + mf.bg.depth_at(rt)
            reports.append(Report(mf.m, queued, rt))
        deps.sort(key=lambda d: d.arrival)
        done = set()
        for d in reversed(deps):
            # the last departure of a fully served entry completes its frame
            if d.entry.frame is not None and d.entry.remaining_bits == 0 and id(d.entry) not in done:
                done.add(id(d.entry))
                d.last = True
        for d in deps:
            fr = d.entry.frame
            if fr is None or not getattr(d, "last", False):
                continue
            fr.rec.mf_depart_time = d.end
            self._downstream(fr, d.arrival)
        start = T + seg.prop_delay
        if self.sc.dba_mode == "ls":
            grants = ls_dba(reports, seg, self.ext_b_max, start)
        else:
            preds = self._xr_forecasts(self.mfs, start + seg.window)
            grants = pred_dba(preds, reports, seg, self.sc.margin, self.ext_b_max, start, rotate=k)
        for g in grants:
            self.mfs[g.onu_id].grant = g
        if self.audit:
            self._audit(seg.name, k, reports, grants)

    def _audit(self, name, k, reports, grants):
        rep = {r.onu_id: r.queued_bits for r in reports}
        rows = self.dba_audit.setdefault(name, [])
        for g in grants:
            rows.append((k, g.onu_id, rep.get(g.onu_id, 0), g.granted_bits, g.start, g.duration))

    # -------------------------------------------------------- downstream

    def _downstream(self, fr: Frame, at_olt: int):
        st = fr.sta
        size = fr.size
        if st.peer is None:
            self._complete(st, fr.rec.frame_id, at_olt)
            return
        start = max(at_olt, self.olt_busy)
        self.olt_busy = start + -(-size * 1_000_000_000 // int(self.sc.ext_down_bps))
        arr = self.olt_busy + self.ext.prop_delay
        dest = self.mfs[self.stas[st.peer].mf]
        start = max(arr, dest.down_busy)
        dest.down_busy = start + -(-size * 1_000_000_000 // int(self.sc.int_down_bps))
        self._complete(st, fr.rec.frame_id, dest.down_busy + dest.seg.prop_delay)

    def _complete(self, st: StaRt, fid: int, t: int):
        st.reseq.buf[fid] = t
        self._flush(st)

    def _skip(self, st: StaRt, fid: int):
        st.reseq.buf[fid] = None
        self._flush(st)

    def _flush(self, st: StaRt):
        rs = st.reseq
        while rs.next_id in rs.buf:
            t = rs.buf.pop(rs.next_id)
            if t is not None:
                t = max(t, rs.last)
                rs.last = t
                rec = st.records[rs.next_id]
                rec.delivered_time = t
                self._on_delivered(st, rec)
            rs.next_id += 1

    # ---------------------------------------------------------- handover

    def _on_delivered(self, st: StaRt, rec: FrameRecord):
        st.stats.add_latency(rec.delivered_time - rec.gen_time)
        self._check_trigger(st)

    def _check_trigger(self, st: StaRt):
        if self.sc.handover != "on" or st.ho.phase is not HandoverPhase.MONITORING:
            return
        now = self.sim.now()
        if evaluate_trigger(st.stats, st.radio, self.policy, now, st.ho):
            self._log(st, "Trigger")
            st.ho.advance(HandoverPhase.SENSING_REQUESTED, now)
            self._log(st, HandoverPhase.SENSING_REQUESTED.value)
            self.sim.schedule_in(self.policy.sensing_delay, "sensing", self._on_sensing, st, None,
                                 detail=st.stream_id)

    def _log(self, st: StaRt, phase: str, new=None):
        lat = st.stats.mean() / MS
        jit = st.stats.std() / MS
        self.ho_audit.append((self.sim.now(), st.sid, phase, st.radio.associated_wap,
                              "" if new is None else new, lat, jit))

    def _abort(self, st: StaRt, why: str):
        now = self.sim.now()
        self._log(st, why)
        st.ho.advance(HandoverPhase.MONITORING, now)
        st.ho.cooldown_until = now + self.policy.cooldown

    def _walls(self, mf):
        rooms = [r for r in self.sc.rooms if r.mf == mf]
        return lambda a, b: count_walls(a, b, rooms)

    def _on_sensing(self, st: StaRt, forced_target):
        now = self.sim.now()
        ho = st.ho
        waps = [WapSite(w.wap_id, w.position) for w in self.world.waps_of(st.mf)]
        if forced_target is None:
            report = build_sensing_report(st.radio, waps, self.params, now, self._walls(st.mf))
            ho.advance(HandoverPhase.REPORT_RECEIVED, now)
            self._log(st, HandoverPhase.REPORT_RECEIVED.value)
            loads = {w.wap_id: self.committed_bps(w.wap_id) - self.sfs[w.wap_id].bg_rate for w in waps}
            target = select_target(report, loads, st.bps, self.policy, self.world.wifi_cap_bps)
            if target is None:
                self._abort(st, "NoTarget")
                return
        else:
            ho.advance(HandoverPhase.REPORT_RECEIVED, now)
            self._log(st, HandoverPhase.REPORT_RECEIVED.value)
            target = forced_target
        ho.advance(HandoverPhase.TARGET_SELECTED, now)
        ho.target = target
        self._log(st, HandoverPhase.TARGET_SELECTED.value, target)
        headroom = self.sf_capacity_bps(st.mf) - self.committed_bps(target)
        try:
            ho.path = pre_establish(st.sid, st.radio.associated_wap, target, now, headroom, st.bps)
        except AdmissionError:
            self._abort(st, "AdmissionRejected")
            return
        ho.advance(HandoverPhase.PATH_PRE_ESTABLISHED, now)
        self._log(st, HandoverPhase.PATH_PRE_ESTABLISHED.value, target)
        t_sw = (now // self.period + 1) * self.period
        self.sim.schedule(t_sw, "switch", self._on_switch, st, detail=st.stream_id)

    def _on_switch(self, st: StaRt):
        now = self.sim.now()
        ho = st.ho
        ho.advance(HandoverPhase.SWITCHING, now)
        self._log(st, HandoverPhase.SWITCHING.value, ho.target)
        old = execute_handover(st.radio, ho.path, self.sfs)
        if old is not None:
            self.sfs[old].stas.discard(st.sid)
        self.sfs[st.radio.associated_wap].stas.add(st.sid)
        self._update_link(st)
        self.handovers += 1
        ho.advance(HandoverPhase.MONITORING, now)
        ho.cooldown_until = now + self.policy.cooldown
        st.stats.latencies.clear()
        st.stats.ru_trace.clear()
        self._log(st, HandoverPhase.MONITORING.value)
        if old is not None:
            self._kick(self.sfs[old])
        self._kick(self.sfs[st.radio.associated_wap])

    def _on_forced(self, st: StaRt, room: int):
        now = self.sim.now()
        if st.ho.phase is not HandoverPhase.MONITORING or room == st.radio.associated_wap:
            return
        st.ho.advance(HandoverPhase.SENSING_REQUESTED, now)
        self._log(st, HandoverPhase.SENSING_REQUESTED.value)
        self.sim.schedule_in(self.policy.sensing_delay, "sensing", self._on_sensing, st, room,
                             detail=st.stream_id)

    # ---------------------------------------------------------- mobility

    def _update_link(self, st: StaRt):
        r = st.radio
        if r.associated_wap is None:
            return
        rssi, snr, _ = self.world.link(r.position, self.world.waps[r.associated_wap])
        r.rssi_dbm, r.snr_db = rssi, snr
        m = select_mcs(self.table, snr)
        r.mcs_index, r.phy_rate_bps = (None, None) if m is None else m
        r.ru_demand = ru_demand(st.bps, r.phy_rate_bps, self.params)

    def _on_move(self, st: StaRt):
        now = self.sim.now()
        was_down = st.radio.link_down
        st.radio.position = position_at(st.legs, st.spec.position, now)
        self._update_link(st)
        st.stats.add_ru(st.radio.ru_demand)
        self.mobility_samples[st.sid].append((now, st.radio.position))
        if st.radio.link_down and st.queue:
            # no deliveries during an outage; the head-of-line age stands in
            st.stats.add_latency(now - st.queue[0].rec.gen_time)
        self._check_trigger(st)
        if was_down and not st.radio.link_down and st.radio.associated_wap is not None:
            self._kick(self.sfs[st.radio.associated_wap])

    # ------------------------------------------------------------ finish

    def structural_in_flight(self) -> int:
        n = sum(len(st.queue) for st in self.stas.values())
        seen = set()
        for sf in self.sfs.values():
            for e in sf.xr.fifo:
                if not e.frame.dropped:
                    seen.add((e.stream_id, e.frame_id))
        n += len(seen)
        for mf in self.mfs:
            n += sum(1 for e in mf.xr.fifo if not e.frame.dropped)
        for st in self.stas.values():
            n += sum(1 for v in st.reseq.buf.values() if v is not None)
        return n

    def _finish(self, events: int) -> SimResult:
        end = self.end
        records = []
        late = 0
        for sid in sorted(self.stas):
            for rec in self.stas[sid].records:
                for attr in ("wifi_done_time", "sf_depart_time", "mf_depart_time"):
                    v = getattr(rec, attr)
                    if v is not None and v > end:
                        setattr(rec, attr, None)
                if rec.delivered_time is not None and rec.delivered_time > end:
                    rec.delivered_time = None
                    late += 1
                records.append(rec)
        structural = self.structural_in_flight()
        warm = int(end * self.sc.warmup_fraction)
        summary = summarize(records, warm, self.offered_load, self.policy.qoe)
        # frames held back by the resequencer were counted; released-but-late ones too
        if summary.in_flight != structural + late:
            raise InvariantError(f"conservation: generated {summary.generated} != delivered "
                                 f"{summary.total_delivered} + dropped {summary.total_dropped} + "
                                 f"in flight {structural + late}")
        res = SimResult(self.sc, self.world, records, summary, self.dba_audit, self.ho_audit,
                        self.handovers, structural + late, collisions=self.collisions, events=events)
        res.positions = {st.stream_id: st.positions for st in self.stas.values() if st.legs}
        res.mobility_samples = self.mobility_samples
        return res

    # ------------------------------------------------------ path floors

    def path_hops(self, st_sid: int) -> list:
        st = self.stas[st_sid]
        mf = self.mfs[st.mf]
        hops = [Hop(self.params.max_aggregate_rate_bps, 0, "wifi"),
                Hop(mf.seg.capacity_bps, mf.seg.prop_delay, "internal_up"),
                Hop(self.ext.capacity_bps, self.ext.prop_delay, "external_up")]
        if st.peer is not None:
            dest = self.mfs[self.stas[st.peer].mf]
            hops += [Hop(self.sc.ext_down_bps, self.ext.prop_delay, "external_down"),
                     Hop(self.sc.int_down_bps, dest.seg.prop_delay, "internal_down")]
        return hops


def run_scenario(scenario: Scenario, trace: TextIO | None = None, audit: bool = False) -> SimResult:
    return FttrSimulation(scenario, trace, audit).run()
