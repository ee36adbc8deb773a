import math

import pytest
from hypothesis import given, strategies as st

from fttrsim.handover import (AdmissionError, HandoverPhase, HandoverPolicy, PhaseError, QoeRequirements,
                              RollingStats, SensingReport, StaHandoverState, WapSite, build_sensing_report,
                              evaluate_trigger, execute_handover, pre_establish, select_target)
from fttrsim.kernel import MS
from fttrsim.wifi import StaRadio, WifiParams, default_mcs_table, select_mcs, snr_db


def stats_with(latencies, ru=range(10, 30)):
    s = RollingStats(window=len(latencies))
    for x in latencies:
        s.add_latency(x)
    for r in ru:
        s.add_ru(r)
    return s


def radio(mcs):
    return StaRadio("s", (0, 0, 1), associated_wap=0, mcs_index=mcs, phy_rate_bps=1e9)


def test_trigger_examples():
    pol = HandoverPolicy()
    top = default_mcs_table().top.mcs_index
    assert not evaluate_trigger(stats_with([0] * 32), radio(top), pol)
    bad = [25 * MS - 5 * MS, 25 * MS + 5 * MS] * 16  # mean 25 ms, std 5 ms
    assert evaluate_trigger(stats_with(bad), radio(1), pol)
    assert not evaluate_trigger(stats_with(bad), radio(top), pol)
    assert not evaluate_trigger(stats_with(bad, ru=[20] * 10), radio(1), pol)
    assert evaluate_trigger(stats_with(bad), StaRadio("s", (0, 0, 0)), pol)  # link down counts as low MCS


def test_trigger_needs_full_window():
    s = RollingStats(window=32)
    for _ in range(31):
        s.add_latency(50 * MS)
    for r in range(5):
        s.add_ru(r)
    assert not evaluate_trigger(s, radio(0), HandoverPolicy())
    s.add_latency(50 * MS)
    assert evaluate_trigger(s, radio(0), HandoverPolicy())


def test_cooldown_suppresses_second_trigger():
    pol = HandoverPolicy()
    st_ = StaHandoverState("s", cooldown_until=1000 * MS)
    s = stats_with([40 * MS] * 32)
    assert not evaluate_trigger(s, radio(0), pol, now=600 * MS, state=st_)
    assert evaluate_trigger(s, radio(0), pol, now=1000 * MS, state=st_)


@given(st.lists(st.integers(0, 20 * MS), min_size=32, max_size=32), st.integers(0, 11),
       st.lists(st.integers(0, 80), min_size=2, max_size=21))
def test_trigger_sound(lats, mcs, ru):
    s = stats_with(lats, ru)
    if s.std() <= 15 * MS:
        assert not evaluate_trigger(s, radio(mcs), HandoverPolicy())


def test_qoe_validation():
    with pytest.raises(ValueError):
        QoeRequirements(0, 1)
    with pytest.raises(ValueError):
        HandoverPolicy(hysteresis_db=-1)


def test_sensing_report_example():
    p = WifiParams()
    sta = StaRadio("s", (0, 0, 0), associated_wap="A")
    waps = [WapSite("A", (1, 0, 0)), WapSite("B", (19, 0, 0))]
    rep = build_sensing_report(sta, waps, p, 0, walls_between=lambda a, b: 1 if b[0] > 10 else 0)
    assert rep.rssi("A") == pytest.approx(-28.4)
    assert rep.rssi("B") == pytest.approx(18 - (46.4 + 30 * math.log10(19) + 10))
    assert rep.rssi("B") == pytest.approx(-76.76, abs=0.01)
    with pytest.raises(ValueError):
        build_sensing_report(StaRadio("s", (0, 0, 0), associated_wap="Z"), waps, p, 0)


def test_sensing_symmetry():
    rep = build_sensing_report(StaRadio("s", (5, 0, 0), associated_wap="A"),
                               [WapSite("A", (0, 0, 0)), WapSite("B", (10, 0, 0))], WifiParams(), 0)
    assert rep.rssi("A") == rep.rssi("B")


def test_select_target_rules():
    pol = HandoverPolicy()
    rep = SensingReport("s", [(0, -80.0), (1, -50.0), (2, -60.0)], 0, current_wap=0)
    assert select_target(rep, {}, 360e6, pol) == 1
    # best lacks headroom for 360 Mbps -> second best
    assert select_target(rep, {1: 9.4e9}, 360e6, pol, wap_capacity=9.6e9) == 2
    weak = SensingReport("s", [(0, -60.0), (1, -55.0)], 0, current_wap=0)
    assert select_target(weak, {}, 360e6, pol) is None


def test_select_target_ties():
    pol = HandoverPolicy()
    rep = SensingReport("s", [(0, -80.0), (1, -50.0), (2, -50.0)], 0, current_wap=0)
    assert select_target(rep, {1: 2e9, 2: 1e9}, 1e6, pol) == 2
    assert select_target(rep, {}, 1e6, pol) == 1


def test_phase_order():
    s = StaHandoverState("s")
    order = list(HandoverPhase)[1:]
    for i, ph in enumerate(order):
        s.advance(ph, i)
    s.advance(HandoverPhase.MONITORING, 10)
    assert [p for _, p in s.history] == order + [HandoverPhase.MONITORING]
    with pytest.raises(PhaseError):
        s.advance(HandoverPhase.TARGET_SELECTED, 11)
    s.advance(HandoverPhase.SENSING_REQUESTED, 12)
    s.advance(HandoverPhase.MONITORING, 13)  # abort is always legal


def test_pre_establish_and_switch():
    with pytest.raises(AdmissionError):
        pre_establish("s", 0, 1, 0, sf_headroom_bps=1e8, stream_bps=3.6e8)
    path = pre_establish("s", 0, 1, 5, sf_headroom_bps=1e9, stream_bps=3.6e8)
    r = radio(0)
    assert execute_handover(r, path, {0, 1}) == 0
    assert r.associated_wap == 1 and not path.active
    r2 = radio(0)
    with pytest.raises(AdmissionError):
        execute_handover(r2, pre_establish("s", 0, 7, 0, 1e9, 1), {0, 1})
    assert r2.associated_wap == 0


def test_post_handover_mcs_higher():
    p, t = WifiParams(), default_mcs_table()
    old = select_mcs(t, snr_db(p, 20, 1))
    new = select_mcs(t, snr_db(p, 2, 0))
    assert new is not None
    assert old is None or new[0] > old[0]
