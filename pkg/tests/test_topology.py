import math

import pytest
from hypothesis import given, settings, strategies as st

from fttrsim.kernel import MS, S
from fttrsim.sim import FttrSimulation
from fttrsim.topology import (MobilityLeg, ParseError, Room, Scenario, ScenarioError, StaSpec, build, count_walls,
                              default_scenario, demo_scenario, dump_scenario, parse_scenario, position_at,
                              row_rooms, validate)


def test_default_scenario_builds():
    sc = default_scenario()
    assert validate(sc) == []
    w = build(sc)
    assert len(w.waps) == 16 and len(w.waps_of(0)) == 8 and len(w.internal) == 2
    assert w.wifi_cap_bps == 9.6e9
    assert "wifi_aggregate_cap_bps 9600000000.0" in w.dump()
    # each STA sits 3 m from its own room's WAP and associates to it
    for s in w.stas.values():
        assert w.waps[s.wap_id].room.contains(s.spec.position)


def test_nine_waps_violation():
    sc = Scenario(rooms=row_rooms(1, 9), n_mfs=1)
    v = validate(sc)
    assert any("8-WAP limit" in x for x in v)
    with pytest.raises(ScenarioError):
        build(sc)


def test_sta_outside_rooms():
    sc = default_scenario(pairs=1)
    sc.stas[0].position = (500.0, 5.0, 1.0)
    v = validate(sc)
    assert any(x.startswith("sta.0.") for x in v)


def test_tie_goes_to_lower_wap():
    sc = Scenario(rooms=row_rooms(2, 2))
    sc.stas = [StaSpec(0, 0, (10.0, 5.0, 1.0), peer=None)]
    w = build(sc)
    assert w.stas[0].wap_id == 0


def test_empty_sta_list_runs():
    sc = Scenario(rooms=row_rooms(2, 8), duration=200 * MS)
    assert validate(sc) == []
    res = FttrSimulation(sc).run()
    assert res.records == [] and res.summary.generated == 0 and res.summary.delivered_count == 0


def test_position_at():
    leg = MobilityLeg(0, (0.0, 0.0, 0.0), (20.0, 0.0, 0.0), 1.0, 2 * S)
    assert position_at([leg], (0.0, 0.0, 0.0), 1 * S) == (0.0, 0.0, 0.0)
    assert position_at([leg], (0.0, 0.0, 0.0), 12 * S) == (10.0, 0.0, 0.0)
    assert position_at([leg], (0.0, 0.0, 0.0), 99 * S) == (20.0, 0.0, 0.0)
    back = MobilityLeg(0, (20.0, 0.0, 0.0), (20.0, 4.0, 0.0), 2.0, 30 * S)
    assert position_at([back, leg], (0.0, 0.0, 0.0), 31 * S) == (20.0, 2.0, 0.0)


def test_move_events_per_period():
    sc = demo_scenario()
    sc.duration = 23 * S
    res = FttrSimulation(sc).run()
    leg = sc.mobility[0]
    assert len(res.mobility_samples[1]) == leg.duration // sc.mobility_period == 200
    assert res.mobility_samples[1][-1][1] == leg.end


def _brute_walls(p, q, rooms, n=20000):
    """Count changes of the containing-room set along a dense sampling of p->q."""
    def key(t):
        x = tuple(a + (b - a) * t for a, b in zip(p, q))
        return frozenset(r.room_id for r in rooms if r.contains(x, eps=0))
    prev, k = key(0.5 / n), 0
    for i in range(1, n):
        cur = key((i + 0.5) / n)
        if cur != prev:
            k += 1
        prev = cur
    return k


@settings(max_examples=60, deadline=None)
@given(st.floats(0.3, 39.7), st.floats(0.3, 9.7), st.floats(0.3, 39.7), st.floats(0.3, 9.7))
def test_count_walls_matches_sampling(x1, y1, x2, y2):
    rooms = row_rooms(1, 4)
    p, q = (x1, y1, 1.0), (x2, y2, 3.0)
    # crossings within a sample step of a wall are ambiguous for the brute force
    walls = [10.0, 20.0, 30.0]
    if any(abs(x1 - w) < 0.01 or abs(x2 - w) < 0.01 for w in walls):
        return
    assert count_walls(p, q, rooms) == _brute_walls(p, q, rooms, n=4000)


def test_count_walls_dense_sampling():
    rooms = row_rooms(1, 3)
    p, q = (5.0, 5.0, 1.0), (25.0, 5.0, 3.0)
    assert count_walls(p, q, rooms) == 2 == _brute_walls(p, q, rooms)


def test_scenario_round_trip():
    sc = demo_scenario()
    sc.forced_handovers = [(2 * S, 1, 1)]
    sc.load = 0.5
    text = dump_scenario(sc)
    back = parse_scenario(text)
    assert dump_scenario(back) == text
    assert back.mobility[0].end == (25.0, 5.0, 1.0)
    assert back.load == 0.5 and back.forced_handovers == [(2 * S, 1, 1)]


def test_parse_errors():
    with pytest.raises(ParseError):
        parse_scenario("bogus.key = 1\n")
    with pytest.raises(ParseError):
        parse_scenario("scenario.seed\n")
    sc = parse_scenario("# comment\nscenario.duration = 250ms\nscenario.seed = 4\n")
    assert sc.duration == 250 * MS and sc.seed == 4


def test_build_deterministic():
    a = build(default_scenario()).dump()
    b = build(default_scenario()).dump()
    assert a == b
