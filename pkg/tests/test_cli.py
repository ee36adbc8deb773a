import csv
import subprocess
import sys

import pytest

from fttrsim.cli import DEMO_HEADER, EXIT_IO, EXIT_OK, EXIT_VALIDATION, SWEEP_HEADER, main
from fttrsim.kernel import MS, S
from fttrsim.metrics import RECORD_HEADER, SUMMARY_HEADER
from fttrsim.topology import MobilityLeg, default_scenario, dump_scenario


@pytest.fixture
def scen(tmp_path):
    sc = default_scenario(pairs=1)
    sc.duration = 300 * MS
    path = tmp_path / "small.scn"
    path.write_text(dump_scenario(sc))
    return str(path)


def strict_rows(path, header):
    with open(path, newline="", encoding="utf-8") as fh:
        raw = fh.read()
    assert "\r" not in raw and raw.endswith("\n")
    rows = list(csv.reader(raw.splitlines()))
    assert rows[0] == header
    assert all(len(r) == len(header) for r in rows)
    return rows[1:]


def test_run_writes_artifacts(tmp_path, scen):
    out = tmp_path / "o"
    assert main(["run", "--scenario", scen, "--dba", "ls", "--trace", "--out", str(out)]) == EXIT_OK
    recs = strict_rows(out / "records.csv", RECORD_HEADER)
    summ = strict_rows(out / "summary.csv", SUMMARY_HEADER)
    assert recs
    assert [r[3] for r in summ].count("all") == 1
    for name in ("dba_audit_external.csv", "dba_audit_internal0.csv", "handover_audit.csv", "topology.txt"):
        assert (out / name).exists()
    assert (out / "trace.tsv").read_text().startswith("ticks\tseq\tkind\tdetail\n")


def test_run_byte_identical(tmp_path, scen):
    for d in ("a", "b"):
        assert main(["run", "--scenario", scen, "--seed", "3", "--dba", "pred", "--trace",
                     "--out", str(tmp_path / d)]) == EXIT_OK
    for name in ("records.csv", "summary.csv", "trace.tsv", "dba_audit_internal0.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_zero_duration(tmp_path, scen):
    out = tmp_path / "z"
    assert main(["run", "--scenario", scen, "--duration", "0", "--out", str(out)]) == EXIT_OK
    assert strict_rows(out / "records.csv", RECORD_HEADER) == []
    strict_rows(out / "summary.csv", SUMMARY_HEADER)


def test_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.scn"
    bad.write_text("nonsense.key = 1\n")
    assert main(["run", "--scenario", str(bad), "--out", str(tmp_path)]) == EXIT_VALIDATION
    assert capsys.readouterr().err.startswith("error\tvalidation\t")
    assert main(["run", "--scenario", str(tmp_path / "missing.scn"), "--out", str(tmp_path)]) == EXIT_IO
    assert "error\tio\t" in capsys.readouterr().err
    outside = tmp_path / "outside.scn"
    sc = default_scenario(pairs=1)
    sc.stas[0].position = (-50.0, 0.0, 0.0)
    outside.write_text(dump_scenario(sc))
    assert main(["run", "--scenario", str(outside), "--out", str(tmp_path)]) == EXIT_VALIDATION
    assert "violation\tsta.0." in capsys.readouterr().err
    blocker = tmp_path / "file"
    blocker.write_text("x")
    scn = tmp_path / "ok.scn"
    sc = default_scenario(pairs=1)
    sc.duration = 50 * MS
    scn.write_text(dump_scenario(sc))
    assert main(["run", "--scenario", str(scn), "--out", str(blocker / "sub")]) == EXIT_IO


def test_validate(scen, capsys):
    assert main(["validate", "--scenario", scen]) == EXIT_OK
    assert "wifi_aggregate_cap_bps" in capsys.readouterr().out
    assert main(["validate", "--scenario", "default"]) == EXIT_OK


def test_sweep_cardinality(tmp_path, scen):
    out = tmp_path / "s"
    assert main(["sweep", "--scenario", scen, "--loads", "0.2,0.5,0.8", "--dba", "ls,pred",
                 "--out", str(out)]) == EXIT_OK
    rows = strict_rows(out / "sweep.csv", SWEEP_HEADER)
    assert len(rows) == 6
    assert {(r[0], r[1]) for r in rows} == {(l, m) for l in ("0.2", "0.5", "0.8") for m in ("ls", "pred")}
    assert main(["sweep", "--scenario", scen, "--loads", "1.5", "--out", str(out)]) == EXIT_VALIDATION


def test_sweep_resolutions(tmp_path, scen):
    out = tmp_path / "r"
    assert main(["sweep", "--scenario", scen, "--loads", "0.2,0.5,0.8", "--resolutions", "2K,4K",
                 "--duration", "0.1", "--out", str(out)]) == EXIT_OK
    rows = strict_rows(out / "sweep.csv", SWEEP_HEADER)
    assert sorted(r[2] for r in rows) == ["2K"] * 6 + ["4K"] * 6


def test_handover_demo_stationary_identical(tmp_path):
    sc = default_scenario(pairs=1)
    sc.stas[1].position = (5.0, 5.0, 2.0)
    sc.mobility = [MobilityLeg(1, (5.0, 5.0, 2.0), (5.0, 5.0, 2.0), 1.0, 0)]
    sc.duration = 1 * S
    path = tmp_path / "still.scn"
    path.write_text(dump_scenario(sc))
    out = tmp_path / "d"
    assert main(["handover-demo", "--scenario", str(path), "--out", str(out)]) == EXIT_OK
    rows = strict_rows(out / "handover_demo.csv", DEMO_HEADER)
    off = [r[:1] + r[2:] for r in rows if r[1] == "off"]
    on = [r[:1] + r[2:] for r in rows if r[1] == "on"]
    assert off == on and off


def test_handover_demo_needs_mobility(tmp_path, scen):
    assert main(["handover-demo", "--scenario", scen, "--out", str(tmp_path)]) == EXIT_VALIDATION


def test_console_entry_point(tmp_path, scen):
    p = subprocess.run([sys.executable, "-m", "fttrsim.cli", "validate", "--scenario", scen],
                       capture_output=True, text=True)
    assert p.returncode == 0


def test_sweep_pred_not_worse_than_ls(tmp_path):
    sc = default_scenario(pairs=2)
    sc.duration = 1 * S
    path = tmp_path / "two.scn"
    path.write_text(dump_scenario(sc))
    out = tmp_path / "p"
    assert main(["sweep", "--scenario", str(path), "--loads", "0.3,0.8", "--out", str(out)]) == EXIT_OK
    rows = strict_rows(out / "sweep.csv", SWEEP_HEADER)
    mean = {(r[0], r[1]): float(r[3]) for r in rows}
    for load in ("0.3", "0.8"):
        assert mean[(load, "pred")] <= mean[(load, "ls")]
