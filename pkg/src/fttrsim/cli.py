"""Command line: run, sweep, handover-demo, validate."""
from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from .handover import HANDOVER_AUDIT_HEADER
from .kernel import MS, S, seconds
from .metrics import summary_rows, write_records_csv, write_summary_csv
from .sim import DBA_AUDIT_HEADER, InvariantError, SimResult, run_scenario
from .topology import (ParseError, Scenario, ScenarioError, build, default_scenario, demo_scenario,
                       load_scenario, position_at, validate)

EXIT_OK, EXIT_VALIDATION, EXIT_IO, EXIT_INVARIANT = 0, 2, 3, 4

SWEEP_HEADER = ["load", "dba", "resolution", "mean_latency_ms", "jitter_ms", "qoe_ok"]
DEMO_HEADER = ["distance_bin_m", "mode", "wireless_latency_ms", "throughput_mbps"]
BUILTIN = {"default": default_scenario, "demo": demo_scenario}


def _csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _num(x: float) -> str:
    return repr(float(x)) if math.isfinite(x) else "nan"


def resolve_scenario(arg: str) -> Scenario:
    if arg in BUILTIN:
        return BUILTIN[arg]()
    return load_scenario(arg)


def _apply(sc: Scenario, args) -> Scenario:
    if getattr(args, "seed", None) is not None:
        sc.seed = args.seed
    if getattr(args, "dba", None):
        sc.dba_mode = args.dba
    if getattr(args, "wifi", None):
        sc.wifi_mode = args.wifi
    if getattr(args, "handover", None):
        sc.handover = args.handover
    if getattr(args, "duration", None) is not None:
        sc.duration = seconds(args.duration)
    if getattr(args, "load", None) is not None:
        sc.load = args.load
    return sc


def with_resolution(sc: Scenario, resolution: str) -> Scenario:
    sc = replace(sc, stas=[replace(s, profile=resolution) for s in sc.stas])
    return sc


def write_run(res: SimResult, out: str, trace_text: str | None = None) -> None:
    os.makedirs(out, exist_ok=True)
    sc = res.scenario
    write_records_csv(os.path.join(out, "records.csv"), res.records)
    load = sc.load if sc.load is not None else res.summary.offered_load_normalized
    write_summary_csv(os.path.join(out, "summary.csv"), summary_rows(res.summary, load, sc.dba_mode, sc.handover))
    for name, rows in sorted(res.dba_audit.items()):
        _csv(os.path.join(out, f"dba_audit_{name}.csv"), DBA_AUDIT_HEADER, rows)
    _csv(os.path.join(out, "handover_audit.csv"), HANDOVER_AUDIT_HEADER,
         [(t, s, ph, old, new, _num(lat), _num(jit)) for t, s, ph, old, new, lat, jit in res.handover_audit])
    with open(os.path.join(out, "topology.txt"), "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(res.world.dump()) + "\n")
    if trace_text is not None:
        with open(os.path.join(out, "trace.tsv"), "w", encoding="utf-8", newline="") as fh:
            fh.write("ticks\tseq\tkind\tdetail\n")
            fh.write(trace_text)


def execute(sc: Scenario, trace: bool = False, audit: bool = True) -> tuple[SimResult, str | None]:
    if trace:
        import io
        buf = io.StringIO()
        res = run_scenario(sc, trace=buf, audit=audit)
        return res, buf.getvalue()
    return run_scenario(sc, audit=audit), None


# ---------------------------------------------------------------- sweep

def _sweep_point(sc: Scenario):
    try:
        s = run_scenario(sc).summary
        return s.mean_latency_ms, s.jitter_ms, s.qoe_ok, ""
    except Exception as e:  # per-run failures are recorded, the sweep continues
        return math.nan, math.nan, False, f"{type(e).__name__}: {e}"


def sweep(base: Scenario, loads, modes, resolutions, seeds: int = 1, jobs: int = 1):
    """Mean over seeds for every (load, mode, resolution); rows in deterministic order."""
    keys, scs = [], []
    for load in loads:
        for mode in modes:
            for res in resolutions:
                for k in range(seeds):
                    sc = with_resolution(base, res) if res else replace(base)
                    sc.load, sc.dba_mode, sc.seed = load, mode, base.seed + k
                    keys.append((load, mode, res))
                    scs.append(sc)
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            outs = list(pool.map(_sweep_point, scs))
    else:
        outs = [_sweep_point(sc) for sc in scs]
    table: dict = {}
    for key, out in zip(keys, outs):
        table.setdefault(key, []).append(out)
    rows, errors = [], []
    for (load, mode, res), outs in table.items():
        m = float(np.mean([o[0] for o in outs]))
        j = float(np.mean([o[1] for o in outs]))
        ok = all(o[2] for o in outs)
        rows.append((load, mode, res or "scenario", m, j, ok))
        errors += [(load, mode, res, o[3]) for o in outs if o[3]]
    return rows, errors


# ------------------------------------------------------------ handover demo

def demo_rows(res: SimResult, mode: str) -> list[tuple]:
    """Wireless latency and delivered-over-air throughput of the moving STA, per metre travelled."""
    sc = res.scenario
    mover = min(l.sta_id for l in sc.mobility)
    spec = next(s for s in sc.stas if s.sta_id == mover)
    legs = [l for l in sc.mobility if l.sta_id == mover]
    origin = spec.position

    def bin_of(p):
        return int(math.floor(math.hypot(p[0] - origin[0], p[1] - origin[1]) + 1e-9))

    dwell: dict = {}
    step = 10 * MS
    for t in range(0, max(sc.duration, 1), step):
        b = bin_of(position_at(legs, origin, t))
        dwell[b] = dwell.get(b, 0) + step
    lat: dict = {}
    bits: dict = {}
    stream = f"sta{mover}"
    recs = [r for r in res.records if r.stream_id == stream]
    for rec, pos in zip(recs, res.positions.get(stream, [])):
        b = bin_of(pos)
        if rec.wifi_done_time is not None:
            lat.setdefault(b, []).append(rec.wifi_done_time - rec.gen_time)
            bits[b] = bits.get(b, 0) + rec.size_bits
    rows = []
    for b in sorted(set(dwell) | set(lat)):
        wl = float(np.mean(lat[b])) / MS if b in lat else math.nan
        tput = bits.get(b, 0) / (dwell.get(b, 0) / S) / 1e6 if dwell.get(b) else math.nan
        rows.append((b, mode, wl, tput))
    return rows


def handover_demo(sc: Scenario) -> list[tuple]:
    if not sc.mobility:
        raise ScenarioError(["mobility: handover demo needs at least one mobility leg"])
    rows = []
    for mode in ("off", "on"):
        run = replace(sc, handover=mode)
        rows += demo_rows(run_scenario(run), mode)
    return rows


# ------------------------------------------------------------------ main

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fttrsim", description=__doc__)
    sub = p.add_subparsers(dest="cmd", required=True)

    r = sub.add_parser("run", help="single simulation run")
    r.add_argument("--scenario", required=True, help="scenario file, or 'default' / 'demo'")
    r.add_argument("--seed", type=int)
    r.add_argument("--dba", choices=["ls", "pred"])
    r.add_argument("--wifi", choices=["scheduled", "edca"])
    r.add_argument("--handover", choices=["on", "off"])
    r.add_argument("--duration", type=float, help="simulated seconds")
    r.add_argument("--load", type=float, help="normalized internal-PON load (background fill)")
    r.add_argument("--trace", action="store_true", help="also write the event trace")
    r.add_argument("--out", default=os.environ.get("FTTRSIM_OUT"), required="FTTRSIM_OUT" not in os.environ)

    s = sub.add_parser("sweep", help="load sweep over DBA modes")
    s.add_argument("--scenario", required=True)
    s.add_argument("--loads", required=True, help="comma list, each in (0, 1.2]")
    s.add_argument("--dba", dest="dba_modes", default="ls,pred", help="comma list of DBA modes")
    s.add_argument("--resolutions", default="", help="comma list overriding every STA profile")
    s.add_argument("--seeds", type=int, default=1)
    s.add_argument("--seed", type=int)
    s.add_argument("--duration", type=float)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--out", default=os.environ.get("FTTRSIM_OUT"), required="FTTRSIM_OUT" not in os.environ)

    d = sub.add_parser("handover-demo", help="mobility run with handover off and on")
    d.add_argument("--scenario", required=True)
    d.add_argument("--seed", type=int)
    d.add_argument("--dba", choices=["ls", "pred"])
    d.add_argument("--out", default=os.environ.get("FTTRSIM_OUT"), required="FTTRSIM_OUT" not in os.environ)

    v = sub.add_parser("validate", help="check a scenario file")
    v.add_argument("--scenario", required=True)
    return p


def _fail(code: int, kind: str, msg: str) -> int:
    print(f"error\t{kind}\t{msg}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        sc = resolve_scenario(args.scenario)
    except ParseError as e:
        return _fail(EXIT_VALIDATION, "validation", str(e))
    except OSError as e:
        return _fail(EXIT_IO, "io", str(e))
    try:
        if args.cmd == "validate":
            errs = validate(sc)
            for e in errs:
                print(f"violation\t{e}")
            if errs:
                return EXIT_VALIDATION
            print("\n".join(build(sc).dump()))
            return EXIT_OK
        if args.cmd == "run":
            sc = _apply(sc, args)
            _check(sc)
            res, trace = execute(sc, trace=args.trace)
            write_run(res, args.out, trace)
            return EXIT_OK
        if args.cmd == "sweep":
            sc = _apply(sc, args)
            loads = [float(x) for x in args.loads.split(",") if x]
            modes = [m for m in args.dba_modes.split(",") if m]
            bad = [f"--loads: {l} not in (0, 1.2]" for l in loads if not 0 < l <= 1.2]
            bad += [f"--dba: unknown mode {m!r}" for m in modes if m not in ("ls", "pred")]
            if bad:
                raise ScenarioError(bad)
            _check(sc)
            resolutions = [r for r in args.resolutions.split(",") if r] or [""]
            rows, errors = sweep(sc, loads, modes, resolutions, args.seeds, args.jobs)
            os.makedirs(args.out, exist_ok=True)
            _csv(os.path.join(args.out, "sweep.csv"), SWEEP_HEADER,
                 [(_num(l), m, r, _num(a), _num(j), "1" if ok else "0") for l, m, r, a, j, ok in rows])
            for load, mode, res, msg in errors:
                print(f"error\trun\tload={load} dba={mode} resolution={res}: {msg}", file=sys.stderr)
            return EXIT_OK
        if args.cmd == "handover-demo":
            sc = _apply(sc, args)
            _check(sc)
            rows = handover_demo(sc)
            os.makedirs(args.out, exist_ok=True)
            _csv(os.path.join(args.out, "handover_demo.csv"), DEMO_HEADER,
                 [(b, m, _num(w), _num(t)) for b, m, w, t in rows])
            return EXIT_OK
    except ScenarioError as e:
        for v in e.violations:
            print(f"violation\t{v}", file=sys.stderr)
        return _fail(EXIT_VALIDATION, "validation", f"{len(e.violations)} violation(s)")
    except ValueError as e:
        return _fail(EXIT_VALIDATION, "validation", str(e))
    except OSError as e:
        return _fail(EXIT_IO, "io", str(e))
    except (InvariantError, AssertionError) as e:
        return _fail(EXIT_INVARIANT, "invariant", str(e))
    return EXIT_OK


def _check(sc: Scenario) -> None:
    errs = validate(sc)
    if errs:
        raise ScenarioError(errs)


if __name__ == "__main__":
    sys.exit(main())
