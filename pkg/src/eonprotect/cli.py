"""Command line front end: single runs and grid sweeps.

``eonprotect run`` executes one scenario and prints or writes one result
row.  ``eonprotect sweep`` reads a declarative INI config describing a grid
over availability, threshold, load and mode, runs every cell (optionally in
parallel worker processes) and writes a CSV or JSON table.  Failed cells
become rows with empty metric fields; the process then exits with code 2.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .metrics import (
    bandwidth_blocking_probability,
    blocking_probability,
    capacity_used_for_protection,
    restorability,
    spectrum_utilization,
)
from .sim import Scenario, Simulation

CSV_COLUMNS = [
    "mode", "load_erlang", "avg_avail", "a_th", "seed",
    "bp", "bbp", "utilization", "protection_capacity", "restorability",
    "runtime_s",
]


@dataclass
class SweepSpec:
    """A scenario template plus the grid swept over it."""

    template: dict
    avg_availability: list[float]
    a_th: list[float]
    loads: list[float]
    modes: list[str]
    repetitions: int = 1
    base_seed: int = 1
    workers: int = 1

    def cells(self) -> list[dict]:
        out = []
        for mode in self.modes:
            for load in self.loads:
                for avg in self.avg_availability:
                    for ath in self.a_th:
                        for rep in range(self.repetitions):
                            out.append(
                                dict(
                                    self.template,
                                    mode=mode,
                                    load_erlang=load,
                                    avg_link_availability=avg,
                                    a_th=ath,
                                    seed=self.base_seed + rep,
                                )
                            )
        return out


def run_cell(params: dict) -> dict:
    """Run one scenario and flatten its metrics into a result row."""
    sc = Scenario(**params)
    t0 = time.perf_counter()
    report = Simulation(sc).run()
    runtime = time.perf_counter() - t0
    return {
        "mode": sc.mode,
        "load_erlang": sc.load_erlang,
        "avg_avail": sc.avg_link_availability,
        "a_th": sc.a_th,
        "seed": sc.seed,
        "bp": blocking_probability(report),
        "bbp": bandwidth_blocking_probability(report),
        "utilization": spectrum_utilization(report),
        "protection_capacity": capacity_used_for_protection(report),
        "restorability": restorability(report),
        "runtime_s": runtime,
    }


def _cell_safe(params: dict) -> dict:
    try:
        return run_cell(params)
    except Exception as exc:  # error rows keep the sweep going
        return {
            "mode": params.get("mode"),
            "load_erlang": params.get("load_erlang"),
            "avg_avail": params.get("avg_link_availability"),
            "a_th": params.get("a_th"),
            "seed": params.get("seed"),
            "error": f"{type(exc).__name__}: {exc}",
        }


def run_sweep(spec: SweepSpec) -> list[dict]:
    """All grid cells, in stable grid order regardless of completion order."""
    cells = spec.cells()
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            return list(pool.map(_cell_safe, cells))
    return [_cell_safe(cell) for cell in cells]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit(rows: list[dict], fmt: str, path: str | None) -> None:
    """Write result rows as CSV or JSON; '-' or None writes to stdout."""
    if not rows:
        raise ValueError("no results to emit")
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([_fmt(row.get(col)) for col in CSV_COLUMNS])
        text = buf.getvalue()
    elif fmt == "json":
        clean = [
            {col: row.get(col) for col in CSV_COLUMNS} | (
                {"error": row["error"]} if "error" in row else {}
            )
            for row in rows
        ]
        text = json.dumps(clean, indent=2) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _scenario_kwargs(args: argparse.Namespace) -> dict:
    kwargs = dict(
        load_erlang=args.load,
        a_th=args.ath,
        mode=args.mode,
        avg_link_availability=args.avg_availability,
        n_requests=args.requests,
        seed=args.seed,
        mean_holding_s=args.holding,
        b_max_gbps=args.bmax,
        slot_ghz=args.slot_ghz,
        guard_ghz=args.guard_ghz,
        k=args.k,
        slot_count=args.slots,
        load_per_node=not args.network_load,
        jitter_availability=not args.no_jitter,
    )
    if args.topology not in (None, "nsfnet"):
        kwargs["topology_text"] = Path(args.topology).read_text()
    return kwargs


def _add_scenario_flags(p: argparse.ArgumentParser, for_run: bool) -> None:
    req = {"required": True} if for_run else {"default": None}
    p.add_argument("--topology", default="nsfnet",
                   help="topology file path, or 'nsfnet' for the built-in")
    if for_run:
        p.add_argument("--mode", choices=["none", "dsbpss", "dcycles"], **req)
        p.add_argument("--load", type=float, **req, help="offered Erlang load")
        p.add_argument("--ath", type=float, **req, help="availability threshold")
        p.add_argument("--avg-availability", type=float, default=0.999)
    p.add_argument("--requests", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--holding", type=float, default=10.0, help="mean holding time (s)")
    p.add_argument("--bmax", type=float, default=100.0, help="max demand rate (Gbps)")
    p.add_argument("--slot-ghz", type=float, default=12.5)
    p.add_argument("--guard-ghz", type=float, default=10.0)
    p.add_argument("--k", type=int, default=5, help="candidate path budget")
    p.add_argument("--slots", type=int, default=320, help="slots per link")
    p.add_argument("--network-load", action="store_true",
                   help="treat --load as network-wide instead of per node")
    p.add_argument("--no-jitter", action="store_true",
                   help="give every link exactly the average availability")
    p.add_argument("--out", default=None, help="output path ('-' for stdout)")
    p.add_argument("--format", choices=["csv", "json"], default="csv")


def _parse_sweep_config(path: str, args: argparse.Namespace) -> SweepSpec:
    cp = configparser.ConfigParser()
    read = cp.read(path)
    if not read:
        raise FileNotFoundError(path)
    sc = cp["scenario"] if cp.has_section("scenario") else {}
    grid = cp["grid"]

    template = dict(
        n_requests=args.requests or int(sc.get("requests", 100_000)),
        mean_holding_s=float(sc.get("mean_holding_s", 10.0)),
        b_max_gbps=float(sc.get("b_max_gbps", 100.0)),
        slot_ghz=float(sc.get("slot_ghz", 12.5)),
        guard_ghz=float(sc.get("guard_ghz", 10.0)),
        k=int(sc.get("k", 5)),
        slot_count=int(sc.get("slots", 320)),
        load_per_node=str(sc.get("load_per_node", "true")).lower() != "false",
        jitter_availability=str(sc.get("jitter", "true")).lower() != "false",
    )
    topo = sc.get("topology", "nsfnet")
    if topo != "nsfnet":
        template["topology_text"] = Path(topo).read_text()

    def floats(key: str) -> list[float]:
        return [float(x) for x in grid[key].split()]

    return SweepSpec(
        template=template,
        avg_availability=floats("avg_availability"),
        a_th=floats("a_th"),
        loads=floats("load"),
        modes=grid["modes"].split(),
        repetitions=int(grid.get("repetitions", 1)),
        base_seed=args.seed or int(grid.get("seed", 1)),
        workers=args.workers,
    )


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="eonprotect",
        description="Availability-aware RSA with protection on flex-grid networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one scenario")
    _add_scenario_flags(run_p, for_run=True)

    sweep_p = sub.add_parser("sweep", help="run a scenario grid from a config file")
    sweep_p.add_argument("--config", required=True, help="INI sweep description")
    sweep_p.add_argument("--workers", type=int, default=1)
    sweep_p.add_argument("--requests", type=int, default=None,
                         help="override request count from the config")
    sweep_p.add_argument("--seed", type=int, default=None,
                         help="override base seed from the config")
    sweep_p.add_argument("--out", default=None)
    sweep_p.add_argument("--format", choices=["csv", "json"], default="csv")

    args = parser.parse_args(argv)

    if args.command == "run":
        row = run_cell(_scenario_kwargs(args))
        emit([row], args.format, args.out)
        return 0

    spec = _parse_sweep_config(args.config, args)
    rows = run_sweep(spec)
    emit(rows, args.format, args.out)
    failures = [r for r in rows if "error" in r]
    for r in failures:
        print(f"cell failed: {r}", file=sys.stderr)
    return 2 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
