"""Experiment driver: topology -> routes -> constraints -> solve -> CSV.

Usage::

    manetcap run --n 20 --degree 8 --seed 1 --routing flat --pattern adhoc \\
        --bound pessimistic --fairness link --objective max-min --out run.csv
    manetcap sweep --n-values 20 30 40 --seeds 0-4 --routing flat,wuli --out sweep.csv
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import dataclasses
import itertools
import json
import logging
import math
import statistics
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .capacity import BOUNDS, FAIRNESS, OBJECTIVES, CapacityReport, evaluate
from .interference import DEFAULT_ROUNDS, freq_table, write_freq_csv
from .lp import write_lp
from .routing import PATTERNS, RouteSet, backbone_routes, load_routes, overhead_model, shortest_routes, wu_li_backbone
from .topology import Topology, generate_unit_disk, read_topology

logger = logging.getLogger(__name__)

COLUMNS = ["n", "seed", "routing", "pattern", "bound", "fairness", "objective",
           "capacity", "status", "routes", "solve_ms"]


class ExperimentError(RuntimeError):
    pass


@dataclass
class ExperimentConfig:
    topo: str | None = None
    n: int = 20
    degree: float = 8.0
    seed: int = 0
    routing: str = "flat"
    pattern: str = "adhoc"
    bound: str = "pessimistic"
    fairness: str = "node"
    objective: str = "max-min"
    overhead: str = "none"
    rounds: int = DEFAULT_ROUNDS
    exact: str = "auto"
    method: str = "auto"
    export_lp: str | None = None
    freq_out: str | None = None
    flows_out: str | None = None
    out: str | None = None
    manifest: str | None = None

    def check(self) -> None:
        if self.pattern not in PATTERNS:
            raise ExperimentError(f"config: unknown pattern {self.pattern!r}")
        if self.bound not in BOUNDS or self.fairness not in FAIRNESS or self.objective not in OBJECTIVES:
            raise ExperimentError(f"config: unknown model {self.bound}/{self.fairness}/{self.objective}")
        if self.exact not in ("auto", "always", "never"):
            raise ExperimentError("config: --exact-freq must be auto, always or never")
        if self.bound == "optimistic" and self.exact != "always" and self.rounds < 1:
            raise ExperimentError("config: the optimistic bound needs rounds >= 1 or exact frequencies")
        if not (self.routing in ("flat", "wuli") or self.routing.startswith("file:")):
            raise ExperimentError(f"config: unknown routing {self.routing!r}")


@dataclass
class RunResult:
    report: CapacityReport
    topology: Topology
    routes: RouteSet
    row: dict = field(default_factory=dict)


def _stage(name: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ExperimentError:
        raise
    except Exception as exc:
        raise ExperimentError(f"{name}: {exc}") from exc


def load_topology(cfg: ExperimentConfig) -> Topology:
    if cfg.topo:
        t = read_topology(cfg.topo)
        if cfg.pattern != "adhoc" and t.ap is None:
            raise ExperimentError(f"topology: pattern {cfg.pattern!r} needs an access point in {cfg.topo}")
        return t
    ap = 0 if cfg.pattern != "adhoc" else None
    return generate_unit_disk(cfg.n, cfg.degree, cfg.seed, ap=ap)


def make_routes(cfg: ExperimentConfig, t: Topology) -> RouteSet:
    if cfg.routing == "flat":
        rs = shortest_routes(t, cfg.pattern)
    elif cfg.routing == "wuli":
        rs = backbone_routes(t, wu_li_backbone(t), cfg.pattern)
    else:
        rs = load_routes(cfg.routing.split(":", 1)[1], t, cfg.pattern)
    rs = rs.with_control(overhead_model(cfg.overhead, t))
    rs.validate(t)
    return rs


def run(cfg: ExperimentConfig) -> RunResult:
    """Evaluate one configuration and write the requested artifacts."""
    cfg.check()
    t = _stage("topology", load_topology, cfg)
    rs = _stage("routing", make_routes, cfg, t)
    ft = None
    if cfg.bound == "optimistic":
        exact = {"auto": "auto", "always": True, "never": False}[cfg.exact]
        ft = _stage("interference", freq_table, t, cfg.fairness, rounds=cfg.rounds, seed=cfg.seed, exact=exact)
        if cfg.freq_out:
            write_freq_csv(ft, cfg.freq_out)
    # an empty route set carries nothing; max-min is undefined there, so solve the max-sum LP
    objective = cfg.objective if rs.routes else "max-sum"
    start = time.perf_counter()
    report = _stage("capacity", evaluate, t, rs, cfg.bound, cfg.fairness, objective, ft=ft, method=cfg.method)
    elapsed = (time.perf_counter() - start) * 1000
    report.model["objective"] = cfg.objective
    if cfg.export_lp:
        write_lp(report.lp, cfg.export_lp)
    row = {
        "n": t.n, "seed": cfg.seed, "routing": cfg.routing, "pattern": cfg.pattern,
        "bound": cfg.bound, "fairness": cfg.fairness, "objective": cfg.objective,
        "capacity": report.objective_value, "status": report.status,
        "routes": len(rs), "solve_ms": round(elapsed, 3),
    }
    if cfg.out:
        write_rows([row], cfg.out)
    if cfg.flows_out:
        with open(cfg.flows_out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["route", "src", "dst", "hops", "throughput"])
            for r in rs.routes:
                w.writerow([r.id, r.src, r.dst, r.hops, repr(report.per_flow.get(r.id, math.nan))])
    if cfg.manifest:
        Path(cfg.manifest).write_text(json.dumps(
            {"version": __version__, "config": dataclasses.asdict(cfg), "result": row}, indent=2, sort_keys=True) + "\n")
    return RunResult(report, t, rs, row)


def _fmt(v):
    return repr(v) if isinstance(v, float) else v


def write_rows(rows: list[dict], path: str | Path | None, columns=COLUMNS) -> None:
    """CSV with a header row; ``path=None`` writes to stdout."""
    if path is None:
        _write_csv(sys.stdout, rows, columns)
        return
    with open(path, "w", newline="") as fh:
        _write_csv(fh, rows, columns)


def _write_csv(fh, rows, columns) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(row[c]) for c in columns])


# -- sweeps --------------------------------------------------------------------

VARIANT_KEYS = ("routing", "pattern", "bound", "fairness", "objective")


@dataclass
class SweepResult:
    rows: list[dict]

    def medians(self) -> list[dict]:
        """Median capacity per (variant, n) over the successful seeds."""
        groups: dict[tuple, list[float]] = {}
        for r in self.rows:
            if r["status"] != "optimal":
                continue
            key = tuple(r[k] for k in VARIANT_KEYS) + (r["n"],)
            groups.setdefault(key, []).append(r["capacity"])
        out = []
        for key, vals in groups.items():
            row = dict(zip(VARIANT_KEYS + ("n",), key))
            row["median"] = statistics.median(vals)
            row["count"] = len(vals)
            out.append(row)
        return out

    def write(self, path: str | Path) -> None:
        write_rows(self.rows, path)
        med = Path(path).with_name(Path(path).stem + "_medians.csv")
        write_rows(self.medians(), med, list(VARIANT_KEYS) + ["n", "median", "count"])


def _cell(args) -> dict:
    order, cfg = args
    try:
        row = run(cfg).row
    except Exception as exc:  # a failed cell must not abort the sweep
        row = {"n": cfg.n, "seed": cfg.seed, **{k: getattr(cfg, k) for k in VARIANT_KEYS},
               "capacity": math.nan, "status": f"error: {exc}", "routes": 0, "solve_ms": 0.0}
    return {**row, "_order": order}


def sweep(template: ExperimentConfig, n_values, seeds, variants: list[dict] | None = None,
          workers: int = 1) -> SweepResult:
    """Run every (n, seed, variant) cell. Rows come back in that order."""
    variants = variants or [{}]
    cells = []
    for (i, n), (j, seed), (k, var) in itertools.product(enumerate(n_values), enumerate(seeds), enumerate(variants)):
        cfg = dataclasses.replace(template, n=n, seed=seed, out=None, export_lp=None,
                                  freq_out=None, flows_out=None, manifest=None, **var)
        cells.append(((i, j, k), cfg))
    if not cells:
        raise ExperimentError("sweep: no cells")
    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_cell, cells))
    else:
        rows = [_cell(c) for c in cells]
    rows.sort(key=lambda r: r.pop("_order"))
    return SweepResult(rows)


# -- command line --------------------------------------------------------------


def _seeds(spec: str) -> list[int]:
    out = []
    for part in spec.split(","):
        if "-" in part:
            lo, hi = part.split("-")
            out += range(int(lo), int(hi) + 1)
        else:
            out.append(int(part))
    return out


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--topo", help="topology file (otherwise a random unit-disk graph is generated)")
    p.add_argument("--degree", type=float, default=8.0, help="target average degree of generated topologies")
    p.add_argument("--routing", default="flat", help="flat | wuli | file:<path>")
    p.add_argument("--pattern", default="adhoc", help="adhoc | hybrid | uplink")
    p.add_argument("--bound", default="pessimistic", help="pessimistic | optimistic")
    p.add_argument("--fairness", default="node", help="node | link")
    p.add_argument("--objective", default="max-min", help="max-sum | max-min")
    p.add_argument("--overhead", default="none", help="none | const:<fraction> | file:<path>")
    p.add_argument("--rounds", type=int, default=DEFAULT_ROUNDS, help="Monte Carlo rounds per center")
    p.add_argument("--exact-freq", nargs="?", const="always", default="auto",
                   choices=["auto", "always", "never"],
                   help="enumerate maximal independent sets instead of sampling (bare flag: always)")
    p.add_argument("--method", default="auto", choices=["auto", "simplex", "highs"])
    p.add_argument("--out", help="CSV output")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="manetcap", description="Capacity bounds for ad hoc and hybrid wireless networks")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="evaluate one configuration")
    _add_common(p)
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--export-lp", help="write the linear program in LP format")
    p.add_argument("--freq-out", help="write the frequency table as CSV")
    p.add_argument("--flows-out", help="write per-route throughputs as CSV")
    p.add_argument("--manifest", help="write a JSON run manifest")

    p = sub.add_parser("sweep", help="evaluate a grid of node counts, seeds and variants")
    _add_common(p)
    p.add_argument("--n-values", type=int, nargs="+", required=True)
    p.add_argument("--seeds", default="0-4", help="e.g. 0-9 or 1,3,5")
    p.add_argument("--workers", type=int, default=1)
    return parser


def _config(ns: argparse.Namespace, **extra) -> ExperimentConfig:
    fields = {f.name for f in dataclasses.fields(ExperimentConfig)}
    values = {k: v for k, v in vars(ns).items() if k in fields}
    values["exact"] = ns.exact_freq
    values.update(extra)
    return ExperimentConfig(**values)


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if ns.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        if ns.command == "run":
            cfg = _config(ns)
            res = run(cfg)
            if not cfg.out:
                write_rows([res.row], None)
            return 0 if res.report.status == "optimal" else 1
        variants = [dict(zip(VARIANT_KEYS, combo)) for combo in itertools.product(
            *(getattr(ns, k).split(",") for k in VARIANT_KEYS))]
        template = _config(ns, routing=variants[0]["routing"], pattern=variants[0]["pattern"],
                           bound=variants[0]["bound"], fairness=variants[0]["fairness"],
                           objective=variants[0]["objective"])
        result = sweep(template, ns.n_values, _seeds(ns.seeds), variants, workers=ns.workers)
        if ns.out:
            result.write(ns.out)
        else:
            write_rows(result.rows, None)
        return 0
    except ExperimentError as exc:
        print(f"manetcap: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
