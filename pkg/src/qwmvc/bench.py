"""Ensemble sweeps: generate instances, solve, and summarise approximation ratios."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import platform
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__
from .exact import DEFAULT_BUDGET, bnb_mvc
from .graph import (
    EnsembleSpec,
    Graph,
    generate_ws,
    is_connected,
    is_isomorphic,
    regular_degree,
    wl_hash,
    ws_substitute_params,
)
from .errors import GenerationError, ParameterError
from .heuristics import SOLVERS, TIME_MODES, FastVcParams, SaParams, solve

FAMILY_ORDER = ("ER", "BA", "REG")
SOLVER_ORDER = SOLVERS
REG_ATTEMPTS = 100
THREADS_ENV = "QWMVC_THREADS"


@dataclass(frozen=True)
class EnsembleConfig:
    """A sweep over the three ensembles.

    ``reg_k`` entries below 1 are fractions of n; the others are absolute
    degrees. Each is realised through ``regular_degree``.
    """

    er_n: tuple[int, ...] = tuple(range(4, 61, 4))
    er_p: tuple[float, ...] = (0.2, 0.5, 0.8)
    ba_n: tuple[int, ...] = tuple(range(4, 61, 4))
    ba_m: tuple[int, ...] = (1, 2, 3, 5)
    reg_n: tuple[int, ...] = tuple(range(4, 61, 4))
    reg_k: tuple[float, ...] = (2, 0.25, 0.5)
    instances_per_config: int = 10
    reg_instances: int = 5
    seed_base: int = 2024
    solvers: tuple[str, ...] = SOLVERS
    time_mode: str = "topt"
    exact_budget: int = DEFAULT_BUDGET
    sa: SaParams = field(default_factory=SaParams)
    fastvc: FastVcParams = field(default_factory=FastVcParams)

    def __post_init__(self):
        if self.instances_per_config < 1 or self.reg_instances < 1:
            raise ParameterError("instances_per_config and reg_instances must be >= 1")
        if self.time_mode not in TIME_MODES:
            raise ParameterError(f"time_mode must be one of {TIME_MODES}")
        for s in self.solvers:
            if s not in SOLVERS:
                raise ParameterError(f"unknown solver {s!r}")
        if not self.solvers:
            raise ParameterError("at least one solver is required")
        for n in self.er_n + self.ba_n + self.reg_n:
            if not 1 <= n <= 2000:
                raise ParameterError(f"vertex count {n} outside 1..2000")
        for p in self.er_p:
            if not 0.0 < p <= 1.0:
                raise ParameterError(f"ER probability {p} outside (0, 1]")
        for m in self.ba_m:
            if m < 1 or m != int(m):
                raise ParameterError(f"BA attachment {m} must be a positive integer")
        for k in self.reg_k:
            if k < 0:
                raise ParameterError(f"regular degree target {k} must be >= 0")
        if self.exact_budget < 1:
            raise ParameterError("exact_budget must be >= 1")

    @classmethod
    def from_dict(cls, data: dict) -> "EnsembleConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ParameterError(f"unknown config keys: {sorted(unknown)}")
        kw = {}
        for k, v in data.items():
            if k == "sa":
                kw[k] = SaParams(**v)
            elif k == "fastvc":
                kw[k] = FastVcParams(**v)
            elif isinstance(v, list):
                kw[k] = tuple(v)
            else:
                kw[k] = v
        try:
            return cls(**kw)
        except TypeError as exc:
            raise ParameterError(str(exc)) from None

    def to_dict(self) -> dict:
        d = asdict(self)
        return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}


PRESETS = {
    "desk": {},
    "smoke": {"er_n": [6, 10], "ba_n": [6, 10], "reg_n": [6, 10],
              "instances_per_config": 2, "reg_instances": 2},
    "full": {"er_n": list(range(4, 155, 10)), "er_p": [0.2, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
             "ba_n": list(range(4, 155, 10)), "ba_m": [1, 2, 3, 5, 10, 15],
             "reg_n": list(range(4, 155, 10))},
}


def load_config(path) -> EnsembleConfig:
    """Read a JSON config; a ``"preset"`` key selects base values to override."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParameterError(f"{path}: {exc}") from None
    if not isinstance(data, dict):
        raise ParameterError(f"{path}: top level must be an object")
    preset = data.pop("preset", "desk")
    if preset not in PRESETS:
        raise ParameterError(f"unknown preset {preset!r}")
    return EnsembleConfig.from_dict({**PRESETS[preset], **data})


def instance_seed(seed_base: int, family: str, n: int, param, index: int) -> int:
    """Stable 64-bit seed for one instance, independent of grid order."""
    key = f"{seed_base}|{family}|{n}|{param!r}|{index}".encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")


@dataclass(frozen=True)
class Instance:
    family: str
    n: int
    param: float
    index: int
    seed: int
    graph: Graph
    substituted: bool = False
    note: str = ""


@dataclass(frozen=True)
class RatioRecord:
    family: str
    n: int
    param: float
    seed: int
    index: int
    substituted: bool
    solver: str
    cover_size: int
    exact_size: int
    proven_optimal: bool
    ratio: float
    wall_time: float = 0.0


RECORD_COLUMNS = ("family", "n", "param", "index", "seed", "substituted", "solver",
                  "cover_size", "exact_size", "proven_optimal", "ratio")


def _fmt_param(p) -> str:
    return f"{float(p):g}"


def build_instances(config: EnsembleConfig):
    """All sweep instances plus a list of generation failures."""
    instances: list[Instance] = []
    failures: list[dict] = []
    for n in config.er_n:
        for p in config.er_p:
            for i in range(config.instances_per_config):
                seed = instance_seed(config.seed_base, "ER", n, p, i)
                g = EnsembleSpec("ER", n, p, seed).generate()
                if is_connected(g):
                    instances.append(Instance("ER", n, p, i, seed, g))
                    continue
                ring_k, beta = ws_substitute_params(n, p)
                try:
                    g = generate_ws(n, ring_k, beta, seed)
                except (GenerationError, ParameterError) as exc:
                    failures.append({"family": "ER", "n": n, "param": p, "index": i,
                                     "error": str(exc)})
                    continue
                instances.append(Instance("ER", n, p, i, seed, g, True,
                                          f"WS(ring_k={ring_k}, beta={beta})"))
    for n in config.ba_n:
        for m in config.ba_m:
            if m >= n:
                continue
            for i in range(config.instances_per_config):
                seed = instance_seed(config.seed_base, "BA", n, m, i)
                instances.append(Instance("BA", n, m, i, seed,
                                          EnsembleSpec("BA", n, m, seed).generate()))
    for n in config.reg_n:
        if n < 3:
            continue
        degrees = sorted({regular_degree(n, k * n if k < 1 else k) for k in config.reg_k})
        for k in degrees:
            # WL colours cannot split regular graphs of equal degree, so a
            # hash collision is settled by an exact isomorphism test
            seen: dict[str, list[Graph]] = {}
            found = 0
            for attempt in range(REG_ATTEMPTS):
                if found == config.reg_instances:
                    break
                seed = instance_seed(config.seed_base, "REG", n, k, attempt)
                try:
                    g = EnsembleSpec("REG", n, k, seed).generate()
                except GenerationError as exc:
                    failures.append({"family": "REG", "n": n, "param": k,
                                     "index": attempt, "error": str(exc)})
                    continue
                if not is_connected(g):
                    continue
                bucket = seen.setdefault(wl_hash(g), [])
                if any(is_isomorphic(g, other) for other in bucket):
                    continue
                bucket.append(g)
                instances.append(Instance("REG", n, k, found, seed, g))
                found += 1
    return instances, failures


def _solve_instance(args):
    inst, config = args
    exact = bnb_mvc(inst.graph, budget=config.exact_budget)
    rows = []
    for solver in config.solvers:
        res = solve(inst.graph, solver, seed=inst.seed % (2**63), time_mode=config.time_mode,
                    sa_params=config.sa, fastvc_params=config.fastvc)
        if not res.valid:
            raise AssertionError(f"{solver} returned an invalid cover on {inst.family} "
                                 f"n={inst.n} param={inst.param} index={inst.index}")
        ratio = res.size / exact.size if exact.size else 1.0
        rows.append(RatioRecord(inst.family, inst.n, float(inst.param), inst.seed, inst.index,
                                inst.substituted, solver, res.size, exact.size,
                                exact.proven_optimal, ratio, res.wall_time))
    return rows, exact.wall_time


def _canonical_key(r: RatioRecord):
    return (FAMILY_ORDER.index(r.family), r.n, r.param, r.index, SOLVER_ORDER.index(r.solver))


def resolve_threads(threads: int | None = None) -> int:
    if threads is None:
        threads = int(os.environ.get(THREADS_ENV, "0") or 0)
    if threads <= 0:
        threads = os.cpu_count() or 1
    return threads


@dataclass
class EnsembleRun:
    records: list[RatioRecord]
    instances: int
    substituted: int
    failures: list[dict]
    exact_time: float
    solve_time: dict[str, float]


def run_ensemble(config: EnsembleConfig, threads: int | None = None) -> EnsembleRun:
    """Solve every instance with the exact oracle and each configured heuristic.

    Records come back in canonical order whatever the worker count.
    """
    instances, failures = build_instances(config)
    threads = resolve_threads(threads)
    work = [(inst, config) for inst in instances]
    if threads == 1 or len(work) <= 1:
        results = [_solve_instance(w) for w in work]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_solve_instance, work, chunksize=4))
    records = [r for rows, _ in results for r in rows]
    records.sort(key=_canonical_key)
    solve_time = {s: 0.0 for s in config.solvers}
    for r in records:
        solve_time[r.solver] += r.wall_time
    return EnsembleRun(records, len(instances), sum(i.substituted for i in instances),
                       failures, sum(t for _, t in results), solve_time)


@dataclass(frozen=True)
class SummaryRow:
    family: str
    solver: str
    n: int | None
    mean: float
    std: float
    count: int
    excluded: int


@dataclass
class Aggregate:
    rows: list[SummaryRow]
    excluded: dict[tuple, int]
    """Unproven record count per group key, including groups with no row."""


def aggregate(records, group_by: tuple[str, ...] = ("family",)) -> Aggregate:
    """Mean and population std of the ratio per (group, solver), proven records only."""
    if group_by not in (("family",), ("family", "n")):
        raise ParameterError(f"group_by must be ('family',) or ('family', 'n'), got {group_by}")
    if not records:
        raise ParameterError("no records to aggregate")
    by_n = group_by == ("family", "n")
    groups: dict[tuple, list[float]] = {}
    excluded: dict[tuple, int] = {}
    for r in records:
        key = (r.family, r.solver, r.n if by_n else None)
        groups.setdefault(key, [])
        excluded.setdefault(key, 0)
        if r.proven_optimal:
            groups[key].append(r.ratio)
        else:
            excluded[key] += 1
    rows = []
    for key in sorted(groups, key=lambda k: (_order(FAMILY_ORDER, k[0]),
                                             _order(SOLVER_ORDER, k[1]), k[2] or 0)):
        vals = groups[key]
        if not vals:
            continue
        arr = np.asarray(vals)
        rows.append(SummaryRow(key[0], key[1], key[2], float(arr.mean()), float(arr.std()),
                               len(vals), excluded[key]))
    return Aggregate(rows, excluded)


def _order(seq, item):
    return seq.index(item) if item in seq else len(seq)


def _f6(x: float) -> str:
    return f"{x:.6f}"


def heatmap_csv(summary: Aggregate) -> str:
    cells = {(r.solver, r.family): r.mean for r in summary.rows if r.n is None}
    solvers = [s for s in SOLVER_ORDER if any(k[0] == s for k in cells)]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("solver",) + FAMILY_ORDER)
    for s in solvers:
        w.writerow([s] + [_f6(cells[(s, f)]) if (s, f) in cells else "" for f in FAMILY_ORDER])
    return buf.getvalue()


def curves_csv(summary: Aggregate) -> str:
    rows = sorted((r for r in summary.rows if r.n is not None),
                  key=lambda r: (r.family, r.solver, r.n))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("family", "solver", "n", "mean", "std", "count"))
    for r in rows:
        w.writerow((r.family, r.solver, r.n, _f6(r.mean), _f6(r.std), r.count))
    return buf.getvalue()


def records_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RECORD_COLUMNS)
    for r in records:
        w.writerow((r.family, r.n, _fmt_param(r.param), r.index, r.seed,
                    str(r.substituted).lower(), r.solver, r.cover_size, r.exact_size,
                    str(r.proven_optimal).lower(), _f6(r.ratio)))
    return buf.getvalue()


def read_records_csv(path) -> list[RatioRecord]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(RECORD_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise ParameterError(f"{path}: missing columns {sorted(missing)}")
        return [
            RatioRecord(row["family"], int(row["n"]), float(row["param"]), int(row["seed"]),
                        int(row["index"]), row["substituted"] == "true", row["solver"],
                        int(row["cover_size"]), int(row["exact_size"]),
                        row["proven_optimal"] == "true", float(row["ratio"]))
            for row in reader
        ]


def emit_heatmap_csv(summary: Aggregate, path) -> None:
    Path(path).write_text(heatmap_csv(summary))


def emit_curves_csv(summary: Aggregate, path) -> None:
    Path(path).write_text(curves_csv(summary))


def write_outputs(config: EnsembleConfig, run: EnsembleRun, out_dir) -> dict[str, Path]:
    """Write records.csv, heatmap.csv, curves.csv and run_meta.json into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {name: out / name for name in
             ("records.csv", "heatmap.csv", "curves.csv", "run_meta.json")}
    paths["records.csv"].write_text(records_csv(run.records))
    emit_heatmap_csv(aggregate(run.records, ("family",)), paths["heatmap.csv"])
    emit_curves_csv(aggregate(run.records, ("family", "n")), paths["curves.csv"])
    excluded = sum(1 for r in run.records if not r.proven_optimal) // max(1, len(config.solvers))
    meta = {
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "config": config.to_dict(),
        "time_mode": config.time_mode,
        "instances": run.instances,
        "records": len(run.records),
        "substituted_instances": run.substituted,
        "unproven_instances": excluded,
        "generation_failures": run.failures,
        "wall_time_seconds": {"exact": run.exact_time, **run.solve_time},
    }
    paths["run_meta.json"].write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return paths


def run_bench(config: EnsembleConfig, out_dir, threads: int | None = None):
    start = time.perf_counter()
    run = run_ensemble(config, threads)
    paths = write_outputs(config, run, out_dir)
    return run, paths, time.perf_counter() - start


def family_summary_lines(records) -> list[str]:
    summary = aggregate(records, ("family",))
    lines = []
    for fam in FAMILY_ORDER:
        rows = [r for r in summary.rows if r.family == fam]
        if not rows:
            continue
        parts = " ".join(f"{r.solver}={r.mean:.4f}" for r in rows)
        excl = sum(v for k, v in summary.excluded.items() if k[0] == fam)
        lines.append(f"{fam}: {parts} (n_records={sum(r.count for r in rows)}, "
                     f"unproven={excl})")
    return lines
