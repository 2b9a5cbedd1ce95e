"""Config parsing, sweep execution and result summaries.

A config file is flat ``key = value`` text; ``#`` starts a comment and list
values are comma separated.  Example::

    problem = laplace
    arms = nn-only, fdm-pinn
    n_ini = 20, 30, 50, 100, 1000
    n_bc = 20
    repeats = 10

Every sweep point ``(n_ini, n_bc)`` is one cell.  Both arms of a cell use
the same seeds, ``seed + cell_index * 1000 + repeat``, so any run can be
redone on its own.
"""

from __future__ import annotations

import csv
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .burgers import burgers_reference
from .errors import ConfigurationError, FdmPinnError, ParseError
from .fieldio import format_float, read_field_csv, write_field_csv
from .grid import ScalarField
from .metrics import iteration_timer, l2_for
from .sor import solve_trough
from .stencils import collocation_nodes
from .training import ARMS, TrainConfig, predict_field, train

log = logging.getLogger(__name__)

OUTPUT_ROOT_ENV = "FDM_PINN_OUTPUT_ROOT"
SMOKE_ITERATIONS = 10
RESULT_COLUMNS = ["problem", "arm", "n_ini", "n_bc", "n_f_effective", "seed", "l2",
                  "sec_per_iter", "gamma_f", "lambda"]
SUMMARY_COLUMNS = ["problem", "arm", "n_ini", "n_bc", "runs", "l2_mean", "l2_std",
                   "sec_per_iter_mean", "sec_per_iter_std"]

# config key -> TrainConfig field, where the names differ
_ALIASES = {"lambda": "lam"}
_TRAIN_FIELDS = {f.name: f for f in fields(TrainConfig)}


@dataclass
class ExperimentConfig:
    train: TrainConfig
    arms: tuple[str, ...] = ARMS
    n_ini: tuple[int, ...] = (100,)
    n_bc: tuple[int, ...] = (20,)
    repeats: int = 10
    output_dir: Path = Path("results")
    truth_source: str = "auto"  # auto | sor | fine-solver | csv
    truth_path: Path | None = None
    workers: int = 1
    timing: bool = True
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.arms or not self.n_ini or not self.n_bc:
            raise ConfigurationError("arms, n_ini and n_bc sweeps must be nonempty")
        for arm in self.arms:
            if arm not in ARMS:
                raise ConfigurationError(f"unknown arm {arm!r}")
        if len(self.n_bc) not in (1, len(self.n_ini)):
            raise ConfigurationError("n_bc must have one entry or one per n_ini entry")
        if self.repeats < 1:
            raise ConfigurationError("repeats must be >= 1")
        if self.truth_source not in ("auto", "sor", "fine-solver", "csv"):
            raise ConfigurationError(f"unknown truth_source {self.truth_source!r}")
        if self.truth_source == "csv" and self.truth_path is None:
            raise ConfigurationError("truth_source = csv needs truth_path")

    def sweep_points(self) -> list[tuple[int, int]]:
        n_bc = self.n_bc * len(self.n_ini) if len(self.n_bc) == 1 else self.n_bc
        return list(zip(self.n_ini, n_bc))

    def cells(self):
        """``(cell_index, arm, n_ini, n_bc, repeat, seed)`` in run order."""
        for c, (n_ini, n_bc) in enumerate(self.sweep_points()):
            for arm in self.arms:
                for r in range(self.repeats):
                    yield c, arm, n_ini, n_bc, r, self.train.seed + c * 1000 + r


def _parse_bool(text):
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _int_list(text):
    return tuple(int(t) for t in text.replace(",", " ").split())


def parse_config_text(text: str, smoke: bool = False) -> ExperimentConfig:
    raw = {}
    for n, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected key = value, got {line!r}", n)
        key, value = (s.strip() for s in line.split("=", 1))
        if key in raw:
            raise ParseError(f"duplicate key {key!r}", n)
        raw[key] = (value, n)

    def take(key, conv, default=None):
        if key not in raw:
            return default
        value, n = raw.pop(key)
        try:
            return conv(value)
        except (ValueError, ConfigurationError) as exc:
            raise ParseError(f"bad value for {key}: {exc}", n) from None

    problem = take("problem", str)
    if problem not in ("laplace", "burgers"):
        raise ParseError(f"problem must be laplace or burgers, got {problem!r}")
    overrides = {}
    for key in list(raw):
        name = _ALIASES.get(key, key)
        if name not in _TRAIN_FIELDS or name in ("problem", "arm"):
            continue
        if name == "architecture":
            conv = lambda v: tuple(int(t) for t in v.replace("-", ",").split(","))
        elif name == "exact_stencil_backprop":
            conv = _parse_bool
        elif name == "kappa":
            conv = lambda v: None if v.lower() in ("centre", "center", "none") else float(v)
        elif name in ("n_ini", "n_bc"):
            continue
        elif _TRAIN_FIELDS[name].type in ("int", int):
            conv = int
        else:
            conv = float
        overrides[name] = take(key, conv)

    n_ini = take("n_ini", _int_list, None)
    n_bc = take("n_bc", _int_list, None)
    arms = take("arms", lambda v: tuple(a.strip() for a in v.split(",") if a.strip()), ARMS)
    base = TrainConfig.for_problem(problem)
    n_ini = n_ini or (base.n_ini,)
    n_bc = n_bc or (base.n_bc,)
    if smoke:
        overrides["iterations"] = min(overrides.get("iterations", base.iterations),
                                      SMOKE_ITERATIONS)
    try:
        train_cfg = TrainConfig.for_problem(problem, n_ini=n_ini[0], n_bc=n_bc[0], **overrides)
        cfg = ExperimentConfig(
            train=train_cfg,
            arms=arms,
            n_ini=n_ini,
            n_bc=n_bc,
            repeats=take("repeats", int, 10),
            output_dir=take("output_dir", Path, Path("results")),
            truth_source=take("truth_source", str, "auto"),
            truth_path=take("truth_path", Path, None),
            workers=take("workers", int, 1),
            timing=take("timing", _parse_bool, True),
        )
    except ConfigurationError as exc:
        raise ParseError(str(exc)) from None
    if raw:
        key, (_, n) = next(iter(raw.items()))
        raise ParseError(f"unknown key {key!r}", n)
    return cfg


def load_config(path, smoke: bool = False) -> ExperimentConfig:
    cfg = parse_config_text(Path(path).read_text(), smoke=smoke)
    root = os.environ.get(OUTPUT_ROOT_ENV)
    if root and not cfg.output_dir.is_absolute():
        cfg.output_dir = Path(root) / cfg.output_dir
    if cfg.truth_path is not None and not cfg.truth_path.is_absolute():
        cfg.truth_path = Path(path).parent / cfg.truth_path
    return cfg


def ground_truth(problem: str, source: str = "auto", path=None) -> ScalarField:
    if source == "csv":
        return read_field_csv(path)
    if problem == "laplace":
        if source == "fine-solver":
            raise ConfigurationError("the laplace truth comes from SOR, not the Burgers solver")
        return solve_trough(41)[0]
    if source == "sor":
        raise ConfigurationError("SOR only generates the laplace truth")
    return burgers_reference()


@dataclass
class CellResult:
    row: dict
    prediction: ScalarField | None
    error: str | None = None


def run_cell(train_cfg: TrainConfig, truth: ScalarField) -> CellResult:
    coll = collocation_nodes(truth.grid, train_cfg.problem)
    try:
        params, history = train(train_cfg, truth, coll)
        pred = predict_field(params, truth.grid)
        l2 = l2_for(train_cfg.problem, pred, truth)
        sec = iteration_timer(history, warn=False) if len(history) else float("nan")
    except FdmPinnError as exc:
        return CellResult({}, None, f"{type(exc).__name__}: {exc}")
    row = {
        "problem": train_cfg.problem, "arm": train_cfg.arm, "n_ini": train_cfg.n_ini,
        "n_bc": train_cfg.n_bc,
        "n_f_effective": len(coll) if train_cfg.arm == "fdm-pinn" else 0,
        "seed": train_cfg.seed, "l2": l2, "sec_per_iter": sec,
        "gamma_f": train_cfg.gamma_f, "lambda": train_cfg.lam,
    }
    return CellResult(row, pred)


def _fmt(v):
    return format_float(v) if isinstance(v, float) else str(v)


def run_experiment(config, smoke: bool = False) -> int:
    """Train and evaluate every cell; returns a process exit status."""
    cfg = config if isinstance(config, ExperimentConfig) else load_config(config, smoke)
    out = cfg.output_dir
    (out / "fields").mkdir(parents=True, exist_ok=True)
    problem = cfg.train.problem
    truth = ground_truth(problem, cfg.truth_source, cfg.truth_path)
    write_field_csv(truth, out / "fields" / f"truth_{problem}.csv")
    if cfg.train.iterations < 100:
        log.warning("%d iterations per run: sec_per_iter will be noisy", cfg.train.iterations)
    log.info("%s: %d collocation nodes", problem, len(collocation_nodes(truth.grid, problem)))

    jobs = [(cell, cfg.train.with_(arm=arm, n_ini=n_ini, n_bc=n_bc, seed=seed))
            for cell, arm, n_ini, n_bc, _, seed in cfg.cells()]
    if cfg.workers > 1 and not cfg.timing:
        with ProcessPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(run_cell, [j[1] for j in jobs], [truth] * len(jobs)))
    else:
        if cfg.workers > 1:
            log.info("timing enabled: running cells sequentially")
        results = [run_cell(tc, truth) for _, tc in jobs]

    failed = 0
    with open(out / "results.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RESULT_COLUMNS)
        for (cell, tc), res in zip(jobs, results):
            if res.error:
                failed += 1
                log.error("cell %d arm=%s n_ini=%d n_bc=%d seed=%d failed: %s",
                          cell, tc.arm, tc.n_ini, tc.n_bc, tc.seed, res.error)
                continue
            writer.writerow([_fmt(res.row[c]) for c in RESULT_COLUMNS])
            name = f"pred_{problem}_{tc.arm}_{tc.n_ini}_{tc.n_bc}_{tc.seed}.csv"
            write_field_csv(res.prediction, out / "fields" / name)
    log.info("wrote %d rows to %s (%d failed)", len(jobs) - failed, out / "results.csv", failed)
    return 1 if failed else 0


def read_results(path) -> list[dict]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    for r in rows:
        for key in ("n_ini", "n_bc", "n_f_effective", "seed"):
            r[key] = int(r[key])
        for key in ("l2", "sec_per_iter", "gamma_f", "lambda"):
            r[key] = float(r[key])
    return rows


def summarize(results_path, out_path=None) -> Path:
    """Mean and sample std of l2 and sec_per_iter per (problem, arm, n_ini, n_bc)."""
    rows = read_results(results_path)
    if not rows:
        raise ConfigurationError(f"{results_path} has no result rows")
    groups: dict[tuple, list[dict]] = {}
    for r in rows:
        groups.setdefault((r["problem"], r["arm"], r["n_ini"], r["n_bc"]), []).append(r)

    for problem in sorted({k[0] for k in groups}):
        arms = {k[1] for k in groups if k[0] == problem}
        points = {k[2:] for k in groups if k[0] == problem}
        for arm in sorted(arms):
            for pt in sorted(points):
                if (problem, arm, *pt) not in groups:
                    log.warning("missing cell: %s %s n_ini=%d n_bc=%d", problem, arm, *pt)

    def stats(vals):
        vals = np.asarray(vals, dtype=float)
        return float(np.mean(vals)), (float(np.std(vals, ddof=1)) if len(vals) > 1 else math.nan)

    out_path = Path(out_path) if out_path else Path(results_path).with_name("summary.csv")
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_COLUMNS)
        for key in sorted(groups):
            g = groups[key]
            l2m, l2s = stats([r["l2"] for r in g])
            tm, ts = stats([r["sec_per_iter"] for r in g])
            writer.writerow([*map(str, key), len(g), *map(_fmt, (l2m, l2s, tm, ts))])
    return out_path
