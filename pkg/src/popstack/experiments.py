"""Named experiments, parallel trial execution and result files."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__
from .coloring import (
    SkippedTrial, check_queue, parameter_violations, queue_bound, select_m,
    track_p, tracked_element_journey,
)
from .oracle import exact_step_distribution, verify_universal, write_distribution_csv
from .particle import (
    coupling_check, evacuation_time, expected_evacuation_time, qualifying_values,
    check_lemma_Lk, write_particle_trace,
)
from .perm import max_run_length, pop_step, steps_to_sort
from .sampler import GENERATOR_NAME, trial_permutation
from .statistics import (
    BASE_COLUMNS, TrialRecord, aggregate, basic_record, count_X, count_Y,
    expected_X, expected_Y, step_displacement, top_block_hit,
)

__all__ = [
    "ConfigError", "ExperimentConfig", "ResultBundle", "Check", "EXPERIMENTS",
    "load_config_file", "run_experiment", "write_bundle", "emit_plot_data",
]

THEOREM_RATIO = 0.503
ORACLE_PROPERTIES = ("ungar", "pop-run-3", "lemma-Lk", "displacement-2", "stack-agrees", "fixed-point")


class ConfigError(ValueError):
    pass


# per-experiment parameter defaults
DEFAULTS: dict[str, dict[str, float]] = {
    "sort-steps": {"b": 0.5, "eps": 0.1},
    "lemma-conc": {"b": 0.5},
    "lemma-Y": {"eps": 0.1},
    "ob-half": {},
    "ob-half-plus": {},
    "lemma-reds": {"a": 0.32},
    "lemma-queue": {"a": 0.32, "c": 0.48, "eps": 0.0061},
    "lemma-Lk": {"b": 0.4},
    "coupling": {"b": 0.4},
    "particle": {"b": 0.4},
    "theorem1": {"a": 0.32, "c": 0.48, "eps": 0.0061},
    "oracle": {"b": 0.5},
}
EXPERIMENTS = tuple(DEFAULTS)


@dataclass
class ExperimentConfig:
    experiment: str
    n: tuple[int, ...]
    trials: int = 100
    master_seed: int = 0
    a: float | None = None
    b: float | None = None
    c: float | None = None
    eps: tuple[float, ...] | None = None
    output_dir: Path | None = None
    format: str = "csv"
    workers: int | str = 1
    monitor: bool = False

    def __post_init__(self):
        if self.experiment not in DEFAULTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; choose from {', '.join(EXPERIMENTS)}")
        if isinstance(self.n, int):
            self.n = (self.n,)
        self.n = tuple(int(x) for x in self.n)
        if not self.n or min(self.n) < 1:
            raise ConfigError(f"n must be positive, got {self.n}")
        if isinstance(self.eps, (int, float)):
            self.eps = (float(self.eps),)
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if not 0 <= self.master_seed < 1 << 64:
            raise ConfigError(f"master_seed must fit in 64 unsigned bits, got {self.master_seed}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")
        if self.workers != "auto" and (not isinstance(self.workers, int) or self.workers < 1):
            raise ConfigError(f"workers must be a positive integer or 'auto', got {self.workers!r}")
        d = DEFAULTS[self.experiment]
        for name in ("a", "b", "c"):
            if getattr(self, name) is None and name in d:
                setattr(self, name, d[name])
        if self.eps is None and "eps" in d:
            self.eps = (d["eps"],)
        self._validate_params()

    def _validate_params(self):
        exp = self.experiment
        if exp in ("lemma-queue", "theorem1"):
            for eps in self.eps:
                bad = parameter_violations(self.a, self.c, eps)
                if bad:
                    raise ConfigError(f"invalid parameters (a={self.a}, c={self.c}, eps={eps}): violates "
                                      + "; ".join(bad))
        if exp == "lemma-reds" and not 0 < self.a < 0.5:
            raise ConfigError(f"a must lie in (0, 0.5), got {self.a}")
        if self.b is not None and not 0 < self.b < 1:
            raise ConfigError(f"b must lie in (0, 1), got {self.b}")
        if self.eps is not None and any(not 0 < e < 1 for e in self.eps):
            raise ConfigError(f"eps must lie in (0, 1), got {self.eps}")
        if exp == "oracle" and max(self.n) > 10:
            raise ConfigError("oracle experiment is exhaustive; n must be <= 10")

    @property
    def worker_count(self) -> int:
        if self.workers == "auto":
            return os.cpu_count() or 1
        return int(self.workers)

    def params(self) -> dict[str, Any]:
        """The configuration echo stored with every output."""
        return {
            "experiment": self.experiment,
            "n": list(self.n),
            "trials": self.trials,
            "master_seed": self.master_seed,
            "a": self.a,
            "b": self.b,
            "c": self.c,
            "eps": list(self.eps) if self.eps is not None else None,
            "format": self.format,
            "rounding": "floor",
        }


_CONFIG_KEYS = {f.name for f in fields(ExperimentConfig)} | {"seed", "out"}


def _parse_list(text: str, conv):
    return tuple(conv(tok) for tok in text.split(",") if tok.strip())


def coerce_config_values(raw: dict[str, str]) -> dict[str, Any]:
    """Turn string values (config file or flags) into typed config fields."""
    out: dict[str, Any] = {}
    for key, val in raw.items():
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        if val is None:
            continue
        try:
            if key == "n":
                out["n"] = _parse_list(str(val), lambda s: int(float(s)))
            elif key == "eps":
                out["eps"] = _parse_list(str(val), float)
            elif key in ("a", "b", "c"):
                out[key] = float(val)
            elif key in ("trials",):
                out[key] = int(float(val))
            elif key in ("master_seed", "seed"):
                out["master_seed"] = int(val)
            elif key in ("output_dir", "out"):
                out["output_dir"] = Path(val)
            elif key == "workers":
                out["workers"] = "auto" if str(val) == "auto" else int(val)
            elif key == "monitor":
                out["monitor"] = str(val).lower() in ("1", "true", "yes")
            else:
                out[key] = str(val)
        except ValueError as e:
            raise ConfigError(f"bad value for {key}: {val!r} ({e})") from None
    return out


def load_config_file(path: Path) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        raw[key] = val
    return raw


# -- trial functions ---------------------------------------------------------

def _skip(n: int, trial: int, reason: str, **extra) -> TrialRecord:
    return TrialRecord(n=n, trial_index=trial, extra={**extra, "skip_reason": reason})


def _trial_sort_steps(n, trial, seed, P):
    sigma = trial_permutation(n, seed, trial)
    rec = basic_record(sigma, trial, b=P["b"], eps=P["eps"])
    rec.extra["steps_over_n"] = rec.steps / n
    return rec


def _trial_lemma_conc(n, trial, seed, P):
    sigma = trial_permutation(n, seed, trial)
    return TrialRecord(n=n, trial_index=trial, x_count=count_X(sigma, P["b"]), extra={"b": P["b"]})


def _trial_lemma_y(n, trial, seed, P):
    sigma = trial_permutation(n, seed, trial)
    return TrialRecord(n=n, trial_index=trial, y_count=count_Y(sigma, P["eps"]), extra={"eps": P["eps"]})


def _trial_ob_half(n, trial, seed, P):
    sigma = trial_permutation(n, seed, trial)
    k = top_block_hit(sigma)
    return TrialRecord(n=n, trial_index=trial, top_block_value=k, extra={"hit": int(k is not None)})


def _trial_ob_half_plus(n, trial, seed, P):
    sigma = trial_permutation(n, seed, trial)
    return TrialRecord(
        n=n, trial_index=trial, max_run_input=max_run_length(sigma),
        max_run_after_pop=max_run_length(pop_step(sigma)),
        extra={"displacement": step_displacement(sigma)},
    )


def _trial_lemma_reds(n, trial, seed, P):
    sigma = trial_permutation(n, seed, trial)
    try:
        res = track_p(sigma, P["a"], monitor=P.get("monitor", False))
    except SkippedTrial as e:
        return _skip(n, trial, e.reason)
    extra = {
        "m": res.m, "t0": res.t0, "series_length": len(res.series),
        "reds_violations": len(res.reds_violations),
        "isolation_violations": res.isolation_violations,
    }
    if P.get("monitor"):
        extra["_monitor"] = res.monitor
    return TrialRecord(n=n, trial_index=trial, extra=extra)


def _trial_lemma_queue(n, trial, seed, P):
    sigma = trial_permutation(n, seed, trial)
    try:
        ok = check_queue(sigma, P["a"], P["c"], P["eps"])
    except SkippedTrial as e:
        return _skip(n, trial, e.reason)
    return TrialRecord(n=n, trial_index=trial, extra={"m": select_m(sigma, P["a"]).m, "queue_ok": int(ok)})


def _trial_lemma_lk(n, trial, seed, P):
    sigma = trial_permutation(n, seed, trial)
    return TrialRecord(n=n, trial_index=trial, extra={
        "qualifying": len(qualifying_values(sigma, P["b"])),
        "lemma_holds": int(check_lemma_Lk(sigma, P["b"])),
    })


def _trial_coupling(n, trial, seed, P):
    sigma = trial_permutation(n, seed, trial)
    qual = qualifying_values(sigma, P["b"])
    dom = mono = floor = 0
    first = ""
    for s in qual:
        r = coupling_check(sigma, s, P["b"])
        dom += not r.ok
        mono += not r.monotone_ok
        floor += not r.position_floor_ok
        if not r.ok and first == "":
            first = f"s={s},t={r.first_violation}"
    if not qual:
        return _skip(n, trial, "no qualifying s")
    return TrialRecord(n=n, trial_index=trial, extra={
        "qualifying": len(qual), "domination_violations": dom,
        "monotone_violations": mono, "floor_violations": floor, "first_violation": first,
    })


def _trial_theorem1(n, trial, seed, P):
    sigma = trial_permutation(n, seed, trial)
    try:
        j = tracked_element_journey(sigma, P["a"], P["c"], P["eps"])
    except SkippedTrial as e:
        rec = _skip(n, trial, e.reason)
        rec.steps = steps_to_sort(sigma)
        rec.extra["steps_over_n"] = rec.steps / n
        return rec
    bound = queue_bound(n, P["eps"])
    return TrialRecord(n=n, trial_index=trial, steps=j.steps, top_block_value=j.k, extra={
        "steps_over_n": j.steps / n,
        "m": j.m,
        "p_cn": j.p_at_cn,
        "queue_ok": int(j.p_at_cn <= bound),
        "pos_at_cn": j.pos_at_cn,
        "pos_at_cn_over_n": j.pos_at_cn / n,
        "overtake_step": j.overtake_step,
        "unit_moves": None if j.unit_moves_after_overtake is None else int(j.unit_moves_after_overtake),
    })


TRIAL_FUNCS: dict[str, Callable] = {
    "sort-steps": _trial_sort_steps,
    "lemma-conc": _trial_lemma_conc,
    "lemma-Y": _trial_lemma_y,
    "ob-half": _trial_ob_half,
    "ob-half-plus": _trial_ob_half_plus,
    "lemma-reds": _trial_lemma_reds,
    "lemma-queue": _trial_lemma_queue,
    "lemma-Lk": _trial_lemma_lk,
    "coupling": _trial_coupling,
    "theorem1": _trial_theorem1,
}


def _run_job(job) -> TrialRecord:
    experiment, n, trial, seed, P = job
    return TRIAL_FUNCS[experiment](n, trial, seed, P)


# -- checks ------------------------------------------------------------------

@dataclass
class Check:
    name: str
    passed: bool
    detail: str

    def as_dict(self):
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


def _live(records):
    return [r for r in records if not r.skipped]


def _checks(cfg: ExperimentConfig, records: list[TrialRecord]) -> list[Check]:
    exp = cfg.experiment
    out: list[Check] = []
    for n in cfg.n:
        rs = [r for r in records if r.n == n]
        live = _live(rs)
        skipped = len(rs) - len(live)
        if exp in ("sort-steps", "theorem1"):
            low = [r for r in rs if r.steps is not None and r.steps / n < THEOREM_RATIO]
            out.append(Check(f"steps/n >= {THEOREM_RATIO} (n={n})", not low,
                             f"{len(rs) - len(low)}/{len(rs)} trials pass; min steps/n = "
                             f"{min(r.steps / n for r in rs if r.steps is not None):.4f}"))
        if exp in ("lemma-queue", "theorem1"):
            ok = sum(r.extra["queue_ok"] for r in live)
            need = math.ceil(0.95 * len(live))
            out.append(Check(f"p_cn <= (1-eps)n in >= 95% (n={n})", bool(live) and ok >= need,
                             f"{ok}/{len(live)} non-skipped trials ({skipped} skipped)"))
        if exp == "lemma-conc":
            m = float(np.mean([r.x_count / n for r in rs]))
            target = expected_X(cfg.b, 1)
            out.append(Check(f"mean X/n within 0.01 of (1-b)^2 (n={n})", abs(m - target) <= 0.01,
                             f"mean {m:.5f}, target {target:.5f}"))
        if exp == "lemma-Y":
            for eps in cfg.eps:
                sel = [r for r in rs if r.extra["eps"] == eps]
                m = float(np.mean([r.y_count / n for r in sel]))
                target = expected_Y(eps, 1)
                out.append(Check(f"mean Y/n within 0.01 of formula (n={n}, eps={eps})",
                                 abs(m - target) <= 0.01, f"mean {m:.5f}, target {target:.5f}"))
        if exp == "ob-half":
            hits = sum(r.extra["hit"] for r in rs)
            out.append(Check(f"top block hit in >= 99% (n={n})", hits >= math.ceil(0.99 * len(rs)),
                             f"{hits}/{len(rs)}"))
        if exp == "ob-half-plus":
            bound = 2 * math.log2(n)
            worst = max(r.extra["displacement"] for r in rs)
            out.append(Check(f"displacement <= 2 log2 n (n={n})", worst <= bound,
                             f"max {worst}, bound {bound:.2f}"))
        if exp == "lemma-reds":
            v = sum(r.extra["reds_violations"] for r in live)
            iso = sum(r.extra["isolation_violations"] for r in live)
            out.append(Check(f"p_(t+2) <= p_t (n={n})", v == 0,
                             f"{v} violations over {len(live)} trajectories ({skipped} skipped)"))
            out.append(Check(f"isolated reds move +1 (n={n})", iso == 0, f"{iso} violations"))
        if exp == "lemma-Lk":
            bad = [r.trial_index for r in rs if not r.extra["lemma_holds"]]
            out.append(Check(f"qualifying s in L_bn (n={n})", not bad, f"failing trials: {bad[:10]}"))
        if exp == "coupling":
            v = sum(r.extra["domination_violations"] + r.extra["monotone_violations"]
                    + r.extra["floor_violations"] for r in live)
            pairs = sum(r.extra["qualifying"] for r in live)
            out.append(Check(f"R_t <= R'_t (n={n})", v == 0,
                             f"{v} violations over {pairs} (trial, s) pairs ({skipped} trials without s)"))
        if exp == "particle":
            r = rs[0]
            out.append(Check(f"evacuation time = 2*floor(bn/2) (n={n})",
                             r.extra["evacuation_time"] == r.extra["expected"],
                             f"{r.extra['evacuation_time']} vs {r.extra['expected']}"))
        if exp == "oracle":
            for r in rs:
                out.append(Check(f"{r.extra['property']} on S_{n}", bool(r.extra["holds"]),
                                 r.extra["counterexample"] or "no counterexample"))
    return out


# -- bundle ------------------------------------------------------------------

@dataclass
class ResultBundle:
    config: ExperimentConfig
    metadata: dict[str, Any]
    records: list[TrialRecord]
    summaries: dict[str, dict[str, Any]]
    checks: list[Check]
    artifacts: dict[str, str] = field(default_factory=dict)  # extra files: name -> text

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


SUMMARY_FIELDS = ("steps", "steps_over_n", "x_count", "y_count", "max_run_input",
                  "max_run_after_pop", "displacement", "p_cn", "pos_at_cn_over_n")


def _summaries(records: list[TrialRecord], ns) -> dict[str, dict[str, Any]]:
    out: dict[str, dict[str, Any]] = {}
    for n in ns:
        rs = [r for r in records if r.n == n]
        live = _live(rs)
        block: dict[str, Any] = {"trials": len(rs), "effective": len(live), "skipped": len(rs) - len(live)}
        for name in SUMMARY_FIELDS:
            try:
                block[name] = aggregate(live or rs, name).as_dict()
            except (KeyError, ValueError):
                pass
        out[str(n)] = block
    return out


def _base_metadata(cfg: ExperimentConfig) -> dict[str, Any]:
    return {
        "config": cfg.params(),
        "code_version": __version__,
        "generator": GENERATOR_NAME,
        "numpy_version": np.__version__,
    }


def run_experiment(cfg: ExperimentConfig) -> ResultBundle:
    """Run every trial of ``cfg`` and evaluate the experiment's checks.

    Records come back sorted by (n, eps, trial) whatever the worker count.
    """
    started = time.perf_counter()
    artifacts: dict[str, str] = {}
    P = {"a": cfg.a, "b": cfg.b, "c": cfg.c, "monitor": cfg.monitor}
    if cfg.experiment == "particle":
        records = []
        for n in cfg.n:
            try:
                t = evacuation_time(n, cfg.b)
            except AssertionError:
                t = -1
            records.append(TrialRecord(n=n, trial_index=0, extra={
                "b": cfg.b, "evacuation_time": t, "expected": expected_evacuation_time(n, cfg.b)}))
            buf = io.StringIO()
            write_particle_trace(buf, n, cfg.b)
            artifacts[f"particle_trace_n{n}.csv"] = buf.getvalue()
    elif cfg.experiment == "oracle":
        records = []
        for n in cfg.n:
            for i, prop in enumerate(ORACLE_PROPERTIES):
                res = verify_universal(n, prop, b=cfg.b) if prop == "lemma-Lk" else verify_universal(n, prop)
                records.append(TrialRecord(n=n, trial_index=i, extra={
                    "property": prop, "holds": int(res.holds), "checked": res.checked,
                    "counterexample": "" if res.counterexample is None else
                    " ".join(map(str, res.counterexample)),
                }))
            buf = io.StringIO()
            write_distribution_csv(buf, exact_step_distribution(n))
            artifacts[f"step_distribution_n{n}.csv"] = buf.getvalue()
    else:
        jobs = []
        for n in cfg.n:
            for eps in (cfg.eps or (None,)):
                for trial in range(cfg.trials):
                    jobs.append((cfg.experiment, n, trial, cfg.master_seed, {**P, "eps": eps}))
        workers = min(cfg.worker_count, len(jobs))
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                records = list(pool.map(_run_job, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
        else:
            records = [_run_job(j) for j in jobs]
        records.sort(key=lambda r: (r.n, r.extra.get("eps") or 0.0, r.trial_index))
        for r in records:
            mon = r.extra.pop("_monitor", None)
            if mon:
                artifacts[f"monitor_n{r.n}_trial{r.trial_index}.csv"] = _monitor_csv(mon)
    metadata = _base_metadata(cfg)
    # scheduling details stay out of records files
    metadata["workers"] = cfg.workers
    metadata["output_dir"] = str(cfg.output_dir) if cfg.output_dir else None
    metadata["wall_time_seconds"] = round(time.perf_counter() - started, 3)
    return ResultBundle(cfg, metadata, records, _summaries(records, cfg.n), _checks(cfg, records), artifacts)


def _monitor_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    cols = ["t", "p_t", "pos_m", "reds", "whites", "blacks", "tracked_pos"]
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for row in rows:
        w.writerow({c: row.get(c, "") for c in cols})
    return buf.getvalue()


# -- serialization -----------------------------------------------------------

def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def record_columns(records: list[TrialRecord]) -> list[str]:
    extra = sorted({k for r in records for k in r.extra})
    return list(BASE_COLUMNS) + extra


def records_csv(bundle: ResultBundle) -> str:
    """records.csv text: ``#`` metadata lines, a header, one row per trial.

    Holds nothing that depends on wall time or scheduling.
    """
    buf = io.StringIO()
    meta = _base_metadata(bundle.config)
    buf.write(f"# popstack {meta['code_version']} experiment={bundle.config.experiment}\n")
    buf.write(f"# seed={bundle.config.master_seed} generator={meta['generator']} numpy={meta['numpy_version']}\n")
    buf.write(f"# config={json.dumps(meta['config'], sort_keys=True)}\n")
    cols = record_columns(bundle.records)
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in bundle.records:
        row = r.row()
        w.writerow([_cell(row.get(c)) for c in cols])
    return buf.getvalue()


def records_json(bundle: ResultBundle) -> str:
    meta = _base_metadata(bundle.config)
    rows = [r.row() for r in bundle.records]
    return json.dumps({"metadata": meta, "records": rows}, indent=1, sort_keys=True) + "\n"


def write_bundle(bundle: ResultBundle, out_dir: Path) -> list[Path]:
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ConfigError(f"cannot create output directory {out_dir}: {e}") from None
    if not os.access(out_dir, os.W_OK):
        raise ConfigError(f"output directory {out_dir} is not writable")
    written = []
    if bundle.config.format == "csv":
        name, text = "records.csv", records_csv(bundle)
    else:
        name, text = "records.json", records_json(bundle)
    (out_dir / name).write_text(text)
    written.append(out_dir / name)
    summary = {
        "metadata": bundle.metadata,
        "summaries": bundle.summaries,
        "checks": [c.as_dict() for c in bundle.checks],
        "passed": bundle.passed,
    }
    (out_dir / "summary.json").write_text(json.dumps(summary, indent=1, sort_keys=True) + "\n")
    written.append(out_dir / "summary.json")
    for fname, text in sorted(bundle.artifacts.items()):
        (out_dir / fname).write_text(text)
        written.append(out_dir / fname)
    written += emit_plot_data(bundle, out_dir)
    return written


# -- plot data ---------------------------------------------------------------

def plot_series(bundle: ResultBundle) -> dict[str, tuple[str, str, list[tuple[float, float]]]]:
    """Series name -> (x label, y label, rows)."""
    cfg, recs = bundle.config, bundle.records
    exp = cfg.experiment
    series: dict[str, tuple[str, str, list[tuple[float, float]]]] = {}
    if not recs:
        return series

    def per_n(fn):
        rows = []
        for n in cfg.n:
            rs = _live([r for r in recs if r.n == n])
            if rs:
                rows.append((n, fn(n, rs)))
        return rows

    if exp in ("sort-steps", "theorem1"):
        series["mean_T_over_n"] = ("n", "mean T/n", per_n(
            lambda n, rs: float(np.mean([r.steps / n for r in rs]))))
    if exp == "lemma-conc":
        series["mean_X_over_n"] = ("n", "mean X/n", per_n(lambda n, rs: float(np.mean([r.x_count / n for r in rs]))))
        series["analytic_X_over_n"] = ("n", "(1-b)^2", [(n, expected_X(cfg.b, 1)) for n in cfg.n])
    if exp == "lemma-Y":
        emp, ana = [], []
        for eps in cfg.eps:
            rs = [r for r in recs if r.extra["eps"] == eps]
            emp.append((eps, float(np.mean([r.y_count / r.n for r in rs]))))
            ana.append((eps, expected_Y(eps, 1)))
        series["mean_Y_over_n"] = ("eps", "mean Y/n", emp)
        series["analytic_Y_over_n"] = ("eps", "eps ln(1/eps) + eps", ana)
    if exp == "ob-half":
        series["hit_fraction"] = ("n", "fraction with top-block hit",
                                  per_n(lambda n, rs: float(np.mean([r.extra["hit"] for r in rs]))))
    if exp == "ob-half-plus":
        series["max_displacement"] = ("n", "max displacement",
                                      per_n(lambda n, rs: max(r.extra["displacement"] for r in rs)))
        series["displacement_bound"] = ("n", "2 log2 n", [(n, 2 * math.log2(n)) for n in cfg.n])
    if exp in ("lemma-queue", "theorem1"):
        series["queue_fraction"] = ("n", "fraction with p_cn <= (1-eps)n",
                                    per_n(lambda n, rs: float(np.mean([r.extra["queue_ok"] for r in rs]))))
    if exp == "particle":
        series["evacuation_time"] = ("n", "evacuation time", [(r.n, r.extra["evacuation_time"]) for r in recs])
        series["evacuation_formula"] = ("n", "2 floor(bn/2)", [(r.n, r.extra["expected"]) for r in recs])
    if exp == "oracle":
        for name, text in bundle.artifacts.items():
            rows = [tuple(map(int, line.split(","))) for line in text.splitlines()[1:]]
            series[name.replace(".csv", "")] = ("t", "count", rows)
    return series


def emit_plot_data(bundle: ResultBundle, out_dir: Path) -> list[Path]:
    """One two-column ``.dat`` file per series plus ``manifest.txt``."""
    out_dir = Path(out_dir)
    series = plot_series(bundle)
    written = []
    lines = [f"# plot data for experiment={bundle.config.experiment} seed={bundle.config.master_seed}",
             f"series={len(series)}"]
    for name, (xl, yl, rows) in series.items():
        path = out_dir / f"{name}.dat"
        with path.open("w") as fh:
            fh.write(f"# {xl}\t{yl}\n")
            for x, y in rows:
                fh.write(f"{_cell(x)}\t{_cell(y)}\n")
        written.append(path)
        lines.append(f"{path.name}\tx={xl}\ty={yl}\trows={len(rows)}")
    manifest = out_dir / "manifest.txt"
    manifest.write_text("\n".join(lines) + "\n")
    written.append(manifest)
    return written
