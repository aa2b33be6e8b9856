"""Benchmark runner: sweeps selectors x datasets x measures and writes reports."""
from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .data import ColumnSpec, Dataset, NoiseSpec, generate_wealth_dummy, inject_noise, load_csv
from .evaluators import EvaluatorConfig, evaluate
from .exceptions import FsdemError, InvalidInputError
from .metrics import (
    FitnessWeights,
    MetricRange,
    MetricReport,
    bfi,
    build_curve,
    finite_differences,
    fitness,
    fsdem_score,
    kuncheva_stability,
    nogueira_stability,
    stability_score,
    subsample_observations,
)
from .selectors import SelectorConfig, rank

log = logging.getLogger(__name__)


class RunError(FsdemError):
    pass


def derive_seed(master_seed: int, *parts) -> int:
    """Stable 32-bit seed from the master seed and a run's identifying parts."""
    key = json.dumps([int(master_seed)] + [str(p) for p in parts]).encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:4], "little")


@dataclass(frozen=True)
class DatasetSource:
    dataset_id: str
    path: str = "wealth"
    label_column: object = -1
    categorical_columns: tuple = ()
    wealth_n: int = 500

    def load(self, seed: int = 0) -> Dataset:
        if self.path == "wealth":
            return replace(generate_wealth_dummy(self.wealth_n, seed), dataset_id=self.dataset_id)
        spec = ColumnSpec(label_column=self.label_column, categorical_columns=frozenset(self.categorical_columns))
        return load_csv(self.path, spec, dataset_id=self.dataset_id)


@dataclass(frozen=True)
class BenchmarkConfig:
    datasets: tuple[DatasetSource, ...]
    selectors: tuple[SelectorConfig, ...]
    evaluators: tuple[EvaluatorConfig, ...]
    range: Optional[MetricRange] = None
    stride: int = 1
    repeats: int = 1
    noise: NoiseSpec = NoiseSpec(level=0.1)
    output_dir: str = "results"
    master_seed: int = 0
    workers: int = 1
    record_wall_time: bool = False
    weights: FitnessWeights = FitnessWeights()

    def __post_init__(self):
        if not (self.datasets and self.selectors and self.evaluators):
            raise InvalidInputError("datasets, selectors and evaluators must all be non-empty")
        if self.stride < 1 or self.repeats < 1 or self.workers < 1:
            raise InvalidInputError("stride, repeats and workers must be >= 1")
        for kind, ids in (
            ("dataset", [s.dataset_id for s in self.datasets]),
            ("selector", [s.selector_id for s in self.selectors]),
            ("measure", [e.measure_id for e in self.evaluators]),
        ):
            if len(set(ids)) != len(ids):
                raise InvalidInputError(f"duplicate {kind} ids: {ids}")

    @classmethod
    def from_dict(cls, doc: dict) -> "BenchmarkConfig":
        doc = dict(doc)
        datasets = []
        for entry in doc.pop("datasets", []):
            if isinstance(entry, (list, tuple)):
                entry = {"dataset_id": entry[0], "path": entry[1]}
            entry = dict(entry)
            if "id" in entry:
                entry["dataset_id"] = entry.pop("id")
            if "categorical_columns" in entry:
                entry["categorical_columns"] = tuple(entry["categorical_columns"])
            datasets.append(DatasetSource(**entry))
        selectors = [SelectorConfig(**s) if isinstance(s, dict) else SelectorConfig(s) for s in doc.pop("selectors", [])]
        evaluators = [EvaluatorConfig(**e) if isinstance(e, dict) else EvaluatorConfig(e) for e in doc.pop("evaluators", [])]
        kwargs = {}
        if doc.get("range") is not None:
            kwargs["range"] = MetricRange(**doc.pop("range"))
        doc.pop("range", None)
        if "noise" in doc:
            kwargs["noise"] = NoiseSpec(**doc.pop("noise"))
        if "weights" in doc:
            kwargs["weights"] = FitnessWeights(**doc.pop("weights"))
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise InvalidInputError(f"unknown config keys: {sorted(unknown)}")
        return cls(tuple(datasets), tuple(selectors), tuple(evaluators), **kwargs, **doc)

    @classmethod
    def from_json(cls, path) -> "BenchmarkConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class RunReport:
    dataset_id: str
    selector_id: str
    measure_id: str
    range: MetricRange
    stride: int
    fsdem: float
    stability: float
    bfi: dict
    curve: list
    derivative: list
    seed: int
    nogueira: Optional[float] = None
    kuncheva: Optional[float] = None
    wall_time_ms: Optional[float] = None
    version: str = __version__
    config_fingerprint: str = ""
    warnings: list = field(default_factory=list)

    @property
    def observation_count(self) -> int:
        return len(self.curve)

    @property
    def name(self) -> str:
        return f"{self.dataset_id}__{self.selector_id}__{self.measure_id}"

    def metric_report(self) -> MetricReport:
        return MetricReport(
            self.fsdem, self.stability, self.range, self.measure_id,
            self.selector_id, self.dataset_id, self.observation_count,
        )

    def to_dict(self) -> dict:
        return {
            "dataset_id": self.dataset_id,
            "selector_id": self.selector_id,
            "measure_id": self.measure_id,
            "range": {"a": self.range.a, "b": self.range.b},
            "stride": self.stride,
            "fsdem": self.fsdem,
            "stability": self.stability,
            "bfi": dict(self.bfi),
            "nogueira": self.nogueira,
            "kuncheva": self.kuncheva,
            "curve": [[int(k), float(v)] for k, v in self.curve],
            "derivative": [[int(x), float(s)] for x, s in self.derivative],
            "seed": self.seed,
            "wall_time_ms": self.wall_time_ms,
            "version": self.version,
            "config_fingerprint": self.config_fingerprint,
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "RunReport":
        doc = dict(doc)
        doc["range"] = MetricRange(**doc["range"])
        doc["curve"] = [[int(k), float(v)] for k, v in doc["curve"]]
        doc["derivative"] = [[int(x), float(s)] for x, s in doc["derivative"]]
        return cls(**doc)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _fingerprint(*objs) -> str:
    blob = json.dumps([asdict(o) if hasattr(o, "__dataclass_fields__") else o for o in objs], sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def run_sweep(
    data: Dataset,
    selector: SelectorConfig,
    evaluator: EvaluatorConfig,
    rng: Optional[MetricRange] = None,
    stride: int = 1,
    weights: FitnessWeights = FitnessWeights(),
) -> RunReport:
    """Rank once, observe the measure over the (subsampled) k grid, score it.

    BFI compares the fitness at the best observed k against the full feature
    set (evaluated separately when d lies outside the range).
    """
    t0 = time.perf_counter()
    rng = rng or MetricRange(1, data.d)
    if rng.b > data.d:
        raise InvalidInputError(f"range [{rng.a}, {rng.b}] exceeds d={data.d} for {data.dataset_id}")
    ks = subsample_observations(rng.grid(), stride)
    where = f"dataset={data.dataset_id} selector={selector.selector_id}"
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            ranking = rank(data, selector)
        except Exception as exc:
            raise RunError(f"{where}: ranking failed: {exc}") from exc
        obs = {}
        for k in ks:
            try:
                obs[k] = evaluate(data, ranking.prefix(k), evaluator)
            except Exception as exc:
                raise RunError(f"{where} k={k}: {evaluator.measure_id} failed: {exc}") from exc
        baseline = obs.get(data.d)
        if baseline is None:
            baseline = evaluate(data, list(range(data.d)), evaluator)

    curve = build_curve(obs.items())
    k_best = max(obs, key=lambda k: (obs[k], -k))
    f_sel = fitness(obs[k_best], k_best, data.d, weights)
    f_base = fitness(baseline, data.d, data.d, weights)
    return RunReport(
        dataset_id=data.dataset_id,
        selector_id=selector.selector_id,
        measure_id=evaluator.measure_id,
        range=rng,
        stride=stride,
        fsdem=fsdem_score(curve, rng),
        stability=stability_score(curve, rng),
        bfi={"value": bfi(f_sel, f_base), "k_best": int(k_best), "k_c": weights.k_c, "k_p": weights.k_p},
        curve=[[k, v] for k, v in curve.points],
        derivative=[[x, s] for x, s in finite_differences(curve, rng)],
        seed=int(selector.seed),
        wall_time_ms=(time.perf_counter() - t0) * 1000.0,
        config_fingerprint=_fingerprint(selector, evaluator, [rng.a, rng.b], stride, weights),
        warnings=sorted({str(w.message) for w in caught}),
    )


def selection_matrix(rankings, k: int, d: int) -> np.ndarray:
    z = np.zeros((len(rankings), d), dtype=int)
    for i, r in enumerate(rankings):
        z[i, list(r.order[:k])] = 1
    return z


def run_stability_study(
    data: Dataset, selector: SelectorConfig, repeats: int, noise: NoiseSpec, k: int
) -> tuple[float, float]:
    """Phi-hat and Kuncheva index of the k-prefixes over ``repeats`` noisy copies.

    Noise and selector seeds for repeat r are derived from the given seeds, so
    a randomised selector draws a fresh ranking per repeat.
    """
    if repeats < 2:
        raise InvalidInputError(f"repeats must be >= 2, got {repeats}")
    if not 1 <= k < data.d:
        raise InvalidInputError(f"k must be in [1, d) = [1, {data.d}), got {k}")
    rankings = []
    for r in range(repeats):
        noisy = inject_noise(data, NoiseSpec(noise.level, derive_seed(noise.seed, "noise", r)))
        cfg = replace(selector, seed=derive_seed(selector.seed, "repeat", r))
        rankings.append(rank(noisy, cfg))
    z = selection_matrix(rankings, k, data.d)
    return nogueira_stability(z), kuncheva_stability([r.order for r in rankings], k, data.d)


# -- benchmark ---------------------------------------------------------------

@dataclass(frozen=True)
class _Job:
    index: int
    data: Dataset
    selector: SelectorConfig
    evaluator: EvaluatorConfig
    range: Optional[MetricRange]
    stride: int
    repeats: int
    noise: NoiseSpec
    weights: FitnessWeights
    seed: int


def _execute(job: _Job) -> RunReport:
    report = run_sweep(job.data, job.selector, job.evaluator, job.range, job.stride, job.weights)
    if job.repeats >= 2 and job.data.d >= 2:
        k = max(1, job.data.d // 2)
        noise = replace(job.noise, seed=derive_seed(job.seed, "noise", job.noise.seed))
        report.nogueira, report.kuncheva = run_stability_study(job.data, job.selector, job.repeats, noise, k)
    return report


def _run_job(job: _Job):
    try:
        return job.index, _execute(job), None
    except Exception as exc:  # one failed run must not abort the benchmark
        return job.index, None, f"{type(exc).__name__}: {exc}"


def plan_jobs(config: BenchmarkConfig, loaded: dict) -> list[_Job]:
    jobs = []
    for src in config.datasets:
        for sel in config.selectors:
            for ev in config.evaluators:
                seed = derive_seed(config.master_seed, src.dataset_id, sel.selector_id, ev.measure_id, 0)
                jobs.append(_Job(
                    index=len(jobs),
                    data=loaded.get(src.dataset_id),
                    selector=replace(sel, seed=seed),
                    evaluator=replace(ev, seed=seed),
                    range=config.range,
                    stride=config.stride,
                    repeats=config.repeats,
                    noise=config.noise,
                    weights=config.weights,
                    seed=seed,
                ))
    return jobs


def summarize(reports: list[RunReport], failures: list[dict]) -> dict:
    groups: dict = {}
    for r in reports:
        groups.setdefault((r.measure_id, r.selector_id), []).append(r)
    by_selector = []
    for (measure_id, selector_id), rs in sorted(groups.items()):
        by_selector.append({
            "measure_id": measure_id,
            "selector_id": selector_id,
            "runs": len(rs),
            "mean_fsdem": math.fsum(r.fsdem for r in rs) / len(rs),
            "mean_stability": math.fsum(r.stability for r in rs) / len(rs),
            "mean_bfi": math.fsum(r.bfi["value"] for r in rs) / len(rs),
        })
    return {"runs": len(reports), "failed": len(failures), "by_selector": by_selector, "failures": failures, "version": __version__}


def run_benchmark(config: BenchmarkConfig, workers: Optional[int] = None, write: bool = True):
    """Run the full cross product; returns ``(reports, summary)``.

    Reports come back in config order whatever the pool size. Files are
    written from this process only, as runs complete.
    """
    workers = config.workers if workers is None else workers
    out = Path(config.output_dir)
    loaded, failures = {}, []
    for src in config.datasets:
        try:
            loaded[src.dataset_id] = src.load(derive_seed(config.master_seed, src.dataset_id, "data"))
        except Exception as exc:
            log.error("failed to load %s: %s", src.dataset_id, exc)
            loaded[src.dataset_id] = None
            failures.append({"dataset_id": src.dataset_id, "selector_id": None, "measure_id": None,
                             "error": f"{type(exc).__name__}: {exc}"})
    jobs = [j for j in plan_jobs(config, loaded) if j.data is not None]

    results: dict = {}

    def collect(index, report, error):
        job = jobs_by_index[index]
        if error is not None:
            log.error("run %s/%s/%s failed: %s", job.data.dataset_id, job.selector.selector_id, job.evaluator.measure_id, error)
            failures.append({"dataset_id": job.data.dataset_id, "selector_id": job.selector.selector_id,
                             "measure_id": job.evaluator.measure_id, "error": error})
            return
        if not config.record_wall_time:
            report.wall_time_ms = None
        results[index] = report
        if write:
            write_run(report, out)

    jobs_by_index = {j.index: j for j in jobs}
    if workers <= 1:
        for job in jobs:
            collect(*_run_job(job))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_job, j) for j in jobs]
            for fut in as_completed(futures):
                collect(*fut.result())

    reports = [results[i] for i in sorted(results)]
    failures.sort(key=lambda f: json.dumps(f, sort_keys=True))
    summary = summarize(reports, failures)
    if write:
        write_summary(reports, summary, out)
    return reports, summary


# -- output ------------------------------------------------------------------

SUMMARY_COLUMNS = (
    "dataset_id", "selector_id", "measure_id", "a", "b", "stride", "fsdem", "stability",
    "bfi", "k_best", "nogueira", "kuncheva", "seed", "wall_time_ms",
)


def _summary_row(r: RunReport) -> list:
    return [r.dataset_id, r.selector_id, r.measure_id, r.range.a, r.range.b, r.stride, repr(r.fsdem),
            repr(r.stability), repr(r.bfi["value"]), r.bfi["k_best"],
            "" if r.nogueira is None else repr(r.nogueira),
            "" if r.kuncheva is None else repr(r.kuncheva), r.seed,
            "" if r.wall_time_ms is None else repr(r.wall_time_ms)]


def _write_xy(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows([x, repr(float(y))] for x, y in rows)


def write_run(report: RunReport, output_dir, fmt: str = "json") -> list[Path]:
    """Per-run JSON (when fmt is json) plus the two plot-data CSVs."""
    out = Path(output_dir)
    written = []
    try:
        out.mkdir(parents=True, exist_ok=True)
        if fmt == "json":
            p = out / f"{report.name}.json"
            p.write_text(report.to_json(), encoding="utf-8")
            written.append(p)
        curve = build_curve(report.curve)
        grid = report.range.grid()
        p = out / f"{report.name}__curve.csv"
        _write_xy(p, ("x", "g"), [(x, curve(x)) for x in grid])
        written.append(p)
        p = out / f"{report.name}__derivative.csv"
        _write_xy(p, ("x", "slope"), report.derivative)
        written.append(p)
    except OSError as exc:
        raise FsdemError(f"cannot write report {report.name} under {out}: {exc}") from exc
    return written


def write_summary(reports: list[RunReport], summary: Optional[dict], output_dir) -> list[Path]:
    out = Path(output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        p_csv = out / "summary.csv"
        with open(p_csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(SUMMARY_COLUMNS)
            w.writerows(_summary_row(r) for r in reports)
        written = [p_csv]
        if summary is not None:
            p_json = out / "summary.json"
            p_json.write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
            written.append(p_json)
    except OSError as exc:
        raise FsdemError(f"cannot write summary under {out}: {exc}") from exc
    return written


def emit_report(reports, fmt: str = "json", output_dir="results") -> list[Path]:
    if fmt not in ("json", "csv"):
        raise InvalidInputError(f"format must be json or csv, got {fmt!r}")
    reports = list(reports)
    written = []
    for r in reports:
        written += write_run(r, output_dir, fmt)
    written += write_summary(reports, None, output_dir)
    return written


def load_report(path) -> RunReport:
    with open(path, encoding="utf-8") as fh:
        return RunReport.from_dict(json.load(fh))
