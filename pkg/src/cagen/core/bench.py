"""基准测试模块

按固定种子重复运行 SCA / QLSCA, 统计最优、平均尺寸及算子使用比例,
并与内置参考表中的已发表数值对照。多次运行之间互相独立,
通过信号量限制并发, 在进程池中执行; 结果按运行序号汇总。
"""

import asyncio
import fnmatch
import json
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..config import get_settings
from ..data.models import CAConfig
from ..utils import get_logger
from ..utils.errors import BenchmarkError, ConfigurationError
from .engine import EngineConfig, RunReport, Strategy, generate
from .notation import parse_ca_notation
from .operators import OperatorKind
from .suite_io import SUMMARY_COLUMNS, runs_frame, write_frame_csv, write_trace_csv
from .verify import verify_suite

logger = get_logger(__name__)

DEFAULT_STRATEGIES: Tuple[Strategy, ...] = (Strategy.SCA, Strategy.QLSCA)


@dataclass
class BenchmarkSpec:
    """一个基准测试配置"""
    name: str
    config: CAConfig
    repetitions: int = 30
    strategies: Tuple[Strategy, ...] = DEFAULT_STRATEGIES
    base_seed: int = 20190101
    reference_values: Dict[str, Tuple[int, float]] = field(default_factory=dict)
    group: Optional[str] = None
    notes: Optional[str] = None

    def __post_init__(self):
        if self.repetitions < 1:
            raise ConfigurationError("repetitions must be at least 1",
                                     config_key="repetitions", value=self.repetitions)
        if not self.strategies:
            raise ConfigurationError("at least one strategy is required", config_key="strategies")
        # dedupe, keep order
        self.strategies = tuple(dict.fromkeys(Strategy(s) for s in self.strategies))

    def seed_for(self, run_index: int) -> int:
        return self.base_seed + run_index

    @property
    def slug(self) -> str:
        """File-system friendly identifier."""
        body = "".join(ch if ch.isalnum() else "_" for ch in self.name).strip("_")
        while "__" in body:
            body = body.replace("__", "_")
        return f"{self.group}-{body}" if self.group else body


@dataclass
class StrategySummary:
    """Aggregates of one strategy's runs, ordered by run index."""
    strategy: Strategy
    runs: List[RunReport]
    best_size: int
    mean_size: float
    std_dev: float
    total_size: int
    mean_wall_millis: float
    operator_fractions: Dict[OperatorKind, float]
    reference: Optional[Tuple[int, float]] = None

    @property
    def matches_reference(self) -> Optional[bool]:
        """True when the measured best matches or beats the published best."""
        if self.reference is None:
            return None
        return self.best_size <= self.reference[0]


@dataclass
class BenchmarkResult:
    spec: BenchmarkSpec
    summaries: Dict[Strategy, StrategySummary]

    def __getitem__(self, strategy: Strategy) -> StrategySummary:
        return self.summaries[Strategy(strategy)]


# ----------------------------------------------------------------------
# builtin suites


@lru_cache(maxsize=1)
def load_reference_tables() -> Dict[str, Any]:
    """Published best/mean sizes bundled with the package."""
    text = resources.files("cagen.data").joinpath("reference_tables.json").read_text(encoding="utf-8")
    return json.loads(text)


def reference_groups() -> List[str]:
    return [group["id"] for group in load_reference_tables()["groups"]]


def builtin_suites(repetitions: Optional[int] = None, base_seed: Optional[int] = None) -> List[BenchmarkSpec]:
    """返回全部内置基准配置 (含已发表的参考数值)"""
    settings = get_settings()
    repetitions = repetitions if repetitions is not None else settings.repetitions
    base_seed = base_seed if base_seed is not None else settings.base_seed

    specs = []
    for group in load_reference_tables()["groups"]:
        for row in group["rows"]:
            specs.append(BenchmarkSpec(
                name=row["name"],
                config=parse_ca_notation(row["name"]),
                repetitions=repetitions,
                base_seed=base_seed,
                reference_values={k: (int(v[0]), float(v[1])) for k, v in row["reference"].items()},
                group=group["id"],
                notes=row.get("notes"),
            ))
    return specs


def find_suite(name: str, group: Optional[str] = None) -> BenchmarkSpec:
    """Look a builtin suite up by name; the first group listing it wins unless one is given."""
    wanted = "".join(name.split()).upper().replace("N;", "").replace("N,", "")
    for spec in builtin_suites():
        if group is not None and spec.group != group:
            continue
        if "".join(spec.name.split()).upper() == wanted:
            return spec
    raise ConfigurationError(f"no builtin suite named {name!r}", config_key="suite", value=group)


def filter_suites(specs: Sequence[BenchmarkSpec], pattern: Optional[str]) -> List[BenchmarkSpec]:
    """Keep specs whose name or slug matches a shell-style pattern."""
    if not pattern:
        return list(specs)
    return [s for s in specs
            if fnmatch.fnmatchcase(s.name, pattern) or fnmatch.fnmatchcase(s.slug, pattern)]


# ----------------------------------------------------------------------
# execution


@dataclass(frozen=True)
class _RunJob:
    benchmark: str
    config: CAConfig
    engine: EngineConfig
    strategy: Strategy
    run_index: int


def _execute_run(job: _RunJob) -> Tuple[RunReport, int]:
    """Worker entry point: one generate call plus its independent verification."""
    report = generate(job.config, job.engine, job.strategy)
    missing = verify_suite(report.suite).missing_count
    return report, missing


def _summarize(spec: BenchmarkSpec, strategy: Strategy, runs: List[RunReport]) -> StrategySummary:
    sizes = [r.size for r in runs]
    total = sum(sizes)
    counts = {kind: sum(r.operator_counts.get(kind, 0) for r in runs) for kind in OperatorKind}
    operations = sum(counts.values())
    return StrategySummary(
        strategy=strategy,
        runs=runs,
        best_size=min(sizes),
        mean_size=total / len(sizes),
        std_dev=float(np.std(sizes, ddof=1)) if len(sizes) > 1 else 0.0,
        total_size=total,
        mean_wall_millis=sum(r.wall_millis for r in runs) / len(runs),
        operator_fractions={k: (n / operations if operations else 0.0) for k, n in counts.items()},
        reference=spec.reference_values.get(strategy.name),
    )


class BenchmarkRunner:
    """Runs every (strategy, repetition) of a spec with bounded concurrency."""

    def __init__(self, parallelism: int = 1, engine: Optional[EngineConfig] = None):
        if parallelism < 1:
            raise ConfigurationError("parallelism must be at least 1",
                                     config_key="parallel", value=parallelism)
        self.parallelism = parallelism
        self.engine = engine or EngineConfig.from_settings(seed=0)

    def _jobs(self, spec: BenchmarkSpec) -> List[_RunJob]:
        return [
            _RunJob(spec.name, spec.config, replace(self.engine, seed=spec.seed_for(i)), strategy, i)
            for strategy in spec.strategies
            for i in range(spec.repetitions)
        ]

    async def _run_job(self, job: _RunJob, semaphore: asyncio.Semaphore,
                       executor: Executor) -> Tuple[RunReport, int]:
        async with semaphore:
            loop = asyncio.get_running_loop()
            return await loop.run_in_executor(executor, _execute_run, job)

    async def run_async(self, spec: BenchmarkSpec) -> BenchmarkResult:
        jobs = self._jobs(spec)
        logger.info(f"Benchmark {spec.name}: {len(jobs)} runs, parallelism {self.parallelism}")

        if self.parallelism == 1:
            outcomes = [_execute_run(job) for job in jobs]
        else:
            semaphore = asyncio.Semaphore(self.parallelism)
            with ProcessPoolExecutor(max_workers=self.parallelism) as executor:
                outcomes = await asyncio.gather(
                    *(self._run_job(job, semaphore, executor) for job in jobs))

        # gather preserves submission order, so runs stay keyed by index
        per_strategy: Dict[Strategy, List[RunReport]] = {s: [] for s in spec.strategies}
        for job, (report, missing) in zip(jobs, outcomes):
            if missing:
                raise BenchmarkError(
                    f"{job.strategy.value} run {job.run_index} left {missing} tuples uncovered",
                    benchmark=spec.name, run_index=job.run_index)
            per_strategy[job.strategy].append(report)

        summaries = {s: _summarize(spec, s, runs) for s, runs in per_strategy.items()}
        for s, summary in summaries.items():
            logger.info(f"{spec.name} {s.value}: best {summary.best_size}, "
                        f"mean {summary.mean_size:.2f}, std {summary.std_dev:.2f}")
        return BenchmarkResult(spec, summaries)


def run_benchmark(
    spec: BenchmarkSpec,
    parallelism: int = 1,
    engine: Optional[EngineConfig] = None,
) -> BenchmarkResult:
    """执行基准测试; 结果与并行度无关, 只由 base_seed 决定"""
    return asyncio.run(BenchmarkRunner(parallelism, engine).run_async(spec))


# ----------------------------------------------------------------------
# reporting


def summary_frame(results: Sequence[BenchmarkResult]) -> pd.DataFrame:
    """汇总表: 每个 (benchmark, strategy) 一行, 附参考值与算子比例"""
    rows = []
    for result in results:
        for strategy, s in result.summaries.items():
            ref_best, ref_mean = s.reference if s.reference else (None, None)
            rows.append({
                "benchmark": result.spec.name,
                "strategy": strategy.value,
                "best": s.best_size,
                "mean": round(s.mean_size, 4),
                "std": round(s.std_dev, 4),
                "reference_best": ref_best,
                "reference_mean": ref_mean,
                "group": result.spec.group,
                "matches_reference": s.matches_reference,
                "mean_wall_millis": round(s.mean_wall_millis, 1),
                **{f"frac_{k.column}": round(v, 4) for k, v in s.operator_fractions.items()},
            })
    frame = pd.DataFrame(rows)
    if frame.empty:
        return pd.DataFrame(columns=SUMMARY_COLUMNS)
    for column in ("reference_best", "reference_mean"):
        frame[column] = frame[column].astype("Float64" if column == "reference_mean" else "Int64")
    return frame


def write_benchmark_outputs(
    result: BenchmarkResult,
    out_dir: Path,
    timing: bool = True,
    trace: bool = False,
) -> Path:
    """Write the per-run CSV (and traces on request); returns the per-run path."""
    out_dir = Path(out_dir)
    spec = result.spec
    runs = [(i, report)
            for summary in result.summaries.values()
            for i, report in enumerate(summary.runs)]
    path = write_frame_csv(runs_frame(runs, timing=timing), out_dir / "runs" / f"{spec.slug}.csv")
    if trace:
        for i, report in runs:
            write_trace_csv(report, out_dir / "traces" / spec.slug / f"{report.strategy.value}-{i:03d}.csv")
    return path
