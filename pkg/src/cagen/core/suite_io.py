"""CSV 读写模块

- 测试集: 表头 p0,...,p{k-1}, 每行一个测试用例 (0 起始取值)
- 收敛轨迹: round, iteration, best_fitness (可选 q_<状态>_<动作> 列)
- 基准测试逐次运行结果与汇总表
"""

import io
import re
from pathlib import Path
from typing import Iterable, List, Tuple, Union

import pandas as pd

from ..data.models import CAConfig, TestSuite
from ..utils import get_logger
from ..utils.errors import SuiteFormatError
from .engine import RunReport
from .operators import OperatorKind

logger = get_logger(__name__)

PathLike = Union[str, Path]

RUN_COLUMNS = [
    "run_index", "strategy", "seed", "size", "wall_millis", "rounds", "fallback_count",
    *(f"op_{kind.column}" for kind in OperatorKind),
]
SUMMARY_COLUMNS = [
    "benchmark", "strategy", "best", "mean", "std", "reference_best", "reference_mean",
]
Q_COLUMNS = [f"q_{s.column}_{a.column}" for s in OperatorKind for a in OperatorKind]
INTEGER = re.compile(r"[+-]?\d+")


def suite_header(k: int) -> List[str]:
    return [f"p{i}" for i in range(k)]


def write_suite_csv(suite: TestSuite, path: PathLike) -> Path:
    """Write one row per test case under a p0..p{k-1} header."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(suite.as_array(), columns=suite_header(suite.config.k))
    frame.to_csv(path, index=False, lineterminator="\n")
    logger.debug(f"Wrote {suite.size} rows to {path}")
    return path


def read_suite_csv(path: PathLike, cfg: CAConfig) -> TestSuite:
    """读取测试集 CSV

    表头宽度必须等于 k, 单元格必须是整数; 越界的整数与宽度不符的行原样保留,
    交给 verify_suite 报告为结构性错误。

    Raises:
        SuiteFormatError: 文件缺失、表头不符或存在非整数单元格
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError as e:
        raise SuiteFormatError("suite file not found", path=str(path)) from e

    # (1-based line number, raw line) of every non-blank line
    lines = [(n, line) for n, line in enumerate(text.splitlines(), start=1) if line.strip()]
    if not lines:
        raise SuiteFormatError("suite file is empty", path=str(path), line=1)

    expected = suite_header(cfg.k)
    header_line, header = lines[0]
    found = [c.strip() for c in header.split(",")]
    if found != expected:
        raise SuiteFormatError(f"header must be {','.join(expected)}, found {header.strip()}",
                               path=str(path), line=header_line)

    suite = TestSuite(cfg)
    body = lines[1:]
    if not body:
        return suite

    widths = [line.count(",") + 1 for _, line in body]
    try:
        frame = pd.read_csv(io.StringIO("\n".join(line for _, line in body)), header=None,
                            names=range(max(widths)), dtype=str, keep_default_na=False,
                            skipinitialspace=True, skip_blank_lines=False)
    except pd.errors.ParserError as e:
        raise SuiteFormatError(f"malformed CSV: {e}", path=str(path)) from e

    for (lineno, _), width, values in zip(body, widths, frame.itertuples(index=False, name=None)):
        cells = [str(v).strip() for v in values[:width]]
        if not all(INTEGER.fullmatch(c) for c in cells):
            raise SuiteFormatError("non-integer cell", path=str(path), line=lineno)
        suite.append([int(c) for c in cells])
    return suite


def trace_frame(report: RunReport) -> pd.DataFrame:
    """Convergence trace as a DataFrame; Q columns only when every point has a snapshot."""
    points = report.convergence
    frame = pd.DataFrame(
        [(p.round, p.iteration, p.best_fitness) for p in points],
        columns=["round", "iteration", "best_fitness"],
    )
    if points and all(p.q is not None for p in points):
        frame = pd.concat([frame, pd.DataFrame([p.q for p in points], columns=Q_COLUMNS)], axis=1)
    return frame


def write_trace_csv(report: RunReport, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    trace_frame(report).to_csv(path, index=False, lineterminator="\n")
    return path


def runs_frame(runs: Iterable[Tuple[int, RunReport]], timing: bool = True) -> pd.DataFrame:
    """One row per (run_index, report); wall_millis is 0 when timing is off."""
    rows = []
    for run_index, report in runs:
        rows.append([
            run_index,
            report.strategy.value,
            report.seed,
            report.size,
            report.wall_millis if timing else 0,
            report.rounds,
            report.fallback_count,
            *(report.operator_counts.get(kind, 0) for kind in OperatorKind),
        ])
    return pd.DataFrame(rows, columns=RUN_COLUMNS)


def write_frame_csv(frame: pd.DataFrame, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, lineterminator="\n")
    return path


def read_runs_csv(path: PathLike) -> pd.DataFrame:
    """读取逐次运行结果, 至少需要 strategy / run_index / size 三列"""
    path = Path(path)
    try:
        frame = pd.read_csv(path)
    except FileNotFoundError as e:
        raise SuiteFormatError("per-run file not found", path=str(path)) from e
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as e:
        raise SuiteFormatError(f"unreadable per-run CSV: {e}", path=str(path)) from e

    missing = [c for c in ("run_index", "strategy", "size") if c not in frame.columns]
    if missing:
        raise SuiteFormatError(f"per-run CSV lacks columns {missing}", path=str(path), line=1)
    if not pd.api.types.is_numeric_dtype(frame["size"]):
        raise SuiteFormatError("size column must be numeric", path=str(path))
    frame["strategy"] = frame["strategy"].astype(str).str.lower()
    return frame
