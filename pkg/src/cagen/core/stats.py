"""统计检验模块

- Wilcoxon 秩和检验 (中位秩处理并列, 并列修正方差, 正态近似加连续性修正)
- Bonferroni-Holm 逐步下降多重比较校正
- 控制策略与其他策略的两两比较 (逐次运行结果或内置参考表)
"""

from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.stats import norm, rankdata

from ..utils import get_logger
from ..utils.errors import ConfigurationError, StatisticsError
from .bench import load_reference_tables

logger = get_logger(__name__)

DEFAULT_ALPHAS = (0.05, 0.10)
MIN_SAMPLE = 10


class RankSumResult(NamedTuple):
    statistic: float
    p_value: float


@dataclass(frozen=True)
class HolmDecision:
    label: str
    p_value: float
    threshold: float
    reject: bool


def _sample(values: Sequence[float], name: str) -> np.ndarray:
    array = np.asarray(values, dtype=np.float64).ravel()
    if array.size == 0:
        raise StatisticsError(f"sample {name} is empty", reason="empty sample")
    if not np.all(np.isfinite(array)):
        raise StatisticsError(f"sample {name} contains non-finite values", reason="non-finite")
    return array


def wilcoxon_rank_sum(a: Sequence[float], b: Sequence[float]) -> RankSumResult:
    """双侧 Wilcoxon 秩和检验

    Returns:
        (z, p): z 为连续性修正后的标准化统计量, 交换 a 与 b 时变号
    """
    x, y = _sample(a, "a"), _sample(b, "b")
    n1, n2 = x.size, y.size
    if n1 < MIN_SAMPLE or n2 < MIN_SAMPLE:
        logger.warning(f"rank-sum test on small samples ({n1}, {n2}); "
                       f"the normal approximation is rough below {MIN_SAMPLE}")

    n = n1 + n2
    ranks = rankdata(np.concatenate((x, y)))
    u1 = ranks[:n1].sum() - n1 * (n1 + 1) / 2.0
    mu = n1 * n2 / 2.0

    _, tie_counts = np.unique(ranks, return_counts=True)
    tie_term = float((tie_counts ** 3 - tie_counts).sum())
    variance = n1 * n2 / 12.0 * ((n + 1) - tie_term / (n * (n - 1)))
    if variance <= 0.0:
        # every value identical
        return RankSumResult(0.0, 1.0)

    delta = u1 - mu
    z = (delta - 0.5 * np.sign(delta)) / np.sqrt(variance)
    p = min(1.0, 2.0 * float(norm.sf(abs(z))))
    return RankSumResult(float(z), p)


def bonferroni_holm(p_values: Sequence[Tuple[str, float]], alpha: float = 0.05) -> List[HolmDecision]:
    """Holm 逐步下降: 第 i 小的 p 与 alpha/(m-i+1) 比较, 首次不拒绝后全部不拒绝

    Output is in ascending p order (stable on ties).
    """
    if not 0.0 < alpha < 1.0:
        raise ConfigurationError("alpha must lie in (0, 1)", config_key="alpha", value=alpha)
    ordered = sorted(p_values, key=lambda item: item[1])
    m = len(ordered)
    decisions = []
    rejecting = True
    for i, (label, p) in enumerate(ordered, start=1):
        threshold = alpha / (m - i + 1)
        rejecting = rejecting and p <= threshold
        decisions.append(HolmDecision(label, float(p), threshold, rejecting))
    return decisions


COMPARISON_COLUMNS = [
    "comparison", "control", "other", "n_control", "n_other", "statistic", "p_value",
    "alpha", "holm_threshold", "reject",
]


@dataclass(frozen=True)
class _PairTest:
    control: str
    other: str
    n_control: int
    n_other: int
    result: RankSumResult


def _holm_frame(tests: Dict[str, _PairTest], alphas: Sequence[float]) -> pd.DataFrame:
    rows = []
    for alpha in alphas:
        for d in bonferroni_holm([(label, t.result.p_value) for label, t in tests.items()], alpha):
            t = tests[d.label]
            rows.append([d.label, t.control, t.other, t.n_control, t.n_other,
                         t.result.statistic, t.result.p_value, alpha, d.threshold, d.reject])
    return pd.DataFrame(rows, columns=COMPARISON_COLUMNS)


def compare_strategies(
    runs: pd.DataFrame,
    control: str = "qlsca",
    alphas: Sequence[float] = DEFAULT_ALPHAS,
    metric: str = "size",
) -> pd.DataFrame:
    """Control strategy against every other strategy of a per-run table."""
    if metric not in runs.columns:
        raise StatisticsError(f"per-run table has no column {metric!r}", reason="missing metric")
    control = control.lower()
    samples = {str(name).lower(): group.sort_values("run_index")[metric].to_numpy(dtype=np.float64)
               for name, group in runs.groupby("strategy", sort=True)}
    if control not in samples:
        raise StatisticsError(f"control strategy {control!r} has no runs", reason="missing control")
    if len(samples) < 2:
        raise StatisticsError("need at least two strategies to compare", reason="single strategy")

    tests = {
        f"{control} vs {other}": _PairTest(control, other, samples[control].size, values.size,
                                           wilcoxon_rank_sum(samples[control], values))
        for other, values in samples.items() if other != control
    }
    return _holm_frame(tests, alphas)


def compare_reference_table(
    group_id: str,
    alphas: Sequence[float] = DEFAULT_ALPHAS,
    control: str = "QLSCA",
) -> pd.DataFrame:
    """QLSCA 已发表的最优尺寸作为控制组, 与同组其他策略逐一做秩和检验并 Holm 校正

    Each pair only uses rows where both strategies report a value.
    """
    groups = {g["id"]: g for g in load_reference_tables()["groups"]}
    if group_id not in groups:
        raise StatisticsError(f"unknown reference group {group_id!r}; known: {sorted(groups)}",
                              reason="unknown group")
    group = groups[group_id]

    tests: Dict[str, _PairTest] = {}
    for other in group["strategies"]:
        if other == control:
            continue
        paired = [(r["reference"][control][0], r["reference"][other][0])
                  for r in group["rows"] if control in r["reference"] and other in r["reference"]]
        if not paired:
            continue
        ctrl, oth = zip(*paired)
        tests[f"{control} vs {other}"] = _PairTest(control, other, len(ctrl), len(oth),
                                                   wilcoxon_rank_sum(ctrl, oth))
    return _holm_frame(tests, alphas)
