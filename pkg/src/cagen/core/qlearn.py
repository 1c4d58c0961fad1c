"""Q 学习模块

4x4 的 Q 表 (行为状态, 列为动作, 都是四种搜索算子),
以及奖励、学习率调度和 Q 值更新规则。执行的动作即成为下一个状态。
"""

from typing import Optional, Tuple

import numpy as np
import numpy.typing as npt

from ..utils import get_logger
from ..utils.errors import ConfigurationError, ContractViolation
from .operators import OperatorKind

logger = get_logger(__name__)

N_OPERATORS = len(OperatorKind)


class QTable:
    """算子选择用的 Q 表"""

    def __init__(
        self,
        gamma: float = 0.8,
        state: OperatorKind = OperatorKind.SINE,
        q: Optional[npt.ArrayLike] = None,
    ):
        if not 0.0 <= gamma <= 1.0:
            raise ConfigurationError("gamma must lie in [0, 1]", config_key="gamma", value=gamma)
        self.gamma = gamma
        self.state = OperatorKind(state)
        if q is None:
            self.q = np.zeros((N_OPERATORS, N_OPERATORS), dtype=np.float64)
        else:
            self.q = np.array(q, dtype=np.float64)
            if self.q.shape != (N_OPERATORS, N_OPERATORS):
                raise ConfigurationError("Q table must be 4x4", config_key="q", value=self.q.shape)

    def reset(self, rng: np.random.Generator) -> None:
        """清零并随机选择初始状态"""
        self.q.fill(0.0)
        self.state = OperatorKind(int(rng.integers(N_OPERATORS)))

    def snapshot(self) -> Tuple[float, ...]:
        """Row-major copy of the 16 entries."""
        return tuple(float(v) for v in self.q.ravel())

    def __repr__(self) -> str:
        return f"QTable(state={self.state.name}, gamma={self.gamma}, q={self.q.tolist()})"


def alpha(t: int, T: int) -> float:
    """学习率 alpha_t = 1 - 0.9 * t / T, 从 1.0 线性降到 0.1"""
    if T < 1 or not 0 <= t <= T:
        raise ContractViolation(f"iteration must lie in [0, {T}]", operation="alpha", value=t)
    return 1.0 - 0.9 * (t / T)


def reward(old_fitness: int, new_fitness: int) -> float:
    """适应度严格提升奖励 +1, 否则惩罚 -1"""
    return 1.0 if new_fitness > old_fitness else -1.0


def update(
    table: QTable,
    s: OperatorKind,
    a: OperatorKind,
    r: float,
    alpha: float,
) -> float:
    """Q(s,a) += alpha * (r + gamma * max Q(a, .) - Q(s,a)); 状态转移到 a

    Returns:
        更新后的 Q(s, a)
    """
    lookahead = table.q[a].max()
    current = table.q[s, a]
    table.q[s, a] = current + alpha * (r + table.gamma * lookahead - current)
    table.state = OperatorKind(a)
    return float(table.q[s, a])


def best_action(table: QTable, s: OperatorKind, rng: np.random.Generator) -> OperatorKind:
    """取 Q(s, .) 最大的动作, 并列时均匀随机打破"""
    row = table.q[s]
    candidates = np.flatnonzero(row == row.max())
    if candidates.size == 1:
        return OperatorKind(int(candidates[0]))
    return OperatorKind(int(candidates[rng.integers(candidates.size)]))
