"""位置更新算子

本模块提供 QLSCA 使用的四种搜索算子及其辅助函数:
- 正弦 / 余弦更新 (SCA)
- Lévy 飞行 (Mantegna 步长)
- 单点交叉
- 自适应半径 r1 与吸收墙 (absorbing wall) 越界处理

所有算子都是纯函数, 随机性只来自调用方传入的 numpy Generator。
"""

import math
from dataclasses import dataclass
from enum import IntEnum
from typing import Optional

import numpy as np
import numpy.typing as npt
from scipy.special import gamma as gamma_fn

from ..data.models import TestCase
from ..utils.errors import ConfigurationError, ContractViolation, OperatorError

TWO_PI = 2.0 * math.pi


class OperatorKind(IntEnum):
    """搜索算子 (编码 0..3 同时用作 Q 表下标)"""
    SINE = 0
    COSINE = 1
    LEVY_FLIGHT = 2
    CROSSOVER = 3

    @property
    def column(self) -> str:
        return _COLUMN_NAMES[self]


_COLUMN_NAMES = {
    OperatorKind.SINE: "sine",
    OperatorKind.COSINE: "cosine",
    OperatorKind.LEVY_FLIGHT: "levy",
    OperatorKind.CROSSOVER: "crossover",
}


def mantegna_sigma(beta: float) -> float:
    """Mantegna 算法中 u 的标准差 sigma_u"""
    num = gamma_fn(1.0 + beta) * math.sin(math.pi * beta / 2.0)
    den = gamma_fn((1.0 + beta) / 2.0) * beta * 2.0 ** ((beta - 1.0) / 2.0)
    return abs(num / den) ** (1.0 / beta)


@dataclass(frozen=True)
class ScheduleParams:
    """半径调度与 Lévy 飞行参数"""
    magnitude: float = 3.0
    max_iterations: int = 100
    beta: float = 1.5
    sigma_u: Optional[float] = None
    sigma_v: float = 1.0

    def __post_init__(self):
        if self.magnitude <= 0:
            raise ConfigurationError("magnitude M must be positive",
                                     config_key="magnitude", value=self.magnitude)
        if self.max_iterations < 1:
            raise ConfigurationError("max_iterations T must be at least 1",
                                     config_key="max_iterations", value=self.max_iterations)
        if not 1.0 < self.beta <= 2.0:
            raise ConfigurationError("beta must lie in (1, 2]",
                                     config_key="beta", value=self.beta)

        expected = mantegna_sigma(self.beta)
        if self.sigma_u is None:
            object.__setattr__(self, "sigma_u", expected)
        elif not math.isclose(self.sigma_u, expected, rel_tol=1e-9):
            raise ConfigurationError(f"sigma_u differs from the closed form {expected:.12f}",
                                     config_key="sigma_u", value=self.sigma_u)


def radius(t: int, sched: ScheduleParams) -> float:
    """r1 = M * (1 - t / T)"""
    if not 0 <= t <= sched.max_iterations:
        raise ContractViolation(f"iteration must lie in [0, {sched.max_iterations}]",
                                operation="radius", value=t)
    return sched.magnitude * (1.0 - t / sched.max_iterations)


def round_half_away(values: npt.ArrayLike) -> npt.NDArray[np.float64]:
    values = np.asarray(values, dtype=np.float64)
    return np.sign(values) * np.floor(np.abs(values) + 0.5)


def clamp_absorbing(value: float, cardinality: int) -> int:
    """吸收墙: 四舍五入 (远离零) 后按欧几里得取模绕回 [0, v-1]"""
    if cardinality < 2:
        raise ContractViolation("cardinality must be at least 2",
                                operation="clamp_absorbing", value=cardinality)
    if not math.isfinite(value):
        raise OperatorError("non-finite position reached the clamping rule", value=value)
    return int(round_half_away(value)) % cardinality


def clamp_vector(values: npt.ArrayLike, cardinalities: npt.NDArray[np.int64]) -> TestCase:
    """Vectorised clamp_absorbing over a whole position."""
    values = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise OperatorError("non-finite position reached the clamping rule", value=values)
    # remainder takes the sign of the divisor: Euclidean for v > 0; kept in
    # float so heavy-tailed steps never overflow int64
    return np.mod(round_half_away(values), cardinalities).astype(np.int64)


def sine_cosine_displace(
    x: TestCase,
    best: TestCase,
    r1: float,
    r2: npt.NDArray[np.float64],
    r3: npt.NDArray[np.float64],
    kind: OperatorKind,
) -> npt.NDArray[np.float64]:
    """x + r1 * wave(r2) * |r3 * best - x| with explicit draws (no rounding)."""
    wave = np.sin(r2) if kind is OperatorKind.SINE else np.cos(r2)
    return x + r1 * wave * np.abs(r3 * best - x)


def _sine_cosine_update(x, best, r1, rng, cardinalities, kind) -> TestCase:
    r2 = rng.uniform(0.0, TWO_PI, size=x.shape)
    r3 = rng.uniform(0.0, 2.0, size=x.shape)
    return clamp_vector(sine_cosine_displace(x, best, r1, r2, r3, kind), cardinalities)


def sine_update(
    x: TestCase,
    best: TestCase,
    r1: float,
    rng: np.random.Generator,
    cardinalities: npt.NDArray[np.int64],
) -> TestCase:
    """正弦更新, r2 ~ U[0, 2pi), r3 ~ U[0, 2] 逐维独立抽取"""
    return _sine_cosine_update(x, best, r1, rng, cardinalities, OperatorKind.SINE)


def cosine_update(
    x: TestCase,
    best: TestCase,
    r1: float,
    rng: np.random.Generator,
    cardinalities: npt.NDArray[np.int64],
) -> TestCase:
    """余弦更新, 与正弦更新相同, 只是波形换成 cos(r2)"""
    return _sine_cosine_update(x, best, r1, rng, cardinalities, OperatorKind.COSINE)


def levy_steps(
    rng: np.random.Generator,
    sched: ScheduleParams,
    size: int,
) -> npt.NDArray[np.float64]:
    """Draw `size` independent Lévy steps u / |v|^(1/beta)."""
    u = rng.normal(0.0, sched.sigma_u, size=size)
    v = rng.normal(0.0, sched.sigma_v, size=size)
    zero = v == 0.0
    while np.any(zero):
        # redraw instead of an epsilon guard so the distribution is untouched
        v[zero] = rng.normal(0.0, sched.sigma_v, size=int(zero.sum()))
        zero = v == 0.0
    return u / np.abs(v) ** (1.0 / sched.beta)


def levy_step(rng: np.random.Generator, sched: ScheduleParams) -> float:
    """单个 Lévy 飞行步长 (重尾, 无界)"""
    return float(levy_steps(rng, sched, 1)[0])


def levy_update(
    x: TestCase,
    rng: np.random.Generator,
    sched: ScheduleParams,
    cardinalities: npt.NDArray[np.int64],
    steps: Optional[npt.NDArray[np.float64]] = None,
) -> TestCase:
    """Lévy 飞行更新: 每一维加上独立步长后取整并绕回"""
    if steps is None:
        steps = levy_steps(rng, sched, x.shape[0])
    return clamp_vector(x + steps, cardinalities)


def crossover_update(
    xi: TestCase,
    xj: TestCase,
    rng: np.random.Generator,
    cut: Optional[int] = None,
) -> TestCase:
    """单点交叉: 位置 [0, cut) 取自 xj, 其余保留 xi; cut ~ U{0..k}"""
    k = xi.shape[0]
    if cut is None:
        cut = int(rng.integers(0, k + 1))
    elif not 0 <= cut <= k:
        raise ContractViolation(f"crossover cut must lie in [0, {k}]",
                                operation="crossover_update", value=cut)
    return np.concatenate((xj[:cut], xi[cut:])).astype(np.int64)
