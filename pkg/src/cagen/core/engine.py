"""搜索引擎模块

基线 SCA 与 QLSCA 两种搜索驱动:
- 种群管理与精英保留
- 探索/利用门控 (阈值 1/sqrt(iteration))
- Q 学习选择算子的完整 episode 与单步利用
- 贪心逐行构造测试集, 直到所有交互元组被覆盖
"""

import math
import time
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np
import numpy.typing as npt

from ..config import Settings, get_settings
from ..data.models import CAConfig, TestCase, TestSuite
from ..data.tuple_store import TupleStore, fitness, remove_covered
from ..utils import get_logger
from ..utils.errors import ConfigurationError, ContractViolation
from .operators import (
    OperatorKind,
    ScheduleParams,
    cosine_update,
    crossover_update,
    levy_update,
    radius,
    sine_update,
)
from .qlearn import QTable, alpha, best_action, reward, update
from .tuplegen import build_store

logger = get_logger(__name__)


class Strategy(str, Enum):
    """Row-search strategy."""
    SCA = "sca"
    QLSCA = "qlsca"


@dataclass
class EngineConfig:
    """引擎参数 (默认: 种群 40, 迭代 100, M=3, gamma=0.8)"""
    population_size: int = 40
    max_iterations: int = 100
    sched: Optional[ScheduleParams] = None
    gamma: float = 0.8
    seed: int = 0
    qtable_reset_per_round: bool = False
    early_exit: bool = True
    record_qtable: bool = False
    lookahead_rows: int = 1024

    def __post_init__(self):
        if self.population_size < 2:
            raise ConfigurationError("population_size must be at least 2 (crossover needs a partner)",
                                     config_key="population_size", value=self.population_size)
        if self.max_iterations < 1:
            raise ConfigurationError("max_iterations must be at least 1",
                                     config_key="max_iterations", value=self.max_iterations)
        if self.lookahead_rows < 0:
            raise ConfigurationError("lookahead_rows must be non-negative",
                                     config_key="lookahead_rows", value=self.lookahead_rows)
        if not 0.0 <= self.gamma <= 1.0:
            raise ConfigurationError("gamma must lie in [0, 1]",
                                     config_key="gamma", value=self.gamma)
        if self.sched is None:
            self.sched = ScheduleParams(max_iterations=self.max_iterations)
        elif self.sched.max_iterations != self.max_iterations:
            raise ConfigurationError("schedule and engine disagree on max_iterations",
                                     config_key="sched", value=self.sched.max_iterations)

    @classmethod
    def from_settings(cls, seed: int, settings: Optional[Settings] = None, **overrides) -> "EngineConfig":
        """Build an EngineConfig from application settings; keyword overrides win."""
        settings = settings or get_settings()
        values = {
            "population_size": settings.population_size,
            "max_iterations": settings.max_iterations,
            "gamma": settings.gamma,
            "qtable_reset_per_round": settings.qtable_reset_per_round,
            "early_exit": settings.early_exit,
            "record_qtable": settings.record_qtable,
            "lookahead_rows": settings.lookahead_rows,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        magnitude = values.pop("magnitude", settings.magnitude)
        beta = values.pop("beta", settings.levy_beta)
        values["sched"] = ScheduleParams(magnitude=magnitude,
                                         max_iterations=values["max_iterations"],
                                         beta=beta)
        return cls(seed=seed, **values)


@dataclass
class Population:
    """种群及迄今最优解"""
    members: npt.NDArray[np.int64]
    fitness: npt.NDArray[np.int64]
    best: TestCase
    best_fitness: int
    # distinct rows seen at best_fitness, ties[0] is best
    ties: List[TestCase] = field(default_factory=list)

    MAX_TIES = 16

    @classmethod
    def random(cls, store: TupleStore, size: int, rng: np.random.Generator) -> "Population":
        cards = store.config.cardinality_array
        members = rng.integers(0, cards, size=(size, store.config.k), dtype=np.int64)
        fitness = store.fitness_many(members)
        top = int(np.argmax(fitness))
        pop = cls(members, fitness, members[top].copy(), int(fitness[top]))
        for i in np.flatnonzero(fitness == fitness[top]):
            pop._tie(members[i])
        return pop

    def __len__(self) -> int:
        return self.members.shape[0]

    def _tie(self, position: TestCase) -> None:
        if len(self.ties) >= self.MAX_TIES:
            return
        if any(np.array_equal(position, row) for row in self.ties):
            return
        self.ties.append(position.copy())

    def consider(self, i: int, position: TestCase, fit: int) -> None:
        """Replace member i and refresh the elite."""
        self.members[i] = position
        self.fitness[i] = fit
        if fit > self.best_fitness:
            self.best = position.copy()
            self.best_fitness = int(fit)
            self.ties = [self.best.copy()]
        elif fit == self.best_fitness:
            self._tie(position)


@dataclass(frozen=True)
class ConvergencePoint:
    round: int
    iteration: int
    best_fitness: int
    q: Optional[Tuple[float, ...]] = None


@dataclass
class RunReport:
    """单次 generate 的结果与观测量"""
    suite: TestSuite
    size: int
    wall_millis: int
    convergence: List[ConvergencePoint]
    operator_counts: Dict[OperatorKind, int]
    seed: int
    strategy: Strategy
    rounds: int = 0
    fallback_count: int = 0
    round_fitness: List[int] = field(default_factory=list)

    @property
    def total_operations(self) -> int:
        return sum(self.operator_counts.values())

    @property
    def operator_fractions(self) -> Dict[OperatorKind, float]:
        total = self.total_operations
        return {kind: (n / total if total else 0.0) for kind, n in self.operator_counts.items()}


class _Recorder:
    """Collects convergence points and operator usage during a run."""

    def __init__(self, record_qtable: bool = False):
        self.record_qtable = record_qtable
        self.round = 0
        self.counts = np.zeros(len(OperatorKind), dtype=np.int64)
        self.points: List[ConvergencePoint] = []

    def point(self, iteration: int, best_fitness: int, table: Optional[QTable] = None) -> None:
        q = table.snapshot() if (self.record_qtable and table is not None) else None
        self.points.append(ConvergencePoint(self.round, iteration, int(best_fitness), q))


# ----------------------------------------------------------------------
# QLSCA building blocks


def explore_gate(iteration: int, rng: np.random.Generator) -> bool:
    """以概率 min(1, 1/sqrt(iteration)) 进入探索模式"""
    if iteration < 1:
        raise ContractViolation("iterations are 1-based", operation="explore_gate", value=iteration)
    return bool(rng.random() < 1.0 / math.sqrt(iteration))


def apply_operator(
    kind: OperatorKind,
    pop: Population,
    i: int,
    r1: float,
    rng: np.random.Generator,
    sched: ScheduleParams,
    cardinalities: npt.NDArray[np.int64],
) -> TestCase:
    """Apply one operator to member i and return the new position."""
    x = pop.members[i]
    if kind is OperatorKind.SINE:
        return sine_update(x, pop.best, r1, rng, cardinalities)
    if kind is OperatorKind.COSINE:
        return cosine_update(x, pop.best, r1, rng, cardinalities)
    if kind is OperatorKind.LEVY_FLIGHT:
        return levy_update(x, rng, sched, cardinalities)
    # partner drawn uniformly from the other members
    j = int(rng.integers(len(pop) - 1))
    if j >= i:
        j += 1
    return crossover_update(x, pop.members[j], rng)


def _transition(
    pop: Population,
    i: int,
    table: QTable,
    s: OperatorKind,
    store: TupleStore,
    r1: float,
    rng: np.random.Generator,
    learning_rate: float,
    sched: ScheduleParams,
    counts: npt.NDArray[np.int64],
) -> float:
    a = best_action(table, s, rng)
    position = apply_operator(a, pop, i, r1, rng, sched, store.config.cardinality_array)
    new_fitness = store.fitness(position)
    r = reward(int(pop.fitness[i]), new_fitness)
    update(table, s, a, r, learning_rate)
    pop.consider(i, position, new_fitness)
    counts[a] += 1
    return r


def explore_episode(
    pop: Population,
    table: QTable,
    store: TupleStore,
    r1: float,
    rng: np.random.Generator,
    *,
    member: int = 0,
    learning_rate: float = 1.0,
    sched: Optional[ScheduleParams] = None,
    counts: Optional[npt.NDArray[np.int64]] = None,
) -> List[float]:
    """完整 episode: 以随机顺序遍历四个状态, 每个状态一次选择/执行/更新

    Returns:
        四次转移各自的奖励
    """
    sched = sched or ScheduleParams()
    counts = counts if counts is not None else np.zeros(len(OperatorKind), dtype=np.int64)
    rewards = []
    for s in rng.permutation(len(OperatorKind)):
        state = OperatorKind(int(s))
        table.state = state
        rewards.append(_transition(pop, member, table, state, store, r1, rng,
                                   learning_rate, sched, counts))
    return rewards


def exploit_step(
    pop: Population,
    table: QTable,
    store: TupleStore,
    r1: float,
    rng: np.random.Generator,
    *,
    member: int = 0,
    learning_rate: float = 1.0,
    sched: Optional[ScheduleParams] = None,
    counts: Optional[npt.NDArray[np.int64]] = None,
) -> float:
    """单步利用: 从当前状态出发做一次转移, 返回奖励"""
    sched = sched or ScheduleParams()
    counts = counts if counts is not None else np.zeros(len(OperatorKind), dtype=np.int64)
    return _transition(pop, member, table, table.state, store, r1, rng,
                       learning_rate, sched, counts)


# ----------------------------------------------------------------------
# row selection


def row_space_indices(store: TupleStore, limit: int) -> Optional[npt.NDArray[np.intp]]:
    """Tuple positions of every possible row, or None when the row space exceeds limit."""
    cfg = store.config
    if not 0 < cfg.exhaustive_size <= limit:
        return None
    rows = np.indices(cfg.cardinalities).reshape(cfg.k, -1).T
    return store.indices(rows.astype(np.int64))


def choose_row(store: TupleStore, pop: Population,
               space: Optional[npt.NDArray[np.intp]] = None) -> TestCase:
    """Pick among rows tied at the best fitness.

    With a row space, prefer the tie that leaves the most rows still reaching the
    same fitness, then the largest total fitness left; the first tie wins otherwise.
    """
    if space is None or len(pop.ties) < 2:
        return pop.best.copy()
    best_score: Optional[Tuple[int, int]] = None
    chosen = pop.ties[0]
    for row in pop.ties:
        after = store.fitness_after(row, space)
        score = (int(np.count_nonzero(after >= pop.best_fitness)), int(after.sum()))
        if best_score is None or score > best_score:
            best_score, chosen = score, row
    return chosen.copy()


def qlsca_select_row(
    store: TupleStore,
    cfg: EngineConfig,
    table: QTable,
    rng: np.random.Generator,
    recorder: Optional[_Recorder] = None,
    space: Optional[npt.NDArray[np.intp]] = None,
) -> TestCase:
    """QLSCA 的一轮行搜索, 返回本轮找到的最优行"""
    recorder = recorder or _Recorder()
    T = cfg.max_iterations
    pop = Population.random(store, cfg.population_size, rng)
    target = store.max_row_fitness
    recorder.point(0, pop.best_fitness, table)
    if cfg.early_exit and pop.best_fitness >= target:
        return choose_row(store, pop, space)

    for iteration in range(1, T + 1):
        r1 = radius(iteration, cfg.sched)
        learning_rate = alpha(iteration, T)
        done = False
        for i in range(len(pop)):
            if explore_gate(iteration, rng):
                explore_episode(pop, table, store, r1, rng, member=i,
                                learning_rate=learning_rate, sched=cfg.sched,
                                counts=recorder.counts)
            else:
                exploit_step(pop, table, store, r1, rng, member=i,
                             learning_rate=learning_rate, sched=cfg.sched,
                             counts=recorder.counts)
            if cfg.early_exit and pop.best_fitness >= target:
                done = True
                break
        recorder.point(iteration, pop.best_fitness, table)
        if done:
            break
    return choose_row(store, pop, space)


def sca_select_row(
    store: TupleStore,
    cfg: EngineConfig,
    rng: np.random.Generator,
    recorder: Optional[_Recorder] = None,
    space: Optional[npt.NDArray[np.intp]] = None,
) -> TestCase:
    """基线 SCA 的一轮行搜索: 每个成员按 r4 < 0.5 选择正弦或余弦更新"""
    recorder = recorder or _Recorder()
    cards = store.config.cardinality_array
    pop = Population.random(store, cfg.population_size, rng)
    target = store.max_row_fitness
    recorder.point(0, pop.best_fitness)
    if cfg.early_exit and pop.best_fitness >= target:
        return choose_row(store, pop, space)

    for iteration in range(1, cfg.max_iterations + 1):
        r1 = radius(iteration, cfg.sched)
        done = False
        for i in range(len(pop)):
            if rng.random() < 0.5:
                kind = OperatorKind.SINE
                position = sine_update(pop.members[i], pop.best, r1, rng, cards)
            else:
                kind = OperatorKind.COSINE
                position = cosine_update(pop.members[i], pop.best, r1, rng, cards)
            pop.consider(i, position, store.fitness(position))
            recorder.counts[kind] += 1
            if cfg.early_exit and pop.best_fitness >= target:
                done = True
                break
        recorder.point(iteration, pop.best_fitness)
        if done:
            break
    return choose_row(store, pop, space)


def synthesize_row(store: TupleStore, rng: np.random.Generator) -> TestCase:
    """Row built from a random uncovered tuple, DON'T-CARE cells filled at random."""
    tup = store.uncovered_tuple(rng)
    row = rng.integers(0, store.config.cardinality_array, dtype=np.int64)
    for p in tup.parameters:
        row[p] = tup.assignment[p]
    return row


# ----------------------------------------------------------------------
# suite construction


def generate(cfg: CAConfig, ecfg: EngineConfig, strategy: Strategy = Strategy.QLSCA) -> RunReport:
    """贪心构造覆盖数组: 逐轮搜索一行, 删除其覆盖的元组, 直到集合为空

    Args:
        cfg: 问题实例
        ecfg: 引擎参数 (含随机种子)
        strategy: SCA 或 QLSCA

    Returns:
        RunReport
    """
    strategy = Strategy(strategy)
    started = time.perf_counter()
    rng = np.random.default_rng(ecfg.seed)
    store = build_store(cfg)
    initial = store.remaining

    table = QTable(gamma=ecfg.gamma)
    if strategy is Strategy.QLSCA:
        table.reset(rng)

    suite = TestSuite(cfg)
    recorder = _Recorder(record_qtable=ecfg.record_qtable and strategy is Strategy.QLSCA)
    round_fitness: List[int] = []
    fallbacks = 0
    space = row_space_indices(store, ecfg.lookahead_rows)

    while store:
        recorder.round += 1
        if strategy is Strategy.QLSCA:
            if ecfg.qtable_reset_per_round and recorder.round > 1:
                table.reset(rng)
            row = qlsca_select_row(store, ecfg, table, rng, recorder, space)
        else:
            row = sca_select_row(store, ecfg, rng, recorder, space)

        if fitness(row, store) == 0:
            row = synthesize_row(store, rng)
            fallbacks += 1
            logger.debug(f"Round {recorder.round}: search found nothing, synthesized a row")

        removed = remove_covered(store, row)
        suite.append(row)
        round_fitness.append(removed)
        logger.debug(f"Round {recorder.round}: row {row.tolist()} covered {removed}, "
                     f"{store.remaining} left")

    wall_millis = int(round((time.perf_counter() - started) * 1000))
    report = RunReport(
        suite=suite,
        size=suite.size,
        wall_millis=wall_millis,
        convergence=recorder.points,
        operator_counts={kind: int(recorder.counts[kind]) for kind in OperatorKind},
        seed=ecfg.seed,
        strategy=strategy,
        rounds=recorder.round,
        fallback_count=fallbacks,
        round_fitness=round_fitness,
    )
    logger.info(f"{strategy.value} covered {initial} tuples with {report.size} rows "
                f"(seed={ecfg.seed}, {wall_millis} ms, {fallbacks} fallbacks)")
    return report


def generate_best_of(
    cfg: CAConfig,
    ecfg: EngineConfig,
    strategy: Strategy = Strategy.QLSCA,
    runs: int = 1,
) -> Tuple[RunReport, List[int]]:
    """Run seeds seed, seed+1, ... and keep the smallest suite (first on ties)."""
    if runs < 1:
        raise ConfigurationError("runs must be at least 1", config_key="runs", value=runs)
    best: Optional[RunReport] = None
    sizes = []
    for offset in range(runs):
        run_cfg = replace(ecfg, seed=ecfg.seed + offset)
        report = generate(cfg, run_cfg, strategy)
        sizes.append(report.size)
        if best is None or report.size < best.size:
            best = report
    return best, sizes
