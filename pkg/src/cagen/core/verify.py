"""覆盖验证模块

独立的暴力覆盖检查: 直接对参数组合与取值组合做笛卡尔积,
逐个元组检查测试集中是否有行覆盖它。不使用 tuplegen / TupleStore。
"""

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from ..data.models import DONT_CARE, CAConfig, InteractionTuple, TestSuite
from ..utils import get_logger

logger = get_logger(__name__)


@dataclass
class StructuralViolation:
    """A row that is not a valid test case for the configuration."""
    row_index: int
    row: Tuple[int, ...]
    reason: str


@dataclass
class VerifyReport:
    """验证报告"""
    complete: bool
    missing: List[InteractionTuple] = field(default_factory=list)
    redundancy: Dict[InteractionTuple, int] = field(default_factory=dict)
    structural: List[StructuralViolation] = field(default_factory=list)

    @property
    def missing_count(self) -> int:
        return len(self.missing)

    @property
    def max_redundancy(self) -> int:
        return max(self.redundancy.values(), default=0)


def _structural_check(suite: TestSuite) -> Tuple[List[Tuple[int, ...]], List[StructuralViolation]]:
    cfg = suite.config
    valid, violations = [], []
    for index, row in enumerate(suite.rows):
        if len(row) != cfg.k:
            violations.append(StructuralViolation(index, tuple(row),
                                                  f"expected {cfg.k} values, found {len(row)}"))
            continue
        bad = [i for i, v in enumerate(row) if not 0 <= v < cfg.cardinalities[i]]
        if bad:
            violations.append(StructuralViolation(index, tuple(row),
                                                  f"value out of range at parameter {bad[0]}"))
            continue
        valid.append(tuple(row))
    return valid, violations


def verify_suite(suite: TestSuite) -> VerifyReport:
    """检查测试集是否覆盖全部 t-way 交互元组

    Malformed rows are reported as structural violations and take no part in
    the coverage count.
    """
    cfg = suite.config
    rows, structural = _structural_check(suite)
    missing: List[InteractionTuple] = []
    redundancy: Dict[InteractionTuple, int] = {}

    for params in itertools.combinations(range(cfg.k), cfg.strength):
        seen = Counter(tuple(row[p] for p in params) for row in rows)
        mask = sum(1 << p for p in params)
        for values in itertools.product(*(range(cfg.cardinalities[p]) for p in params)):
            assignment = [DONT_CARE] * cfg.k
            for p, v in zip(params, values):
                assignment[p] = v
            tup = InteractionTuple(mask, tuple(assignment))
            hits = seen.get(values, 0)
            if hits == 0:
                missing.append(tup)
            else:
                redundancy[tup] = hits

    report = VerifyReport(complete=not missing, missing=missing,
                          redundancy=redundancy, structural=structural)
    logger.debug(f"Verified {len(suite.rows)} rows: {len(missing)} missing, "
                 f"{len(structural)} structural violations")
    return report


def size_lower_bound(cfg: CAConfig) -> int:
    """max over t-subsets S of prod(v[i] for i in S)"""
    # the t largest cardinalities give the maximum product
    return math.prod(sorted(cfg.cardinalities, reverse=True)[:cfg.strength])
