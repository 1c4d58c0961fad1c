"""Data models for cagen.

Parameter values are 0-based everywhere. A mask is an int whose bit i is set
when parameter i takes part in an interaction; its string form lists
parameter 0 first ("1001" = P1 and P4 of a four-parameter system).
"""

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt

from ..utils.errors import ConfigurationError

# Marker for parameters outside an interaction's mask.
DONT_CARE = None

TestCase = npt.NDArray[np.int64]
"""One row of the array: k parameter values as an int64 vector."""

Assignment = Tuple[Optional[int], ...]


@dataclass(frozen=True)
class CAConfig:
    """问题实例: 交互强度 t 与每个参数的取值个数 v[0..k-1]"""
    strength: int
    cardinalities: Tuple[int, ...]

    def __post_init__(self):
        cards = tuple(int(v) for v in self.cardinalities)
        object.__setattr__(self, "cardinalities", cards)

        if len(cards) < 2:
            raise ConfigurationError("at least two parameters are required",
                                     config_key="k", value=len(cards))
        if any(v < 2 for v in cards):
            raise ConfigurationError("every parameter needs at least two values",
                                     config_key="cardinalities", value=cards)
        if not 2 <= self.strength <= len(cards):
            raise ConfigurationError(f"strength must satisfy 2 <= t <= k={len(cards)}",
                                     config_key="strength", value=self.strength)

    @property
    def k(self) -> int:
        return len(self.cardinalities)

    @property
    def t(self) -> int:
        return self.strength

    @cached_property
    def cardinality_array(self) -> npt.NDArray[np.int64]:
        return np.asarray(self.cardinalities, dtype=np.int64)

    @cached_property
    def interactions_per_row(self) -> int:
        """C(k, t): number of tuples any single row covers."""
        return math.comb(self.k, self.strength)

    @cached_property
    def tuple_count(self) -> int:
        """所有 t-way 交互元组的总数 (闭式: t 阶初等对称多项式)"""
        # e[j] = sum over j-subsets of the product of their cardinalities
        e = [1] + [0] * self.strength
        for v in self.cardinalities:
            for j in range(self.strength, 0, -1):
                e[j] += e[j - 1] * v
        return e[self.strength]

    @cached_property
    def exhaustive_size(self) -> int:
        return math.prod(self.cardinalities)


@dataclass(frozen=True)
class InteractionTuple:
    """交互元组: 参与参数的掩码 + 每个位置的取值 (DONT_CARE 表示不关心)"""
    mask: int
    assignment: Assignment

    def __post_init__(self):
        object.__setattr__(self, "assignment", tuple(self.assignment))
        for i, value in enumerate(self.assignment):
            in_mask = bool(self.mask >> i & 1)
            if in_mask != (value is not DONT_CARE):
                raise ConfigurationError(
                    "assignment must be concrete exactly on the mask bits",
                    config_key="assignment", value=self.assignment)
        if self.mask >> len(self.assignment):
            raise ConfigurationError("mask wider than assignment",
                                     config_key="mask", value=self.mask)

    @property
    def parameters(self) -> Tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.assignment) if v is not DONT_CARE)

    @property
    def strength(self) -> int:
        return bin(self.mask).count("1")

    def check(self, config: CAConfig) -> None:
        """Raise ConfigurationError unless the tuple belongs to config."""
        if len(self.assignment) != config.k:
            raise ConfigurationError("tuple width differs from parameter count",
                                     config_key="k", value=len(self.assignment))
        if self.strength != config.strength:
            raise ConfigurationError("tuple strength differs from t",
                                     config_key="strength", value=self.strength)
        for i in self.parameters:
            if not 0 <= self.assignment[i] < config.cardinalities[i]:
                raise ConfigurationError(f"value out of range for parameter {i}",
                                         config_key="assignment", value=self.assignment)

    def __str__(self) -> str:
        cells = ",".join("*" if v is DONT_CARE else str(v) for v in self.assignment)
        return f"{mask_to_string(self.mask, len(self.assignment))}:[{cells}]"


def mask_to_string(mask: int, k: int) -> str:
    """Render a mask with parameter 0 as the leftmost character."""
    return "".join("1" if mask >> i & 1 else "0" for i in range(k))


def make_test_case(config: CAConfig, values: Sequence[int]) -> TestCase:
    """Validate values against config and return them as a TestCase."""
    row = np.asarray(values, dtype=np.int64)
    if row.shape != (config.k,):
        raise ConfigurationError("test case length differs from parameter count",
                                 config_key="k", value=len(values))
    if np.any(row < 0) or np.any(row >= config.cardinality_array):
        raise ConfigurationError("test case value out of range",
                                 config_key="values", value=list(values))
    return row


def covers(tc: Sequence[int], tup: InteractionTuple) -> bool:
    """覆盖判定: 掩码内每个位置取值一致即覆盖"""
    if len(tc) != len(tup.assignment):
        raise ConfigurationError("test case and tuple have different widths",
                                 config_key="k", value=(len(tc), len(tup.assignment)))
    return all(int(tc[i]) == tup.assignment[i] for i in tup.parameters)


@dataclass
class TestSuite:
    """最终测试集 (每行一个测试用例)"""
    __test__ = False

    config: CAConfig
    rows: List[Tuple[int, ...]] = field(default_factory=list)

    def append(self, tc: Sequence[int]) -> None:
        self.rows.append(tuple(int(v) for v in tc))

    @property
    def size(self) -> int:
        return len(self.rows)

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self) -> Iterator[Tuple[int, ...]]:
        return iter(self.rows)

    def as_array(self) -> npt.NDArray[np.int64]:
        if not self.rows:
            return np.empty((0, self.config.k), dtype=np.int64)
        return np.asarray(self.rows, dtype=np.int64)
