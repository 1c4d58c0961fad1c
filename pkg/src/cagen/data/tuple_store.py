"""未覆盖交互元组的哈希索引集合

每个掩码对应一个桶; 桶内的赋值按掩码位置的混合进制编码成整数,
用一段布尔位图表示 "尚未覆盖"。所有桶首尾相接存放在同一个数组里,
这样一个测试用例的适应度就是一次向量化的下标查找。
"""

from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt

from ..utils.errors import ConfigurationError
from .models import DONT_CARE, CAConfig, InteractionTuple, TestCase, make_test_case


class TupleStore:
    """未覆盖交互元组集合, 以掩码为键"""

    def __init__(self, config: CAConfig, masks: Sequence[int], filled: bool = True):
        """初始化元组集合

        Args:
            config: 问题实例
            masks: 参与的参数掩码 (每个恰好 t 个 1)
            filled: True 时所有元组初始为未覆盖, False 时为空集合
        """
        self.config = config
        self.masks: Tuple[int, ...] = tuple(masks)

        t = config.strength
        cards = config.cardinalities
        positions = np.zeros((len(self.masks), t), dtype=np.intp)
        radix = np.zeros((len(self.masks), t), dtype=np.int64)
        sizes = np.zeros(len(self.masks), dtype=np.int64)

        for row, mask in enumerate(self.masks):
            params = [i for i in range(config.k) if mask >> i & 1]
            if len(params) != t:
                raise ConfigurationError("mask popcount differs from strength",
                                         config_key="mask", value=mask)
            # last participating parameter is the least significant digit
            weight = 1
            for j in range(t - 1, -1, -1):
                positions[row, j] = params[j]
                radix[row, j] = weight
                weight *= cards[params[j]]
            sizes[row] = weight

        self._positions = positions
        self._radix = radix
        self._sizes = sizes
        self._offsets = np.concatenate(([0], np.cumsum(sizes)[:-1])).astype(np.intp)
        self._mask_row: Dict[int, int] = {m: i for i, m in enumerate(self.masks)}
        self.capacity = int(sizes.sum())
        self._uncovered = np.full(self.capacity, filled, dtype=bool)
        self.remaining = self.capacity if filled else 0

    # ------------------------------------------------------------------
    # encoding

    def _indices(self, tc: TestCase) -> npt.NDArray[np.intp]:
        if tc.shape[-1] != self.config.k:
            raise ConfigurationError("test case width differs from parameter count",
                                     config_key="k", value=tc.shape[-1])
        return self._offsets + (tc[..., self._positions] * self._radix).sum(axis=-1)

    def encode(self, tup: InteractionTuple) -> Tuple[int, int]:
        """Return (mask, code) for a tuple of this configuration."""
        tup.check(self.config)
        row = self._mask_row[tup.mask]
        code = sum(tup.assignment[p] * int(w)
                   for p, w in zip(self._positions[row], self._radix[row]))
        return tup.mask, int(code)

    def decode(self, mask: int, code: int) -> InteractionTuple:
        row = self._mask_row[mask]
        assignment: List[Optional[int]] = [DONT_CARE] * self.config.k
        for p, w in zip(self._positions[row], self._radix[row]):
            assignment[p] = int(code // w % self.config.cardinalities[p])
        return InteractionTuple(mask, tuple(assignment))

    # ------------------------------------------------------------------
    # set view

    def bucket(self, mask: int) -> FrozenSet[int]:
        """Codes of the still uncovered assignments for one mask."""
        row = self._mask_row[mask]
        start = self._offsets[row]
        segment = self._uncovered[start:start + self._sizes[row]]
        return frozenset(int(c) for c in np.flatnonzero(segment))

    @property
    def buckets(self) -> Dict[int, FrozenSet[int]]:
        return {mask: self.bucket(mask) for mask in self.masks}

    def __len__(self) -> int:
        return self.remaining

    def __bool__(self) -> bool:
        return self.remaining > 0

    def __contains__(self, tup: InteractionTuple) -> bool:
        mask, code = self.encode(tup)
        row = self._mask_row[mask]
        return bool(self._uncovered[self._offsets[row] + code])

    def __iter__(self) -> Iterator[InteractionTuple]:
        for flat in np.flatnonzero(self._uncovered):
            yield self._tuple_at(int(flat))

    def _tuple_at(self, flat: int) -> InteractionTuple:
        row = int(np.searchsorted(self._offsets, flat, side="right")) - 1
        return self.decode(self.masks[row], flat - int(self._offsets[row]))

    def uncovered_tuple(self, rng: np.random.Generator) -> InteractionTuple:
        """任取一个未覆盖元组 (均匀随机)"""
        flat = np.flatnonzero(self._uncovered)
        if flat.size == 0:
            raise ConfigurationError("no uncovered tuple left", config_key="remaining")
        return self._tuple_at(int(flat[rng.integers(flat.size)]))

    # ------------------------------------------------------------------
    # fitness

    @property
    def max_row_fitness(self) -> int:
        """Upper bound on fitness any single row can reach right now."""
        return min(self.config.interactions_per_row, self.remaining)

    def fitness(self, tc: TestCase) -> int:
        """该测试用例能覆盖的未覆盖元组个数 (不修改集合)"""
        return int(self._uncovered[self._indices(tc)].sum())

    def fitness_many(self, rows: npt.NDArray[np.int64]) -> npt.NDArray[np.int64]:
        """Fitness of every row of a (D, k) matrix."""
        return self._uncovered[self._indices(rows)].sum(axis=-1).astype(np.int64)

    def remove_covered(self, tc: TestCase) -> int:
        """删除该测试用例覆盖的全部元组, 返回删除个数"""
        idx = self._indices(tc)
        removed = int(self._uncovered[idx].sum())
        self._uncovered[idx] = False
        self.remaining -= removed
        return removed

    # ------------------------------------------------------------------
    # lookahead

    def indices(self, rows: npt.NDArray[np.int64]) -> npt.NDArray[np.intp]:
        """Flat tuple positions of a (D, k) matrix, one column per mask."""
        return self._indices(rows)

    def fitness_after(self, tc: TestCase, indices: npt.NDArray[np.intp]) -> npt.NDArray[np.int64]:
        """Fitness of pre-indexed rows as if tc had been removed; the store is not touched."""
        live = self._uncovered[indices]
        live &= indices != self._indices(tc)
        return live.sum(axis=-1).astype(np.int64)


def fitness(tc: Sequence[int], store: TupleStore) -> int:
    return store.fitness(make_test_case(store.config, tc))


def remove_covered(store: TupleStore, tc: Sequence[int]) -> int:
    return store.remove_covered(make_test_case(store.config, tc))
