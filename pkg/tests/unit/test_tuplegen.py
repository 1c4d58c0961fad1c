"""交互元组生成与 TupleStore 单元测试"""

import itertools
import math
import sys
from pathlib import Path

import numpy as np
import pytest

# 添加src路径到Python路径
sys.path.insert(0, str(Path(__file__).parent.parent.parent / "src"))

from cagen.core.tuplegen import MaskEnumerator, build_store, enumerate_masks
from cagen.data.models import CAConfig, InteractionTuple, covers, mask_to_string
from cagen.data.tuple_store import TupleStore, fitness, remove_covered
from cagen.utils.errors import ConfigurationError, TupleSpaceError

PIZZA = CAConfig(2, (3, 2, 2, 2))
PIZZA_ROWS = [
    [1, 0, 1, 0],
    [0, 1, 1, 1],
    [2, 0, 0, 1],
    [1, 1, 0, 0],
    [0, 0, 0, 0],
    [2, 1, 1, 0],
    [1, 1, 1, 1],
]


class TestMaskEnumeration:
    """测试掩码枚举"""

    def test_four_parameters_pairwise(self):
        masks = enumerate_masks(4, 2)
        assert masks == [0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]
        assert {mask_to_string(m, 4) for m in masks} == {
            "0011", "0101", "0110", "1001", "1010", "1100"}

    def test_t_equals_k(self):
        assert enumerate_masks(5, 5) == [0b11111]

    def test_thirteen_parameters(self):
        masks = enumerate_masks(13, 2)
        assert len(masks) == 78
        brute = sorted(sum(1 << i for i in s) for s in itertools.combinations(range(13), 2))
        assert masks == brute

    @pytest.mark.parametrize("k,t", [(6, 3), (7, 4), (8, 2)])
    def test_popcount_and_order(self, k, t):
        masks = list(MaskEnumerator(k, t))
        assert len(masks) == math.comb(k, t)
        assert masks == sorted(set(masks))
        assert all(bin(m).count("1") == t for m in masks)

    def test_t_greater_than_k_raises(self):
        with pytest.raises(ConfigurationError):
            enumerate_masks(3, 4)

    def test_t_below_two_raises(self):
        with pytest.raises(ConfigurationError):
            enumerate_masks(3, 1)


class TestBuildStore:
    """测试 build_store"""

    def test_pizza_store(self):
        store = build_store(PIZZA)
        assert store.remaining == 30
        assert len(store.bucket(0b1001)) == 6
        assert sum(len(b) for b in store.buckets.values()) == store.remaining

    def test_ca_2_3_13(self):
        assert build_store(CAConfig(2, (3,) * 13)).remaining == 702

    def test_t_equals_k_is_full_product(self):
        cfg = CAConfig(3, (2, 3, 4))
        store = build_store(cfg)
        assert store.remaining == 24
        assert store.masks == (0b111,)

    def test_deterministic(self):
        a, b = build_store(PIZZA), build_store(PIZZA)
        assert a.buckets == b.buckets

    def test_refuses_oversized_space(self):
        with pytest.raises(TupleSpaceError):
            build_store(CAConfig(2, (3,) * 13), max_tuples=100)

    def test_every_tuple_is_well_formed(self):
        store = build_store(PIZZA)
        tuples = list(store)
        assert len(tuples) == 30
        assert len(set(tuples)) == 30
        for tup in tuples:
            tup.check(PIZZA)


class TestTupleStore:
    """测试适应度与删除"""

    def test_encode_decode_inverse(self):
        store = build_store(PIZZA)
        for tup in store:
            mask, code = store.encode(tup)
            assert store.decode(mask, code) == tup

    def test_fresh_store_every_row_covers_six(self):
        store = build_store(PIZZA)
        for row in itertools.product(range(3), range(2), range(2), range(2)):
            assert fitness(np.array(row), store) == 6

    def test_empty_store_fitness_zero(self):
        store = TupleStore(PIZZA, enumerate_masks(4, 2), filled=False)
        assert store.remaining == 0
        assert not store
        assert fitness(np.array([0, 0, 0, 0]), store) == 0

    def test_remove_covered(self):
        store = build_store(PIZZA)
        row = np.array([0, 0, 0, 0])
        assert remove_covered(store, row) == 6
        assert store.remaining == 24
        assert remove_covered(store, row) == 0
        assert fitness(row, store) == 0

    def test_pizza_suite_covers_everything(self):
        store = build_store(PIZZA)
        removed = [remove_covered(store, np.array(row)) for row in PIZZA_ROWS]
        assert store.remaining == 0
        assert sum(removed) == 30

    def test_fitness_equals_removal_count(self):
        rng = np.random.default_rng(7)
        cfg = CAConfig(3, (3, 4, 2, 3, 2))
        store = build_store(cfg)
        for _ in range(40):
            row = rng.integers(0, cfg.cardinality_array)
            before = store.remaining
            expected = store.fitness(row)
            assert store.remove_covered(row) == expected
            assert store.remaining == before - expected

    def test_fitness_matches_naive_count(self):
        rng = np.random.default_rng(11)
        cfg = CAConfig(2, (4, 3, 3, 2, 2))
        store = build_store(cfg)
        for _ in range(10):
            store.remove_covered(rng.integers(0, cfg.cardinality_array))
        for _ in range(20):
            row = rng.integers(0, cfg.cardinality_array)
            naive = sum(1 for tup in store if covers(row, tup))
            assert store.fitness(row) == naive

    def test_fitness_many_matches_single(self):
        rng = np.random.default_rng(3)
        store = build_store(PIZZA)
        store.remove_covered(np.array([1, 1, 1, 1]))
        rows = rng.integers(0, PIZZA.cardinality_array, size=(25, 4))
        assert store.fitness_many(rows).tolist() == [store.fitness(r) for r in rows]

    def test_contains_and_uncovered_tuple(self):
        store = build_store(PIZZA)
        tup = InteractionTuple(0b1001, (1, None, None, 1))
        assert tup in store
        store.remove_covered(np.array([1, 0, 0, 1]))
        assert tup not in store

        rng = np.random.default_rng(0)
        for _ in range(10):
            assert store.uncovered_tuple(rng) in store

    def test_uncovered_tuple_on_empty_store_raises(self):
        store = TupleStore(PIZZA, enumerate_masks(4, 2), filled=False)
        with pytest.raises(ConfigurationError):
            store.uncovered_tuple(np.random.default_rng(0))

    def test_fitness_after_matches_replayed_store(self):
        rng = np.random.default_rng(5)
        cfg = CAConfig(2, (3, 3, 2, 2, 3))
        store = build_store(cfg)
        replay = build_store(cfg)
        for _ in range(4):
            row = rng.integers(0, cfg.cardinality_array)
            store.remove_covered(row)
            replay.remove_covered(row)
        rows = rng.integers(0, cfg.cardinality_array, size=(30, cfg.k))
        tc = rng.integers(0, cfg.cardinality_array)
        after = store.fitness_after(tc, store.indices(rows))
        before = store.remaining
        replay.remove_covered(tc)
        assert after.tolist() == replay.fitness_many(rows).tolist()
        assert store.remaining == before

    def test_module_fitness_checks_range(self):
        store = build_store(PIZZA)
        with pytest.raises(ConfigurationError):
            fitness([0, 2, 0, 0], store)
        with pytest.raises(ConfigurationError):
            remove_covered(store, [3, 0, 0, 0])
        assert store.remaining == 30

    def test_max_row_fitness(self):
        store = build_store(PIZZA)
        assert store.max_row_fitness == 6
        for row in PIZZA_ROWS[:-1]:
            store.remove_covered(np.array(row))
        assert store.remaining == 1
        assert store.max_row_fitness == 1

    def test_width_mismatch_raises(self):
        store = build_store(PIZZA)
        with pytest.raises(ConfigurationError):
            store.fitness(np.array([0, 0, 0]))
