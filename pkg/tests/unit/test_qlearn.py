"""Q 学习单元测试"""

import sys
from collections import Counter
from pathlib import Path

import numpy as np
import pytest

# 添加src路径到Python路径
sys.path.insert(0, str(Path(__file__).parent.parent.parent / "src"))

from cagen.core.operators import OperatorKind
from cagen.core.qlearn import QTable, alpha, best_action, reward, update
from cagen.utils.errors import ConfigurationError, ContractViolation

SINE, COSINE, LEVY, CROSS = OperatorKind


class TestQTable:
    def test_defaults(self):
        table = QTable()
        assert table.gamma == 0.8
        assert table.state is SINE
        assert table.q.shape == (4, 4)
        assert not table.q.any()

    def test_invalid_gamma(self):
        with pytest.raises(ConfigurationError):
            QTable(gamma=1.5)

    def test_invalid_shape(self):
        with pytest.raises(ConfigurationError):
            QTable(q=np.zeros((3, 3)))

    def test_reset_and_snapshot(self):
        table = QTable(q=np.ones((4, 4)))
        table.reset(np.random.default_rng(0))
        assert table.snapshot() == (0.0,) * 16
        assert table.state in tuple(OperatorKind)

    def test_repr_mentions_state(self):
        assert "SINE" in repr(QTable())


class TestSchedules:
    """学习率与奖励"""

    @pytest.mark.parametrize("t,expected", [(0, 1.0), (50, 0.55), (100, 0.1)])
    def test_alpha(self, t, expected):
        assert alpha(t, 100) == pytest.approx(expected)

    def test_alpha_out_of_range(self):
        with pytest.raises(ContractViolation):
            alpha(101, 100)
        with pytest.raises(ContractViolation):
            alpha(0, 0)

    def test_reward(self):
        assert reward(3, 4) == 1.0
        assert reward(4, 4) == -1.0
        assert reward(4, 3) == -1.0


class TestUpdate:
    """Q 值更新规则"""

    def test_worked_example(self):
        table = QTable(gamma=0.1)
        table.q[SINE, LEVY] = 1.22
        table.q[LEVY] = [1.0, 0.5, -0.2, 0.3]
        value = update(table, SINE, LEVY, -1.0, 0.70)
        assert value == pytest.approx(-0.264, abs=1e-12)
        assert table.q[SINE, LEVY] == pytest.approx(-0.264, abs=1e-12)
        assert table.state is LEVY

    def test_zero_learning_rate_keeps_value(self):
        table = QTable()
        table.q[COSINE, CROSS] = 0.7
        assert update(table, COSINE, CROSS, 1.0, 0.0) == pytest.approx(0.7)
        assert table.state is CROSS

    def test_full_rate_no_discount_is_reward(self):
        table = QTable(gamma=0.0, q=np.full((4, 4), 3.0))
        assert update(table, SINE, COSINE, -1.0, 1.0) == -1.0

    def test_from_zero_table(self):
        table = QTable()
        assert update(table, SINE, SINE, 1.0, 1.0) == 1.0
        assert table.q.sum() == 1.0

    def test_bounded_under_random_updates(self):
        rng = np.random.default_rng(12)
        table = QTable(gamma=0.8)
        for _ in range(20_000):
            s, a = OperatorKind(int(rng.integers(4))), OperatorKind(int(rng.integers(4)))
            update(table, s, a, float(rng.choice([-1.0, 1.0])), float(rng.uniform(0.1, 1.0)))
        assert np.abs(table.q).max() <= 1.0 / (1.0 - 0.8) + 1e-9


class TestBestAction:
    """贪心动作选择"""

    def test_argmax(self):
        table = QTable()
        table.q[SINE] = [0.0, -1.11, 1.0, -1.0]
        assert best_action(table, SINE, np.random.default_rng(0)) is LEVY

    def test_unique_max_consumes_no_randomness(self):
        table = QTable()
        table.q[COSINE] = [0.2, 0.1, 0.0, 0.5]
        rng = np.random.default_rng(3)
        before = rng.bit_generator.state
        assert best_action(table, COSINE, rng) is CROSS
        assert rng.bit_generator.state == before

    def test_ties_are_uniform(self):
        table = QTable()
        rng = np.random.default_rng(21)
        counts = Counter(best_action(table, SINE, rng) for _ in range(4000))
        assert set(counts) == set(OperatorKind)
        assert all(850 < n < 1150 for n in counts.values())

    def test_partial_tie(self):
        table = QTable()
        table.q[LEVY] = [1.0, -1.0, 0.0, 1.0]
        rng = np.random.default_rng(5)
        picks = {best_action(table, LEVY, rng) for _ in range(200)}
        assert picks == {SINE, CROSS}

    def test_row_shift_does_not_change_choice(self):
        rng = np.random.default_rng(6)
        for _ in range(50):
            row = rng.normal(size=4)
            a = best_action(QTable(q=np.tile(row, (4, 1))), SINE, rng)
            b = best_action(QTable(q=np.tile(row + 2.5, (4, 1))), SINE, rng)
            assert a is b
