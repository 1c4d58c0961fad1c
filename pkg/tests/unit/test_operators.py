"""搜索算子单元测试"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

# 添加src路径到Python路径
sys.path.insert(0, str(Path(__file__).parent.parent.parent / "src"))

from cagen.core.operators import (
    OperatorKind,
    ScheduleParams,
    clamp_absorbing,
    clamp_vector,
    cosine_update,
    crossover_update,
    levy_step,
    levy_steps,
    levy_update,
    mantegna_sigma,
    radius,
    sine_cosine_displace,
    sine_update,
)
from cagen.utils.errors import ConfigurationError, ContractViolation, OperatorError


@pytest.fixture
def sched():
    return ScheduleParams(magnitude=3.0, max_iterations=100, beta=1.5)


class TestOperatorKind:
    def test_codes_and_columns(self):
        assert [int(k) for k in OperatorKind] == [0, 1, 2, 3]
        assert [k.column for k in OperatorKind] == ["sine", "cosine", "levy", "crossover"]


class TestSchedule:
    """测试半径调度与参数校验"""

    def test_radius_endpoints(self, sched):
        assert radius(0, sched) == pytest.approx(3.0)
        assert radius(50, sched) == pytest.approx(1.5)
        assert radius(100, sched) == pytest.approx(0.0)

    def test_radius_is_linear_and_symmetric(self, sched):
        for t in range(0, 101, 7):
            assert radius(t, sched) + radius(100 - t, sched) == pytest.approx(sched.magnitude)

    def test_radius_out_of_range(self, sched):
        with pytest.raises(ContractViolation):
            radius(101, sched)
        with pytest.raises(ContractViolation):
            radius(-1, sched)

    def test_mantegna_sigma(self):
        assert mantegna_sigma(1.5) == pytest.approx(0.69657, abs=1e-4)
        assert ScheduleParams().sigma_u == pytest.approx(mantegna_sigma(1.5))

    @pytest.mark.parametrize("kwargs", [
        {"magnitude": 0.0},
        {"max_iterations": 0},
        {"beta": 1.0},
        {"beta": 2.5},
        {"sigma_u": 0.5},
    ])
    def test_invalid_schedule(self, kwargs):
        with pytest.raises(ConfigurationError):
            ScheduleParams(**kwargs)

    def test_explicit_sigma_matching_closed_form(self):
        ScheduleParams(sigma_u=mantegna_sigma(1.5))


class TestClamp:
    """吸收墙越界处理"""

    @pytest.mark.parametrize("value,card,expected", [
        (2.0, 4, 2),
        (4.2, 4, 0),
        (-1.0, 4, 3),
        (2.5, 4, 3),
        (-2.5, 4, 1),
        (0.49, 2, 0),
        (9.0, 4, 1),
    ])
    def test_examples(self, value, card, expected):
        assert clamp_absorbing(value, card) == expected

    @pytest.mark.parametrize("value", [math.nan, math.inf, -math.inf])
    def test_non_finite_raises(self, value):
        with pytest.raises(OperatorError):
            clamp_absorbing(value, 4)
        with pytest.raises(OperatorError):
            clamp_vector([0.0, value], np.array([4, 4]))

    def test_vector_matches_scalar(self):
        values = np.array([4.2, -1.0, 2.5, 1e12, -7.5])
        cards = np.array([4, 4, 3, 5, 2])
        expected = [clamp_absorbing(v, int(c)) for v, c in zip(values, cards)]
        assert clamp_vector(values, cards).tolist() == expected

    def test_vector_always_in_range(self):
        rng = np.random.default_rng(5)
        cards = np.array([2, 3, 5, 10, 7])
        out = clamp_vector(rng.normal(0, 50, size=(100_000, 5)), cards)
        assert out.shape == (100_000, 5)
        assert np.all(out >= 0) and np.all(out < cards)


class TestSineCosine:
    """正弦 / 余弦更新"""

    def test_displace_worked_example(self):
        x, best = np.array([0]), np.array([3])
        raw = sine_cosine_displace(x, best, 3.0, np.array([math.pi / 2]), np.array([1.0]),
                                   OperatorKind.SINE)
        assert raw[0] == pytest.approx(9.0)
        assert clamp_vector(raw, np.array([4])).tolist() == [1]

    def test_cosine_is_phase_shifted_sine(self):
        rng = np.random.default_rng(1)
        x = rng.integers(0, 5, size=6)
        best = rng.integers(0, 5, size=6)
        r2 = rng.uniform(0, 2 * math.pi, size=6)
        r3 = rng.uniform(0, 2, size=6)
        cos = sine_cosine_displace(x, best, 2.0, r2, r3, OperatorKind.COSINE)
        sin = sine_cosine_displace(x, best, 2.0, r2 + math.pi / 2, r3, OperatorKind.SINE)
        np.testing.assert_allclose(cos, sin, atol=1e-12)

    def test_zero_radius_keeps_position(self):
        rng = np.random.default_rng(2)
        cards = np.array([3, 3, 4, 2])
        x = np.array([2, 0, 3, 1])
        best = np.array([0, 2, 1, 0])
        assert sine_update(x, best, 0.0, rng, cards).tolist() == x.tolist()
        assert cosine_update(x, best, 0.0, rng, cards).tolist() == x.tolist()

    def test_output_in_range(self):
        rng = np.random.default_rng(3)
        cards = np.array([2, 3, 5, 10])
        x = rng.integers(0, cards, size=(100_000, 4))
        best = rng.integers(0, cards, size=(100_000, 4))
        for update in (sine_update, cosine_update):
            out = update(x, best, 3.0, rng, cards)
            assert out.dtype == np.int64
            assert np.all(out >= 0) and np.all(out < cards)

    def test_seeded_update_is_reproducible(self):
        cards = np.array([3, 3, 3, 3])
        x, best = np.array([0, 1, 2, 0]), np.array([2, 2, 0, 1])
        a = sine_update(x, best, 2.5, np.random.default_rng(9), cards)
        b = sine_update(x, best, 2.5, np.random.default_rng(9), cards)
        assert a.tolist() == b.tolist()


class TestLevy:
    """Lévy 飞行"""

    def test_explicit_step_example(self, sched):
        out = levy_update(np.array([2]), np.random.default_rng(0), sched, np.array([4]),
                          steps=np.array([7.4]))
        assert out.tolist() == [1]

    def test_zero_steps_keep_position(self, sched):
        x = np.array([1, 0, 2])
        out = levy_update(x, np.random.default_rng(0), sched, np.array([3, 2, 3]),
                          steps=np.zeros(3))
        assert out.tolist() == x.tolist()

    def test_step_is_float(self, sched):
        assert isinstance(levy_step(np.random.default_rng(0), sched), float)

    def test_heavy_tail(self, sched):
        steps = levy_steps(np.random.default_rng(42), sched, 1_000_000)
        assert np.all(np.isfinite(steps))
        # a Gaussian of comparable spread essentially never leaves [-10, 10]
        assert np.mean(np.abs(steps) > 10.0) > 0.001
        assert np.median(np.abs(steps)) < 2.0
        assert np.max(np.abs(steps)) > 50.0
        assert abs(np.mean(np.sign(steps))) < 0.005

    def test_output_in_range(self, sched):
        rng = np.random.default_rng(8)
        cards = np.array([2, 3, 5, 10, 4])
        n = 100_000
        x = rng.integers(0, cards, size=(n, 5))
        steps = levy_steps(rng, sched, n * 5).reshape(n, 5)
        out = levy_update(x, rng, sched, cards, steps=steps)
        assert np.all(out >= 0) and np.all(out < cards)


class TestCrossover:
    """单点交叉"""

    XI = np.array([0, 0, 0, 0])
    XJ = np.array([1, 1, 1, 1])

    @pytest.mark.parametrize("cut,expected", [
        (0, [0, 0, 0, 0]),
        (2, [1, 1, 0, 0]),
        (4, [1, 1, 1, 1]),
    ])
    def test_cut_examples(self, cut, expected):
        out = crossover_update(self.XI, self.XJ, np.random.default_rng(0), cut=cut)
        assert out.tolist() == expected

    def test_cut_out_of_range(self):
        with pytest.raises(ContractViolation):
            crossover_update(self.XI, self.XJ, np.random.default_rng(0), cut=5)

    def test_random_cut_is_prefix_of_partner(self):
        rng = np.random.default_rng(4)
        seen = set()
        for _ in range(300):
            out = crossover_update(self.XI, self.XJ, rng).tolist()
            cut = sum(out)
            assert out == [1] * cut + [0] * (4 - cut)
            seen.add(cut)
        assert seen == {0, 1, 2, 3, 4}

    def test_every_gene_comes_from_a_parent(self):
        rng = np.random.default_rng(6)
        cards = np.array([3, 5, 2, 7, 4, 6])
        xi = rng.integers(0, cards, size=(100_000, 6))
        xj = rng.integers(0, cards, size=(100_000, 6))
        out = np.stack([crossover_update(a, b, rng) for a, b in zip(xi, xj)])
        assert np.all((out == xi) | (out == xj))
        assert np.all((out >= 0) & (out < cards))
