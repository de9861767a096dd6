"""
分散性测试
样本、经验误差、分散性界与分散性经验检验
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from core.exceptions import CapExceededError, DomainError, MalformedInstanceError
from core.oracles import assignment_block
from core.rng import make_rng
from core.scatter import (
    ComplementHypothesis,
    ConstantHypothesis,
    ExampleOracle,
    FunctionHypothesis,
    LabeledSample,
    TableHypothesis,
    binomial_tail,
    empirical_error,
    empirical_scatter_check,
    hoeffding_scatter,
    kl_divergence,
    linial_luria_bound,
    mistake_budget,
    packing_failure_bound,
    random_table_hypotheses,
    realizable_sampler,
    uniform_label_sampler,
)


class TestLabeledSample:
    """样本测试"""

    @pytest.mark.smoke
    def test_from_arrays(self):
        sample = LabeledSample.from_arrays([[1, -1], [-1, -1]], [0, 1])
        assert sample.dim == 2
        assert sample.m == 2
        assert sample.label_counts() == {0: 1, 1: 1}

    def test_empty(self):
        sample = LabeledSample.from_arrays([], [], dim=5)
        assert sample.m == 0
        assert sample.instances.shape == (0, 5)

    @pytest.mark.parametrize("instances,labels", [
        ([[1, 0]], [0]),
        ([[1, -1]], [2]),
        ([[1, -1]], [0, 1]),
    ])
    def test_invalid(self, instances, labels):
        with pytest.raises(MalformedInstanceError):
            LabeledSample.from_arrays(instances, labels)

    def test_covers_domain(self):
        full = LabeledSample.from_arrays(assignment_block(0, 8, 3), np.zeros(8))
        assert full.covers_domain()
        partial = LabeledSample.from_arrays(assignment_block(0, 7, 3), np.zeros(7))
        assert not partial.covers_domain()


class TestEmpiricalError:
    """经验误差测试"""

    @pytest.mark.smoke
    def test_exact_fraction(self):
        sample = LabeledSample.from_arrays([[1], [-1], [1]], [1, 1, 0])
        assert empirical_error(ConstantHypothesis(1), sample) == Fraction(1, 3)
        assert empirical_error(ComplementHypothesis(ConstantHypothesis(1)), sample) == Fraction(2, 3)

    def test_empty_sample(self):
        with pytest.raises(DomainError):
            empirical_error(ConstantHypothesis(0), LabeledSample.from_arrays([], [], dim=1))

    def test_mistake_budget(self):
        assert mistake_budget(0.25, 10) == 2
        assert mistake_budget(0.25, 8) == 2
        assert mistake_budget(0.3, 10) == 2

    def test_function_hypothesis(self):
        sample = LabeledSample.from_arrays([[1, 1], [-1, 1]], [1, 0])
        rowwise = FunctionHypothesis(lambda x: int(x[0] == 1), batched=False)
        batched = FunctionHypothesis(lambda x: (x[:, 0] == 1).astype(np.uint8))
        assert empirical_error(rowwise, sample) == 0
        assert empirical_error(batched, sample) == 0

    def test_table_hypothesis(self):
        h = TableHypothesis(np.asarray([0, 1, 1, 1]))
        x = np.asarray([[-1, -1], [1, -1], [-1, 1], [1, 1]])
        assert h.predict(x).tolist() == [0, 1, 1, 1]
        with pytest.raises(DomainError):
            TableHypothesis(np.zeros(3))


class TestBounds:
    """分散性界测试"""

    @pytest.mark.smoke
    def test_hoeffding(self):
        params = hoeffding_scatter(32)
        assert params.p == 4
        assert params.beta == 0.25
        assert params.tail_bound() == pytest.approx(1 / 16)
        with pytest.raises(DomainError):
            hoeffding_scatter(0)

    def test_hoeffding_general_beta(self):
        params = hoeffding_scatter(32, 0.125)
        assert params.p == pytest.approx(9.0)
        assert params.beta == 0.125
        for beta in (0.0, 0.5, 0.7):
            with pytest.raises(DomainError):
                hoeffding_scatter(32, beta)

    @pytest.mark.parametrize("m", [8, 16, 32, 64])
    def test_exact_tail_below_hoeffding(self, m):
        assert binomial_tail(m, 0.25) <= hoeffding_scatter(m).tail_bound()

    def test_kl_not_above_quadratic(self):
        for alpha in np.linspace(0.0, 0.9, 10):
            for beta in np.linspace(alpha + 0.01, 1.0, 10):
                kl = linial_luria_bound(alpha, beta, 50, mode="kl")
                quadratic = linial_luria_bound(alpha, beta, 50, mode="quadratic")
                assert kl <= quadratic * (1 + 1e-12)

    def test_kl_divergence(self):
        assert kl_divergence(0.5, 0.5) == 0
        assert kl_divergence(0.25, 0.5) == pytest.approx(0.25 * math.log(0.5) + 0.75 * math.log(1.5))

    @pytest.mark.parametrize("alpha,beta,n", [(0.5, 0.5, 10), (0.6, 0.5, 10), (0.1, 0.2, -1), (-0.1, 0.2, 5)])
    def test_domain_errors(self, alpha, beta, n):
        with pytest.raises(DomainError):
            linial_luria_bound(alpha, beta, n)

    def test_packing_failure_bound(self):
        expected = math.exp(-2 * (2 ** -3) ** 2 * (64 // 4))
        assert packing_failure_bound(2, 64) == pytest.approx(expected, rel=1e-12)
        assert packing_failure_bound(2, 64, coarse=True) > packing_failure_bound(2, 64)


class TestScatterCheck:
    """分散性经验检验测试"""

    @pytest.mark.smoke
    def test_uniform_labels_pass(self, rng):
        hypotheses = random_table_hypotheses(3, 4, rng)
        report = empirical_scatter_check(uniform_label_sampler(16, 4), hypotheses, 0.25, 20_000, rng, chunk=5000)
        assert report.trials == 20_000
        assert report.m == 16
        assert report.passed
        assert report.bound == pytest.approx(0.25)

    def test_singleton_at_m32(self, rng):
        report = empirical_scatter_check(uniform_label_sampler(32, 3), [ConstantHypothesis(0)], 0.25, 20_000, rng)
        assert report.frequencies[0] <= report.threshold
        assert not report.flagged

    def test_realizable_sampler_is_flagged(self, rng):
        h = TableHypothesis(np.asarray([0, 1, 1, 0]))
        report = empirical_scatter_check(realizable_sampler(16, 2, h), [h], 0.25, 1000, rng)
        assert report.frequencies[0] == 1.0
        assert report.flagged == [0]
        assert not report.passed

    def test_default_params_follow_beta(self, rng):
        report = empirical_scatter_check(uniform_label_sampler(32, 3), [ConstantHypothesis(0)], 0.125, 500, rng)
        assert report.params.beta == 0.125
        assert report.params.p == pytest.approx(9.0)
        assert report.bound == pytest.approx(2.0 ** -9)

    def test_union_bound_grows_with_hypothesis_count(self):
        table_rng = make_rng(5)
        small = random_table_hypotheses(2, 4, table_rng)
        large = small + random_table_hypotheses(2, 4, table_rng)
        sampler = uniform_label_sampler(32, 4)
        first = empirical_scatter_check(sampler, small, 0.25, 5000, make_rng(8))
        second = empirical_scatter_check(sampler, large, 0.25, 5000, make_rng(8))
        assert first.union_bound == pytest.approx(2 / 16)
        assert second.union_bound == pytest.approx(2 * first.union_bound)
        # 同一随机流下前两个假设的命中次数不变
        assert second.hits[:2] == first.hits
        assert second.any_hits >= first.any_hits
        assert first.passed and second.passed

    def test_added_hypothesis_is_flagged_individually(self, rng):
        h = TableHypothesis(np.asarray([0, 1, 1, 0]))
        sampler = realizable_sampler(16, 2, h)
        alone = empirical_scatter_check(sampler, [ComplementHypothesis(h)], 0.25, 1000, rng)
        assert alone.passed
        both = empirical_scatter_check(sampler, [ComplementHypothesis(h), h], 0.25, 1000, rng)
        assert both.union_bound == pytest.approx(0.5)
        assert both.flagged == [1]
        assert both.union_flagged

    def test_invalid_arguments(self, rng):
        with pytest.raises(DomainError):
            empirical_scatter_check(uniform_label_sampler(8, 2), [], 0.25, 10, rng)
        with pytest.raises(DomainError):
            empirical_scatter_check(uniform_label_sampler(8, 2), [ConstantHypothesis(0)], 0.25, 0, rng)

    def test_hypothesis_dim_cap(self, rng):
        with pytest.raises(CapExceededError):
            random_table_hypotheses(1, 30, rng)


class TestExampleOracle:
    """样例预言机测试"""

    def test_draw_with_replacement(self, rng):
        sample = LabeledSample.from_arrays([[1, 1], [-1, 1]], [1, 0])
        oracle = ExampleOracle(sample, rng)
        instances, labels = oracle.draw(50)
        assert instances.shape == (50, 2)
        assert oracle.meter.examples_drawn == 50
        assert set(labels.tolist()) <= {0, 1}
        oracle.exhaust()
        assert oracle.meter.examples_drawn == 52

    def test_empty_sample(self, rng):
        with pytest.raises(DomainError):
            ExampleOracle(LabeledSample.from_arrays([], [], dim=2), rng)
