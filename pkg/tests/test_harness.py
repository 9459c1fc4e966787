import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monofourier.core import TruthTable, wht_forward
from monofourier.errors import CapacityError, DomainError
from monofourier.estimator import EstimatorConfig
from monofourier.harness import (CSV_FIELDS, NoiseModel, constant_baseline_risk, exact_risk,
                                 format_csv, generate_dataset, mc_risk, replicate_seed,
                                 spectral_sweep)
from monofourier.zoo import AdditiveJunta, Dictator, Majority, Tribes, constant


class TestNoise:
    def test_kinds(self):
        with pytest.raises(DomainError):
            NoiseModel("cauchy", 1.0)
        assert NoiseModel.none().sigma == 0.0

    @settings(max_examples=200, deadline=None)
    @given(st.floats(0.01, 5), st.floats(-20, 20))
    def test_uniform_sub_gaussian(self, a, t):
        # E exp(t U[-a, a]) = sinh(ta)/(ta) <= exp(a^2 t^2 / 2)
        x = abs(t * a)
        if x == 0:
            log_mgf = 0.0
        elif x < 20:
            log_mgf = math.log(math.sinh(x) / x)
        else:
            log_mgf = x - math.log(2 * x)
        assert log_mgf <= NoiseModel.uniform(a).sigma ** 2 * t * t / 2 + 1e-12

    @pytest.mark.parametrize("noise", [NoiseModel.gaussian(0.7), NoiseModel.uniform(0.7)])
    def test_centered(self, noise):
        e = noise.sample(np.random.default_rng(0), 200_000)
        assert abs(e.mean()) < 4 * math.sqrt(noise.variance / e.size)
        assert e.var() == pytest.approx(noise.variance, rel=0.02)


class TestDataset:
    def test_noiseless(self):
        f = Tribes(6, 2, 3)
        data = generate_dataset(f, 500, NoiseModel.none(), 1)
        np.testing.assert_array_equal(data.responses, f(data.points))

    def test_gaussian_smoke(self):
        n = 10 ** 5
        data = generate_dataset(constant(5, 0.0), n, NoiseModel.gaussian(1.0), 2)
        assert abs(data.responses.mean()) < 4 / math.sqrt(n)
        assert abs(data.responses.var() - 1.0) < 0.05

    def test_deterministic(self):
        a = generate_dataset(Majority(9), 100, NoiseModel.gaussian(1.0), 5)
        b = generate_dataset(Majority(9), 100, NoiseModel.gaussian(1.0), 5)
        np.testing.assert_array_equal(a.points, b.points)
        np.testing.assert_array_equal(a.responses, b.responses)

    def test_points_uniform_and_in_range(self):
        data = generate_dataset(Majority(4), 16_000, NoiseModel.none(), 0)
        counts = np.bincount(data.points.astype(np.int64), minlength=16)
        assert counts.shape[0] == 16
        # chi-square with 15 dof; 99.9% quantile is 37.7
        assert np.sum((counts - 1000) ** 2 / 1000) < 37.7

    def test_d64(self):
        data = generate_dataset(Dictator(64, 64), 1000, NoiseModel.none(), 0)
        assert 400 < data.responses.sum() < 600


class TestExactRisk:
    def test_self(self):
        f = Majority(5)
        assert exact_risk(f.to_table(), f) == 0.0

    def test_half_vs_dictator(self):
        assert exact_risk(0.5, Dictator(1, 1)) == 0.25
        assert exact_risk(0.5, Dictator(6, 2)) == 0.25

    def test_zero_vs_constant(self):
        assert exact_risk(0.0, constant(3, 0.3)) == pytest.approx(0.09)

    def test_callable(self):
        f = Dictator(3, 1)
        assert exact_risk(lambda x: f(x), f) == 0.0

    def test_capacity(self):
        with pytest.raises(CapacityError):
            exact_risk(0.0, Dictator(21, 1))


class TestMCRisk:
    def test_decreasing_noiseless(self):
        f = Dictator(10, 1)
        risks = [mc_risk(f, n, NoiseModel.none(), replicates=20, master_seed=1).mean_risk
                 for n in (100, 1000, 10_000)]
        assert risks[0] > risks[1] > risks[2]

    def test_repeatable(self):
        f = Majority(5)
        a = mc_risk(f, 200, NoiseModel.gaussian(0.5), replicates=1, master_seed=3)
        b = mc_risk(f, 200, NoiseModel.gaussian(0.5), replicates=1, master_seed=3)
        assert a.to_json() == b.to_json()

    def test_workers_do_not_change_result(self):
        f = AdditiveJunta(8, (1, 2, 3, 4))
        a = mc_risk(f, 500, NoiseModel.gaussian(0.5), replicates=12, master_seed=9)
        b = mc_risk(f, 500, NoiseModel.gaussian(0.5), replicates=12, master_seed=9, workers=3)
        assert a.to_json() == b.to_json()

    @pytest.mark.parametrize("f", [Majority(9), Tribes(6, 2, 3), AdditiveJunta(10, (1, 3, 5, 7))],
                             ids=lambda f: f.describe())
    def test_bias_variance_decomposition(self, f):
        rep = mc_risk(f, 800, NoiseModel.gaussian(0.5), EstimatorConfig(d0_override=2),
                      replicates=15, master_seed=2)
        for raw, b, v, clamped in zip(rep.raw_values, rep.bias, rep.variance, rep.values):
            assert abs(b + v - raw) <= 1e-10
            assert clamped <= raw + 1e-15

    def test_std_error(self):
        rep = mc_risk(Majority(5), 300, NoiseModel.gaussian(0.5), replicates=30, master_seed=0)
        v = np.array(rep.values)
        assert rep.std_error == pytest.approx(v.std(ddof=1) / math.sqrt(30), rel=1e-12)
        assert rep.mean_risk >= 0

    def test_high_dimension_fresh_points(self):
        f = Dictator(30, 2)
        rep = mc_risk(f, 4000, NoiseModel.gaussian(0.3), replicates=2, master_seed=0,
                      fresh_points=20_000)
        assert rep.mean_risk < 0.01 and rep.bias == []

    def test_uniform_noise(self):
        f = Dictator(8, 1)
        rep = mc_risk(f, 5000, NoiseModel.uniform(0.8), replicates=10, master_seed=0)
        assert rep.mean_risk < 0.01

    def test_seeds_distinct(self):
        seeds = {replicate_seed(0, r) for r in range(1000)}
        assert len(seeds) == 1000
        assert replicate_seed(0, 5) != replicate_seed(1, 5)


class TestBaseline:
    def test_dictator_quarter(self):
        for n in (100, 10_000):
            rep = constant_baseline_risk(Dictator(10, 1), n, NoiseModel.gaussian(0.5),
                                         replicates=200, master_seed=0)
            assert rep.mean_risk == pytest.approx(0.25, abs=0.02)

    def test_constant_target(self):
        rep = constant_baseline_risk(constant(6, 0.4), 100, NoiseModel.none(), replicates=3)
        assert rep.mean_risk == pytest.approx(0.0, abs=1e-20)

    def test_majority9(self):
        f, sigma, n = Majority(9), 0.5, 100
        var = f.to_table().variance()
        rep = constant_baseline_risk(f, n, NoiseModel.gaussian(sigma), replicates=400, master_seed=1)
        target = var + sigma ** 2 / n
        assert abs(rep.mean_risk - target) <= 0.1 * target


class TestSpectralSweep:
    def test_majority9(self):
        reps = spectral_sweep(Majority(9), [1, 2, 3], [0.5, 0.1])
        assert len(reps) == 6 and all(r.holds and r.J_size_ok for r in reps)

    def test_dictator(self):
        for r in spectral_sweep(Dictator(5, 3), [1, 2], [1.0, 0.5, 0.01]):
            assert r.tail_weight == 0.0

    def test_tribes(self):
        (r,) = spectral_sweep(Tribes(4, 2, 2), [1], [0.1])
        assert 0 < r.tail_weight <= r.bound

    def test_capacity(self):
        with pytest.raises(CapacityError):
            spectral_sweep(Majority(13), [1], [0.1])


def test_csv_schema():
    rep = mc_risk(Dictator(4, 1), 100, NoiseModel.gaussian(0.5), replicates=2, master_seed=7)
    text = format_csv([rep.csv_row("x")], CSV_FIELDS)
    header, row = text.strip().split("\n")
    assert header.split(",") == CSV_FIELDS
    cells = dict(zip(CSV_FIELDS, row.split(",")))
    assert float(cells["mean_risk"]) == rep.mean_risk
    assert cells["seed"] == "7" and cells["d"] == "4"
