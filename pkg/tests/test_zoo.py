import math

import numpy as np
import pytest

from monofourier.core import TruthTable
from monofourier.errors import CapacityError, DomainError
from monofourier.influence import influence_profile, is_monotone
from monofourier.zoo import (AdditiveJunta, Dictator, Majority, MiddleLayer, Table, Tribes,
                             constant, from_json, layer_point, layer_rank,
                             tribes_influence_exact, tribes_pivotal_influence)

from oracles import middle_layer_value

ZOO = [
    Dictator(1, 1), Dictator(5, 3), AdditiveJunta(6, (1, 4, 6)), Tribes(4, 2, 2), Tribes(7, 3, 2),
    Majority(1), Majority(4), Majority(9), MiddleLayer(6, (2, 3, 5, 6), 0.4, 0b101101),
    Table(TruthTable(2, [0.0, 0.2, 0.5, 0.9])),
]


class TestEvaluate:
    def test_dictator(self):
        assert Dictator(3, 1).evaluate(0b001) == 1.0

    def test_junta(self):
        assert AdditiveJunta(3, (1, 2)).evaluate(0b101) == 0.5

    def test_majority_tie_is_zero(self):
        assert Majority(4).evaluate(0b0011) == 0.0
        assert Majority(4).evaluate(0b0111) == 1.0

    def test_width_mismatch(self):
        with pytest.raises(DomainError):
            Dictator(3, 1).evaluate(0b1000)

    def test_d64(self):
        f = Majority(64)
        assert f.evaluate((1 << 64) - 1) == 1.0
        assert f.evaluate((1 << 32) - 1) == 0.0
        assert Dictator(64, 64).evaluate(1 << 63) == 1.0

    @pytest.mark.parametrize("f", ZOO, ids=lambda f: f.describe())
    def test_evaluate_equals_table(self, f):
        t = f.to_table()
        assert all(f.evaluate(x) == t.values[x] for x in range(1 << f.dim))

    @pytest.mark.parametrize("f", ZOO, ids=lambda f: f.describe())
    def test_monotone_unit_range(self, f):
        t = f.to_table()
        assert is_monotone(t)
        assert t.values.min() >= 0 and t.values.max() <= 1


class TestTables:
    def test_dictator(self):
        np.testing.assert_array_equal(Dictator(1, 1).to_table().values, [0, 1])

    def test_majority3(self):
        np.testing.assert_array_equal(Majority(3).to_table().values, [0, 0, 0, 1, 0, 1, 1, 1])

    def test_tribes_2x2(self):
        v = Tribes(4, 2, 2).to_table().values
        for x in range(16):
            want = (x & 0b11) == 0b11 or (x & 0b1100) == 0b1100
            assert v[x] == float(want)

    def test_capacity(self):
        with pytest.raises(CapacityError):
            Majority(21).to_table()

    def test_invalid_specs(self):
        with pytest.raises(DomainError):
            Dictator(3, 4)
        with pytest.raises(DomainError):
            Tribes(5, 3, 2)
        with pytest.raises(DomainError):
            AdditiveJunta(3, ())


class TestInfluences:
    def test_dictator_and_junta_exact(self):
        assert influence_profile(Dictator(6, 4).to_table()).total_l1 == 1.0
        for s in range(1, 9):
            assert influence_profile(AdditiveJunta.first(8, s).to_table()).total_l1 == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("w,l,total", [(1, 1, 1.0), (2, 2, 1.5), (2, 4, 27 / 16),
                                           (3, 2, 6 * 0.25 * 0.875)])
    def test_tribes(self, w, l, total):
        assert tribes_influence_exact(w, l) == pytest.approx(total, abs=1e-12)
        assert tribes_pivotal_influence(w, l) * w * l == pytest.approx(total, abs=1e-15)

    def test_tribes_capacity(self):
        with pytest.raises(CapacityError):
            tribes_influence_exact(3, 7)

    def test_majority_growth(self):
        ratios, prev = [], 0.0
        for d in range(3, 16, 2):
            total = influence_profile(Majority(d).to_table()).total_l1
            # closed form d * C(d-1, (d-1)/2) / 2^(d-1) as an independent check
            assert total == pytest.approx(d * math.comb(d - 1, (d - 1) // 2) / 2 ** (d - 1), abs=1e-12)
            assert total > prev
            prev = total
            ratios.append(total / math.sqrt(d))
        assert all(0.6 <= r <= 1.0 for r in ratios)


class TestMiddleLayer:
    def test_rank_bijection(self):
        for s in range(1, 11):
            m = s // 2
            layer = [z for z in range(1 << s) if bin(z).count("1") == m]
            assert [layer_rank(z, s) for z in layer] == list(range(len(layer)))
            assert [layer_point(r, s, m) for r in range(len(layer))] == layer

    def test_all_ones_and_zeros(self):
        s, beta = 4, 0.3
        ones = MiddleLayer(4, (1, 2, 3, 4), beta, (1 << 6) - 1).to_table().values
        zeros = MiddleLayer(4, (1, 2, 3, 4), beta, 0).to_table().values
        for x in range(16):
            w = bin(x).count("1")
            assert ones[x] == (beta if w >= 2 else 0.0)
            assert zeros[x] == (beta if w > 2 else 0.0)

    def test_s2_example(self):
        # layer points of {0,1}^2 with weight 1: rank 0 = 0b01 i.e. (1,0)
        f = MiddleLayer(2, (1, 2), 0.5, 0b01)
        np.testing.assert_array_equal(f.to_table().values, [0.0, 0.5, 0.0, 0.5])

    def test_matches_oracle(self, rng):
        support = (2, 5, 3, 7, 1)
        for _ in range(5):
            omega = int(rng.integers(0, 1 << 10))
            f = MiddleLayer(7, support, 0.7, omega)
            v = f.to_table().values
            for x in range(1 << 7):
                assert v[x] == middle_layer_value(x, support, 0.7, omega)

    def test_outside_support_ignored(self):
        f = MiddleLayer(5, (1, 2), 0.5, 0b10)
        v = f.to_table().values
        assert np.array_equal(v[:4], v[4:8]) and np.array_equal(v[:4], v[28:])

    def test_large_layer(self):
        # N = C(14, 7) = 3432 positions, wider than one machine word
        omega = 1 << 3431
        f = MiddleLayer(20, tuple(range(1, 15)), 1.0, omega)
        top = layer_point(3431, 14, 7)
        assert f.evaluate(top) == 1.0
        assert f.evaluate(layer_point(0, 14, 7)) == 0.0


class TestJson:
    @pytest.mark.parametrize("f", ZOO + [constant(3, 0.25)], ids=lambda f: f.describe())
    def test_round_trip(self, f):
        import json
        back = from_json(json.loads(json.dumps(f.to_json())))
        assert back == f
        np.testing.assert_array_equal(back.to_table().values, f.to_table().values)

    def test_unknown_field(self):
        with pytest.raises(DomainError):
            from_json({"tag": "majority", "dim": 3, "extra": 1})

    def test_missing_field(self):
        with pytest.raises(DomainError):
            from_json({"tag": "dictator", "dim": 3})

    def test_unknown_tag(self):
        with pytest.raises(DomainError):
            from_json({"tag": "parity", "dim": 3})
