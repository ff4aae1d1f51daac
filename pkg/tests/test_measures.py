# tests/test_measures.py
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from softval.errors import LengthMismatch, MixedMeasure
from softval.measures import (
    ErrorKind,
    Measure,
    MeasureResult,
    base_sens,
    class_proportions,
    compute,
    ideal,
    measure_columns,
    npv,
    parse_flavor,
    ppv,
    sens,
    spec,
    weighted_average,
)
from softval.membership import AndOperator, World, validate

from conftest import TWO_CLASSES, memberships, one_hot, random_closed, random_labels, random_open

OPERATORS = [AndOperator.STRONG, AndOperator.PRODUCT, AndOperator.WEAK]


class TestBaseSens:
    @pytest.mark.parametrize("op, expected", [
        (AndOperator.WEAK, 1.3 / 1.5),
        (AndOperator.PRODUCT, 1.1 / 1.5),
        (AndOperator.STRONG, 0.6),
    ])
    def test_two_samples(self, op, expected):
        result = base_sens([1.0, 0.5], [0.8, 0.6], op)
        assert result.value == pytest.approx(expected)
        assert result.denominator == pytest.approx(1.5)

    def test_zero_denominator_is_undefined(self):
        result = base_sens([0.0, 0.0], [0.3, 0.9], AndOperator.PRODUCT)
        assert result.value is None
        assert not result.defined
        assert result.reason == "zero denominator"
        assert result.denominator == 0.0

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            base_sens([1.0, 0.0], [1.0], AndOperator.WEAK)

    @settings(max_examples=50)
    @given(st.lists(st.tuples(memberships, memberships), min_size=1, max_size=20))
    def test_range_and_operator_order(self, pairs):
        r = [a for a, _ in pairs]
        p = [b for _, b in pairs]
        results = [base_sens(r, p, op) for op in OPERATORS]
        if results[0].defined:
            values = [res.value for res in results]
            assert all(0.0 <= v <= 1.0 for v in values)
            assert values[0] <= values[1] + 1e-9
            assert values[1] <= values[2] + 1e-9
        else:
            assert all(not res.defined for res in results)


class TestMeasures:
    def test_spec_by_substitution(self, two_samples):
        ref, pred = two_samples
        assert spec(ref, pred, "A", AndOperator.PRODUCT).value == pytest.approx(0.4)

    def test_single_sample(self, single_sample):
        ref, pred = single_sample
        assert sens(ref, pred, "A", AndOperator.PRODUCT).value == pytest.approx(0.8)
        assert sens(ref, pred, "A", AndOperator.WEAK).value == pytest.approx(1.0)
        assert sens(ref, pred, "A", AndOperator.STRONG).value == pytest.approx(0.6)

    def test_ppv_swaps_roles(self, two_samples):
        ref, pred = two_samples
        result = ppv(ref, pred, "A", AndOperator.PRODUCT)
        assert result.value == pytest.approx(1.1 / 1.4)
        assert result.denominator == pytest.approx(1.4)

    def test_npv(self, two_samples):
        ref, pred = two_samples
        # 1 - p = [0.2, 0.4], 1 - r = [0, 0.5]
        assert npv(ref, pred, "A", AndOperator.PRODUCT).value == pytest.approx(0.2 / 0.6)

    def test_result_carries_names(self, two_samples):
        result = compute(Measure.NPV, *two_samples, 1, AndOperator.WEAK)
        assert result.measure is Measure.NPV
        assert result.class_name == "B"
        assert result.operator is AndOperator.WEAK

    def test_two_class_closed_world_symmetry(self, rng):
        ref, pred = random_closed(rng, 60, 2, TWO_CLASSES), random_closed(rng, 60, 2, TWO_CLASSES)
        for op in OPERATORS:
            assert spec(ref, pred, "A", op).value == pytest.approx(sens(ref, pred, "B", op).value)
            assert npv(ref, pred, "A", op).value == pytest.approx(ppv(ref, pred, "B", op).value)

    @pytest.mark.parametrize("measure", list(Measure))
    def test_crisp_data_matches_classical_ratios(self, rng, measure):
        n, n_g = 1000, 3
        truth, guess = random_labels(rng, n, n_g), random_labels(rng, n, n_g)
        ref, pred = one_hot(truth, n_g), one_hot(guess, n_g)
        for g in range(n_g):
            tp = np.sum((truth == g) & (guess == g))
            fn = np.sum((truth == g) & (guess != g))
            fp = np.sum((truth != g) & (guess == g))
            tn = np.sum((truth != g) & (guess != g))
            expected = {Measure.SENS: tp / (tp + fn), Measure.SPEC: tn / (tn + fp),
                        Measure.PPV: tp / (tp + fp), Measure.NPV: tn / (tn + fn)}[measure]
            for op in OPERATORS:
                assert compute(measure, ref, pred, g, op).value == pytest.approx(expected, abs=1e-12)

    def test_absent_class_is_undefined(self):
        ref = validate([[1, 0], [1, 0]], TWO_CLASSES)
        pred = validate([[0.7, 0.3], [0.9, 0.1]], TWO_CLASSES)
        assert sens(ref, pred, "B", AndOperator.PRODUCT).value is None
        assert spec(ref, pred, "B", AndOperator.PRODUCT).defined

    def test_open_world(self, rng):
        ref = validate(rng.random((30, 2)), TWO_CLASSES, World.OPEN)
        pred = validate(rng.random((30, 2)), TWO_CLASSES, World.OPEN)
        result = sens(ref, pred, "B", AndOperator.PRODUCT)
        assert 0.0 <= result.value <= 1.0


class TestIdeal:
    def test_weak_ideal_is_one(self, rng):
        ref = random_closed(rng, 50, 3)
        for measure in Measure:
            assert ideal(measure, ref, 0, AndOperator.WEAK).value == pytest.approx(1.0)

    def test_soft_reference_caps_product_and_strong(self):
        ref = validate([[0.5, 0.5]], TWO_CLASSES)
        assert ideal(Measure.SENS, ref, "A", AndOperator.PRODUCT).value == pytest.approx(0.5)
        assert ideal(Measure.SENS, ref, "A", AndOperator.STRONG).value == 0.0

    def test_crisp_reference_ideal_is_one(self, rng):
        ref = one_hot(random_labels(rng, 40, 3), 3)
        for op in OPERATORS:
            assert ideal(Measure.SENS, ref, 0, op).value == 1.0


class TestWeightedAverage:
    def test_matches_pooled_computation(self, rng):
        ref, pred = random_closed(rng, 90, 3), random_closed(rng, 90, 3)
        masks = [np.arange(90) % 3 == k for k in range(3)]
        for op in OPERATORS:
            parts = [sens(ref.select_rows(m), pred.select_rows(m), "c1", op) for m in masks]
            assert weighted_average(parts).value == pytest.approx(sens(ref, pred, "c1", op).value)
            assert weighted_average(parts).denominator == pytest.approx(sens(ref, pred, "c1", op).denominator)

    def test_undefined_groups_contribute_nothing(self):
        parts = [MeasureResult(Measure.SENS, "A", AndOperator.WEAK, 0.5, 2.0),
                 MeasureResult(Measure.SENS, "A", AndOperator.WEAK, None, 0.0)]
        assert weighted_average(parts).value == pytest.approx(0.5)

    def test_all_undefined(self):
        parts = [MeasureResult(Measure.SENS, "A", AndOperator.WEAK, None, 0.0)] * 2
        assert weighted_average(parts).value is None

    def test_rejects_mixed_results(self):
        with pytest.raises(MixedMeasure):
            weighted_average([MeasureResult(Measure.SENS, "A", AndOperator.WEAK, 0.5, 1.0),
                              MeasureResult(Measure.SPEC, "A", AndOperator.WEAK, 0.5, 1.0)])
        with pytest.raises(MixedMeasure):
            weighted_average([])


def test_result_consistency_checks():
    with pytest.raises(ValueError):
        MeasureResult(Measure.SENS, "A", AndOperator.WEAK, None, 1.0)
    with pytest.raises(ValueError):
        MeasureResult(Measure.SENS, "A", AndOperator.WEAK, 0.4, 0.0)


def test_parse_flavor():
    assert parse_flavor("product") is AndOperator.PRODUCT
    assert parse_flavor("rmse") is ErrorKind.RMSE
    with pytest.raises(ValueError):
        parse_flavor("median")


def test_measure_columns_relabels():
    result = measure_columns("spec", [1.0, 0.0], [1.0, 0.0], "strong", class_name="X")
    assert result.measure is Measure.SPEC
    assert result.class_name == "X"
    assert result.value == 1.0


def test_class_proportions(two_samples):
    assert class_proportions(two_samples[0]) == pytest.approx({"A": 0.75, "B": 0.25})


def _soft_column(rng, n):
    values = rng.random(n)
    values[rng.random(n) < 0.1] = 0.0
    values[rng.random(n) < 0.1] = 1.0
    return values


def test_symmetry_suite():
    rng = np.random.default_rng(5)
    for _ in range(1000):
        n = int(rng.integers(1, 51))
        r, p = _soft_column(rng, n), _soft_column(rng, n)
        for op in OPERATORS:
            pairs = [
                (measure_columns(Measure.PPV, r, p, op), measure_columns(Measure.SENS, p, r, op)),
                (measure_columns(Measure.SPEC, r, p, op), measure_columns(Measure.SENS, 1.0 - r, 1.0 - p, op)),
                (measure_columns(Measure.NPV, r, p, op), measure_columns(Measure.SENS, 1.0 - p, 1.0 - r, op)),
            ]
            for left, right in pairs:
                if left.value is None or right.value is None:
                    assert left.value is None and right.value is None
                else:
                    assert left.value == pytest.approx(right.value, abs=1e-12)


def test_operator_ordering_on_random_fixtures():
    rng = np.random.default_rng(11)
    for k in range(1000):
        n, n_g = int(rng.integers(1, 51)), int(rng.integers(2, 5))
        if k % 2:
            ref, pred = random_closed(rng, n, n_g), random_closed(rng, n, n_g)
        else:
            ref, pred = random_open(rng, n, n_g), random_open(rng, n, n_g)
        for measure in Measure:
            for g in range(n_g):
                strong, product, weak = (compute(measure, ref, pred, g, op).value for op in OPERATORS)
                if None in (strong, product, weak):
                    continue
                assert strong <= product + 1e-12
                assert product <= weak + 1e-12
