# softval/measures.py
"""
Sensitivity, specificity and predictive values for soft reference and prediction.

All four measures come from one base function through argument substitution:

    sens(r, p) = sum Zf(r, p) / sum r
    spec(r, p) = sens(1 - r, 1 - p)
    ppv(r, p)  = sens(p, r)
    npv(r, p)  = sens(1 - p, 1 - r)

A measure with a zero denominator is undefined (value None), never 0 or NaN.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Sequence, Union

import numpy as np

from softval.errors import LengthMismatch, MixedMeasure
from softval.membership import AndOperator, ClassRef, MembershipMatrix, check_compatible
from softval.numerics import compensated_sum, total
from softval.operators import zf

logger = logging.getLogger(__name__)

UNDEFINED_REASON = "zero denominator"


class Measure(str, Enum):
    SENS = "sens"
    SPEC = "spec"
    PPV = "ppv"
    NPV = "npv"


class ErrorKind(str, Enum):
    """Regression-style flavors: 1 - weighted MAE and 1 - weighted RMSE."""

    MAE = "mae"
    RMSE = "rmse"


Flavor = Union[AndOperator, ErrorKind]


def parse_flavor(value) -> Flavor:
    if isinstance(value, (AndOperator, ErrorKind)):
        return value
    try:
        return AndOperator(value)
    except ValueError:
        return ErrorKind(value)


@dataclass(frozen=True)
class MeasureResult:
    """One measure for one class, with the weight it carries when averaged."""

    measure: Measure
    class_name: str
    operator: Flavor
    value: Optional[float]
    denominator: float

    def __post_init__(self):
        object.__setattr__(self, "measure", Measure(self.measure))
        object.__setattr__(self, "operator", parse_flavor(self.operator))
        if self.denominator < 0:
            raise ValueError(f"Negative denominator {self.denominator}.")
        if (self.value is None) != (self.denominator == 0):
            raise ValueError("A measure is defined exactly when its denominator is positive.")

    @property
    def defined(self) -> bool:
        return self.value is not None

    @property
    def reason(self) -> Optional[str]:
        return None if self.defined else UNDEFINED_REASON

    def relabel(self, measure: Measure, class_name: str) -> "MeasureResult":
        return MeasureResult(measure, class_name, self.operator, self.value, self.denominator)


def _ratio(numerator: float, denominator: float) -> Optional[float]:
    if denominator <= 0.0:
        return None
    return min(max(numerator / denominator, 0.0), 1.0)


def base_sens(ref_col, pred_col, op: AndOperator) -> MeasureResult:
    """
    Soft sensitivity of one column pair: sum Zf(r, p) / sum r.

    Every other ratio measure is this function with substituted arguments.
    """
    r = np.asarray(ref_col, dtype=np.float64)
    p = np.asarray(pred_col, dtype=np.float64)
    if r.ndim != 1 or r.shape != p.shape:
        raise LengthMismatch(f"Reference column {r.shape} and prediction column {p.shape} differ.")
    op = AndOperator(op)
    denominator = compensated_sum(r)
    numerator = compensated_sum(zf(op, r, p)) if r.size else 0.0
    return MeasureResult(Measure.SENS, "", op, _ratio(numerator, denominator), max(denominator, 0.0))


def _substitute(measure: Measure, r: np.ndarray, p: np.ndarray):
    if measure is Measure.SENS:
        return r, p
    if measure is Measure.SPEC:
        return 1.0 - r, 1.0 - p
    if measure is Measure.PPV:
        return p, r
    return 1.0 - p, 1.0 - r


def measure_columns(measure: Measure, ref_col, pred_col, op: AndOperator, class_name: str = "") -> MeasureResult:
    """Any of the four ratio measures for a single pair of membership columns."""
    measure = Measure(measure)
    r = np.asarray(ref_col, dtype=np.float64)
    p = np.asarray(pred_col, dtype=np.float64)
    if r.shape != p.shape:
        raise LengthMismatch(f"Reference column {r.shape} and prediction column {p.shape} differ.")
    a, b = _substitute(measure, r, p)
    return base_sens(a, b, op).relabel(measure, class_name)


def compute(measure: Measure, ref: MembershipMatrix, pred: MembershipMatrix,
            g: ClassRef, op: AndOperator) -> MeasureResult:
    check_compatible(ref, pred)
    index = ref.class_index(g)
    return measure_columns(measure, ref.values[:, index], pred.values[:, index], op,
                           ref.class_names[index])


def sens(ref: MembershipMatrix, pred: MembershipMatrix, g: ClassRef, op: AndOperator) -> MeasureResult:
    return compute(Measure.SENS, ref, pred, g, op)


def spec(ref: MembershipMatrix, pred: MembershipMatrix, g: ClassRef, op: AndOperator) -> MeasureResult:
    return compute(Measure.SPEC, ref, pred, g, op)


def ppv(ref: MembershipMatrix, pred: MembershipMatrix, g: ClassRef, op: AndOperator) -> MeasureResult:
    return compute(Measure.PPV, ref, pred, g, op)


def npv(ref: MembershipMatrix, pred: MembershipMatrix, g: ClassRef, op: AndOperator) -> MeasureResult:
    return compute(Measure.NPV, ref, pred, g, op)


def ideal(measure: Measure, ref: MembershipMatrix, g: ClassRef, op: AndOperator) -> MeasureResult:
    """Performance for a prediction that reproduces the reference exactly."""
    return compute(measure, ref, ref, g, op)


def weighted_average(results: Sequence[MeasureResult]) -> MeasureResult:
    """
    Combine results of disjoint groups, weighting each by its denominator.

    Groups with denominator 0 contribute nothing; the combined result is
    undefined only when all denominators are 0.
    """
    if not results:
        raise MixedMeasure("No results to average.")
    first = results[0]
    for result in results[1:]:
        if (result.measure, result.class_name, result.operator) != (first.measure, first.class_name, first.operator):
            raise MixedMeasure(f"Cannot average {result.measure.value}/{result.class_name}/"
                               f"{result.operator.value} with {first.measure.value}/"
                               f"{first.class_name}/{first.operator.value}.")
    weighted = [r for r in results if r.defined and r.denominator > 0]
    denominator = total(r.denominator for r in results)
    numerator = total(r.value * r.denominator for r in weighted)
    return MeasureResult(first.measure, first.class_name, first.operator,
                         _ratio(numerator, denominator), denominator)


def class_proportions(ref: MembershipMatrix) -> Dict[str, float]:
    """Share of each reference class in the test set, sum r_g / n."""
    sums = compensated_sum(ref.values)
    return {name: float(sums[j]) / ref.n_samples for j, name in enumerate(ref.class_names)}
