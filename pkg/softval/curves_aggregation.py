# softval/curves_aggregation.py
"""
Threshold-sweep specificity/sensitivity curves and statistics across groups
(iterations, folds, patients) of a validation run.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple, TypeVar

import numpy as np

from softval.errors import ClassNameMismatch, SoftReferenceError, SoftValError, TooFewGroups, annotate
from softval.membership import (
    AndOperator,
    ClassRef,
    HardeningRule,
    MembershipMatrix,
    check_compatible,
    harden,
)
from softval.measures import Flavor, Measure, MeasureResult, measure_columns, parse_flavor
from softval.regression_measures import error_columns
from softval.numerics import group_sort_key

logger = logging.getLogger(__name__)

GroupKey = Tuple[str, ...]
T = TypeVar("T")

DEFAULT_PERCENTILES = (25.0, 50.0, 75.0)

# Extra thresholds just outside [0, 1]: everything positive (strict >) or nothing positive (>=).
BELOW_ZERO = float(np.nextafter(0.0, -1.0))
ABOVE_ONE = float(np.nextafter(1.0, 2.0))


class GroupedPredictions:
    """
    Reference/prediction pairs keyed by group, e.g. ("3", "7") for iteration 3, fold 7.

    Groups are always iterated in sorted key order (numeric parts numerically).
    """

    def __init__(self, groups: Dict[GroupKey, Tuple[MembershipMatrix, MembershipMatrix]],
                 key_names: Sequence[str] = ()):
        if not groups:
            raise ValueError("At least one group is required.")
        self.key_names = tuple(key_names)
        class_names = None
        ordered = {}
        for key in sorted(groups, key=group_sort_key):
            ref, pred = groups[key]
            check_compatible(ref, pred)
            if class_names is None:
                class_names = ref.class_names
            elif ref.class_names != class_names:
                raise ClassNameMismatch(f"Group {key} has classes {list(ref.class_names)}, "
                                        f"expected {list(class_names)}.")
            if len(key) != len(self.key_names):
                raise ValueError(f"Group key {key} does not match key columns {list(self.key_names)}.")
            ordered[tuple(key)] = (ref, pred)
        self._groups = ordered
        self.class_names: Tuple[str, ...] = class_names

    def __len__(self):
        return len(self._groups)

    def __iter__(self) -> Iterator[GroupKey]:
        return iter(self._groups)

    def __getitem__(self, key: GroupKey) -> Tuple[MembershipMatrix, MembershipMatrix]:
        return self._groups[tuple(key)]

    def items(self):
        return self._groups.items()

    def keys(self) -> List[GroupKey]:
        return list(self._groups)

    @property
    def n_samples(self) -> int:
        return sum(ref.n_samples for ref, _ in self._groups.values())

    def label(self, key: GroupKey) -> str:
        """Readable group name, e.g. 'iteration=3,fold=7'."""
        if not key:
            return "all"
        return ",".join(f"{name}={value}" for name, value in zip(self.key_names, key))

    def pooled(self) -> Tuple[MembershipMatrix, MembershipMatrix]:
        """All groups stacked into one reference and one prediction matrix."""
        refs = [ref for ref, _ in self._groups.values()]
        preds = [pred for _, pred in self._groups.values()]
        return MembershipMatrix.concatenate(refs), MembershipMatrix.concatenate(preds)

    def map(self, fn: Callable[[MembershipMatrix, MembershipMatrix], T], workers: int = 1) -> Dict[GroupKey, T]:
        """
        Apply fn(ref, pred) to every group.

        Groups are independent, so they may run on a thread pool; the result dict
        is always filled in sorted key order.
        """
        keys = self.keys()

        def _run(key):
            ref, pred = self._groups[key]
            try:
                return fn(ref, pred)
            except SoftValError as e:
                if key:
                    annotate(e, self.label(key))
                raise

        if workers <= 1 or len(keys) == 1:
            values = [_run(key) for key in keys]
        else:
            with ThreadPoolExecutor(max_workers=workers) as executor:
                values = list(executor.map(_run, keys))
        return dict(zip(keys, values))

    def __repr__(self):
        return (f"GroupedPredictions(groups={len(self)}, key_names={list(self.key_names)}, "
                f"classes={list(self.class_names)})")


@dataclass(frozen=True)
class CurvePoint:
    """One (specificity, sensitivity) pair; threshold None for winner-takes-all or soft points."""

    class_name: str
    threshold: Optional[float]
    spec: Optional[float]
    sens: Optional[float]


@dataclass(frozen=True)
class CurveBand:
    """Percentile of sens and spec across groups at one threshold of a shared grid."""

    class_name: str
    threshold: float
    percentile: float
    spec: Optional[float]
    sens: Optional[float]


@dataclass(frozen=True)
class GroupStatistic:
    class_name: str
    measure: Measure
    operator: Flavor
    prediction: str
    n_groups: int
    n_undefined: int
    mean: Optional[float]
    sd: Optional[float]
    p25: Optional[float]
    p50: Optional[float]
    p75: Optional[float]


@dataclass(frozen=True)
class VarianceComparison:
    class_name: str
    measure: Measure
    hardening: str
    n_groups: int
    var_soft: float
    var_crisp: float
    inflation_ratio: Optional[float]
    var_bernoulli: Optional[float]


# --- Curves ---

def default_thresholds(pred_col, inclusive: bool = False) -> np.ndarray:
    """
    Exact step curve: 0, every distinct predicted membership, 1.

    When a prediction sits exactly on 0 (strict >) or 1 (>=), an extra threshold
    outside [0, 1] is added so the curve still starts with every sample positive
    and ends with none.
    """
    p = np.asarray(pred_col, dtype=np.float64)
    grid = np.unique(np.concatenate([[0.0, 1.0], p]))
    if p.size and not inclusive and p.min() <= 0.0:
        grid = np.concatenate([[BELOW_ZERO], grid])
    if p.size and inclusive and p.max() >= 1.0:
        grid = np.concatenate([grid, [ABOVE_ONE]])
    return grid


def _crisp_reference(ref: MembershipMatrix, j: int, crisp_only: bool) -> np.ndarray:
    column = ref.values[:, j]
    crisp = (column == 0.0) | (column == 1.0)
    if not np.all(crisp):
        n_soft = int((~crisp).sum())
        if crisp_only:
            first = int(np.flatnonzero(~crisp)[0])
            raise SoftReferenceError(f"{n_soft} sample(s) have soft reference memberships for class "
                                     f"'{ref.class_names[j]}' (first: {ref.sample_id(first)}); "
                                     "threshold curves need crisp references.")
        logger.debug(f"Excluding {n_soft} soft-reference sample(s) from the '{ref.class_names[j]}' curve.")
    return crisp


def _point(class_name: str, threshold: Optional[float], r: np.ndarray, p: np.ndarray) -> CurvePoint:
    sens = measure_columns(Measure.SENS, r, p, AndOperator.PRODUCT, class_name)
    spec = measure_columns(Measure.SPEC, r, p, AndOperator.PRODUCT, class_name)
    return CurvePoint(class_name, threshold, spec.value, sens.value)


def spec_sens_curve(ref: MembershipMatrix, pred: MembershipMatrix, g: ClassRef,
                    thresholds: Optional[Sequence[float]] = None,
                    crisp_only: bool = True, inclusive: bool = False) -> List[CurvePoint]:
    """
    Sweep the hardening threshold for class g and report crisp spec/sens at each step.

    A sample counts as predicted positive when its membership exceeds the
    threshold (or reaches it, with inclusive=True).

    Args:
        ref: Reference memberships; class g must be crisp.
        pred: Soft predictions.
        g: Class name or index.
        thresholds: Thresholds in [0, 1]; default is the exact step curve.
        crisp_only: Raise SoftReferenceError on soft reference rows instead of excluding them.
        inclusive: Use >= instead of >.
    """
    check_compatible(ref, pred)
    j = ref.class_index(g)
    keep = _crisp_reference(ref, j, crisp_only)
    r = ref.values[keep, j]
    p = pred.values[keep, j]
    if thresholds is None:
        grid = default_thresholds(p, inclusive)
    else:
        grid = np.unique(np.asarray(thresholds, dtype=np.float64))
        if grid.size and (grid[0] < 0.0 or grid[-1] > 1.0):
            raise ValueError("Curve thresholds must lie in [0, 1].")

    name = ref.class_names[j]
    points = []
    for t in grid:
        positive = (p >= t) if inclusive else (p > t)
        points.append(_point(name, float(t), r, positive.astype(np.float64)))
    return points


def working_point(ref: MembershipMatrix, pred: MembershipMatrix, g: ClassRef,
                  rule: Optional[HardeningRule] = None) -> CurvePoint:
    """
    Crisp (spec, sens) of one hardening rule for class g.

    Without a rule, the soft product-operator point of the unhardened prediction.
    """
    check_compatible(ref, pred)
    j = ref.class_index(g)
    used = harden(pred, rule) if rule is not None else pred
    threshold = rule.threshold if rule is not None else None
    return _point(ref.class_names[j], threshold, ref.values[:, j], used.values[:, j])


def curve_bands(gp: GroupedPredictions, g: ClassRef, grid: Optional[Sequence[float]] = None,
                percentiles: Sequence[float] = DEFAULT_PERCENTILES, crisp_only: bool = True,
                workers: int = 1) -> List[CurveBand]:
    """
    Percentiles of sens and spec across groups on a shared threshold grid.

    Each group contributes its own step curve evaluated at the grid thresholds
    (vertical averaging); undefined values are left out.
    """
    grid = np.linspace(0.0, 1.0, 101) if grid is None else np.unique(np.asarray(grid, dtype=np.float64))
    index = gp[gp.keys()[0]][0].class_index(g)
    name = gp.class_names[index]
    curves = gp.map(lambda ref, pred: spec_sens_curve(ref, pred, index, grid, crisp_only), workers)

    bands = []
    for k, t in enumerate(grid):
        sens = [curve[k].sens for curve in curves.values() if curve[k].sens is not None]
        spec = [curve[k].spec for curve in curves.values() if curve[k].spec is not None]
        for q in percentiles:
            bands.append(CurveBand(name, float(t), float(q),
                                   float(np.percentile(spec, q)) if spec else None,
                                   float(np.percentile(sens, q)) if sens else None))
    return bands


# --- Per-group evaluation and statistics ---

def evaluate_group(ref: MembershipMatrix, pred: MembershipMatrix, measures: Sequence[Measure],
                   flavors: Sequence[Flavor], classes: Optional[Sequence[ClassRef]] = None) -> List[MeasureResult]:
    """
    All requested measures of one group, ordered by class, then measure, then flavor.

    Operator flavors (weak/strong/product) give ratio measures, error flavors
    (mae/rmse) give 1 - weighted error.
    """
    check_compatible(ref, pred)
    indices = range(ref.n_classes) if classes is None else [ref.class_index(g) for g in classes]
    results = []
    for j in indices:
        r, p, name = ref.values[:, j], pred.values[:, j], ref.class_names[j]
        for measure in measures:
            for flavor in (parse_flavor(f) for f in flavors):
                if isinstance(flavor, AndOperator):
                    results.append(measure_columns(measure, r, p, flavor, name))
                else:
                    results.append(error_columns(measure, flavor, r, p, name))
    return results


def sample_variance(values: Sequence[float]) -> float:
    """Variance with n - 1 denominator; exactly 0 for identical values."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size < 2:
        raise TooFewGroups(f"A variance needs at least 2 values, got {arr.size}.")
    if np.all(arr == arr[0]):
        return 0.0
    return float(np.var(arr, ddof=1))


def _summary(values: List[float]):
    if not values:
        return None, None, None, None, None
    mean = float(np.mean(values))
    sd = float(np.sqrt(sample_variance(values))) if len(values) >= 2 else None
    p25, p50, p75 = (float(q) for q in np.percentile(values, DEFAULT_PERCENTILES))
    return mean, sd, p25, p50, p75


def group_statistics(gp: GroupedPredictions, measures: Sequence[Measure], flavors: Sequence[Flavor],
                     classes: Optional[Sequence[ClassRef]] = None, rule: Optional[HardeningRule] = None,
                     workers: int = 1) -> List[GroupStatistic]:
    """
    Mean, sample SD and quartiles of every (class, measure, flavor) across groups.

    With a hardening rule the predictions are hardened first. Groups where a
    measure is undefined are left out and counted in n_undefined.
    """
    if len(gp) < 2:
        raise TooFewGroups(f"Group statistics need at least 2 groups, got {len(gp)}.")

    def _evaluate(ref, pred):
        used = harden(pred, rule) if rule is not None else pred
        return evaluate_group(ref, used, measures, flavors, classes)

    per_group = list(gp.map(_evaluate, workers).values())
    prediction = "hardened" if rule is not None else "soft"
    statistics = []
    for position, first in enumerate(per_group[0]):
        column = [results[position] for results in per_group]
        defined = [result.value for result in column if result.defined]
        statistics.append(GroupStatistic(first.class_name, first.measure, first.operator, prediction,
                                         len(column), len(column) - len(defined), *_summary(defined)))
    logger.debug(f"Computed {len(statistics)} {prediction} statistics over {len(gp)} groups.")
    return statistics


def bernoulli_variance(p: float, n: float) -> float:
    """Variance of a proportion estimated from n Bernoulli trials: p(1 - p) / n."""
    if n <= 0:
        raise ValueError(f"Number of trials must be positive, got {n}.")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"Proportion must lie in [0, 1], got {p}.")
    return p * (1.0 - p) / n


def variance_comparison(gp: GroupedPredictions, g: ClassRef, rule: HardeningRule = HardeningRule(),
                        measure: Measure = Measure.SENS, workers: int = 1) -> VarianceComparison:
    """
    Variance across groups of the soft product-operator measure versus the same
    measure after hardening the predictions.

    inflation_ratio = var_crisp / var_soft, None when var_soft is 0.
    """
    if len(gp) < 2:
        raise TooFewGroups(f"A variance comparison needs at least 2 groups, got {len(gp)}.")
    index = gp[gp.keys()[0]][0].class_index(g)

    def _pair(ref, pred):
        r = ref.values[:, index]
        soft = measure_columns(measure, r, pred.values[:, index], AndOperator.PRODUCT)
        crisp = measure_columns(measure, r, harden(pred, rule).values[:, index], AndOperator.PRODUCT)
        return soft, crisp

    pairs = [pair for pair in gp.map(_pair, workers).values() if pair[0].defined and pair[1].defined]
    if len(pairs) < 2:
        raise TooFewGroups(f"Only {len(pairs)} group(s) have a defined {Measure(measure).value}.")
    var_soft = sample_variance([soft.value for soft, _ in pairs])
    var_crisp = sample_variance([crisp.value for _, crisp in pairs])
    mean_crisp = float(np.mean([crisp.value for _, crisp in pairs]))
    mean_trials = float(np.mean([crisp.denominator for _, crisp in pairs]))
    var_bernoulli = bernoulli_variance(min(max(mean_crisp, 0.0), 1.0), mean_trials) if mean_trials > 0 else None
    ratio = var_crisp / var_soft if var_soft > 0.0 else None
    return VarianceComparison(gp.class_names[index], Measure(measure), rule.describe(), len(pairs),
                              var_soft, var_crisp, ratio, var_bernoulli)
