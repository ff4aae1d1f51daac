# softval/oracle.py
"""
Brute-force reference implementations.

Nothing here is fast. Every function recomputes a result of the core modules
the long way (enumerating unit placements, looping over samples, searching a
grid) so the tests can compare the two.
"""

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import comb
from scipy.stats import hypergeom

from softval.errors import LengthMismatch, TooLarge
from softval.membership import AndOperator, ClassRef, MembershipMatrix, check_compatible
from softval.measures import ErrorKind, Flavor, Measure, parse_flavor

MAX_UNITS = 16
MAX_GRID_SAMPLES = 3


@dataclass(frozen=True)
class DiscretizedSample:
    """
    One sample split into N equal units.

    ref_counts[g] units belong to class g in the reference, pred_counts[g] in
    the prediction, so the memberships are count / N exactly.
    """

    N: int
    ref_counts: Tuple[int, ...]
    pred_counts: Tuple[int, ...]
    closed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "ref_counts", tuple(int(c) for c in self.ref_counts))
        object.__setattr__(self, "pred_counts", tuple(int(c) for c in self.pred_counts))
        if self.N < 1:
            raise ValueError(f"N must be at least 1, got {self.N}.")
        if len(self.ref_counts) != len(self.pred_counts):
            raise LengthMismatch("Reference and prediction need one count per class.")
        for counts in (self.ref_counts, self.pred_counts):
            if any(c < 0 or c > self.N for c in counts):
                raise ValueError(f"Counts {counts} must lie in 0..{self.N}.")
            if self.closed and sum(counts) != self.N:
                raise ValueError(f"Closed-world counts {counts} must sum to {self.N}.")

    @classmethod
    def from_memberships(cls, ref: Sequence[float], pred: Sequence[float], N: int,
                         closed: bool = False) -> "DiscretizedSample":
        """Discretize rational memberships; each must be an exact multiple of 1/N."""
        def _counts(values):
            counts = []
            for value in values:
                units = Fraction(value).limit_denominator(N) * N
                if units.denominator != 1 or abs(float(units) / N - value) > 1e-12:
                    raise ValueError(f"Membership {value} is not a multiple of 1/{N}.")
                counts.append(int(units))
            return tuple(counts)
        return cls(N, _counts(ref), _counts(pred), closed)

    def ref_membership(self, g: int) -> Fraction:
        return Fraction(self.ref_counts[g], self.N)

    def pred_membership(self, g: int) -> Fraction:
        return Fraction(self.pred_counts[g], self.N)


def _check_size(N: int) -> None:
    if N > MAX_UNITS:
        raise TooLarge(f"Enumeration is limited to {MAX_UNITS} units, got {N}.")


def overlap_distribution(N: int, a: int, b: int) -> Dict[int, int]:
    """
    How many placements of b predicted units share k units with a reference set of size a.

    The reference set is fixed to the first a units; by symmetry every other
    reference placement gives the same distribution.
    """
    _check_size(N)
    reference = set(range(a))
    distribution = Counter(len(reference.intersection(chosen))
                           for chosen in itertools.combinations(range(N), b))
    assert sum(distribution.values()) == comb(N, b, exact=True)
    return dict(sorted(distribution.items()))


def overlap_extremes(s: DiscretizedSample, g: int) -> Tuple[Fraction, Fraction]:
    """Smallest and largest fraction of units positive in both reference and prediction."""
    overlaps = overlap_distribution(s.N, s.ref_counts[g], s.pred_counts[g])
    return Fraction(min(overlaps), s.N), Fraction(max(overlaps), s.N)


def overlap_expectation(s: DiscretizedSample, g: int) -> Fraction:
    """Mean co-positive fraction over all equally likely placements."""
    overlaps = overlap_distribution(s.N, s.ref_counts[g], s.pred_counts[g])
    placements = sum(overlaps.values())
    return Fraction(sum(k * count for k, count in overlaps.items()), placements * s.N)


def hypergeometric_expectation(N: int, a: int, b: int) -> float:
    """Closed-form mean overlap fraction: hypergeometric mean a*b/N, divided by N."""
    return float(hypergeom(N, a, b).mean()) / N


# --- Measures by definition ---

def _conjunction(op: AndOperator, r: float, p: float) -> float:
    if op is AndOperator.WEAK:
        return min(r, p)
    if op is AndOperator.STRONG:
        return max(r + p - 1.0, 0.0)
    return r * p


def _weight(measure: Measure, r: float, p: float) -> float:
    return {Measure.SENS: r, Measure.SPEC: 1.0 - r, Measure.PPV: p, Measure.NPV: 1.0 - p}[measure]


def measure_by_definition(ref: MembershipMatrix, pred: MembershipMatrix, measure: Measure,
                          g: ClassRef, op: Union[Flavor, str]) -> Optional[float]:
    """
    Direct per-sample loop over the defining sums, without the symmetry dispatch.

    sens = sum Zf(r, p) / sum r          spec = sum Zf(1-r, 1-p) / sum (1-r)
    ppv  = sum Zf(r, p) / sum p          npv  = sum Zf(1-r, 1-p) / sum (1-p)
    error flavors: 1 - weighted mean of |p - r| (or its root mean square).
    """
    check_compatible(ref, pred)
    measure = Measure(measure)
    flavor = parse_flavor(op)
    j = ref.class_index(g)
    numerator = []
    denominator = []
    for n in range(ref.n_samples):
        r = float(ref.values[n, j])
        p = float(pred.values[n, j])
        w = _weight(measure, r, p)
        denominator.append(w)
        if isinstance(flavor, ErrorKind):
            deviation = abs(p - r)
            numerator.append(w * (deviation if flavor is ErrorKind.MAE else deviation * deviation))
        elif measure in (Measure.SENS, Measure.PPV):
            numerator.append(_conjunction(flavor, r, p))
        else:
            numerator.append(_conjunction(flavor, 1.0 - r, 1.0 - p))
    total_weight = math.fsum(denominator)
    if total_weight <= 0.0:
        return None
    ratio = math.fsum(numerator) / total_weight
    if flavor is ErrorKind.MAE:
        ratio = 1.0 - ratio
    elif flavor is ErrorKind.RMSE:
        ratio = 1.0 - math.sqrt(ratio)
    return min(max(ratio, 0.0), 1.0)


def crisp_confusion_ratios(ref_labels: Sequence, pred_labels: Sequence, g) -> Dict[str, Optional[float]]:
    """Classical sens/spec/ppv/npv of class g from integer TP/FN/TN/FP counts."""
    if len(ref_labels) != len(pred_labels):
        raise LengthMismatch(f"{len(ref_labels)} reference labels, {len(pred_labels)} predicted.")
    tp = fn = tn = fp = 0
    for truth, guess in zip(ref_labels, pred_labels):
        if truth == g:
            tp, fn = (tp + 1, fn) if guess == g else (tp, fn + 1)
        else:
            fp, tn = (fp + 1, tn) if guess == g else (fp, tn + 1)

    def _ratio(numerator, denominator):
        return numerator / denominator if denominator else None

    return {"sens": _ratio(tp, tp + fn), "spec": _ratio(tn, tn + fp),
            "ppv": _ratio(tp, tp + fp), "npv": _ratio(tn, tn + fn)}


def rmse_envelope_grid(caps: Sequence[float], weights: Optional[Sequence[float]], wmae: float,
                       resolution: float = 1e-3) -> Tuple[Optional[float], Optional[float]]:
    """
    Smallest and largest weighted RMSE over deviation vectors on a grid.

    All but the last deviation run over a grid of step `resolution` on [0, cap];
    the last one is solved from the weighted MAE constraint. Returns (None, None)
    when no grid point is feasible.
    """
    caps = np.asarray(caps, dtype=np.float64)
    n = caps.shape[0]
    if n > MAX_GRID_SAMPLES:
        raise TooLarge(f"Grid search is limited to {MAX_GRID_SAMPLES} samples, got {n}.")
    w = np.full(n, 1.0 / n) if weights is None else np.asarray(weights, dtype=np.float64)
    w = w / w.sum()

    axes = [np.linspace(0.0, cap, int(round(cap / resolution)) + 1) for cap in caps[:-1]]
    free = np.meshgrid(*axes, indexing="ij") if axes else []
    spent = sum(w[k] * free[k] for k in range(n - 1)) if axes else np.zeros(())
    last = (wmae - spent) / w[-1]
    feasible = (last >= -1e-12) & (last <= caps[-1] + 1e-12)
    if not np.any(feasible):
        return None, None
    squares = sum(w[k] * free[k] ** 2 for k in range(n - 1)) + w[-1] * np.clip(last, 0.0, caps[-1]) ** 2
    values = np.sqrt(np.asarray(squares)[feasible])
    return float(values.min()), float(values.max())
