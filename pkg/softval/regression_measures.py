# softval/regression_measures.py
"""
Residual-based performance measures for the product operator.

The residual confusion matrix compares the observed product matrix with the
one an ideal prediction (p = r) would give. The class-wise measures are
1 - weighted MAE and 1 - weighted RMSE of the residuals p - r, weighted by
the reference memberships (sens, spec) or the predicted ones (ppv, npv).
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from softval.confusion import build
from softval.errors import InfeasibleMAE, LengthMismatch
from softval.membership import AndOperator, ClassRef, MembershipMatrix, World, check_compatible
from softval.measures import ErrorKind, Measure, MeasureResult
from softval.numerics import compensated_sum

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ResidualMatrix:
    """Delta = Z_prod(r, p) - Z_prod(r, r), plus the per-sample residuals p - r."""

    deltas: np.ndarray
    residuals: np.ndarray
    reference: np.ndarray
    class_names: Tuple[str, ...]

    @property
    def n_samples(self) -> int:
        return self.residuals.shape[0]

    def diagonal_terms(self, g: int) -> np.ndarray:
        """Per-sample diagonal element of Delta for class g: r_g * (p_g - r_g)."""
        return self.reference[:, g] * self.residuals[:, g]


def residual_matrix(ref: MembershipMatrix, pred: MembershipMatrix) -> ResidualMatrix:
    check_compatible(ref, pred)
    observed = build(ref, pred, AndOperator.PRODUCT).counts
    ideal = build(ref, ref, AndOperator.PRODUCT).counts
    residuals = pred.values - ref.values
    deltas = observed - ideal
    deltas.setflags(write=False)
    residuals.setflags(write=False)
    return ResidualMatrix(deltas, residuals, ref.values, ref.class_names)


def measure_weights(measure: Measure, r: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Per-sample weights: r (sens), 1 - r (spec), p (ppv), 1 - p (npv)."""
    if measure is Measure.SENS:
        return r
    if measure is Measure.SPEC:
        return 1.0 - r
    if measure is Measure.PPV:
        return p
    return 1.0 - p


def weighted_error(measure: Measure, kind: ErrorKind, ref_col, pred_col) -> Tuple[Optional[float], float]:
    """
    Weighted MAE or RMSE of p - r with the weights belonging to the measure.

    Returns:
        (error or None if undefined, denominator)
    """
    r = np.asarray(ref_col, dtype=np.float64)
    p = np.asarray(pred_col, dtype=np.float64)
    if r.ndim != 1 or r.shape != p.shape:
        raise LengthMismatch(f"Reference column {r.shape} and prediction column {p.shape} differ.")
    w = measure_weights(Measure(measure), r, p)
    denominator = compensated_sum(w)
    if denominator <= 0.0:
        return None, 0.0
    deviation = np.abs(p - r)
    if ErrorKind(kind) is ErrorKind.MAE:
        return compensated_sum(w * deviation) / denominator, denominator
    return math.sqrt(compensated_sum(w * deviation ** 2) / denominator), denominator


def error_columns(measure: Measure, kind: ErrorKind, ref_col, pred_col, class_name: str = "") -> MeasureResult:
    """1 - wMAE or 1 - wRMSE for one pair of membership columns."""
    error, denominator = weighted_error(measure, kind, ref_col, pred_col)
    value = None if error is None else min(max(1.0 - error, 0.0), 1.0)
    return MeasureResult(Measure(measure), class_name, ErrorKind(kind), value, denominator)


def _error_measure(measure: Measure, kind: ErrorKind, ref: MembershipMatrix,
                   pred: MembershipMatrix, g: ClassRef) -> MeasureResult:
    check_compatible(ref, pred)
    j = ref.class_index(g)
    return error_columns(measure, kind, ref.values[:, j], pred.values[:, j], ref.class_names[j])


def sens_mae(ref, pred, g):
    return _error_measure(Measure.SENS, ErrorKind.MAE, ref, pred, g)


def spec_mae(ref, pred, g):
    return _error_measure(Measure.SPEC, ErrorKind.MAE, ref, pred, g)


def ppv_mae(ref, pred, g):
    return _error_measure(Measure.PPV, ErrorKind.MAE, ref, pred, g)


def npv_mae(ref, pred, g):
    return _error_measure(Measure.NPV, ErrorKind.MAE, ref, pred, g)


def sens_rmse(ref, pred, g):
    return _error_measure(Measure.SENS, ErrorKind.RMSE, ref, pred, g)


def spec_rmse(ref, pred, g):
    return _error_measure(Measure.SPEC, ErrorKind.RMSE, ref, pred, g)


def ppv_rmse(ref, pred, g):
    return _error_measure(Measure.PPV, ErrorKind.RMSE, ref, pred, g)


def npv_rmse(ref, pred, g):
    return _error_measure(Measure.NPV, ErrorKind.RMSE, ref, pred, g)


def sens_mae_from_residuals(rm: ResidualMatrix, g: int) -> Optional[float]:
    """MAE sensitivity from the diagonal of Delta: 1 - sum |Delta_gg| / sum r_g."""
    denominator = compensated_sum(rm.reference[:, g])
    if denominator <= 0.0:
        return None
    return 1.0 - compensated_sum(np.abs(rm.diagonal_terms(g))) / denominator


# --- Bounds ---

def deviation_caps(ref_col) -> np.ndarray:
    """Largest possible |p - r| per sample: max(r, 1 - r)."""
    r = np.asarray(ref_col, dtype=np.float64)
    return np.maximum(r, 1.0 - r)


def _normalized(weights, n: int) -> np.ndarray:
    if weights is None:
        return np.full(n, 1.0 / n)
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (n,):
        raise LengthMismatch(f"{w.shape[0]} weights for {n} samples.")
    return w / compensated_sum(w)


# Above this many weighted samples the vertex search is replaced by its relaxation.
EXACT_ENVELOPE_SAMPLES = 12


def _rmse_max_greedy(caps: np.ndarray, w: np.ndarray, wmae: float) -> float:
    """Equal weights: push the largest caps to their cap first, the last sample takes the remainder."""
    budget = wmae
    squares = []
    for n in np.argsort(-caps, kind="stable"):
        if budget <= 0.0:
            break
        spend = min(w[n] * caps[n], budget)
        deviation = spend / w[n]
        squares.append(w[n] * deviation * deviation)
        budget -= spend
    return math.sqrt(max(math.fsum(squares), 0.0))


def _rmse_max_vertices(caps: np.ndarray, w: np.ndarray, wmae: float) -> float:
    """
    Unequal weights, few samples: the maximum of a convex function sits on a vertex,
    so every sample but one is at 0 or at its cap. Enumerate the capped subsets and
    the sample holding the remainder.
    """
    n = caps.shape[0]
    masks = ((np.arange(2 ** n)[:, None] >> np.arange(n)) & 1).astype(np.float64)
    spent = masks @ (w * caps)
    base = masks @ (w * caps ** 2)
    remainder = wmae - spent
    tol = 1e-12
    best = base[np.abs(remainder) <= tol]
    candidates = [float(best.max())] if best.size else []
    for f in range(n):
        fits = (masks[:, f] == 0.0) & (remainder >= -tol) & (remainder <= w[f] * caps[f] + tol)
        if np.any(fits):
            rest = np.clip(remainder[fits], 0.0, w[f] * caps[f])
            candidates.append(float((base[fits] + rest ** 2 / w[f]).max()))
    return math.sqrt(max(candidates))


def _rmse_max_relaxed(caps: np.ndarray, w: np.ndarray, wmae: float) -> float:
    """
    Unequal weights, many samples: upper bound from sum w d^2 <= sum (w d) cap.
    Budget goes to the largest caps first, every unit of it counted at its cap.
    """
    budget = wmae
    terms = []
    for n in np.argsort(-caps, kind="stable"):
        if budget <= 0.0:
            break
        spend = min(w[n] * caps[n], budget)
        terms.append(spend * caps[n])
        budget -= spend
    return math.sqrt(max(math.fsum(terms), 0.0))


def _rmse_max(caps: np.ndarray, w: np.ndarray, wmae: float) -> float:
    """Largest weighted RMSE at a fixed weighted MAE (exact, or an upper bound for many unequal weights)."""
    if wmae <= 0.0:
        return 0.0
    used = w > 0.0
    caps, w = caps[used], w[used]
    if np.all(w == w[0]):
        return _rmse_max_greedy(caps, w, wmae)
    if caps.shape[0] <= EXACT_ENVELOPE_SAMPLES:
        return _rmse_max_vertices(caps, w, wmae)
    logger.debug(f"rmse_max for {caps.shape[0]} unequally weighted samples is an upper bound.")
    return _rmse_max_relaxed(caps, w, wmae)


def _rmse_min(caps: np.ndarray, w: np.ndarray, wmae: float) -> float:
    """
    Smallest weighted RMSE at a fixed weighted MAE: deviations min(cap, level),
    the common level chosen so the weighted mean deviation equals wmae.
    """
    if wmae <= 0.0:
        return 0.0
    order = np.argsort(caps, kind="stable")
    caps_sorted, w_sorted = caps[order], w[order]
    spent = 0.0
    remaining_weight = float(w_sorted.sum())
    level = 0.0
    for k in range(len(caps_sorted)):
        level = (wmae - spent) / remaining_weight if remaining_weight > 0 else caps_sorted[k]
        if level <= caps_sorted[k]:
            break
        spent += w_sorted[k] * caps_sorted[k]
        remaining_weight -= w_sorted[k]
    deviations = np.minimum(caps, level)
    return math.sqrt(math.fsum((w * deviations ** 2).tolist()))


def mae_rmse_bounds(wmae: float, ref_col=None, weights=None) -> Tuple[float, float]:
    """
    Range the weighted RMSE can take for a given weighted MAE.

    Crisp reference (ref_col None or all memberships 0/1): MAE <= RMSE <= sqrt(MAE).
    Soft reference: per-sample deviations are capped at max(r, 1 - r), so the
    envelope is computed by water filling for the given weights.

    Args:
        wmae: Observed weighted MAE.
        ref_col: Reference memberships of the class, or None for the crisp bound.
        weights: Per-sample weights (default equal); normalized internally.

    Returns:
        (rmse_min, rmse_max)
    """
    if wmae < 0.0:
        raise InfeasibleMAE(f"wMAE must be non-negative, got {wmae}.")
    crisp = ref_col is None or bool(np.all(np.isin(np.asarray(ref_col, dtype=np.float64), (0.0, 1.0))))
    if crisp:
        if wmae > 1.0:
            raise InfeasibleMAE(f"wMAE {wmae} exceeds 1, the largest crisp deviation.")
        return wmae, math.sqrt(wmae)

    caps = deviation_caps(ref_col)
    w = _normalized(weights, caps.shape[0])
    attainable = math.fsum((w * caps).tolist())
    if wmae > attainable + 1e-12:
        raise InfeasibleMAE(f"wMAE {wmae} exceeds {attainable}, the weighted mean of the deviation caps.")
    wmae = min(wmae, attainable)
    return _rmse_min(caps, w, wmae), _rmse_max(caps, w, wmae)


def interclass_bound(world: World, n_classes: int, kind: ErrorKind) -> float:
    """Largest summed error: 2 (MAE) or sqrt(2) (RMSE) closed world, n_g or sqrt(n_g) one-class."""
    limit = 2.0 if World(world) is World.CLOSED else float(n_classes)
    return limit if ErrorKind(kind) is ErrorKind.MAE else math.sqrt(limit)


def interclass_error(ref: MembershipMatrix, pred: MembershipMatrix,
                     kind: ErrorKind = ErrorKind.MAE, normalize: bool = False) -> float:
    """
    Error summed over all classes: sum_g mean_n |p - r| or sqrt(sum_g mean_n (p - r)^2).

    With normalize, the result is divided by interclass_bound so it lies in [0, 1].
    """
    check_compatible(ref, pred)
    residuals = pred.values - ref.values
    n = ref.n_samples
    if ErrorKind(kind) is ErrorKind.MAE:
        value = math.fsum((compensated_sum(np.abs(residuals)) / n).tolist())
    else:
        value = math.sqrt(math.fsum((compensated_sum(residuals ** 2) / n).tolist()))
    if normalize:
        world = World.CLOSED if ref.world is World.CLOSED and pred.world is World.CLOSED else World.OPEN
        value /= interclass_bound(world, ref.n_classes, kind)
    return value
