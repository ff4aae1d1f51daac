# softval/operators.py
"""
Per-sample conjunction functions Zf(r, p) for soft confusion matrices.

weak    min(r, p)            highest possible overlap (best case)
strong  max(r + p - 1, 0)    lowest possible overlap (worst case)
product r * p                expected overlap under random mixing

All three reduce to the Boolean AND on crisp {0, 1} inputs. Inputs are
validated, not clamped: clamping happens once in membership.validate.
"""

from typing import Callable, Dict, Union

import numpy as np

from softval.errors import DomainError
from softval.membership import AndOperator

Membership = Union[float, np.ndarray]
# Zf value(s) in [0, 1]; a float for scalar input, an array otherwise.
ConjunctionValue = Union[float, np.ndarray]


def _check_domain(x: Membership, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if not np.all((arr >= 0.0) & (arr <= 1.0)):
        raise DomainError(f"{name} must lie in [0, 1], got {x!r}.")
    return arr


def _out(value: np.ndarray) -> ConjunctionValue:
    return float(value) if np.ndim(value) == 0 else value


def zf_weak(r: Membership, p: Membership) -> ConjunctionValue:
    r_arr, p_arr = _check_domain(r, "reference"), _check_domain(p, "prediction")
    return _out(np.minimum(r_arr, p_arr))


def zf_strong(r: Membership, p: Membership) -> ConjunctionValue:
    r_arr, p_arr = _check_domain(r, "reference"), _check_domain(p, "prediction")
    return _out(np.maximum(r_arr + p_arr - 1.0, 0.0))


def zf_product(r: Membership, p: Membership) -> ConjunctionValue:
    r_arr, p_arr = _check_domain(r, "reference"), _check_domain(p, "prediction")
    return _out(r_arr * p_arr)


_KERNELS: Dict[AndOperator, Callable[[Membership, Membership], ConjunctionValue]] = {
    AndOperator.WEAK: zf_weak,
    AndOperator.STRONG: zf_strong,
    AndOperator.PRODUCT: zf_product,
}


def zf(op: Union[AndOperator, str], r: Membership, p: Membership) -> ConjunctionValue:
    """Dispatch to the conjunction selected by op."""
    return _KERNELS[AndOperator(op)](r, p)


def interval_width(r: Membership, p: Membership) -> ConjunctionValue:
    """Width of the best-to-worst case overlap interval, zf_weak - zf_strong."""
    r_arr, p_arr = _check_domain(r, "reference"), _check_domain(p, "prediction")
    return _out(np.minimum(r_arr, p_arr) - np.maximum(r_arr + p_arr - 1.0, 0.0))


def sens_interval_width(r: Membership, p: Membership) -> ConjunctionValue:
    """
    Single-sample sensitivity interval width, (zf_weak - zf_strong) / r.

    Reaches 1 (no information at all) on the triangle r <= 0.5, r <= p <= 1 - r.
    Undefined (nan) where r = 0.
    """
    r_arr = _check_domain(r, "reference")
    width = np.asarray(interval_width(r, p), dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        return _out(np.where(r_arr > 0.0, width / np.where(r_arr > 0.0, r_arr, 1.0), np.nan))
