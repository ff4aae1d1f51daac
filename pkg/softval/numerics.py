# softval/numerics.py
"""Summation and ordering helpers shared by the core modules."""

import math
from typing import Iterable, Sequence, Tuple

import numpy as np


def compensated_sum(terms: np.ndarray) -> np.ndarray:
    """
    Sum an array over its first axis with exactly rounded summation.

    math.fsum is order independent, so the result does not depend on how the
    samples were partitioned or on the number of worker threads.

    Args:
        terms: Array of shape (n, ...) with the per-sample terms.

    Returns:
        Array of shape terms.shape[1:] (a float for 1-D input).
    """
    terms = np.asarray(terms, dtype=np.float64)
    if terms.ndim == 1:
        return math.fsum(terms.tolist())
    flat = terms.reshape(terms.shape[0], -1)
    sums = [math.fsum(flat[:, k].tolist()) for k in range(flat.shape[1])]
    return np.array(sums, dtype=np.float64).reshape(terms.shape[1:])


def total(values: Iterable[float]) -> float:
    """Exactly rounded sum of an iterable of floats."""
    return math.fsum(values)


def natural_key(value: str) -> Tuple[int, float, str]:
    """Sort key that orders numeric strings numerically and others lexically."""
    try:
        number = float(value)
    except (TypeError, ValueError):
        return (1, 0.0, str(value))
    if math.isnan(number):
        return (1, 0.0, str(value))
    return (0, number, str(value))


def group_sort_key(key: Sequence[str]) -> Tuple[Tuple[int, float, str], ...]:
    """Sort key for a group key tuple."""
    return tuple(natural_key(part) for part in key)
