# softval/synthetic.py
"""
Synthetic data with gradual class transitions.

Each sample has a true posterior drawn uniformly from the simplex. The
classifier sees the posterior plus Gaussian noise, the reference label is a
crisp class drawn from the posterior. This mimics tissue with smooth
transitions between classes, where crisp labels are a random draw.
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from softval.curves_aggregation import GroupedPredictions
from softval.membership import MembershipMatrix, World, validate

logger = logging.getLogger(__name__)

DEFAULT_NOISE_SD = 0.05


def _class_names(n_classes: int, class_names: Optional[Sequence[str]]) -> Tuple[str, ...]:
    if class_names is None:
        return tuple(f"class{k}" for k in range(n_classes))
    if len(class_names) != n_classes:
        raise ValueError(f"{len(class_names)} class names for {n_classes} classes.")
    return tuple(class_names)


def gradual_transition_dataset(n_samples: int, n_classes: int = 3, noise_sd: float = DEFAULT_NOISE_SD,
                               rng: Optional[np.random.Generator] = None,
                               class_names: Optional[Sequence[str]] = None
                               ) -> Tuple[MembershipMatrix, MembershipMatrix, MembershipMatrix]:
    """
    Draw one test set.

    Returns:
        (crisp reference, soft closed-world prediction, true posterior)
    """
    if n_samples < 1 or n_classes < 2:
        raise ValueError("Need at least one sample and two classes.")
    rng = rng if rng is not None else np.random.default_rng()
    names = _class_names(n_classes, class_names)

    posterior = rng.dirichlet(np.ones(n_classes), size=n_samples)

    noisy = np.clip(posterior + rng.normal(0.0, noise_sd, size=posterior.shape), 0.0, 1.0)
    sums = noisy.sum(axis=1, keepdims=True)
    noisy = np.where(sums > 0.0, noisy / np.where(sums > 0.0, sums, 1.0), 1.0 / n_classes)

    # inverse-CDF draw of one label per row
    u = rng.random(n_samples)
    labels = np.minimum((u[:, np.newaxis] > np.cumsum(posterior, axis=1)).sum(axis=1), n_classes - 1)
    reference = np.zeros_like(posterior)
    reference[np.arange(n_samples), labels] = 1.0

    return (validate(reference, names, World.CLOSED),
            validate(noisy, names, World.CLOSED),
            validate(posterior, names, World.CLOSED))


def replicate_groups(n_replicates: int, n_samples: int, n_classes: int = 3,
                     noise_sd: float = DEFAULT_NOISE_SD, seed: Optional[int] = None,
                     class_names: Optional[Sequence[str]] = None) -> GroupedPredictions:
    """Independent test sets from the same model, keyed by replicate number."""
    rng = np.random.default_rng(seed)
    groups = {}
    for k in range(n_replicates):
        ref, pred, _ = gradual_transition_dataset(n_samples, n_classes, noise_sd, rng, class_names)
        groups[(str(k + 1),)] = (ref, pred)
    logger.debug(f"Generated {n_replicates} replicate(s) of {n_samples} samples.")
    return GroupedPredictions(groups, key_names=("replicate",))
