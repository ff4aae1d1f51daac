# softval/confusion.py
"""
Soft confusion matrices.

Rows are reference classes, columns predicted classes. Element (i, j) sums
Zf(r_i, p_j) over the samples for the chosen AND-operator. Weak and strong
matrices can be recombined into optimistic and pessimistic matrices.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, NamedTuple, Sequence, Tuple, Union

import numpy as np

from softval.errors import ClassNameMismatch, MixedOperator, MixedProvenance, ShapeMismatch
from softval.membership import AndOperator, MembershipMatrix, check_compatible
from softval.numerics import compensated_sum
from softval.operators import zf

logger = logging.getLogger(__name__)


class Composite(str, Enum):
    """Tags of recombined matrices."""

    OPTIMISTIC = "opt"
    PESSIMISTIC = "pess"


MatrixTag = Union[AndOperator, Composite]


def _tag(value) -> MatrixTag:
    try:
        return AndOperator(value)
    except ValueError:
        return Composite(value)


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    counts: np.ndarray
    n_samples: int
    operator: MatrixTag
    class_names: Tuple[str, ...]

    def __post_init__(self):
        counts = np.array(self.counts, dtype=np.float64, copy=True)
        names = tuple(self.class_names)
        if counts.shape != (len(names), len(names)):
            raise ShapeMismatch(f"Counts of shape {counts.shape} do not match {len(names)} classes.")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "class_names", names)
        object.__setattr__(self, "operator", _tag(self.operator))

    def diagonal(self) -> np.ndarray:
        return np.diag(self.counts).copy()

    def __repr__(self):
        return (f"ConfusionMatrix(operator={self.operator.value}, n={self.n_samples}, "
                f"classes={list(self.class_names)})")


class Marginals(NamedTuple):
    row_sums: np.ndarray
    col_sums: np.ndarray
    total: float


def build(ref: MembershipMatrix, pred: MembershipMatrix, op: AndOperator) -> ConfusionMatrix:
    """
    Soft confusion matrix counts[i][j] = sum_n Zf(op, r_i, p_j).

    Args:
        ref: Reference memberships.
        pred: Predicted memberships for the same samples and classes.
        op: AND-operator.
    """
    check_compatible(ref, pred)
    op = AndOperator(op)
    # (n, ref class, pred class)
    per_sample = zf(op, ref.values[:, :, np.newaxis], pred.values[:, np.newaxis, :])
    counts = compensated_sum(per_sample)
    logger.debug(f"Built {op.value} confusion matrix from {ref.n_samples} samples.")
    return ConfusionMatrix(counts, ref.n_samples, op, ref.class_names)


def pool(matrices: Sequence[ConfusionMatrix]) -> ConfusionMatrix:
    """Elementwise sum of matrices from e.g. the folds of one cross validation run."""
    if not matrices:
        raise ValueError("Nothing to pool.")
    first = matrices[0]
    for cm in matrices[1:]:
        if cm.class_names != first.class_names:
            raise ClassNameMismatch(f"Cannot pool {list(cm.class_names)} with {list(first.class_names)}.")
        if cm.operator is not first.operator:
            raise MixedOperator(f"Cannot pool {cm.operator.value} with {first.operator.value} matrices.")
    counts = compensated_sum(np.stack([cm.counts for cm in matrices]))
    return ConfusionMatrix(counts, sum(cm.n_samples for cm in matrices), first.operator, first.class_names)


def _check_pair(a: ConfusionMatrix, b: ConfusionMatrix) -> None:
    if a.class_names != b.class_names or a.counts.shape != b.counts.shape:
        raise MixedProvenance("Matrices describe different classes.")
    if a.n_samples != b.n_samples:
        raise MixedProvenance(f"Matrices describe {a.n_samples} and {b.n_samples} samples.")


def recombine_opt_pess(weak: ConfusionMatrix, strong: ConfusionMatrix) -> Tuple[ConfusionMatrix, ConfusionMatrix]:
    """
    Optimistic matrix: weak diagonal with strong off-diagonal elements.
    Pessimistic matrix: strong diagonal with weak off-diagonal elements.
    """
    if weak.operator is not AndOperator.WEAK or strong.operator is not AndOperator.STRONG:
        raise MixedProvenance(f"Expected weak and strong matrices, got {weak.operator.value} "
                              f"and {strong.operator.value}.")
    _check_pair(weak, strong)
    on_diagonal = np.eye(len(weak.class_names), dtype=bool)
    opt = np.where(on_diagonal, weak.counts, strong.counts)
    pess = np.where(on_diagonal, strong.counts, weak.counts)
    return (ConfusionMatrix(opt, weak.n_samples, Composite.OPTIMISTIC, weak.class_names),
            ConfusionMatrix(pess, weak.n_samples, Composite.PESSIMISTIC, weak.class_names))


def decompose_opt_pess(opt: ConfusionMatrix, pess: ConfusionMatrix) -> Tuple[ConfusionMatrix, ConfusionMatrix]:
    """Inverse of recombine_opt_pess: rebuild the weak and strong matrices."""
    if opt.operator is not Composite.OPTIMISTIC or pess.operator is not Composite.PESSIMISTIC:
        raise MixedProvenance(f"Expected opt and pess matrices, got {opt.operator.value} "
                              f"and {pess.operator.value}.")
    _check_pair(opt, pess)
    on_diagonal = np.eye(len(opt.class_names), dtype=bool)
    weak = np.where(on_diagonal, opt.counts, pess.counts)
    strong = np.where(on_diagonal, pess.counts, opt.counts)
    return (ConfusionMatrix(weak, opt.n_samples, AndOperator.WEAK, opt.class_names),
            ConfusionMatrix(strong, opt.n_samples, AndOperator.STRONG, opt.class_names))


def marginals(cm: ConfusionMatrix) -> Marginals:
    """Row sums (reference classes), column sums (predicted classes) and the total."""
    return Marginals(row_sums=compensated_sum(cm.counts.T),
                     col_sums=compensated_sum(cm.counts),
                     total=compensated_sum(cm.counts.reshape(-1)))


def build_all(ref: MembershipMatrix, pred: MembershipMatrix,
              operators: Sequence[AndOperator]) -> List[ConfusionMatrix]:
    """Matrices for several operators, plus opt/pess when both weak and strong are requested."""
    matrices = [build(ref, pred, op) for op in operators]
    by_op = {cm.operator: cm for cm in matrices}
    if AndOperator.WEAK in by_op and AndOperator.STRONG in by_op:
        matrices.extend(recombine_opt_pess(by_op[AndOperator.WEAK], by_op[AndOperator.STRONG]))
    return matrices
