# softval/membership.py
"""
Class membership matrices: validation, label encoding, negation and hardening.

A membership matrix holds one row per sample and one column per class with
values in [0, 1]. In a closed world every row sums to 1; in an open
(one-class) world the classes are modelled independently.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from enum import Enum
from typing import Iterable, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from softval.errors import (
    OutOfRange,
    RowSumViolation,
    ShapeError,
    ShapeMismatch,
    ClassNameMismatch,
    TieError,
    UnknownClass,
)

logger = logging.getLogger(__name__)

ClassRef = Union[int, str]

DEFAULT_TOL_CLAMP = 1e-9
DEFAULT_TOL_SUM = 1e-6
# Row sums closer to 1 than this differ by floating point rounding only.
ROUNDING_DRIFT = 1e-12


class World(str, Enum):
    CLOSED = "closed"
    OPEN = "open"


class AndOperator(str, Enum):
    """Conjunction used to generalize the Boolean AND to soft memberships."""

    WEAK = "weak"
    STRONG = "strong"
    PRODUCT = "product"


class HardeningKind(str, Enum):
    WINNER_TAKES_ALL = "winner_takes_all"
    THRESHOLD = "threshold"


class TieBreak(str, Enum):
    LOWEST_INDEX = "lowest_index"
    ERROR = "error"


@dataclass(frozen=True)
class Tolerances:
    """Numeric tolerances applied once, when memberships enter the system."""

    clamp: float = DEFAULT_TOL_CLAMP
    row_sum: float = DEFAULT_TOL_SUM

    def __post_init__(self):
        if self.clamp < 0 or self.row_sum < 0:
            raise ValueError("Tolerances must be non-negative.")


@dataclass(frozen=True)
class HardeningRule:
    """How soft memberships are turned into crisp labels."""

    kind: HardeningKind = HardeningKind.WINNER_TAKES_ALL
    threshold: Optional[float] = None
    tie_break: TieBreak = TieBreak.LOWEST_INDEX
    inclusive: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", HardeningKind(self.kind))
        object.__setattr__(self, "tie_break", TieBreak(self.tie_break))
        if self.kind is HardeningKind.THRESHOLD:
            if self.threshold is None:
                raise ValueError("A threshold rule needs a threshold.")
            if not 0.0 < self.threshold < 1.0:
                raise ValueError(f"Hardening threshold must lie in (0, 1), got {self.threshold}.")
        elif self.threshold is not None:
            raise ValueError("Only threshold rules carry a threshold.")

    @classmethod
    def winner_takes_all(cls, tie_break: TieBreak = TieBreak.LOWEST_INDEX) -> "HardeningRule":
        return cls(HardeningKind.WINNER_TAKES_ALL, None, tie_break)

    @classmethod
    def at_threshold(cls, threshold: float, inclusive: bool = False) -> "HardeningRule":
        return cls(HardeningKind.THRESHOLD, float(threshold), TieBreak.LOWEST_INDEX, inclusive)

    @classmethod
    def parse(cls, text: str) -> "HardeningRule":
        """
        Parse the command line notation.

        Accepted forms: "wta", "wta:error", "threshold=<t>", "threshold>=<t>";
        <t> is a decimal or a fraction such as 1/3.
        """
        spec = text.strip().lower()
        if spec in ("wta", "winner_takes_all"):
            return cls.winner_takes_all()
        if spec in ("wta:error", "winner_takes_all:error"):
            return cls.winner_takes_all(TieBreak.ERROR)
        for prefix, inclusive in (("threshold>=", True), ("threshold=", False)):
            if spec.startswith(prefix):
                try:
                    value = float(Fraction(spec[len(prefix):].strip()))
                except (ValueError, ZeroDivisionError):
                    raise ValueError(f"Invalid hardening threshold in '{text}'.")
                return cls.at_threshold(value, inclusive)
        raise ValueError(f"Unknown hardening rule '{text}'. Use 'wta' or 'threshold=<t>'.")

    def describe(self) -> str:
        if self.kind is HardeningKind.WINNER_TAKES_ALL:
            return "wta" if self.tie_break is TieBreak.LOWEST_INDEX else "wta:error"
        op = ">=" if self.inclusive else "="
        return f"threshold{op}{self.threshold!r}"


@dataclass(frozen=True, eq=False)
class MembershipMatrix:
    """
    Immutable n x n_g matrix of class memberships.

    Use validate() to build one from raw numbers; the constructor only checks
    structure and freezes the array.
    """

    values: np.ndarray
    class_names: Tuple[str, ...]
    world: World = World.CLOSED
    sample_ids: Optional[Tuple[str, ...]] = field(default=None)

    def __post_init__(self):
        array = np.array(self.values, dtype=np.float64, copy=True)
        if array.ndim != 2:
            raise ShapeError(f"Membership matrix must be 2-D, got {array.ndim}-D.")
        names = tuple(str(name) for name in self.class_names)
        if array.shape[1] != len(names):
            raise ShapeError(f"{array.shape[1]} columns but {len(names)} class names.")
        if len(set(names)) != len(names):
            raise ShapeError(f"Class names must be distinct: {list(names)}")
        if self.sample_ids is not None and len(self.sample_ids) != array.shape[0]:
            raise ShapeError("One sample id per row is required.")
        array.setflags(write=False)
        object.__setattr__(self, "values", array)
        object.__setattr__(self, "class_names", names)
        object.__setattr__(self, "world", World(self.world))
        if self.sample_ids is not None:
            object.__setattr__(self, "sample_ids", tuple(str(s) for s in self.sample_ids))

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def n_classes(self) -> int:
        return self.values.shape[1]

    def class_index(self, g: ClassRef) -> int:
        """Resolve a class name or index, raising UnknownClass."""
        if isinstance(g, (int, np.integer)) and not isinstance(g, bool):
            if 0 <= g < self.n_classes:
                return int(g)
            raise UnknownClass(f"Class index {g} out of range 0..{self.n_classes - 1}.")
        try:
            return self.class_names.index(str(g))
        except ValueError:
            raise UnknownClass(f"Unknown class '{g}'. Known classes: {list(self.class_names)}")

    def column(self, g: ClassRef) -> np.ndarray:
        return self.values[:, self.class_index(g)]

    def sample_id(self, row: int) -> str:
        return self.sample_ids[row] if self.sample_ids is not None else str(row)

    def crisp_rows(self) -> np.ndarray:
        """Boolean mask of rows whose memberships are all exactly 0 or 1."""
        return np.all((self.values == 0.0) | (self.values == 1.0), axis=1)

    @property
    def is_crisp(self) -> bool:
        return bool(np.all(self.crisp_rows()))

    def select_rows(self, mask: np.ndarray) -> "MembershipMatrix":
        mask = np.asarray(mask)
        ids = None
        if self.sample_ids is not None:
            ids = tuple(np.asarray(self.sample_ids, dtype=object)[mask])
        return MembershipMatrix(self.values[mask], self.class_names, self.world, ids)

    def with_world(self, world: World) -> "MembershipMatrix":
        return MembershipMatrix(self.values, self.class_names, world, self.sample_ids)

    @classmethod
    def concatenate(cls, matrices: Sequence["MembershipMatrix"]) -> "MembershipMatrix":
        """Stack matrices sample-wise; all must share class names and world."""
        if not matrices:
            raise ShapeError("Nothing to concatenate.")
        first = matrices[0]
        for other in matrices[1:]:
            if other.class_names != first.class_names:
                raise ClassNameMismatch(f"{list(other.class_names)} != {list(first.class_names)}")
        world = first.world if all(m.world is first.world for m in matrices) else World.OPEN
        ids = None
        if all(m.sample_ids is not None for m in matrices):
            ids = tuple(s for m in matrices for s in m.sample_ids)
        return cls(np.vstack([m.values for m in matrices]), first.class_names, world, ids)

    def __repr__(self):
        return (f"MembershipMatrix(n={self.n_samples}, classes={list(self.class_names)}, "
                f"world={self.world.value})")


def validate(matrix,
             class_names: Sequence[str],
             world: World = World.CLOSED,
             tolerances: Tolerances = Tolerances(),
             sample_ids: Optional[Sequence[str]] = None) -> MembershipMatrix:
    """
    Check raw memberships and turn them into a MembershipMatrix.

    Entries within tol_clamp outside [0, 1] are clamped. Closed-world rows whose
    sum is within tol_sum of 1 are renormalized, any other row sum is an error.

    Args:
        matrix: n x n_g array-like of reals.
        class_names: One distinct name per column.
        world: Closed (rows sum to 1) or open (one-class) semantics.
        tolerances: Clamp and row-sum tolerances.
        sample_ids: Optional identifiers used in error messages.

    Returns:
        A validated, read-only MembershipMatrix.
    """
    world = World(world)
    try:
        values = np.array(matrix, dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise ShapeError(f"Memberships are not a numeric matrix: {e}")
    if values.ndim != 2:
        raise ShapeError(f"Membership matrix must be 2-D, got shape {values.shape}.")
    n, n_g = values.shape
    if n < 1:
        raise ShapeError("At least one sample is required.")
    if n_g < 2:
        raise ShapeError(f"At least two classes are required, got {n_g}.")
    if len(class_names) != n_g:
        raise ShapeError(f"{n_g} columns but {len(class_names)} class names.")
    if sample_ids is not None and len(sample_ids) != n:
        raise ShapeError(f"{n} rows but {len(sample_ids)} sample ids.")

    def _sid(row: int) -> str:
        return str(sample_ids[row]) if sample_ids is not None else str(row)

    if not np.all(np.isfinite(values)):
        row, col = np.argwhere(~np.isfinite(values))[0]
        raise OutOfRange(f"Sample {_sid(row)}, class {class_names[col]}: membership is not finite. "
                         "Missing memberships are not supported.")

    low, high = -tolerances.clamp, 1.0 + tolerances.clamp
    outside = (values < low) | (values > high)
    if np.any(outside):
        row, col = np.argwhere(outside)[0]
        raise OutOfRange(f"Sample {_sid(row)}, class {class_names[col]}: membership "
                         f"{values[row, col]!r} outside [0, 1].")
    values = np.clip(values, 0.0, 1.0)

    if world is World.CLOSED:
        row_sums = values.sum(axis=1)
        bad = np.abs(row_sums - 1.0) > tolerances.row_sum
        if np.any(bad):
            row = int(np.flatnonzero(bad)[0])
            raise RowSumViolation(
                f"Sample {_sid(row)}: closed-world memberships sum to {row_sums[row]!r}, not 1 "
                f"(tolerance {tolerances.row_sum}).",
                sample_id=_sid(row), row_sum=float(row_sums[row]))
        drifted = row_sums != 1.0
        if np.any(drifted):
            visible = np.abs(row_sums - 1.0) > ROUNDING_DRIFT
            if np.any(visible):
                row = int(np.flatnonzero(visible)[0])
                logger.warning(f"Renormalizing {int(visible.sum())} row(s) within row-sum tolerance "
                               f"(first: sample {_sid(row)}, sum {row_sums[row]!r}).")
            else:
                logger.debug(f"Renormalizing {int(drifted.sum())} row(s) off by rounding only.")
            values[drifted] = values[drifted] / row_sums[drifted, np.newaxis]

    return MembershipMatrix(values, tuple(class_names), world,
                            tuple(sample_ids) if sample_ids is not None else None)


def negate_class(m: MembershipMatrix, g: ClassRef) -> np.ndarray:
    """Membership to the dummy class 'not g': 1 - m[:, g]."""
    return 1.0 - m.column(g)


def close_world(m: MembershipMatrix) -> MembershipMatrix:
    """Turn open-world memberships into closed-world ones by row renormalization."""
    row_sums = m.values.sum(axis=1)
    if np.any(row_sums <= 0.0):
        row = int(np.flatnonzero(row_sums <= 0.0)[0])
        raise RowSumViolation(f"Sample {m.sample_id(row)} has no membership to any class.",
                              sample_id=m.sample_id(row), row_sum=0.0)
    return MembershipMatrix(m.values / row_sums[:, np.newaxis], m.class_names, World.CLOSED,
                            m.sample_ids)


def harden(m: MembershipMatrix, rule: HardeningRule = HardeningRule()) -> MembershipMatrix:
    """
    Convert soft memberships into crisp ones.

    Winner-takes-all puts the single 1 at the row maximum and yields a closed-world
    matrix. A threshold rule marks every class whose membership exceeds the
    threshold and yields an open-world matrix (rows may hold zero or several 1s).
    """
    values = m.values
    if rule.kind is HardeningKind.WINNER_TAKES_ALL:
        row_max = values.max(axis=1, keepdims=True)
        ties = (values == row_max).sum(axis=1) > 1
        if rule.tie_break is TieBreak.ERROR and np.any(ties):
            row = int(np.flatnonzero(ties)[0])
            raise TieError(f"Sample {m.sample_id(row)}: tie between classes "
                           f"{[m.class_names[j] for j in np.flatnonzero(values[row] == row_max[row])]}.")
        winners = np.argmax(values, axis=1)
        crisp = np.zeros_like(values)
        crisp[np.arange(values.shape[0]), winners] = 1.0
        return MembershipMatrix(crisp, m.class_names, World.CLOSED, m.sample_ids)

    if rule.inclusive:
        crisp = (values >= rule.threshold).astype(np.float64)
    else:
        crisp = (values > rule.threshold).astype(np.float64)
    return MembershipMatrix(crisp, m.class_names, World.OPEN, m.sample_ids)


# --- Label encoding ---

def from_labels(labels: Iterable[str],
                class_names: Sequence[str],
                world: World = World.CLOSED) -> MembershipMatrix:
    """One-hot memberships for classical crisp labels."""
    names = tuple(class_names)
    labels = [str(label) for label in labels]
    values = np.zeros((len(labels), len(names)))
    for row, label in enumerate(labels):
        if label not in names:
            raise UnknownClass(f"Label '{label}' is not one of {list(names)}.")
        values[row, names.index(label)] = 1.0
    return validate(values, names, world)


def encode_mixture(fractions: Mapping[str, float], class_names: Sequence[str]) -> np.ndarray:
    """
    Membership row for a mixture such as {"N": 0.1, "A2": 0.9}.

    Classes not mentioned get membership 0.
    """
    row = np.zeros(len(class_names))
    for name, fraction in fractions.items():
        if name not in class_names:
            raise UnknownClass(f"Unknown class '{name}' in mixture.")
        if not 0.0 <= fraction <= 1.0:
            raise OutOfRange(f"Mixture fraction for '{name}' is {fraction}, outside [0, 1].")
        row[list(class_names).index(name)] = float(fraction)
    return row


def encode_uncertain(candidates: Sequence[str], class_names: Sequence[str]) -> np.ndarray:
    """Membership row for 'one of these classes': equal split among the candidates."""
    if not candidates:
        raise ValueError("At least one candidate class is required.")
    share = 1.0 / len(set(candidates))
    return encode_mixture({name: share for name in set(candidates)}, class_names)


def check_compatible(ref: MembershipMatrix, pred: MembershipMatrix) -> None:
    """Reference and prediction must describe the same samples and classes."""
    if ref.values.shape != pred.values.shape:
        raise ShapeMismatch(f"Reference shape {ref.values.shape} != prediction shape {pred.values.shape}.")
    if ref.class_names != pred.class_names:
        raise ClassNameMismatch(f"Reference classes {list(ref.class_names)} != "
                                f"prediction classes {list(pred.class_names)}.")
