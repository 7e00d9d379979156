"""
Incompletely observed factorial repeated-measures data
"""

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from ..utils.errors import DataValidationError, DimensionMismatchError


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class IncompleteDataset:
    """
    a groups x d occasions x n_i subjects with an explicit observation mask.

    values[i] is an (n_i, d) float array and mask[i] the matching boolean
    array (True = observed). Unobserved entries hold 0.0 and carry no
    meaning; they are never read by the rank arithmetic.
    """
    values: Tuple[np.ndarray, ...]
    mask: Tuple[np.ndarray, ...]
    group_labels: Tuple[str, ...] = ()
    subject_ids: Tuple[Tuple[str, ...], ...] = ()
    occasion_labels: Tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.values) == 0:
            raise DataValidationError("dataset has no groups", field="values")
        if len(self.values) != len(self.mask):
            raise DimensionMismatchError(
                "values and mask have different group counts",
                expected=len(self.values), actual=len(self.mask)
            )

        values, masks = [], []
        d = None
        for i, (vals, obs) in enumerate(zip(self.values, self.mask)):
            vals = np.asarray(vals, dtype=float)
            obs = np.asarray(obs, dtype=bool)
            if vals.ndim != 2 or vals.shape != obs.shape:
                raise DimensionMismatchError(
                    f"group {i + 1}: values and mask must be matching (n_i, d) arrays",
                    expected=vals.shape, actual=obs.shape
                )
            if d is None:
                d = vals.shape[1]
            if vals.shape[1] != d:
                raise DimensionMismatchError(
                    f"group {i + 1} has {vals.shape[1]} occasions, expected {d}",
                    expected=d, actual=vals.shape[1]
                )
            if vals.shape[0] < 1:
                raise DataValidationError(f"group {i + 1} has no subjects", field="values")
            if not np.all(np.isfinite(vals[obs])):
                raise DataValidationError(f"group {i + 1} has non-finite observed values", field="values")
            values.append(_frozen(np.where(obs, vals, 0.0)))
            masks.append(_frozen(obs))
        if d < 1:
            raise DataValidationError("dataset has no occasions", field="values")

        a = len(values)
        object.__setattr__(self, "values", tuple(values))
        object.__setattr__(self, "mask", tuple(masks))

        group_labels = tuple(self.group_labels) or tuple(str(i + 1) for i in range(a))
        subject_ids = tuple(tuple(s) for s in self.subject_ids) or tuple(
            tuple(str(k + 1) for k in range(v.shape[0])) for v in values
        )
        occasion_labels = tuple(self.occasion_labels) or tuple(str(j + 1) for j in range(d))
        if len(group_labels) != a or len(occasion_labels) != d:
            raise DimensionMismatchError(
                "label counts do not match the design",
                expected=(a, d), actual=(len(group_labels), len(occasion_labels))
            )
        if [len(s) for s in subject_ids] != [v.shape[0] for v in values]:
            raise DimensionMismatchError("subject id counts do not match group sizes")
        object.__setattr__(self, "group_labels", group_labels)
        object.__setattr__(self, "subject_ids", subject_ids)
        object.__setattr__(self, "occasion_labels", occasion_labels)

    @classmethod
    def from_rows(
        cls,
        groups: Sequence[Sequence[Sequence[Optional[float]]]],
        **labels
    ) -> "IncompleteDataset":
        """Build from nested rows where None marks a missing value"""
        values, masks = [], []
        for i, rows in enumerate(groups):
            if len(rows) == 0:
                raise DataValidationError(f"group {i + 1} has no subjects", field="values")
            widths = {len(r) for r in rows}
            if len(widths) > 1:
                raise DimensionMismatchError(f"group {i + 1} has ragged rows", actual=sorted(widths))
            obs = np.array([[v is not None for v in r] for r in rows], dtype=bool)
            vals = np.array([[0.0 if v is None else float(v) for v in r] for r in rows], dtype=float)
            values.append(vals.reshape(len(rows), -1))
            masks.append(obs.reshape(len(rows), -1))
        return cls(values=tuple(values), mask=tuple(masks), **labels)

    @property
    def a(self) -> int:
        return len(self.values)

    @property
    def d(self) -> int:
        return self.values[0].shape[1]

    @property
    def group_sizes(self) -> Tuple[int, ...]:
        return tuple(v.shape[0] for v in self.values)

    @property
    def n(self) -> int:
        return sum(self.group_sizes)

    @property
    def n_observations(self) -> int:
        return int(sum(m.sum() for m in self.mask))

    def equals(self, other: "IncompleteDataset") -> bool:
        """Same labels, mask and observed values"""
        return (
            self.group_labels == other.group_labels
            and self.subject_ids == other.subject_ids
            and self.occasion_labels == other.occasion_labels
            and len(self.values) == len(other.values)
            and all(np.array_equal(m1, m2) for m1, m2 in zip(self.mask, other.mask))
            and all(np.array_equal(v1, v2) for v1, v2 in zip(self.values, other.values))
        )

    def pooled_observed(self) -> np.ndarray:
        """All observed values, group-major then subject then occasion"""
        return np.concatenate([v[m] for v, m in zip(self.values, self.mask)])

    def with_mask(self, mask: Sequence[np.ndarray]) -> "IncompleteDataset":
        return IncompleteDataset(
            values=self.values, mask=tuple(mask),
            group_labels=self.group_labels, subject_ids=self.subject_ids,
            occasion_labels=self.occasion_labels
        )

    def with_values(self, values: Sequence[np.ndarray]) -> "IncompleteDataset":
        return IncompleteDataset(
            values=tuple(values), mask=self.mask,
            group_labels=self.group_labels, subject_ids=self.subject_ids,
            occasion_labels=self.occasion_labels
        )

    def map_values(self, transform: Callable[[np.ndarray], np.ndarray]) -> "IncompleteDataset":
        """Apply an elementwise transform to observed values only"""
        mapped = []
        for vals, obs in zip(self.values, self.mask):
            out = np.zeros_like(vals)
            out[obs] = transform(vals[obs])
            mapped.append(out)
        return self.with_values(mapped)


@dataclass(frozen=True)
class CellCounts:
    """
    Exact integer counts of an observation pattern.

    observed[i, j] is lambda_ij. (observed subjects of group i at occasion j),
    pairwise[i, j, j'] is Delta_i,jj' (subjects of group i observed at both).
    """
    observed: np.ndarray
    pairwise: np.ndarray
    group_sizes: Tuple[int, ...]
    n: int
    N: int

    def __post_init__(self):
        object.__setattr__(self, "observed", _frozen(self.observed))
        object.__setattr__(self, "pairwise", _frozen(self.pairwise))


@dataclass(frozen=True)
class ValidatedDataset:
    """Dataset plus its counts, guaranteed to have at least two observations per cell"""
    dataset: IncompleteDataset
    counts: CellCounts
    notes: List[str] = field(default_factory=list)

    @property
    def a(self) -> int:
        return self.dataset.a

    @property
    def d(self) -> int:
        return self.dataset.d
