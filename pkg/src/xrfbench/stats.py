"""Per-element descriptive statistics, ordering, and display transforms.

Quartiles use linear interpolation on order statistics at positions
p*(n-1); the standard deviation is the sample (n-1) estimator with sd = 0
for singletons. The coefficient of variation is absent (None) at mean 0,
never infinity or NaN.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

import numpy as np

from .dataset import Dataset, feature_matrix
from .errors import (
    EmptyInput,
    EmptySelection,
    NegativeValue,
    NonFiniteValue,
)
from .selection import GroupRegistry


@dataclass(frozen=True)
class SummaryStats:
    element: str
    n: int
    mean: float
    sd: float
    cv: float | None
    min: float
    q1: float
    median: float
    q3: float
    max: float


@dataclass(frozen=True)
class SortOrder:
    key: Literal["mean", "cv"] = "mean"
    direction: Literal["descending", "ascending"] = "descending"

    def __post_init__(self):
        if self.key not in ("mean", "cv"):
            raise ValueError(f"unknown sort key {self.key!r}")
        if self.direction not in ("descending", "ascending"):
            raise ValueError(f"unknown sort direction {self.direction!r}")


@dataclass(frozen=True)
class DisplayScale:
    kind: Literal["linear", "log10"] = "linear"
    log_floor: float = 1e-4  # wt%, substituted for zeros on the log scale

    def __post_init__(self):
        if self.kind not in ("linear", "log10"):
            raise ValueError(f"unknown scale {self.kind!r}")
        if self.log_floor <= 0:
            raise ValueError("log_floor must be positive")


def summarize(values: Iterable[float], element: str = "") -> SummaryStats:
    """Descriptive statistics of one element column over a point set."""
    arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values,
                     dtype=np.float64).ravel()
    if arr.size == 0:
        raise EmptyInput("summarize needs at least one value")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteValue("summarize input contains NaN or infinity")
    arr = np.sort(arr)  # permutation invariance down to the last float bit
    mean = float(arr.mean())
    sd = 0.0 if arr.size == 1 else float(arr.std(ddof=1))
    cv = sd / mean if mean > 0 else None
    q1, median, q3 = (float(q) for q in np.quantile(arr, [0.25, 0.5, 0.75], method="linear"))
    return SummaryStats(
        element=element, n=int(arr.size), mean=mean, sd=sd, cv=cv,
        min=float(arr.min()), q1=q1, median=median, q3=q3, max=float(arr.max()),
    )


def group_stats(
    ds: Dataset,
    point_ids: Iterable[int],
    elements: Sequence[str] | None = None,
) -> list[SummaryStats]:
    """One SummaryStats per selected element over exactly the given points."""
    ids = sorted(int(i) for i in set(point_ids))
    if not ids:
        raise EmptySelection("group_stats needs a non-empty point set")
    names = tuple(elements) if elements is not None else ds.element_names
    matrix = feature_matrix(ds, names)[ids, :]
    return [summarize(matrix[:, j], element=name) for j, name in enumerate(names)]


def sort_elements(stats: Sequence[SummaryStats], order: SortOrder) -> list[str]:
    """Element symbols sorted by the chosen key.

    Elements with an absent cv sort after every present-cv element regardless
    of direction; ties break alphabetically by symbol.
    """
    sign = -1.0 if order.direction == "descending" else 1.0

    def key(s: SummaryStats):
        value = s.mean if order.key == "mean" else s.cv
        if value is None:
            return (1, 0.0, s.element)
        return (0, sign * value, s.element)

    return [s.element for s in sorted(stats, key=key)]


def display_value(v: float, scale: DisplayScale) -> float:
    """Map a weight-percent value to its display coordinate."""
    if v < 0:
        raise NegativeValue(f"display_value expects v >= 0, got {v}")
    if scale.kind == "linear":
        return float(v)
    return math.log10(max(v, scale.log_floor))


@dataclass(frozen=True)
class PcpLine:
    group_id: int
    values: tuple[float, ...]  # normalized group means, aligned with axes


@dataclass(frozen=True)
class PcpAxes:
    elements: tuple[str, ...]
    ranges: tuple[tuple[float, float], ...]  # per-element (min, max) of group means
    lines: tuple[PcpLine, ...]


def pcp_axes(
    ds: Dataset,
    groups: GroupRegistry | Sequence[tuple[int, Iterable[int]]],
    elements: Sequence[str] | None = None,
) -> PcpAxes:
    """Parallel-coordinates geometry: one normalized polyline per group.

    Each element axis spans the (min, max) of the group means; a group mean v
    maps to (v - min) / (max - min), or 0.5 when the axis is constant. Groups
    with no members are skipped.
    """
    if isinstance(groups, GroupRegistry):
        pairs = [(g.group_id, g.members) for g in groups.groups]
    else:
        pairs = [(int(gid), ids) for gid, ids in groups]
    pairs = [(gid, sorted(int(i) for i in set(ids))) for gid, ids in pairs]
    pairs = [(gid, ids) for gid, ids in pairs if ids]
    if not pairs:
        raise EmptySelection("parallel coordinates need at least one non-empty group")
    names = tuple(elements) if elements is not None else ds.element_names
    matrix = feature_matrix(ds, names)
    means = np.array([matrix[ids, :].mean(axis=0) for _, ids in pairs])  # (m, d)
    lo = means.min(axis=0)
    hi = means.max(axis=0)
    span = hi - lo
    normalized = np.where(span > 0, (means - lo) / np.where(span > 0, span, 1.0), 0.5)
    lines = tuple(
        PcpLine(group_id=gid, values=tuple(float(v) for v in normalized[i]))
        for i, (gid, _) in enumerate(pairs)
    )
    ranges = tuple((float(a), float(b)) for a, b in zip(lo, hi))
    return PcpAxes(elements=names, ranges=ranges, lines=lines)
