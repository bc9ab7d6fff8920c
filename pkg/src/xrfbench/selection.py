"""Lasso geometry and the registry of disjoint, lockable point groups.

Point-in-polygon uses the even-odd rule with points on an edge or vertex
counting as inside. Registry operations are pure: they take a registry and
return a new one, so a service layer can own the authoritative copy and
serialize writers.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Literal, NamedTuple, Sequence

import numpy as np

from .dataset import Dataset
from .errors import (
    DegeneratePolygon,
    GroupLimitExceeded,
    GroupLocked,
    UnknownGroup,
)

MAX_GROUPS = 20

# Fixed 20-color categorical palette, assigned round-robin by creation order.
PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
    "#aec7e8", "#ffbb78", "#98df8a", "#ff9896", "#c5b0d5",
    "#c49c94", "#f7b6d2", "#c7c7c7", "#dbdb8d", "#9edae5",
)

Point = tuple[float, float]


def _polygon_array(polygon: Sequence[Point]) -> np.ndarray:
    verts = np.asarray(polygon, dtype=np.float64)
    if verts.ndim != 2 or verts.shape[1] != 2 or verts.shape[0] < 3:
        raise DegeneratePolygon("polygon needs at least 3 (x, y) vertices")
    return verts


def points_in_polygon(xy: np.ndarray, polygon: Sequence[Point]) -> np.ndarray:
    """Even-odd containment test for many points at once.

    Returns a boolean mask over the rows of ``xy``. Points exactly on an edge
    or vertex are inside. Self-intersecting lasso paths are allowed.
    """
    verts = _polygon_array(polygon)
    xy = np.atleast_2d(np.asarray(xy, dtype=np.float64))
    px = xy[:, 0][:, None]
    py = xy[:, 1][:, None]
    x1 = verts[:, 0][None, :]
    y1 = verts[:, 1][None, :]
    x2 = np.roll(verts[:, 0], -1)[None, :]
    y2 = np.roll(verts[:, 1], -1)[None, :]

    # boundary: collinear with an edge and within its bounding box
    cross = (x2 - x1) * (py - y1) - (y2 - y1) * (px - x1)
    within = (
        (np.minimum(x1, x2) <= px) & (px <= np.maximum(x1, x2))
        & (np.minimum(y1, y2) <= py) & (py <= np.maximum(y1, y2))
    )
    on_edge = ((cross == 0.0) & within).any(axis=1)

    # even-odd ray cast to the right, half-open in y to count shared vertices once
    spans = (y1 <= py) != (y2 <= py)
    with np.errstate(divide="ignore", invalid="ignore"):
        x_int = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
    crossings = (spans & (px < x_int)).sum(axis=1)
    return on_edge | (crossings % 2 == 1)


def point_in_polygon(p: Point, polygon: Sequence[Point]) -> bool:
    """Single-point even-odd test; on-boundary counts as inside."""
    return bool(points_in_polygon(np.asarray([p]), polygon)[0])


def lasso_select(
    ds: Dataset,
    polygon: Sequence[Point],
    mode: Literal["add", "remove"],
    current: Iterable[int] = (),
) -> frozenset[int]:
    """Grow or shrink a selection with the points enclosed by a lasso path."""
    if mode not in ("add", "remove"):
        raise ValueError(f"mode must be 'add' or 'remove', got {mode!r}")
    mask = points_in_polygon(ds.xyz[:, :2], polygon)
    enclosed = frozenset(int(i) for i in np.nonzero(mask)[0])
    current = frozenset(int(i) for i in current)
    return current | enclosed if mode == "add" else current - enclosed


@dataclass(frozen=True)
class PointGroup:
    group_id: int
    name: str
    color: str
    members: frozenset[int] = frozenset()
    locked: bool = False
    annotation: str | None = None


@dataclass(frozen=True)
class GroupRegistry:
    groups: tuple[PointGroup, ...] = ()
    active_group: int | None = None

    def group(self, group_id: int) -> PointGroup:
        for g in self.groups:
            if g.group_id == group_id:
                return g
        raise UnknownGroup(f"no group with id {group_id}", group_id=group_id)

    def membership(self) -> dict[int, int]:
        """point id -> owning group id."""
        owner: dict[int, int] = {}
        for g in self.groups:
            for pid in g.members:
                owner[pid] = g.group_id
        return owner


class AssignResult(NamedTuple):
    registry: GroupRegistry
    skipped: frozenset[int]


def _replace_group(reg: GroupRegistry, updated: PointGroup) -> GroupRegistry:
    groups = tuple(updated if g.group_id == updated.group_id else g for g in reg.groups)
    return replace(reg, groups=groups)


def create_group(reg: GroupRegistry, name: str) -> tuple[GroupRegistry, int]:
    """Append an empty unlocked group and make it active."""
    if len(reg.groups) >= MAX_GROUPS:
        raise GroupLimitExceeded(f"registry already holds {MAX_GROUPS} groups")
    group_id = max((g.group_id for g in reg.groups), default=-1) + 1
    used = {g.color for g in reg.groups}
    color = next(c for c in PALETTE if c not in used)
    group = PointGroup(group_id=group_id, name=name, color=color)
    return GroupRegistry(groups=reg.groups + (group,), active_group=group_id), group_id


def assign_selection(reg: GroupRegistry, group_id: int, selection: Iterable[int]) -> AssignResult:
    """Move the selected points into the target group.

    Points currently in other unlocked groups are moved; points held by locked
    groups are skipped and reported. The target must exist and be unlocked.
    """
    target = reg.group(group_id)
    if target.locked:
        raise GroupLocked(f"group {group_id} is locked", group_id=group_id)
    selection = frozenset(int(i) for i in selection)
    locked_ids = frozenset().union(*(g.members for g in reg.groups if g.locked)) \
        if any(g.locked for g in reg.groups) else frozenset()
    skipped = selection & locked_ids
    movable = selection - skipped
    groups = []
    for g in reg.groups:
        if g.group_id == group_id:
            groups.append(replace(g, members=g.members | movable))
        elif not g.locked and g.members & movable:
            groups.append(replace(g, members=g.members - movable))
        else:
            groups.append(g)
    return AssignResult(replace(reg, groups=tuple(groups)), skipped)


def remove_from_group(reg: GroupRegistry, group_id: int, selection: Iterable[int]) -> GroupRegistry:
    """Drop the selected points from one group; non-members are ignored."""
    target = reg.group(group_id)
    if target.locked:
        raise GroupLocked(f"group {group_id} is locked", group_id=group_id)
    selection = frozenset(int(i) for i in selection)
    return _replace_group(reg, replace(target, members=target.members - selection))


def annotate_group(reg: GroupRegistry, group_id: int, text: str) -> GroupRegistry:
    """Replace the group annotation; empty text clears it. Allowed on locked groups."""
    target = reg.group(group_id)
    return _replace_group(reg, replace(target, annotation=text or None))


def set_locked(reg: GroupRegistry, group_id: int, locked: bool) -> GroupRegistry:
    target = reg.group(group_id)
    return _replace_group(reg, replace(target, locked=bool(locked)))
