"""CSV ingestion and the immutable point table.

A dataset is a fixed table of sample points: spatial coordinates (x, y and an
optional z, instrument frame) plus one non-negative weight-percent value per
element column. Point ids are dense row indices assigned in file order.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    DuplicateId,
    EmptyDataset,
    MissingColumn,
    NegativeFeature,
    NonNumericValue,
    UnknownElement,
)

COORDINATE_NAMES = ("x", "y", "z")


@dataclass(frozen=True)
class SchemaConfig:
    """Column mapping for :func:`load_dataset`.

    ``coordinate_columns`` holds the x/y and optionally z column names; ``None``
    auto-detects them case-insensitively among {x, y, z}. ``feature_columns``
    is either an explicit list of element columns (everything else is ignored,
    which is how thousands of raw-channel columns are tolerated) or ``"auto"``,
    meaning every remaining column must be numeric and becomes a feature.
    """

    coordinate_columns: tuple[str, ...] | None = None
    feature_columns: Sequence[str] | str = "auto"
    id_column: str | None = None

    def __post_init__(self):
        if self.coordinate_columns is not None:
            n = len(self.coordinate_columns)
            if n not in (2, 3):
                raise ValueError("coordinate_columns must name x,y or x,y,z")
        if not isinstance(self.feature_columns, str):
            overlap = set(self.coordinate_columns or ()) & set(self.feature_columns)
            if overlap:
                raise ValueError(f"columns {sorted(overlap)} are both coordinate and feature")
        elif self.feature_columns != "auto":
            raise ValueError("feature_columns must be a list of names or 'auto'")


@dataclass(frozen=True)
class PointRecord:
    id: int
    x: float
    y: float
    z: float
    features: tuple[float, ...]


@dataclass(frozen=True)
class Dataset:
    """Immutable table of sample points; safe to share across threads."""

    source_id: str
    element_names: tuple[str, ...]
    xyz: np.ndarray = field(repr=False)       # (n, 3) float64
    features: np.ndarray = field(repr=False)  # (n, d) float64, all finite, >= 0

    def __post_init__(self):
        self.xyz.flags.writeable = False
        self.features.flags.writeable = False

    @property
    def n_points(self) -> int:
        return self.xyz.shape[0]

    def point(self, point_id: int) -> PointRecord:
        x, y, z = self.xyz[point_id]
        return PointRecord(int(point_id), float(x), float(y), float(z),
                           tuple(float(v) for v in self.features[point_id]))

    @property
    def points(self) -> list[PointRecord]:
        return [self.point(i) for i in range(self.n_points)]

    def __len__(self) -> int:
        return self.n_points


def dataset_from_arrays(
    xyz: np.ndarray,
    features: np.ndarray,
    element_names: Sequence[str],
    source_id: str = "dataset",
) -> Dataset:
    """Build a dataset from in-memory arrays (synthetic data, tests)."""
    xyz = np.ascontiguousarray(xyz, dtype=np.float64)
    if xyz.ndim != 2 or xyz.shape[1] not in (2, 3):
        raise ValueError("xyz must be (n, 2) or (n, 3)")
    if xyz.shape[1] == 2:
        xyz = np.hstack([xyz, np.zeros((xyz.shape[0], 1))])
    features = np.ascontiguousarray(features, dtype=np.float64)
    if features.ndim != 2 or features.shape[0] != xyz.shape[0]:
        raise ValueError("features must be (n, d)")
    if features.shape[1] != len(element_names):
        raise ValueError("element_names length must match feature arity")
    if features.size and not np.all(np.isfinite(features)):
        raise NonNumericValue("non-finite feature value in array input")
    if features.size and features.min() < 0:
        raise NegativeFeature("negative feature value in array input")
    return Dataset(source_id, tuple(element_names), xyz.copy(), features.copy())


def _open_text(source: bytes | str | Path | IO) -> Iterator[str]:
    if isinstance(source, Path):
        return io.StringIO(source.read_text(encoding="utf-8-sig"))
    if isinstance(source, bytes):
        return io.StringIO(source.decode("utf-8-sig"))
    if isinstance(source, str):
        return io.StringIO(source)
    data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8-sig")
    return io.StringIO(data)


def _parse_float(cell: str, row: int, column: str) -> float:
    try:
        value = float(cell)
    except (TypeError, ValueError):
        raise NonNumericValue(
            f"non-numeric value {cell!r} at row {row}, column {column}",
            row=row, column=column,
        ) from None
    if not math.isfinite(value):
        raise NonNumericValue(
            f"non-finite value {cell!r} at row {row}, column {column}",
            row=row, column=column,
        )
    return value


def _cell(row_values: list[str], index: int) -> str:
    return row_values[index] if index < len(row_values) else ""


def load_dataset(
    source: bytes | str | Path | IO,
    config: SchemaConfig | None = None,
    source_id: str = "dataset",
) -> Dataset:
    """Parse a header-first CSV into a :class:`Dataset`.

    Accepts raw CSV text/bytes, a readable stream, or a :class:`Path`. Both
    LF and CRLF line endings are fine. Point ids are assigned in row order.
    """
    config = config or SchemaConfig()
    reader = csv.reader(_open_text(source))
    try:
        header = next(reader)
    except StopIteration:
        raise EmptyDataset("source has no header row") from None
    header = [h.strip() for h in header]
    index = {name: i for i, name in enumerate(header)}

    def column_index(name: str) -> int:
        if name not in index:
            raise MissingColumn(f"column {name!r} not found in header", column=name)
        return index[name]

    if config.coordinate_columns is not None:
        coord_names = list(config.coordinate_columns)
        coord_idx = [column_index(n) for n in coord_names]
    else:
        by_lower: dict[str, int] = {}
        for i, name in enumerate(header):
            by_lower.setdefault(name.lower(), i)
        for required in ("x", "y"):
            if required not in by_lower:
                raise MissingColumn(f"coordinate column {required!r} not found", column=required)
        coord_names = [header[by_lower["x"]], header[by_lower["y"]]]
        coord_idx = [by_lower["x"], by_lower["y"]]
        if "z" in by_lower:
            coord_names.append(header[by_lower["z"]])
            coord_idx.append(by_lower["z"])

    id_idx = column_index(config.id_column) if config.id_column else None

    if isinstance(config.feature_columns, str):  # auto
        reserved = set(coord_idx) | ({id_idx} if id_idx is not None else set())
        element_names = [h for i, h in enumerate(header) if i not in reserved]
    else:
        element_names = list(config.feature_columns)
    feature_idx = [column_index(n) for n in element_names]

    coords: list[tuple[float, float, float]] = []
    rows: list[list[float]] = []
    seen_ids: set[int] = set()
    for row_no, raw in enumerate(reader, start=1):
        if not raw or all(not c.strip() for c in raw):
            continue  # tolerate trailing blank lines
        xyz_vals = [_parse_float(_cell(raw, i), row_no, coord_names[j])
                    for j, i in enumerate(coord_idx)]
        if len(xyz_vals) == 2:
            xyz_vals.append(0.0)
        if id_idx is not None:
            cell = _cell(raw, id_idx)
            try:
                point_id = int(float(cell))
            except (TypeError, ValueError):
                raise NonNumericValue(
                    f"non-numeric id {cell!r} at row {row_no}",
                    row=row_no, column=config.id_column,
                ) from None
            if point_id in seen_ids:
                raise DuplicateId(f"duplicate id {point_id} at row {row_no}", row=row_no)
            seen_ids.add(point_id)
        feats = []
        for j, i in enumerate(feature_idx):
            value = _parse_float(_cell(raw, i), row_no, element_names[j])
            if value < 0:
                raise NegativeFeature(
                    f"negative value {value} at row {row_no}, column {element_names[j]}",
                    row=row_no, column=element_names[j],
                )
            feats.append(value)
        coords.append((xyz_vals[0], xyz_vals[1], xyz_vals[2]))
        rows.append(feats)

    if not rows:
        raise EmptyDataset("CSV contains a header but no data rows")
    xyz = np.array(coords, dtype=np.float64)
    features = np.array(rows, dtype=np.float64).reshape(len(rows), len(element_names))
    return Dataset(source_id, tuple(element_names), xyz, features)


def feature_matrix(ds: Dataset, selected_elements: Iterable[str] | None = None) -> np.ndarray:
    """Dense (n_points, n_selected) view, column order following the request."""
    if selected_elements is None:
        return ds.features.copy()
    selected = list(selected_elements)
    positions = []
    for name in selected:
        if name not in ds.element_names:
            raise UnknownElement(f"element {name!r} not in dataset", element=name)
        positions.append(ds.element_names.index(name))
    if not positions:
        return np.empty((ds.n_points, 0), dtype=np.float64)
    return ds.features[:, positions].copy()


def bounding_box(ds: Dataset) -> tuple[float, float, float, float]:
    """Tight axis-aligned (min_x, min_y, max_x, max_y) over point coordinates."""
    if ds.n_points == 0:
        raise EmptyDataset("bounding box of an empty dataset")
    xs = ds.xyz[:, 0]
    ys = ds.xyz[:, 1]
    return float(xs.min()), float(ys.min()), float(xs.max()), float(ys.max())


def dataset_to_csv(ds: Dataset) -> bytes:
    """Serialize back to the ingestion CSV layout (x,y,z + element columns)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x", "y", "z", *ds.element_names])
    for i in range(ds.n_points):
        x, y, z = ds.xyz[i]
        writer.writerow([repr(float(x)), repr(float(y)), repr(float(z)),
                         *(repr(float(v)) for v in ds.features[i])])
    return buf.getvalue().encode("utf-8")
