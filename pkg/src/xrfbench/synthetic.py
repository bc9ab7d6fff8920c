"""Synthetic terrain grids for demos and benchmark tests.

The crater grid mimics a scanned sample area: points on a regular grid with a
circular region of distinct element chemistry in the middle, surrounded by
four background zones. Per-element noise is 10% of the crater-to-background
mean separation, so the planted regions are recoverable but not trivial
labels.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .dataset import Dataset, dataset_from_arrays

CRATER_ELEMENTS = ("Fe", "Si", "Ca", "Mg", "Al", "Na", "K", "Ti")

# background means per element (wt%) and the crater's offset from them
_BASE_MEANS = np.array([10.0, 25.0, 6.0, 4.0, 8.0, 2.0, 1.5, 0.8])
_CRATER_DELTA = np.array([12.0, -13.0, 8.0, 5.0, -5.0, 2.5, -1.1, 1.2])
_SIGMA = np.abs(_CRATER_DELTA) * 0.10

# four background zones, offset by +-2 sigma in varied directions
_ZONE_STEPS = np.array([
    [+2, -2, +2, -2, +2, -2, +2, -2],
    [-2, +2, +2, -2, -2, +2, -2, +2],
    [+2, +2, -2, +2, -2, -2, -2, +2],
    [-2, -2, -2, +2, +2, +2, +2, -2],
], dtype=np.float64)


class CraterGrid(NamedTuple):
    dataset: Dataset
    crater_mask: np.ndarray  # bool, True inside the planted crater
    zone_labels: np.ndarray  # ints 0..3 for background zones, 4 for the crater


def crater_grid(
    width: int = 80,
    height: int = 80,
    crater_radius: float = 15.0,
    seed: int = 0,
    source_id: str = "crater-demo",
) -> CraterGrid:
    """Regular width x height grid with a circular planted anomaly."""
    xs, ys = np.meshgrid(np.arange(width, dtype=np.float64),
                         np.arange(height, dtype=np.float64))
    x = xs.ravel()
    y = ys.ravel()
    cx = (width - 1) / 2.0
    cy = (height - 1) / 2.0
    crater = (x - cx) ** 2 + (y - cy) ** 2 <= crater_radius ** 2
    zones = np.where(x < cx, 0, 1) + 2 * np.where(y < cy, 0, 1)
    labels = np.where(crater, 4, zones)

    means = np.vstack([_BASE_MEANS + _ZONE_STEPS * _SIGMA,
                       _BASE_MEANS + _CRATER_DELTA])
    rng = np.random.default_rng(seed)
    n = x.size
    features = means[labels] + rng.standard_normal((n, len(CRATER_ELEMENTS))) * _SIGMA
    np.clip(features, 0.0, None, out=features)

    xyz = np.column_stack([x, y, np.zeros(n)])
    ds = dataset_from_arrays(xyz, features, CRATER_ELEMENTS, source_id=source_id)
    return CraterGrid(dataset=ds, crater_mask=crater, zone_labels=labels)


def gaussian_blobs(
    n_per_blob: int,
    centers: np.ndarray,
    sigma: float = 1.0,
    seed: int = 0,
) -> tuple[np.ndarray, np.ndarray]:
    """Isotropic Gaussian blobs; returns (points, blob labels)."""
    centers = np.asarray(centers, dtype=np.float64)
    rng = np.random.default_rng(seed)
    points = []
    labels = []
    for i, c in enumerate(centers):
        points.append(c + rng.standard_normal((n_per_blob, centers.shape[1])) * sigma)
        labels.append(np.full(n_per_blob, i))
    return np.vstack(points), np.concatenate(labels)
