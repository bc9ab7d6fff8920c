"""The three clustering algorithms and the pipeline that feeds them.

k-means uses seeded k-means++ initialization and Lloyd iterations with empty
clusters reseeded at the point farthest from its assigned centroid.
Hierarchical clustering is agglomerative with Lance-Williams updates (ward on
squared-Euclidean merge cost); ties always merge the lexicographically
smallest (i, j) pair. "minmax" is farthest-first traversal k-center
clustering. All three are deterministic for a fixed seed and input order.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from .dataset import Dataset, feature_matrix
from .dimreduce import TsneConfig, pca_fit_transform, standardize, tsne_embed
from .errors import EmptyMatrix, GroupLimitExceeded, InvalidConfig, InvalidFraction, KTooLarge
from .selection import MAX_GROUPS, GroupRegistry, assign_selection, create_group

ALGORITHMS = ("kmeans", "hierarchical", "minmax")
LINKAGES = ("single", "complete", "average", "ward")


@dataclass(frozen=True)
class PcaReduction:
    variance_fraction: float = 0.95

    def __post_init__(self):
        if not 0.0 < self.variance_fraction <= 1.0:
            raise InvalidFraction(
                f"variance_fraction must be in (0, 1], got {self.variance_fraction}",
                field="variance_fraction",
            )


@dataclass(frozen=True)
class TsneReduction:
    tsne: TsneConfig = TsneConfig()


@dataclass(frozen=True)
class ClusterConfig:
    algorithm: str
    n_clusters: int
    reduction: PcaReduction | TsneReduction | None = None
    linkage: str | None = None
    seed: int = 0
    max_iter: int = 300
    tol: float = 1e-4

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise InvalidConfig(f"unknown algorithm {self.algorithm!r}", field="algorithm")
        if self.n_clusters < 1:
            raise InvalidConfig("n_clusters must be >= 1", field="n_clusters")
        if (self.algorithm == "hierarchical") != (self.linkage is not None):
            raise InvalidConfig(
                "linkage is required for hierarchical and not allowed otherwise",
                field="linkage",
            )
        if self.linkage is not None and self.linkage not in LINKAGES:
            raise InvalidConfig(f"unknown linkage {self.linkage!r}", field="linkage")
        if self.max_iter < 1:
            raise InvalidConfig("max_iter must be >= 1", field="max_iter")
        if self.tol < 0:
            raise InvalidConfig("tol must be >= 0", field="tol")
        if self.reduction is not None and not isinstance(self.reduction, (PcaReduction, TsneReduction)):
            raise InvalidConfig("reduction must be none, pca, or tsne", field="reduction")


@dataclass(frozen=True)
class ClusterResult:
    labels: np.ndarray = field(repr=False)  # (n,) ints in [0, n_clusters)
    config: ClusterConfig
    diagnostics: dict[str, Any]

    def __post_init__(self):
        self.labels.flags.writeable = False


def _check_matrix(m: np.ndarray, k: int) -> np.ndarray:
    m = np.ascontiguousarray(m, dtype=np.float64)
    if m.ndim != 2:
        raise EmptyMatrix("expected a 2-D matrix")
    n = m.shape[0]
    if n == 0:
        raise EmptyMatrix("cannot cluster an empty matrix")
    if not 1 <= k <= n:
        raise KTooLarge(f"n_clusters {k} must be in [1, {n}]")
    return m


def _kmeans_pp_init(m: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = m.shape[0]
    chosen = [int(rng.integers(n))]
    d2 = ((m - m[chosen[0]]) ** 2).sum(axis=1)
    for _ in range(1, k):
        total = float(d2.sum())
        if total > 0:
            target = rng.random() * total
            c = min(int(np.searchsorted(np.cumsum(d2), target, side="right")), n - 1)
        else:  # remaining mass is zero: every point coincides with a center
            taken = set(chosen)
            c = next(i for i in range(n) if i not in taken)
        chosen.append(c)
        d2 = np.minimum(d2, ((m - m[c]) ** 2).sum(axis=1))
    return m[chosen].copy()


def kmeans(m: np.ndarray, k: int, seed: int = 0, max_iter: int = 300, tol: float = 1e-4) -> ClusterResult:
    """Lloyd's algorithm with k-means++ seeding; stops when the largest
    centroid shift drops below ``tol``."""
    m = _check_matrix(m, k)
    n = m.shape[0]
    rng = np.random.default_rng(seed)
    centers = _kmeans_pp_init(m, k, rng)
    inertia_history: list[float] = []
    labels = np.zeros(n, dtype=np.int64)
    for _ in range(max_iter):
        d2 = cdist(m, centers, "sqeuclidean")
        labels = d2.argmin(axis=1)
        counts = np.bincount(labels, minlength=k)
        while (counts == 0).any():
            assigned = d2[np.arange(n), labels]
            if assigned.max() == 0:
                break  # duplicate points, nothing left to split
            empty = int(np.nonzero(counts == 0)[0][0])
            centers[empty] = m[int(np.argmax(assigned))]
            d2 = cdist(m, centers, "sqeuclidean")
            labels = d2.argmin(axis=1)
            counts = np.bincount(labels, minlength=k)
        inertia_history.append(float(d2[np.arange(n), labels].sum()))
        sums = np.zeros_like(centers)
        np.add.at(sums, labels, m)
        new_centers = np.where(counts[:, None] > 0, sums / np.maximum(counts, 1)[:, None], centers)
        shift = float(np.sqrt(((new_centers - centers) ** 2).sum(axis=1)).max())
        centers = new_centers
        if shift < tol:
            break
    config = ClusterConfig(algorithm="kmeans", n_clusters=k, seed=seed, max_iter=max_iter, tol=tol)
    diagnostics = {
        "inertia": inertia_history[-1],
        "inertia_history": inertia_history,
        "n_iter": len(inertia_history),
    }
    return ClusterResult(labels=labels.astype(np.int64), config=config, diagnostics=diagnostics)


def hierarchical(m: np.ndarray, k: int, linkage: str) -> ClusterResult:
    """Agglomerative clustering stopped at k clusters.

    Cluster distances follow the chosen linkage on Euclidean distances; ward
    merges by the increase in within-cluster sum of squares. Final labels are
    numbered by each cluster's smallest member id.
    """
    if linkage not in LINKAGES:
        raise InvalidConfig(f"unknown linkage {linkage!r}", field="linkage")
    m = _check_matrix(m, k)
    n = m.shape[0]
    if linkage == "ward":
        d = cdist(m, m, "sqeuclidean") / 2.0
    else:
        d = cdist(m, m, "euclidean")
    np.fill_diagonal(d, np.inf)

    active = np.ones(n, dtype=bool)
    sizes = np.ones(n, dtype=np.float64)
    members: list[list[int]] = [[i] for i in range(n)]
    if n > 1:
        minval = d.min(axis=1)
        minidx = d.argmin(axis=1)
    heights: list[float] = []
    for _ in range(n - k):
        mv = np.where(active, minval, np.inf)
        r = int(np.argmin(mv))
        s = int(minidx[r])
        height = float(minval[r])
        heights.append(height)

        others = np.nonzero(active)[0]
        others = others[(others != r) & (others != s)]
        dr = d[r, others]
        dsv = d[s, others]
        if linkage == "single":
            new_vals = np.minimum(dr, dsv)
        elif linkage == "complete":
            new_vals = np.maximum(dr, dsv)
        elif linkage == "average":
            new_vals = (sizes[r] * dr + sizes[s] * dsv) / (sizes[r] + sizes[s])
        else:  # ward merge cost on squared Euclidean
            so = sizes[others]
            new_vals = ((sizes[r] + so) * dr + (sizes[s] + so) * dsv - so * height) \
                / (sizes[r] + sizes[s] + so)
        d[r, others] = new_vals
        d[others, r] = new_vals
        d[r, s] = d[s, r] = np.inf
        d[s, :] = np.inf
        d[:, s] = np.inf
        active[s] = False
        sizes[r] += sizes[s]
        members[r].extend(members[s])

        minval[r] = d[r].min()
        minidx[r] = int(d[r].argmin())
        pointed = others[(minidx[others] == r) | (minidx[others] == s)]
        for row in pointed:
            minval[row] = d[row].min()
            minidx[row] = int(d[row].argmin())
        rest = others[(minidx[others] != r) & (minidx[others] != s)]
        v = d[rest, r]
        improved = (v < minval[rest]) | ((v == minval[rest]) & (r < minidx[rest]))
        rest = rest[improved]
        minval[rest] = d[rest, r]
        minidx[rest] = r

    labels = np.empty(n, dtype=np.int64)
    for label, slot in enumerate(sorted(np.nonzero(active)[0])):
        labels[members[slot]] = label
    config = ClusterConfig(algorithm="hierarchical", n_clusters=k, linkage=linkage)
    return ClusterResult(labels=labels, config=config,
                         diagnostics={"merge_heights": heights})


def minmax_cluster(m: np.ndarray, k: int) -> ClusterResult:
    """Farthest-first traversal k-center clustering.

    The first center is the lowest-id point nearest the data centroid; each
    next center maximizes the distance to its nearest chosen center (ties go
    to the smaller id). The reported radius is the worst point-to-center
    distance, within 2x of the optimal k-center radius.
    """
    m = _check_matrix(m, k)
    n = m.shape[0]
    centroid = m.mean(axis=0)
    first = int(np.argmin(np.sqrt(((m - centroid) ** 2).sum(axis=1))))
    centers = [first]
    dmin = np.sqrt(((m - m[first]) ** 2).sum(axis=1))
    dmin[first] = -1.0  # never re-pick a chosen point
    while len(centers) < k:
        nxt = int(np.argmax(dmin))
        centers.append(nxt)
        np.minimum(dmin, np.sqrt(((m - m[nxt]) ** 2).sum(axis=1)), out=dmin)
        dmin[nxt] = -1.0
    dc = cdist(m, m[centers], "euclidean")
    labels = dc.argmin(axis=1).astype(np.int64)
    labels[centers] = np.arange(len(centers))  # a center always anchors its own cluster
    radius = float(dc[np.arange(n), labels].max())
    config = ClusterConfig(algorithm="minmax", n_clusters=k)
    return ClusterResult(labels=labels, config=config,
                         diagnostics={"radius": radius,
                                      "center_point_ids": [int(c) for c in centers]})


def run_pipeline(ds: Dataset, elements: Sequence[str] | None, cfg: ClusterConfig) -> ClusterResult:
    """feature selection -> standardize -> optional reduction -> algorithm."""
    x = feature_matrix(ds, elements)
    if x.shape[1] == 0:
        raise InvalidConfig("clustering needs at least one element", field="elements")
    z = standardize(x).data
    reduction_info: dict[str, Any] = {"kind": "none"}
    if isinstance(cfg.reduction, PcaReduction):
        model, z = pca_fit_transform(z, cfg.reduction.variance_fraction)
        reduction_info = {"kind": "pca", "retained_k": model.retained_k}
    elif isinstance(cfg.reduction, TsneReduction):
        z = tsne_embed(z, cfg.reduction.tsne)
        reduction_info = {"kind": "tsne", "perplexity": cfg.reduction.tsne.perplexity}

    if cfg.algorithm == "kmeans":
        result = kmeans(z, cfg.n_clusters, seed=cfg.seed, max_iter=cfg.max_iter, tol=cfg.tol)
    elif cfg.algorithm == "hierarchical":
        result = hierarchical(z, cfg.n_clusters, cfg.linkage)
    else:
        result = minmax_cluster(z, cfg.n_clusters)
    diagnostics = dict(result.diagnostics)
    diagnostics["reduction"] = reduction_info
    return ClusterResult(labels=result.labels, config=cfg, diagnostics=diagnostics)


def labels_to_groups(result: ClusterResult, reg: GroupRegistry) -> GroupRegistry:
    """Materialize clusters as editable groups, one per cluster id.

    Cluster members already held by locked groups stay where they are; members
    of unlocked groups are moved into the new cluster groups.
    """
    labels = result.labels
    k = int(labels.max()) + 1 if labels.size else 0
    if len(reg.groups) + k > MAX_GROUPS:
        raise GroupLimitExceeded(
            f"{k} new groups would exceed the {MAX_GROUPS}-group limit"
        )
    algorithm = result.config.algorithm
    for c in range(k):
        ids = frozenset(int(i) for i in np.nonzero(labels == c)[0])
        reg, gid = create_group(reg, f"cluster-{c} ({algorithm})")
        if ids:
            reg = assign_selection(reg, gid, ids).registry
    return reg


def config_to_dict(cfg: ClusterConfig) -> dict[str, Any]:
    """JSON-friendly echo of a cluster configuration."""
    out: dict[str, Any] = {
        "algorithm": cfg.algorithm,
        "n_clusters": cfg.n_clusters,
        "seed": cfg.seed,
        "max_iter": cfg.max_iter,
        "tol": cfg.tol,
    }
    if cfg.linkage is not None:
        out["linkage"] = cfg.linkage
    if cfg.reduction is None:
        out["reduction"] = {"kind": "none"}
    elif isinstance(cfg.reduction, PcaReduction):
        out["reduction"] = {"kind": "pca", "variance_fraction": cfg.reduction.variance_fraction}
    else:
        t = cfg.reduction.tsne
        out["reduction"] = {
            "kind": "tsne",
            "perplexity": t.perplexity,
            "iterations": t.iterations,
            "learning_rate": t.learning_rate,
            "early_exaggeration": t.early_exaggeration,
            "exaggeration_iters": t.exaggeration_iters,
            "seed": t.seed,
        }
    return out


def _expect(payload: dict, key: str, kind, default=None, required=False):
    if key not in payload or payload[key] is None:
        if required:
            raise InvalidConfig(f"missing required field {key!r}", field=key)
        return default
    value = payload[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if kind is int and isinstance(value, bool):
        raise InvalidConfig(f"field {key!r} must be {kind.__name__}", field=key)
    if not isinstance(value, kind):
        raise InvalidConfig(f"field {key!r} must be {kind.__name__}", field=key)
    return value


def config_from_dict(payload: dict[str, Any], default_seed: int = 0) -> ClusterConfig:
    """Parse an API/workspace payload into a validated ClusterConfig."""
    if not isinstance(payload, dict):
        raise InvalidConfig("cluster config must be an object")
    reduction = None
    red = payload.get("reduction")
    if red is not None:
        if not isinstance(red, dict):
            raise InvalidConfig("reduction must be an object", field="reduction")
        kind = red.get("kind", "none")
        if kind == "none":
            reduction = None
        elif kind == "pca":
            reduction = PcaReduction(
                variance_fraction=_expect(red, "variance_fraction", float, default=0.95))
        elif kind == "tsne":
            reduction = TsneReduction(tsne=TsneConfig(
                perplexity=_expect(red, "perplexity", float, default=30.0),
                iterations=_expect(red, "iterations", int, default=1000),
                learning_rate=_expect(red, "learning_rate", float, default=200.0),
                early_exaggeration=_expect(red, "early_exaggeration", float, default=12.0),
                exaggeration_iters=_expect(red, "exaggeration_iters", int, default=250),
                seed=_expect(red, "seed", int, default=default_seed),
            ))
        else:
            raise InvalidConfig(f"unknown reduction kind {kind!r}", field="reduction")
    return ClusterConfig(
        algorithm=_expect(payload, "algorithm", str, required=True),
        n_clusters=_expect(payload, "n_clusters", int, required=True),
        reduction=reduction,
        linkage=_expect(payload, "linkage", str),
        seed=_expect(payload, "seed", int, default=default_seed),
        max_iter=_expect(payload, "max_iter", int, default=300),
        tol=_expect(payload, "tol", float, default=1e-4),
    )
