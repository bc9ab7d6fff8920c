"""Acceptance suite: one test per release criterion, at stated tolerances.

Each test prints a [PASS] line with its measurements (visible with -s; on
failure pytest reports the criterion as FAILED).
"""

import math
import time

import numpy as np
import pytest
from fastapi.testclient import TestClient
from sklearn.metrics import adjusted_rand_score

from oracles import (
    distance_to_polygon_boundary,
    covariance_explained_ratios,
    exhaustive_k_center_radius,
    jaccard,
    naive_agglomerate,
    partition_from_labels,
    random_star_polygon,
    summary_oracle,
    winding_number_inside,
)
from xrfbench.cluster import (
    ClusterConfig,
    PcaReduction,
    TsneReduction,
    hierarchical,
    kmeans,
    minmax_cluster,
    run_pipeline,
)
from xrfbench.dataset import dataset_from_arrays
from xrfbench.dimreduce import TsneConfig, conditional_probabilities, pca_fit_transform, tsne_embed
from xrfbench.errors import GroupLimitExceeded, GroupLocked
from xrfbench.selection import (
    GroupRegistry,
    annotate_group,
    assign_selection,
    create_group,
    point_in_polygon,
    remove_from_group,
    set_locked,
)
from xrfbench.service import ServiceState, create_app
from xrfbench.stats import summarize
from xrfbench.synthetic import crater_grid, gaussian_blobs
from xrfbench.workspace import export_groups_csv, load_workspace, save_workspace, workspace_for

from scipy.spatial.distance import cdist


def report(name: str, detail: str):
    print(f"[PASS] {name}: {detail}")


def test_crater_recovery(crater):
    """Four clustering configurations, k=5 each, recover the planted crater."""
    started = time.perf_counter()
    crater_ids = set(np.nonzero(crater.crater_mask)[0])
    tsne_cfg = TsneConfig(perplexity=30, iterations=300, exaggeration_iters=150, seed=0)
    configs = {
        "hierarchical(ward)": ClusterConfig(algorithm="hierarchical", n_clusters=5,
                                            linkage="ward"),
        "kmeans+pca(0.95)": ClusterConfig(algorithm="kmeans", n_clusters=5, seed=0,
                                          reduction=PcaReduction(0.95)),
        "kmeans+tsne(perp=30)": ClusterConfig(algorithm="kmeans", n_clusters=5, seed=0,
                                              reduction=TsneReduction(tsne_cfg)),
        "kmeans": ClusterConfig(algorithm="kmeans", n_clusters=5, seed=0),
    }
    scores = {}
    for name, cfg in configs.items():
        result = run_pipeline(crater.dataset, None, cfg)
        best = max(
            jaccard(set(np.nonzero(result.labels == c)[0]), crater_ids)
            for c in range(int(result.labels.max()) + 1)
        )
        scores[name] = best
        assert best >= 0.8, f"{name}: crater Jaccard {best:.3f} < 0.8"
    elapsed = time.perf_counter() - started
    assert elapsed <= 120.0, f"crater suite took {elapsed:.1f}s > 120s"
    report("crater recovery",
           ", ".join(f"{k} J={v:.3f}" for k, v in scores.items()) + f"; {elapsed:.1f}s")


def test_clustering_oracles():
    """Hierarchical vs naive agglomerator, minmax 2-approximation, k-means monotonicity."""
    started = time.perf_counter()
    rng = np.random.default_rng(100)

    for trial in range(200):
        n = int(rng.integers(2, 11))
        d = int(rng.integers(1, 5))
        m = rng.normal(size=(n, d))
        k = int(rng.integers(1, n + 1))
        for linkage in ("single", "complete", "average", "ward"):
            expected, _ = naive_agglomerate(m, k, linkage)
            got = partition_from_labels(hierarchical(m, k, linkage).labels)
            assert got == set(expected), f"instance {trial}, linkage {linkage}"

    worst_ratio = 0.0
    for trial in range(60):
        n = int(rng.integers(4, 16))
        k = int(rng.integers(1, 4))
        m = rng.uniform(0, 10, size=(n, 2))
        radius = minmax_cluster(m, k).diagnostics["radius"]
        optimal = exhaustive_k_center_radius(m, k)
        if optimal > 0:
            worst_ratio = max(worst_ratio, radius / optimal)
        assert radius <= 2.0 * optimal + 1e-9, f"instance {trial}: {radius} > 2x{optimal}"

    for trial in range(100):
        n = int(rng.integers(5, 80))
        d = int(rng.integers(1, 6))
        k = int(rng.integers(1, min(n, 10) + 1))
        history = kmeans(rng.normal(size=(n, d)), k, seed=trial).diagnostics["inertia_history"]
        assert all(b <= a + 1e-9 for a, b in zip(history, history[1:])), f"run {trial}"

    elapsed = time.perf_counter() - started
    assert elapsed <= 60.0, f"clustering oracles took {elapsed:.1f}s > 60s"
    report("clustering oracles",
           f"200 hierarchical instances exact, minmax worst ratio {worst_ratio:.2f} <= 2, "
           f"100 monotone k-means runs; {elapsed:.1f}s")


def test_reduction_checks():
    """PCA eigen-solve oracle, isometry at full k, perplexity search, blob ARI."""
    started = time.perf_counter()
    rng = np.random.default_rng(200)

    for trial in range(50):
        n = int(rng.integers(10, 60))
        d = int(rng.integers(2, 8))
        m = rng.normal(size=(n, d)) @ rng.normal(size=(d, d))
        model, _ = pca_fit_transform(m, 1.0)
        expected = covariance_explained_ratios(m)[: model.retained_k]
        assert np.allclose(model.explained_variance_ratio, expected, atol=1e-8), f"trial {trial}"

    m = rng.normal(size=(50, 6))
    _, proj = pca_fit_transform(m, 1.0)
    assert np.allclose(cdist(proj, proj), cdist(m, m), atol=1e-6)

    worst_entropy_err = 0.0
    for n, perplexity in ((300, 30.0), (120, 8.0), (50, 49.0)):
        data = rng.normal(size=(n, 5))
        cond, _ = conditional_probabilities(cdist(data, data, "sqeuclidean"), perplexity)
        with np.errstate(divide="ignore"):
            logs = np.where(cond > 0, np.log2(np.where(cond > 0, cond, 1.0)), 0.0)
        entropies = -(cond * logs).sum(axis=1)
        err = float(np.abs(entropies - math.log2(perplexity)).max())
        worst_entropy_err = max(worst_entropy_err, err)
        assert err <= 1e-5, f"perplexity {perplexity}: entropy error {err}"

    centers = np.array([[0.0, 0.0, 0.0], [12.0, 0.0, 0.0], [0.0, 12.0, 0.0]])
    aris = []
    for seed in range(5):
        points, labels = gaussian_blobs(100, centers, sigma=1.0, seed=seed)
        emb = tsne_embed(points, TsneConfig(perplexity=30, iterations=500,
                                            learning_rate=50, seed=seed))
        ari = adjusted_rand_score(labels, kmeans(emb, 3, seed=0).labels)
        aris.append(ari)
        assert ari >= 0.9, f"seed {seed}: ARI {ari:.3f}"

    elapsed = time.perf_counter() - started
    assert elapsed <= 90.0, f"reduction checks took {elapsed:.1f}s > 90s"
    report("reduction checks",
           f"50 PCA oracles ok, isometry ok, max entropy err {worst_entropy_err:.1e}, "
           f"blob ARI min {min(aris):.3f}; {elapsed:.1f}s")


def test_statistics_oracle():
    """summarize matches the sort-based oracle on 10,000 random arrays."""
    started = time.perf_counter()
    rng = np.random.default_rng(300)
    keys = ("mean", "sd", "min", "q1", "median", "q3", "max")
    for trial in range(10_000):
        n = int(rng.integers(1, 201))
        values = rng.uniform(0, 100, n)
        if trial % 7 == 0:
            values[: n // 2] = 0.0  # exercise zero-heavy inputs
        s = summarize(values)
        oracle = summary_oracle(values.tolist())
        for key in keys:
            a, b = getattr(s, key), oracle[key]
            assert math.isclose(a, b, rel_tol=1e-10, abs_tol=1e-12), (trial, key, a, b)
        assert s.min <= s.q1 <= s.median <= s.q3 <= s.max
        if s.cv is None:
            assert s.mean == 0
        else:
            assert math.isclose(s.cv * s.mean, s.sd, rel_tol=1e-12, abs_tol=1e-300)
    elapsed = time.perf_counter() - started
    report("statistics oracle",
           f"10,000 arrays within 1e-10, ordering chain held, cv*mean=sd; {elapsed:.1f}s")


def test_selection_semantics():
    """Winding-number agreement and registry invariants under random op storms."""
    started = time.perf_counter()
    rng = np.random.default_rng(400)

    agree = 0
    while agree < 1000:
        poly = random_star_polygon(rng, int(rng.integers(3, 14)),
                                   center=(rng.uniform(-1, 1), rng.uniform(-1, 1)))
        p = (float(rng.uniform(-4, 4)), float(rng.uniform(-4, 4)))
        if distance_to_polygon_boundary(p, poly) < 1e-9:
            continue
        assert point_in_polygon(p, poly) == winding_number_inside(p, poly), (p, poly)
        agree += 1

    for sequence in range(1000):
        reg = GroupRegistry()
        locked_members: dict[int, frozenset] = {}
        for _ in range(50):
            op = rng.integers(0, 6)
            gids = [g.group_id for g in reg.groups]
            gid = int(rng.choice(gids)) if gids else None
            ids = set(rng.integers(0, 60, size=rng.integers(0, 6)).tolist())
            try:
                if op == 0:
                    reg, _ = create_group(reg, "g")
                elif gid is None:
                    continue
                elif op == 1:
                    reg, _ = assign_selection(reg, gid, ids)
                elif op == 2:
                    reg = remove_from_group(reg, gid, ids)
                elif op == 3:
                    reg = set_locked(reg, gid, True)
                    locked_members[gid] = reg.group(gid).members
                elif op == 4:
                    reg = set_locked(reg, gid, False)
                    locked_members.pop(gid, None)
                else:
                    reg = annotate_group(reg, gid, "note")
            except (GroupLocked, GroupLimitExceeded):
                pass
            seen: set[int] = set()
            for g in reg.groups:
                assert not (g.members & seen), f"sequence {sequence}: overlap"
                seen |= g.members
            for locked_gid, members in locked_members.items():
                assert reg.group(locked_gid).members == members, \
                    f"sequence {sequence}: locked group changed"
    elapsed = time.perf_counter() - started
    report("selection semantics",
           f"1,000 winding-oracle agreements, 1,000x50 op sequences clean; {elapsed:.1f}s")


def _random_registry(rng: np.random.Generator) -> GroupRegistry:
    reg = GroupRegistry()
    taken: set[int] = set()
    for i in range(int(rng.integers(0, 10))):
        reg, gid = create_group(reg, f"group-{i}")
        pick = set(rng.integers(0, 100, size=rng.integers(0, 8)).tolist()) - taken
        taken |= pick
        if pick:
            reg, _ = assign_selection(reg, gid, pick)
        if rng.random() < 0.3:
            reg = annotate_group(reg, gid, f"note {i}")
        if rng.random() < 0.3:
            reg = set_locked(reg, gid, True)
    return reg


def test_persistence():
    """Round-trip identity on 500 random workspaces; stable bytes; export rows."""
    started = time.perf_counter()
    rng = np.random.default_rng(500)
    xyz = np.column_stack([np.arange(100.0), np.zeros(100)])
    ds = dataset_from_arrays(xyz, rng.uniform(0, 50, (100, 3)), ["Fe", "Si", "Ca"])
    for trial in range(500):
        reg = _random_registry(rng)
        w = workspace_for(ds, reg)
        data = save_workspace(w)
        assert save_workspace(w) == data, f"trial {trial}: save not byte-stable"
        loaded = load_workspace(data, dataset=ds)
        assert loaded.workspace == w, f"trial {trial}: round-trip mismatch"
        assert not loaded.dataset_mismatch
    body = export_groups_csv(ds, _random_registry(rng)).decode()
    rows = [r for r in body.split("\r\n") if r]
    assert len(rows) - 1 == ds.n_points
    elapsed = time.perf_counter() - started
    report("persistence",
           f"500 workspaces round-tripped byte-stably, export rows == points; {elapsed:.1f}s")


def test_service_determinism_and_roundtrip(crater):
    """Byte-identical clustering replies; full API round-trip under 5 s at 6400 points."""
    state = ServiceState(default_seed=0)
    state.add_dataset("crater", crater.dataset)
    client = TestClient(create_app(state))

    request = {"algorithm": "kmeans", "n_clusters": 5, "seed": 42}
    first = client.post("/api/datasets/crater/cluster", json=request)
    second = client.post("/api/datasets/crater/cluster", json=request)
    assert first.status_code == 200
    assert first.content == second.content

    started = time.perf_counter()
    listing = client.get("/api/datasets").json()
    assert listing["datasets"][0]["n_points"] == 6400
    gid = client.post("/api/datasets/crater/groups",
                      json={"op": "create", "name": "crater?"}).json()["group_id"]
    ids = [int(i) for i in np.nonzero(crater.crater_mask)[0]]
    assigned = client.post("/api/datasets/crater/groups",
                           json={"op": "assign", "group_id": gid, "point_ids": ids})
    assert assigned.status_code == 200
    stats_before = client.get("/api/datasets/crater/stats", params={"group_id": gid})
    saved = client.get("/api/datasets/crater/workspace")
    put = client.put("/api/datasets/crater/workspace", content=saved.content)
    assert put.status_code == 200 and put.json()["dataset_mismatch"] is False
    stats_after = client.get("/api/datasets/crater/stats", params={"group_id": gid})
    assert stats_after.content == stats_before.content
    elapsed = time.perf_counter() - started
    assert elapsed < 5.0, f"round-trip took {elapsed:.2f}s >= 5s"
    report("service determinism and round-trip",
           f"byte-identical cluster bodies, round-trip {elapsed:.2f}s < 5s")
