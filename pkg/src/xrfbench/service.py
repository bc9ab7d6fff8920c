"""HTTP facade binding datasets, stats, clustering, groups, and workspaces.

Reads are unrestricted; group-mutating commands are serialized per dataset
through a single lock so the registry history is linearizable. Clustering is
synchronous and pure unless the request explicitly asks for the labels to be
materialized as groups. At most one t-SNE job runs per dataset at a time.
"""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from concurrent.futures import TimeoutError as FutureTimeout
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import cluster as clustering
from . import selection
from .dataset import Dataset, bounding_box
from .errors import (
    EmptySelection,
    InvalidConfig,
    KTooLarge,
    TimeBudgetExceeded,
    TooManyPoints,
    UnknownDataset,
    UnknownPoint,
    WorkbenchError,
)
from .stats import DisplayScale, SortOrder, group_stats, sort_elements
from .workspace import (
    WORKSPACE_EXTENSION,
    Workspace,
    dataset_fingerprint,
    load_workspace,
    registry_to_dict,
    save_workspace,
    utc_now,
)

ERROR_STATUS: dict[str, int] = {
    "unknown_dataset": 404,
    "unknown_group": 404,
    "group_locked": 409,
    "unsupported_version": 409,
    "k_too_large": 422,
    "too_many_points": 413,
    "time_budget_exceeded": 504,
}

SORT_ORDERS = {
    "mean_desc": SortOrder("mean", "descending"),
    "mean_asc": SortOrder("mean", "ascending"),
    "cv_desc": SortOrder("cv", "descending"),
    "cv_asc": SortOrder("cv", "ascending"),
}


@dataclass
class DatasetEntry:
    dataset: Dataset
    registry: selection.GroupRegistry = field(default_factory=selection.GroupRegistry)
    last_cluster_config: clustering.ClusterConfig | None = None
    created: str = field(default_factory=utc_now)
    modified: str = field(default_factory=utc_now)
    lock: threading.Lock = field(default_factory=threading.Lock)
    tsne_lock: threading.Lock = field(default_factory=threading.Lock)


class ServiceState:
    """Authoritative per-dataset registries plus service-wide settings."""

    def __init__(
        self,
        default_seed: int = 0,
        workspace_dir: Path | None = None,
        time_budget_s: float = 120.0,
        tsne_point_limit: int = 10_000,
    ):
        self.entries: dict[str, DatasetEntry] = {}
        self.default_seed = default_seed
        self.workspace_dir = Path(workspace_dir) if workspace_dir else None
        self.time_budget_s = time_budget_s
        self.tsne_point_limit = tsne_point_limit

    def add_dataset(self, dataset_id: str, ds: Dataset) -> DatasetEntry:
        entry = DatasetEntry(dataset=ds)
        self.entries[dataset_id] = entry
        if self.workspace_dir is not None:
            path = self.workspace_dir / f"{dataset_id}{WORKSPACE_EXTENSION}"
            if path.exists():
                loaded = load_workspace(path.read_bytes(), dataset=ds)
                entry.registry = loaded.workspace.registry
                entry.last_cluster_config = loaded.workspace.last_cluster_config
                entry.created = loaded.workspace.created
                entry.modified = loaded.workspace.modified
        return entry

    def entry(self, dataset_id: str) -> DatasetEntry:
        if dataset_id not in self.entries:
            raise UnknownDataset(f"no dataset {dataset_id!r}", dataset_id=dataset_id)
        return self.entries[dataset_id]


def _error_response(exc: WorkbenchError) -> JSONResponse:
    body: dict[str, Any] = {"error_code": exc.code, "message": str(exc)}
    field_name = getattr(exc, "field", None) or exc.context.get("field")
    if field_name:
        body["field"] = field_name
    return JSONResponse(status_code=ERROR_STATUS.get(exc.code, 400), content=body)


def _parse_point_ids(ds: Dataset, raw: Any) -> frozenset[int]:
    if raw is None:
        return frozenset()
    if isinstance(raw, str):
        raw = [part for part in raw.split(",") if part.strip() != ""]
    if not isinstance(raw, (list, tuple)):
        raise InvalidConfig("point_ids must be a list of integers", field="point_ids")
    ids = set()
    for item in raw:
        try:
            pid = int(item)
        except (TypeError, ValueError):
            raise InvalidConfig(f"bad point id {item!r}", field="point_ids") from None
        if not 0 <= pid < ds.n_points:
            raise UnknownPoint(f"point id {pid} outside dataset", point_id=pid)
        ids.add(pid)
    return frozenset(ids)


def _workspace_snapshot(entry: DatasetEntry) -> Workspace:
    return Workspace(
        dataset_source_id=entry.dataset.source_id,
        dataset_hash=dataset_fingerprint(entry.dataset),
        registry=entry.registry,
        last_cluster_config=entry.last_cluster_config,
        created=entry.created,
        modified=entry.modified,
    )


def _stats_payload(ds: Dataset, point_ids, elements, sort_key: str, scale_kind: str) -> dict:
    if sort_key not in SORT_ORDERS:
        raise InvalidConfig(f"unknown sort {sort_key!r}", field="sort")
    if scale_kind not in ("linear", "log10"):
        raise InvalidConfig(f"unknown scale {scale_kind!r}", field="scale")
    DisplayScale(kind=scale_kind)  # validates; scaling itself is a client concern
    stats = group_stats(ds, point_ids, elements)
    ordered = sort_elements(stats, SORT_ORDERS[sort_key])
    by_element = {s.element: s for s in stats}
    return {
        "n": len(set(point_ids)),
        "sort": sort_key,
        "scale": scale_kind,
        "stats": [
            {
                "element": s.element, "n": s.n, "mean": s.mean, "sd": s.sd,
                "cv": s.cv, "min": s.min, "q1": s.q1, "median": s.median,
                "q3": s.q3, "max": s.max,
            }
            for s in (by_element[name] for name in ordered)
        ],
    }


def create_app(state: ServiceState) -> FastAPI:
    app = FastAPI(title="xrfbench", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(WorkbenchError)
    async def workbench_error(_req: Request, exc: WorkbenchError):
        return _error_response(exc)

    @app.exception_handler(RequestValidationError)
    async def request_validation_error(_req: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"error_code": "invalid_config", "message": str(exc.errors()[:1])},
        )

    @app.get("/api/datasets")
    def list_datasets():
        return {
            "datasets": [
                {
                    "id": dataset_id,
                    "source_id": entry.dataset.source_id,
                    "n_points": entry.dataset.n_points,
                    "element_names": list(entry.dataset.element_names),
                }
                for dataset_id, entry in sorted(state.entries.items())
            ]
        }

    @app.get("/api/datasets/{dataset_id}")
    def get_dataset(dataset_id: str):
        entry = state.entry(dataset_id)
        ds = entry.dataset
        return {
            "id": dataset_id,
            "source_id": ds.source_id,
            "element_names": list(ds.element_names),
            "bounds": list(bounding_box(ds)),
            "points": [
                {"id": i, "x": float(ds.xyz[i, 0]), "y": float(ds.xyz[i, 1]),
                 "z": float(ds.xyz[i, 2])}
                for i in range(ds.n_points)
            ],
        }

    @app.get("/api/datasets/{dataset_id}/stats")
    def get_stats(
        dataset_id: str,
        group_id: int | None = None,
        points: str | None = None,
        elements: str | None = None,
        sort: str = "mean_desc",
        scale: str = "linear",
    ):
        entry = state.entry(dataset_id)
        ds = entry.dataset
        if group_id is not None and points is not None:
            raise InvalidConfig("pass either group_id or points, not both", field="points")
        if group_id is not None:
            member_ids = entry.registry.group(group_id).members
            if not member_ids:
                raise EmptySelection(f"group {group_id} has no members")
            point_ids = member_ids
        elif points is not None:
            point_ids = _parse_point_ids(ds, points)
            if not point_ids:
                raise EmptySelection("points parameter is empty")
        else:
            point_ids = range(ds.n_points)  # all-points summary
        names = elements.split(",") if elements else None
        payload = _stats_payload(ds, point_ids, names, sort, scale)
        if group_id is not None:
            payload["group_id"] = group_id
        return payload

    @app.get("/api/datasets/{dataset_id}/groups")
    def get_groups(dataset_id: str):
        entry = state.entry(dataset_id)
        return {"registry": registry_to_dict(entry.registry)}

    @app.post("/api/datasets/{dataset_id}/groups")
    async def post_groups(dataset_id: str, request: Request):
        entry = state.entry(dataset_id)
        try:
            payload = await request.json()
        except Exception:
            raise InvalidConfig("body must be a JSON object") from None
        if not isinstance(payload, dict) or "op" not in payload:
            raise InvalidConfig("missing group operation", field="op")
        op = payload["op"]
        response: dict[str, Any] = {}
        with entry.lock:
            reg = entry.registry
            if op == "create":
                name = payload.get("name")
                if not isinstance(name, str) or not name:
                    raise InvalidConfig("create needs a non-empty name", field="name")
                reg, gid = selection.create_group(reg, name)
                response["group_id"] = gid
            elif op in ("assign", "remove"):
                gid = payload.get("group_id")
                if not isinstance(gid, int):
                    raise InvalidConfig("missing group_id", field="group_id")
                ids = _parse_point_ids(entry.dataset, payload.get("point_ids"))
                polygon = payload.get("polygon")
                if polygon is not None:
                    ids |= selection.lasso_select(entry.dataset, polygon, "add", ())
                if op == "assign":
                    reg, skipped = selection.assign_selection(reg, gid, ids)
                    response["skipped"] = sorted(skipped)
                else:
                    reg = selection.remove_from_group(reg, gid, ids)
            elif op == "annotate":
                gid = payload.get("group_id")
                if not isinstance(gid, int):
                    raise InvalidConfig("missing group_id", field="group_id")
                text = payload.get("text", "")
                if not isinstance(text, str):
                    raise InvalidConfig("annotation text must be a string", field="text")
                reg = selection.annotate_group(reg, gid, text)
            elif op == "lock":
                gid = payload.get("group_id")
                if not isinstance(gid, int):
                    raise InvalidConfig("missing group_id", field="group_id")
                locked = payload.get("locked")
                if not isinstance(locked, bool):
                    raise InvalidConfig("lock needs a boolean 'locked'", field="locked")
                reg = selection.set_locked(reg, gid, locked)
            else:
                raise InvalidConfig(f"unknown group op {op!r}", field="op")
            entry.registry = reg
            entry.modified = utc_now()
        response["registry"] = registry_to_dict(entry.registry)
        return response

    @app.post("/api/datasets/{dataset_id}/cluster")
    async def post_cluster(dataset_id: str, request: Request):
        entry = state.entry(dataset_id)
        ds = entry.dataset
        try:
            payload = await request.json()
        except Exception:
            raise InvalidConfig("body must be a JSON object") from None
        if not isinstance(payload, dict):
            raise InvalidConfig("body must be a JSON object")
        cfg = clustering.config_from_dict(payload, default_seed=state.default_seed)
        if cfg.n_clusters > ds.n_points:
            raise KTooLarge(f"n_clusters {cfg.n_clusters} exceeds {ds.n_points} points")
        elements = payload.get("elements")
        if elements is not None and (
            not isinstance(elements, list) or not all(isinstance(e, str) for e in elements)
        ):
            raise InvalidConfig("elements must be a list of names", field="elements")
        to_groups = payload.get("to_groups", False)
        if not isinstance(to_groups, bool):
            raise InvalidConfig("to_groups must be a boolean", field="to_groups")

        is_tsne = isinstance(cfg.reduction, clustering.TsneReduction)
        if is_tsne and ds.n_points > state.tsne_point_limit:
            raise TooManyPoints(
                f"t-SNE requests are rejected above {state.tsne_point_limit} points"
            )

        def run() -> clustering.ClusterResult:
            if is_tsne:
                with entry.tsne_lock:  # at most one in-flight t-SNE per dataset
                    return clustering.run_pipeline(ds, elements, cfg)
            return clustering.run_pipeline(ds, elements, cfg)

        executor = ThreadPoolExecutor(max_workers=1)
        try:
            result = executor.submit(run).result(timeout=state.time_budget_s)
        except FutureTimeout:
            executor.shutdown(wait=False, cancel_futures=True)
            raise TimeBudgetExceeded(
                f"clustering exceeded the {state.time_budget_s:.0f}s budget"
            ) from None
        executor.shutdown(wait=False)

        response: dict[str, Any] = {
            "labels": [int(v) for v in result.labels],
            "diagnostics": result.diagnostics,
            "config": clustering.config_to_dict(cfg),
        }
        if to_groups:
            with entry.lock:
                entry.registry = clustering.labels_to_groups(result, entry.registry)
                entry.last_cluster_config = cfg
                entry.modified = utc_now()
            response["registry"] = registry_to_dict(entry.registry)
        return response

    @app.get("/api/datasets/{dataset_id}/workspace")
    def get_workspace(dataset_id: str):
        entry = state.entry(dataset_id)
        with entry.lock:
            data = save_workspace(_workspace_snapshot(entry))
        return Response(content=data, media_type="application/json")

    @app.put("/api/datasets/{dataset_id}/workspace")
    async def put_workspace(dataset_id: str, request: Request):
        entry = state.entry(dataset_id)
        body = await request.body()
        loaded = load_workspace(body, dataset=entry.dataset)
        w = loaded.workspace
        with entry.lock:
            entry.registry = w.registry
            entry.last_cluster_config = w.last_cluster_config
            entry.created = w.created
            entry.modified = w.modified
            if state.workspace_dir is not None:
                state.workspace_dir.mkdir(parents=True, exist_ok=True)
                path = state.workspace_dir / f"{dataset_id}{WORKSPACE_EXTENSION}"
                path.write_bytes(save_workspace(w))
        return {
            "status": "ok",
            "dataset_mismatch": loaded.dataset_mismatch,
            "registry": registry_to_dict(entry.registry),
        }

    return app
