"""Workspace save/load and group export.

A workspace is a canonical-JSON snapshot of the group registry plus the last
clustering configuration, bound to its dataset by content hash. Canonical
means: sorted keys, compact separators, groups ordered by id, member lists
ascending — saving the same workspace twice yields identical bytes.

Group export is an RFC-4180-style CSV other tools can ingest directly.
"""

from __future__ import annotations

import hashlib
import io
import json
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import IO, NamedTuple

import numpy as np

from .cluster import ClusterConfig, config_from_dict, config_to_dict
from .dataset import Dataset
from .errors import MalformedWorkspace, SinkFailure, UnsupportedVersion
from .selection import MAX_GROUPS, GroupRegistry, PointGroup

FORMAT_VERSION = 1
WORKSPACE_EXTENSION = ".pxcw.json"


@dataclass(frozen=True)
class Workspace:
    dataset_source_id: str
    dataset_hash: str
    registry: GroupRegistry
    last_cluster_config: ClusterConfig | None
    created: str   # ISO-8601 UTC
    modified: str  # ISO-8601 UTC
    format_version: int = FORMAT_VERSION


class LoadedWorkspace(NamedTuple):
    workspace: Workspace
    dataset_mismatch: bool


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


def dataset_fingerprint(ds: Dataset) -> str:
    """Content hash of a dataset, independent of its CSV formatting."""
    h = hashlib.sha256()
    h.update(ds.source_id.encode("utf-8"))
    h.update(b"\x00")
    h.update(",".join(ds.element_names).encode("utf-8"))
    h.update(b"\x00")
    h.update(np.ascontiguousarray(ds.xyz, dtype="<f8").tobytes())
    h.update(np.ascontiguousarray(ds.features, dtype="<f8").tobytes())
    return "sha256:" + h.hexdigest()


def workspace_for(
    ds: Dataset,
    registry: GroupRegistry,
    last_cluster_config: ClusterConfig | None = None,
    created: str | None = None,
    modified: str | None = None,
) -> Workspace:
    now = utc_now()
    return Workspace(
        dataset_source_id=ds.source_id,
        dataset_hash=dataset_fingerprint(ds),
        registry=registry,
        last_cluster_config=last_cluster_config,
        created=created or now,
        modified=modified or now,
    )


def registry_to_dict(reg: GroupRegistry) -> dict:
    return {
        "active_group": reg.active_group,
        "groups": [
            {
                "group_id": g.group_id,
                "name": g.name,
                "color": g.color,
                "locked": g.locked,
                "annotation": g.annotation,
                "members": sorted(g.members),
            }
            for g in sorted(reg.groups, key=lambda g: g.group_id)
        ],
    }


def registry_from_dict(payload: dict, dataset: Dataset | None = None) -> GroupRegistry:
    if not isinstance(payload, dict) or not isinstance(payload.get("groups"), list):
        raise MalformedWorkspace("registry must be an object with a 'groups' list")
    groups = []
    seen_ids: set[int] = set()
    seen_members: set[int] = set()
    for item in payload["groups"]:
        if not isinstance(item, dict):
            raise MalformedWorkspace("each group must be an object")
        try:
            gid = int(item["group_id"])
            name = str(item["name"])
            color = str(item["color"])
            locked = bool(item.get("locked", False))
            annotation = item.get("annotation")
            members = frozenset(int(i) for i in item.get("members", []))
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedWorkspace(f"bad group record: {exc}") from None
        if annotation is not None and not isinstance(annotation, str):
            raise MalformedWorkspace("annotation must be a string or null")
        if gid < 0:
            raise MalformedWorkspace(f"negative group id {gid}")
        if gid in seen_ids:
            raise MalformedWorkspace(f"duplicate group id {gid}")
        seen_ids.add(gid)
        if members & seen_members:
            raise MalformedWorkspace("group members overlap")
        seen_members |= members
        if any(i < 0 for i in members):
            raise MalformedWorkspace("negative point id in group members")
        if dataset is not None and any(i >= dataset.n_points for i in members):
            raise MalformedWorkspace("group member id outside the dataset")
        groups.append(PointGroup(group_id=gid, name=name, color=color,
                                 members=members, locked=locked,
                                 annotation=annotation or None))
    if len(groups) > MAX_GROUPS:
        raise MalformedWorkspace(f"more than {MAX_GROUPS} groups")
    groups.sort(key=lambda g: g.group_id)
    active = payload.get("active_group")
    if active is not None:
        active = int(active)
        if active not in seen_ids:
            raise MalformedWorkspace(f"active_group {active} is not a group id")
    return GroupRegistry(groups=tuple(groups), active_group=active)


def save_workspace(w: Workspace, sink: IO[bytes] | None = None) -> bytes:
    """Serialize to canonical JSON bytes, optionally writing them to a sink."""
    payload = {
        "format_version": w.format_version,
        "dataset_ref": {"source_id": w.dataset_source_id, "content_hash": w.dataset_hash},
        "created": w.created,
        "modified": w.modified,
        "registry": registry_to_dict(w.registry),
        "last_cluster_config": (
            config_to_dict(w.last_cluster_config) if w.last_cluster_config else None
        ),
    }
    data = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")
    if sink is not None:
        try:
            sink.write(data)
        except OSError as exc:
            raise SinkFailure(f"could not write workspace: {exc}") from exc
    return data


def load_workspace(source: bytes | str | IO, dataset: Dataset | None = None) -> LoadedWorkspace:
    """Parse a saved workspace; load(save(w)) is structurally the identity.

    When a dataset is supplied, member ids are bounds-checked and the stored
    content hash is compared: a differing hash is not an error, just a raised
    ``dataset_mismatch`` flag.
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    try:
        payload = json.loads(source)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedWorkspace(f"not valid JSON: {exc}") from None
    if not isinstance(payload, dict):
        raise MalformedWorkspace("workspace must be a JSON object")
    version = payload.get("format_version")
    if not isinstance(version, int):
        raise MalformedWorkspace("missing integer format_version")
    if version != FORMAT_VERSION:
        raise UnsupportedVersion(f"format_version {version} is not supported")
    ref = payload.get("dataset_ref")
    if not isinstance(ref, dict) or "source_id" not in ref or "content_hash" not in ref:
        raise MalformedWorkspace("missing dataset_ref")
    created = payload.get("created")
    modified = payload.get("modified")
    if not isinstance(created, str) or not isinstance(modified, str):
        raise MalformedWorkspace("created/modified must be ISO-8601 strings")
    registry = registry_from_dict(payload.get("registry"), dataset=dataset)
    config_payload = payload.get("last_cluster_config")
    config = config_from_dict(config_payload) if config_payload is not None else None
    workspace = Workspace(
        dataset_source_id=str(ref["source_id"]),
        dataset_hash=str(ref["content_hash"]),
        registry=registry,
        last_cluster_config=config,
        created=created,
        modified=modified,
        format_version=version,
    )
    mismatch = dataset is not None and workspace.dataset_hash != dataset_fingerprint(dataset)
    return LoadedWorkspace(workspace=workspace, dataset_mismatch=mismatch)


def _csv_field(value: str) -> str:
    if any(ch in value for ch in ',"\r\n'):
        return '"' + value.replace('"', '""') + '"'
    return value


def export_groups_csv(ds: Dataset, reg: GroupRegistry) -> bytes:
    """One row per point with its owning group; ungrouped fields stay empty."""
    owner: dict[int, PointGroup] = {}
    for g in reg.groups:
        for pid in g.members:
            owner[pid] = g
    buf = io.StringIO()
    buf.write("point_id,x,y,z,group_id,group_name,annotation\r\n")
    for i in range(ds.n_points):
        x, y, z = (repr(float(v)) for v in ds.xyz[i])
        g = owner.get(i)
        if g is None:
            group_id = group_name = annotation = ""
        else:
            group_id = str(g.group_id)
            group_name = _csv_field(g.name)
            # annotations are always quoted so downstream parsers can rely on it
            annotation = '"' + (g.annotation or "").replace('"', '""') + '"' \
                if g.annotation else ""
        buf.write(f"{i},{x},{y},{z},{group_id},{group_name},{annotation}\r\n")
    return buf.getvalue().encode("utf-8")
