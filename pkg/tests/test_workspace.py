import csv
import io
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xrfbench.cluster import ClusterConfig, PcaReduction
from xrfbench.dataset import dataset_from_arrays
from xrfbench.errors import MalformedWorkspace, SinkFailure, UnsupportedVersion
from xrfbench.selection import GroupRegistry, PointGroup, annotate_group, assign_selection, create_group, set_locked
from xrfbench.workspace import (
    dataset_fingerprint,
    export_groups_csv,
    load_workspace,
    save_workspace,
    workspace_for,
)


def make_ds(n=6, source_id="ds"):
    xyz = np.column_stack([np.arange(float(n)), np.zeros(n)])
    features = np.tile(np.arange(float(n))[:, None], (1, 2)) + 1
    return dataset_from_arrays(xyz, features, ["Fe", "Si"], source_id=source_id)


def make_registry():
    reg, a = create_group(GroupRegistry(), "rim")
    reg, _ = assign_selection(reg, a, {0, 2})
    reg = annotate_group(reg, a, "high Fe")
    reg, b = create_group(reg, "core")
    reg, _ = assign_selection(reg, b, {1})
    reg = set_locked(reg, b, True)
    return reg


def test_save_empty_workspace_parses():
    ds = make_ds()
    w = workspace_for(ds, GroupRegistry())
    payload = json.loads(save_workspace(w))
    assert payload["format_version"] == 1
    assert payload["registry"]["groups"] == []
    assert payload["dataset_ref"]["source_id"] == "ds"


def test_save_twice_byte_identical():
    w = workspace_for(make_ds(), make_registry())
    assert save_workspace(w) == save_workspace(w)


def test_save_groups_sorted_members_ascending():
    w = workspace_for(make_ds(), make_registry())
    payload = json.loads(save_workspace(w))
    assert [g["group_id"] for g in payload["registry"]["groups"]] == [0, 1]
    assert payload["registry"]["groups"][0]["members"] == [0, 2]


def test_save_to_sink_failure():
    class Broken:
        def write(self, _):
            raise OSError("disk full")

    with pytest.raises(SinkFailure):
        save_workspace(workspace_for(make_ds(), GroupRegistry()), Broken())


def test_load_save_roundtrip_identity():
    ds = make_ds()
    cfg = ClusterConfig(algorithm="kmeans", n_clusters=3, reduction=PcaReduction(0.9), seed=2)
    w = workspace_for(ds, make_registry(), last_cluster_config=cfg)
    loaded = load_workspace(save_workspace(w), dataset=ds)
    assert loaded.workspace == w
    assert not loaded.dataset_mismatch


def test_load_rejects_unknown_version():
    w = workspace_for(make_ds(), GroupRegistry())
    payload = json.loads(save_workspace(w))
    payload["format_version"] = 99
    with pytest.raises(UnsupportedVersion):
        load_workspace(json.dumps(payload))


def test_load_rejects_member_outside_dataset():
    ds = make_ds(n=3)
    reg, a = create_group(GroupRegistry(), "g")
    reg, _ = assign_selection(reg, a, {0, 7})
    data = save_workspace(workspace_for(ds, reg))
    with pytest.raises(MalformedWorkspace):
        load_workspace(data, dataset=ds)
    # without a dataset bound, ids cannot be bounds-checked
    assert load_workspace(data).workspace.registry.group(a).members == {0, 7}


def test_load_flags_dataset_mismatch():
    ds = make_ds()
    other = make_ds(source_id="other")
    data = save_workspace(workspace_for(ds, GroupRegistry()))
    assert load_workspace(data, dataset=other).dataset_mismatch
    assert not load_workspace(data, dataset=ds).dataset_mismatch


def test_load_rejects_garbage():
    with pytest.raises(MalformedWorkspace):
        load_workspace(b"{not json")
    with pytest.raises(MalformedWorkspace):
        load_workspace(b'["list"]')
    with pytest.raises(MalformedWorkspace):
        load_workspace(b'{"format_version": 1}')


def test_load_rejects_overlapping_groups():
    w = workspace_for(make_ds(), GroupRegistry())
    payload = json.loads(save_workspace(w))
    payload["registry"]["groups"] = [
        {"group_id": 0, "name": "a", "color": "#111111", "locked": False,
         "annotation": None, "members": [1, 2]},
        {"group_id": 1, "name": "b", "color": "#222222", "locked": False,
         "annotation": None, "members": [2, 3]},
    ]
    with pytest.raises(MalformedWorkspace):
        load_workspace(json.dumps(payload))


def test_fingerprint_sensitive_to_content():
    a = make_ds()
    b = make_ds()
    assert dataset_fingerprint(a) == dataset_fingerprint(b)
    features = b.features.copy()
    features[0, 0] += 1
    c = dataset_from_arrays(b.xyz.copy(), features, b.element_names, source_id=b.source_id)
    assert dataset_fingerprint(a) != dataset_fingerprint(c)


registry_strategy = st.builds(
    lambda sizes, locks, notes: _build_registry(sizes, locks, notes),
    st.lists(st.sets(st.integers(0, 49), max_size=6), max_size=8),
    st.lists(st.booleans(), min_size=8, max_size=8),
    st.lists(st.text(max_size=12), min_size=8, max_size=8),
)


def _build_registry(member_sets, locks, notes):
    reg = GroupRegistry()
    taken: set[int] = set()
    for i, members in enumerate(member_sets):
        reg, gid = create_group(reg, f"group {i}")
        free = frozenset(members) - taken
        taken |= free
        if free:
            reg, _ = assign_selection(reg, gid, free)
        if notes[i]:
            reg = annotate_group(reg, gid, notes[i])
        if locks[i]:
            reg = set_locked(reg, gid, True)
    return reg


@settings(max_examples=100, deadline=None)
@given(reg=registry_strategy)
def test_roundtrip_random_registries(reg):
    ds = make_ds(n=50)
    w = workspace_for(ds, reg)
    loaded = load_workspace(save_workspace(w), dataset=ds)
    assert loaded.workspace == w


def test_export_basic_row():
    ds = make_ds(n=2)
    reg, a = create_group(GroupRegistry(), "rim")
    reg, _ = assign_selection(reg, a, {0})
    reg = annotate_group(reg, a, "high Fe")
    lines = export_groups_csv(ds, reg).decode().split("\r\n")
    assert lines[0] == "point_id,x,y,z,group_id,group_name,annotation"
    assert lines[1] == '0,0.0,0.0,0.0,0,rim,"high Fe"'
    assert lines[2] == "1,1.0,0.0,0.0,,,"


def test_export_empty_registry_counts_rows():
    ds = make_ds(n=5)
    body = export_groups_csv(ds, GroupRegistry()).decode()
    rows = [r for r in body.split("\r\n") if r][1:]
    assert len(rows) == 5
    assert all(r.endswith(",,,") for r in rows)


def test_export_quotes_awkward_names():
    ds = make_ds(n=1)
    reg, a = create_group(GroupRegistry(), 'say "hi", ok')
    reg, _ = assign_selection(reg, a, {0})
    body = export_groups_csv(ds, reg).decode()
    parsed = list(csv.reader(io.StringIO(body)))
    assert parsed[1][5] == 'say "hi", ok'


def test_export_reimport_reconstructs_partition():
    ds = make_ds(n=12)
    reg, a = create_group(GroupRegistry(), "a")
    reg, _ = assign_selection(reg, a, {0, 3, 5})
    reg, b = create_group(reg, "b")
    reg, _ = assign_selection(reg, b, {1, 2})
    body = export_groups_csv(ds, reg).decode()
    rebuilt: dict[str, set[int]] = {}
    for row in list(csv.reader(io.StringIO(body)))[1:]:
        if row[4]:
            rebuilt.setdefault(row[4], set()).add(int(row[0]))
    expected = {str(g.group_id): set(g.members) for g in reg.groups if g.members}
    assert rebuilt == expected
