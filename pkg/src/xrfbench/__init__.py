"""Analysis engine for spatially resolved micro-XRF element-abundance maps.

Scientists group sample points into candidate mineral clusters by lasso
selection or machine clustering, then compare clusters through per-element
summary statistics. This package is the computational core plus an HTTP
facade; the interactive client lives in a separate frontend.
"""

from .cluster import (
    ClusterConfig,
    ClusterResult,
    PcaReduction,
    TsneReduction,
    hierarchical,
    kmeans,
    labels_to_groups,
    minmax_cluster,
    run_pipeline,
)
from .dataset import (
    Dataset,
    PointRecord,
    SchemaConfig,
    bounding_box,
    dataset_from_arrays,
    dataset_to_csv,
    feature_matrix,
    load_dataset,
)
from .dimreduce import (
    PcaModel,
    StandardizedMatrix,
    TsneConfig,
    pca_fit_transform,
    standardize,
    tsne_embed,
)
from .selection import (
    GroupRegistry,
    PointGroup,
    annotate_group,
    assign_selection,
    create_group,
    lasso_select,
    point_in_polygon,
    points_in_polygon,
    remove_from_group,
    set_locked,
)
from .stats import (
    DisplayScale,
    SortOrder,
    SummaryStats,
    display_value,
    group_stats,
    pcp_axes,
    sort_elements,
    summarize,
)
from .workspace import (
    Workspace,
    export_groups_csv,
    load_workspace,
    save_workspace,
    workspace_for,
)

__version__ = "0.1.0"
