"""Query-accuracy-driven trajectory database simplification."""

from ._core import (
    CenterDistribution,
    DqnConfig,
    DriverConfig,
    ErrorMeasure,
    F1Score,
    Point,
    RangeQuery,
    SimplifiedDatabase,
    SynthSpec,
    Trajectory,
    TrajectoryDatabase,
    WorkloadSpec,
    edr,
    f1,
    generate_workload,
    load_kept,
    load_trajectories,
    point_error,
    project_latlon,
    random_insertion_simplify,
    range_query,
    range_query_view,
    rl4qdts_simplify,
    run_baseline,
    save_kept,
    save_trajectories,
    segment_error,
    synth_database,
    train_policies,
    trajectory_error,
    workload_diff,
)

__all__ = [
    "CenterDistribution",
    "DqnConfig",
    "DriverConfig",
    "ErrorMeasure",
    "F1Score",
    "Point",
    "RangeQuery",
    "SimplifiedDatabase",
    "SynthSpec",
    "Trajectory",
    "TrajectoryDatabase",
    "WorkloadSpec",
    "edr",
    "f1",
    "generate_workload",
    "load_kept",
    "load_trajectories",
    "point_error",
    "project_latlon",
    "random_insertion_simplify",
    "range_query",
    "range_query_view",
    "rl4qdts_simplify",
    "run_baseline",
    "save_kept",
    "save_trajectories",
    "segment_error",
    "synth_database",
    "train_policies",
    "trajectory_error",
    "workload_diff",
]
