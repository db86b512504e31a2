"""Monte Carlo drivers and estimators."""
from .cluster_law import ClusterLawEstimate, TailAnalysis, choose_beta, estimate_cluster_law, hubs, theta_scan
from .runs import (BoundaryRecord, BoxRecord, PalmRecord, add_graph_observer, box_replicate,
                   boundary_replicate, palm_replicate, remove_graph_observer, sample_graph)
from .scaling import KINDS, ExperimentResult, Row, run_scaling_experiment
from .stats import ScalingFit, fit_line, mean_interval, median_interval, std_interval, wilson_interval

__all__ = [
    "ClusterLawEstimate", "TailAnalysis", "choose_beta", "estimate_cluster_law", "hubs", "theta_scan",
    "BoundaryRecord", "BoxRecord", "PalmRecord", "add_graph_observer", "box_replicate", "boundary_replicate",
    "palm_replicate", "remove_graph_observer", "sample_graph",
    "KINDS", "ExperimentResult", "Row", "run_scaling_experiment",
    "ScalingFit", "fit_line", "mean_interval", "median_interval", "std_interval", "wilson_interval",
]
