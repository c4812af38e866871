"""Approximate tree template counting by color coding."""

from .bench import ScalingReport, efficiency_series, emit_report, load_report, run_scaling
from .colorcount import (
    Coloring,
    Estimate,
    color_graph,
    dp_iteration,
    estimate,
    estimate_peak_memory,
)
from .colorsets import subset_rank, subset_unrank
from .estimators import ColorCodingCounter, TreeletCountTransformer
from .graph import Graph, degree_stats, load_edge_list, rmat_generate, save_edge_list
from .oracle import brute_force_colorful, brute_force_embeddings
from .partitioned import distributed_estimate, partition_vertices
from .template import (
    PartitionPlan,
    TemplateTree,
    count_automorphisms,
    parse_template,
    partition_template,
)

__version__ = "0.1.0"

__all__ = [
    "ColorCodingCounter",
    "Coloring",
    "Estimate",
    "Graph",
    "PartitionPlan",
    "ScalingReport",
    "TemplateTree",
    "TreeletCountTransformer",
    "brute_force_colorful",
    "brute_force_embeddings",
    "color_graph",
    "count_automorphisms",
    "degree_stats",
    "distributed_estimate",
    "dp_iteration",
    "efficiency_series",
    "emit_report",
    "estimate",
    "estimate_peak_memory",
    "load_edge_list",
    "load_report",
    "parse_template",
    "partition_template",
    "partition_vertices",
    "rmat_generate",
    "run_scaling",
    "save_edge_list",
    "subset_rank",
    "subset_unrank",
]
