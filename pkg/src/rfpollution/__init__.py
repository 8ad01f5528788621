"""Radio-frequency pollution of cellular deployments.

Closed-form RFP models under MSP/ELP/SPS power policies, deployment-pair
ratios, and an exact pixel-grid simulator used to check them.
"""

from rfpollution.closed_form import (
    ComparisonSpec,
    Deployment,
    cell_ratio,
    cell_rfp,
    emitted_power,
    fixed_ratio,
    fixed_rfp,
    neighbor_rfp_ub,
    table_expression,
    total_cell_rfp,
    total_fixed_rfp,
)
from rfpollution.exceptions import (
    ConfigurationError,
    EmptyAggregateError,
    GridTooLargeError,
)
from rfpollution.geometry import LayoutSpec, SitePosition, hex_neighbors, in_coverage, inter_site_distance
from rfpollution.power import ElpConfig, MspConfig, SpsConfig
from rfpollution.propagation import PropagationParams, path_gain, received_power

__version__ = "0.1.0"

__all__ = [
    "ComparisonSpec",
    "ConfigurationError",
    "Deployment",
    "ElpConfig",
    "EmptyAggregateError",
    "GridTooLargeError",
    "LayoutSpec",
    "MspConfig",
    "PropagationParams",
    "SitePosition",
    "SpsConfig",
    "cell_ratio",
    "cell_rfp",
    "emitted_power",
    "fixed_ratio",
    "fixed_rfp",
    "hex_neighbors",
    "in_coverage",
    "inter_site_distance",
    "neighbor_rfp_ub",
    "path_gain",
    "received_power",
    "table_expression",
    "total_cell_rfp",
    "total_fixed_rfp",
]
