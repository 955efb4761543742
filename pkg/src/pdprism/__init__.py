"""Exact distances between persistence diagrams and k-prism constructions on diagram space."""
from .diagram import (
    CONVENTIONS,
    Diagram,
    GroundMetric,
    GroundPoint,
    InvalidDiagramError,
    LabeledPoint,
    diagonal_distance,
    labeled,
    rho,
    validate,
)
from .matching import (
    DistanceResult,
    InvalidMatchingError,
    PartialMatching,
    SizeError,
    bottleneck,
    bottleneck_bruteforce,
    bottleneck_cost,
    compose,
    matching_cost,
    wasserstein,
    wasserstein_bruteforce,
    wasserstein_q,
)
from .obstruction import (
    EmbeddingReport,
    FiniteMetricSpace,
    ck_truncation,
    cube_embedding,
    cube_vertices,
    embed_ck,
    geodesic_sequence,
    verify_isometry,
)
from .prisms import PrismReport, PrismWitness, build_prism, prism_map, select_prism_point, verify_prism

__version__ = "0.1.0"
