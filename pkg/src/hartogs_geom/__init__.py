"""Numerical Kaehler geometry of Cartan domains and Cartan-Hartogs fibrations."""

from .domains import (
    DomainSpec,
    LinearEmbedding,
    polydisk_embedding,
    product_embedding,
    subtriple_closure,
    triple_product,
)
from .hartogs import (
    DomainPotential,
    HartogsChart,
    HartogsPotential,
    HartogsSpec,
    h_contains,
    h_sample,
    lift_automorphism_polydisk,
    lift_embedding,
    potential,
    slice_chart,
    transported_chart,
)
from .jets import Jet, JetSpace, jet_eval, jet_space, wirtinger
from .l2embed import (
    GeodesicClass,
    LinearGeodesicVerdict,
    Truncation,
    embed,
    line_constraints,
    line_deviation,
    norm_residual,
    series_residual,
)
from .metric import (
    Christoffel,
    FunctionPotential,
    GeodesicTrace,
    MetricData,
    christoffel_at,
    distance_to_span,
    geodesic_ivp,
    hermitian_inner,
    metric_at,
    sectional_curvature,
    tg_residual,
)
from .numerics import DomainViolation, det, gen_binomial, is_positive_definite

__all__ = [
    "DomainSpec",
    "LinearEmbedding",
    "polydisk_embedding",
    "product_embedding",
    "subtriple_closure",
    "triple_product",
    "DomainPotential",
    "HartogsChart",
    "HartogsPotential",
    "HartogsSpec",
    "h_contains",
    "h_sample",
    "lift_automorphism_polydisk",
    "lift_embedding",
    "potential",
    "slice_chart",
    "transported_chart",
    "Jet",
    "JetSpace",
    "jet_eval",
    "jet_space",
    "wirtinger",
    "GeodesicClass",
    "LinearGeodesicVerdict",
    "Truncation",
    "embed",
    "line_constraints",
    "line_deviation",
    "norm_residual",
    "series_residual",
    "Christoffel",
    "FunctionPotential",
    "GeodesicTrace",
    "MetricData",
    "christoffel_at",
    "distance_to_span",
    "geodesic_ivp",
    "hermitian_inner",
    "metric_at",
    "sectional_curvature",
    "tg_residual",
    "DomainViolation",
    "det",
    "gen_binomial",
    "is_positive_definite",
]

__version__ = "0.1.0"
