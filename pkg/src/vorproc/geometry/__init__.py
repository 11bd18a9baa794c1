from .domain import CIRCLE, SQUARE, TORUS, Domain, as_domain
from .tessellation import (
    Cell,
    CircleTessellation,
    Configuration,
    DegenerateConfigurationError,
    GeometryError,
    MIN_SEPARATION,
    PlanarTessellation,
    ProximityError,
    Tessellation,
    UnsupportedDomainError,
    build_tessellation,
    circle_cells,
    nn_depth,
    replace_point,
)
from .validate import ValidationReport, edge_count, validate
from .io import read_points, write_points
