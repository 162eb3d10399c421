"""Tilings from sequential iterated function systems, exactly."""

from .algebra import (
    GOLDEN_CONTRACTION,
    GOLDEN_MEAN,
    PlanePoint,
    QuarticScalar,
    Rational,
    SQRT3,
    SQRT5,
    SQRT15,
    fib,
    float_approx,
    sign,
)
from .geometry import (
    OverlapClass,
    Polygon,
    area,
    classify_overlap,
    point_in_polygon,
    transform_polygon,
    vertex_cloud,
)
from .paramexpr import ParseError, parse_param
from .processing import (
    BlowupPatch,
    ProcessedCollection,
    StabilizationError,
    blowup_tiling,
    check_conditions,
    limit_tile,
    overlap_operator,
    process,
    sigma_addresses,
    stabilized,
)
from .sifs import (
    Address,
    AddressedTile,
    IFSLevel,
    PlaneMap,
    SIFSFamily,
    apply_ifs,
    apply_map,
    attractor_cloud,
    coding_point,
    compose,
    family_distance,
    format_address,
    hausdorff,
    invert,
    parse_address,
    supertile,
    tile_transform,
    top_key,
)
from .systems import (
    DEFAULT_HAT_C,
    clusters,
    get_family,
    hat_family,
    hat_level,
    hat_limit,
    hat_prototile,
    hex_family,
    hex_level,
    hex_prototile,
    intersection_identities,
    p_closed,
    q_closed,
)

__version__ = "0.1.0"
