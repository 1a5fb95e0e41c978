"""Flood-aware evacuation routing.

Turns elevation data and pixel-level flood masks into blocked-edge road
graphs, computes shortest evacuation routes with backup alternatives, and
ranks flood-safe lodging.
"""

from .errors import (
    FloodRouteError,
    GeometryMismatch,
    GridParseError,
    RoadNetError,
    ScenarioError,
)
from .imagery import (
    BUILDING_OR_ROAD,
    CANONICAL_CLASSES,
    ClassGrid,
    ColorRule,
    RgbImage,
    align_mask,
    class_to_flood_mask,
    classify_by_color,
    ingest_class_grid,
    load_color_rules,
    load_legend,
    read_image,
    save_class_grid,
    save_legend,
    write_image,
)
from .inundation import (
    DEFAULT_SEED_FRACTION,
    FloodMask,
    SeedSet,
    connected_inundation,
    default_seeds,
    feet_to_meters,
    flooded_fraction,
    fuse_masks,
    threshold_inundation,
)
from .lodging import LodgingOption, filter_lodging, lodging_to_json, rank_lodging
from .raster import (
    CellIndex,
    GridGeometry,
    RasterGrid,
    cell_to_world,
    load_ascii_grid,
    resample_nearest,
    save_ascii_grid,
    world_to_cell,
)
from .roadnet import (
    DEFAULT_SNAP_RADIUS_M,
    EARTH_RADIUS_M,
    Edge,
    GraphReport,
    HazardOverlay,
    Poi,
    RoadGraph,
    apply_flood_overlay,
    edge_cells,
    edge_length,
    haversine_m,
    load_pois,
    load_roadnet,
    nearest_node,
    validate_graph,
)
from .routing import (
    Route,
    RouteRequest,
    backup_route,
    route_from_geojson,
    route_to_geojson,
    shortest_route,
)
from .scenario import (
    Manifest,
    NamedMask,
    Scenario,
    ScenarioParams,
    SegmentationSource,
    fused_mask_at,
    load_scenario,
    parse_manifest,
    prepare_overlay,
    save_manifest,
)
from .service import ServiceState, make_server

__version__ = "0.1.0"
