"""Scenario bundling: one manifest ties together the DEM, optional
segmentation grids, the road network, and the model parameters.

Loading produces an immutable Scenario whose masks are all aligned to the
DEM geometry. The model-derived mask is always computed and fused, even
when segmentation masks exist; the two are complementary evidence, not
alternatives. Water level may be given in feet or meters but never both:
ambiguity is rejected, not resolved silently.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import FloodRouteError, ScenarioError
from .imagery import align_mask, class_to_flood_mask, ingest_class_grid, load_legend
from .inundation import (
    DEFAULT_SEED_FRACTION,
    FloodMask,
    connected_inundation,
    default_seeds,
    feet_to_meters,
    fuse_masks,
)
from .raster import RasterGrid, load_ascii_grid
from .roadnet import (
    DEFAULT_SNAP_RADIUS_M,
    HazardOverlay,
    Poi,
    RoadGraph,
    apply_flood_overlay,
    load_pois,
    load_roadnet,
)

__all__ = [
    "ScenarioParams",
    "SegmentationSource",
    "Manifest",
    "NamedMask",
    "Scenario",
    "parse_manifest",
    "save_manifest",
    "load_scenario",
    "prepare_overlay",
    "fused_mask_at",
]


@dataclass(frozen=True)
class ScenarioParams:
    """Model parameters, normalized to SI at parse time."""

    water_level_m: float
    seed_fraction: float = DEFAULT_SEED_FRACTION
    snap_radius_m: float = DEFAULT_SNAP_RADIUS_M

    def __post_init__(self):
        if not math.isfinite(self.water_level_m):
            raise ScenarioError(f"params: water_level_m must be finite, got {self.water_level_m}")
        if not 0.0 < self.seed_fraction <= 1.0:
            raise ScenarioError(
                f"params: seed_fraction must be in (0, 1], got {self.seed_fraction}"
            )
        if not self.snap_radius_m > 0:
            raise ScenarioError(
                f"params: snap_radius_m must be positive, got {self.snap_radius_m}"
            )


@dataclass(frozen=True)
class SegmentationSource:
    """One segmentation layer: a class grid, its legend, and the class name
    to treat as water."""

    path: str
    legend_path: str
    water_class: str


@dataclass(frozen=True)
class Manifest:
    """Parsed manifest; paths stay relative so a round trip is verbatim."""

    name: str
    dem_path: str
    roadnet_path: str
    class_grids: tuple[SegmentationSource, ...]
    params: ScenarioParams


@dataclass(frozen=True)
class NamedMask:
    """A flood mask with its provenance: dem_model, segmentation, or fused."""

    name: str
    source: str
    mask: FloodMask


@dataclass(frozen=True)
class Scenario:
    name: str
    dem: RasterGrid
    masks: tuple[NamedMask, ...]
    graph: RoadGraph
    pois: tuple[Poi, ...]
    params: ScenarioParams

    def mask_by_source(self, source: str) -> FloodMask:
        for named in self.masks:
            if named.source == source:
                return named.mask
        raise KeyError(f"no mask with source {source!r}")

    @property
    def fused_mask(self) -> FloodMask:
        return self.mask_by_source("fused")

    @property
    def dem_model_mask(self) -> FloodMask:
        return self.mask_by_source("dem_model")

    def segmentation_masks(self) -> list[FloodMask]:
        return [named.mask for named in self.masks if named.source == "segmentation"]


# --- manifest ---------------------------------------------------------------


def parse_manifest(data: bytes | str) -> Manifest:
    """Parse and validate the manifest JSON (paths are not resolved here)."""
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"manifest: not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ScenarioError("manifest: must be a JSON object")

    for key in ("name", "dem_path", "roadnet_path", "params"):
        if key not in doc:
            raise ScenarioError(f"manifest: missing required key {key!r}")
    raw_params = doc["params"]
    if not isinstance(raw_params, dict):
        raise ScenarioError("manifest: params must be a JSON object")

    has_ft = "water_level_ft" in raw_params
    has_m = "water_level_m" in raw_params
    if has_ft and has_m:
        raise ScenarioError(
            "manifest: params must set exactly one of water_level_ft or "
            "water_level_m, got both"
        )
    if not has_ft and not has_m:
        raise ScenarioError(
            "manifest: params must set exactly one of water_level_ft or "
            "water_level_m, got neither"
        )
    level_m = (
        feet_to_meters(float(raw_params["water_level_ft"]))
        if has_ft
        else float(raw_params["water_level_m"])
    )
    params = ScenarioParams(
        water_level_m=level_m,
        seed_fraction=float(raw_params.get("seed_fraction", DEFAULT_SEED_FRACTION)),
        snap_radius_m=float(raw_params.get("snap_radius_m", DEFAULT_SNAP_RADIUS_M)),
    )

    sources = []
    for entry in doc.get("class_grid_paths", []):
        if not isinstance(entry, dict):
            raise ScenarioError("manifest: class_grid_paths entries must be objects")
        for key in ("path", "legend_path", "water_class"):
            if key not in entry:
                raise ScenarioError(
                    f"manifest: class_grid_paths entry missing key {key!r}"
                )
        sources.append(
            SegmentationSource(
                path=str(entry["path"]),
                legend_path=str(entry["legend_path"]),
                water_class=str(entry["water_class"]),
            )
        )

    return Manifest(
        name=str(doc["name"]),
        dem_path=str(doc["dem_path"]),
        roadnet_path=str(doc["roadnet_path"]),
        class_grids=tuple(sources),
        params=params,
    )


def save_manifest(manifest: Manifest) -> str:
    """Canonical manifest serialization; the water level is always emitted
    in meters, so a parse/save cycle is a fixed point."""
    doc = {
        "name": manifest.name,
        "dem_path": manifest.dem_path,
        "roadnet_path": manifest.roadnet_path,
        "class_grid_paths": [
            {
                "path": source.path,
                "legend_path": source.legend_path,
                "water_class": source.water_class,
            }
            for source in manifest.class_grids
        ],
        "params": {
            "water_level_m": manifest.params.water_level_m,
            "seed_fraction": manifest.params.seed_fraction,
            "snap_radius_m": manifest.params.snap_radius_m,
        },
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


# --- loading ----------------------------------------------------------------


def _read_component(path: Path, component: str) -> bytes:
    try:
        return path.read_bytes()
    except FileNotFoundError:
        raise ScenarioError(f"{component}: file not found: {path}") from None
    except OSError as exc:
        raise ScenarioError(f"{component}: cannot read {path}: {exc}") from None


def _compute_dem_mask(dem: RasterGrid, params: ScenarioParams) -> FloodMask:
    seeds = default_seeds(dem, params.seed_fraction)
    return connected_inundation(dem, params.water_level_m, seeds)


def load_scenario(manifest_path: str | Path) -> Scenario:
    """Load every component a manifest names, relative to the manifest file.

    Masks are aligned to the DEM geometry, and the fused mask is the union
    of the DEM-model mask with all segmentation masks. Errors name the
    failing component.
    """
    manifest_path = Path(manifest_path)
    manifest = parse_manifest(_read_component(manifest_path, "manifest"))
    return load_scenario_from(manifest, manifest_path.parent)


def load_scenario_from(manifest: Manifest, base_dir: str | Path) -> Scenario:
    base_dir = Path(base_dir)
    params = manifest.params

    dem_path = base_dir / manifest.dem_path
    try:
        dem = load_ascii_grid(_read_component(dem_path, "dem"))
    except FloodRouteError as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(f"dem: {dem_path}: {exc}") from None

    roadnet_path = base_dir / manifest.roadnet_path
    roadnet_bytes = _read_component(roadnet_path, "roadnet")
    try:
        graph = load_roadnet(roadnet_bytes)
        pois = load_pois(roadnet_bytes)
    except FloodRouteError as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(f"roadnet: {roadnet_path}: {exc}") from None

    try:
        dem_mask = _compute_dem_mask(dem, params)
    except (FloodRouteError, ValueError) as exc:
        raise ScenarioError(f"dem_model: {exc}") from None

    masks = [NamedMask(name="dem_model", source="dem_model", mask=dem_mask)]
    for index, source in enumerate(manifest.class_grids):
        component = f"segmentation[{index}]"
        grid_path = base_dir / source.path
        legend_path = base_dir / source.legend_path
        try:
            legend = load_legend(_read_component(legend_path, component))
            class_grid = ingest_class_grid(_read_component(grid_path, component), legend)
            raw_mask = class_to_flood_mask(class_grid, source.water_class)
            aligned = align_mask(raw_mask, dem.geometry)
        except FloodRouteError as exc:
            if isinstance(exc, ScenarioError):
                raise
            raise ScenarioError(f"{component}: {grid_path}: {exc}") from None
        masks.append(
            NamedMask(name=f"segmentation:{source.path}", source="segmentation", mask=aligned)
        )

    fused = masks[0].mask
    for named in masks[1:]:
        fused = fuse_masks(fused, named.mask)
    masks.append(NamedMask(name="fused", source="fused", mask=fused))

    return Scenario(
        name=manifest.name,
        dem=dem,
        masks=tuple(masks),
        graph=graph,
        pois=tuple(pois),
        params=params,
    )


def prepare_overlay(scenario: Scenario) -> HazardOverlay:
    """Hazard overlay over the fused mask; pure and repeatable."""
    return apply_flood_overlay(scenario.graph, scenario.fused_mask)


def fused_mask_at(scenario: Scenario, water_level_m: float) -> FloodMask:
    """Fused mask with the DEM-model component recomputed at another level.

    Does not mutate the scenario; segmentation masks are reused as-is.
    """
    params = ScenarioParams(
        water_level_m=water_level_m,
        seed_fraction=scenario.params.seed_fraction,
        snap_radius_m=scenario.params.snap_radius_m,
    )
    fused = _compute_dem_mask(scenario.dem, params)
    for mask in scenario.segmentation_masks():
        fused = fuse_masks(fused, mask)
    return fused
