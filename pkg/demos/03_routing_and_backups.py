"""Route across the valley, then watch the river take the low road.

At the 13 ft flood stage the shorter low road is dry and carries the
primary route. When the river crests at 20 ft the low road floods; the
hazard overlay flips it to blocked and the backup route climbs over the
ridge parkway instead.
"""

import tempfile
from pathlib import Path

from floodroute import (
    RouteRequest,
    apply_flood_overlay,
    backup_route,
    feet_to_meters,
    fused_mask_at,
    load_scenario,
    prepare_overlay,
    shortest_route,
)
from floodroute.valley import (
    CREST_FT,
    EAST_JUNCTION,
    FLOOD_STAGE_FT,
    WEST_JUNCTION,
    write_valley_scenario,
)


def describe(route, label):
    km = route.total_length_m / 1000.0
    print(f"  {label}: {' -> '.join(route.node_ids)}")
    print(f"    edges {list(route.edge_ids)}, {km:.1f} km")


def main():
    with tempfile.TemporaryDirectory() as tmp:
        manifest = write_valley_scenario(Path(tmp) / "valley")
        scenario = load_scenario(manifest)

    request = RouteRequest(WEST_JUNCTION, EAST_JUNCTION)

    overlay_stage = prepare_overlay(scenario)
    primary = shortest_route(scenario.graph, overlay_stage, request)
    print(f"at the {FLOOD_STAGE_FT:.0f} ft flood stage "
          f"({len(overlay_stage.blocked_ids())} edges blocked):")
    describe(primary, "primary")

    mask_crest = fused_mask_at(scenario, feet_to_meters(CREST_FT))
    overlay_crest = apply_flood_overlay(scenario.graph, mask_crest)
    flipped = set(overlay_crest.blocked_ids()) - set(overlay_stage.blocked_ids())
    print(f"\nat the {CREST_FT:.0f} ft crest the river blocks {sorted(flipped)}")

    backup = backup_route(scenario.graph, overlay_crest, primary, frozenset(flipped))
    describe(backup, "backup")
    extra = backup.total_length_m - primary.total_length_m
    print(f"    detour costs an extra {extra / 1000.0:.1f} km over the ridge")


if __name__ == "__main__":
    main()
