"""Find somewhere dry to sleep: filter and rank valley lodging.

Lodging and shelters sitting in flooded cells are filtered out first.
The survivors are snapped to the road graph and ranked by passable route
length from the origin; places the network cannot reach sort last.
"""

import tempfile
from pathlib import Path

from floodroute import (
    filter_lodging,
    load_scenario,
    prepare_overlay,
    rank_lodging,
)
from floodroute.valley import WEST_JUNCTION, write_valley_scenario


def main():
    with tempfile.TemporaryDirectory() as tmp:
        manifest = write_valley_scenario(Path(tmp) / "valley")
        scenario = load_scenario(manifest)
    overlay = prepare_overlay(scenario)

    print(f"scenario POIs: {[poi.id for poi in scenario.pois]}")

    dry = filter_lodging(list(scenario.pois), scenario.fused_mask)
    dropped = {poi.id for poi in scenario.pois} - {poi.id for poi in dry}
    print(f"flooded or not lodging, dropped: {sorted(dropped)}")

    ranked = rank_lodging(
        dry, scenario.graph, overlay, WEST_JUNCTION, scenario.params.snap_radius_m
    )
    print(f"\nranked from {WEST_JUNCTION}:")
    for option in ranked:
        record = option.record()
        if record["reachable"]:
            km = record["route_length_m"] / 1000.0
            print(f"  {record['id']:>18} ({record['kind']:>7}) "
                  f"{km:6.1f} km via {record['snap_node']}")
        else:
            print(f"  {record['id']:>18} ({record['kind']:>7})   unreachable")


if __name__ == "__main__":
    main()
