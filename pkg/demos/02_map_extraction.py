"""Extract land-cover classes from a synthetic RGB map tile.

Printed map tiles encode features by color: near-white (241,241,241)
pixels are buildings or roads, blue pixels are water. Classifying by
color rules produces a class grid; naming a water class turns it into a
flood mask that can be fused with the elevation model's mask.
"""

import numpy as np

from floodroute import (
    ClassGrid,
    ColorRule,
    FloodMask,
    GridGeometry,
    RgbImage,
    class_to_flood_mask,
    classify_by_color,
    fuse_masks,
)

WATER_BLUE = (170, 211, 223)
BUILDING_GRAY = (241, 241, 241)
FIELD_GREEN = (200, 250, 204)


def synthetic_tile() -> RgbImage:
    geometry = GridGeometry(cols=12, rows=8, x_origin=-79.06, y_origin=34.60, cell_size=0.001)
    pixels = np.empty((8, 12, 3), dtype=np.uint8)
    pixels[...] = FIELD_GREEN
    pixels[3:5, :] = WATER_BLUE
    for row, col in ((0, 2), (1, 2), (6, 7), (7, 7), (6, 10)):
        pixels[row, col] = BUILDING_GRAY
    return RgbImage(width=12, height=8, pixels=pixels, geometry=geometry)


def main():
    tile = synthetic_tile()
    rules = [
        ColorRule(class_name="building_or_road", r=241, g=241, b=241, tolerance=0),
        ColorRule(class_name="water", r=170, g=211, b=223, tolerance=10),
    ]
    grid: ClassGrid = classify_by_color(tile, rules)

    print("class counts:")
    for code, name in sorted(grid.legend.items()):
        count = int((grid.classes == code).sum())
        if count:
            print(f"  {name:>16}: {count}")

    water = class_to_flood_mask(grid, water_class="water")
    print(f"\nwater mask floods {int(water.flooded.sum())} of "
          f"{water.flooded.size} cells")

    # Fuse with an elevation-model mask covering a different corner.
    lowland = np.zeros((8, 12), dtype=bool)
    lowland[0:2, 0:4] = True
    fused = fuse_masks(FloodMask(geometry=tile.geometry, flooded=lowland), water)
    print(f"fused with a 8-cell DEM mask: {int(fused.flooded.sum())} flooded cells "
          "(evidence from either source counts)")


if __name__ == "__main__":
    main()
