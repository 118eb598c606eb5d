#!/usr/bin/env python3
"""Regenerate the bundled data files (catalogs and seed scenes).

The layouts are parametric retail floor plans: perimeter rails hold hanging
garments, center tables hold small goods, freestanding panels and table slabs
provide occlusion. Output is deterministic; a test pins the bundled bytes.
"""

import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from shoptalk.canonical import write_json  # noqa: E402
from shoptalk.synth import bundled_catalog_doc  # noqa: E402

DATA = Path(__file__).resolve().parents[1] / "src" / "shoptalk" / "data"

YAW_ALONG_X = 0.0
YAW_ALONG_Z = math.pi / 2

# Hang heights per garment group keep tall items off the floor and short ones
# reachable; values chosen so no rail pair can interpenetrate vertically.
RAIL_Y = {
    "tops": 1.05,
    "light_tops": 1.05,
    "outerwear": 1.15,
    "dresses": 1.15,
    "bottoms": 1.00,
}


def frange(start, stop, step):
    out, v = [], start
    while v <= stop + 1e-9:
        out.append(round(v, 3))
        v += step
    return out


class SceneBuilder:
    def __init__(self, scene_id, domain, width, depth):
        self.doc = {
            "schema_version": 1,
            "scene_id": scene_id,
            "domain": domain,
            "floor_bounds": {"min": [0.0, 0.0], "max": [float(width), float(depth)]},
            "slots": [],
            "fixtures": [],
        }
        self.width, self.depth = width, depth
        self._n = 0

    def slot(self, x, y, z, group, yaw):
        self._n += 1
        self.doc["slots"].append({
            "slot_id": f"s{self._n:02d}_{group}",
            "position": [round(x, 3), round(y, 3), round(z, 3)],
            "yaw": round(yaw, 6),
            "allowed_group": group,
        })

    def fixture(self, name, min_pt, max_pt):
        self.doc["fixtures"].append({
            "name": name,
            "box": {"min": [round(v, 3) for v in min_pt], "max": [round(v, 3) for v in max_pt]},
        })

    def wall_rail(self, wall, start, stop, groups, spacing=0.7):
        """Two-tier rail of hanging slots along one wall; groups cycle per position.

        Tall garments (outerwear, dresses, bottoms) take the low tier with a
        short top above; short garments stack two tiers. Tier heights keep the
        stacked boxes clear of each other.
        """
        inset = 0.30
        uppers = ("light_tops", "tops")
        for i, t in enumerate(frange(start, stop, spacing)):
            group = groups[i % len(groups)]
            if group in ("tops", "light_tops"):
                tiers = ((group, 0.15), (group, 1.15))
            elif group == "bottoms":
                tiers = ((group, 0.10), (uppers[i % 2], 1.35))
            else:  # outerwear, dresses
                tiers = ((group, 0.15), (uppers[i % 2], 1.45))
            for tier_group, y in tiers:
                if wall == "w":
                    self.slot(inset, y, t, tier_group, YAW_ALONG_Z)
                elif wall == "e":
                    self.slot(self.width - inset, y, t, tier_group, YAW_ALONG_Z)
                elif wall == "s":
                    self.slot(t, y, inset, tier_group, YAW_ALONG_X)
                elif wall == "n":
                    self.slot(t, y, self.depth - inset, tier_group, YAW_ALONG_X)

    def gondola(self, z, start, stop, groups, spacing=0.8, offset=0.24):
        """Free-standing double-sided rail row across the floor at depth ``z``."""
        for i, x in enumerate(frange(start, stop, spacing)):
            group = groups[i % len(groups)]
            self.slot(x, RAIL_Y[group], z - offset, group, YAW_ALONG_X)
            group2 = groups[(i + 1) % len(groups)]
            self.slot(x, RAIL_Y[group2], z + offset, group2, YAW_ALONG_X)

    def table(self, cx, cz, w, d, groups, nx=3, nz=2):
        """Display table: slab fixture plus a grid of tabletop slots."""
        self.fixture(f"table_{round(cx)}_{round(cz)}",
                     (cx - w / 2, 0.0, cz - d / 2), (cx + w / 2, 0.76, cz + d / 2))
        xs = [cx - w / 2 + (i + 0.5) * w / nx for i in range(nx)]
        zs = [cz - d / 2 + (j + 0.5) * d / nz for j in range(nz)]
        k = 0
        for z in zs:
            for x in xs:
                self.slot(x, 0.78, z, groups[k % len(groups)], YAW_ALONG_X)
                k += 1

    def panel(self, cx, cz, length, along="x", height=2.1, thick=0.08):
        if along == "x":
            self.fixture(f"panel_{round(cx)}_{round(cz)}",
                         (cx - length / 2, 0.0, cz - thick / 2),
                         (cx + length / 2, height, cz + thick / 2))
        else:
            self.fixture(f"panel_{round(cx)}_{round(cz)}",
                         (cx - thick / 2, 0.0, cz - length / 2),
                         (cx + thick / 2, height, cz + length / 2))


def fashion_scene(scene_id, width, depth, table_spots, panel_spots, rail_plan, gondola_rows):
    b = SceneBuilder(scene_id, "fashion", width, depth)
    for wall, start, stop, groups in rail_plan:
        b.wall_rail(wall, start, stop, groups)
    for z, start, stop, groups in gondola_rows:
        b.gondola(z, start, stop, groups)
    for cx, cz in table_spots:
        b.table(cx, cz, 1.8, 1.0, ["footwear", "headwear"])
    for cx, cz, along in panel_spots:
        b.panel(cx, cz, 2.4, along)
    return b.doc


def build_fashion_scenes():
    tops = ["tops"]
    mixed = ["tops", "light_tops"]
    heavy = ["outerwear", "dresses"]
    lower = ["bottoms"]
    midrow = ["tops", "bottoms", "light_tops"]
    scenes = [
        fashion_scene("fashion_arcade", 10.0, 8.0,
                      [(3.4, 6.2), (6.6, 6.2)], [(5.0, 1.6, "x")],
                      [("w", 1.0, 7.0, tops), ("e", 1.0, 7.0, heavy),
                       ("n", 1.0, 9.0, mixed), ("s", 1.2, 8.8, lower)],
                      [(3.6, 2.0, 8.0, midrow)]),
        fashion_scene("fashion_loft", 11.0, 8.5,
                      [(4.0, 6.6), (7.0, 6.6)], [(5.5, 1.8, "x")],
                      [("w", 1.0, 7.5, heavy), ("e", 1.0, 7.5, mixed),
                       ("n", 1.2, 9.8, tops), ("s", 1.2, 9.8, lower)],
                      [(3.8, 2.0, 9.0, midrow)]),
        fashion_scene("fashion_corner", 9.0, 9.0,
                      [(4.5, 7.3)], [(6.2, 2.8, "z")],
                      [("w", 1.0, 8.0, mixed), ("e", 1.0, 8.0, tops),
                       ("n", 1.0, 8.0, heavy), ("s", 1.0, 8.0, lower)],
                      [(4.0, 1.8, 7.2, midrow)]),
        fashion_scene("fashion_gallery", 12.0, 7.5,
                      [(4.0, 5.8), (8.0, 5.8)], [(6.0, 1.4, "x")],
                      [("w", 1.0, 6.5, lower), ("e", 1.0, 6.5, heavy),
                       ("n", 1.2, 10.8, tops), ("s", 1.2, 10.8, mixed)],
                      [(3.4, 2.2, 9.8, midrow)]),
        fashion_scene("fashion_depot", 10.5, 9.0,
                      [(3.5, 7.2), (7.0, 7.2)], [(5.25, 1.6, "x")],
                      [("w", 1.0, 8.0, tops), ("e", 1.0, 8.0, lower),
                       ("n", 1.2, 9.3, heavy), ("s", 1.2, 9.3, mixed)],
                      [(3.4, 2.0, 8.5, midrow), (5.4, 2.0, 8.5, mixed)]),
        fashion_scene("fashion_mezzanine", 9.5, 8.0,
                      [(4.75, 6.4)], [(2.2, 6.4, "z")],
                      [("w", 1.0, 7.0, heavy), ("e", 1.0, 7.0, lower),
                       ("n", 1.0, 8.5, mixed), ("s", 1.0, 8.5, tops)],
                      [(3.6, 1.8, 7.7, midrow)]),
        fashion_scene("fashion_atrium", 11.5, 9.5,
                      [(3.8, 7.6), (7.7, 7.6)], [(5.75, 1.8, "x")],
                      [("w", 1.2, 8.3, mixed), ("e", 1.2, 8.3, tops),
                       ("n", 1.2, 10.3, lower), ("s", 1.2, 10.3, heavy)],
                      [(4.2, 2.2, 9.3, midrow)]),
    ]
    return scenes


def build_furniture_scene():
    b = SceneBuilder("furniture_showroom", "furniture", 16.0, 12.0)
    for x in (2.2, 5.2):  # beds along the north wall
        b.slot(x, 0.0, 10.6, "beds", YAW_ALONG_X)
    for z in (1.8, 4.4, 7.0):  # sofas down the west wall
        b.slot(1.3, 0.0, z, "large_seating", YAW_ALONG_Z)
    for x in (8.6, 11.6):
        b.slot(x, 0.0, 10.4, "dining_tables", YAW_ALONG_X)
    for x in frange(3.6, 9.6, 1.2):  # two chair rows flanking the center aisle
        b.slot(x, 0.0, 6.8, "chairs", YAW_ALONG_X)
    for x in frange(3.2, 10.4, 1.2):
        b.slot(x, 0.0, 4.2, "chairs", YAW_ALONG_X)
    for x, z in ((4.2, 2.6), (6.4, 2.6), (8.6, 2.6), (10.8, 2.6), (12.6, 5.4),
                 (13.4, 7.0)):
        b.slot(x, 0.0, z, "small_tables", YAW_ALONG_X)
    for x, z in ((3.0, 1.2), (5.2, 1.2), (7.4, 1.2), (9.6, 1.2), (11.2, 1.2),
                 (13.0, 1.2), (14.8, 3.0), (14.8, 6.6), (14.0, 8.8)):
        b.slot(x, 0.0, z, "lamps", YAW_ALONG_X)
    for z in (2.2, 5.0, 7.8):  # shelving on the east wall
        b.slot(15.4, 0.0, z, "shelving", YAW_ALONG_Z)
    for x, z in ((4.6, 5.5), (7.6, 5.5), (10.6, 5.5)):  # center aisle rugs
        b.slot(x, 0.0, z, "rugs", YAW_ALONG_X)
    b.slot(11.9, 0.0, 8.8, "large_seating", YAW_ALONG_X)
    for x, z in ((2.6, 8.8), (4.0, 8.2)):
        b.slot(x, 0.0, z, "chairs", YAW_ALONG_X)
    b.panel(8.2, 7.7, 2.6, "x")
    return b.doc


def main():
    for domain in ("fashion", "furniture"):
        write_json(DATA / f"catalog_{domain}.json", bundled_catalog_doc(domain))
    seeds_dir = DATA / "seeds"
    seeds_dir.mkdir(exist_ok=True)
    for doc in build_fashion_scenes() + [build_furniture_scene()]:
        write_json(seeds_dir / f"{doc['scene_id']}.json", doc)
    print("bundled data written to", DATA)


if __name__ == "__main__":
    main()
