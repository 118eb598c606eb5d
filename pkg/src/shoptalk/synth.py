"""Seeded synthesizer for the bundled item catalogs.

The shipped catalogs (290 fashion / 110 furniture items) are produced by
``synthesize_catalog`` with fixed seeds; a regression test pins the output so
the bundled files never drift from the generator.
"""

from __future__ import annotations

import random

from .catalog import CATEGORY_NAMES, Catalog, catalog_from_dict

# Which categories may replace which during scene rearrangement. Declared as
# data and copied into the catalog files so downstream code never hardcodes it.
COMPAT_GROUPS = {
    "fashion": {
        "shirt": "tops", "tshirt": "tops", "jacket": "tops", "hoodie": "tops",
        "sweater": "tops",
        "coat": "outerwear", "suit": "outerwear", "vest": "outerwear",
        "trousers": "bottoms", "jeans": "bottoms", "joggers": "bottoms",
        "blouse": "light_tops", "tank top": "light_tops",
        "dress": "dresses", "skirt": "dresses",
        "hat": "headwear",
        "shoes": "footwear",
    },
    "furniture": {
        "coffee table": "small_tables", "end table": "small_tables",
        "dining table": "dining_tables",
        "sofa": "large_seating", "couch chair": "large_seating",
        "chair": "chairs",
        "bed": "beds",
        "lamp": "lamps",
        "shelves": "shelving",
        "area rug": "rugs",
    },
}

COLORS = (
    "red", "blue", "navy", "black", "white", "grey", "green", "olive",
    "beige", "brown", "yellow", "pink", "purple", "maroon", "teal",
)

FASHION_PATTERNS = (
    "plain", "striped", "floral", "checkered", "plaid", "polka dot",
    "graphic", "heathered", "camouflage",
)

FURNITURE_MATERIALS = (
    "oak", "walnut", "pine", "metal", "glass", "leather", "fabric",
    "marble", "wicker", "velvet",
)

FASHION_BRANDS = (
    "North Lane", "Cedar & Vine", "Glow Atelier", "Harbor Knit", "Verve Co",
    "Atlas Wear", "Juniper Label", "Moss & Main", "Quarry Denim", "Solstice",
    "Fable Thread", "Crestline",
)

FURNITURE_BRANDS = (
    "Oakhaven", "Studio Pike", "Fjord Living", "Brightloom", "Casa Rhodes",
    "Timber & Tone", "Vantage Home", "Lumen House",
)

SIZE_LADDER = ("XS", "S", "M", "L", "XL")
SHOE_SIZES = ("6", "7", "8", "9", "10", "11")

# (base price, base extent w/h/d in meters) per category.
_FASHION_SPECS = {
    "hat": (18.0, (0.26, 0.16, 0.26)),
    "tshirt": (24.0, (0.52, 0.68, 0.06)),
    "jacket": (89.0, (0.58, 0.74, 0.10)),
    "hoodie": (54.0, (0.56, 0.72, 0.09)),
    "sweater": (62.0, (0.54, 0.68, 0.08)),
    "shirt": (46.0, (0.52, 0.72, 0.06)),
    "suit": (240.0, (0.56, 1.05, 0.10)),
    "vest": (38.0, (0.50, 0.58, 0.06)),
    "coat": (150.0, (0.60, 1.10, 0.11)),
    "trousers": (58.0, (0.44, 1.00, 0.07)),
    "jeans": (66.0, (0.44, 1.02, 0.08)),
    "joggers": (42.0, (0.44, 0.98, 0.08)),
    "skirt": (44.0, (0.48, 0.62, 0.07)),
    "blouse": (40.0, (0.50, 0.64, 0.05)),
    "tank top": (19.0, (0.46, 0.58, 0.04)),
    "dress": (78.0, (0.52, 1.15, 0.07)),
    "shoes": (85.0, (0.32, 0.16, 0.30)),
}

_FURNITURE_SPECS = {
    "area rug": (130.0, (2.00, 0.02, 1.40)),
    "bed": (620.0, (1.65, 0.95, 2.10)),
    "chair": (120.0, (0.52, 0.92, 0.55)),
    "couch chair": (330.0, (0.92, 0.85, 0.90)),
    "dining table": (540.0, (1.80, 0.76, 1.00)),
    "coffee table": (210.0, (1.10, 0.45, 0.60)),
    "end table": (95.0, (0.50, 0.55, 0.50)),
    "lamp": (75.0, (0.35, 1.50, 0.35)),
    "shelves": (260.0, (1.20, 1.80, 0.40)),
    "sofa": (780.0, (2.05, 0.88, 0.95)),
}

_SLUG = {"tank top": "tanktop", "area rug": "arearug", "couch chair": "couchchair",
         "dining table": "diningtable", "coffee table": "coffeetable",
         "end table": "endtable"}


def _slug(category: str) -> str:
    return _SLUG.get(category, category.replace(" ", ""))


def _sizes_for(category: str, rng: random.Random) -> list[str]:
    if category == "shoes":
        k = rng.randint(3, len(SHOE_SIZES))
        start = rng.randint(0, len(SHOE_SIZES) - k)
        return list(SHOE_SIZES[start:start + k])
    if category == "hat":
        return rng.choice([["S/M"], ["L/XL"], ["S/M", "L/XL"]])
    k = rng.randint(2, len(SIZE_LADDER))
    start = rng.randint(0, len(SIZE_LADDER) - k)
    return list(SIZE_LADDER[start:start + k])


def synthesize_catalog(domain: str, count: int, seed: int) -> dict:
    """Deterministic catalog document with ``count`` items spread over all categories."""
    rng = random.Random(seed)
    categories = CATEGORY_NAMES[domain]
    specs = _FASHION_SPECS if domain == "fashion" else _FURNITURE_SPECS
    patterns = FASHION_PATTERNS if domain == "fashion" else FURNITURE_MATERIALS
    brands = FASHION_BRANDS if domain == "fashion" else FURNITURE_BRANDS
    groups = COMPAT_GROUPS[domain]

    per_cat = {c: count // len(categories) for c in categories}
    for c in categories[: count % len(categories)]:
        per_cat[c] += 1

    items = []
    for category in categories:
        base_price, base_extent = specs[category]
        for k in range(per_cat[category]):
            price = base_price * rng.uniform(0.6, 1.6)
            extent = [round(v * rng.uniform(0.9, 1.1), 3) for v in base_extent]
            items.append({
                "item_id": f"{domain[:2]}_{_slug(category)}_{k:03d}",
                "category": category,
                "price": f"{price:.2f}",
                "available_sizes": _sizes_for(category, rng) if domain == "fashion" else [],
                "color": rng.choice(COLORS),
                "pattern": rng.choice(patterns),
                "brand": rng.choice(brands),
                "customer_rating": round(rng.uniform(2.5, 5.0), 1),
                "extent": extent,
            })
    return {
        "schema_version": 1,
        "domain": domain,
        "categories": [{"name": c, "compat_group": groups[c]} for c in categories],
        "items": items,
    }


def bundled_catalog_doc(domain: str) -> dict:
    counts = {"fashion": (290, 20210), "furniture": (110, 20211)}
    count, seed = counts[domain]
    return synthesize_catalog(domain, count, seed)


def build_catalog(domain: str, count: int, seed: int) -> Catalog:
    return catalog_from_dict(synthesize_catalog(domain, count, seed))
