"""Digital-asset catalog: load, validate, index, and query shop items.

A catalog grounds both scene generation (extents, compatibility groups) and
the assistant's simulated API (attribute lookups, filtering). Catalogs are
immutable after load and safe for concurrent reads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation

from .canonical import read_json
from .errors import NotFoundError, ValidationError

DOMAINS = ("fashion", "furniture")

FASHION_CATEGORIES = (
    "hat", "tshirt", "jacket", "hoodie", "sweater", "shirt", "suit", "vest",
    "coat", "trousers", "jeans", "joggers", "skirt", "blouse", "tank top",
    "dress", "shoes",
)

FURNITURE_CATEGORIES = (
    "area rug", "bed", "chair", "couch chair", "dining table", "coffee table",
    "end table", "lamp", "shelves", "sofa",
)

CATEGORY_NAMES = {"fashion": FASHION_CATEGORIES, "furniture": FURNITURE_CATEGORIES}


def normalize_value(value) -> str:
    """Case-fold and collapse whitespace; the equality used by filtering."""
    return re.sub(r"\s+", " ", str(value)).strip().casefold()


@dataclass(frozen=True)
class CatalogItem:
    item_id: str
    category: str
    price: str  # decimal string, e.g. "49.99"
    available_sizes: tuple[str, ...]
    color: str
    pattern: str
    brand: str
    customer_rating: float
    extent: tuple[float, float, float]  # width, height, depth in meters


@dataclass
class Catalog:
    domain: str
    compat_groups: dict[str, str]  # category name -> group id
    items: list[CatalogItem]
    by_id: dict[str, CatalogItem] = field(default_factory=dict)
    by_category: dict[str, list[CatalogItem]] = field(default_factory=dict)
    by_group: dict[str, list[CatalogItem]] = field(default_factory=dict)

    def __post_init__(self):
        for item in self.items:
            self.by_id[item.item_id] = item
            self.by_category.setdefault(item.category, []).append(item)
            self.by_group.setdefault(self.compat_groups[item.category], []).append(item)
        for bucket in (self.by_category, self.by_group):
            for members in bucket.values():
                members.sort(key=lambda it: it.item_id)


def _check_item(raw: dict, domain: str, known_categories: dict) -> CatalogItem:
    item_id = raw.get("item_id")
    if not item_id or not isinstance(item_id, str):
        raise ValidationError("catalog item missing item_id", details=[raw])

    def bad(fld, why):
        return ValidationError(f"item {item_id!r}: {fld} {why}", details=[{"item_id": item_id, "field": fld}])

    category = raw.get("category")
    if category not in known_categories:
        raise bad("category", f"unknown category {category!r}")
    try:
        price = Decimal(str(raw["price"]))
    except (KeyError, InvalidOperation):
        raise bad("price", "is not a decimal")
    if price <= 0:
        raise bad("price", "must be > 0")
    extent = raw.get("extent")
    if not isinstance(extent, (list, tuple)) or len(extent) != 3 or any(
        not isinstance(v, (int, float)) or v <= 0 for v in extent
    ):
        raise bad("extent", "must be 3 positive numbers")
    sizes = tuple(str(s) for s in raw.get("available_sizes", []))
    if domain == "fashion" and not sizes:
        raise bad("available_sizes", "must be non-empty for fashion items")
    rating = raw.get("customer_rating")
    if not isinstance(rating, (int, float)) or not 0 <= rating <= 5:
        raise bad("customer_rating", "must be in [0, 5]")
    return CatalogItem(
        item_id=item_id,
        category=category,
        price=str(raw["price"]),
        available_sizes=sizes,
        color=str(raw.get("color", "")),
        pattern=str(raw.get("pattern", "")),
        brand=str(raw.get("brand", "")),
        customer_rating=float(rating),
        extent=(float(extent[0]), float(extent[1]), float(extent[2])),
    )


def catalog_from_dict(doc: dict) -> Catalog:
    domain = doc.get("domain")
    if domain not in DOMAINS:
        raise ValidationError(f"unknown domain {domain!r}; expected one of {DOMAINS}")
    valid_names = set(CATEGORY_NAMES[domain])
    compat_groups = {}
    for cat in doc.get("categories", []):
        name, group = cat.get("name"), cat.get("compat_group")
        if name not in valid_names:
            raise ValidationError(f"category {name!r} is not a {domain} category")
        if not group:
            raise ValidationError(f"category {name!r} has no compat_group")
        compat_groups[name] = group

    items, seen = [], set()
    for raw in doc.get("items", []):
        item = _check_item(raw, domain, compat_groups)
        if item.item_id in seen:
            raise ValidationError(
                f"duplicate item_id {item.item_id!r}",
                details=[{"item_id": item.item_id, "field": "item_id"}],
            )
        seen.add(item.item_id)
        items.append(item)
    return Catalog(domain=domain, compat_groups=compat_groups, items=items)


def load_catalog(path) -> Catalog:
    return catalog_from_dict(read_json(path))


def load_bundled_catalogs() -> dict[str, Catalog]:
    from .resources import load_bundled_json

    return {d: catalog_from_dict(load_bundled_json(f"catalog_{d}.json")) for d in DOMAINS}


def lookup(catalog: Catalog, item_id: str) -> CatalogItem:
    try:
        return catalog.by_id[item_id]
    except KeyError:
        raise NotFoundError(f"item_id {item_id!r} not in catalog")


def slot_value(item: CatalogItem, slot: str, slot_fields: dict[str, str]) -> str:
    """Render the item attribute backing ``slot`` as a display string."""
    fld = slot_fields[slot]
    value = getattr(item, "category" if fld == "category" else fld)
    if fld == "available_sizes":
        return ", ".join(value)
    if fld == "customer_rating":
        return f"{value:.1f}"
    return str(value)


def item_matches(item: CatalogItem, constraints: dict, slot_fields: dict[str, str]) -> bool:
    for slot, wanted in constraints.items():
        if slot not in slot_fields:
            raise ValidationError(f"unknown slot {slot!r}")
        if slot_fields[slot] == "available_sizes":
            sizes = {normalize_value(s) for s in item.available_sizes}
            if normalize_value(wanted) not in sizes:
                return False
        elif normalize_value(slot_value(item, slot, slot_fields)) != normalize_value(wanted):
            return False
    return True


def filter_items(catalog: Catalog, constraints: dict, slot_fields: dict[str, str] | None = None) -> list[CatalogItem]:
    """All items matching every constraint, id-ordered. Size matches by membership."""
    if slot_fields is None:
        from .ontology import slot_vocabulary

        slot_fields = slot_vocabulary(catalog.domain)
    hits = [it for it in catalog.items if item_matches(it, constraints, slot_fields)]
    return sorted(hits, key=lambda it: it.item_id)
