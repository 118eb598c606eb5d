import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shoptalk.catalog import (
    catalog_from_dict,
    filter_items,
    item_matches,
    load_catalog,
    lookup,
    normalize_value,
)
from shoptalk.errors import NotFoundError, ValidationError
from shoptalk.ontology import slot_vocabulary
from shoptalk.resources import load_bundled_json
from shoptalk.synth import bundled_catalog_doc


def _doc(items):
    return {
        "domain": "fashion",
        "categories": [{"name": "shirt", "compat_group": "tops"}],
        "items": items,
    }


def _item(**overrides):
    base = {
        "item_id": "shirt_01", "category": "shirt", "price": "10.00",
        "available_sizes": ["M"], "color": "red", "pattern": "plain",
        "brand": "Acme", "customer_rating": 4.0, "extent": [0.5, 0.7, 0.06],
    }
    base.update(overrides)
    return base


def test_load_valid_three_items(tmp_path):
    doc = _doc([_item(item_id=f"shirt_{i}") for i in range(3)])
    path = tmp_path / "catalog.json"
    path.write_text(__import__("json").dumps(doc))
    catalog = load_catalog(path)
    assert len(catalog.items) == 3
    assert set(catalog.by_id) == {"shirt_0", "shirt_1", "shirt_2"}
    assert len(catalog.by_category["shirt"]) == 3


def test_duplicate_item_id_names_offender():
    with pytest.raises(ValidationError, match="shirt_01"):
        catalog_from_dict(_doc([_item(), _item()]))


def test_empty_catalog_accepted():
    assert catalog_from_dict(_doc([])).items == []


@pytest.mark.parametrize("bad, match", [
    (_item(category="sofa"), "category"),
    (_item(price="-3"), "price"),
    (_item(price="zero"), "price"),
    (_item(extent=[0.5, 0.0, 0.1]), "extent"),
    (_item(available_sizes=[]), "available_sizes"),
    (_item(customer_rating=7.0), "customer_rating"),
])
def test_invalid_items_rejected(bad, match):
    with pytest.raises(ValidationError, match=match):
        catalog_from_dict(_doc([bad]))


def test_lookup_found_and_missing(tiny_catalog):
    assert lookup(tiny_catalog, "shirt_red").color == "red"
    with pytest.raises(NotFoundError):
        lookup(tiny_catalog, "nope")


def test_round_trip_preserves_fields():
    doc = bundled_catalog_doc("furniture")
    catalog = catalog_from_dict(doc)
    for raw in doc["items"]:
        item = lookup(catalog, raw["item_id"])
        assert item.price == raw["price"]
        assert list(item.available_sizes) == raw["available_sizes"]
        assert item.color == raw["color"]
        assert item.pattern == raw["pattern"]
        assert item.brand == raw["brand"]
        assert item.customer_rating == raw["customer_rating"]
        assert list(item.extent) == raw["extent"]


def test_bundled_catalogs_pin_synthesizer_output():
    for domain in ("fashion", "furniture"):
        assert load_bundled_json(f"catalog_{domain}.json") == bundled_catalog_doc(domain)


def test_bundled_counts_match_defaults():
    assert len(bundled_catalog_doc("fashion")["items"]) == 290
    assert len(bundled_catalog_doc("furniture")["items"]) == 110


def test_empty_constraints_return_all_in_id_order(tiny_catalog):
    result = filter_items(tiny_catalog, {})
    assert [i.item_id for i in result] == sorted(i.item_id for i in tiny_catalog.items)


def test_color_filter(tiny_catalog):
    reds = filter_items(tiny_catalog, {"color": "red"})
    assert {i.item_id for i in reds} == {"shirt_red", "jacket_red"}
    assert [i.item_id for i in filter_items(tiny_catalog, {"color": "RED ", "type": "shirt"})] == ["shirt_red"]


def test_size_filter_uses_membership(tiny_catalog):
    result = filter_items(tiny_catalog, {"size": "S"})
    assert {i.item_id for i in result} == {"shirt_red", "tshirt_blue"}


def test_unknown_slot_rejected(tiny_catalog):
    with pytest.raises(ValidationError, match="flavor"):
        filter_items(tiny_catalog, {"flavor": "x"})


def test_filter_matches_exhaustive_scan_oracle(catalogs):
    """100 random constraint sets against a brute-force rescan."""
    rng = random.Random(2024)
    for _ in range(100):
        domain = rng.choice(["fashion", "furniture"])
        catalog = catalogs[domain]
        vocab = slot_vocabulary(domain)
        anchor = rng.choice(catalog.items)
        slots = rng.sample(sorted(vocab), rng.randint(1, 3))
        constraints = {}
        for slot in slots:
            field = vocab[slot]
            if field == "category":
                constraints[slot] = anchor.category
            elif field == "available_sizes":
                constraints[slot] = anchor.available_sizes[0]
            elif field == "customer_rating":
                constraints[slot] = f"{anchor.customer_rating:.1f}"
            else:
                constraints[slot] = getattr(anchor, field)
        got = [i.item_id for i in filter_items(catalog, constraints)]
        expected = sorted(
            item.item_id for item in catalog.items
            if item_matches(item, constraints, vocab)
        )
        assert got == expected
        assert anchor.item_id in got


@settings(max_examples=30, deadline=None)
@given(data=st.data())
def test_more_constraints_never_grow_result(data, catalogs):
    catalog = catalogs["fashion"]
    vocab = slot_vocabulary("fashion")
    anchor = data.draw(st.sampled_from(catalog.items))
    slots = data.draw(st.lists(st.sampled_from(sorted(vocab)), min_size=1,
                               max_size=4, unique=True))
    constraints = {}
    previous = {i.item_id for i in filter_items(catalog, {})}
    for slot in slots:
        field = vocab[slot]
        if field == "category":
            constraints[slot] = anchor.category
        elif field == "available_sizes":
            constraints[slot] = anchor.available_sizes[0]
        elif field == "customer_rating":
            constraints[slot] = f"{anchor.customer_rating:.1f}"
        else:
            constraints[slot] = getattr(anchor, field)
        current = {i.item_id for i in filter_items(catalog, constraints)}
        assert current <= previous
        previous = current


def test_normalize_value():
    assert normalize_value("  Red\tShirt ") == "red shirt"
    assert normalize_value(4.5) == "4.5"
