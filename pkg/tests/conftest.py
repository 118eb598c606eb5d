import pytest

from shoptalk.catalog import catalog_from_dict, load_bundled_catalogs
from shoptalk.corpus import generate_dialogs
from shoptalk.scenegen import SceneGenConfig, generate_pool, load_bundled_seed_scenes
from shoptalk.simulator import default_sim_config


@pytest.fixture(scope="session")
def catalogs():
    return load_bundled_catalogs()


@pytest.fixture(scope="session")
def seed_scenes():
    return load_bundled_seed_scenes()


@pytest.fixture(scope="session")
def small_pool(seed_scenes, catalogs):
    config = SceneGenConfig(rearrangements_per_seed=3, snapshots_per_instance=4)
    return generate_pool(seed_scenes, catalogs, config, master_seed=7)


@pytest.fixture(scope="session")
def small_corpus(small_pool, catalogs):
    return generate_dialogs(small_pool, catalogs, default_sim_config(), 120, master_seed=11)


@pytest.fixture()
def tiny_catalog():
    return catalog_from_dict({
        "domain": "fashion",
        "categories": [
            {"name": "shirt", "compat_group": "tops"},
            {"name": "tshirt", "compat_group": "tops"},
            {"name": "jacket", "compat_group": "tops"},
            {"name": "trousers", "compat_group": "bottoms"},
        ],
        "items": [
            {"item_id": "shirt_red", "category": "shirt", "price": "19.99",
             "available_sizes": ["S", "M"], "color": "red", "pattern": "plain",
             "brand": "Acme", "customer_rating": 4.0, "extent": [0.5, 0.7, 0.06]},
            {"item_id": "shirt_blue", "category": "shirt", "price": "24.99",
             "available_sizes": ["M", "L"], "color": "blue", "pattern": "striped",
             "brand": "Acme", "customer_rating": 3.5, "extent": [0.5, 0.7, 0.06]},
            {"item_id": "tshirt_blue", "category": "tshirt", "price": "14.99",
             "available_sizes": ["S", "M", "L"], "color": "blue", "pattern": "plain",
             "brand": "Zen", "customer_rating": 4.5, "extent": [0.5, 0.65, 0.05]},
            {"item_id": "jacket_red", "category": "jacket", "price": "89.99",
             "available_sizes": ["M"], "color": "red", "pattern": "plain",
             "brand": "Zen", "customer_rating": 4.2, "extent": [0.58, 0.74, 0.1]},
            {"item_id": "trousers_grey", "category": "trousers", "price": "39.99",
             "available_sizes": ["M", "L"], "color": "grey", "pattern": "plain",
             "brand": "Acme", "customer_rating": 3.9, "extent": [0.44, 1.0, 0.07]},
        ],
    })
