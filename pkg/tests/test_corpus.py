import copy
import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shoptalk.canonical import dumps
from shoptalk.corpus import (
    DEFAULT_RATIOS,
    SPLIT_NAMES,
    act_transition_graph,
    compute_stats,
    coref_distances,
    generate_dialogs,
    largest_remainder_sizes,
    split_corpus,
    tokenize,
    word_count,
)
from shoptalk.errors import ValidationError
from shoptalk.simulator import default_sim_config


def test_tokenize_detaches_punctuation_keeps_decimals():
    assert tokenize("It costs $49.99, right?") == ["It", "costs", "$49.99", ",", "right", "?"]
    assert word_count("It costs $49.99, right?") == 4
    assert tokenize("sizes S, M, L.") == ["sizes", "S", ",", "M", ",", "L", "."]


def test_generate_dialogs_count_contract(small_corpus):
    assert len(small_corpus["dialogs"]) == 120
    assert all(len(d["turns"]) >= 2 for d in small_corpus["dialogs"])


def test_generate_dialogs_deterministic(small_pool, catalogs):
    sim = default_sim_config()
    a = generate_dialogs(small_pool, catalogs, sim, 40, master_seed=21)
    b = generate_dialogs(small_pool, catalogs, sim, 40, master_seed=21)
    assert dumps(a) == dumps(b)


def test_split_sizes_1000_default():
    sizes = largest_remainder_sizes(1000, dict(zip(SPLIT_NAMES, DEFAULT_RATIOS)))
    assert sizes == {"train": 650, "dev": 100, "dev-test": 100, "test-std": 150}


def test_split_partition_property(small_corpus):
    out = split_corpus(small_corpus, DEFAULT_RATIOS, seed=3)
    splits = out["split_info"]["splits"]
    all_ids = [d["dialog_id"] for d in small_corpus["dialogs"]]
    combined = sum((splits[n] for n in SPLIT_NAMES), [])
    assert sorted(combined) == sorted(all_ids)
    assert len(set(combined)) == len(all_ids)


def test_split_degenerate_all_train(small_corpus):
    out = split_corpus(small_corpus, (1.0, 0.0, 0.0, 0.0), seed=1)
    splits = out["split_info"]["splits"]
    assert len(splits["train"]) == len(small_corpus["dialogs"])
    assert all(not splits[n] for n in SPLIT_NAMES[1:])


def test_split_deterministic_under_seed(small_corpus):
    a = split_corpus(small_corpus, DEFAULT_RATIOS, seed=9)
    b = split_corpus(small_corpus, DEFAULT_RATIOS, seed=9)
    c = split_corpus(small_corpus, DEFAULT_RATIOS, seed=10)
    assert a["split_info"] == b["split_info"]
    assert a["split_info"] != c["split_info"]


def test_split_scene_disjoint(small_corpus):
    out = split_corpus(small_corpus, DEFAULT_RATIOS, seed=3, scene_disjoint=True)
    splits = out["split_info"]["splits"]
    instance_of = {sid: s["instance_id"] for sid, s in small_corpus["snapshots"].items()}
    seen: dict[str, str] = {}
    by_dialog = {d["dialog_id"]: d for d in small_corpus["dialogs"]}
    for name in SPLIT_NAMES:
        for did in splits[name]:
            inst = instance_of[by_dialog[did]["snapshot_ids"][0]]
            assert seen.setdefault(inst, name) == name
    combined = sum((splits[n] for n in SPLIT_NAMES), [])
    assert sorted(combined) == sorted(d["dialog_id"] for d in small_corpus["dialogs"])


@settings(max_examples=25, deadline=None)
@given(weights=st.lists(st.integers(min_value=0, max_value=100), min_size=4, max_size=4)
       .filter(lambda w: sum(w) > 0),
       total=st.integers(min_value=1, max_value=500))
def test_largest_remainder_always_partitions(weights, total):
    ratios = {n: w / sum(weights) for n, w in zip(SPLIT_NAMES, weights)}
    sizes = largest_remainder_sizes(total, ratios)
    assert sum(sizes.values()) == total
    assert all(v >= 0 for v in sizes.values())


def _mini_doc():
    """Two hand-built dialogs with 10 and 12 utterances."""
    def turn(i, speaker, objects=()):
        return {
            "turn_index": i, "speaker": speaker,
            "utterance": "one two three four five",
            "template_utterance": "one two three four five",
            "active_snapshot": "s1",
            "frame": {"act": "REQUEST" if speaker == "user" else "INFORM",
                      "activity": "GET", "request_slots": [], "slot_values": {},
                      "objects": list(objects),
                      **({"disambiguation_label": False} if speaker == "user" else {})},
        }

    snapshots = {"s1": {"snapshot_id": "s1", "instance_id": "i1",
                        "camera": {"image_size": [1024, 768]},
                        "objects": [{"slot_id": f"sl{k}", "local_index": k,
                                     "item_id": f"it{k}", "bbox": [0, 0, 1, 1],
                                     "visibility": 1.0, "fully_visible": True}
                                    for k in range(6)]}}

    d1 = {"dialog_id": "a", "domain": "fashion", "snapshot_ids": ["s1"],
          "viewpoint_switch_turn": None, "agenda": [],
          "turns": [turn(i, "user" if i % 2 == 0 else "assistant",
                         objects=[0] if i in (2, 6) else [])
                    for i in range(10)]}
    d2 = {"dialog_id": "b", "domain": "fashion", "snapshot_ids": ["s1"],
          "viewpoint_switch_turn": None, "agenda": [],
          "turns": [turn(i, "user" if i % 2 == 0 else "assistant",
                         objects=[1, 2] if i == 4 else [])
                    for i in range(12)]}
    return {"schema_version": 1, "snapshots": snapshots, "dialogs": [d1, d2],
            "split_info": None}


def test_compute_stats_arithmetic():
    stats = compute_stats(_mini_doc())
    assert stats["avg_utterances_per_dialog"] == 11.0
    assert stats["dialog_count"] == 2
    assert stats["utterance_count"] == 22
    assert stats["avg_words_per_user_turn"] == 5.0
    assert stats["avg_objects_in_scene_per_dialog"] == 6.0
    assert stats["avg_objects_mentioned_per_dialog"] == 1.5  # {sl0} and {sl1, sl2}


def test_coref_histogram_first_mentions_excluded():
    doc = _mini_doc()
    hist = coref_distances(doc)
    # dialog a mentions sl0 at turns 2 and 6 -> one entry at distance 4
    assert hist == Counter({4: 1})
    for dialog in doc["dialogs"]:
        for turn in dialog["turns"]:
            turn["frame"]["objects"] = []
    doc["dialogs"][0]["turns"][0]["frame"]["objects"] = [3]
    assert coref_distances(doc) == Counter()


def _coref_oracle(doc):
    """Quadratic re-scan: for each mention, search all prior turns."""
    hist = Counter()
    for dialog in doc["dialogs"]:
        turns = dialog["turns"]
        for i, turn in enumerate(turns):
            for obj in turn["frame"]["objects"]:
                slot = doc["snapshots"][turn["active_snapshot"]]["objects"][obj]["slot_id"]
                for j in range(i - 1, -1, -1):
                    prior = turns[j]
                    prior_slots = [
                        doc["snapshots"][prior["active_snapshot"]]["objects"][o]["slot_id"]
                        for o in prior["frame"]["objects"]
                    ]
                    if slot in prior_slots:
                        hist[i - j] += 1
                        break
    return hist


def test_coref_histogram_matches_quadratic_oracle(small_corpus):
    assert coref_distances(small_corpus) == _coref_oracle(small_corpus)


def test_act_transition_single_dialog():
    doc = _mini_doc()
    doc["dialogs"] = [doc["dialogs"][0]]
    edges = act_transition_graph(doc, max_rounds=1)
    assert edges == [{"src": "REQUEST:GET:U0", "dst": "INFORM:GET:A0", "weight": 1}]


def test_act_transition_outgoing_weight_conservation(small_corpus):
    edges = act_transition_graph(small_corpus, max_rounds=4)
    outgoing_u0 = sum(e["weight"] for e in edges if e["src"].endswith(":U0"))
    assert outgoing_u0 == len(small_corpus["dialogs"])


def test_act_transition_branching(small_corpus):
    edges = act_transition_graph(small_corpus, max_rounds=4)
    by_src = Counter()
    successors: dict[str, set] = {}
    for e in edges:
        by_src[e["src"]] += e["weight"]
        successors.setdefault(e["src"], set()).add(e["dst"])
    top_user = max((s for s in by_src if ":U" in s), key=lambda s: by_src[s])
    assert len(successors[top_user]) >= 2


def test_compute_stats_invariant_under_reordering(small_corpus):
    shuffled = copy.deepcopy(small_corpus)
    random.Random(5).shuffle(shuffled["dialogs"])
    a = compute_stats(small_corpus)
    b = compute_stats(shuffled)
    for key in ("avg_utterances_per_dialog", "avg_words_per_user_turn",
                "avg_objects_in_scene_per_dialog", "coref_distance_histogram",
                "act_activity_counts"):
        assert a[key] == b[key]
    assert (Counter((e["src"], e["dst"], e["weight"]) for e in a["act_transitions"])
            == Counter((e["src"], e["dst"], e["weight"]) for e in b["act_transitions"]))


def test_compute_stats_empty_corpus_rejected():
    with pytest.raises(ValidationError):
        compute_stats({"snapshots": {}, "dialogs": []})
