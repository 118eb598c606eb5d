import copy
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shoptalk import evaluate as ev
from shoptalk.errors import ValidationError


def turn(i, speaker, objects=(), label=False, act=None, activity="GET",
         slot_values=None, utterance="hello there my friend"):
    frame = {
        "act": act or ("REQUEST" if speaker == "user" else "INFORM"),
        "activity": activity,
        "request_slots": [],
        "slot_values": slot_values or {},
        "objects": list(objects),
    }
    if speaker == "user":
        frame["disambiguation_label"] = label
    return {
        "turn_index": i, "speaker": speaker, "utterance": utterance,
        "template_utterance": utterance, "active_snapshot": "s1", "frame": frame,
    }


def doc_of(dialogs):
    return {"schema_version": 1, "snapshots": {}, "dialogs": dialogs, "split_info": None}


def dialog_of(dialog_id, user_specs):
    """user_specs: list of dicts passed to turn() for each user turn."""
    turns = []
    for spec in user_specs:
        i = len(turns)
        assistant = spec.pop("assistant", {})
        turns.append(turn(i, "user", **spec))
        turns.append(turn(i + 1, "assistant", **assistant))
    return {"dialog_id": dialog_id, "domain": "fashion", "snapshot_ids": ["s1"],
            "viewpoint_switch_turn": None, "agenda": [], "turns": turns}


# -- disambiguation ----------------------------------------------------------


def test_disambiguation_identity(small_corpus):
    preds = ev.perfect_predictions(small_corpus)
    assert ev.eval_disambiguation(preds, small_corpus).metrics["accuracy"] == 1.0


def test_disambiguation_counting():
    gold_labels = [True, True, False, True]
    pred_labels = [True, False, False, True]
    doc = doc_of([dialog_of("d", [{"label": L} for L in gold_labels])])
    preds = {"d": {str(2 * i): {"disambiguation": p} for i, p in enumerate(pred_labels)}}
    assert ev.eval_disambiguation(preds, doc).metrics["accuracy"] == 0.75


def test_disambiguation_all_zeros_baseline(small_corpus):
    preds = {}
    total = positives = 0
    for dialog in small_corpus["dialogs"]:
        for t in dialog["turns"]:
            if t["speaker"] == "user":
                total += 1
                positives += bool(t["frame"]["disambiguation_label"])
                preds.setdefault(dialog["dialog_id"], {})[str(t["turn_index"])] = {
                    "disambiguation": False}
    report = ev.eval_disambiguation(preds, small_corpus)
    assert report.metrics["accuracy"] == pytest.approx(1 - positives / total)


def test_disambiguation_missing_prediction_error():
    doc = doc_of([dialog_of("d", [{"label": False}, {"label": True}])])
    with pytest.raises(ValidationError, match="lack a disambiguation"):
        ev.eval_disambiguation({"d": {"0": {"disambiguation": False}}}, doc)


# -- coreference ---------------------------------------------------------------


def test_coref_identity_and_formula():
    doc = doc_of([dialog_of("d", [{"objects": (0, 8)}])])
    exact = {"d": {"0": {"objects": [0, 8]}}}
    report = ev.eval_coref(exact, doc)
    assert (report.metrics["precision"], report.metrics["recall"], report.metrics["f1"]) == (1, 1, 1)

    doc = doc_of([dialog_of("d", [{"objects": (8,)}])])
    partial = {"d": {"0": {"objects": [3, 8]}}}
    report = ev.eval_coref(partial, doc)
    assert report.metrics["precision"] == 0.5
    assert report.metrics["recall"] == 1.0
    assert report.metrics["f1"] == pytest.approx(2 / 3)


def test_coref_excludes_disambiguation_preceding_turns():
    specs = [
        {"objects": (1,), "label": True,
         "assistant": {"act": "REQUEST", "activity": "DISAMBIGUATE", "objects": (1, 2)}},
        {"objects": (2,)},
    ]
    doc = doc_of([dialog_of("d", specs)])
    base = ev.eval_coref({"d": {"2": {"objects": [2]}}}, doc)
    assert base.metrics["f1"] == 1.0
    assert base.support["excluded_turns"] == 1
    # predictions injected on the excluded turn change nothing
    injected = ev.eval_coref({"d": {"0": {"objects": [5, 4, 3]}, "2": {"objects": [2]}}}, doc)
    assert injected.metrics == base.metrics
    assert injected.support == base.support


def _drop_excluded(doc, preds):
    """Remove (flagged user turn, clarify turn) pairs and remap predictions."""
    out = copy.deepcopy(doc)
    new_preds = {}
    for dialog in out["dialogs"]:
        kept, mapping = [], {}
        turns = dialog["turns"]
        i = 0
        while i < len(turns):
            t = turns[i]
            if (t["speaker"] == "user"
                    and ev.excluded_from_coref({"turns": turns}, t["turn_index"])):
                i += 2  # drop the pair
                continue
            mapping[t["turn_index"]] = len(kept)
            t = dict(t, turn_index=len(kept))
            kept.append(t)
            i += 1
        dialog["turns"] = kept
        source = preds.get(dialog["dialog_id"], {})
        remapped = {}
        for old, new in mapping.items():
            if str(old) in source and kept[new]["speaker"] == "user":
                remapped[str(new)] = source[str(old)]
        new_preds[dialog["dialog_id"]] = remapped
    return out, new_preds


def test_coref_exclusion_equivalent_to_removal(small_corpus):
    preds = ev.perfect_predictions(small_corpus)
    # perturb some predictions so that metrics are not trivially 1.0
    rng = random.Random(4)
    for did in sorted(preds):
        for key in sorted(preds[did]):
            if rng.random() < 0.3:
                preds[did][key]["objects"] = preds[did][key]["objects"][1:]
    full = ev.eval_coref(preds, small_corpus)
    stripped_doc, stripped_preds = _drop_excluded(small_corpus, preds)
    stripped = ev.eval_coref(stripped_preds, stripped_doc)
    assert stripped.support["excluded_turns"] == 0
    for key in ("precision", "recall", "f1"):
        assert stripped.metrics[key] == full.metrics[key]


# -- DST -------------------------------------------------------------------


def test_dst_exact_match(small_corpus):
    preds = ev.perfect_predictions(small_corpus)
    report = ev.eval_dst(preds, small_corpus)
    for key, value in report.metrics.items():
        assert value == 1.0, key
    delta = ev.eval_dst(preds, small_corpus, frame_mode="delta")
    for key, value in delta.metrics.items():
        assert value == 1.0, key


def test_dst_slot_formula():
    doc = doc_of([dialog_of("d", [
        {"slot_values": {"color": "red", "type": "jacket"}},
    ])])
    preds = {"d": {"0": {"frame": {"act": "REQUEST", "activity": "GET",
                                   "slot_values": {"color": "red"}},
                         "objects": []}}}
    report = ev.eval_dst(preds, doc)
    assert report.metrics["slot_precision"] == 1.0
    assert report.metrics["slot_recall"] == 0.5
    assert report.metrics["slot_f1"] == pytest.approx(2 / 3)
    assert report.metrics["joint_accuracy"] == 0.0
    assert report.metrics["intent_f1"] == 1.0


def test_dst_cumulative_carryover():
    doc = doc_of([dialog_of("d", [
        {"slot_values": {"color": "red"}},
        {"slot_values": {"type": "jacket"}},
    ])])
    # predicting only the per-turn deltas still matches cumulative gold
    preds = {"d": {
        "0": {"frame": {"act": "REQUEST", "activity": "GET",
                        "slot_values": {"color": "red"}}, "objects": []},
        "2": {"frame": {"act": "REQUEST", "activity": "GET",
                        "slot_values": {"type": "jacket"}}, "objects": []},
    }}
    report = ev.eval_dst(preds, doc)
    assert report.metrics["slot_f1"] == 1.0
    assert report.metrics["joint_accuracy"] == 1.0


def _prf_oracle(tp, fp, fn):
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    return p, r, (2 * p * r / (p + r) if p + r else 0.0)


def _dst_oracle(preds, doc):
    """Independent recomputation with explicit set arithmetic."""
    intent_ok = joint = total = 0
    s_tp = s_fp = s_fn = 0
    o_tp = o_fp = o_fn = 0
    for dialog in doc["dialogs"]:
        gold_cum, pred_cum = {}, {}
        for t in dialog["turns"]:
            if t["speaker"] != "user":
                continue
            total += 1
            payload = preds.get(dialog["dialog_id"], {}).get(str(t["turn_index"]), {})
            pf = payload.get("frame", {})
            gold_cum = {**gold_cum, **t["frame"]["slot_values"]}
            if pf:
                pred_cum = {**pred_cum, **pf.get("slot_values", {})}
            gold_pairs = {(k, str(v).strip().casefold()) for k, v in gold_cum.items()}
            pred_pairs = {(k, str(v).strip().casefold()) for k, v in pred_cum.items()}
            gold_obj = set(t["frame"]["objects"])
            pred_obj = set(payload.get("objects", []))
            i_ok = bool(pf) and (pf.get("act"), pf.get("activity")) == (
                t["frame"]["act"], t["frame"]["activity"])
            intent_ok += i_ok
            s_tp += len(gold_pairs & pred_pairs)
            s_fp += len(pred_pairs - gold_pairs)
            s_fn += len(gold_pairs - pred_pairs)
            o_tp += len(gold_obj & pred_obj)
            o_fp += len(pred_obj - gold_obj)
            o_fn += len(gold_obj - pred_obj)
            joint += i_ok and gold_pairs == pred_pairs and gold_obj == pred_obj
    sp, sr, sf = _prf_oracle(s_tp, s_fp, s_fn)
    op, orr, of = _prf_oracle(o_tp, o_fp, o_fn)
    return {
        "intent_f1": intent_ok / total, "intent_accuracy": intent_ok / total,
        "slot_precision": sp, "slot_recall": sr, "slot_f1": sf,
        "object_precision": op, "object_recall": orr, "object_f1": of,
        "joint_accuracy": joint / total,
    }


def _coref_oracle(preds, doc):
    tp = fp = fn = 0
    for dialog in doc["dialogs"]:
        for t in dialog["turns"]:
            if t["speaker"] != "user":
                continue
            if ev.excluded_from_coref(dialog, t["turn_index"]):
                continue
            payload = preds.get(dialog["dialog_id"], {}).get(str(t["turn_index"]), {})
            pred = set(payload.get("objects", []))
            gold = set(t["frame"]["objects"])
            tp += len([x for x in pred if x in gold])
            fp += len([x for x in pred if x not in gold])
            fn += len([x for x in gold if x not in pred])
    p, r, f = _prf_oracle(tp, fp, fn)
    return {"precision": p, "recall": r, "f1": f}


def _perturb(preds, rng):
    out = copy.deepcopy(preds)
    for did in sorted(out):
        for key in sorted(out[did]):
            payload = out[did][key]
            roll = rng.random()
            if roll < 0.2:
                payload["objects"] = payload.get("objects", [])[1:]
            elif roll < 0.4:
                payload["objects"] = list(payload.get("objects", [])) + [97]
            elif roll < 0.55 and payload.get("frame", {}).get("slot_values"):
                slot = sorted(payload["frame"]["slot_values"])[0]
                payload["frame"]["slot_values"][slot] = "wrong"
            elif roll < 0.7 and payload.get("frame"):
                payload["frame"]["act"] = "ASK"
            elif roll < 0.8:
                del out[did][key]
    return out


def test_metrics_match_set_arithmetic_oracle(small_corpus):
    """100 randomly perturbed prediction sets, exact agreement."""
    base = ev.perfect_predictions(small_corpus)
    rng = random.Random(31)
    for _ in range(100):
        preds = _perturb(base, rng)
        got_dst = ev.eval_dst(preds, small_corpus).metrics
        want_dst = _dst_oracle(preds, small_corpus)
        assert got_dst == want_dst
        got_coref = ev.eval_coref(preds, small_corpus).metrics
        want_coref = _coref_oracle(preds, small_corpus)
        assert got_coref == want_coref


def test_f1_identity_on_reports(small_corpus):
    base = ev.perfect_predictions(small_corpus)
    preds = _perturb(base, random.Random(8))
    for report in (ev.eval_coref(preds, small_corpus),):
        p, r, f1 = (report.metrics["precision"], report.metrics["recall"],
                    report.metrics["f1"])
        expected = 2 * p * r / (p + r) if p + r else 0.0
        assert f1 == pytest.approx(expected)


# -- BLEU ----------------------------------------------------------------------

# Hand-worked cases; each expected value was derived on paper from n-gram
# counts under add-one smoothing for zero-match orders n >= 2.
BLEU_CASES = [
    ("a b c d e f g h i j", ["a b c d e f g h i j"], 1.0),
    ("a b c d", ["w x y z"], 0.0),  # zero unigram matches
    # p = (2/4, 1/3, 1/3, 1/2), BP = 1 -> (1/36)^(1/4)
    ("a b x y", ["a b c d"], 36 ** -0.25),
    # all precisions 1 (p4 smoothed 1/1), BP = exp(1 - 5/3)
    ("a b c", ["a b c d e"], math.exp(1 - 5 / 3)),
    # all precisions 1, BP = exp(1 - 6/5)
    ("a b c d e", ["a b c d e f"], math.exp(1 - 6 / 5)),
    # p = (5/6, 3/5, 2/4, 1/3), BP = 1 -> (1/12)^(1/4)
    ("the cat sat on the mat", ["the cat sat on a mat"], 12 ** -0.25),
    # p = (1/4, 1/4, 1/3, 1/2), BP = 1 -> (1/96)^(1/4)
    ("a a a a", ["a b"], 96 ** -0.25),
    # p = (1, 1/2, 1, 1), BP = 1 -> 0.5^(1/4)
    ("b a", ["a b"], 0.5 ** 0.25),
    # p = (4/6, 3/5, 2/4, 1/3), BP = 1 -> (1/15)^(1/4)
    ("a b c d e f", ["a b c d"], 15 ** -0.25),
    # multi-reference: p1 clips against both refs -> (1, 1/2, 1, 1)
    ("a b", ["a x", "y b"], 0.5 ** 0.25),
]


@pytest.mark.parametrize("candidate, references, expected", BLEU_CASES)
def test_bleu_hand_computed(candidate, references, expected):
    assert ev.bleu4(candidate, references) == pytest.approx(expected, rel=1e-12)


def test_bleu_empty_candidate_is_zero():
    assert ev.bleu4("", ["a b"]) == 0.0


def test_bleu_short_candidate_strictly_below_unpenalized():
    cand, ref = "a b c d e", "a b c d e f g"
    with_bp = ev.bleu4(cand, [ref])
    # same modified precisions, no brevity penalty
    unpenalized = with_bp / math.exp(1 - 7 / 5)
    assert with_bp < unpenalized


@settings(max_examples=40, deadline=None)
@given(tokens=st.lists(st.sampled_from("abcdefg"), min_size=1, max_size=12),
       ref_tokens=st.lists(st.sampled_from("abcdefg"), min_size=1, max_size=12),
       seed=st.integers(min_value=0, max_value=999))
def test_bleu_invariant_under_vocab_relabeling(tokens, ref_tokens, seed):
    mapping = dict(zip("abcdefg", random.Random(seed).sample(
        ["kiwi", "lime", "plum", "pear", "fig", "date", "sloe"], 7)))
    plain = ev.bleu4(" ".join(tokens), [" ".join(ref_tokens)])
    relabeled = ev.bleu4(" ".join(mapping[t] for t in tokens),
                         [" ".join(mapping[t] for t in ref_tokens)])
    assert plain == pytest.approx(relabeled, rel=1e-12)


def test_generation_identity(small_corpus):
    preds = ev.perfect_predictions(small_corpus)
    assert ev.eval_generation(preds, small_corpus).metrics["bleu4"] == pytest.approx(1.0)


# -- retrieval -------------------------------------------------------------------


def test_retrieval_identities():
    candidates = {"d": {str(2 * i): {"candidates": [f"c{j}" for j in range(100)],
                                     "gold_index": 0} for i in range(5)}}
    preds = {"d": {str(2 * i): {"ranking": list(range(100))} for i in range(5)}}
    report = ev.eval_retrieval(preds, candidates)
    assert report.metrics["recall@1"] == 1.0
    assert report.metrics["mean_rank"] == 1.0
    assert report.metrics["mrr"] == 1.0


def test_retrieval_rank_seven():
    candidates = {"d": {"0": {"candidates": [f"c{j}" for j in range(100)], "gold_index": 42}}}
    ranking = [i for i in range(100) if i != 42]
    ranking.insert(6, 42)  # gold at rank 7
    report = ev.eval_retrieval({"d": {"0": {"ranking": ranking}}}, candidates)
    assert report.metrics["recall@5"] == 0.0
    assert report.metrics["recall@10"] == 1.0
    assert report.metrics["mrr"] == pytest.approx(1 / 7)
    assert report.metrics["mean_rank"] == 7.0


def test_retrieval_random_ranker_mean_rank():
    """Monte-Carlo oracle: uniform rankings average (pool+1)/2."""
    rng = random.Random(99)
    pool = 100
    candidates, preds = {"d": {}}, {"d": {}}
    for i in range(10_000):
        key = str(2 * i)
        candidates["d"][key] = {"candidates": ["x"] * pool, "gold_index": i % pool}
        ranking = list(range(pool))
        rng.shuffle(ranking)
        preds["d"][key] = {"ranking": ranking}
    report = ev.eval_retrieval(preds, candidates)
    assert abs(report.metrics["mean_rank"] - 50.5) <= 2.0


def test_retrieval_missing_gold_error():
    candidates = {"d": {"0": {"candidates": ["a", "b"], "gold_index": 1}}}
    with pytest.raises(ValidationError, match="absent"):
        ev.eval_retrieval({"d": {"0": {"ranking": [0]}}}, candidates)


def test_build_candidates_contract(small_corpus):
    candidates = ev.build_retrieval_candidates(small_corpus, pool_size=40, seed=5)
    orderings = set()
    for dialog in small_corpus["dialogs"]:
        did = dialog["dialog_id"]
        for t in dialog["turns"]:
            if t["speaker"] != "assistant":
                continue
            spec = candidates[did][str(t["turn_index"] - 1)]
            pool = spec["candidates"]
            assert len(pool) == 40
            assert len(set(pool)) == 40
            assert pool[spec["gold_index"]] == t["utterance"]
            orderings.add(tuple(pool))
    assert len(orderings) > 1  # per-turn candidate sets differ


def test_build_candidates_pool_of_one(small_corpus):
    candidates = ev.build_retrieval_candidates(small_corpus, pool_size=1, seed=5)
    preds = {did: {key: {"ranking": [0]} for key in turns}
             for did, turns in candidates.items()}
    assert ev.eval_retrieval(preds, candidates).metrics["recall@1"] == 1.0


def test_build_candidates_corpus_too_small():
    doc = doc_of([dialog_of("d", [{"objects": ()}])])
    with pytest.raises(ValidationError):
        ev.build_retrieval_candidates(doc, pool_size=50, seed=1)


def test_build_candidates_deterministic(small_corpus):
    a = ev.build_retrieval_candidates(small_corpus, pool_size=20, seed=9)
    b = ev.build_retrieval_candidates(small_corpus, pool_size=20, seed=9)
    c = ev.build_retrieval_candidates(small_corpus, pool_size=20, seed=10)
    assert a == b
    assert a != c
