"""Benchmark evaluators: disambiguation, coreference, state tracking, generation.

All evaluators take the gold corpus document plus a predictions mapping
``{dialog_id: {str(user_turn_index): payload}}`` and return a MetricReport.
Tasks are keyed by the *user* turn index (even numbers); response generation
and retrieval score the assistant reply that follows the keyed user turn.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

from .catalog import normalize_value
from .corpus import tokenize
from .errors import ValidationError
from .seeding import derive_rng

REQUEST_DISAMBIGUATE = "REQUEST:DISAMBIGUATE"


@dataclass
class MetricReport:
    task: str
    metrics: dict = field(default_factory=dict)
    support: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"task": self.task, "metrics": self.metrics, "support": self.support}

    def format_table(self) -> str:
        lines = [f"task: {self.task}"]
        width = max((len(k) for k in self.metrics), default=4)
        for key in sorted(self.metrics):
            lines.append(f"  {key:<{width}}  {self.metrics[key]:.4f}")
        for key in sorted(self.support):
            lines.append(f"  {key:<{width}}  {self.support[key]}")
        return "\n".join(lines)


def _prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def iter_user_turns(doc: dict):
    for dialog in doc["dialogs"]:
        for turn in dialog["turns"]:
            if turn["speaker"] == "user":
                yield dialog, turn


def _pred_for(preds: dict, dialog_id: str, turn_index: int):
    by_turn = preds.get(dialog_id, {})
    return by_turn.get(str(turn_index), by_turn.get(turn_index))


def gold_response(dialog: dict, user_turn_index: int) -> str | None:
    nxt = user_turn_index + 1
    if nxt < len(dialog["turns"]):
        return dialog["turns"][nxt]["utterance"]
    return None


def excluded_from_coref(dialog: dict, user_turn_index: int) -> bool:
    """True when the following assistant frame asks for disambiguation."""
    nxt = user_turn_index + 1
    if nxt >= len(dialog["turns"]):
        return False
    frame = dialog["turns"][nxt]["frame"]
    return f"{frame['act']}:{frame['activity']}" == REQUEST_DISAMBIGUATE


# -- task 1: multimodal disambiguation --------------------------------------


def eval_disambiguation(preds: dict, doc: dict) -> MetricReport:
    correct, total, missing = 0, 0, []
    for dialog, turn in iter_user_turns(doc):
        payload = _pred_for(preds, dialog["dialog_id"], turn["turn_index"])
        label = None if payload is None else payload.get("disambiguation")
        if label is None:
            missing.append((dialog["dialog_id"], turn["turn_index"]))
            continue
        total += 1
        if bool(label) == bool(turn["frame"]["disambiguation_label"]):
            correct += 1
    if missing:
        raise ValidationError(
            f"{len(missing)} user turns lack a disambiguation prediction",
            details=missing[:20],
        )
    return MetricReport(
        task="disambiguation",
        metrics={"accuracy": correct / total if total else 0.0},
        support={"turns": total},
    )


# -- task 2: multimodal coreference ------------------------------------------


def eval_coref(preds: dict, doc: dict) -> MetricReport:
    tp = fp = fn = 0
    turns = excluded = 0
    for dialog, turn in iter_user_turns(doc):
        if excluded_from_coref(dialog, turn["turn_index"]):
            excluded += 1
            continue
        turns += 1
        payload = _pred_for(preds, dialog["dialog_id"], turn["turn_index"]) or {}
        pred = {int(o) for o in payload.get("objects", [])}
        gold = {int(o) for o in turn["frame"]["objects"]}
        tp += len(pred & gold)
        fp += len(pred - gold)
        fn += len(gold - pred)
    precision, recall, f1 = _prf(tp, fp, fn)
    return MetricReport(
        task="coref",
        metrics={"precision": precision, "recall": recall, "f1": f1},
        support={"turns": turns, "excluded_turns": excluded,
                 "tp": tp, "fp": fp, "fn": fn},
    )


# -- task 3: dialog state tracking -------------------------------------------


def _norm_slot_pairs(slot_values: dict) -> frozenset:
    return frozenset((s, normalize_value(v)) for s, v in slot_values.items())


def eval_dst(preds: dict, doc: dict, frame_mode: str = "cumulative") -> MetricReport:
    if frame_mode not in ("cumulative", "delta"):
        raise ValidationError(f"unknown frame mode {frame_mode!r}")
    intent_correct = 0
    slot_tp = slot_fp = slot_fn = 0
    obj_tp = obj_fp = obj_fn = 0
    joint = 0
    total = 0
    for dialog in doc["dialogs"]:
        gold_state: dict = {}
        pred_state: dict = {}
        for turn in dialog["turns"]:
            if turn["speaker"] != "user":
                continue
            total += 1
            frame = turn["frame"]
            payload = _pred_for(preds, dialog["dialog_id"], turn["turn_index"]) or {}
            pred_frame = payload.get("frame", {})

            gold_intent = f"{frame['act']}:{frame['activity']}"
            pred_intent = (f"{pred_frame.get('act')}:{pred_frame.get('activity')}"
                           if pred_frame else None)
            intent_ok = pred_intent == gold_intent

            if frame_mode == "cumulative":
                gold_state.update(frame["slot_values"])
                if pred_frame:
                    pred_state.update(pred_frame.get("slot_values", {}))
                gold_slots = _norm_slot_pairs(gold_state)
                pred_slots = _norm_slot_pairs(pred_state)
            else:
                gold_slots = _norm_slot_pairs(frame["slot_values"])
                pred_slots = _norm_slot_pairs(pred_frame.get("slot_values", {}))

            gold_objects = {int(o) for o in frame["objects"]}
            pred_objects = {int(o) for o in payload.get("objects", [])}

            intent_correct += intent_ok
            slot_tp += len(gold_slots & pred_slots)
            slot_fp += len(pred_slots - gold_slots)
            slot_fn += len(gold_slots - pred_slots)
            obj_tp += len(gold_objects & pred_objects)
            obj_fp += len(pred_objects - gold_objects)
            obj_fn += len(gold_objects - pred_objects)
            if intent_ok and gold_slots == pred_slots and gold_objects == pred_objects:
                joint += 1

    intent_acc = intent_correct / total if total else 0.0
    slot_p, slot_r, slot_f1 = _prf(slot_tp, slot_fp, slot_fn)
    obj_p, obj_r, obj_f1 = _prf(obj_tp, obj_fp, obj_fn)
    return MetricReport(
        task=f"dst.{frame_mode}",
        metrics={
            # one gold and one predicted label per turn, so micro P = R = F1
            "intent_f1": intent_acc,
            "intent_accuracy": intent_acc,
            "slot_precision": slot_p, "slot_recall": slot_r, "slot_f1": slot_f1,
            "object_precision": obj_p, "object_recall": obj_r, "object_f1": obj_f1,
            "joint_accuracy": joint / total if total else 0.0,
        },
        support={"turns": total},
    )


# -- task 4a: response generation (BLEU-4) ------------------------------------


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu4(candidate: str, references: list[str]) -> float:
    """Sentence BLEU-4, add-one smoothing on zero matches for n >= 2.

    Brevity penalty is exp(min(0, 1 - r/c)) with r the closest reference
    length. An empty candidate scores 0 by definition.
    """
    cand = tokenize(candidate)
    refs = [tokenize(r) for r in references if r]
    if not cand or not refs:
        return 0.0
    log_sum = 0.0
    for n in range(1, 5):
        counts = _ngrams(cand, n)
        total = sum(counts.values())
        if total == 0:
            matches, total = 1, 1  # candidate shorter than n: smoothed to 1
        else:
            max_counts: Counter = Counter()
            for ref in refs:
                ref_counts = _ngrams(ref, n)
                for gram in counts:
                    max_counts[gram] = max(max_counts[gram], ref_counts[gram])
            matches = sum(min(c, max_counts[g]) for g, c in counts.items())
            if matches == 0:
                if n == 1:
                    return 0.0
                matches, total = 1, total + 1
        log_sum += math.log(matches / total) / 4.0
    c = len(cand)
    r = min((len(ref) for ref in refs), key=lambda L: (abs(L - c), L))
    brevity = math.exp(min(0.0, 1.0 - r / c))
    return brevity * math.exp(log_sum)


def eval_generation(preds: dict, doc: dict) -> MetricReport:
    scores = []
    for dialog, turn in iter_user_turns(doc):
        reference = gold_response(dialog, turn["turn_index"])
        if reference is None:
            continue
        payload = _pred_for(preds, dialog["dialog_id"], turn["turn_index"]) or {}
        scores.append(bleu4(payload.get("response", ""), [reference]))
    if not scores:
        raise ValidationError("no assistant responses to score")
    return MetricReport(
        task="generation",
        metrics={"bleu4": sum(scores) / len(scores)},
        support={"responses": len(scores)},
    )


# -- task 4b: response retrieval ----------------------------------------------


def build_retrieval_candidates(doc: dict, pool_size: int = 100, seed: int = 0) -> dict:
    """Per assistant response: pool_size-1 distinct distractors plus the gold.

    Distractors come from other dialogs' assistant utterances; each turn gets
    its own shuffled candidate list, deterministic under the seed.
    """
    responses: dict[str, list[tuple[int, str]]] = {}
    for dialog in doc["dialogs"]:
        for turn in dialog["turns"]:
            if turn["speaker"] == "assistant":
                responses.setdefault(dialog["dialog_id"], []).append(
                    (turn["turn_index"] - 1, turn["utterance"]))
    total_responses = sum(len(v) for v in responses.values())
    if pool_size > total_responses:
        raise ValidationError(
            f"pool_size {pool_size} exceeds assistant utterance count {total_responses}")

    texts_by_dialog = {did: {t for _, t in turns} for did, turns in responses.items()}
    out: dict = {}
    for did, turns in responses.items():
        other_texts = sorted(set().union(
            *(texts for odid, texts in texts_by_dialog.items() if odid != did)) or set())
        for user_idx, gold in turns:
            distractors = [t for t in other_texts if t != gold]
            if len(distractors) < pool_size - 1:
                raise ValidationError(
                    f"corpus too small: need {pool_size - 1} distinct distractors, "
                    f"have {len(distractors)}")
            rng = derive_rng(seed, "candidates", did, user_idx)
            chosen = rng.sample(distractors, pool_size - 1)
            candidates = chosen + [gold]
            rng.shuffle(candidates)
            out.setdefault(did, {})[str(user_idx)] = {
                "candidates": candidates,
                "gold_index": candidates.index(gold),
            }
    return out


def eval_retrieval(preds: dict, candidates: dict) -> MetricReport:
    ranks = []
    for did, turns in candidates.items():
        for turn_key, spec in turns.items():
            payload = _pred_for(preds, did, turn_key)
            ranking = None if payload is None else payload.get("ranking")
            if ranking is None:
                raise ValidationError(f"missing ranking for {did} turn {turn_key}")
            try:
                ranks.append(list(ranking).index(spec["gold_index"]) + 1)
            except ValueError:
                raise ValidationError(
                    f"gold candidate absent from ranking for {did} turn {turn_key}")
    if not ranks:
        raise ValidationError("no retrieval turns to score")
    n = len(ranks)
    metrics = {f"recall@{k}": sum(r <= k for r in ranks) / n for k in (1, 5, 10)}
    metrics["mean_rank"] = sum(ranks) / n
    metrics["mrr"] = sum(1.0 / r for r in ranks) / n
    return MetricReport(task="retrieval", metrics=metrics, support={"turns": n})


# -- gold-derived predictions --------------------------------------------------


def perfect_predictions(doc: dict, candidates: dict | None = None) -> dict:
    """Predictions read off the gold corpus; every evaluator scores 1.0."""
    preds: dict = {}
    for dialog, turn in iter_user_turns(doc):
        frame = turn["frame"]
        payload = {
            "disambiguation": bool(frame["disambiguation_label"]),
            "objects": list(frame["objects"]),
            "frame": {
                "act": frame["act"],
                "activity": frame["activity"],
                "slot_values": dict(frame["slot_values"]),
                "request_slots": list(frame["request_slots"]),
            },
        }
        response = gold_response(dialog, turn["turn_index"])
        if response is not None:
            payload["response"] = response
        preds.setdefault(dialog["dialog_id"], {})[str(turn["turn_index"])] = payload
    if candidates:
        for did, turns in candidates.items():
            for turn_key, spec in turns.items():
                gold = spec["gold_index"]
                ranking = [gold] + [i for i in range(len(spec["candidates"])) if i != gold]
                preds.setdefault(did, {}).setdefault(turn_key, {})["ranking"] = ranking
    return preds
