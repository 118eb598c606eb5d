import json

import pytest

from shoptalk.errors import ValidationError
from shoptalk.ontology import (
    BeliefFrame,
    Dialog,
    Turn,
    activities,
    acts,
    canonical_serialize,
    validate_dialog,
    validate_frame,
)


def snapshot_stub(n_objects=12):
    return {"objects": [{"local_index": i} for i in range(n_objects)]}


def frame(**kw):
    base = dict(act="REQUEST", activity="GET", disambiguation_label=False)
    base.update(kw)
    return BeliefFrame(**base)


def test_inventories_are_closed():
    assert acts() == ("INFORM", "CONFIRM", "REQUEST", "ASK")
    assert activities() == ("GET", "DISAMBIGUATE", "REFINE", "ADD_TO_CART", "COMPARE")


def test_valid_frame_passes():
    assert validate_frame(frame(objects=(8,)), snapshot_stub(12), "fashion", "user") == []


def test_unresolvable_object_id():
    out = validate_frame(frame(objects=(99,)), snapshot_stub(12), "fashion", "user")
    assert any("unresolvable object 99" in v for v in out)


def test_unknown_slot_flavor():
    out = validate_frame(frame(slot_values={"flavor": "x"}), snapshot_stub(), "fashion", "user")
    assert any("unknown slot flavor" in v for v in out)


def test_illegal_intent_for_speaker():
    bad = BeliefFrame(act="CONFIRM", activity="ADD_TO_CART", disambiguation_label=False)
    out = validate_frame(bad, snapshot_stub(), "fashion", "user")
    assert any("illegal user intent" in v for v in out)
    ok = BeliefFrame(act="CONFIRM", activity="ADD_TO_CART")
    assert validate_frame(ok, snapshot_stub(), "fashion", "assistant") == []


def test_disambiguation_label_speaker_rule():
    missing = BeliefFrame(act="REQUEST", activity="GET")
    assert any("missing disambiguation_label" in v
               for v in validate_frame(missing, snapshot_stub(), "fashion", "user"))
    extra = BeliefFrame(act="INFORM", activity="GET", disambiguation_label=False)
    assert any("carries disambiguation_label" in v
               for v in validate_frame(extra, snapshot_stub(), "fashion", "assistant"))


def _dialog(turns):
    return Dialog(dialog_id="d0", domain="fashion", snapshot_ids=["snap"],
                  turns=turns, agenda=["BROWSE"])


def _turn(i, speaker, f):
    return Turn(turn_index=i, speaker=speaker, utterance="hi", template_utterance="hi",
                frame=f, active_snapshot="snap")


def test_validate_dialog_alternation():
    turns = [
        _turn(0, "user", frame()),
        _turn(1, "user", frame()),
    ]
    out = validate_dialog(_dialog(turns), {"snap": snapshot_stub()})
    assert any("expected assistant" in v for v in out)


def test_canonical_serialize_round_trip():
    dialog = _dialog([
        _turn(0, "user", frame(slot_values={"type": "shirt", "color": "red"})),
        _turn(1, "assistant", BeliefFrame(act="INFORM", activity="GET", objects=(1,))),
    ])
    text = canonical_serialize(dialog, {"snap": snapshot_stub()})
    reparsed = Dialog.from_dict(json.loads(text))
    assert canonical_serialize(reparsed) == text


def test_canonical_serialize_insertion_order_invariant():
    a = _dialog([_turn(0, "user", frame(slot_values={"type": "shirt", "color": "red"})),
                 _turn(1, "assistant", BeliefFrame(act="INFORM", activity="GET"))])
    b = _dialog([_turn(0, "user", frame(slot_values={"color": "red", "type": "shirt"})),
                 _turn(1, "assistant", BeliefFrame(act="INFORM", activity="GET"))])
    assert canonical_serialize(a) == canonical_serialize(b)


def test_canonical_serialize_rejects_empty_dialog():
    with pytest.raises(ValidationError):
        canonical_serialize(_dialog([]))
