"""Dialog ontology: acts, activities, slots, belief frames, turns, dialogs.

The inventories (4 acts x 5 activities, per-domain slot vocabularies, and the
intent whitelist per speaker) are data, loaded from ``data/ontology.json``.
All types are immutable value objects; validation is pure and returns
violations as data rather than raising.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .canonical import dumps
from .errors import ValidationError
from .resources import load_bundled_json

USER, ASSISTANT = "user", "assistant"


def _config() -> dict:
    return load_bundled_json("ontology.json")


def acts() -> tuple[str, ...]:
    return tuple(_config()["acts"])


def activities() -> tuple[str, ...]:
    return tuple(_config()["activities"])


def slot_vocabulary(domain: str) -> dict[str, str]:
    """Slot name -> backing catalog field for ``domain``."""
    vocab = _config()["slot_vocabulary"].get(domain)
    if vocab is None:
        raise ValidationError(f"no slot vocabulary for domain {domain!r}")
    return dict(vocab)


def allowed_intents(speaker: str) -> frozenset[str]:
    return frozenset(_config()["allowed_intents"][speaker])


@dataclass(frozen=True)
class BeliefFrame:
    act: str
    activity: str
    request_slots: tuple[str, ...] = ()
    slot_values: dict = field(default_factory=dict)
    objects: tuple[int, ...] = ()
    disambiguation_label: bool | None = None  # user turns only

    @property
    def intent(self) -> str:
        return f"{self.act}:{self.activity}"

    def to_dict(self) -> dict:
        doc = {
            "act": self.act,
            "activity": self.activity,
            "request_slots": sorted(self.request_slots),
            "slot_values": dict(self.slot_values),
            "objects": list(self.objects),
        }
        if self.disambiguation_label is not None:
            doc["disambiguation_label"] = self.disambiguation_label
        return doc

    @staticmethod
    def from_dict(doc: dict) -> "BeliefFrame":
        return BeliefFrame(
            act=doc["act"],
            activity=doc["activity"],
            request_slots=tuple(doc.get("request_slots", ())),
            slot_values=dict(doc.get("slot_values", {})),
            objects=tuple(int(o) for o in doc.get("objects", ())),
            disambiguation_label=doc.get("disambiguation_label"),
        )


@dataclass(frozen=True)
class Turn:
    turn_index: int
    speaker: str
    utterance: str
    template_utterance: str
    frame: BeliefFrame
    active_snapshot: str
    # Rendered visual description per referenced object (fresh scene mentions
    # only); drives the paraphrase entity-retention check.
    object_phrases: dict = field(default_factory=dict)
    coref_source: str | None = None  # "scene" | "dialog" for user object mentions

    def to_dict(self) -> dict:
        doc = {
            "turn_index": self.turn_index,
            "speaker": self.speaker,
            "utterance": self.utterance,
            "template_utterance": self.template_utterance,
            "active_snapshot": self.active_snapshot,
            "frame": self.frame.to_dict(),
        }
        if self.object_phrases:
            doc["object_phrases"] = {str(k): v for k, v in self.object_phrases.items()}
        if self.coref_source is not None:
            doc["coref_source"] = self.coref_source
        return doc

    @staticmethod
    def from_dict(doc: dict) -> "Turn":
        return Turn(
            turn_index=int(doc["turn_index"]),
            speaker=doc["speaker"],
            utterance=doc["utterance"],
            template_utterance=doc["template_utterance"],
            frame=BeliefFrame.from_dict(doc["frame"]),
            active_snapshot=doc["active_snapshot"],
            object_phrases={int(k): v for k, v in doc.get("object_phrases", {}).items()},
            coref_source=doc.get("coref_source"),
        )


@dataclass
class Dialog:
    dialog_id: str
    domain: str
    snapshot_ids: list[str]
    turns: list[Turn]
    agenda: list[str]
    viewpoint_switch_turn: int | None = None

    def to_dict(self) -> dict:
        return {
            "dialog_id": self.dialog_id,
            "domain": self.domain,
            "snapshot_ids": list(self.snapshot_ids),
            "viewpoint_switch_turn": self.viewpoint_switch_turn,
            "agenda": list(self.agenda),
            "turns": [t.to_dict() for t in self.turns],
        }

    @staticmethod
    def from_dict(doc: dict) -> "Dialog":
        return Dialog(
            dialog_id=doc["dialog_id"],
            domain=doc["domain"],
            snapshot_ids=list(doc["snapshot_ids"]),
            viewpoint_switch_turn=doc.get("viewpoint_switch_turn"),
            agenda=list(doc.get("agenda", [])),
            turns=[Turn.from_dict(t) for t in doc["turns"]],
        )


def _snapshot_size(snapshot) -> int:
    objects = snapshot["objects"] if isinstance(snapshot, dict) else snapshot.objects
    return len(objects)


def validate_frame(frame: BeliefFrame, snapshot, domain: str, speaker: str = USER) -> list[str]:
    """Check one frame against a snapshot; violations come back as strings."""
    out = []
    if frame.act not in acts():
        out.append(f"unknown act {frame.act}")
    if frame.activity not in activities():
        out.append(f"unknown activity {frame.activity}")
    if not out and frame.intent not in allowed_intents(speaker):
        out.append(f"illegal {speaker} intent {frame.intent}")
    vocab = slot_vocabulary(domain)
    for slot in list(frame.request_slots) + list(frame.slot_values):
        if slot not in vocab:
            out.append(f"unknown slot {slot}")
    n = _snapshot_size(snapshot)
    for obj in frame.objects:
        if not 0 <= obj < n:
            out.append(f"unresolvable object {obj}")
    if speaker == USER and frame.disambiguation_label is None:
        out.append("user frame missing disambiguation_label")
    if speaker == ASSISTANT and frame.disambiguation_label is not None:
        out.append("assistant frame carries disambiguation_label")
    return out


def validate_dialog(dialog: Dialog, snapshots: dict) -> list[str]:
    """Full structural check: alternation, snapshot wiring, per-frame validity."""
    out = []
    if len(dialog.turns) < 2:
        out.append("dialog has fewer than 2 turns")
    if not 1 <= len(dialog.snapshot_ids) <= 2:
        out.append(f"dialog has {len(dialog.snapshot_ids)} snapshots; expected 1 or 2")
    if len(dialog.snapshot_ids) == 2 and dialog.viewpoint_switch_turn is None:
        out.append("two-snapshot dialog missing viewpoint_switch_turn")
    for i, turn in enumerate(dialog.turns):
        expected = USER if i % 2 == 0 else ASSISTANT
        where = f"turn {i}"
        if turn.turn_index != i:
            out.append(f"{where}: turn_index {turn.turn_index} != position")
        if turn.speaker != expected:
            out.append(f"{where}: speaker {turn.speaker}; expected {expected}")
        if turn.active_snapshot not in dialog.snapshot_ids:
            out.append(f"{where}: active snapshot {turn.active_snapshot} not in dialog")
            continue
        snapshot = snapshots.get(turn.active_snapshot)
        if snapshot is None:
            out.append(f"{where}: snapshot {turn.active_snapshot} unavailable")
            continue
        for v in validate_frame(turn.frame, snapshot, dialog.domain, turn.speaker):
            out.append(f"{where}: {v}")
    if dialog.viewpoint_switch_turn is not None:
        sw = dialog.viewpoint_switch_turn
        if not 0 < sw < len(dialog.turns):
            out.append(f"viewpoint_switch_turn {sw} out of range")
        else:
            for i, turn in enumerate(dialog.turns):
                want = dialog.snapshot_ids[0] if i < sw else dialog.snapshot_ids[1]
                if turn.active_snapshot != want:
                    out.append(f"turn {i}: active snapshot does not follow viewpoint switch")
                    break
    return out


def canonical_serialize(dialog: Dialog, snapshots: dict | None = None) -> str:
    """Canonical JSON for one dialog; rejects structurally invalid input."""
    if len(dialog.turns) < 2:
        raise ValidationError("dialog must have at least 2 turns")
    if snapshots is not None:
        violations = validate_dialog(dialog, snapshots)
        if violations:
            raise ValidationError("dialog does not validate", details=violations)
    return dumps(dialog.to_dict())
