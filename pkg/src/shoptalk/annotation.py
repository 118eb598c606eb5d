"""Paraphrase-collection service core: task leasing, validation, export.

Tasks move open -> leased -> submitted -> approved (plus a terminal
``flagged`` state for broken flows). Persistence is a single append-only
JSONL journal with a periodic full-state snapshot sidecar; replaying the
journal reconstructs the store. All mutations serialize through one lock, so
no task is ever leased to two workers.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass
from pathlib import Path

from .canonical import dumps
from .catalog import normalize_value
from .errors import NotFoundError, StorageError, ValidationError
from .nlg import phrase_tokens

OPEN, LEASED, SUBMITTED, APPROVED, FLAGGED = "open", "leased", "submitted", "approved", "flagged"

DEFAULT_LEASE_TTL = 30 * 60.0
SNAPSHOT_EVERY = 500


@dataclass
class AnnotationTask:
    task_id: str
    dialog_id: str
    payload: dict
    state: str = OPEN
    lease_worker: str | None = None
    lease_expiry: float | None = None
    paraphrases: list[str] | None = None
    flag_reason: str | None = None

    def public_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "dialog_id": self.dialog_id,
            "state": self.state,
            "lease": (
                {"worker_id": self.lease_worker, "expires_at": self.lease_expiry}
                if self.lease_worker else None
            ),
            **self.payload,
        }


def validate_paraphrases(task_payload: dict, paraphrases: list[str]) -> list[dict]:
    """Entity-retention check; one problem record per failing turn.

    Every slot value of the turn's frame must appear (normalized substring),
    and each visually referenced object needs at least one descriptor token
    of its rendered description.
    """
    turns = task_payload["turns"]
    problems = []
    if len(paraphrases) != len(turns):
        return [{"turn_index": None,
                 "missing": [f"expected {len(turns)} paraphrases, got {len(paraphrases)}"]}]
    for turn, text in zip(turns, paraphrases):
        missing = []
        norm = normalize_value(text)
        if not norm:
            missing.append("non-empty paraphrase")
        for slot, value in turn["frame"]["slot_values"].items():
            if normalize_value(value) not in norm:
                missing.append(str(value))
        for obj_key, phrase in turn.get("object_phrases", {}).items():
            tokens = phrase_tokens(phrase)
            if tokens and not any(tok in norm for tok in tokens):
                missing.append(f"a descriptor of object {obj_key} ({phrase})")
        if missing:
            problems.append({"turn_index": turn["turn_index"], "missing": missing})
    return problems


class TaskStore:
    """In-memory task state behind a journal; safe for concurrent use."""

    def __init__(self, journal_path=None, clock=time.time,
                 lease_ttl: float = DEFAULT_LEASE_TTL, auto_approve: bool = True,
                 snapshot_every: int = SNAPSHOT_EVERY):
        self._lock = threading.Lock()
        self.clock = clock
        self.lease_ttl = lease_ttl
        self.auto_approve = auto_approve
        self.snapshot_every = snapshot_every
        self.tasks: dict[str, AnnotationTask] = {}
        self.order: list[str] = []
        self.snapshots: dict[str, dict] = {}
        self._event_seq = 0
        self.journal_path = Path(journal_path) if journal_path else None
        if self.journal_path:
            self._load()

    # -- persistence -----------------------------------------------------

    def _snapshot_path(self) -> Path:
        return self.journal_path.with_suffix(self.journal_path.suffix + ".state.json")

    def _load(self) -> None:
        start_seq = 0
        snap = self._snapshot_path()
        if snap.exists():
            state = json.loads(snap.read_text(encoding="utf-8"))
            start_seq = state["event_seq"]
            self._event_seq = start_seq
            self.snapshots = state["snapshots"]
            self.order = state["order"]
            self.tasks = {tid: AnnotationTask(**t) for tid, t in state["tasks"].items()}
        if self.journal_path.exists():
            with self.journal_path.open(encoding="utf-8") as fh:
                for lineno, line in enumerate(fh):
                    if lineno < start_seq or not line.strip():
                        continue
                    try:
                        self._apply(json.loads(line))
                    except json.JSONDecodeError as exc:
                        raise StorageError(f"corrupt journal line {lineno}: {exc}")
                    self._event_seq = lineno + 1

    def _log(self, event: dict) -> None:
        self._event_seq += 1
        if self.journal_path:
            with self.journal_path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(event, sort_keys=True, ensure_ascii=False) + "\n")
                fh.flush()
            if self.snapshot_every and self._event_seq % self.snapshot_every == 0:
                self._write_snapshot()

    def _write_snapshot(self) -> None:
        state = {
            "event_seq": self._event_seq,
            "snapshots": self.snapshots,
            "order": self.order,
            "tasks": {tid: vars(t) for tid, t in self.tasks.items()},
        }
        self._snapshot_path().write_text(dumps(state), encoding="utf-8")

    def _apply(self, event: dict) -> None:
        kind = event["event"]
        if kind == "snapshots":
            self.snapshots.update(event["snapshots"])
        elif kind == "enqueue":
            task = AnnotationTask(task_id=event["task_id"], dialog_id=event["dialog_id"],
                                  payload=event["payload"])
            self.tasks[task.task_id] = task
            self.order.append(task.task_id)
        elif kind == "lease":
            task = self.tasks[event["task_id"]]
            task.state = LEASED
            task.lease_worker = event["worker_id"]
            task.lease_expiry = event["expires_at"]
        elif kind == "submit":
            task = self.tasks[event["task_id"]]
            task.state = SUBMITTED
            task.paraphrases = event["paraphrases"]
            task.lease_worker = None
            task.lease_expiry = None
        elif kind == "approve":
            self.tasks[event["task_id"]].state = APPROVED
        elif kind == "flag":
            task = self.tasks[event["task_id"]]
            task.state = FLAGGED
            task.flag_reason = event.get("reason")
            task.lease_worker = None
            task.lease_expiry = None
        else:
            raise StorageError(f"unknown journal event {kind!r}")

    # -- mutations ---------------------------------------------------------

    def enqueue_corpus(self, doc: dict) -> int:
        """One open task per dialog; re-enqueueing known task ids is a no-op."""
        with self._lock:
            new_snapshots = {sid: snap for sid, snap in doc.get("snapshots", {}).items()
                             if sid not in self.snapshots}
            if new_snapshots:
                self._apply({"event": "snapshots", "snapshots": new_snapshots})
                self._log({"event": "snapshots", "snapshots": new_snapshots})
            added = 0
            for dialog in doc["dialogs"]:
                task_id = f"task-{dialog['dialog_id']}"
                if task_id in self.tasks:
                    continue
                payload = {
                    "dialog_id": dialog["dialog_id"],
                    "domain": dialog["domain"],
                    "snapshot_ids": dialog["snapshot_ids"],
                    "viewpoint_switch_turn": dialog.get("viewpoint_switch_turn"),
                    "turns": [
                        {
                            "turn_index": t["turn_index"],
                            "speaker": t["speaker"],
                            "template_utterance": t["template_utterance"],
                            "active_snapshot": t["active_snapshot"],
                            "frame": t["frame"],
                            "object_phrases": t.get("object_phrases", {}),
                        }
                        for t in dialog["turns"]
                    ],
                }
                event = {"event": "enqueue", "task_id": task_id,
                         "dialog_id": dialog["dialog_id"], "payload": payload}
                self._apply(event)
                self._log(event)
                added += 1
            return added

    def _sweep_expired(self) -> None:
        now = self.clock()
        for task in self.tasks.values():
            if task.state == LEASED and task.lease_expiry is not None and task.lease_expiry <= now:
                task.state = OPEN
                task.lease_worker = None
                task.lease_expiry = None

    def next_task(self, worker_id: str) -> AnnotationTask | None:
        """Atomically lease the oldest open task; None when none are open."""
        if not worker_id:
            raise ValidationError("worker_id is required")
        with self._lock:
            self._sweep_expired()
            for task_id in self.order:
                task = self.tasks[task_id]
                if task.state == OPEN:
                    event = {"event": "lease", "task_id": task_id, "worker_id": worker_id,
                             "expires_at": self.clock() + self.lease_ttl}
                    self._apply(event)
                    self._log(event)
                    return task
            return None

    def get_task(self, task_id: str) -> AnnotationTask:
        with self._lock:
            self._sweep_expired()
            if task_id not in self.tasks:
                raise NotFoundError(f"no task {task_id!r}")
            return self.tasks[task_id]

    def submit(self, task_id: str, worker_id: str, paraphrases: list[str]) -> AnnotationTask:
        with self._lock:
            self._sweep_expired()
            if task_id not in self.tasks:
                raise NotFoundError(f"no task {task_id!r}")
            task = self.tasks[task_id]
            if task.state != LEASED:
                raise ValidationError(f"task is {task.state}, not leased",
                                      details=[{"code": "invalid_state"}])
            if task.lease_worker != worker_id:
                raise ValidationError("task is leased by another worker",
                                      details=[{"code": "lease_mismatch"}])
            problems = validate_paraphrases(task.payload, paraphrases)
            if problems:
                raise ValidationError("paraphrases drop required entities", details=problems)
            event = {"event": "submit", "task_id": task_id, "worker_id": worker_id,
                     "paraphrases": list(paraphrases), "at": self.clock()}
            self._apply(event)
            self._log(event)
            if self.auto_approve:
                self._apply({"event": "approve", "task_id": task_id})
                self._log({"event": "approve", "task_id": task_id})
            return task

    def approve(self, task_id: str) -> None:
        with self._lock:
            task = self.tasks.get(task_id)
            if task is None:
                raise NotFoundError(f"no task {task_id!r}")
            if task.state != SUBMITTED:
                raise ValidationError(f"task is {task.state}, not submitted")
            self._apply({"event": "approve", "task_id": task_id})
            self._log({"event": "approve", "task_id": task_id})

    def flag(self, task_id: str, worker_id: str, reason: str) -> None:
        with self._lock:
            self._sweep_expired()
            task = self.tasks.get(task_id)
            if task is None:
                raise NotFoundError(f"no task {task_id!r}")
            if task.state != LEASED or task.lease_worker != worker_id:
                raise ValidationError("only the leasing worker may flag a task")
            event = {"event": "flag", "task_id": task_id, "worker_id": worker_id,
                     "reason": reason}
            self._apply(event)
            self._log(event)

    # -- queries -----------------------------------------------------------

    def progress(self) -> dict:
        with self._lock:
            self._sweep_expired()
            counts = {s: 0 for s in (OPEN, LEASED, SUBMITTED, APPROVED, FLAGGED)}
            for task in self.tasks.values():
                counts[task.state] += 1
            counts["total"] = len(self.tasks)
            return counts

    def overlay(self, snapshot_id: str) -> dict:
        with self._lock:
            snap = self.snapshots.get(snapshot_id)
            if snap is None:
                raise NotFoundError(f"no snapshot {snapshot_id!r}")
            return {
                "snapshot_id": snapshot_id,
                "image_size": snap["camera"]["image_size"],
                "boxes": [
                    {
                        "local_index": o["local_index"],
                        "bbox": o["bbox"],
                        "item_id": o["item_id"],
                        "visibility": o["visibility"],
                    }
                    for o in snap["objects"]
                ],
            }


def export_paraphrased(doc: dict, store: TaskStore) -> dict:
    """Corpus with submitted/approved paraphrases substituted for utterances.

    Frames, ids, and snapshots are untouched; template_utterance is retained.
    """
    out = json.loads(json.dumps(doc))
    for dialog in out["dialogs"]:
        task = store.tasks.get(f"task-{dialog['dialog_id']}")
        if task is None or task.state not in (SUBMITTED, APPROVED) or not task.paraphrases:
            for turn in dialog["turns"]:
                turn["utterance"] = turn["template_utterance"]
            continue
        for turn, text in zip(dialog["turns"], task.paraphrases):
            turn["utterance"] = text
    return out
