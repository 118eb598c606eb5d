"""Agenda-based multimodal dialog self-play.

Three cooperating pieces: a goal generator samples an agenda from a goal
grammar; a user simulator turns the current goal into a belief frame (drawing
act/activity/slot patterns from per-goal probability tables, and object
references from the visible scene or the dialog mention history); an
assistant simulator answers through a simulated catalog/scene API. Template
NLG renders both sides. Everything is a pure function of (snapshots, catalog,
config, rng seed).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .catalog import Catalog, item_matches, slot_value
from .errors import ConfigError, GenerationError
from .nlg import (
    SnapshotContext,
    answer_phrase,
    object_phrase,
    parse_templates,
    realize,
)
from .ontology import ASSISTANT, USER, BeliefFrame, Dialog, Turn, slot_vocabulary
from .resources import load_bundled_json, load_bundled_text
from .scenegen import SceneSnapshot

GOAL_KINDS = ("BROWSE", "GET_INFO", "REFINE", "ADD_TO_CART", "COMPARE",
              "DISAMBIGUATION_PROBE")

SWITCH_PREFIXES = (
    "Let me take a look from over here.",
    "I moved to the other side of the store.",
    "Looking from this angle now.",
)


@dataclass(frozen=True)
class Goal:
    kind: str
    params: dict = field(default_factory=dict)


@dataclass
class SimConfig:
    raw: dict

    def __post_init__(self):
        validate_sim_config(self.raw)

    @property
    def max_turns(self) -> int:
        return self.raw["max_turns"]

    @property
    def max_goals(self) -> int:
        return self.raw["max_goals"]

    @property
    def ambiguity_rate(self) -> float:
        return self.raw["ambiguity_injection_rate"]

    @property
    def two_snapshot_fraction(self) -> float:
        return self.raw["two_snapshot_fraction"]

    @property
    def min_shared_objects(self) -> int:
        return self.raw.get("min_shared_objects", 3)

    @property
    def recommend_max(self) -> int:
        return self.raw.get("recommend_max", 3)

    @property
    def grammar(self) -> dict:
        return self.raw["goal_grammar"]

    @property
    def user_tables(self) -> dict:
        return self.raw["user_tables"]

    @property
    def coref_sources(self) -> dict:
        return self.raw["coref_source_distribution"]


def default_sim_config() -> SimConfig:
    return SimConfig(load_bundled_json("simulator_config.json"))


def default_templates() -> dict:
    return parse_templates(load_bundled_text("templates.txt"))


def _check_dist(name: str, weights: list[float]) -> None:
    if weights and abs(sum(weights) - 1.0) > 1e-9:
        raise ConfigError(f"distribution {name} sums to {sum(weights)}, not 1")


def validate_sim_config(raw: dict) -> None:
    if raw.get("max_turns", 0) < 2 or raw["max_turns"] % 2:
        raise ConfigError("max_turns must be an even integer >= 2")
    for key in ("ambiguity_injection_rate", "two_snapshot_fraction"):
        if not 0.0 <= raw[key] <= 1.0:
            raise ConfigError(f"{key} must be in [0, 1]")
    grammar = raw["goal_grammar"]
    _check_dist("goal length", list(grammar["length_distribution"].values()))
    _check_dist("first goal", list(grammar["first"].values()))
    for kind, nxt in grammar["transitions"].items():
        _check_dist(f"transitions[{kind}]", list(nxt.values()))
    _check_dist("coref sources", list(raw["coref_source_distribution"].values()))
    for kind, table in raw["user_tables"].items():
        if kind not in GOAL_KINDS:
            raise ConfigError(f"unknown goal kind {kind!r} in user_tables")
        for phase in ("init", "followup"):
            entries = table.get(phase, [])
            for domain in ("fashion", "furniture"):
                weights = [e["weight"] for e in entries if domain in e.get("domains", (domain,))]
                _check_dist(f"user_tables[{kind}][{phase}][{domain}]", weights)
            vocab_all = set(slot_vocabulary("fashion")) | set(slot_vocabulary("furniture"))
            for e in entries:
                for slot in list(e.get("slots", [])) + list(e.get("request_slots", [])):
                    if slot not in vocab_all:
                        raise ConfigError(f"unknown slot {slot!r} in user_tables[{kind}]")


def _weighted_key(rng: random.Random, dist: dict) -> str:
    keys = sorted(dist)
    total = sum(dist[k] for k in keys)
    r = rng.random() * total
    acc = 0.0
    for k in keys:
        acc += dist[k]
        if r <= acc:
            return k
    return keys[-1]


def _weighted_entry(rng: random.Random, entries: list[dict], domain: str) -> dict:
    usable = [e for e in entries if domain in e.get("domains", (domain,))]
    if not usable:
        raise ConfigError(f"no table entries usable for domain {domain}")
    total = sum(e["weight"] for e in usable)
    r = rng.random() * total
    acc = 0.0
    for e in usable:
        acc += e["weight"]
        if r <= acc:
            return e
    return usable[-1]


def _goal_satisfiable(goal: Goal, ctx: SnapshotContext) -> bool:
    n = ctx.object_count()
    if goal.kind == "COMPARE":
        return n >= 2
    if goal.kind == "DISAMBIGUATION_PROBE":
        return any(len(ctx.same_category(i)) >= 2 for i in range(n))
    return n >= 1


def generate_agenda(config: SimConfig, snapshot: SceneSnapshot, catalog: Catalog,
                    rng: random.Random) -> list[Goal]:
    """Sample a satisfiable goal sequence from the grammar."""
    ctx = SnapshotContext(snapshot, catalog)
    grammar = config.grammar
    resamples = config.raw.get("max_agenda_resamples", 20)
    for _ in range(resamples):
        length = min(int(_weighted_key(rng, grammar["length_distribution"])), config.max_goals)
        kinds = [_weighted_key(rng, grammar["first"])]
        while len(kinds) < length:
            kinds.append(_weighted_key(rng, grammar["transitions"][kinds[-1]]))
        if rng.random() < grammar.get("disambiguation_probe_rate", 0.0):
            kinds[rng.randrange(len(kinds))] = "DISAMBIGUATION_PROBE"
        agenda = [Goal(kind=k) for k in kinds]
        if all(_goal_satisfiable(g, ctx) for g in agenda):
            return agenda
    raise GenerationError(f"no satisfiable agenda after {resamples} resamples")


@dataclass
class APIResult:
    kind: str  # search | info | compare | cart
    objects: list[int]
    data: dict = field(default_factory=dict)


def execute_api(frame: BeliefFrame, snapshot: SceneSnapshot, catalog: Catalog) -> APIResult:
    """Simulated assistant API over the visible scene and the catalog."""
    ctx = snapshot if isinstance(snapshot, SnapshotContext) else SnapshotContext(snapshot, catalog)
    fields = slot_vocabulary(catalog.domain)
    if frame.activity in ("GET", "REFINE") and not frame.objects:
        ranked = sorted(
            (i for i in range(ctx.object_count())
             if item_matches(ctx.items[i], frame.slot_values, fields)),
            key=lambda i: (-ctx.snapshot.objects[i].visibility, i),
        )
        return APIResult(kind="search", objects=ranked)
    if frame.activity == "GET":
        slots = frame.request_slots or ("price",)
        data = {str(i): {s: slot_value(ctx.items[i], s, fields) for s in slots}
                for i in frame.objects}
        return APIResult(kind="info", objects=list(frame.objects), data=data)
    if frame.activity == "COMPARE":
        slots = frame.request_slots or ("price",)
        data = {str(i): {s: slot_value(ctx.items[i], s, fields) for s in slots}
                for i in frame.objects}
        return APIResult(kind="compare", objects=list(frame.objects), data=data)
    if frame.activity == "ADD_TO_CART":
        return APIResult(kind="cart", objects=list(frame.objects))
    raise GenerationError(f"API cannot serve activity {frame.activity}")


@dataclass
class _UserPlan:
    frame: BeliefFrame
    phrases: dict
    coref_source: str | None
    ambiguous: bool = False
    candidates: list[int] = field(default_factory=list)


class _SelfPlay:
    """One dialog's mutable self-play state."""

    def __init__(self, snapshots, catalog, config, templates, rng, dialog_id):
        self.ctxs = [SnapshotContext(s, catalog) for s in snapshots]
        self.active = 0
        self.catalog = catalog
        self.config = config
        self.templates = templates
        self.rng = rng
        self.dialog_id = dialog_id
        self.turns: list[Turn] = []
        self.mentioned: dict[str, int] = {}  # slot_id -> last utterance index
        self.cart: set[str] = set()
        self.constraints: dict[str, str] = {}
        self.last_result: list[int] = []
        self.focus: list[int] = []
        self.switch_turn: int | None = None
        self.pending_prefix = ""

    # -- helpers -------------------------------------------------------

    @property
    def ctx(self) -> SnapshotContext:
        return self.ctxs[self.active]

    def budget(self) -> int:
        return self.config.max_turns - len(self.turns)

    def history_candidates(self) -> list[int]:
        """Previously mentioned objects still visible in the active view."""
        pairs = [(last, self.ctx.slot_to_index[sid])
                 for sid, last in self.mentioned.items()
                 if sid in self.ctx.slot_to_index]
        pairs.sort(key=lambda p: (-p[0], p[1]))
        return [idx for _, idx in pairs]

    def switch_view(self) -> None:
        self.active = 1
        self.switch_turn = len(self.turns)
        self.pending_prefix = SWITCH_PREFIXES[self.rng.randrange(len(SWITCH_PREFIXES))] + " "
        self.focus = []
        self.last_result = []

    def _emit(self, speaker: str, frame: BeliefFrame, phrases: dict,
              coref_source: str | None = None, compare_phrase: str = "") -> None:
        prefix = ""
        if speaker == USER and self.pending_prefix:
            prefix, self.pending_prefix = self.pending_prefix, ""
        text = realize(frame, self.ctx, self.templates, self.rng,
                       object_phrases=phrases, domain=self.catalog.domain,
                       compare_phrase=compare_phrase, prefix=prefix)
        turn = Turn(
            turn_index=len(self.turns),
            speaker=speaker,
            utterance=text,
            template_utterance=text,
            frame=frame,
            active_snapshot=self.ctx.snapshot_id,
            object_phrases=dict(phrases),
            coref_source=coref_source,
        )
        self.turns.append(turn)
        for idx in frame.objects:
            self.mentioned[self.ctx.snapshot.objects[idx].slot_id] = turn.turn_index

    # -- user side -----------------------------------------------------

    def _pick_source(self) -> str:
        if not self.history_candidates():
            return "scene"
        return _weighted_key(self.rng, self.config.coref_sources)

    def _fresh_object(self) -> int:
        return self.rng.randrange(self.ctx.object_count())

    def _ambiguity_candidates(self, target: int) -> list[int]:
        peers = [i for i in self.ctx.same_category(target) if i != target]
        if not peers:
            return []
        take = min(len(peers), 2)
        sample = sorted(self.rng.sample(peers, take) + [target])
        return sample

    def plan_user(self, goal: Goal, phase: str) -> _UserPlan:
        cfg = self.config
        domain = self.catalog.domain
        table = cfg.user_tables[goal.kind]
        entry = _weighted_entry(self.rng, table.get(phase) or table["init"], domain)
        kind = goal.kind
        rng = self.rng

        if kind == "BROWSE":
            anchor = self.ctx.items[self._fresh_object()]
            fields = slot_vocabulary(domain)
            slots = {s: slot_value(anchor, s, fields) for s in entry["slots"]}
            self.constraints = dict(slots)
            frame = BeliefFrame(act=entry["act"], activity="GET", slot_values=slots,
                                disambiguation_label=False)
            return _UserPlan(frame=frame, phrases={}, coref_source=None)

        if kind == "REFINE":
            pool = self.last_result if (self.last_result and rng.random() < 0.9) else None
            anchor_idx = rng.choice(pool) if pool else self._fresh_object()
            anchor = self.ctx.items[anchor_idx]
            fields = slot_vocabulary(domain)
            new = {s: slot_value(anchor, s, fields) for s in entry["slots"]}
            merged = {**self.constraints, **new}
            self.constraints = dict(merged)
            frame = BeliefFrame(act=entry["act"], activity="REFINE", slot_values=merged,
                                disambiguation_label=False)
            return _UserPlan(frame=frame, phrases={}, coref_source=None)

        if kind in ("GET_INFO", "DISAMBIGUATION_PROBE"):
            source = self._pick_source() if kind == "GET_INFO" else "scene"
            if phase == "followup" and self.focus:
                source, target = "dialog", self.focus[0]
            elif source == "dialog":
                target = self.history_candidates()[0]
            else:
                target = self._fresh_object()
            request_slots = tuple(s for s in entry.get("request_slots", ("price",))
                                  if s in slot_vocabulary(domain))
            ambiguous = False
            candidates: list[int] = []
            if source == "scene" and self.budget() >= 4:
                roll = rng.random()
                want = kind == "DISAMBIGUATION_PROBE" or roll < cfg.ambiguity_rate
                if want:
                    candidates = self._ambiguity_candidates(target)
                    ambiguous = len(candidates) >= 2
            frame = BeliefFrame(act=entry["act"], activity="GET",
                                request_slots=request_slots, objects=(target,),
                                disambiguation_label=ambiguous)
            if source == "dialog":
                phrases = {}
            else:
                phrases = {target: object_phrase(self.ctx, target, rng, vague=ambiguous)}
            return _UserPlan(frame=frame, phrases=phrases, coref_source=source,
                             ambiguous=ambiguous, candidates=candidates)

        if kind == "ADD_TO_CART":
            count = entry.get("count", 1)
            source = self._pick_source()
            if source == "dialog":
                hist = self.history_candidates()
                targets = hist[:count]
            else:
                pool = list(range(self.ctx.object_count()))
                targets = sorted(self.rng.sample(pool, min(count, len(pool))))
            ambiguous = False
            candidates = []
            if source == "scene" and len(targets) == 1 and self.budget() >= 4:
                if self.rng.random() < cfg.ambiguity_rate:
                    candidates = self._ambiguity_candidates(targets[0])
                    ambiguous = len(candidates) >= 2
            frame = BeliefFrame(act=entry["act"], activity="ADD_TO_CART",
                                objects=tuple(targets), disambiguation_label=ambiguous)
            phrases = {}
            if source == "scene":
                phrases = {t: object_phrase(self.ctx, t, self.rng, vague=ambiguous)
                           for t in targets}
            return _UserPlan(frame=frame, phrases=phrases, coref_source=source,
                             ambiguous=ambiguous, candidates=candidates)

        if kind == "COMPARE":
            pair = self._compare_pair()
            request_slots = tuple(s for s in entry.get("request_slots", ("price",))
                                  if s in slot_vocabulary(domain))
            frame = BeliefFrame(act=entry["act"], activity="COMPARE",
                                request_slots=request_slots, objects=tuple(pair),
                                disambiguation_label=False)
            phrases = {t: object_phrase(self.ctx, t, self.rng) for t in pair}
            return _UserPlan(frame=frame, phrases=phrases, coref_source="scene")

        raise GenerationError(f"unknown goal kind {goal.kind}")

    def _compare_pair(self) -> list[int]:
        n = self.ctx.object_count()
        multi = sorted({i for i in range(n) if len(self.ctx.same_category(i)) >= 2})
        if len(multi) >= 2:
            first = self.rng.choice(multi)
            peers = [i for i in self.ctx.same_category(first) if i != first]
            return sorted([first, self.rng.choice(peers)])
        return sorted(self.rng.sample(range(n), 2))

    # -- assistant side --------------------------------------------------

    def assistant_reply(self, plan: _UserPlan, api: APIResult) -> None:
        rng = self.rng
        cfg = self.config
        frame = plan.frame
        if api.kind == "search":
            take = min(len(api.objects), rng.randint(2, cfg.recommend_max)) if api.objects else 0
            chosen = api.objects[:take]
            activity = frame.activity if frame.activity == "REFINE" else "GET"
            reply = BeliefFrame(act="INFORM", activity=activity, objects=tuple(chosen))
            phrases = {i: object_phrase(self.ctx, i, rng) for i in chosen}
            self.focus = list(chosen)
            self.last_result = list(api.objects)
            self._emit(ASSISTANT, reply, phrases)
            return
        if api.kind == "info":
            target = api.objects[0]
            values = api.data[str(target)]
            reply = BeliefFrame(act="INFORM", activity="GET", slot_values=dict(values),
                                objects=(target,))
            self.focus = [target]
            self._emit(ASSISTANT, reply, dict(plan.phrases))
            return
        if api.kind == "compare":
            segs = []
            for i in api.objects:
                phrase = plan.phrases.get(i, "that one")
                segs.append(f"{phrase} is {answer_phrase(api.data[str(i)])}")
            reply = BeliefFrame(act="INFORM", activity="COMPARE", objects=tuple(api.objects))
            self.focus = list(api.objects)
            self._emit(ASSISTANT, reply, dict(plan.phrases), compare_phrase=" while ".join(segs))
            return
        if api.kind == "cart":
            for i in api.objects:
                self.cart.add(self.ctx.snapshot.objects[i].slot_id)
            reply = BeliefFrame(act="CONFIRM", activity="ADD_TO_CART", objects=tuple(api.objects))
            self.focus = list(api.objects)
            self._emit(ASSISTANT, reply, dict(plan.phrases))
            return
        raise GenerationError(f"unhandled api result {api.kind}")

    # -- goal execution ---------------------------------------------------

    def run_goal(self, goal: Goal) -> None:
        phases = ["init"]
        table = self.config.user_tables[goal.kind]
        if table.get("followup") and self.rng.random() < table.get("followup_rate", 0.0):
            phases.append("followup")
        for phase in phases:
            if self.budget() < 2:
                return
            plan = self.plan_user(goal, phase)
            if plan.ambiguous:
                self._run_disambiguation(plan)
            else:
                self._emit(USER, plan.frame, plan.phrases, plan.coref_source)
                api = execute_api(plan.frame, self.ctx, self.catalog)
                self.assistant_reply(plan, api)

    def _run_disambiguation(self, plan: _UserPlan) -> None:
        # Four utterances: ambiguous mention, clarification request,
        # resolving answer, then the originally requested reply.
        self._emit(USER, plan.frame, plan.phrases, plan.coref_source)
        cand_phrases = {i: object_phrase(self.ctx, i, self.rng) for i in plan.candidates}
        clarify = BeliefFrame(act="REQUEST", activity="DISAMBIGUATE",
                              objects=tuple(plan.candidates))
        self._emit(ASSISTANT, clarify, cand_phrases)

        target = plan.frame.objects[0]
        item = self.ctx.items[target]
        resolve = BeliefFrame(act="INFORM", activity="DISAMBIGUATE",
                              slot_values={"color": item.color}, objects=(target,),
                              disambiguation_label=False)
        self._emit(USER, resolve, {target: cand_phrases[target]}, "scene")

        answered = BeliefFrame(act=plan.frame.act, activity=plan.frame.activity,
                               request_slots=plan.frame.request_slots,
                               objects=plan.frame.objects, disambiguation_label=False)
        api = execute_api(answered, self.ctx, self.catalog)
        followup_plan = _UserPlan(frame=answered, phrases={target: cand_phrases[target]},
                                  coref_source="scene")
        self.assistant_reply(followup_plan, api)


def run_self_play(snapshots: list[SceneSnapshot], catalog: Catalog, config: SimConfig,
                  rng: random.Random, dialog_id: str = "dlg",
                  templates: dict | None = None) -> Dialog:
    """Self-play one dialog over one or two views of the same scene instance."""
    if not 1 <= len(snapshots) <= 2:
        raise GenerationError("run_self_play takes 1 or 2 snapshots")
    if len(snapshots) == 2 and snapshots[0].instance_id != snapshots[1].instance_id:
        raise GenerationError("two-snapshot dialogs must share a scene instance")
    templates = templates or default_templates()
    play = _SelfPlay(snapshots, catalog, config, templates, rng, dialog_id)
    agenda = generate_agenda(config, snapshots[0], catalog, rng)
    switch_goal = None
    if len(snapshots) == 2:
        switch_goal = 1 if len(agenda) > 1 else None

    for gi, goal in enumerate(agenda):
        if play.budget() < 2:
            break
        if switch_goal is not None and gi == switch_goal:
            play.switch_view()
        play.run_goal(goal)

    snapshot_ids = [s.snapshot_id for s in snapshots]
    if len(snapshots) == 2 and play.switch_turn is None:
        snapshot_ids = snapshot_ids[:1]  # truncated before the switch happened
    return Dialog(
        dialog_id=dialog_id,
        domain=catalog.domain,
        snapshot_ids=snapshot_ids,
        viewpoint_switch_turn=play.switch_turn,
        agenda=[g.kind for g in agenda],
        turns=play.turns,
    )
