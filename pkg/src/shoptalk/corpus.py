"""End-to-end corpus generation, splits, and dataset statistics.

The corpus document embeds the used snapshots and the full generator
configuration, so `regenerate` can reproduce the exact bytes from the file
alone (plus the bundled seed scenes and catalogs).
"""

from __future__ import annotations

import re
from collections import Counter
from concurrent.futures import ThreadPoolExecutor

from .catalog import Catalog
from .errors import GenerationError, ValidationError
from .ontology import Dialog, validate_dialog
from .scenegen import PoolResult, SceneGenConfig, SceneSnapshot, generate_pool
from .seeding import derive_rng
from .simulator import SimConfig, default_templates, run_self_play

SPLIT_NAMES = ("train", "dev", "dev-test", "test-std")
DEFAULT_RATIOS = (0.65, 0.10, 0.10, 0.15)

SCHEMA_VERSION = 1


def tokenize(text: str) -> list[str]:
    """Whitespace tokens after detaching sentence punctuation.

    Decimals like 49.99 stay intact because only punctuation followed by
    whitespace (or end of string) is split off.
    """
    spaced = re.sub(r"([.,!?;:])(?=\s|$)", r" \1", text)
    return spaced.split()


def word_count(text: str) -> int:
    return sum(1 for t in tokenize(text) if re.search(r"\w", t))


def _instance_index(pool: PoolResult) -> dict[str, list[int]]:
    by_instance: dict[str, list[int]] = {}
    for i, snap in enumerate(pool.snapshots):
        by_instance.setdefault(snap.instance_id, []).append(i)
    return by_instance


def _shared_objects(a: SceneSnapshot, b: SceneSnapshot) -> int:
    return len({o.slot_id for o in a.objects} & {o.slot_id for o in b.objects})


def _pick_snapshots(pool: PoolResult, by_instance: dict, sim: SimConfig, rng) -> list[SceneSnapshot]:
    """One grounding snapshot, or a same-instance pair with enough overlap."""
    want_two = rng.random() < sim.two_snapshot_fraction
    if want_two:
        for _ in range(10):
            first = pool.snapshots[rng.randrange(len(pool.snapshots))]
            peers = [pool.snapshots[j] for j in by_instance[first.instance_id]
                     if pool.snapshots[j].snapshot_id != first.snapshot_id]
            rng.shuffle(peers)
            for peer in peers:
                if _shared_objects(first, peer) >= sim.min_shared_objects:
                    return [first, peer]
        # fall through: no usable pair found
    return [pool.snapshots[rng.randrange(len(pool.snapshots))]]


def generate_dialogs(pool: PoolResult, catalogs: dict[str, Catalog], sim_config: SimConfig,
                     count: int, master_seed: int, workers: int = 1,
                     scene_provenance: dict | None = None) -> dict:
    """Corpus document with ``count`` validated dialogs grounded in the pool."""
    if not pool.snapshots:
        raise GenerationError("empty snapshot pool")
    templates = default_templates()
    by_instance = _instance_index(pool)

    def build(i: int) -> Dialog:
        rng = derive_rng(master_seed, "dialog", i)
        snaps = _pick_snapshots(pool, by_instance, sim_config, rng)
        catalog = catalogs[snaps[0].domain]
        dialog = run_self_play(snaps, catalog, sim_config, rng,
                               dialog_id=f"d{i:05d}", templates=templates)
        snap_map = {s.snapshot_id: s for s in snaps}
        violations = validate_dialog(dialog, snap_map)
        if violations:
            raise GenerationError(f"dialog {i}: {violations[:3]}")
        return dialog

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            dialogs = list(ex.map(build, range(count)))
    else:
        dialogs = [build(i) for i in range(count)]

    snapshot_lookup = {s.snapshot_id: s for s in pool.snapshots}
    used = sorted({sid for d in dialogs for sid in d.snapshot_ids})
    return {
        "schema_version": SCHEMA_VERSION,
        "generator": {
            "master_seed": master_seed,
            "dialog_count": count,
            "sim_config": sim_config.raw,
            "scene": scene_provenance or {},
        },
        "snapshots": {sid: snapshot_lookup[sid].to_dict() for sid in used},
        "dialogs": [d.to_dict() for d in dialogs],
        "split_info": None,
    }


def generate_corpus(scene_config: SceneGenConfig, sim_config: SimConfig, count: int,
                    master_seed: int, seeds, catalogs: dict[str, Catalog],
                    workers: int = 1) -> dict:
    """Full pipeline: scene pool then dialog self-play, one master seed."""
    pool = generate_pool(seeds, catalogs, scene_config, master_seed, workers)
    provenance = {
        "master_seed": master_seed,
        "config": scene_config.to_dict(),
        "candidates_total": pool.candidates_total,
    }
    return generate_dialogs(pool, catalogs, sim_config, count, master_seed,
                            workers, scene_provenance=provenance)


def regenerate_corpus(doc: dict, seeds, catalogs: dict[str, Catalog], workers: int = 1) -> dict:
    """Rebuild a corpus from its embedded generator block."""
    gen = doc["generator"]
    scene = gen["scene"]
    scene_config = SceneGenConfig.from_dict(
        {k: v for k, v in scene["config"].items()})
    sim_config = SimConfig(gen["sim_config"])
    pool = generate_pool(seeds, catalogs, scene_config, scene["master_seed"], workers)
    return generate_dialogs(pool, catalogs, sim_config, gen["dialog_count"],
                            gen["master_seed"], workers, scene_provenance=scene)


# -- splits ---------------------------------------------------------------


def largest_remainder_sizes(total: int, ratios: dict[str, float]) -> dict[str, int]:
    if any(r < 0 for r in ratios.values()) or abs(sum(ratios.values()) - 1.0) > 1e-9:
        raise ValidationError("split ratios must be >= 0 and sum to 1")
    sizes = {name: int(total * r) for name, r in ratios.items()}
    remainders = {name: total * r - sizes[name] for name, r in ratios.items()}
    leftover = total - sum(sizes.values())
    order = sorted(ratios, key=lambda n: (-remainders[n], list(ratios).index(n)))
    for name in order[:leftover]:
        sizes[name] += 1
    return sizes


def split_corpus(doc: dict, ratios=DEFAULT_RATIOS, seed: int = 0,
                 scene_disjoint: bool = False) -> dict:
    """Assign every dialog to exactly one split; sizes by largest remainder."""
    ratio_map = dict(zip(SPLIT_NAMES, ratios))
    dialog_ids = [d["dialog_id"] for d in doc["dialogs"]]
    sizes = largest_remainder_sizes(len(dialog_ids), ratio_map)
    rng = derive_rng(seed, "split")
    assignment: dict[str, str] = {}
    if scene_disjoint:
        instance_of = {sid: snap["instance_id"] for sid, snap in doc["snapshots"].items()}
        groups: dict[str, list[str]] = {}
        for d in doc["dialogs"]:
            groups.setdefault(instance_of[d["snapshot_ids"][0]], []).append(d["dialog_id"])
        keys = sorted(groups)
        rng.shuffle(keys)
        remaining = dict(sizes)
        for key in keys:
            name = max(SPLIT_NAMES, key=lambda n: remaining[n])
            for did in groups[key]:
                assignment[did] = name
            remaining[name] -= len(groups[key])
    else:
        shuffled = list(dialog_ids)
        rng.shuffle(shuffled)
        start = 0
        for name in SPLIT_NAMES:
            for did in shuffled[start:start + sizes[name]]:
                assignment[did] = name
            start += sizes[name]
    out = dict(doc)
    out["split_info"] = {
        "ratios": {n: ratio_map[n] for n in SPLIT_NAMES},
        "seed": seed,
        "scene_disjoint": scene_disjoint,
        "splits": {n: sorted(did for did, s in assignment.items() if s == n)
                   for n in SPLIT_NAMES},
    }
    return out


# -- statistics -------------------------------------------------------------


def _slot_of(doc: dict, snapshot_id: str, local_index: int) -> str:
    return doc["snapshots"][snapshot_id]["objects"][local_index]["slot_id"]


def coref_distances(doc: dict) -> Counter:
    """Histogram of utterance distances to each object's previous mention.

    First mentions (including scene-only ones) contribute nothing.
    """
    hist: Counter = Counter()
    for dialog in doc["dialogs"]:
        last_seen: dict[str, int] = {}
        for turn in dialog["turns"]:
            t = turn["turn_index"]
            for obj in turn["frame"]["objects"]:
                slot = _slot_of(doc, turn["active_snapshot"], obj)
                if slot in last_seen:
                    hist[t - last_seen[slot]] += 1
                last_seen[slot] = t
    return hist


def act_transition_graph(doc: dict, max_rounds: int = 4) -> list[dict]:
    """Weighted act-transition edges over the first ``max_rounds`` rounds.

    Nodes are labeled ``ACT:ACTIVITY:[U|A]<round>``; an edge counts one
    observed consecutive utterance pair.
    """
    edges: Counter = Counter()
    for dialog in doc["dialogs"]:
        turns = dialog["turns"]
        for i in range(len(turns) - 1):
            src_round, dst_round = i // 2, (i + 1) // 2
            if src_round >= max_rounds or dst_round >= max_rounds:
                continue
            src, dst = turns[i], turns[i + 1]
            src_label = (f"{src['frame']['act']}:{src['frame']['activity']}:"
                         f"{'U' if src['speaker'] == 'user' else 'A'}{src_round}")
            dst_label = (f"{dst['frame']['act']}:{dst['frame']['activity']}:"
                         f"{'U' if dst['speaker'] == 'user' else 'A'}{dst_round}")
            edges[(src_label, dst_label)] += 1
    return [{"src": s, "dst": d, "weight": w}
            for (s, d), w in sorted(edges.items())]


def compute_stats(doc: dict, max_rounds: int = 4) -> dict:
    """All corpus-level statistics in one pass-friendly document."""
    dialogs = doc["dialogs"]
    if not dialogs:
        raise ValidationError("cannot compute statistics of an empty corpus")

    user_words, assistant_words = [], []
    utterances = 0
    objects_mentioned, objects_in_scene = [], []
    two_snapshot = 0
    per_turn_lengths: dict[tuple[int, str], list[int]] = {}
    act_activity: Counter = Counter()

    for dialog in dialogs:
        utterances += len(dialog["turns"])
        mentioned: set[str] = set()
        for turn in dialog["turns"]:
            n = word_count(turn["utterance"])
            (user_words if turn["speaker"] == "user" else assistant_words).append(n)
            per_turn_lengths.setdefault(
                (turn["turn_index"] // 2, turn["speaker"]), []).append(n)
            act_activity[(turn["speaker"],
                          f"{turn['frame']['act']}:{turn['frame']['activity']}")] += 1
            for obj in turn["frame"]["objects"]:
                mentioned.add(_slot_of(doc, turn["active_snapshot"], obj))
        objects_mentioned.append(len(mentioned))
        scene_slots = set()
        for sid in dialog["snapshot_ids"]:
            scene_slots |= {o["slot_id"] for o in doc["snapshots"][sid]["objects"]}
        objects_in_scene.append(len(scene_slots))
        if len(dialog["snapshot_ids"]) == 2:
            two_snapshot += 1

    hist = coref_distances(doc)
    dialogs_per_snapshot = Counter(sid for d in dialogs for sid in d["snapshot_ids"])

    def mean(xs) -> float:
        return sum(xs) / len(xs) if xs else 0.0

    return {
        "dialog_count": len(dialogs),
        "utterance_count": utterances,
        "snapshot_count": len(doc["snapshots"]),
        "avg_words_per_user_turn": round(mean(user_words), 4),
        "avg_words_per_assistant_turn": round(mean(assistant_words), 4),
        "avg_utterances_per_dialog": round(utterances / len(dialogs), 4),
        "avg_objects_mentioned_per_dialog": round(mean(objects_mentioned), 4),
        "avg_objects_in_scene_per_dialog": round(mean(objects_in_scene), 4),
        "two_snapshot_fraction": round(two_snapshot / len(dialogs), 4),
        "objects_per_snapshot": {
            sid: len(snap["objects"]) for sid, snap in doc["snapshots"].items()
        },
        "dialogs_per_snapshot": dict(sorted(dialogs_per_snapshot.items())),
        "utterance_words_by_round": {
            f"{speaker}{rnd}": round(mean(vals), 4)
            for (rnd, speaker), vals in sorted(per_turn_lengths.items())
        },
        "act_activity_counts": {
            f"{speaker}:{intent}": count
            for (speaker, intent), count in sorted(act_activity.items())
        },
        "coref_distance_histogram": {str(k): hist[k] for k in sorted(hist)},
        "act_transitions": act_transition_graph(doc, max_rounds),
    }
