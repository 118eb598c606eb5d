"""Matplotlib renderings of corpus statistics and snapshot overlays.

Kept separate from the stats computation so the core has no plotting
dependency; the CLI report path writes these PNGs next to the CSV/JSON
output.
"""

from __future__ import annotations

from collections import Counter
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.patches import Rectangle  # noqa: E402


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def objects_per_snapshot_figure(stats: dict, path: Path) -> Path:
    counts = Counter(stats["objects_per_snapshot"].values())
    xs = sorted(counts)
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.bar(xs, [counts[x] for x in xs], color="#4477aa")
    ax.set_xlabel("objects in snapshot")
    ax.set_ylabel("snapshots")
    ax.set_title("Objects per snapshot")
    return _save(fig, path)


def dialogs_per_snapshot_figure(stats: dict, path: Path) -> Path:
    counts = Counter(stats["dialogs_per_snapshot"].values())
    xs = sorted(counts)
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.bar(xs, [counts[x] for x in xs], color="#66ccee")
    ax.set_xlabel("dialogs grounded in snapshot")
    ax.set_ylabel("snapshots")
    ax.set_title("Dialogs per snapshot")
    return _save(fig, path)


def utterance_length_figure(stats: dict, path: Path) -> Path:
    rounds: dict[str, list] = {"user": [], "assistant": []}
    for key, mean in sorted(stats["utterance_words_by_round"].items()):
        speaker = "user" if key.startswith("user") else "assistant"
        rounds[speaker].append((int(key.replace(speaker, "")), mean))
    fig, ax = plt.subplots(figsize=(5, 3.2))
    for speaker, marker in (("user", "o"), ("assistant", "s")):
        pts = sorted(rounds[speaker])
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker=marker, label=speaker)
    ax.set_xlabel("dialog round")
    ax.set_ylabel("mean words per utterance")
    ax.set_title("Utterance length by round")
    ax.legend()
    return _save(fig, path)


def act_activity_figure(stats: dict, path: Path) -> Path:
    counts = stats["act_activity_counts"]
    labels = sorted(counts)
    fig, ax = plt.subplots(figsize=(7, 3.6))
    ax.bar(range(len(labels)), [counts[k] for k in labels],
           color=["#4477aa" if k.startswith("user") else "#ee6677" for k in labels])
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels([k.split(":", 1)[1] + (" (U)" if k.startswith("user") else " (A)")
                        for k in labels], rotation=45, ha="right", fontsize=7)
    ax.set_ylabel("turns")
    ax.set_title("Dialog act and activity frequencies")
    return _save(fig, path)


def coref_distance_figure(stats: dict, path: Path) -> Path:
    hist = {int(k): v for k, v in stats["coref_distance_histogram"].items()}
    xs = sorted(hist)
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.bar(xs, [hist[x] for x in xs], color="#228833")
    ax.set_xlabel("utterances since previous mention")
    ax.set_ylabel("object mentions")
    ax.set_title("Coreference distance")
    return _save(fig, path)


def act_transition_figure(stats: dict, path: Path, max_rounds: int = 4) -> Path:
    """Layered act-transition graph: one column per utterance slot."""
    edges = stats["act_transitions"]

    def column(label: str) -> int:
        speaker, rnd = label.rsplit(":", 1)[-1][0], int(label.rsplit(":", 1)[-1][1:])
        return rnd * 2 + (0 if speaker == "U" else 1)

    nodes: dict[str, int] = {}
    for e in edges:
        for label in (e["src"], e["dst"]):
            nodes.setdefault(label, column(label))
    columns: dict[int, list[str]] = {}
    for label, col in sorted(nodes.items()):
        columns.setdefault(col, []).append(label)
    pos = {}
    for col, labels in columns.items():
        for row, label in enumerate(sorted(labels)):
            pos[label] = (col, -row)

    fig, ax = plt.subplots(figsize=(2.2 * max_rounds * 2, 4.5))
    max_w = max((e["weight"] for e in edges), default=1)
    for e in edges:
        x0, y0 = pos[e["src"]]
        x1, y1 = pos[e["dst"]]
        ax.plot([x0, x1], [y0, y1], color="#888888",
                linewidth=0.5 + 3.0 * e["weight"] / max_w, alpha=0.6, zorder=1)
    for label, (x, y) in pos.items():
        short = label.rsplit(":", 1)
        ax.text(x, y, f"{short[0]}:{short[1]}", fontsize=6, ha="center", va="center",
                zorder=2, bbox=dict(boxstyle="round,pad=0.25", fc="#ffffff", ec="#333333"))
    ax.set_xticks(sorted(columns))
    ax.set_xticklabels([("U" if c % 2 == 0 else "A") + str(c // 2) for c in sorted(columns)])
    ax.set_yticks([])
    ax.set_title(f"Act transitions, first {max_rounds} rounds")
    return _save(fig, path)


def snapshot_overlay_figure(snapshot: dict, path: Path) -> Path:
    """Schematic render of a snapshot: labeled boxes on a neutral canvas."""
    width, height = snapshot["camera"]["image_size"]
    fig, ax = plt.subplots(figsize=(width / 160, height / 160))
    ax.set_xlim(0, width)
    ax.set_ylim(height, 0)
    ax.set_facecolor("#f2f2ee")
    for obj in snapshot["objects"]:
        x, y, w, h = obj["bbox"]
        full = obj["fully_visible"]
        ax.add_patch(Rectangle((x, y), w, h, fill=False,
                               edgecolor="#228833" if full else "#ee6677", linewidth=1.2))
        ax.text(x + 3, y + 12, str(obj["local_index"]), fontsize=7, color="#222222")
    ax.set_title(snapshot["snapshot_id"], fontsize=8)
    ax.set_xticks([])
    ax.set_yticks([])
    return _save(fig, path)


def render_stats_figures(stats: dict, outdir) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    return [
        objects_per_snapshot_figure(stats, outdir / "objects_per_snapshot.png"),
        dialogs_per_snapshot_figure(stats, outdir / "dialogs_per_snapshot.png"),
        utterance_length_figure(stats, outdir / "utterance_lengths.png"),
        act_activity_figure(stats, outdir / "act_activity_counts.png"),
        coref_distance_figure(stats, outdir / "coref_distance.png"),
        act_transition_figure(stats, outdir / "act_transitions.png"),
    ]
