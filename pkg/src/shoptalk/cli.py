"""Command-line interface for the whole pipeline.

Exit codes: 0 success, 1 validation/generation failure, 2 config or I/O
error. All file outputs are canonical JSON; the stats report additionally
writes plot-ready CSVs and PNG figures.
"""

from __future__ import annotations

import csv
import functools
import sys
from pathlib import Path

import click

from . import canonical
from .catalog import load_bundled_catalogs, load_catalog
from .corpus import (
    DEFAULT_RATIOS,
    SPLIT_NAMES,
    compute_stats,
    generate_dialogs,
    split_corpus,
)
from .errors import ConfigError, ShoptalkError
from .scenegen import (
    SceneGenConfig,
    generate_pool,
    load_bundled_seed_scenes,
    load_seed_scene,
    pool_from_dict,
    pool_to_dict,
)
from .simulator import SimConfig, default_sim_config


def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ShoptalkError as exc:
            click.echo(f"error: {exc}", err=True)
            details = getattr(exc, "details", None)
            if details:
                click.echo(f"details: {details[:10]}", err=True)
            sys.exit(exc.exit_code)

    return wrapper


@click.group()
def main():
    """Synthetic multimodal shopping-dialog pipeline."""


def _load_scene_config(path: str | None) -> SceneGenConfig:
    if path is None:
        return SceneGenConfig()
    return SceneGenConfig.from_dict(canonical.read_json(path))


def _load_sim_config(path: str | None) -> SimConfig:
    if path is None:
        return default_sim_config()
    return SimConfig(canonical.read_json(path))


def _load_inputs(seeds_dir: str | None, catalog_paths: tuple[str, ...]):
    if seeds_dir:
        seeds = [load_seed_scene(p) for p in sorted(Path(seeds_dir).glob("*.json"))]
    else:
        seeds = load_bundled_seed_scenes()
    if not seeds:
        raise ConfigError("no seed scenes found")
    catalogs = load_bundled_catalogs()
    for path in catalog_paths:
        catalog = load_catalog(path)
        catalogs[catalog.domain] = catalog
    return seeds, catalogs


@main.command("gen-scenes")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="Scene generator config JSON.")
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--seeds-dir", type=click.Path(exists=True), default=None,
              help="Directory of seed scene JSON files (default: bundled).")
@click.option("--catalog", "catalog_paths", type=click.Path(exists=True), multiple=True,
              help="Catalog JSON overriding the bundled one for its domain.")
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--preview", type=int, default=0,
              help="Render overlay PNGs for the first N snapshots.")
@handle_errors
def gen_scenes(seed, config_path, out_path, seeds_dir, catalog_paths, workers, preview):
    """Generate the filtered snapshot pool."""
    config = _load_scene_config(config_path)
    seeds, catalogs = _load_inputs(seeds_dir, catalog_paths)
    pool = generate_pool(seeds, catalogs, config, seed, workers=workers)
    canonical.write_json(out_path, pool_to_dict(pool, config, seed))
    click.echo(f"pool: {len(pool.snapshots)} snapshots kept of "
               f"{pool.candidates_total} candidates -> {out_path}")
    if preview > 0:
        from .figures import snapshot_overlay_figure

        outdir = Path(out_path).with_suffix("") .parent / "previews"
        outdir.mkdir(parents=True, exist_ok=True)
        for snap in pool.snapshots[:preview]:
            snapshot_overlay_figure(snap.to_dict(), outdir / f"{snap.snapshot_id}.png")
        click.echo(f"previews -> {outdir}")


@main.command("gen-dialogs")
@click.option("--scenes", "scenes_path", type=click.Path(exists=True), required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--count", type=int, default=100, show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="Simulator config JSON.")
@click.option("--catalog", "catalog_paths", type=click.Path(exists=True), multiple=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--workers", type=int, default=1, show_default=True)
@handle_errors
def gen_dialogs(scenes_path, seed, count, config_path, catalog_paths, out_path, workers):
    """Self-play dialogs grounded in a snapshot pool."""
    pool_doc = canonical.read_json(scenes_path)
    pool = pool_from_dict(pool_doc)
    _, catalogs = _load_inputs(None, catalog_paths)
    sim_config = _load_sim_config(config_path)
    provenance = {
        "master_seed": pool_doc.get("master_seed"),
        "config": pool_doc.get("config"),
        "candidates_total": pool_doc.get("candidates_total"),
    }
    doc = generate_dialogs(pool, catalogs, sim_config, count, seed,
                           workers=workers, scene_provenance=provenance)
    canonical.write_json(out_path, doc)
    click.echo(f"corpus: {count} dialogs -> {out_path}")


@main.command("split")
@click.option("--corpus", "corpus_path", type=click.Path(exists=True), required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--ratios", default=",".join(str(r) for r in DEFAULT_RATIOS),
              show_default=True, help="train,dev,dev-test,test-std")
@click.option("--scene-disjoint", is_flag=True,
              help="Dialogs of one scene instance stay in one split.")
@click.option("--out", "out_path", type=click.Path(), required=True)
@handle_errors
def split_cmd(corpus_path, seed, ratios, scene_disjoint, out_path):
    """Partition dialogs into train/dev/dev-test/test-std."""
    doc = canonical.read_json(corpus_path)
    try:
        ratio_values = tuple(float(r) for r in ratios.split(","))
        if len(ratio_values) != 4:
            raise ValueError
    except ValueError:
        raise ConfigError(f"--ratios must be 4 comma-separated numbers, got {ratios!r}")
    out = split_corpus(doc, ratio_values, seed, scene_disjoint)
    canonical.write_json(out_path, out)
    sizes = {n: len(out["split_info"]["splits"][n]) for n in SPLIT_NAMES}
    click.echo(f"split sizes: {sizes} -> {out_path}")


def _write_csv(path: Path, header: list[str], rows) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


@main.command("stats")
@click.option("--corpus", "corpus_path", type=click.Path(exists=True), required=True)
@click.option("--out-dir", type=click.Path(), required=True)
@click.option("--max-rounds", type=int, default=4, show_default=True)
@click.option("--figures/--no-figures", default=True, show_default=True)
@handle_errors
def stats_cmd(corpus_path, out_dir, max_rounds, figures):
    """Corpus statistics: JSON summary, CSVs, and PNG figures."""
    doc = canonical.read_json(corpus_path)
    stats = compute_stats(doc, max_rounds=max_rounds)
    outdir = Path(out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    canonical.write_json(outdir / "stats.json", stats)
    _write_csv(outdir / "objects_per_snapshot.csv", ["snapshot_id", "objects"],
               sorted(stats["objects_per_snapshot"].items()))
    _write_csv(outdir / "dialogs_per_snapshot.csv", ["snapshot_id", "dialogs"],
               sorted(stats["dialogs_per_snapshot"].items()))
    _write_csv(outdir / "utterance_words_by_round.csv", ["series", "mean_words"],
               sorted(stats["utterance_words_by_round"].items()))
    _write_csv(outdir / "act_activity_counts.csv", ["speaker_intent", "turns"],
               sorted(stats["act_activity_counts"].items()))
    _write_csv(outdir / "coref_distance.csv", ["distance", "mentions"],
               sorted(((int(k), v) for k, v in stats["coref_distance_histogram"].items())))
    _write_csv(outdir / "act_transitions.csv", ["src", "dst", "weight"],
               [(e["src"], e["dst"], e["weight"]) for e in stats["act_transitions"]])
    if figures:
        from .figures import render_stats_figures

        paths = render_stats_figures(stats, outdir)
        click.echo(f"{len(paths)} figures -> {outdir}")
    for key in ("dialog_count", "utterance_count", "snapshot_count",
                "avg_utterances_per_dialog", "avg_words_per_user_turn",
                "avg_words_per_assistant_turn", "avg_objects_mentioned_per_dialog",
                "avg_objects_in_scene_per_dialog", "two_snapshot_fraction"):
        click.echo(f"{key}: {stats[key]}")


@main.command("eval")
@click.option("--task", type=click.Choice(["disamb", "coref", "dst", "gen", "retrieval"]),
              required=True)
@click.option("--gold", "gold_path", type=click.Path(exists=True), required=True)
@click.option("--pred", "pred_path", type=click.Path(exists=True), required=True)
@click.option("--candidates", "cand_path", type=click.Path(exists=True), default=None,
              help="Candidate file (retrieval task).")
@click.option("--frame-mode", type=click.Choice(["cumulative", "delta"]),
              default="cumulative", show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None)
@handle_errors
def eval_cmd(task, gold_path, pred_path, cand_path, frame_mode, out_path):
    """Score a prediction file against a gold corpus."""
    from . import evaluate

    gold = canonical.read_json(gold_path)
    preds = canonical.read_json(pred_path)
    if task == "disamb":
        report = evaluate.eval_disambiguation(preds, gold)
    elif task == "coref":
        report = evaluate.eval_coref(preds, gold)
    elif task == "dst":
        report = evaluate.eval_dst(preds, gold, frame_mode=frame_mode)
    elif task == "gen":
        report = evaluate.eval_generation(preds, gold)
    else:
        if cand_path is None:
            raise ConfigError("--candidates is required for the retrieval task")
        report = evaluate.eval_retrieval(preds, canonical.read_json(cand_path))
    click.echo(report.format_table())
    if out_path:
        canonical.write_json(out_path, report.to_dict())


@main.command("gen-candidates")
@click.option("--gold", "gold_path", type=click.Path(exists=True), required=True)
@click.option("--pool-size", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
@handle_errors
def gen_candidates(gold_path, pool_size, seed, out_path):
    """Build per-turn retrieval candidate pools from a gold corpus."""
    from .evaluate import build_retrieval_candidates

    doc = canonical.read_json(gold_path)
    canonical.write_json(out_path, build_retrieval_candidates(doc, pool_size, seed))
    click.echo(f"candidates -> {out_path}")


@main.command("serve-annotation")
@click.option("--port", type=int, default=8090, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--journal", "journal_path", type=click.Path(), required=True)
@click.option("--corpus", "corpus_path", type=click.Path(exists=True), default=None,
              help="Corpus to enqueue before serving.")
@click.option("--ui", "ui_dir", type=click.Path(), default=None,
              help="Static UI directory (default: ./frontend/dist when present).")
@click.option("--lease-ttl", type=float, default=1800.0, show_default=True)
@handle_errors
def serve_annotation(port, host, journal_path, corpus_path, ui_dir, lease_ttl):
    """Run the paraphrase annotation service."""
    import uvicorn

    from .annotation import TaskStore
    from .server import create_app

    store = TaskStore(journal_path=journal_path, lease_ttl=lease_ttl)
    if corpus_path:
        added = store.enqueue_corpus(canonical.read_json(corpus_path))
        click.echo(f"enqueued {added} new tasks")
    if ui_dir is None and Path("frontend/dist").is_dir():
        ui_dir = "frontend/dist"
    app = create_app(store, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command("approve-tasks")
@click.option("--journal", "journal_path", type=click.Path(exists=True), required=True)
@click.option("--task-id", "task_ids", multiple=True)
@click.option("--all", "approve_all", is_flag=True, help="Approve every submitted task.")
@handle_errors
def approve_tasks(journal_path, task_ids, approve_all):
    """Review step for stores running with auto-approve off."""
    from .annotation import SUBMITTED, TaskStore

    store = TaskStore(journal_path=journal_path)
    targets = list(task_ids)
    if approve_all:
        targets += [t.task_id for t in store.tasks.values() if t.state == SUBMITTED]
    if not targets:
        pending = [t.task_id for t in store.tasks.values() if t.state == SUBMITTED]
        click.echo(f"submitted tasks awaiting review: {pending}")
        return
    for task_id in targets:
        store.approve(task_id)
        click.echo(f"approved {task_id}")


@main.command("export-paraphrased")
@click.option("--corpus", "corpus_path", type=click.Path(exists=True), required=True)
@click.option("--journal", "journal_path", type=click.Path(exists=True), required=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
@handle_errors
def export_paraphrased_cmd(corpus_path, journal_path, out_path):
    """Merge submitted paraphrases back into the corpus."""
    from .annotation import TaskStore, export_paraphrased

    store = TaskStore(journal_path=journal_path)
    doc = canonical.read_json(corpus_path)
    out = export_paraphrased(doc, store)
    canonical.write_json(out_path, out)
    done = sum(1 for t in store.tasks.values() if t.state in ("submitted", "approved"))
    click.echo(f"exported with {done} paraphrased dialogs -> {out_path}")


if __name__ == "__main__":
    main()
