import { ApiError, AnnotClient } from "./api";
import { computeScale, drawOverlay } from "./overlay";
import { TaskView } from "./state";
import type { Overlay } from "./types";

export interface AppContext {
  client: AnnotClient;
  worker: string;
  root: HTMLElement;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function banner(root: HTMLElement, kind: string, text: string): void {
  const old = root.querySelector(".banner");
  if (old) old.remove();
  const node = el("div", `banner banner-${kind}`, text);
  root.prepend(node);
}

async function renderProgress(ctx: AppContext, host: HTMLElement): Promise<void> {
  const progress = await ctx.client.progress();
  host.textContent =
    `open ${progress.open} · leased ${progress.leased} · ` +
    `done ${progress.submitted + progress.approved} / ${progress.total}`;
}

export async function renderTask(ctx: AppContext, view: TaskView): Promise<void> {
  const { root, client } = ctx;
  root.textContent = "";

  const header = el("div", "header");
  header.append(el("h1", undefined, `Task ${view.task.task_id} (${view.task.domain})`));
  const progressHost = el("span", "progress");
  header.append(progressHost);
  root.append(header);
  renderProgress(ctx, progressHost).catch(() => undefined);

  const canvases = new Map<string, { canvas: HTMLCanvasElement; overlay: Overlay }>();
  const sceneRow = el("div", "scenes");
  for (const snapshotId of view.task.snapshot_ids) {
    const overlay = await client.overlay(snapshotId);
    const scale = computeScale(overlay.image_size);
    const canvas = el("canvas", "scene");
    canvas.width = scale.width;
    canvas.height = scale.height;
    const context2d = canvas.getContext("2d");
    if (context2d) drawOverlay(context2d, overlay, scale, new Set());
    const wrap = el("figure", "scene-wrap");
    wrap.append(canvas, el("figcaption", undefined, snapshotId));
    sceneRow.append(wrap);
    canvases.set(snapshotId, { canvas, overlay });
  }
  root.append(sceneRow);

  const highlight = (snapshotId: string, ids: Set<number>) => {
    const entry = canvases.get(snapshotId);
    if (!entry) return;
    const scale = computeScale(entry.overlay.image_size);
    const context2d = entry.canvas.getContext("2d");
    if (context2d) drawOverlay(context2d, entry.overlay, scale, ids);
  };

  const list = el("ol", "turns");
  const inputs: HTMLTextAreaElement[] = [];
  view.task.turns.forEach((turn, position) => {
    const item = el("li", `turn turn-${turn.speaker}`);
    const meta = `${turn.frame.act}:${turn.frame.activity}` +
      (turn.frame.objects.length ? ` objects [${turn.frame.objects.join(", ")}]` : "");
    item.append(el("div", "turn-meta", `${turn.speaker} · ${meta}`));
    item.append(el("div", "turn-template", turn.template_utterance));

    const input = el("textarea", "turn-input") as HTMLTextAreaElement;
    input.rows = 2;
    input.placeholder = "Paraphrase this turn…";
    input.tabIndex = position + 1;
    input.addEventListener("input", () => {
      view.setDraft(position, input.value);
      errorsHost.textContent = "";
      submit.disabled = !view.canSubmit();
    });
    item.addEventListener("mouseenter", () =>
      highlight(turn.active_snapshot, view.highlightFor(position)));
    item.addEventListener("mouseleave", () =>
      highlight(turn.active_snapshot, new Set()));
    const errorsHost = el("div", "turn-errors");
    item.append(input, errorsHost);
    list.append(input && item);
    inputs.push(input);
  });
  root.append(list);

  const controls = el("div", "controls");
  const submit = el("button", "submit", "Submit paraphrases (Ctrl+Enter)") as HTMLButtonElement;
  submit.disabled = true;
  const flagButton = el("button", "flag", "Flag broken task") as HTMLButtonElement;
  controls.append(submit, flagButton);
  root.append(controls);

  const showRejection = () => {
    view.task.turns.forEach((turn, position) => {
      const messages = view.errorsFor(turn.turn_index);
      const host = list.children[position].querySelector(".turn-errors") as HTMLElement;
      host.textContent = messages.length ? `missing: ${messages.join("; ")}` : "";
    });
  };

  const doSubmit = async () => {
    if (!view.canSubmit()) return;
    submit.disabled = true;
    try {
      await client.submit(view.task.task_id, ctx.worker, view.paraphrases());
      banner(root, "ok", "Accepted. Fetching the next task…");
      await bootTask(ctx);
    } catch (err) {
      if (err instanceof ApiError && err.status === 422) {
        view.applyRejection(err.details);
        showRejection();
        banner(root, "warn", "Some turns dropped required entities; see messages below.");
      } else if (err instanceof ApiError && err.status === 409) {
        banner(root, "error", `Lease problem (${err.code}). Re-fetch a task to continue.`);
      } else {
        banner(root, "error", `Submit failed: ${String(err)}`);
      }
      submit.disabled = !view.canSubmit();
    }
  };

  submit.addEventListener("click", doSubmit);
  root.addEventListener("keydown", (event) => {
    if (event.ctrlKey && event.key === "Enter") void doSubmit();
  });
  flagButton.addEventListener("click", async () => {
    const reason = window.prompt("Why is this task broken?") ?? "";
    if (!reason) return;
    await client.flag(view.task.task_id, ctx.worker, reason);
    banner(root, "ok", "Task flagged. Fetching the next task…");
    await bootTask(ctx);
  });

  if (inputs.length) inputs[0].focus();
}

export async function bootTask(ctx: AppContext): Promise<void> {
  try {
    const task = await ctx.client.nextTask(ctx.worker);
    if (task === null) {
      ctx.root.textContent = "";
      ctx.root.append(el("h1", undefined, "All tasks are done. Thank you!"));
      return;
    }
    await renderTask(ctx, new TaskView(task));
  } catch (err) {
    ctx.root.textContent = "";
    const retry = el("button", "retry", "Retry");
    retry.addEventListener("click", () => void bootTask(ctx));
    ctx.root.append(el("div", "banner banner-error", `Could not fetch a task: ${String(err)}`), retry);
  }
}
