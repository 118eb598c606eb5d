import type { RejectionDetail, Task } from "./types";

/**
 * Draft state for one leased task. Only paraphrase text is mutable; frames
 * and object ids pass through untouched. Submit stays disabled until every
 * turn has non-empty text.
 */
export class TaskView {
  readonly task: Task;
  private drafts: string[];
  private serverErrors: Map<number, string[]>;

  constructor(task: Task) {
    this.task = task;
    this.drafts = task.turns.map(() => "");
    this.serverErrors = new Map();
  }

  draftCount(): number {
    return this.drafts.length;
  }

  draft(index: number): string {
    return this.drafts[index] ?? "";
  }

  setDraft(index: number, text: string): void {
    if (index < 0 || index >= this.drafts.length) {
      throw new RangeError(`turn ${index} out of range`);
    }
    this.drafts[index] = text;
    this.serverErrors.delete(this.task.turns[index].turn_index);
  }

  /** Submit gating: every turn needs non-empty text. */
  canSubmit(): boolean {
    return this.drafts.every((d) => d.trim().length > 0);
  }

  paraphrases(): string[] {
    return [...this.drafts];
  }

  /** Mirror a server rejection into per-turn messages. */
  applyRejection(details: RejectionDetail[]): void {
    this.serverErrors = new Map();
    for (const detail of details) {
      if (detail.turn_index === null) continue;
      this.serverErrors.set(detail.turn_index, detail.missing);
    }
  }

  errorsFor(turnIndex: number): string[] {
    return this.serverErrors.get(turnIndex) ?? [];
  }

  hasErrors(): boolean {
    return this.serverErrors.size > 0;
  }

  /** Object ids referenced by the frame at a turn, for hover highlighting. */
  highlightFor(position: number): Set<number> {
    const turn = this.task.turns[position];
    return new Set(turn ? turn.frame.objects : []);
  }
}
