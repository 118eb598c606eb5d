import { describe, expect, it } from "vitest";

import { TaskView } from "../src/state";
import type { Task } from "../src/types";

function makeTask(turnCount = 4): Task {
  return {
    task_id: "task-d00001",
    dialog_id: "d00001",
    state: "leased",
    domain: "fashion",
    snapshot_ids: ["snap-a"],
    viewpoint_switch_turn: null,
    turns: Array.from({ length: turnCount }, (_, i) => ({
      turn_index: i,
      speaker: i % 2 === 0 ? ("user" as const) : ("assistant" as const),
      template_utterance: `template ${i}`,
      active_snapshot: "snap-a",
      frame: {
        act: "REQUEST",
        activity: "GET",
        request_slots: [],
        slot_values: i === 0 ? { color: "red" } : {},
        objects: i === 2 ? [1, 4] : [],
        ...(i % 2 === 0 ? { disambiguation_label: false } : {}),
      },
    })),
  };
}

describe("TaskView", () => {
  it("keeps one draft per turn", () => {
    const view = new TaskView(makeTask(10));
    expect(view.draftCount()).toBe(10);
    expect(() => view.setDraft(10, "x")).toThrow(RangeError);
  });

  it("disables submit until every turn has text", () => {
    const view = new TaskView(makeTask(3));
    expect(view.canSubmit()).toBe(false);
    view.setDraft(0, "one");
    view.setDraft(1, "   ");
    view.setDraft(2, "three");
    expect(view.canSubmit()).toBe(false);
    view.setDraft(1, "two");
    expect(view.canSubmit()).toBe(true);
  });

  it("mirrors server rejections per turn and clears on edit", () => {
    const view = new TaskView(makeTask(4));
    view.applyRejection([
      { turn_index: 0, missing: ["red"] },
      { turn_index: 3, missing: ["a descriptor of object 1"] },
    ]);
    expect(view.errorsFor(0)).toEqual(["red"]);
    expect(view.errorsFor(3)).toHaveLength(1);
    expect(view.hasErrors()).toBe(true);
    view.setDraft(0, "the red one please");
    expect(view.errorsFor(0)).toEqual([]);
    expect(view.errorsFor(3)).toHaveLength(1);
  });

  it("exposes frame objects for hover highlighting without mutating them", () => {
    const task = makeTask(4);
    const view = new TaskView(task);
    expect([...view.highlightFor(2)].sort()).toEqual([1, 4]);
    expect(view.highlightFor(1).size).toBe(0);
    view.setDraft(2, "anything");
    expect(task.turns[2].frame.objects).toEqual([1, 4]);
  });

  it("returns paraphrases aligned with turns", () => {
    const view = new TaskView(makeTask(2));
    view.setDraft(0, "first");
    view.setDraft(1, "second");
    expect(view.paraphrases()).toEqual(["first", "second"]);
  });
});
