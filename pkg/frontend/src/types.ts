export interface Frame {
  act: string;
  activity: string;
  request_slots: string[];
  slot_values: Record<string, string>;
  objects: number[];
  disambiguation_label?: boolean;
}

export interface TaskTurn {
  turn_index: number;
  speaker: "user" | "assistant";
  template_utterance: string;
  active_snapshot: string;
  frame: Frame;
  object_phrases?: Record<string, string>;
}

export interface Task {
  task_id: string;
  dialog_id: string;
  state: string;
  domain: string;
  snapshot_ids: string[];
  viewpoint_switch_turn: number | null;
  turns: TaskTurn[];
}

export interface OverlayBox {
  local_index: number;
  bbox: [number, number, number, number];
  item_id: string;
  visibility: number;
}

export interface Overlay {
  snapshot_id: string;
  image_size: [number, number];
  boxes: OverlayBox[];
}

export interface RejectionDetail {
  turn_index: number | null;
  missing: string[];
}

export interface Progress {
  open: number;
  leased: number;
  submitted: number;
  approved: number;
  flagged: number;
  total: number;
}
