import type { Overlay, Progress, RejectionDetail, Task } from "./types";

export class ApiError extends Error {
  status: number;
  code: string;
  details: RejectionDetail[];

  constructor(status: number, code: string, message: string, details: RejectionDetail[] = []) {
    super(message);
    this.status = status;
    this.code = code;
    this.details = details;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function asApiError(resp: Response): Promise<ApiError> {
  let code = "http_error";
  let message = `${resp.status}`;
  let details: RejectionDetail[] = [];
  try {
    const body = await resp.json();
    code = body.code ?? code;
    message = body.message ?? message;
    details = body.details ?? [];
  } catch {
    // non-JSON error body; keep defaults
  }
  return new ApiError(resp.status, code, message, details);
}

export class AnnotClient {
  private fetchImpl: FetchLike;
  private base: string;

  constructor(base = "", fetchImpl?: FetchLike) {
    this.base = base;
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  /** Lease the next open task; null when the queue is empty. */
  async nextTask(worker: string): Promise<Task | null> {
    const resp = await this.fetchImpl(
      `${this.base}/tasks/next?worker=${encodeURIComponent(worker)}`,
    );
    if (resp.status === 404) return null;
    if (!resp.ok) throw await asApiError(resp);
    return (await resp.json()) as Task;
  }

  async overlay(snapshotId: string): Promise<Overlay> {
    const resp = await this.fetchImpl(
      `${this.base}/snapshot/${encodeURIComponent(snapshotId)}/overlay`,
    );
    if (!resp.ok) throw await asApiError(resp);
    return (await resp.json()) as Overlay;
  }

  async submit(taskId: string, worker: string, paraphrases: string[]): Promise<void> {
    const resp = await this.fetchImpl(`${this.base}/tasks/${encodeURIComponent(taskId)}/submit`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ worker_id: worker, paraphrases }),
    });
    if (!resp.ok) throw await asApiError(resp);
  }

  async flag(taskId: string, worker: string, reason: string): Promise<void> {
    const resp = await this.fetchImpl(`${this.base}/tasks/${encodeURIComponent(taskId)}/flag`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ worker_id: worker, reason }),
    });
    if (!resp.ok) throw await asApiError(resp);
  }

  async progress(): Promise<Progress> {
    const resp = await this.fetchImpl(`${this.base}/progress`);
    if (!resp.ok) throw await asApiError(resp);
    return (await resp.json()) as Progress;
  }
}
