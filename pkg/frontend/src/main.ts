import { AnnotClient } from "./api";
import { bootTask } from "./render";

function workerId(): string {
  const stored = window.localStorage.getItem("worker_id");
  if (stored) return stored;
  const entered = window.prompt("Enter your worker id:") || `worker-${Date.now()}`;
  window.localStorage.setItem("worker_id", entered);
  return entered;
}

window.addEventListener("DOMContentLoaded", () => {
  const root = document.getElementById("app");
  if (!root) return;
  void bootTask({ client: new AnnotClient(), worker: workerId(), root });
});
