import pytest
from fastapi.testclient import TestClient

from shoptalk.annotation import TaskStore
from shoptalk.server import create_app


@pytest.fixture()
def client(small_corpus):
    store = TaskStore()
    store.enqueue_corpus({**small_corpus, "dialogs": small_corpus["dialogs"][:5]})
    return TestClient(create_app(store))


def lease(client, worker="w1"):
    resp = client.get("/tasks/next", params={"worker": worker})
    assert resp.status_code == 200
    return resp.json()


def test_next_task_payload_shape(client):
    task = lease(client)
    assert task["state"] == "leased"
    assert task["lease"]["worker_id"] == "w1"
    assert task["turns"] and all("template_utterance" in t for t in task["turns"])
    assert task["snapshot_ids"]


def test_next_task_exhaustion_404(client):
    for i in range(5):
        lease(client, f"w{i}")
    resp = client.get("/tasks/next", params={"worker": "late"})
    assert resp.status_code == 404
    assert resp.json()["code"] == "no_open_tasks"


def test_submit_rejection_names_missing_entity(client):
    task = lease(client)
    texts = ["Sure, " + t["template_utterance"] for t in task["turns"]]
    slotted = next(i for i, t in enumerate(task["turns"]) if t["frame"]["slot_values"])
    value = sorted(task["turns"][slotted]["frame"]["slot_values"].values())[0]
    texts[slotted] = "This paraphrase forgot everything important."
    resp = client.post(f"/tasks/{task['task_id']}/submit",
                       json={"worker_id": "w1", "paraphrases": texts})
    assert resp.status_code == 422
    body = resp.json()
    assert body["code"] == "validation_failed"
    hit = [p for p in body["details"]
           if p["turn_index"] == task["turns"][slotted]["turn_index"]]
    assert hit and any(value in m for m in hit[0]["missing"])


def test_submit_acceptance_then_progress(client):
    task = lease(client)
    texts = ["Sure, " + t["template_utterance"] for t in task["turns"]]
    resp = client.post(f"/tasks/{task['task_id']}/submit",
                       json={"worker_id": "w1", "paraphrases": texts})
    assert resp.status_code == 200
    assert resp.json()["status"] == "approved"
    progress = client.get("/progress").json()
    assert progress["approved"] == 1
    assert progress["open"] == 4


def test_submit_wrong_worker_409(client):
    task = lease(client, "w1")
    texts = ["Sure, " + t["template_utterance"] for t in task["turns"]]
    resp = client.post(f"/tasks/{task['task_id']}/submit",
                       json={"worker_id": "intruder", "paraphrases": texts})
    assert resp.status_code == 409
    assert resp.json()["code"] == "lease_mismatch"


def test_get_task_and_404(client):
    task = lease(client)
    assert client.get(f"/tasks/{task['task_id']}").json()["task_id"] == task["task_id"]
    resp = client.get("/tasks/task-nope")
    assert resp.status_code == 404
    assert resp.json()["code"] == "not_found"


def test_overlay_endpoint(client):
    task = lease(client)
    sid = task["snapshot_ids"][0]
    resp = client.get(f"/snapshot/{sid}/overlay")
    assert resp.status_code == 200
    body = resp.json()
    assert body["image_size"] == [1024, 768]
    assert body["boxes"]
    box = body["boxes"][0]
    assert set(box) == {"local_index", "bbox", "item_id", "visibility"}
    assert client.get("/snapshot/nope/overlay").status_code == 404


def test_flag_endpoint(client):
    task = lease(client)
    resp = client.post(f"/tasks/{task['task_id']}/flag",
                       json={"worker_id": "w1", "reason": "objects unclear"})
    assert resp.status_code == 200
    assert client.get("/progress").json()["flagged"] == 1
