"""Scene generation: seed-scene rearrangement, camera sampling, annotation.

A seed scene fixes the layout (placement slots plus static fixtures); each
rearrangement refills every slot with a catalog item from the slot's
compatibility group, rejecting placements that interpenetrate. Snapshots are
random camera views with per-object 2D boxes, occlusion-aware visibility, and
depth-ordered local indices.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

from .canonical import read_json
from .catalog import Catalog
from .errors import ConfigError, GenerationError, ValidationError
from .geometry import (
    Box3,
    Camera,
    ProjectedEntity,
    box_from_base,
    boxes_interpenetrate,
    pixel_bbox,
    project_boxes,
    visibility_fraction,
)
from .seeding import derive_rng


@dataclass(frozen=True)
class SceneGenConfig:
    rearrangements_per_seed: int = 20
    snapshots_per_instance: int = 10
    min_objects: int = 5
    base_height: float = 1.6
    height_jitter: float = 0.1
    vertical_fov_deg: float = 60.0
    pitch_deg: float = -5.0
    image_size: tuple[int, int] = (1024, 768)
    min_area_px: float = 400.0
    visibility_threshold: float = 0.05
    occlusion_grid: int = 64
    collision_tolerance: float = 0.01
    max_place_retries: int = 50
    camera_bounds_scale: float = 0.75
    near_plane: float = 0.05

    @staticmethod
    def from_dict(doc: dict) -> "SceneGenConfig":
        cfg = SceneGenConfig()
        known = set(cfg.__dataclass_fields__)
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown scene config keys: {sorted(unknown)}")
        if "image_size" in doc:
            doc = dict(doc, image_size=tuple(doc["image_size"]))
        return replace(cfg, **doc)

    def to_dict(self) -> dict:
        doc = {k: getattr(self, k) for k in self.__dataclass_fields__}
        doc["image_size"] = list(self.image_size)
        return doc


@dataclass(frozen=True)
class PlacementSlot:
    slot_id: str
    position: tuple[float, float, float]  # base-center of the placed object
    yaw: float
    allowed_group: str


@dataclass
class SeedScene:
    scene_id: str
    domain: str
    floor_min: tuple[float, float]  # (x, z)
    floor_max: tuple[float, float]
    slots: list[PlacementSlot]
    fixtures: list[Box3] = field(default_factory=list)


@dataclass
class SceneInstance:
    instance_id: str
    seed_id: str
    domain: str
    placements: dict[str, str]  # slot_id -> item_id
    object_world_boxes: dict[str, Box3]
    slot_order: list[str]
    fixtures: list[Box3]

    def to_dict(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "seed_id": self.seed_id,
            "domain": self.domain,
            "placements": dict(self.placements),
            "object_world_boxes": {
                sid: {"min": list(b.min), "max": list(b.max)}
                for sid, b in self.object_world_boxes.items()
            },
        }


@dataclass(frozen=True)
class ObjectAnnotation:
    local_index: int
    slot_id: str
    item_id: str
    bbox: tuple[int, int, int, int]  # x, y, w, h pixels
    visibility: float
    fully_visible: bool

    def to_dict(self) -> dict:
        return {
            "local_index": self.local_index,
            "slot_id": self.slot_id,
            "item_id": self.item_id,
            "bbox": list(self.bbox),
            "visibility": self.visibility,
            "fully_visible": self.fully_visible,
        }

    @staticmethod
    def from_dict(doc: dict) -> "ObjectAnnotation":
        return ObjectAnnotation(
            local_index=int(doc["local_index"]),
            slot_id=doc["slot_id"],
            item_id=doc["item_id"],
            bbox=tuple(int(v) for v in doc["bbox"]),
            visibility=float(doc["visibility"]),
            fully_visible=bool(doc["fully_visible"]),
        )


@dataclass
class SceneSnapshot:
    snapshot_id: str
    instance_id: str
    seed_id: str
    domain: str
    camera: Camera
    objects: list[ObjectAnnotation]

    def to_dict(self) -> dict:
        return {
            "snapshot_id": self.snapshot_id,
            "instance_id": self.instance_id,
            "seed_id": self.seed_id,
            "domain": self.domain,
            "camera": self.camera.to_dict(),
            "objects": [o.to_dict() for o in self.objects],
        }

    @staticmethod
    def from_dict(doc: dict) -> "SceneSnapshot":
        return SceneSnapshot(
            snapshot_id=doc["snapshot_id"],
            instance_id=doc["instance_id"],
            seed_id=doc["seed_id"],
            domain=doc["domain"],
            camera=Camera.from_dict(doc["camera"]),
            objects=[ObjectAnnotation.from_dict(o) for o in doc["objects"]],
        )


def seed_scene_from_dict(doc: dict) -> SeedScene:
    fmin = tuple(float(v) for v in doc["floor_bounds"]["min"])
    fmax = tuple(float(v) for v in doc["floor_bounds"]["max"])
    if fmin[0] >= fmax[0] or fmin[1] >= fmax[1]:
        raise ValidationError(f"scene {doc.get('scene_id')}: degenerate floor bounds")
    slots, seen = [], set()
    for raw in doc["slots"]:
        slot = PlacementSlot(
            slot_id=raw["slot_id"],
            position=tuple(float(v) for v in raw["position"]),
            yaw=float(raw.get("yaw", 0.0)),
            allowed_group=raw["allowed_group"],
        )
        if slot.slot_id in seen:
            raise ValidationError(f"duplicate slot_id {slot.slot_id!r}")
        seen.add(slot.slot_id)
        x, _, z = slot.position
        if not (fmin[0] <= x <= fmax[0] and fmin[1] <= z <= fmax[1]):
            raise ValidationError(f"slot {slot.slot_id!r} outside floor bounds")
        slots.append(slot)
    if len(slots) < 5:
        raise ValidationError(f"scene {doc.get('scene_id')}: needs >= 5 slots, has {len(slots)}")
    fixtures = [
        Box3(tuple(float(v) for v in fx["box"]["min"]), tuple(float(v) for v in fx["box"]["max"]))
        for fx in doc.get("fixtures", [])
    ]
    return SeedScene(
        scene_id=doc["scene_id"],
        domain=doc["domain"],
        floor_min=fmin,
        floor_max=fmax,
        slots=slots,
        fixtures=fixtures,
    )


def load_seed_scene(path) -> SeedScene:
    return seed_scene_from_dict(read_json(path))


def load_bundled_seed_scenes() -> list[SeedScene]:
    from .resources import bundled_seed_scene_names, load_bundled_json

    return [seed_scene_from_dict(load_bundled_json(f"seeds/{name}"))
            for name in bundled_seed_scene_names()]


def rearrange(seed: SeedScene, catalog: Catalog, rng, config: SceneGenConfig | None = None,
              instance_id: str | None = None) -> SceneInstance:
    """Fill every slot with a compatible item, retrying on interpenetration."""
    config = config or SceneGenConfig()
    placements: dict[str, str] = {}
    boxes: dict[str, Box3] = {}
    placed: list[Box3] = []
    for slot in seed.slots:
        candidates = catalog.by_group.get(slot.allowed_group, [])
        if not candidates:
            raise GenerationError(
                f"slot {slot.slot_id!r}: no catalog items in group {slot.allowed_group!r}"
            )
        x, y, z = slot.position
        for _ in range(config.max_place_retries):
            item = candidates[rng.randrange(len(candidates))]
            box = box_from_base(x, y, z, item.extent, slot.yaw)
            if not any(boxes_interpenetrate(box, other, config.collision_tolerance) for other in placed):
                placements[slot.slot_id] = item.item_id
                boxes[slot.slot_id] = box
                placed.append(box)
                break
        else:
            raise GenerationError(
                f"slot {slot.slot_id!r}: no collision-free item after "
                f"{config.max_place_retries} retries"
            )
    return SceneInstance(
        instance_id=instance_id or f"{seed.scene_id}-inst",
        seed_id=seed.scene_id,
        domain=seed.domain,
        placements=placements,
        object_world_boxes=boxes,
        slot_order=[s.slot_id for s in seed.slots],
        fixtures=list(seed.fixtures),
    )


def sample_camera(seed: SeedScene, config: SceneGenConfig, rng) -> Camera:
    """Camera inside the centrally scaled floor rect, uniform yaw, jittered height."""
    scale = config.camera_bounds_scale
    cx = (seed.floor_min[0] + seed.floor_max[0]) / 2.0
    cz = (seed.floor_min[1] + seed.floor_max[1]) / 2.0
    half_x = (seed.floor_max[0] - seed.floor_min[0]) / 2.0 * scale
    half_z = (seed.floor_max[1] - seed.floor_min[1]) / 2.0 * scale
    x = rng.uniform(cx - half_x, cx + half_x)
    z = rng.uniform(cz - half_z, cz + half_z)
    height = config.base_height + rng.uniform(-config.height_jitter, config.height_jitter)
    yaw = rng.uniform(0.0, 2.0 * math.pi)
    return Camera(
        position=(x, height, z),
        yaw=yaw,
        pitch=math.radians(config.pitch_deg),
        vertical_fov=math.radians(config.vertical_fov_deg),
        image_size=config.image_size,
    )


def capture_snapshot(instance: SceneInstance, camera: Camera, config: SceneGenConfig,
                     snapshot_id: str = "snap") -> SceneSnapshot:
    """Project, occlusion-test, filter, and index the instance's objects."""
    boxes = [instance.object_world_boxes[sid] for sid in instance.slot_order] + instance.fixtures
    ents = project_boxes(camera, boxes, config.near_plane)
    projected: dict[str, ProjectedEntity] = {
        sid: ent for sid, ent in zip(instance.slot_order, ents) if ent is not None
    }
    occluder_pool = [ent for ent in ents if ent is not None]

    kept: list[tuple[float, str, ProjectedEntity, float]] = []
    for slot_id in instance.slot_order:
        ent = projected.get(slot_id)
        if ent is None or ent.area < config.min_area_px:
            continue
        others = [o for o in occluder_pool if o is not ent]
        vis = visibility_fraction(ent, others, config.occlusion_grid)
        if vis <= config.visibility_threshold:
            continue
        kept.append((ent.depth, slot_id, ent, vis))

    kept.sort(key=lambda row: (row[0], row[1]))
    objects = []
    for index, (_, slot_id, ent, vis) in enumerate(kept):
        vis = round(vis, 4)
        objects.append(ObjectAnnotation(
            local_index=index,
            slot_id=slot_id,
            item_id=instance.placements[slot_id],
            bbox=pixel_bbox(ent.rect, camera.image_size),
            visibility=vis,
            fully_visible=vis >= 0.999,
        ))
    return SceneSnapshot(
        snapshot_id=snapshot_id,
        instance_id=instance.instance_id,
        seed_id=instance.seed_id,
        domain=instance.domain,
        camera=camera,
        objects=objects,
    )


def accept_snapshot(snapshot: SceneSnapshot, min_objects: int = 5) -> bool:
    return len(snapshot.objects) >= min_objects


@dataclass
class PoolResult:
    snapshots: list[SceneSnapshot]
    candidates_total: int


def _instance_snapshots(seed: SeedScene, catalog: Catalog, config: SceneGenConfig,
                        master_seed: int, k: int) -> list[SceneSnapshot]:
    rng = derive_rng(master_seed, "rearrange", seed.scene_id, k)
    instance = rearrange(seed, catalog, rng, config, instance_id=f"{seed.scene_id}-r{k:02d}")
    out = []
    for j in range(config.snapshots_per_instance):
        cam_rng = derive_rng(master_seed, "camera", seed.scene_id, k, j)
        camera = sample_camera(seed, config, cam_rng)
        out.append(capture_snapshot(instance, camera, config,
                                    snapshot_id=f"{instance.instance_id}-s{j:02d}"))
    return out


def generate_candidates(seeds: list[SeedScene], catalogs: dict[str, Catalog],
                        config: SceneGenConfig, master_seed: int,
                        workers: int = 1) -> list[SceneSnapshot]:
    """Every snapshot before the min-object filter, in (seed, instance, view) order."""
    if not seeds:
        raise GenerationError("no seed scenes given")
    jobs = [(seed, k) for seed in seeds for k in range(config.rearrangements_per_seed)]

    def run(job):
        seed, k = job
        return _instance_snapshots(seed, catalogs[seed.domain], config, master_seed, k)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(run, jobs))
    else:
        batches = [run(job) for job in jobs]
    return [snap for batch in batches for snap in batch]


def generate_pool(seeds: list[SeedScene], catalogs: dict[str, Catalog],
                  config: SceneGenConfig, master_seed: int, workers: int = 1) -> PoolResult:
    """Candidate snapshots filtered to those with enough annotated objects."""
    candidates = generate_candidates(seeds, catalogs, config, master_seed, workers)
    kept = [s for s in candidates if accept_snapshot(s, config.min_objects)]
    return PoolResult(snapshots=kept, candidates_total=len(candidates))


def pool_to_dict(pool: PoolResult, config: SceneGenConfig, master_seed: int) -> dict:
    return {
        "schema_version": 1,
        "master_seed": master_seed,
        "config": config.to_dict(),
        "candidates_total": pool.candidates_total,
        "snapshots": [s.to_dict() for s in pool.snapshots],
    }


def pool_from_dict(doc: dict) -> PoolResult:
    return PoolResult(
        snapshots=[SceneSnapshot.from_dict(s) for s in doc["snapshots"]],
        candidates_total=int(doc.get("candidates_total", len(doc["snapshots"]))),
    )
