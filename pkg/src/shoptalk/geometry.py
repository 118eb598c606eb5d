"""Pinhole-camera geometry for the proxy scene model.

World frame: x/z span the floor, y is up, meters throughout. The camera has
yaw (about +y; 0 faces +z), pitch (positive looks up), no roll. Objects and
fixtures are axis-aligned 3D boxes; a projected entity is the 2D pixel
bounding rectangle of its box corners plus a scalar depth (camera-space z of
the box center). Occlusion is evaluated on that rectangle+depth model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Box3:
    """Axis-aligned box, min/max corners in meters."""

    min: tuple[float, float, float]
    max: tuple[float, float, float]

    def corners(self) -> np.ndarray:
        x0, y0, z0 = self.min
        x1, y1, z1 = self.max
        return np.array([
            [x0, y0, z0], [x1, y0, z0], [x0, y1, z0], [x1, y1, z0],
            [x0, y0, z1], [x1, y0, z1], [x0, y1, z1], [x1, y1, z1],
        ])

    def center(self) -> tuple[float, float, float]:
        return tuple((a + b) / 2.0 for a, b in zip(self.min, self.max))


def box_from_base(center_x: float, base_y: float, center_z: float,
                  extent: tuple[float, float, float], yaw: float = 0.0) -> Box3:
    """Box for an object standing on ``base_y``, yawed footprint re-boxed to an AABB."""
    w, h, d = extent
    c, s = abs(math.cos(yaw)), abs(math.sin(yaw))
    half_w = (w * c + d * s) / 2.0
    half_d = (w * s + d * c) / 2.0
    return Box3(
        (center_x - half_w, base_y, center_z - half_d),
        (center_x + half_w, base_y + h, center_z + half_d),
    )


def boxes_interpenetrate(a: Box3, b: Box3, tolerance: float) -> bool:
    """True when the boxes overlap by more than ``tolerance`` on every axis."""
    for axis in range(3):
        overlap = min(a.max[axis], b.max[axis]) - max(a.min[axis], b.min[axis])
        if overlap <= tolerance:
            return False
    return True


@dataclass(frozen=True)
class Camera:
    position: tuple[float, float, float]
    yaw: float
    pitch: float
    vertical_fov: float
    image_size: tuple[int, int]

    def to_dict(self) -> dict:
        return {
            "position": list(self.position),
            "yaw": self.yaw,
            "pitch": self.pitch,
            "vertical_fov": self.vertical_fov,
            "image_size": list(self.image_size),
        }

    @staticmethod
    def from_dict(doc: dict) -> "Camera":
        return Camera(
            position=tuple(doc["position"]),
            yaw=float(doc["yaw"]),
            pitch=float(doc["pitch"]),
            vertical_fov=float(doc["vertical_fov"]),
            image_size=tuple(int(v) for v in doc["image_size"]),
        )


def camera_basis(camera: Camera) -> np.ndarray:
    """Rows: right, up, forward unit vectors in world coordinates."""
    psi, theta = camera.yaw, camera.pitch
    forward = np.array([math.cos(theta) * math.sin(psi),
                        math.sin(theta),
                        math.cos(theta) * math.cos(psi)])
    right = np.array([math.cos(psi), 0.0, -math.sin(psi)])
    up = np.cross(forward, right)
    return np.stack([right, up, forward])


def focal_length_px(camera: Camera) -> float:
    _, height = camera.image_size
    return (height / 2.0) / math.tan(camera.vertical_fov / 2.0)


# Index pairs of Box3.corners() forming the 12 box edges.
_EDGES = (
    (0, 1), (2, 3), (4, 5), (6, 7),
    (0, 2), (1, 3), (4, 6), (5, 7),
    (0, 4), (1, 5), (2, 6), (3, 7),
)


@dataclass(frozen=True)
class ProjectedEntity:
    """Clipped pixel rectangle (x0, y0, x1, y1 floats) plus camera depth."""

    rect: tuple[float, float, float, float]
    depth: float

    @property
    def area(self) -> float:
        x0, y0, x1, y1 = self.rect
        return max(0.0, x1 - x0) * max(0.0, y1 - y0)


def project_box(camera: Camera, box: Box3, near: float = 0.05) -> ProjectedEntity | None:
    """Project a box to its clipped pixel rect; None when outside the frustum.

    Corners behind the near plane are handled by clipping box edges against
    z = near before projecting, so boxes straddling the camera plane still
    produce a finite rectangle.
    """
    basis = camera_basis(camera)
    cam = (box.corners() - np.asarray(camera.position)) @ basis.T
    z = cam[:, 2]
    if np.all(z <= near):
        return None

    points = [cam[z > near]]
    behind, front = z <= near, z > near
    if behind.any():
        for a, b in _EDGES:
            if behind[a] != behind[b]:
                pa, pb = (cam[a], cam[b]) if front[a] else (cam[b], cam[a])
                t = (pa[2] - near) / (pa[2] - pb[2])
                points.append((pa + t * (pb - pa))[None, :])
    pts = np.concatenate(points)

    width, height = camera.image_size
    f = focal_length_px(camera)
    xs = width / 2.0 + f * pts[:, 0] / pts[:, 2]
    ys = height / 2.0 - f * pts[:, 1] / pts[:, 2]
    x0, x1 = max(0.0, float(xs.min())), min(float(width), float(xs.max()))
    y0, y1 = max(0.0, float(ys.min())), min(float(height), float(ys.max()))
    if x1 <= x0 or y1 <= y0:
        return None

    center_depth = float((np.asarray(box.center()) - np.asarray(camera.position)) @ basis[2])
    return ProjectedEntity(rect=(x0, y0, x1, y1), depth=max(center_depth, near))


def project_boxes(camera: Camera, boxes: list[Box3], near: float = 0.05) -> list[ProjectedEntity | None]:
    """Batched ``project_box`` over many boxes for one camera.

    The fully-in-front case is vectorized; boxes straddling the near plane
    fall back to the edge-clipping path.
    """
    if not boxes:
        return []
    basis = camera_basis(camera)
    corners = np.stack([b.corners() for b in boxes])  # (n, 8, 3)
    cam = (corners - np.asarray(camera.position)) @ basis.T
    z = cam[:, :, 2]
    width, height = camera.image_size
    f = focal_length_px(camera)

    out: list[ProjectedEntity | None] = [None] * len(boxes)
    front = z > near
    easy = front.all(axis=1)
    if easy.any():
        xs = width / 2.0 + f * cam[:, :, 0] / z
        ys = height / 2.0 - f * cam[:, :, 1] / z
        x0 = np.maximum(0.0, xs.min(axis=1))
        x1 = np.minimum(float(width), xs.max(axis=1))
        y0 = np.maximum(0.0, ys.min(axis=1))
        y1 = np.minimum(float(height), ys.max(axis=1))
        centers = (np.stack([np.asarray(b.center()) for b in boxes]) - np.asarray(camera.position)) @ basis[2]
        for i in np.flatnonzero(easy):
            if x1[i] > x0[i] and y1[i] > y0[i]:
                out[i] = ProjectedEntity(
                    rect=(float(x0[i]), float(y0[i]), float(x1[i]), float(y1[i])),
                    depth=max(float(centers[i]), near),
                )
    for i in np.flatnonzero(~easy):
        out[i] = project_box(camera, boxes[i], near)
    return out


def _cell_span(lo: float, hi: float, origin: float, step: float, cells: int) -> tuple[int, int]:
    """Index range [i0, i1) of cells whose centers fall inside [lo, hi]."""
    i0 = math.ceil((lo - origin) / step - 0.5)
    i1 = math.floor((hi - origin) / step - 0.5) + 1
    return max(0, i0), min(cells, i1)


def visibility_fraction(target: ProjectedEntity, occluders: list[ProjectedEntity],
                        grid: int = 64) -> float:
    """Unoccluded fraction of the target rect, sampled on a grid x grid lattice.

    Cell centers inside any strictly nearer entity's rectangle count as
    covered. The lattice spans the target's own rectangle, so resolution is
    relative to the object: finer grids converge to the exact rect-union
    answer regardless of object size in the image.
    """
    nearer = [e for e in occluders if e.depth < target.depth]
    if not nearer:
        return 1.0
    tx0, ty0, tx1, ty1 = target.rect
    dx, dy = (tx1 - tx0) / grid, (ty1 - ty0) / grid
    covered = np.zeros((grid, grid), dtype=bool)
    for ent in nearer:
        ox0, oy0, ox1, oy1 = ent.rect
        ix0, ix1 = _cell_span(max(ox0, tx0), min(ox1, tx1), tx0, dx, grid)
        iy0, iy1 = _cell_span(max(oy0, ty0), min(oy1, ty1), ty0, dy, grid)
        if ix0 < ix1 and iy0 < iy1:
            covered[iy0:iy1, ix0:ix1] = True
    return float(1.0 - covered.mean())


def pixel_bbox(rect: tuple[float, float, float, float], image_size: tuple[int, int]) -> tuple[int, int, int, int]:
    """Integer [x, y, w, h] covering the float rect, clamped to the image."""
    width, height = image_size
    x0, y0, x1, y1 = rect
    x = max(0, math.floor(x0))
    y = max(0, math.floor(y0))
    w = max(1, min(width, math.ceil(x1)) - x)
    h = max(1, min(height, math.ceil(y1)) - y)
    return x, y, w, h
