import type { Overlay, OverlayBox } from "./types";

export interface CanvasScale {
  scale: number;
  width: number;
  height: number;
}

/** Fit the camera image into maxWidth, preserving aspect ratio. */
export function computeScale(imageSize: [number, number], maxWidth = 680): CanvasScale {
  const [w, h] = imageSize;
  const scale = Math.min(1, maxWidth / w);
  return { scale, width: Math.round(w * scale), height: Math.round(h * scale) };
}

export function boxToCanvas(
  bbox: [number, number, number, number],
  scale: number,
): [number, number, number, number] {
  return [bbox[0] * scale, bbox[1] * scale, bbox[2] * scale, bbox[3] * scale];
}

/**
 * Topmost box under the cursor; smaller boxes win so cluttered scenes stay
 * clickable. Returns the local_index or null.
 */
export function hitTest(boxes: OverlayBox[], scale: number, x: number, y: number): number | null {
  let best: OverlayBox | null = null;
  for (const box of boxes) {
    const [bx, by, bw, bh] = boxToCanvas(box.bbox, scale);
    if (x >= bx && x <= bx + bw && y >= by && y <= by + bh) {
      if (best === null || bw * bh < best.bbox[2] * best.bbox[3] * scale * scale) {
        best = box;
      }
    }
  }
  return best ? best.local_index : null;
}

export function drawOverlay(
  ctx: CanvasRenderingContext2D,
  overlay: Overlay,
  scale: CanvasScale,
  highlighted: Set<number>,
): void {
  ctx.clearRect(0, 0, scale.width, scale.height);
  ctx.fillStyle = "#f4f4ef";
  ctx.fillRect(0, 0, scale.width, scale.height);
  ctx.font = "11px sans-serif";
  for (const box of overlay.boxes) {
    const [x, y, w, h] = boxToCanvas(box.bbox, scale.scale);
    const hot = highlighted.has(box.local_index);
    ctx.lineWidth = hot ? 2.5 : 1;
    ctx.strokeStyle = hot ? "#cc3311" : "#4477aa";
    ctx.strokeRect(x, y, w, h);
    ctx.fillStyle = hot ? "#cc3311" : "#333333";
    ctx.fillText(String(box.local_index), x + 3, y + 12);
  }
}
