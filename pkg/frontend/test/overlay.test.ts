import { describe, expect, it } from "vitest";

import { boxToCanvas, computeScale, hitTest } from "../src/overlay";
import type { OverlayBox } from "../src/types";

const boxes: OverlayBox[] = [
  { local_index: 0, bbox: [100, 100, 400, 300], item_id: "a", visibility: 1.0 },
  { local_index: 1, bbox: [150, 150, 100, 80], item_id: "b", visibility: 0.6 },
  { local_index: 2, bbox: [700, 500, 50, 60], item_id: "c", visibility: 0.9 },
];

describe("computeScale", () => {
  it("fits wide images into the max width", () => {
    const scale = computeScale([1024, 768], 680);
    expect(scale.scale).toBeCloseTo(680 / 1024);
    expect(scale.width).toBe(680);
    expect(scale.height).toBe(Math.round(768 * (680 / 1024)));
  });

  it("never upscales small images", () => {
    expect(computeScale([320, 240], 680).scale).toBe(1);
  });
});

describe("boxToCanvas", () => {
  it("scales all four components", () => {
    expect(boxToCanvas([10, 20, 30, 40], 0.5)).toEqual([5, 10, 15, 20]);
  });
});

describe("hitTest", () => {
  it("returns null off every box", () => {
    expect(hitTest(boxes, 1, 5, 5)).toBeNull();
  });

  it("prefers the smallest box under the cursor", () => {
    // (200, 200) is inside box 0 and the smaller box 1
    expect(hitTest(boxes, 1, 200, 200)).toBe(1);
    expect(hitTest(boxes, 1, 450, 350)).toBe(0);
  });

  it("respects the canvas scale", () => {
    expect(hitTest(boxes, 0.5, 360, 265)).toBe(2);
    expect(hitTest(boxes, 1, 360, 265)).toBe(0);
  });
});
