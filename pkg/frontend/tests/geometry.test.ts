import { describe, expect, it } from "vitest";

import {
  IDENTITY,
  MAX_SCALE,
  MIN_SCALE,
  cssTransform,
  imageToScreen,
  panBy,
  screenToImage,
  snapToGuide,
  zoomAt,
} from "../src/geometry.js";

describe("pan/zoom transforms", () => {
  it("identity maps screen to image unchanged", () => {
    expect(screenToImage(IDENTITY, 42, 17)).toEqual([42, 17]);
    expect(imageToScreen(IDENTITY, 42, 17)).toEqual([42, 17]);
  });

  it("screenToImage inverts imageToScreen", () => {
    const pz = { scale: 2.5, panX: -30, panY: 12 };
    const [sx, sy] = imageToScreen(pz, 100, 60);
    const [u, v] = screenToImage(pz, sx, sy);
    expect(u).toBeCloseTo(100, 9);
    expect(v).toBeCloseTo(60, 9);
  });

  it("zoomAt keeps the anchor pixel fixed", () => {
    let pz = { scale: 1, panX: 0, panY: 0 };
    const before = screenToImage(pz, 80, 50);
    pz = zoomAt(pz, 80, 50, 2.0);
    const after = screenToImage(pz, 80, 50);
    expect(after[0]).toBeCloseTo(before[0], 9);
    expect(after[1]).toBeCloseTo(before[1], 9);
    expect(pz.scale).toBe(2);
  });

  it("zoom clamps to the configured range", () => {
    let pz = { ...IDENTITY };
    for (let i = 0; i < 50; i++) pz = zoomAt(pz, 0, 0, 10);
    expect(pz.scale).toBe(MAX_SCALE);
    for (let i = 0; i < 80; i++) pz = zoomAt(pz, 0, 0, 0.1);
    expect(pz.scale).toBe(MIN_SCALE);
  });

  it("panBy shifts without rescaling", () => {
    const pz = panBy({ scale: 3, panX: 5, panY: 5 }, 10, -4);
    expect(pz).toEqual({ scale: 3, panX: 15, panY: 1 });
  });

  it("cssTransform renders translate-then-scale", () => {
    expect(cssTransform({ scale: 2, panX: 3, panY: -4 }))
      .toBe("translate(3px, -4px) scale(2)");
  });
});

describe("epipolar guide snapping", () => {
  it("inherits v from the left click and keeps u free", () => {
    expect(snapToGuide(120.5, 88)).toEqual([88, 120.5]);
  });
});
