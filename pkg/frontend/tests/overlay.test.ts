import { describe, expect, it } from "vitest";

import { overlayShapes, shapeToSvg } from "../src/overlay.js";
import { initialState } from "../src/state.js";
import type { FrameLabelJson } from "../src/types.js";

const LABEL: FrameLabelJson = {
  frame: 3,
  kpt_left: [50, 40],
  kpt_right: [30, 40],
  bbox_left: [45, 35, 55, 45],
  bbox_right: [25, 35, 35, 45],
  is_difficult: false,
  is_visible_in_both_stereo: true,
};

describe("overlay shape derivation", () => {
  it("renders per-view boxes and keypoints", () => {
    const state = { ...initialState(), label: LABEL };
    const left = overlayShapes(state, "left");
    expect(left).toContainEqual({ kind: "rect", box: [45, 35, 55, 45], cls: "bbox" });
    expect(left).toContainEqual({ kind: "cross", at: [50, 40], cls: "kpt" });
    const right = overlayShapes(state, "right");
    expect(right).toContainEqual({ kind: "rect", box: [25, 35, 35, 45], cls: "bbox" });
  });

  it("hides boxes when the bbox overlay is toggled off", () => {
    const state = { ...initialState(), label: LABEL };
    state.overlays.bbox = false;
    expect(overlayShapes(state, "left").some((s) => s.kind === "rect")).toBe(false);
  });

  it("shows the previous frame as a ghost", () => {
    const state = { ...initialState(), label: null, prevLabel: LABEL };
    const shapes = overlayShapes(state, "left");
    expect(shapes).toContainEqual({ kind: "rect", box: [45, 35, 55, 45], cls: "ghost" });
    state.overlays.ghost = false;
    expect(overlayShapes(state, "left")).toHaveLength(0);
  });

  it("draws the pending cross on the left and the guide line on the right", () => {
    const state = { ...initialState(), label: LABEL, pendingLeft: [60, 22] as [number, number] };
    expect(overlayShapes(state, "left"))
      .toContainEqual({ kind: "cross", at: [60, 22], cls: "pending" });
    expect(overlayShapes(state, "right"))
      .toContainEqual({ kind: "hline", v: 22, cls: "guide" });
    state.overlays.guide = false;
    expect(overlayShapes(state, "right").some((s) => s.kind === "hline")).toBe(false);
  });
});

describe("svg serialization", () => {
  it("emits sized primitives", () => {
    expect(shapeToSvg({ kind: "rect", box: [1, 2, 4, 7], cls: "bbox" }, 100))
      .toBe('<rect class="bbox" x="1" y="2" width="3" height="5"></rect>');
    expect(shapeToSvg({ kind: "hline", v: 9, cls: "guide" }, 100))
      .toContain('x2="100" y2="9"');
    expect(shapeToSvg({ kind: "cross", at: [5, 6], cls: "kpt" }, 100))
      .toContain("M 1 6 H 9");
  });
});
