/** Overlay primitives derived from state: plain data rendered into the SVG
 *  layer of each view panel. All coordinates are image pixels. */

import type { ViewState } from "./state.js";
import type { BoxCoords, Pair, View } from "./types.js";

export type OverlayShape =
  | { kind: "rect"; box: BoxCoords; cls: string }
  | { kind: "cross"; at: Pair; cls: string }
  | { kind: "hline"; v: number; cls: string };

export function overlayShapes(state: ViewState, view: View): OverlayShape[] {
  const shapes: OverlayShape[] = [];
  const label = state.label;

  if (state.overlays.ghost && state.prevLabel) {
    const ghostBox = view === "left" ? state.prevLabel.bbox_left
                                     : state.prevLabel.bbox_right;
    const ghostKpt = view === "left" ? state.prevLabel.kpt_left
                                     : state.prevLabel.kpt_right;
    if (ghostBox) shapes.push({ kind: "rect", box: ghostBox, cls: "ghost" });
    if (ghostKpt) shapes.push({ kind: "cross", at: ghostKpt, cls: "ghost" });
  }

  if (label && state.overlays.bbox) {
    const box = view === "left" ? label.bbox_left : label.bbox_right;
    if (box) shapes.push({ kind: "rect", box, cls: "bbox" });
  }
  if (label) {
    const kpt = view === "left" ? label.kpt_left : label.kpt_right;
    if (kpt) shapes.push({ kind: "cross", at: kpt, cls: "kpt" });
  }

  if (view === "left" && state.pendingLeft) {
    shapes.push({ kind: "cross", at: state.pendingLeft, cls: "pending" });
  }
  if (view === "right" && state.pendingLeft && state.overlays.guide) {
    shapes.push({ kind: "hline", v: state.pendingLeft[1], cls: "guide" });
  }
  return shapes;
}

export function shapeToSvg(shape: OverlayShape, imageWidth: number): string {
  switch (shape.kind) {
    case "rect": {
      const [u0, v0, u1, v1] = shape.box;
      return `<rect class="${shape.cls}" x="${u0}" y="${v0}" ` +
        `width="${u1 - u0}" height="${v1 - v0}"></rect>`;
    }
    case "cross": {
      const [u, v] = shape.at;
      const r = 4;
      return `<path class="${shape.cls}" d="M ${u - r} ${v} H ${u + r} ` +
        `M ${u} ${v - r} V ${v + r}"></path>`;
    }
    case "hline":
      return `<line class="${shape.cls}" x1="0" y1="${shape.v}" ` +
        `x2="${imageWidth}" y2="${shape.v}"></line>`;
  }
}
