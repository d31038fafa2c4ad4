/** UI state and its pure transitions. The server label is the only truth;
 *  the store caches what was last confirmed plus transient interaction
 *  state (pending left click, overlay toggles, review queue). */

import { IDENTITY, type PanZoom } from "./geometry.js";
import type { FrameLabelJson, Pair, VideoInfo } from "./types.js";

export interface Overlays {
  bbox: boolean;
  ghost: boolean;
  guide: boolean;
}

export interface ViewState {
  video: VideoInfo | null;
  frame: number;
  revision: number;
  label: FrameLabelJson | null;
  prevLabel: FrameLabelJson | null;
  pendingLeft: Pair | null;
  overlays: Overlays;
  zoom: { left: PanZoom; right: PanZoom };
  reviewQueue: number[];
  banner: string | null;
}

export function initialState(): ViewState {
  return {
    video: null,
    frame: 0,
    revision: 0,
    label: null,
    prevLabel: null,
    pendingLeft: null,
    overlays: { bbox: true, ghost: true, guide: true },
    zoom: { left: { ...IDENTITY }, right: { ...IDENTITY } },
    reviewQueue: [],
    banner: null,
  };
}

/** Keypoint placement is blocked once an annotated frame is flagged not
 *  visible; unannotated frames stay clickable because placing the first
 *  keypoint pair is what marks them visible. */
export function canPlaceKeypoints(label: FrameLabelJson | null): boolean {
  if (!label) return false;
  if (label.kpt_left !== null && !label.is_visible_in_both_stereo) return false;
  return true;
}

export function clampFrame(state: ViewState, frame: number): number {
  if (!state.video) return 0;
  return Math.max(0, Math.min(state.video.frame_count - 1, frame));
}

export function stepFrame(state: ViewState, delta: number): number {
  return clampFrame(state, state.frame + delta);
}

/** Next review-queue frame strictly after the current one (wraps around). */
export function nextReviewFrame(state: ViewState): number | null {
  if (state.reviewQueue.length === 0) return null;
  for (const frame of state.reviewQueue) {
    if (frame > state.frame) return frame;
  }
  return state.reviewQueue[0] ?? null;
}

export function placeLeftClick(state: ViewState, point: Pair): ViewState {
  if (!canPlaceKeypoints(state.label)) {
    return { ...state, banner: "frame is flagged not visible; toggle visibility to edit" };
  }
  return { ...state, pendingLeft: point, banner: null };
}

export function clearPending(state: ViewState): ViewState {
  return { ...state, pendingLeft: null };
}

export function currentGuideV(state: ViewState): number | null {
  if (!state.overlays.guide) return null;
  if (state.pendingLeft) return state.pendingLeft[1];
  return null;
}
