export interface VideoInfo {
  id: string;
  case: string;
  frame_count: number;
  revision: number;
  width: number;
  height: number;
}

export type Pair = [number, number];
export type BoxCoords = [number, number, number, number]; // u0, v0, u1, v1

export interface FrameLabelJson {
  frame: number;
  kpt_left: Pair | null;
  kpt_right: Pair | null;
  bbox_left: BoxCoords | null;
  bbox_right: BoxCoords | null;
  is_difficult: boolean;
  is_visible_in_both_stereo: boolean;
}

export interface FrameEnvelope {
  video: string;
  frame: number;
  frame_count: number;
  revision: number;
  label: FrameLabelJson;
}

export interface KeypointsReply {
  video: string;
  frame: number;
  revision: number;
  keypoint_left: Pair;
  keypoint_right: Pair;
  bbox: { left: BoxCoords; right: BoxCoords };
}

export interface FlagsReply {
  video: string;
  frame: number;
  revision: number;
  label: FrameLabelJson;
}

export interface ReviewDiffEntry {
  frame: number;
  displacement_px: number;
}

export interface ReviewDiffReply {
  video: string;
  threshold: number;
  frames: ReviewDiffEntry[];
}

export type View = "left" | "right";
