/** Pan/zoom transforms between screen (CSS pixel) and image coordinates.
 *  screen = image * scale + pan, per view. */

export interface PanZoom {
  scale: number;
  panX: number;
  panY: number;
}

export const IDENTITY: PanZoom = { scale: 1, panX: 0, panY: 0 };

export const MIN_SCALE = 0.25;
export const MAX_SCALE = 32;

export function screenToImage(pz: PanZoom, x: number, y: number): [number, number] {
  return [(x - pz.panX) / pz.scale, (y - pz.panY) / pz.scale];
}

export function imageToScreen(pz: PanZoom, u: number, v: number): [number, number] {
  return [u * pz.scale + pz.panX, v * pz.scale + pz.panY];
}

/** Rescale around a fixed screen point so the pixel under the cursor stays put. */
export function zoomAt(pz: PanZoom, x: number, y: number, factor: number): PanZoom {
  const scale = Math.min(MAX_SCALE, Math.max(MIN_SCALE, pz.scale * factor));
  const applied = scale / pz.scale;
  return {
    scale,
    panX: x - (x - pz.panX) * applied,
    panY: y - (y - pz.panY) * applied,
  };
}

export function panBy(pz: PanZoom, dx: number, dy: number): PanZoom {
  return { scale: pz.scale, panX: pz.panX + dx, panY: pz.panY + dy };
}

export function cssTransform(pz: PanZoom): string {
  return `translate(${pz.panX}px, ${pz.panY}px) scale(${pz.scale})`;
}

/** Constrain a right-view click onto the epipolar line of the left click:
 *  the v coordinate is inherited, only u is free. */
export function snapToGuide(leftV: number, rightU: number): [number, number] {
  return [rightU, leftV];
}
