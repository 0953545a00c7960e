import { Box } from './types.js';

/** Minimum box side in pixels; smaller drags are discarded with a hint. */
export const MIN_BOX_SIDE = 4;

/** Turn a drag gesture into a normalized integer box (reversed drags ok). */
export function normalizeDrag(x0: number, y0: number, x1: number, y1: number): Box {
  const x = Math.round(Math.min(x0, x1));
  const y = Math.round(Math.min(y0, y1));
  return {
    x,
    y,
    w: Math.round(Math.max(x0, x1)) - x,
    h: Math.round(Math.max(y0, y1)) - y,
  };
}

/**
 * Clamp a box so it sits fully inside the image with the 1-pixel margin the
 * service requires on every side.
 */
export function clampToMargin(box: Box, imgW: number, imgH: number): Box {
  let x = Math.max(1, box.x);
  let y = Math.max(1, box.y);
  let w = Math.min(box.w, imgW - 1 - x);
  let h = Math.min(box.h, imgH - 1 - y);
  w = Math.max(1, w);
  h = Math.max(1, h);
  if (x + w > imgW - 1) x = Math.max(1, imgW - 1 - w);
  if (y + h > imgH - 1) y = Math.max(1, imgH - 1 - h);
  return { x, y, w, h };
}

export function isDegenerate(box: Box): boolean {
  return box.w < MIN_BOX_SIDE || box.h < MIN_BOX_SIDE;
}

/**
 * Drag gesture to a committed box, or null when the drag is degenerate.
 */
export function dragToBox(
  x0: number,
  y0: number,
  x1: number,
  y1: number,
  imgW: number,
  imgH: number,
): Box | null {
  const normalized = normalizeDrag(x0, y0, x1, y1);
  if (isDegenerate(normalized)) return null;
  const clamped = clampToMargin(normalized, imgW, imgH);
  return isDegenerate(clamped) ? null : clamped;
}

export type HandleId = 'nw' | 'n' | 'ne' | 'e' | 'se' | 's' | 'sw' | 'w';

export interface Handle {
  id: HandleId;
  x: number;
  y: number;
}

/** Positions of the eight adjustment handles on the box outline. */
export function handlePositions(box: Box): Handle[] {
  const cx = box.x + box.w / 2;
  const cy = box.y + box.h / 2;
  return [
    { id: 'nw', x: box.x, y: box.y },
    { id: 'n', x: cx, y: box.y },
    { id: 'ne', x: box.x + box.w, y: box.y },
    { id: 'e', x: box.x + box.w, y: cy },
    { id: 'se', x: box.x + box.w, y: box.y + box.h },
    { id: 's', x: cx, y: box.y + box.h },
    { id: 'sw', x: box.x, y: box.y + box.h },
    { id: 'w', x: box.x, y: cy },
  ];
}

/** Apply a handle drag, keeping the box normalized; returns the moved box. */
export function resizeByHandle(box: Box, handle: HandleId, dx: number, dy: number): Box {
  let x0 = box.x;
  let y0 = box.y;
  let x1 = box.x + box.w;
  let y1 = box.y + box.h;
  if (handle.includes('w')) x0 += dx;
  if (handle.includes('e')) x1 += dx;
  if (handle.includes('n')) y0 += dy;
  if (handle.includes('s')) y1 += dy;
  return normalizeDrag(x0, y0, x1, y1);
}
