import { describe, expect, it } from 'vitest';

import {
  clampToMargin,
  dragToBox,
  handlePositions,
  isDegenerate,
  normalizeDrag,
  resizeByHandle,
} from '../src/box';

describe('normalizeDrag', () => {
  it('maps a forward drag to the expected box', () => {
    expect(normalizeDrag(10, 10, 110, 90)).toEqual({ x: 10, y: 10, w: 100, h: 80 });
  });

  it('normalizes a reversed drag to the same box', () => {
    expect(normalizeDrag(110, 90, 10, 10)).toEqual({ x: 10, y: 10, w: 100, h: 80 });
  });

  it('normalizes mixed-corner drags', () => {
    expect(normalizeDrag(110, 10, 10, 90)).toEqual({ x: 10, y: 10, w: 100, h: 80 });
  });

  it('snaps fractional gesture coordinates to pixels', () => {
    const box = normalizeDrag(10.4, 9.6, 110.2, 90.4);
    expect(box).toEqual({ x: 10, y: 10, w: 100, h: 80 });
  });
});

describe('clampToMargin', () => {
  it('keeps one pixel of margin on every side', () => {
    const box = clampToMargin({ x: 0, y: 0, w: 200, h: 200 }, 120, 100);
    expect(box.x).toBeGreaterThanOrEqual(1);
    expect(box.y).toBeGreaterThanOrEqual(1);
    expect(box.x + box.w).toBeLessThanOrEqual(119);
    expect(box.y + box.h).toBeLessThanOrEqual(99);
  });

  it('leaves interior boxes alone', () => {
    const box = { x: 12, y: 8, w: 40, h: 30 };
    expect(clampToMargin(box, 120, 100)).toEqual(box);
  });
});

describe('dragToBox', () => {
  it('discards degenerate drags', () => {
    expect(dragToBox(20, 20, 22, 60, 120, 100)).toBeNull();
    expect(dragToBox(20, 20, 60, 23, 120, 100)).toBeNull();
  });

  it('accepts a minimal 4x4 drag', () => {
    expect(dragToBox(20, 20, 24, 24, 120, 100)).toEqual({ x: 20, y: 20, w: 4, h: 4 });
  });

  it('clamps an edge-to-edge drag into the margin', () => {
    const box = dragToBox(0, 0, 120, 100, 120, 100)!;
    expect(box.x).toBe(1);
    expect(box.y).toBe(1);
    expect(box.x + box.w).toBeLessThanOrEqual(119);
    expect(box.y + box.h).toBeLessThanOrEqual(99);
  });
});

describe('isDegenerate', () => {
  it('flags thin boxes', () => {
    expect(isDegenerate({ x: 0, y: 0, w: 3, h: 50 })).toBe(true);
    expect(isDegenerate({ x: 0, y: 0, w: 50, h: 3 })).toBe(true);
    expect(isDegenerate({ x: 0, y: 0, w: 4, h: 4 })).toBe(false);
  });
});

describe('handles', () => {
  it('places eight handles on the outline', () => {
    const handles = handlePositions({ x: 10, y: 20, w: 30, h: 40 });
    expect(handles).toHaveLength(8);
    const se = handles.find((h) => h.id === 'se')!;
    expect(se).toMatchObject({ x: 40, y: 60 });
  });

  it('resizes by a corner handle and renormalizes when crossed over', () => {
    const box = { x: 10, y: 10, w: 20, h: 20 };
    expect(resizeByHandle(box, 'se', 10, 5)).toEqual({ x: 10, y: 10, w: 30, h: 25 });
    // dragging the east edge past the west edge flips the box
    expect(resizeByHandle(box, 'e', -25, 0)).toEqual({ x: 5, y: 10, w: 5, h: 20 });
  });
});
