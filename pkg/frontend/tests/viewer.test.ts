import { describe, expect, it } from 'vitest';

import { drawComposite, initialViewer, selectTab, setOpacity, tabs } from '../src/viewer';

interface Call {
  op: string;
  alpha: number;
}

function mockContext() {
  const calls: Call[] = [];
  const ctx = {
    globalAlpha: 1.0,
    clearRect: () => calls.push({ op: 'clear', alpha: 1 }),
    drawImage: function () {
      calls.push({ op: 'draw', alpha: this.globalAlpha });
    },
  };
  return { ctx: ctx as unknown as CanvasRenderingContext2D, calls };
}

const ORIGINAL = {} as CanvasImageSource;
const RASTER = {} as CanvasImageSource;

describe('viewer state', () => {
  it('starts on the trimap tab', () => {
    expect(initialViewer().activeTab).toBe('trimap');
  });

  it('offers the four result panes in order', () => {
    expect(tabs()).toEqual(['trimap', 'matte', 'pre-refine', 'mask']);
  });

  it('switches tabs without touching opacity', () => {
    const viewer = selectTab(initialViewer(), 'mask');
    expect(viewer.activeTab).toBe('mask');
    expect(viewer.overlayOpacity).toBe(initialViewer().overlayOpacity);
  });

  it('clamps opacity into [0, 1]', () => {
    expect(setOpacity(initialViewer(), 1.8).overlayOpacity).toBe(1);
    expect(setOpacity(initialViewer(), -0.5).overlayOpacity).toBe(0);
  });
});

describe('drawComposite', () => {
  it('draws only the original when opacity is zero', () => {
    const { ctx, calls } = mockContext();
    drawComposite(ctx, ORIGINAL, RASTER, 0, 100, 80);
    expect(calls.filter((c) => c.op === 'draw')).toHaveLength(1);
    expect(calls.find((c) => c.op === 'draw')!.alpha).toBe(1);
  });

  it('overlays the raster at the requested alpha', () => {
    const { ctx, calls } = mockContext();
    drawComposite(ctx, ORIGINAL, RASTER, 0.6, 100, 80);
    const draws = calls.filter((c) => c.op === 'draw');
    expect(draws).toHaveLength(2);
    expect(draws[0].alpha).toBe(1);
    expect(draws[1].alpha).toBeCloseTo(0.6);
  });

  it('skips the overlay when no raster is available yet', () => {
    const { ctx, calls } = mockContext();
    drawComposite(ctx, ORIGINAL, null, 0.8, 100, 80);
    expect(calls.filter((c) => c.op === 'draw')).toHaveLength(1);
  });
});
