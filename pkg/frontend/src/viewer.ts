import { RasterKind, RESULT_TABS } from './types.js';

export interface ViewerState {
  activeTab: RasterKind;
  overlayOpacity: number; // 0 = original image only, 1 = raster only
}

export function initialViewer(): ViewerState {
  return { activeTab: 'trimap', overlayOpacity: 0.6 };
}

export function tabs(): RasterKind[] {
  return RESULT_TABS.map((t) => t.kind);
}

export function selectTab(state: ViewerState, kind: RasterKind): ViewerState {
  return { ...state, activeTab: kind };
}

export function setOpacity(state: ViewerState, value: number): ViewerState {
  return { ...state, overlayOpacity: Math.min(1, Math.max(0, value)) };
}

/**
 * Composite the active raster over the original image. At opacity 0 the
 * original shows through untouched; the raster pixels are never modified,
 * only alpha-blended at draw time.
 */
export function drawComposite(
  ctx: CanvasRenderingContext2D,
  original: CanvasImageSource,
  raster: CanvasImageSource | null,
  opacity: number,
  width: number,
  height: number,
): void {
  ctx.clearRect(0, 0, width, height);
  ctx.globalAlpha = 1.0;
  ctx.drawImage(original, 0, 0, width, height);
  if (raster && opacity > 0) {
    ctx.globalAlpha = opacity;
    ctx.drawImage(raster, 0, 0, width, height);
    ctx.globalAlpha = 1.0;
  }
}
