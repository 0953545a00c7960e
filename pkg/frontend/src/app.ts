import { ApiError, MatteforgeApi, resolveBaseUrl } from './api.js';
import { dragToBox, handlePositions, resizeByHandle, clampToMargin, isDegenerate, HandleId } from './box.js';
import { galleryTiles, shouldIssueOverride } from './gallery.js';
import {
  UiSessionState,
  applySegmentResponse,
  beginMutation,
  cacheRaster,
  cachedRaster,
  canEditBox,
  canSegment,
  initialState,
  mutationFailed,
  sessionOpened,
  setBox,
} from './state.js';
import { Box, RasterKind, RESULT_TABS } from './types.js';
import { ViewerState, drawComposite, initialViewer, selectTab, setOpacity } from './viewer.js';

const HANDLE_RADIUS = 5;

class App {
  private api: MatteforgeApi;
  private state: UiSessionState = initialState();
  private viewer: ViewerState = initialViewer();
  private image: HTMLImageElement | null = null;
  private drag: { x0: number; y0: number; x1: number; y1: number } | null = null;
  private handleDrag: { id: HandleId; startBox: Box; x0: number; y0: number } | null = null;

  private canvas = document.getElementById('canvas') as HTMLCanvasElement;
  private resultCanvas = document.getElementById('result-canvas') as HTMLCanvasElement;
  private fileInput = document.getElementById('file-input') as HTMLInputElement;
  private segmentButton = document.getElementById('segment-button') as HTMLButtonElement;
  private galleryEl = document.getElementById('gallery') as HTMLDivElement;
  private tabsEl = document.getElementById('tabs') as HTMLDivElement;
  private opacitySlider = document.getElementById('opacity') as HTMLInputElement;
  private statusEl = document.getElementById('status') as HTMLDivElement;

  constructor() {
    this.api = new MatteforgeApi(resolveBaseUrl(window.location.search));
    this.fileInput.addEventListener('change', () => this.onFile());
    this.segmentButton.addEventListener('click', () => this.onSegment());
    this.canvas.addEventListener('mousedown', (e) => this.onMouseDown(e));
    this.canvas.addEventListener('mousemove', (e) => this.onMouseMove(e));
    window.addEventListener('mouseup', (e) => this.onMouseUp(e));
    this.opacitySlider.addEventListener('input', () => {
      this.viewer = setOpacity(this.viewer, Number(this.opacitySlider.value) / 100);
      void this.renderResult();
    });
    this.renderTabs();
    this.setStatus(`service: ${this.api.baseUrl} — upload an image to begin`);
    this.syncControls();
  }

  private setStatus(text: string) {
    this.statusEl.textContent = text;
  }

  private syncControls() {
    this.segmentButton.disabled = !canSegment(this.state);
    this.fileInput.disabled = this.state.inFlight;
    this.canvas.style.cursor = canEditBox(this.state) ? 'crosshair' : 'not-allowed';
  }

  private canvasPoint(e: MouseEvent): { x: number; y: number } {
    const rect = this.canvas.getBoundingClientRect();
    return {
      x: ((e.clientX - rect.left) / rect.width) * this.canvas.width,
      y: ((e.clientY - rect.top) / rect.height) * this.canvas.height,
    };
  }

  private async onFile() {
    const file = this.fileInput.files?.[0];
    if (!file) return;
    try {
      const response = await this.api.upload(file);
      this.state = sessionOpened(
        this.state,
        response.session_id,
        response.width,
        response.height,
      );
      this.image = new Image();
      this.image.onload = () => {
        this.canvas.width = this.state.imageWidth;
        this.canvas.height = this.state.imageHeight;
        this.resultCanvas.width = this.state.imageWidth;
        this.resultCanvas.height = this.state.imageHeight;
        this.renderCanvas();
        void this.renderResult();
      };
      this.image.src = URL.createObjectURL(file);
      this.galleryEl.replaceChildren();
      this.setStatus(
        `session ${response.session_id.slice(0, 8)}… (${response.width}×${response.height}) — drag a box around the object`,
      );
    } catch (err) {
      this.setStatus(`upload failed: ${err instanceof ApiError ? err.message : err}`);
    }
    this.syncControls();
  }

  private hitHandle(x: number, y: number): HandleId | null {
    if (!this.state.box) return null;
    for (const handle of handlePositions(this.state.box)) {
      if (Math.abs(handle.x - x) <= HANDLE_RADIUS && Math.abs(handle.y - y) <= HANDLE_RADIUS) {
        return handle.id;
      }
    }
    return null;
  }

  private onMouseDown(e: MouseEvent) {
    if (!canEditBox(this.state) || !this.image) return;
    const { x, y } = this.canvasPoint(e);
    const handle = this.hitHandle(x, y);
    if (handle && this.state.box) {
      this.handleDrag = { id: handle, startBox: this.state.box, x0: x, y0: y };
    } else {
      this.drag = { x0: x, y0: y, x1: x, y1: y };
    }
  }

  private onMouseMove(e: MouseEvent) {
    if (this.drag) {
      const { x, y } = this.canvasPoint(e);
      this.drag.x1 = x;
      this.drag.y1 = y;
      this.renderCanvas();
    } else if (this.handleDrag) {
      const { x, y } = this.canvasPoint(e);
      const moved = resizeByHandle(
        this.handleDrag.startBox,
        this.handleDrag.id,
        x - this.handleDrag.x0,
        y - this.handleDrag.y0,
      );
      const clamped = clampToMargin(moved, this.state.imageWidth, this.state.imageHeight);
      if (!isDegenerate(clamped)) {
        this.state = setBox(this.state, clamped);
      }
      this.renderCanvas();
    }
  }

  private onMouseUp(e: MouseEvent) {
    if (this.drag) {
      const { x, y } = this.canvasPoint(e);
      const box = dragToBox(
        this.drag.x0,
        this.drag.y0,
        x,
        y,
        this.state.imageWidth,
        this.state.imageHeight,
      );
      this.drag = null;
      if (box) {
        this.state = setBox(this.state, box);
        this.setStatus(`box ${box.x},${box.y} ${box.w}×${box.h} — press Segment`);
      } else {
        this.setStatus('box too small (needs at least 4×4 px) — try again');
      }
      this.renderCanvas();
    }
    this.handleDrag = null;
    this.syncControls();
  }

  private renderCanvas() {
    if (!this.image) return;
    const ctx = this.canvas.getContext('2d')!;
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    ctx.drawImage(this.image, 0, 0, this.canvas.width, this.canvas.height);
    const live = this.drag
      ? dragToBox(
          this.drag.x0,
          this.drag.y0,
          this.drag.x1,
          this.drag.y1,
          this.state.imageWidth,
          this.state.imageHeight,
        ) ?? undefined
      : undefined;
    const box = live ?? this.state.box;
    if (box) {
      ctx.strokeStyle = '#ff4444';
      ctx.lineWidth = 2;
      ctx.strokeRect(box.x, box.y, box.w, box.h);
      if (!this.drag) {
        ctx.fillStyle = '#ff4444';
        for (const handle of handlePositions(box)) {
          ctx.fillRect(
            handle.x - HANDLE_RADIUS / 2,
            handle.y - HANDLE_RADIUS / 2,
            HANDLE_RADIUS,
            HANDLE_RADIUS,
          );
        }
      }
    }
  }

  private async onSegment() {
    if (!canSegment(this.state)) return;
    const { sessionId, box } = this.state;
    this.state = beginMutation(this.state);
    this.syncControls();
    this.setStatus('segmenting…');
    try {
      const response = await this.api.segment(sessionId!, box!);
      this.state = applySegmentResponse(this.state, response);
      this.setStatus(
        `revision ${response.revision}: selected 1/${response.selected_factor}`,
      );
    } catch (err) {
      this.state = mutationFailed(this.state);
      this.setStatus(`segmentation failed: ${err instanceof ApiError ? err.message : err}`);
    }
    this.renderGallery();
    await this.renderResult();
    this.syncControls();
  }

  private async onTileClick(factor: number) {
    if (!shouldIssueOverride(this.state, factor)) return;
    const sessionId = this.state.sessionId!;
    this.state = beginMutation(this.state);
    this.syncControls();
    this.setStatus(`re-running matting at 1/${factor}…`);
    try {
      const response = await this.api.override(sessionId, factor);
      this.state = applySegmentResponse(this.state, response);
      this.setStatus(
        `revision ${response.revision}: selected 1/${response.selected_factor}`,
      );
    } catch (err) {
      this.state = mutationFailed(this.state);
      this.setStatus(`override failed: ${err instanceof ApiError ? err.message : err}`);
    }
    this.renderGallery();
    await this.renderResult();
    this.syncControls();
  }

  private renderGallery() {
    this.galleryEl.replaceChildren();
    if (!this.state.candidates) return;
    for (const tile of galleryTiles(this.state.candidates, this.state.selectedFactor)) {
      const el = document.createElement('div');
      el.className =
        'tile' + (tile.greyed ? ' greyed' : '') + (tile.outlined ? ' outlined' : '');
      if (tile.tooltip) el.title = tile.tooltip;
      const caption = document.createElement('div');
      caption.className = 'caption';
      caption.textContent = tile.label;
      if (!tile.greyed) {
        const img = document.createElement('img');
        img.src = this.api.rasterUrl(this.state.sessionId!, `candidate-${tile.factor}`, 1);
        img.alt = tile.label;
        el.appendChild(img);
      } else {
        const placeholder = document.createElement('div');
        placeholder.className = 'placeholder';
        placeholder.textContent = `${
          this.state.candidates.find((c) => c.factor === tile.factor)?.patch_count ?? 0
        } patches`;
        el.appendChild(placeholder);
      }
      el.appendChild(caption);
      el.addEventListener('click', () => void this.onTileClick(tile.factor));
      this.galleryEl.appendChild(el);
    }
  }

  private renderTabs() {
    this.tabsEl.replaceChildren();
    for (const tab of RESULT_TABS) {
      const el = document.createElement('button');
      el.textContent = tab.label;
      el.className = tab.kind === this.viewer.activeTab ? 'active' : '';
      el.addEventListener('click', () => {
        this.viewer = selectTab(this.viewer, tab.kind);
        this.renderTabs();
        void this.renderResult();
      });
      this.tabsEl.appendChild(el);
    }
  }

  private async rasterImage(kind: RasterKind, rev: number): Promise<HTMLImageElement> {
    let url = cachedRaster(this.state, kind, rev);
    if (!url) {
      const blob = await this.api.fetchRaster(this.state.sessionId!, kind, rev);
      url = URL.createObjectURL(blob);
      this.state = cacheRaster(this.state, kind, rev, url);
    }
    return new Promise((resolve, reject) => {
      const img = new Image();
      img.onload = () => resolve(img);
      img.onerror = () => reject(new Error(`cannot load raster ${kind}@${rev}`));
      img.src = url!;
    });
  }

  private async renderResult() {
    const ctx = this.resultCanvas.getContext('2d')!;
    if (!this.image) return;
    if (this.state.revision === 0) {
      drawComposite(
        ctx,
        this.image,
        null,
        0,
        this.resultCanvas.width,
        this.resultCanvas.height,
      );
      return;
    }
    try {
      const raster = await this.rasterImage(this.viewer.activeTab, this.state.revision);
      drawComposite(
        ctx,
        this.image,
        raster,
        this.viewer.overlayOpacity,
        this.resultCanvas.width,
        this.resultCanvas.height,
      );
    } catch {
      this.setStatus(`failed to fetch ${this.viewer.activeTab} — click the tab to retry`);
    }
  }
}

new App();
