/**
 * Round-trip against a live service instance, driving the same modules the
 * browser app uses: upload -> draw box -> segment -> gallery -> override ->
 * refreshed result panes. Spawns `matteforge-serve` (must be on PATH).
 */

import { ChildProcess, spawn } from 'node:child_process';
import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';
import { PNG } from 'pngjs';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { MatteforgeApi } from '../src/api';
import { dragToBox } from '../src/box';
import { galleryTiles, shouldIssueOverride } from '../src/gallery';
import {
  applySegmentResponse,
  beginMutation,
  cacheRaster,
  cachedRaster,
  initialState,
  rasterKey,
  sessionOpened,
  setBox,
} from '../src/state';
import { SegmentResponse } from '../src/types';

const HERE = dirname(fileURLToPath(import.meta.url));
const PORT = 8431;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;

async function waitForService(timeoutMs = 60000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const probe = await fetch(`${BASE}/v1/sessions/probe/raster?kind=mask&rev=1`);
      if (probe.status === 404) return; // service answers
    } catch {
      /* not up yet */
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error(`service did not come up on ${BASE}`);
}

beforeAll(async () => {
  server = spawn('matteforge-serve', ['--host', '127.0.0.1', '--port', String(PORT)], {
    stdio: 'ignore',
  });
  await waitForService();
}, 70000);

afterAll(() => {
  server?.kill();
});

describe('live service round trip', () => {
  it('upload -> box -> segment -> override -> refreshed panes', async () => {
    const api = new MatteforgeApi(BASE);
    const fixture = JSON.parse(
      readFileSync(join(HERE, 'fixtures', 'scene.json'), 'utf-8'),
    ) as { width: number; height: number; box: { x: number; y: number; w: number; h: number } };
    const imageBytes = readFileSync(join(HERE, 'fixtures', 'scene.png'));

    // upload
    const uploaded = await api.upload(new Uint8Array(imageBytes));
    expect(uploaded.width).toBe(fixture.width);
    expect(uploaded.height).toBe(fixture.height);
    let state = sessionOpened(
      initialState(),
      uploaded.session_id,
      uploaded.width,
      uploaded.height,
    );

    // draw the box with the same gesture math the canvas uses
    const { box } = fixture;
    const drawn = dragToBox(
      box.x,
      box.y,
      box.x + box.w,
      box.y + box.h,
      state.imageWidth,
      state.imageHeight,
    );
    expect(drawn).toEqual(box);
    state = setBox(state, drawn!);

    // segment
    state = beginMutation(state);
    const segmented: SegmentResponse = await api.segment(state.sessionId!, state.box!);
    state = applySegmentResponse(state, segmented);
    expect(segmented.revision).toBe(1);
    expect(segmented.candidates).toHaveLength(5);

    // gallery shows 5 tiles with the auto-selected one highlighted
    const tiles = galleryTiles(state.candidates!, state.selectedFactor);
    expect(tiles).toHaveLength(5);
    expect(tiles.filter((t) => t.outlined).map((t) => t.factor)).toEqual([
      segmented.selected_factor,
    ]);

    // trimap pane renders exactly three tones
    const trimapBlob = await api.fetchRaster(state.sessionId!, 'trimap', state.revision);
    const trimap = PNG.sync.read(Buffer.from(await trimapBlob.arrayBuffer()));
    const tones = new Set<number>();
    for (let i = 0; i < trimap.data.length; i += 4) tones.add(trimap.data[i]);
    expect([...tones].sort((a, b) => a - b)).toEqual([0, 128, 255]);

    // cache revision-1 panes the way the viewer does
    state = cacheRaster(state, 'mask', 1, 'blob:mask@1');
    const maskRev1 = await api.fetchRaster(state.sessionId!, 'mask', 1);
    expect(maskRev1.size).toBeGreaterThan(0);

    // override to another viable factor
    const target = state.candidates!.find(
      (c) => !c.skipped && c.factor !== state.selectedFactor,
    );
    expect(target).toBeDefined();
    expect(shouldIssueOverride(state, target!.factor)).toBe(true);
    state = beginMutation(state);
    const overridden = await api.override(state.sessionId!, target!.factor);
    state = applySegmentResponse(state, overridden);

    // panes now point at the new revision; candidate records are unchanged
    expect(state.revision).toBe(2);
    expect(state.selectedFactor).toBe(target!.factor);
    expect(overridden.candidates).toEqual(segmented.candidates);
    expect(cachedRaster(state, 'mask', 2)).toBeUndefined(); // forces refetch
    const maskRev2 = await api.fetchRaster(state.sessionId!, 'mask', state.revision);
    expect(maskRev2.size).toBeGreaterThan(0);
    expect(rasterKey('mask', 2)).not.toBe(rasterKey('mask', 1));

    // gallery highlight tracks the server's latest revision
    const refreshed = galleryTiles(state.candidates!, state.selectedFactor);
    expect(refreshed.filter((t) => t.outlined).map((t) => t.factor)).toEqual([
      target!.factor,
    ]);

    // clicking the now-selected tile is suppressed
    expect(shouldIssueOverride(state, target!.factor)).toBe(false);

    // skipped tiles remain unclickable
    const skipped = state.candidates!.find((c) => c.skipped);
    if (skipped) expect(shouldIssueOverride(state, skipped.factor)).toBe(false);
  }, 120000);

  it('rejects a whole-image box with 422', async () => {
    const api = new MatteforgeApi(BASE);
    const imageBytes = readFileSync(join(HERE, 'fixtures', 'scene.png'));
    const uploaded = await api.upload(new Uint8Array(imageBytes));
    await expect(
      api.segment(uploaded.session_id, { x: 0, y: 0, w: 160, h: 160 }),
    ).rejects.toMatchObject({ status: 422 });
  }, 30000);
});
