import { afterEach, describe, expect, it, vi } from 'vitest';

import { ApiError, MatteforgeApi, resolveBaseUrl } from '../src/api';

function mockFetch(status: number, body: unknown) {
  const fn = vi.fn(async () => ({
    ok: status >= 200 && status < 300,
    status,
    statusText: `HTTP ${status}`,
    json: async () => body,
    blob: async () => new Blob([JSON.stringify(body)]),
  }));
  vi.stubGlobal('fetch', fn);
  return fn;
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe('resolveBaseUrl', () => {
  it('prefers the ?service= query parameter', () => {
    expect(resolveBaseUrl('?service=http://host:9000/')).toBe('http://host:9000');
  });

  it('falls back to the default', () => {
    expect(resolveBaseUrl('')).toBe('http://127.0.0.1:8401');
  });
});

describe('MatteforgeApi', () => {
  it('uploads raw bytes with an image content type', async () => {
    const fetchFn = mockFetch(201, { session_id: 's', width: 10, height: 12 });
    const api = new MatteforgeApi('http://svc');
    const response = await api.upload(new Uint8Array([1, 2, 3]));
    expect(response.session_id).toBe('s');
    const [url, init] = fetchFn.mock.calls[0] as unknown as [string, RequestInit];
    expect(url).toBe('http://svc/v1/sessions');
    expect(init.method).toBe('POST');
    expect((init.headers as Record<string, string>)['Content-Type']).toBe('image/png');
  });

  it('posts the box as the segment body', async () => {
    const fetchFn = mockFetch(200, { revision: 1 });
    const api = new MatteforgeApi('http://svc');
    await api.segment('sid', { x: 1, y: 2, w: 3, h: 4 });
    const [url, init] = fetchFn.mock.calls[0] as unknown as [string, RequestInit];
    expect(url).toBe('http://svc/v1/sessions/sid/segment');
    expect(JSON.parse(init.body as string)).toEqual({ x: 1, y: 2, w: 3, h: 4 });
  });

  it('maps service errors to ApiError with stage detail', async () => {
    mockFetch(500, { error: 'every resolution skipped', stage: 'candidates' });
    const api = new MatteforgeApi('http://svc');
    try {
      await api.segment('sid', { x: 1, y: 2, w: 3, h: 4 });
      expect.unreachable('should have thrown');
    } catch (err) {
      expect(err).toBeInstanceOf(ApiError);
      expect((err as ApiError).status).toBe(500);
      expect((err as ApiError).message).toContain('stage: candidates');
    }
  });

  it('builds revision-qualified raster urls', () => {
    const api = new MatteforgeApi('http://svc');
    expect(api.rasterUrl('sid', 'trimap', 2)).toBe(
      'http://svc/v1/sessions/sid/raster?kind=trimap&rev=2',
    );
    expect(api.rasterUrl('sid', 'candidate-4', 1)).toBe(
      'http://svc/v1/sessions/sid/raster?kind=candidate-4&rev=1',
    );
  });

  it('sends the override factor', async () => {
    const fetchFn = mockFetch(200, { revision: 2, selected_factor: 6 });
    const api = new MatteforgeApi('http://svc');
    await api.override('sid', 6);
    const [url, init] = fetchFn.mock.calls[0] as unknown as [string, RequestInit];
    expect(url).toBe('http://svc/v1/sessions/sid/override');
    expect(JSON.parse(init.body as string)).toEqual({ factor: 6 });
  });
});
