import { Box, RasterKind, SegmentResponse, UploadResponse } from './types.js';

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let detail = response.statusText;
  try {
    const body = await response.json();
    if (body && body.error) detail = body.error;
    if (body && body.stage) detail = `${detail} (stage: ${body.stage})`;
  } catch {
    /* non-JSON error body */
  }
  return new ApiError(response.status, detail);
}

/** Resolve the service base URL: ?service=... wins, else same-origin default. */
export function resolveBaseUrl(search: string, fallback = 'http://127.0.0.1:8401'): string {
  const params = new URLSearchParams(search);
  const fromQuery = params.get('service');
  return (fromQuery || fallback).replace(/\/$/, '');
}

export class MatteforgeApi {
  constructor(public readonly baseUrl: string) {}

  async upload(data: Blob | ArrayBuffer | Uint8Array): Promise<UploadResponse> {
    const response = await fetch(`${this.baseUrl}/v1/sessions`, {
      method: 'POST',
      headers: { 'Content-Type': 'image/png' },
      body: data as BodyInit,
    });
    if (response.status !== 201) throw await parseError(response);
    return response.json();
  }

  async segment(sessionId: string, box: Box): Promise<SegmentResponse> {
    const response = await fetch(`${this.baseUrl}/v1/sessions/${sessionId}/segment`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(box),
    });
    if (!response.ok) throw await parseError(response);
    return response.json();
  }

  async override(sessionId: string, factor: number): Promise<SegmentResponse> {
    const response = await fetch(`${this.baseUrl}/v1/sessions/${sessionId}/override`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ factor }),
    });
    if (!response.ok) throw await parseError(response);
    return response.json();
  }

  rasterUrl(sessionId: string, kind: RasterKind | string, rev: number): string {
    return `${this.baseUrl}/v1/sessions/${sessionId}/raster?kind=${kind}&rev=${rev}`;
  }

  async fetchRaster(sessionId: string, kind: RasterKind | string, rev: number): Promise<Blob> {
    const response = await fetch(this.rasterUrl(sessionId, kind, rev));
    if (!response.ok) throw await parseError(response);
    return response.blob();
  }
}
