import { Box, CandidateRecord, SegmentResponse } from './types.js';

/**
 * Single-session UI state. One mutating request (segment or override) may
 * be in flight at a time; box edits are disabled while it is. Raster cache
 * entries are keyed by (kind, revision) and are never replaced: a revision
 * is immutable on the server, so a cached object URL stays valid forever.
 */
export interface UiSessionState {
  sessionId: string | null;
  imageWidth: number;
  imageHeight: number;
  box: Box | null;
  candidates: CandidateRecord[] | null;
  selectedFactor: number | null;
  revision: number;
  inFlight: boolean;
  rasterCache: Map<string, string>;
}

export function initialState(): UiSessionState {
  return {
    sessionId: null,
    imageWidth: 0,
    imageHeight: 0,
    box: null,
    candidates: null,
    selectedFactor: null,
    revision: 0,
    inFlight: false,
    rasterCache: new Map(),
  };
}

export function sessionOpened(
  state: UiSessionState,
  sessionId: string,
  width: number,
  height: number,
): UiSessionState {
  return {
    ...initialState(),
    sessionId,
    imageWidth: width,
    imageHeight: height,
  };
}

export function canEditBox(state: UiSessionState): boolean {
  return state.sessionId !== null && !state.inFlight;
}

export function setBox(state: UiSessionState, box: Box): UiSessionState {
  if (!canEditBox(state)) return state;
  return { ...state, box };
}

export function canSegment(state: UiSessionState): boolean {
  return state.sessionId !== null && state.box !== null && !state.inFlight;
}

export function beginMutation(state: UiSessionState): UiSessionState {
  if (state.inFlight) throw new Error('a mutating request is already in flight');
  return { ...state, inFlight: true };
}

export function mutationFailed(state: UiSessionState): UiSessionState {
  return { ...state, inFlight: false };
}

export function applySegmentResponse(
  state: UiSessionState,
  response: SegmentResponse,
): UiSessionState {
  return {
    ...state,
    candidates: response.candidates,
    selectedFactor: response.selected_factor,
    revision: response.revision,
    inFlight: false,
  };
}

export function rasterKey(kind: string, rev: number): string {
  return `${kind}@${rev}`;
}

export function cacheRaster(
  state: UiSessionState,
  kind: string,
  rev: number,
  objectUrl: string,
): UiSessionState {
  const key = rasterKey(kind, rev);
  if (state.rasterCache.has(key)) return state;
  const rasterCache = new Map(state.rasterCache);
  rasterCache.set(key, objectUrl);
  return { ...state, rasterCache };
}

export function cachedRaster(
  state: UiSessionState,
  kind: string,
  rev: number,
): string | undefined {
  return state.rasterCache.get(rasterKey(kind, rev));
}
