export interface Box {
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface CandidateRecord {
  factor: number;
  patch_count: number;
  score: number | null;
  skipped: boolean;
}

export interface RasterUrls {
  mask: string;
  matte: string;
  trimap: string;
  'pre-refine': string;
  candidates: Record<string, string>;
}

export interface UploadResponse {
  session_id: string;
  width: number;
  height: number;
}

export interface SegmentResponse {
  session_id: string;
  revision: number;
  selected_factor: number;
  candidates: CandidateRecord[];
  urls: RasterUrls;
}

export type RasterKind = 'mask' | 'matte' | 'trimap' | 'pre-refine';

export const RESULT_TABS: { kind: RasterKind; label: string }[] = [
  { kind: 'trimap', label: 'Trimap' },
  { kind: 'matte', label: 'Alpha matte' },
  { kind: 'pre-refine', label: 'Pre-refine mask' },
  { kind: 'mask', label: 'Final mask' },
];
