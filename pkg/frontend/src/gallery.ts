import { UiSessionState } from './state.js';
import { CandidateRecord } from './types.js';

export interface GalleryTile {
  factor: number;
  label: string;
  clickable: boolean;
  greyed: boolean;
  outlined: boolean;
  tooltip: string | null;
}

/** View models for the five-candidate strip. */
export function galleryTiles(
  records: CandidateRecord[],
  selectedFactor: number | null,
): GalleryTile[] {
  return records.map((record) => {
    const selected = record.factor === selectedFactor;
    if (record.skipped) {
      return {
        factor: record.factor,
        label: `1/${record.factor}`,
        clickable: false,
        greyed: true,
        outlined: false,
        tooltip: `skipped: only ${record.patch_count} patches`,
      };
    }
    return {
      factor: record.factor,
      label: `1/${record.factor} · ${record.score!.toFixed(2)}`,
      clickable: !selected,
      greyed: false,
      outlined: selected,
      tooltip: selected ? 'current selection' : null,
    };
  });
}

/**
 * Gate for tile clicks: skipped tiles never issue a request (tooltip only),
 * clicking the already-selected tile is a suppressed no-op, and nothing is
 * issued while another mutation is in flight.
 */
export function shouldIssueOverride(state: UiSessionState, factor: number): boolean {
  if (state.inFlight || state.candidates === null) return false;
  const record = state.candidates.find((c) => c.factor === factor);
  if (!record || record.skipped) return false;
  return factor !== state.selectedFactor;
}
