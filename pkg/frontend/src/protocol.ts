/**
 * Wire protocol types and parsing. protocol.md at the repository root is
 * the single source of truth; this module mirrors it and rejects
 * anything that does not fit.
 */

export const BAND_NAMES = [
  "e_delta",
  "e_theta",
  "e_alpha",
  "e_beta",
  "e_gamma",
] as const;

export type BandName = (typeof BAND_NAMES)[number];
export type Bands = Record<BandName, number>;

export type Phase =
  | "acclimating"
  | "recording"
  | "resting"
  | "rating"
  | "closed";

export interface OpenAckMessage {
  type: "open_ack";
  session_id: string;
  phase: Phase;
  resumed: boolean;
}

export interface PredictionMessage {
  type: "prediction";
  session_id: string;
  window_start: number;
  bands: Bands;
  label: 0 | 1;
  score: number;
  model_id: string;
  scoring: boolean;
  dropped: number;
}

export interface SummaryMessage {
  type: "summary";
  session_id: string;
  included_windows: number;
  excluded_windows: number;
  nonscoring_windows: number;
  total_windows: number;
  mean_score: number | null;
  majority_label: 0 | 1 | null;
  self_rating: number;
  observer_ratings: number[];
  dropped_samples: number;
  trim: boolean;
}

export interface ErrorMessage {
  type: "error";
  error: string;
  message: string;
  session_id?: string;
}

export type ServiceMessage =
  | OpenAckMessage
  | PredictionMessage
  | SummaryMessage
  | ErrorMessage;

export interface OpenRequest {
  type: "open";
  subject_id?: string;
  material_id?: string;
  model_id?: string;
  acclimation_s?: number;
  session_id?: string;
  cursor?: number | null;
}

export interface CloseRequest {
  type: "close";
  session_id: string;
  self_rating: number;
  observer_ratings: number[];
  trim: boolean;
}

export type ClientMessage = OpenRequest | CloseRequest;

const PHASES = new Set([
  "acclimating",
  "recording",
  "resting",
  "rating",
  "closed",
]);

function isFiniteNumber(value: unknown): value is number {
  return typeof value === "number" && Number.isFinite(value);
}

function validBands(value: unknown): value is Bands {
  if (typeof value !== "object" || value === null) return false;
  const record = value as Record<string, unknown>;
  return BAND_NAMES.every((name) => isFiniteNumber(record[name]));
}

/**
 * Parse one line from the service. Returns null for anything malformed;
 * the caller logs and skips so a bad message never kills the session.
 */
export function parseServiceMessage(line: string): ServiceMessage | null {
  let raw: unknown;
  try {
    raw = JSON.parse(line);
  } catch {
    return null;
  }
  if (typeof raw !== "object" || raw === null) return null;
  const msg = raw as Record<string, unknown>;
  switch (msg.type) {
    case "open_ack":
      if (
        typeof msg.session_id === "string" &&
        typeof msg.phase === "string" &&
        PHASES.has(msg.phase)
      ) {
        return {
          type: "open_ack",
          session_id: msg.session_id,
          phase: msg.phase as Phase,
          resumed: msg.resumed === true,
        };
      }
      return null;
    case "prediction":
      if (
        typeof msg.session_id === "string" &&
        isFiniteNumber(msg.window_start) &&
        validBands(msg.bands) &&
        (msg.label === 0 || msg.label === 1) &&
        isFiniteNumber(msg.score) &&
        typeof msg.scoring === "boolean"
      ) {
        return {
          type: "prediction",
          session_id: msg.session_id,
          window_start: msg.window_start,
          bands: msg.bands,
          label: msg.label,
          score: msg.score,
          model_id: typeof msg.model_id === "string" ? msg.model_id : "",
          scoring: msg.scoring,
          dropped: isFiniteNumber(msg.dropped) ? msg.dropped : 0,
        };
      }
      return null;
    case "summary":
      if (
        typeof msg.session_id === "string" &&
        isFiniteNumber(msg.included_windows) &&
        isFiniteNumber(msg.total_windows)
      ) {
        return {
          type: "summary",
          session_id: msg.session_id,
          included_windows: msg.included_windows,
          excluded_windows: isFiniteNumber(msg.excluded_windows)
            ? msg.excluded_windows
            : 0,
          nonscoring_windows: isFiniteNumber(msg.nonscoring_windows)
            ? msg.nonscoring_windows
            : 0,
          total_windows: msg.total_windows,
          mean_score: isFiniteNumber(msg.mean_score) ? msg.mean_score : null,
          majority_label:
            msg.majority_label === 0 || msg.majority_label === 1
              ? msg.majority_label
              : null,
          self_rating: isFiniteNumber(msg.self_rating) ? msg.self_rating : 0,
          observer_ratings: Array.isArray(msg.observer_ratings)
            ? msg.observer_ratings.filter(isFiniteNumber)
            : [],
          dropped_samples: isFiniteNumber(msg.dropped_samples)
            ? msg.dropped_samples
            : 0,
          trim: msg.trim === true,
        };
      }
      return null;
    case "error":
      if (typeof msg.error === "string") {
        return {
          type: "error",
          error: msg.error,
          message: typeof msg.message === "string" ? msg.message : "",
          session_id:
            typeof msg.session_id === "string" ? msg.session_id : undefined,
        };
      }
      return null;
    default:
      return null;
  }
}

export function encodeClientMessage(message: ClientMessage): string {
  return JSON.stringify(message) + "\n";
}
