/**
 * Session view model and its reducer. Every state change flows through
 * applyMessage (wire events) or the explicit user actions, so rendering
 * a recorded message log twice always produces identical state.
 */

import {
  BandName,
  Bands,
  Phase,
  ServiceMessage,
  SummaryMessage,
} from "./protocol";

export const FS = 128; // sample ticks per second
export const TRIM_SECONDS = 30;
export const MAX_POINTS = 120; // rolling window of the last 120 s
export const MAX_OBSERVERS = 4;

export interface ChartPoint {
  windowStart: number;
  bands: Bands;
  label: 0 | 1;
  score: number;
  scoring: boolean;
  excluded: boolean;
}

export interface RatingForm {
  self: number | null;
  observers: number[];
}

export type ConnectionState = "connecting" | "live" | "retrying" | "closed";

export interface SessionViewModel {
  sessionId: string | null;
  phase: Phase | null;
  connection: ConnectionState;
  errorBanner: string | null;
  points: ChartPoint[];
  totalPredictions: number;
  lastCursor: number | null;
  firstScoringStart: number | null; // survives chart eviction
  dropCounter: number;
  summary: SummaryMessage | null;
  ratingForm: RatingForm;
  skippedMessages: number;
}

export function initialViewModel(): SessionViewModel {
  return {
    sessionId: null,
    phase: null,
    connection: "connecting",
    errorBanner: null,
    points: [],
    totalPredictions: 0,
    lastCursor: null,
    firstScoringStart: null,
    dropCounter: 0,
    summary: null,
    ratingForm: { self: null, observers: [] },
    skippedMessages: 0,
  };
}

/** Fold one parsed wire message into the view model (pure update). */
export function applyMessage(
  view: SessionViewModel,
  message: ServiceMessage | null,
): SessionViewModel {
  if (message === null) {
    return { ...view, skippedMessages: view.skippedMessages + 1 };
  }
  switch (message.type) {
    case "open_ack":
      return {
        ...view,
        sessionId: message.session_id,
        phase: message.phase,
        connection: "live",
        errorBanner: null,
      };
    case "prediction": {
      // cursor-resume guard: a redelivered window never duplicates a point
      if (
        view.lastCursor !== null &&
        message.window_start <= view.lastCursor
      ) {
        return view;
      }
      const point: ChartPoint = {
        windowStart: message.window_start,
        bands: message.bands,
        label: message.label,
        score: message.score,
        scoring: message.scoring,
        excluded: false,
      };
      const points = [...view.points, point].slice(-MAX_POINTS);
      return {
        ...view,
        points,
        totalPredictions: view.totalPredictions + 1,
        lastCursor: message.window_start,
        firstScoringStart:
          view.firstScoringStart === null && message.scoring
            ? message.window_start
            : view.firstScoringStart,
        dropCounter: message.dropped,
        phase:
          view.phase === "acclimating" && message.scoring
            ? "recording"
            : view.phase,
      };
    }
    case "summary": {
      const points = message.trim
        ? markTrimmed(view.points, view.firstScoringStart)
        : view.points.map((p) =>
            p.scoring ? p : { ...p, excluded: true },
          );
      return {
        ...view,
        points,
        summary: message,
        phase: "closed",
        dropCounter: message.dropped_samples,
      };
    }
    case "error":
      return {
        ...view,
        errorBanner: `${message.error}: ${message.message}`,
      };
  }
}

/**
 * Mirror the service's trim rule on the chart: scoring windows starting
 * within the first or last 30 s of the recording span are excluded, and
 * non-scoring windows always are.
 */
function markTrimmed(
  points: ChartPoint[],
  firstScoringStart: number | null,
): ChartPoint[] {
  const scoring = points.filter((p) => p.scoring);
  if (scoring.length === 0) {
    return points.map((p) => ({ ...p, excluded: !p.scoring }));
  }
  const recStart = firstScoringStart ?? scoring[0]!.windowStart;
  const recEnd = scoring[scoring.length - 1]!.windowStart + FS;
  const margin = TRIM_SECONDS * FS;
  return points.map((p) => ({
    ...p,
    excluded:
      !p.scoring ||
      p.windowStart < recStart + margin ||
      p.windowStart >= recEnd - margin,
  }));
}

export function includedPoints(view: SessionViewModel): ChartPoint[] {
  return view.points.filter((p) => p.scoring && !p.excluded);
}

/** The live binary indicator follows the latest scoring window only. */
export function currentIndicator(view: SessionViewModel): 0 | 1 | null {
  for (let i = view.points.length - 1; i >= 0; i--) {
    const point = view.points[i]!;
    if (point.scoring) return point.label;
  }
  return null;
}

export interface RatingValidation {
  ok: boolean;
  field?: "self" | `observer ${number}`;
  message?: string;
}

/** Client-side rating bounds; invalid input never reaches the wire. */
export function validateRatings(
  self: number,
  observers: number[],
): RatingValidation {
  if (!Number.isInteger(self) || self < 1 || self > 10) {
    return {
      ok: false,
      field: "self",
      message: `self rating must be an integer 1..10, got ${self}`,
    };
  }
  if (observers.length > MAX_OBSERVERS) {
    return {
      ok: false,
      field: `observer ${MAX_OBSERVERS}`,
      message: `at most ${MAX_OBSERVERS} observer ratings`,
    };
  }
  for (let i = 0; i < observers.length; i++) {
    const value = observers[i]!;
    if (!Number.isInteger(value) || value < 1 || value > 10) {
      return {
        ok: false,
        field: `observer ${i}`,
        message: `observer rating ${i} must be an integer 1..10, got ${value}`,
      };
    }
  }
  return { ok: true };
}

export const BAND_LABELS: Record<BandName, string> = {
  e_delta: "delta",
  e_theta: "theta",
  e_alpha: "alpha",
  e_beta: "beta",
  e_gamma: "gamma",
};
