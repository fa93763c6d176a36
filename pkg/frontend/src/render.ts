/**
 * Terminal rendering: five band traces, the live attention indicator,
 * and the session/summary status lines. Excluded or non-scoring windows
 * render as dots instead of spark bars.
 */

import { BAND_NAMES } from "./protocol";
import {
  BAND_LABELS,
  ChartPoint,
  SessionViewModel,
  currentIndicator,
  includedPoints,
} from "./viewmodel";

const SPARKS = "▁▂▃▄▅▆▇█";
const TRACE_WIDTH = 60;

function sparkline(
  points: ChartPoint[],
  band: (typeof BAND_NAMES)[number],
): string {
  const recent = points.slice(-TRACE_WIDTH);
  const values = recent.map((p) => p.bands[band]);
  const top = Math.max(...values, 1e-12);
  return recent
    .map((p, i) => {
      if (!p.scoring || p.excluded) return "·";
      const level = Math.min(
        SPARKS.length - 1,
        Math.floor(((values[i] ?? 0) / top) * (SPARKS.length - 1)),
      );
      return SPARKS[level];
    })
    .join("");
}

export function renderFrame(view: SessionViewModel): string {
  const lines: string[] = [];
  lines.push(
    `session ${view.sessionId ?? "-"}  phase ${view.phase ?? "-"}  ` +
      `link ${view.connection}  drops ${view.dropCounter}  ` +
      `windows ${view.totalPredictions}`,
  );
  if (view.errorBanner) {
    lines.push(`!! ${view.errorBanner}`);
  }
  for (const band of BAND_NAMES) {
    const label = BAND_LABELS[band].padEnd(6);
    const last = view.points[view.points.length - 1];
    const value = last ? last.bands[band].toExponential(2) : "-";
    lines.push(`${label} ${sparkline(view.points, band)} ${value}`);
  }
  const indicator = currentIndicator(view);
  const state =
    indicator === null
      ? "waiting for scoring windows"
      : indicator === 0
        ? "ATTENTIVE (learned)"
        : "CONFUSED (not learned)";
  lines.push(`attention: ${state}`);
  if (view.summary) {
    const s = view.summary;
    lines.push(
      `summary: included ${s.included_windows}/${s.total_windows} ` +
        `windows, mean score ${s.mean_score ?? "-"}, ` +
        `majority label ${s.majority_label ?? "-"}, ` +
        `self ${s.self_rating}, observers [${s.observer_ratings.join(",")}]` +
        `${s.trim ? ", trimmed" : ""}`,
    );
    lines.push(`chart shows ${includedPoints(view).length} included windows`);
  }
  return lines.join("\n");
}
