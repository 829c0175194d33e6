/** Screen model: the plain data the DOM layer binds, derived from a
 * ViewState. Keeping this a pure function lets the rendering logic be
 * tested without a browser. */

import { DIRECTIONS, Direction } from "./protocol.js";
import { ViewState } from "./viewstate.js";

export interface KeyModel {
  direction: Direction;
  label: string;
  symbols: string[];
  disabled: boolean;
}

export interface ScreenModel {
  keys: KeyModel[];
  presented: string;
  transcribed: string;
  depth: number;
  banner: string | null;
  feedback: "none" | "click" | "beep" | "shake";
  metricsLines: string[];
}

const KEY_LABELS: Record<Direction, string> = {
  L: "←",
  R: "→",
  U: "↑",
  D: "↓",
};

function formatMetric(name: string, value: number): string {
  const shown = Number.isInteger(value) ? String(value) : value.toFixed(2);
  return `${name}: ${shown}`;
}

export function renderModel(view: ViewState): ScreenModel {
  const keys = DIRECTIONS.map((d) => ({
    direction: d,
    label: KEY_LABELS[d],
    symbols: view.boxes[d],
    disabled: !view.trialActive || view.boxes[d].length === 0,
  }));

  let banner: string | null = null;
  if (!view.connected) banner = "disconnected";
  else if (view.error) banner = view.error;
  else if (view.trialDone) banner = "trial complete";

  let feedback: ScreenModel["feedback"] = "none";
  switch (view.lastEvent.kind) {
    case "emit":
      feedback = "click";
      break;
    case "wrong":
      feedback = "beep";
      break;
    case "reject":
      feedback = "shake";
      break;
    case "none":
      break;
  }

  const metricsLines: string[] = [];
  if (view.finalMetrics) {
    for (const [name, value] of Object.entries(view.finalMetrics).sort()) {
      metricsLines.push(formatMetric(name, value));
    }
  } else {
    metricsLines.push(`keystrokes: ${view.live.keystrokes}`);
    if (view.live.wpm !== null) metricsLines.push(formatMetric("wpm", view.live.wpm));
    if (view.live.kspc !== null) metricsLines.push(formatMetric("kspc", view.live.kspc));
  }

  return {
    keys,
    presented: view.presented,
    transcribed: view.transcribed,
    depth: view.depth,
    banner,
    feedback,
    metricsLines,
  };
}
