/** Pure projection of the session's frames onto what the screen shows.
 *
 * The view holds no game state of its own: boxes, transcribed text and
 * depth always come verbatim from the latest layout/state frame. The only
 * client-side additions are presentation concerns (last event tag, running
 * wpm/KSPC from the keystrokes this client sent).
 */

import {
  Boxes,
  ClientFrame,
  Direction,
  ServerFrame,
} from "./protocol.js";

export type LastEvent =
  | { kind: "none" }
  | { kind: "emit"; symbol: string }
  | { kind: "wrong"; symbol: string }
  | { kind: "reject" };

export interface LiveMetrics {
  keystrokes: number;
  wpm: number | null;
  kspc: number | null;
}

export interface ViewState {
  connected: boolean;
  trialActive: boolean;
  trialDone: boolean;
  presented: string;
  transcribed: string;
  boxes: Boxes;
  depth: number;
  tableHash: string;
  lastEvent: LastEvent;
  live: LiveMetrics;
  finalMetrics: Record<string, number> | null;
  error: string | null;
  /** Timestamps used for the running wpm; not rendered directly. */
  firstKeystrokeMs: number | null;
  lastKeystrokeMs: number | null;
  lastEmissionMs: number | null;
}

export const EMPTY_BOXES: Boxes = { L: [], R: [], U: [], D: [] };

export function initialView(): ViewState {
  return {
    connected: false,
    trialActive: false,
    trialDone: false,
    presented: "",
    transcribed: "",
    boxes: EMPTY_BOXES,
    depth: 0,
    tableHash: "",
    lastEvent: { kind: "none" },
    live: { keystrokes: 0, wpm: null, kspc: null },
    finalMetrics: null,
    error: null,
    firstKeystrokeMs: null,
    lastKeystrokeMs: null,
    lastEmissionMs: null,
  };
}

function recomputeLive(view: ViewState): LiveMetrics {
  const chars = view.transcribed.length;
  const kspc = chars > 0 ? view.live.keystrokes / chars : null;
  let wpm: number | null = null;
  if (
    chars > 1 &&
    view.firstKeystrokeMs !== null &&
    view.lastEmissionMs !== null &&
    view.lastEmissionMs > view.firstKeystrokeMs
  ) {
    const minutes = (view.lastEmissionMs - view.firstKeystrokeMs) / 60000;
    wpm = (chars - 1) / 5 / minutes;
  }
  return { keystrokes: view.live.keystrokes, wpm, kspc };
}

/** Note a keystroke frame this client sent (the server echoes no t). */
export function noteKeystroke(view: ViewState, frame: ClientFrame): ViewState {
  if (frame.kind !== "keystroke") return view;
  const next = {
    ...view,
    live: { ...view.live, keystrokes: view.live.keystrokes + 1 },
    firstKeystrokeMs: view.firstKeystrokeMs ?? frame.t,
    lastKeystrokeMs: frame.t,
  };
  next.live = recomputeLive(next);
  return next;
}

export function applyFrame(view: ViewState, frame: ServerFrame): ViewState {
  switch (frame.kind) {
    case "layout": {
      const next: ViewState = {
        ...initialView(),
        connected: view.connected,
        trialActive: true,
        presented: frame.presented,
        transcribed: frame.transcribed,
        boxes: frame.boxes,
        depth: frame.depth,
        tableHash: frame.table_hash,
      };
      return next;
    }
    case "state": {
      const next = {
        ...view,
        boxes: frame.boxes,
        transcribed: frame.transcribed,
        depth: frame.depth,
        error: null,
      };
      next.live = recomputeLive(next);
      return next;
    }
    case "emitted": {
      const lastEvent: LastEvent = frame.wrong
        ? { kind: "wrong", symbol: frame.symbol }
        : { kind: "emit", symbol: frame.symbol };
      // The emitted frame carries no timestamp; the emission happened at the
      // keystroke that caused it, which is the last one this client sent.
      return { ...view, lastEvent, lastEmissionMs: view.lastKeystrokeMs };
    }
    case "rejected":
      return { ...view, lastEvent: { kind: "reject" } };
    case "trial-done":
      return {
        ...view,
        trialActive: false,
        trialDone: true,
        finalMetrics: frame.metrics,
      };
    case "error":
      return { ...view, error: frame.message };
  }
}

/** Apply either direction of the exchange in arrival order. */
export function applyEvent(
  view: ViewState,
  item: { from: "client"; frame: ClientFrame } | { from: "server"; frame: ServerFrame }
): ViewState {
  if (item.from === "client") {
    return noteKeystroke(view, item.frame);
  }
  return applyFrame(view, item.frame);
}

export function setConnected(view: ViewState, connected: boolean): ViewState {
  return { ...view, connected };
}

export function expectedSuffix(view: ViewState): string {
  if (view.presented.startsWith(view.transcribed)) {
    return view.presented.slice(view.transcribed.length);
  }
  return "";
}

export function boxFor(view: ViewState, d: Direction): string[] {
  return view.boxes[d];
}
