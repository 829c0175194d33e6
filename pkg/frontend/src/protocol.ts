/** JSON frame schemas spoken by the gateway websocket, plus helpers for
 * parsing and for canonicalizing recorded transcripts. */

export type Direction = "L" | "R" | "U" | "D";

export const DIRECTIONS: readonly Direction[] = ["L", "R", "U", "D"];

export type Boxes = Record<Direction, string[]>;

export interface HelloFrame {
  kind: "hello";
  id: number;
  presented?: string;
}

export interface KeystrokeFrame {
  kind: "keystroke";
  id: number;
  d: Direction;
  t: number;
}

export type ClientFrame = HelloFrame | KeystrokeFrame;

export interface LayoutFrame {
  kind: "layout";
  id: number;
  boxes: Boxes;
  presented: string;
  transcribed: string;
  depth: number;
  table_hash: string;
}

export interface StateFrame {
  kind: "state";
  id: number;
  boxes: Boxes;
  transcribed: string;
  depth: number;
}

export interface EmittedFrame {
  kind: "emitted";
  id: number;
  symbol: string;
  wrong: boolean;
}

export interface RejectedFrame {
  kind: "rejected";
  id: number;
}

export interface TrialDoneFrame {
  kind: "trial-done";
  id: number;
  metrics: Record<string, number>;
}

export interface ErrorFrame {
  kind: "error";
  id: number;
  message: string;
}

export type ServerFrame =
  | LayoutFrame
  | StateFrame
  | EmittedFrame
  | RejectedFrame
  | TrialDoneFrame
  | ErrorFrame;

const SERVER_KINDS = new Set([
  "layout",
  "state",
  "emitted",
  "rejected",
  "trial-done",
  "error",
]);

export function parseServerFrame(raw: string): ServerFrame {
  const frame = JSON.parse(raw);
  if (typeof frame !== "object" || frame === null || !SERVER_KINDS.has(frame.kind)) {
    throw new Error(`unexpected server frame: ${raw}`);
  }
  return frame as ServerFrame;
}

/** A keystroke or rejected press never ends a turn: the gateway always
 * follows it with a state frame. */
export function endsExchange(frame: ServerFrame): boolean {
  return frame.kind !== "emitted" && frame.kind !== "rejected";
}

export interface TranscriptItem {
  from: "client" | "server";
  frame: ClientFrame | ServerFrame;
}

/** Zero out client keystroke timestamps so recorded transcripts compare
 * byte-exact across runs. Server frames carry no wall-clock data. */
export function canonicalizeTranscript(items: TranscriptItem[]): TranscriptItem[] {
  return items.map((item) => {
    if (item.from === "client" && item.frame.kind === "keystroke") {
      return { ...item, frame: { ...item.frame, t: 0 } };
    }
    return item;
  });
}

/** Stable stringify with sorted keys, matching the gateway's framing. */
export function stableStringify(value: unknown): string {
  if (Array.isArray(value)) {
    return `[${value.map(stableStringify).join(",")}]`;
  }
  if (typeof value === "object" && value !== null) {
    const entries = Object.entries(value as Record<string, unknown>)
      .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
      .map(([k, v]) => `${JSON.stringify(k)}:${stableStringify(v)}`);
    return `{${entries.join(",")}}`;
  }
  return JSON.stringify(value);
}
