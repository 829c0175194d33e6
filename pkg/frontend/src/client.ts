/** Session client: owns the socket, assigns increasing frame ids, queues
 * keystrokes so at most one is awaiting its state frame, and folds every
 * frame through the view reducer.
 *
 * The socket is injected through a minimal interface so the same client
 * runs on a browser WebSocket or a Node `ws` socket in tests.
 */

import {
  ClientFrame,
  Direction,
  KeystrokeFrame,
  ServerFrame,
  endsExchange,
  parseServerFrame,
} from "./protocol.js";
import {
  ViewState,
  applyFrame,
  initialView,
  noteKeystroke,
  setConnected,
} from "./viewstate.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
}

export type ViewListener = (view: ViewState, frame: ServerFrame | null) => void;

export class SessionClient {
  view: ViewState = initialView();
  private nextId = 1;
  private inFlight = false;
  private queue: KeystrokeFrame[] = [];
  private listeners: ViewListener[] = [];
  private readonly clock: () => number;

  constructor(private socket: SocketLike, clock: () => number = () => Date.now()) {
    this.clock = clock;
    socket.onopen = () => {
      this.view = setConnected(this.view, true);
      this.notify(null);
    };
    socket.onmessage = (ev) => this.receive(String(ev.data));
    socket.onclose = () => {
      this.view = setConnected(this.view, false);
      this.inFlight = false;
      this.queue = [];
      this.notify(null);
    };
    socket.onerror = socket.onclose;
  }

  onView(listener: ViewListener): void {
    this.listeners.push(listener);
  }

  private notify(frame: ServerFrame | null): void {
    for (const listener of this.listeners) listener(this.view, frame);
  }

  private sendFrame(frame: ClientFrame): void {
    this.socket.send(JSON.stringify(frame));
  }

  hello(presented?: string): void {
    const frame: ClientFrame =
      presented === undefined
        ? { kind: "hello", id: this.nextId++ }
        : { kind: "hello", id: this.nextId++, presented };
    this.queue = [];
    this.inFlight = true;
    this.sendFrame(frame);
  }

  /** One discrete activation (click, arrow key, or dwell timer firing). */
  press(direction: Direction): void {
    if (!this.view.connected || !this.view.trialActive) return;
    const frame: KeystrokeFrame = {
      kind: "keystroke",
      id: this.nextId++,
      d: direction,
      t: this.clock(),
    };
    if (this.inFlight) {
      this.queue.push(frame);
      return;
    }
    this.dispatch(frame);
  }

  private dispatch(frame: KeystrokeFrame): void {
    this.inFlight = true;
    this.view = noteKeystroke(this.view, frame);
    this.sendFrame(frame);
    this.notify(null);
  }

  private receive(raw: string): void {
    const frame = parseServerFrame(raw);
    this.view = applyFrame(this.view, frame);
    if (endsExchange(frame)) {
      this.inFlight = false;
    }
    this.notify(frame);
    if (!this.inFlight) {
      const queued = this.queue.shift();
      if (queued && this.view.trialActive) this.dispatch(queued);
      else if (queued) this.queue = [];
    }
  }

  close(): void {
    this.socket.close();
  }
}
