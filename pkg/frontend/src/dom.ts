/** Thin DOM layer: builds the keyboard markup once, then patches it from a
 * ScreenModel after every view change. All interactive behavior (clicks,
 * arrow keys, dwell-hover, audio) is wired here and funnels into
 * SessionClient.press. */

import { SessionClient } from "./client.js";
import { DIRECTIONS, Direction } from "./protocol.js";
import { ScreenModel } from "./screen.js";

export interface UiOptions {
  mute: boolean;
  dwellMs: number;
}

interface KeyElements {
  key: HTMLButtonElement;
  box: HTMLUListElement;
}

export class KeyboardDom {
  private keys = new Map<Direction, KeyElements>();
  private presentedEl: HTMLDivElement;
  private transcribedEl: HTMLDivElement;
  private bannerEl: HTMLDivElement;
  private metricsEl: HTMLUListElement;
  private audio: AudioContext | null = null;
  private dwellTimer: number | null = null;

  constructor(
    root: HTMLElement,
    private client: SessionClient,
    private options: UiOptions
  ) {
    root.innerHTML = "";
    this.presentedEl = el("div", "text-area presented");
    this.transcribedEl = el("div", "text-area transcribed");
    this.bannerEl = el("div", "banner hidden");
    this.metricsEl = document.createElement("ul");
    this.metricsEl.className = "metrics";

    root.append(this.bannerEl, this.presentedEl, this.transcribedEl);

    const grid = el("div", "key-grid");
    for (const d of DIRECTIONS) {
      const cell = el("div", `cell cell-${d}`);
      const key = document.createElement("button");
      key.className = "key";
      key.textContent = d;
      const box = document.createElement("ul");
      box.className = "box";
      cell.append(key, box);
      grid.append(cell);
      this.keys.set(d, { key, box });
      this.wireKey(d, key);
    }
    root.append(grid, this.metricsEl);

    document.addEventListener("keydown", (ev) => {
      const byKey: Record<string, Direction> = {
        ArrowLeft: "L",
        ArrowRight: "R",
        ArrowUp: "U",
        ArrowDown: "D",
      };
      const d = byKey[ev.key];
      if (d) {
        ev.preventDefault();
        this.client.press(d);
      }
    });
  }

  private wireKey(d: Direction, key: HTMLButtonElement): void {
    key.addEventListener("click", () => this.client.press(d));
    key.addEventListener("mouseenter", () => {
      key.classList.add("hover");
      if (this.options.dwellMs > 0) {
        this.dwellTimer = window.setTimeout(() => {
          this.client.press(d);
        }, this.options.dwellMs);
      }
    });
    key.addEventListener("mouseleave", () => {
      key.classList.remove("hover");
      if (this.dwellTimer !== null) {
        window.clearTimeout(this.dwellTimer);
        this.dwellTimer = null;
      }
    });
  }

  render(model: ScreenModel): void {
    this.presentedEl.textContent = model.presented;
    this.transcribedEl.textContent = model.transcribed || " ";
    this.bannerEl.textContent = model.banner ?? "";
    this.bannerEl.classList.toggle("hidden", model.banner === null);

    for (const km of model.keys) {
      const els = this.keys.get(km.direction)!;
      els.key.disabled = km.disabled;
      els.box.replaceChildren(
        ...km.symbols.map((s) => {
          const li = document.createElement("li");
          li.textContent = s;
          return li;
        })
      );
    }

    this.metricsEl.replaceChildren(
      ...model.metricsLines.map((line) => {
        const li = document.createElement("li");
        li.textContent = line;
        return li;
      })
    );
  }

  /** Fire once per feedback-worthy frame, not per render. */
  feedback(kind: ScreenModel["feedback"]): void {
    switch (kind) {
      case "click":
        this.tone(880, 0.03);
        break;
      case "beep":
        this.tone(220, 0.25);
        this.flash();
        break;
      case "shake":
        this.shake();
        break;
      case "none":
        break;
    }
  }

  private tone(hz: number, seconds: number): void {
    if (this.options.mute) return;
    try {
      this.audio ??= new AudioContext();
      const osc = this.audio.createOscillator();
      const gain = this.audio.createGain();
      osc.frequency.value = hz;
      gain.gain.value = 0.1;
      osc.connect(gain).connect(this.audio.destination);
      osc.start();
      osc.stop(this.audio.currentTime + seconds);
    } catch {
      // Audio failures degrade silently.
    }
  }

  private flash(): void {
    this.transcribedEl.classList.remove("flash");
    void this.transcribedEl.offsetWidth;
    this.transcribedEl.classList.add("flash");
  }

  private shake(): void {
    const grid = this.presentedEl.parentElement?.querySelector(".key-grid");
    if (grid instanceof HTMLElement) {
      grid.classList.remove("shake");
      void grid.offsetWidth;
      grid.classList.add("shake");
    }
  }
}

function el(tag: string, className: string): HTMLDivElement {
  const node = document.createElement(tag) as HTMLDivElement;
  node.className = className;
  return node;
}
