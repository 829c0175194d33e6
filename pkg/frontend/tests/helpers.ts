/** Test scaffolding: a scripted fake socket for unit tests and a live
 * gateway subprocess for protocol-conformance tests. */

import { spawn, ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { createConnection } from "node:net";
import { tmpdir } from "node:os";
import { dirname, join, resolve } from "node:path";
import { fileURLToPath } from "node:url";
import WebSocket from "ws";

import { SocketLike } from "../src/client.js";

export class FakeSocket implements SocketLike {
  sent: string[] = [];
  closed = false;
  onopen: ((ev?: unknown) => void) | null = null;
  onmessage: ((ev: { data: unknown }) => void) | null = null;
  onclose: ((ev?: unknown) => void) | null = null;
  onerror: ((ev?: unknown) => void) | null = null;

  send(data: string): void {
    this.sent.push(data);
  }

  close(): void {
    this.closed = true;
    this.onclose?.();
  }

  open(): void {
    this.onopen?.();
  }

  deliver(frame: unknown): void {
    this.onmessage?.({ data: JSON.stringify(frame) });
  }
}

const REPO_ROOT = resolve(dirname(fileURLToPath(import.meta.url)), "..", "..");
const FIG3_TABLE = join(REPO_ROOT, "src", "h4writer", "data", "figure3_partial.tsv");

export interface LiveGateway {
  port: number;
  url: string;
  stop(): void;
}

function waitForPort(port: number, deadlineMs: number): Promise<void> {
  return new Promise((resolvePort, reject) => {
    const attempt = () => {
      const sock = createConnection({ port, host: "127.0.0.1" }, () => {
        sock.destroy();
        resolvePort();
      });
      sock.on("error", () => {
        sock.destroy();
        if (Date.now() > deadlineMs) reject(new Error(`gateway not up on :${port}`));
        else setTimeout(attempt, 100);
      });
    };
    attempt();
  });
}

export async function startGateway(): Promise<LiveGateway> {
  const dir = mkdtempSync(join(tmpdir(), "h4ui-"));
  const phraseFile = join(dir, "phrases.txt");
  writeFileSync(phraseFile, "e\net\nte e\n");
  const port = 8400 + Math.floor(Math.random() * 400);
  const proc: ChildProcess = spawn(
    "python3",
    [
      "-m",
      "h4writer.cli",
      "serve",
      "--table",
      FIG3_TABLE,
      "--phrases",
      phraseFile,
      "--port",
      String(port),
    ],
    { cwd: REPO_ROOT, stdio: ["ignore", "pipe", "pipe"] }
  );
  const stderr: string[] = [];
  proc.stderr?.on("data", (chunk) => stderr.push(String(chunk)));
  try {
    await waitForPort(port, Date.now() + 15000);
  } catch (err) {
    proc.kill();
    throw new Error(`${err}\n${stderr.join("")}`);
  }
  return {
    port,
    url: `ws://127.0.0.1:${port}/ws`,
    stop: () => proc.kill(),
  };
}

/** Browser-shaped wrapper over the Node ws client. */
export function browserStyleSocket(url: string): SocketLike {
  const ws = new WebSocket(url);
  const shim: SocketLike = {
    send: (data) => ws.send(data),
    close: () => ws.close(),
    onopen: null,
    onmessage: null,
    onclose: null,
    onerror: null,
  };
  ws.on("open", () => shim.onopen?.());
  ws.on("message", (data) => shim.onmessage?.({ data: data.toString() }));
  ws.on("close", () => shim.onclose?.());
  ws.on("error", (err) => shim.onerror?.(err));
  return shim;
}

export function waitFor(
  predicate: () => boolean,
  timeoutMs = 5000,
  label = "condition"
): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  return new Promise((res, rej) => {
    const tick = () => {
      if (predicate()) res();
      else if (Date.now() > deadline) rej(new Error(`timed out waiting for ${label}`));
      else setTimeout(tick, 20);
    };
    tick();
  });
}
