/** Browser entry point. Config comes from the URL query:
 *    ?session=alice&mute=1&dwell=400&ws=ws://host:port/ws
 */

import { SessionClient } from "./client.js";
import { KeyboardDom } from "./dom.js";
import { renderModel } from "./screen.js";

function wsUrl(params: URLSearchParams): string {
  const explicit = params.get("ws");
  if (explicit) return explicit;
  const proto = location.protocol === "https:" ? "wss:" : "ws:";
  const session = params.get("session");
  const query = session ? `?session=${encodeURIComponent(session)}` : "";
  return `${proto}//${location.host}/ws${query}`;
}

function start(): void {
  const params = new URLSearchParams(location.search);
  const socket = new WebSocket(wsUrl(params));
  const client = new SessionClient(socket as unknown as ConstructorParameters<typeof SessionClient>[0]);
  const dom = new KeyboardDom(document.getElementById("app")!, client, {
    mute: params.get("mute") === "1",
    dwellMs: Number(params.get("dwell") ?? "400"),
  });

  client.onView((view, frame) => {
    const model = renderModel(view);
    dom.render(model);
    if (frame && (frame.kind === "emitted" || frame.kind === "rejected")) {
      dom.feedback(model.feedback);
    }
    if (frame && frame.kind === "trial-done") {
      // Queue the next phrase after a short pause so the results stay visible.
      window.setTimeout(() => client.hello(), 2500);
    }
  });

  socket.addEventListener("open", () => client.hello());
}

start();
