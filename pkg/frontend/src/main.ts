import { CockpitSession } from "./session.js";
import { CockpitUI } from "./ui.js";
import { renderFrame } from "./render.js";
import type { ControlMessage } from "./messages.js";

let session: CockpitSession | null = null;
let freqLabels: number[] | undefined;

const root = document.getElementById("app");
if (!root) throw new Error("missing #app container");

const ui = new CockpitUI(root, {
  sendControl(message: ControlMessage) {
    session?.send(message);
  },
  reconnect(url: string) {
    session?.close();
    session = makeSession(url);
    session.connect();
  },
});

function makeSession(url: string): CockpitSession {
  return new CockpitSession(url, {
    onStatus: (status) => ui.setStatus(status),
    onHello: (config) => {
      freqLabels = config.flicker_freqs;
      ui.applyHello(config);
    },
    onFrame: (frame) => ui.applyFrame(renderFrame(frame, freqLabels)),
    onServerError: (detail) => console.warn("control rejected:", detail),
  });
}

const params = new URLSearchParams(window.location.search);
session = makeSession(params.get("ws") ?? "ws://127.0.0.1:8765/ws");
session.connect();
