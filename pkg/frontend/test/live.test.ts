// Live steering smoke test against a freshly spawned simulator service.
// Asserts the end-to-end criterion: selecting gaze f1 turns the command
// badge to FORWARD within window_s + 0.3 s of wall clock, and selecting
// "none" returns it to STOP within the same bound.

import { spawn, ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import WebSocket from "ws";

import { CockpitSession } from "../src/session.js";
import { renderFrame } from "../src/render.js";
import { gazeMessage } from "../src/messages.js";
import type { TelemetryFrame, HelloConfig } from "../src/types.js";

const PORT = 8900 + (process.pid % 500);
const URL = `ws://127.0.0.1:${PORT}/ws`;
const STARTUP_MS = 30_000;

let service: ChildProcess;

async function waitForPort(): Promise<void> {
  const deadline = Date.now() + STARTUP_MS;
  while (Date.now() < deadline) {
    const ok = await new Promise<boolean>((resolve) => {
      const probe = new WebSocket(URL);
      probe.on("open", () => {
        probe.close();
        resolve(true);
      });
      probe.on("error", () => resolve(false));
    });
    if (ok) return;
    await new Promise((r) => setTimeout(r, 300));
  }
  throw new Error(`service did not come up on ${URL}`);
}

beforeAll(async () => {
  service = spawn(
    "python3",
    ["-m", "ssvepsim.cli", "run", "--serve", `127.0.0.1:${PORT}`,
     "--preset", "good", "--seed", "5", "--realtime"],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  await waitForPort();
}, STARTUP_MS + 5_000);

afterAll(() => {
  service?.kill("SIGTERM");
});

describe("live steering", () => {
  it("gaze f1 -> FORWARD and none -> STOP within window_s + 0.3 s", async () => {
    const frames: TelemetryFrame[] = [];
    let hello: HelloConfig | null = null;
    const waiters: ((frame: TelemetryFrame) => void)[] = [];

    const session = new CockpitSession(
      URL,
      {
        onHello: (config) => {
          hello = config;
        },
        onFrame: (frame) => {
          frames.push(frame);
          for (const waiter of waiters.splice(0)) waiter(frame);
        },
      },
      { socketFactory: (url) => new WebSocket(url) as never },
    );
    session.connect();

    const nextFrame = () =>
      new Promise<TelemetryFrame>((resolve) => waiters.push(resolve));

    const waitForBadge = async (badge: string, deadlineMs: number) => {
      const t0 = Date.now();
      for (;;) {
        const frame = await nextFrame();
        if (renderFrame(frame).badge === badge) return Date.now() - t0;
        if (Date.now() - t0 > deadlineMs) {
          throw new Error(`badge never became ${badge} within ${deadlineMs} ms`);
        }
      }
    };

    try {
      // session up: hello then a first frame
      await nextFrame();
      expect(hello).not.toBeNull();
      const boundMs = (hello!.window_s + 0.3) * 1000;

      // resting subject idles at STOP
      await waitForBadge("STOP", boundMs);

      expect(session.send(gazeMessage(0))).toBe(true);
      const engageMs = await waitForBadge("FORWARD", boundMs);
      expect(engageMs).toBeLessThanOrEqual(boundMs);

      expect(session.send(gazeMessage(null))).toBe(true);
      const stopMs = await waitForBadge("STOP", boundMs);
      expect(stopMs).toBeLessThanOrEqual(boundMs);

      expect(session.malformedFrames).toBe(0);
    } finally {
      session.close();
    }
  }, 45_000);
});
