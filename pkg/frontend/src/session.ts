// WebSocket session with automatic reconnect.  The socket implementation is
// injectable so tests (and the node smoke test) can supply the `ws` package
// while the browser uses the native WebSocket.

import {
  HelloConfig,
  isErrorMessage,
  isHello,
  parseTelemetryFrame,
  TelemetryFrame,
} from "./types.js";
import { ControlMessage, serializeControl } from "./messages.js";

export type SessionStatus = "connecting" | "open" | "reconnecting" | "closed";

export interface WebSocketLike {
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  send(data: string): void;
  close(): void;
  readyState: number;
}

export interface SessionEvents {
  onHello?: (config: HelloConfig) => void;
  onFrame?: (frame: TelemetryFrame) => void;
  onStatus?: (status: SessionStatus) => void;
  onServerError?: (detail: unknown) => void;
}

export interface SessionOptions {
  socketFactory?: (url: string) => WebSocketLike;
  initialBackoffMs?: number;
  maxBackoffMs?: number;
}

const OPEN = 1;

function defaultFactory(url: string): WebSocketLike {
  if (typeof WebSocket === "undefined") {
    throw new Error("no WebSocket implementation available; pass socketFactory");
  }
  return new WebSocket(url) as unknown as WebSocketLike;
}

export class CockpitSession {
  readonly url: string;
  status: SessionStatus = "closed";
  config: HelloConfig | null = null;
  framesReceived = 0;
  malformedFrames = 0;
  serverErrors = 0;

  private readonly events: SessionEvents;
  private readonly factory: (url: string) => WebSocketLike;
  private readonly initialBackoffMs: number;
  private readonly maxBackoffMs: number;
  private backoffMs: number;
  private socket: WebSocketLike | null = null;
  private closedByUser = false;
  private retryTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(url: string, events: SessionEvents = {}, options: SessionOptions = {}) {
    this.url = url;
    this.events = events;
    this.factory = options.socketFactory ?? defaultFactory;
    this.initialBackoffMs = options.initialBackoffMs ?? 300;
    this.maxBackoffMs = options.maxBackoffMs ?? 5000;
    this.backoffMs = this.initialBackoffMs;
  }

  connect(): void {
    this.closedByUser = false;
    this.open("connecting");
  }

  close(): void {
    this.closedByUser = true;
    if (this.retryTimer !== null) {
      clearTimeout(this.retryTimer);
      this.retryTimer = null;
    }
    this.socket?.close();
    this.socket = null;
    this.setStatus("closed");
  }

  /** Send a control message; the next telemetry frame reflecting the change
   *  is the acknowledgement. Returns false while disconnected. */
  send(message: ControlMessage): boolean {
    if (!this.socket || this.socket.readyState !== OPEN) return false;
    this.socket.send(serializeControl(message));
    return true;
  }

  private setStatus(status: SessionStatus): void {
    this.status = status;
    this.events.onStatus?.(status);
  }

  private open(phase: "connecting" | "reconnecting"): void {
    this.setStatus(phase);
    let socket: WebSocketLike;
    try {
      socket = this.factory(this.url);
    } catch {
      this.scheduleRetry();
      return;
    }
    this.socket = socket;
    socket.onopen = () => {
      this.backoffMs = this.initialBackoffMs;
      this.setStatus("open");
    };
    socket.onmessage = (ev) => this.handleMessage(ev.data);
    socket.onerror = () => {
      // the close handler owns the retry
    };
    socket.onclose = () => {
      this.socket = null;
      if (!this.closedByUser) this.scheduleRetry();
    };
  }

  private scheduleRetry(): void {
    if (this.closedByUser) return;
    this.setStatus("reconnecting");
    const delay = this.backoffMs;
    this.backoffMs = Math.min(this.backoffMs * 2, this.maxBackoffMs);
    this.retryTimer = setTimeout(() => {
      this.retryTimer = null;
      if (!this.closedByUser) this.open("reconnecting");
    }, delay);
  }

  private handleMessage(data: unknown): void {
    let raw: unknown;
    try {
      raw = JSON.parse(typeof data === "string" ? data : String(data));
    } catch {
      this.malformedFrames += 1;
      return;
    }
    if (isHello(raw)) {
      this.config = raw.config;
      this.events.onHello?.(raw.config);
      return;
    }
    if (isErrorMessage(raw)) {
      this.serverErrors += 1;
      this.events.onServerError?.(raw.detail);
      return;
    }
    const frame = parseTelemetryFrame(raw);
    if (frame === null) {
      this.malformedFrames += 1;
      return;
    }
    this.framesReceived += 1;
    this.events.onFrame?.(frame);
  }
}
