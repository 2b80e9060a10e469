// Wire types mirrored from the simulator's telemetry endpoint, plus the
// structural checks the cockpit applies before trusting a frame.

export interface SpectrumPayload {
  freqs: number[];
  mags: { O1: number[]; Oz: number[]; O2: number[] };
}

export interface PanelPayload {
  menu: string;
  mode: string;
  lcds: string[][];
}

export interface ChairPayload {
  x: number;
  y: number;
  heading: number;
  v: number;
  omega: number;
  code_a: number;
  code_b: number;
}

export interface TelemetryFrame {
  t: number;
  window_s: number;
  gaze: number | null;
  points: number[];
  thresholds: number[];
  winner: number | null;
  command_code: number;
  spectrum: SpectrumPayload;
  panel: PanelPayload;
  chair: ChairPayload;
}

export interface HelloConfig {
  fs: number;
  window_s: number;
  hop_s: number;
  band: number[];
  flicker_freqs: number[];
  thresholds: number[];
  compat_mode: string;
  seed: number;
  mode: string;
  gaze: number | null;
}

export interface HelloMessage {
  type: "hello";
  config: HelloConfig;
}

export interface ErrorMessage {
  type: "error";
  detail: unknown;
}

const allFinite = (xs: unknown): xs is number[] =>
  Array.isArray(xs) && xs.every((x) => typeof x === "number" && Number.isFinite(x));

function isSpectrum(raw: unknown): raw is SpectrumPayload {
  if (typeof raw !== "object" || raw === null) return false;
  const spec = raw as SpectrumPayload;
  if (!allFinite(spec.freqs)) return false;
  const mags = spec.mags;
  if (typeof mags !== "object" || mags === null) return false;
  for (const name of ["O1", "Oz", "O2"] as const) {
    const series = mags[name];
    if (!allFinite(series) || series.length !== spec.freqs.length) return false;
  }
  return true;
}

function isPanel(raw: unknown): raw is PanelPayload {
  if (typeof raw !== "object" || raw === null) return false;
  const panel = raw as PanelPayload;
  return (
    typeof panel.menu === "string" &&
    typeof panel.mode === "string" &&
    Array.isArray(panel.lcds) &&
    panel.lcds.length === 6 &&
    panel.lcds.every(
      (row) => Array.isArray(row) && row.length === 2 && row.every((s) => typeof s === "string"),
    )
  );
}

function isChair(raw: unknown): raw is ChairPayload {
  if (typeof raw !== "object" || raw === null) return false;
  const chair = raw as ChairPayload;
  return (
    allFinite([chair.x, chair.y, chair.heading, chair.v, chair.omega]) &&
    Number.isInteger(chair.code_a) &&
    Number.isInteger(chair.code_b)
  );
}

/** Validate one incoming message as a telemetry frame; null when malformed. */
export function parseTelemetryFrame(raw: unknown): TelemetryFrame | null {
  if (typeof raw !== "object" || raw === null) return null;
  const frame = raw as TelemetryFrame;
  if (typeof frame.t !== "number" || !Number.isFinite(frame.t)) return null;
  if (typeof frame.window_s !== "number") return null;
  if (!(frame.gaze === null || (Number.isInteger(frame.gaze) && frame.gaze >= 0 && frame.gaze <= 5)))
    return null;
  if (!allFinite(frame.points) || frame.points.length !== 6) return null;
  if (!allFinite(frame.thresholds) || frame.thresholds.length !== 6) return null;
  if (!(frame.winner === null || Number.isInteger(frame.winner))) return null;
  if (!Number.isInteger(frame.command_code) || frame.command_code < 0 || frame.command_code > 6)
    return null;
  if (!isSpectrum(frame.spectrum) || !isPanel(frame.panel) || !isChair(frame.chair)) return null;
  return frame;
}

export function isHello(raw: unknown): raw is HelloMessage {
  return (
    typeof raw === "object" &&
    raw !== null &&
    (raw as HelloMessage).type === "hello" &&
    typeof (raw as HelloMessage).config === "object"
  );
}

export function isErrorMessage(raw: unknown): raw is ErrorMessage {
  return typeof raw === "object" && raw !== null && (raw as ErrorMessage).type === "error";
}
