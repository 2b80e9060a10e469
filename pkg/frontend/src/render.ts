// Pure frame -> view-model mapping.  No DOM access here, so rendering can be
// replayed and asserted against recorded sessions.

import type { TelemetryFrame } from "./types.js";

export const COMMAND_BADGES = [
  "STOP",
  "FORWARD",
  "REVERSE",
  "LEFT",
  "RIGHT",
  "LED ON",
  "LED OFF",
] as const;

export interface BarView {
  label: string;
  points: number;
  threshold: number;
  over: boolean;
  winner: boolean;
}

export interface SeriesView {
  name: "O1" | "Oz" | "O2";
  mags: number[];
}

export interface ViewModel {
  t: number;
  windowS: number;
  gaze: number | null;
  badge: string;
  badgeActive: boolean;
  bars: BarView[];
  lcds: [string, string][];
  panelMenu: string;
  panelMode: string;
  spectrum: { freqs: number[]; series: SeriesView[] };
  pose: { x: number; y: number; heading: number; v: number; omega: number };
  channelCodes: { a: number; b: number };
}

export function renderFrame(frame: TelemetryFrame, freqLabels?: number[]): ViewModel {
  const bars: BarView[] = frame.points.map((points, i) => ({
    label: freqLabels && freqLabels[i] !== undefined ? `${freqLabels[i]} Hz` : `f${i + 1}`,
    points,
    threshold: frame.thresholds[i] ?? 1,
    over: points > (frame.thresholds[i] ?? 1),
    winner: frame.winner === i,
  }));
  return {
    t: frame.t,
    windowS: frame.window_s,
    gaze: frame.gaze,
    badge: COMMAND_BADGES[frame.command_code] ?? "STOP",
    badgeActive: frame.command_code !== 0,
    bars,
    lcds: frame.panel.lcds.map((row) => [row[0] ?? "", row[1] ?? ""]),
    panelMenu: frame.panel.menu,
    panelMode: frame.panel.mode,
    spectrum: {
      freqs: frame.spectrum.freqs,
      series: (["O1", "Oz", "O2"] as const).map((name) => ({
        name,
        mags: frame.spectrum.mags[name],
      })),
    },
    pose: {
      x: frame.chair.x,
      y: frame.chair.y,
      heading: frame.chair.heading,
      v: frame.chair.v,
      omega: frame.chair.omega,
    },
    channelCodes: { a: frame.chair.code_a, b: frame.chair.code_b },
  };
}
