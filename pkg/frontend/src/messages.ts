// Constructors for every control message the cockpit can put on the wire.
// Shapes must serialize to exactly what the simulator's schema accepts; the
// fixture tests hold them against the exported JSON Schema.

export type ManualDirection = "forward" | "backward" | "left" | "right" | "none";

export interface GazeMessage {
  type: "gaze";
  target: number | null;
}

export interface ThresholdMessage {
  type: "threshold";
  index: number;
  value: number;
}

export interface WindowMessage {
  type: "window";
  seconds: 1 | 2 | 4;
}

export interface ModeMessage {
  type: "mode";
  value: "manual" | "auto";
}

export interface ManualMessage {
  type: "manual";
  direction: ManualDirection;
}

export type ControlMessage =
  | GazeMessage
  | ThresholdMessage
  | WindowMessage
  | ModeMessage
  | ManualMessage;

function checkIndex(index: number): void {
  if (!Number.isInteger(index) || index < 0 || index > 5) {
    throw new RangeError(`target index must be 0..5, got ${index}`);
  }
}

export function gazeMessage(target: number | null): GazeMessage {
  if (target !== null) checkIndex(target);
  return { type: "gaze", target };
}

export function thresholdMessage(index: number, value: number): ThresholdMessage {
  checkIndex(index);
  if (!(value > 0 && value <= 1)) {
    throw new RangeError(`threshold must be in (0, 1], got ${value}`);
  }
  return { type: "threshold", index, value };
}

export function windowMessage(seconds: 1 | 2 | 4): WindowMessage {
  return { type: "window", seconds };
}

export function modeMessage(value: "manual" | "auto"): ModeMessage {
  return { type: "mode", value };
}

export function manualMessage(direction: ManualDirection): ManualMessage {
  return { type: "manual", direction };
}

export function serializeControl(message: ControlMessage): string {
  return JSON.stringify(message);
}

/** One example of every message shape the UI can produce (for schema tests). */
export function producibleExamples(): ControlMessage[] {
  const out: ControlMessage[] = [gazeMessage(null)];
  for (let i = 0; i < 6; i += 1) out.push(gazeMessage(i));
  for (let i = 0; i < 6; i += 1) out.push(thresholdMessage(i, 0.05 + 0.15 * i));
  out.push(thresholdMessage(3, 1.0));
  for (const seconds of [1, 2, 4] as const) out.push(windowMessage(seconds));
  out.push(modeMessage("manual"), modeMessage("auto"));
  for (const dir of ["forward", "backward", "left", "right", "none"] as const) {
    out.push(manualMessage(dir));
  }
  return out;
}
