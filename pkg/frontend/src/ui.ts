// DOM construction and canvas drawing.  Everything here consumes the pure
// view model from render.ts; no simulator knowledge beyond that.

import type { ViewModel } from "./render.js";
import type { HelloConfig } from "./types.js";
import type { SessionStatus } from "./session.js";
import {
  ControlMessage,
  ManualDirection,
  gazeMessage,
  manualMessage,
  modeMessage,
  thresholdMessage,
  windowMessage,
} from "./messages.js";

const ELECTRODE_COLORS: Record<string, string> = {
  O1: "#4cc9f0",
  Oz: "#f72585",
  O2: "#90e039",
};

const SPECTRUM_MAX_HZ = 60;

export interface CockpitHooks {
  sendControl(message: ControlMessage): void;
  reconnect(url: string): void;
}

export class CockpitUI {
  private readonly hooks: CockpitHooks;
  private readonly statusDot: HTMLElement;
  private readonly statusText: HTMLElement;
  private readonly urlInput: HTMLInputElement;
  private readonly badge: HTMLElement;
  private readonly configLine: HTMLElement;
  private readonly gazeButtons: HTMLButtonElement[] = [];
  private readonly lcdCells: [HTMLElement, HTMLElement][] = [];
  private readonly barsCanvas: HTMLCanvasElement;
  private readonly spectrumCanvas: HTMLCanvasElement;
  private readonly chairCanvas: HTMLCanvasElement;
  private readonly sliders: HTMLInputElement[] = [];
  private readonly sliderLabels: HTMLElement[] = [];
  private readonly modeButton: HTMLButtonElement;
  private readonly manualPad: HTMLElement;
  private readonly poseText: HTMLElement;
  private trail: { x: number; y: number }[] = [];
  private freqLabels: number[] = [7, 11, 9, 8, 20, 12];
  private manualModeOn = false;

  constructor(root: HTMLElement, hooks: CockpitHooks) {
    this.hooks = hooks;
    root.innerHTML = "";

    const top = el("div", "topbar");
    this.urlInput = el("input", "url-input") as HTMLInputElement;
    this.urlInput.value = defaultUrl();
    const connectBtn = el("button", "btn") as HTMLButtonElement;
    connectBtn.textContent = "connect";
    connectBtn.onclick = () => this.hooks.reconnect(this.urlInput.value);
    this.statusDot = el("span", "dot closed");
    this.statusText = el("span", "status-text");
    this.statusText.textContent = "closed";
    this.badge = el("div", "badge stop");
    this.badge.textContent = "STOP";
    this.configLine = el("span", "config-line");
    top.append(this.urlInput, connectBtn, this.statusDot, this.statusText,
               this.configLine, this.badge);
    root.appendChild(top);

    const grid = el("div", "grid");
    root.appendChild(grid);

    // gaze selector: six stimuli plus "none", latching
    const gazePanel = panel("gaze target");
    const gazeRow = el("div", "gaze-row");
    for (let i = 0; i < 7; i += 1) {
      const button = el("button", "btn gaze") as HTMLButtonElement;
      button.textContent = i < 6 ? `f${i + 1}` : "none";
      button.onclick = () => {
        const target = i < 6 ? i : null;
        this.hooks.sendControl(gazeMessage(target));
        this.markGaze(target);
      };
      this.gazeButtons.push(button);
      gazeRow.appendChild(button);
    }
    gazePanel.appendChild(gazeRow);
    grid.appendChild(gazePanel);

    const spectrumPanel = panel("spectrum (0-60 Hz)");
    this.spectrumCanvas = canvas(460, 190);
    spectrumPanel.appendChild(this.spectrumCanvas);
    grid.appendChild(spectrumPanel);

    const barsPanel = panel("harmonic points vs thresholds");
    this.barsCanvas = canvas(460, 190);
    barsPanel.appendChild(this.barsCanvas);
    grid.appendChild(barsPanel);

    const lcdPanel = panel("stimulus panel");
    const lcdRow = el("div", "lcd-row");
    for (let i = 0; i < 6; i += 1) {
      const box = el("div", "lcd");
      const line0 = el("div", "lcd-line");
      const line1 = el("div", "lcd-line");
      box.append(line0, line1);
      lcdRow.appendChild(box);
      this.lcdCells.push([line0, line1]);
    }
    lcdPanel.appendChild(lcdRow);
    grid.appendChild(lcdPanel);

    const chairPanel = panel("wheelchair");
    this.chairCanvas = canvas(460, 230);
    this.poseText = el("div", "pose-text");
    chairPanel.append(this.chairCanvas, this.poseText);
    grid.appendChild(chairPanel);

    const controls = panel("controls");
    const sliderBox = el("div", "sliders");
    for (let i = 0; i < 6; i += 1) {
      const wrap = el("div", "slider-wrap");
      const label = el("div", "slider-label");
      const slider = el("input", "slider") as HTMLInputElement;
      slider.type = "range";
      slider.min = "0.05";
      slider.max = "1.0";
      slider.step = "0.01";
      slider.value = "0.25";
      slider.oninput = () => {
        this.hooks.sendControl(thresholdMessage(i, Number(slider.value)));
        label.textContent = `f${i + 1}: ${Number(slider.value).toFixed(2)}`;
      };
      wrap.append(label, slider);
      sliderBox.appendChild(wrap);
      this.sliders.push(slider);
      this.sliderLabels.push(label);
    }
    controls.appendChild(sliderBox);

    const row = el("div", "control-row");
    const windowSelect = el("select", "select") as HTMLSelectElement;
    for (const s of [1, 2, 4]) {
      const option = document.createElement("option");
      option.value = String(s);
      option.textContent = `${s} s window`;
      if (s === 2) option.selected = true;
      windowSelect.appendChild(option);
    }
    windowSelect.onchange = () => {
      this.hooks.sendControl(windowMessage(Number(windowSelect.value) as 1 | 2 | 4));
    };
    this.modeButton = el("button", "btn") as HTMLButtonElement;
    this.modeButton.textContent = "switch to manual";
    this.modeButton.onclick = () => {
      this.manualModeOn = !this.manualModeOn;
      this.hooks.sendControl(modeMessage(this.manualModeOn ? "manual" : "auto"));
      this.syncManualPad();
    };
    row.append(windowSelect, this.modeButton);
    controls.appendChild(row);

    this.manualPad = el("div", "manual-pad");
    for (const dir of ["forward", "left", "none", "right", "backward"] as ManualDirection[]) {
      const button = el("button", "btn pad") as HTMLButtonElement;
      button.textContent = dir;
      button.onclick = () => this.hooks.sendControl(manualMessage(dir));
      this.manualPad.appendChild(button);
    }
    controls.appendChild(this.manualPad);
    grid.appendChild(controls);
    this.syncManualPad();
  }

  setStatus(status: SessionStatus): void {
    this.statusDot.className = `dot ${status}`;
    this.statusText.textContent = status;
  }

  applyHello(config: HelloConfig): void {
    this.freqLabels = config.flicker_freqs;
    this.configLine.textContent =
      `fs ${config.fs} Hz | window ${config.window_s} s | hop ${config.hop_s} s | ` +
      `band ${config.band[0]}-${config.band[1]} Hz`;
    this.gazeButtons.forEach((button, i) => {
      if (i < 6) button.textContent = `f${i + 1} (${config.flicker_freqs[i]} Hz)`;
    });
    config.thresholds.forEach((level, i) => {
      const slider = this.sliders[i];
      const label = this.sliderLabels[i];
      if (slider) slider.value = String(level);
      if (label) label.textContent = `f${i + 1}: ${level.toFixed(2)}`;
    });
    this.markGaze(config.gaze);
    this.manualModeOn = config.mode === "manual";
    this.syncManualPad();
  }

  applyFrame(view: ViewModel): void {
    this.badge.textContent = view.badge;
    this.badge.className = `badge ${view.badgeActive ? "active" : "stop"}`;
    this.markGaze(view.gaze);
    view.lcds.forEach((row, i) => {
      const cell = this.lcdCells[i];
      if (!cell) return;
      cell[0].textContent = row[0].padEnd(8, " ");
      cell[1].textContent = row[1].padEnd(8, " ");
    });
    this.manualModeOn = view.panelMode === "Manual";
    this.syncManualPad();
    this.drawSpectrum(view);
    this.drawBars(view);
    this.drawChair(view);
    this.poseText.textContent =
      `x ${view.pose.x.toFixed(2)} m | y ${view.pose.y.toFixed(2)} m | ` +
      `hdg ${((view.pose.heading * 180) / Math.PI).toFixed(0)}° | ` +
      `v ${view.pose.v.toFixed(2)} m/s | ω ${view.pose.omega.toFixed(2)} rad/s | ` +
      `A ${view.channelCodes.a} B ${view.channelCodes.b}`;
  }

  private markGaze(target: number | null): void {
    this.gazeButtons.forEach((button, i) => {
      const active = target === null ? i === 6 : i === target;
      button.classList.toggle("latched", active);
    });
  }

  private syncManualPad(): void {
    this.modeButton.textContent = this.manualModeOn ? "switch to auto" : "switch to manual";
    this.manualPad.classList.toggle("disabled", !this.manualModeOn);
    this.manualPad.querySelectorAll("button").forEach((b) => {
      (b as HTMLButtonElement).disabled = !this.manualModeOn;
    });
  }

  private drawSpectrum(view: ViewModel): void {
    const ctx = this.spectrumCanvas.getContext("2d");
    if (!ctx) return;
    const { width, height } = this.spectrumCanvas;
    ctx.clearRect(0, 0, width, height);
    ctx.fillStyle = "#10131a";
    ctx.fillRect(0, 0, width, height);
    const peak = Math.max(
      0.5,
      ...view.spectrum.series.flatMap((s) => s.mags),
    );
    // stimulus frequency guides
    ctx.strokeStyle = "#2a2f3d";
    for (const f of this.freqLabels) {
      const x = (f / SPECTRUM_MAX_HZ) * width;
      ctx.beginPath();
      ctx.moveTo(x, 0);
      ctx.lineTo(x, height);
      ctx.stroke();
    }
    for (const series of view.spectrum.series) {
      ctx.strokeStyle = ELECTRODE_COLORS[series.name] ?? "#ffffff";
      ctx.beginPath();
      series.mags.forEach((mag, k) => {
        const f = view.spectrum.freqs[k] ?? 0;
        const x = (f / SPECTRUM_MAX_HZ) * width;
        const y = height - (mag / peak) * (height - 12) - 4;
        if (k === 0) ctx.moveTo(x, y);
        else ctx.lineTo(x, y);
      });
      ctx.stroke();
    }
    ctx.fillStyle = "#8a93a6";
    ctx.font = "10px monospace";
    for (let f = 0; f <= SPECTRUM_MAX_HZ; f += 10) {
      ctx.fillText(`${f}`, (f / SPECTRUM_MAX_HZ) * (width - 16), height - 2);
    }
  }

  private drawBars(view: ViewModel): void {
    const ctx = this.barsCanvas.getContext("2d");
    if (!ctx) return;
    const { width, height } = this.barsCanvas;
    ctx.clearRect(0, 0, width, height);
    ctx.fillStyle = "#10131a";
    ctx.fillRect(0, 0, width, height);
    const slot = width / 6;
    const barWidth = slot * 0.5;
    const scaleY = (v: number) => height - 18 - Math.min(v, 1.2) * (height - 36);
    view.bars.forEach((bar, i) => {
      const x = i * slot + (slot - barWidth) / 2;
      ctx.fillStyle = bar.over ? "#ffb703" : "#3d5a80";
      if (bar.winner && bar.over) ctx.fillStyle = "#ff5d8f";
      const y = scaleY(bar.points);
      ctx.fillRect(x, y, barWidth, height - 18 - y);
      // threshold tick
      ctx.strokeStyle = "#e0e1dd";
      const ty = scaleY(bar.threshold);
      ctx.beginPath();
      ctx.moveTo(x - 4, ty);
      ctx.lineTo(x + barWidth + 4, ty);
      ctx.stroke();
      ctx.fillStyle = "#8a93a6";
      ctx.font = "10px monospace";
      ctx.fillText(bar.label, i * slot + 4, height - 6);
      ctx.fillText(bar.points.toFixed(2), x, y - 3);
    });
  }

  private drawChair(view: ViewModel): void {
    const ctx = this.chairCanvas.getContext("2d");
    if (!ctx) return;
    const { width, height } = this.chairCanvas;
    ctx.clearRect(0, 0, width, height);
    ctx.fillStyle = "#10131a";
    ctx.fillRect(0, 0, width, height);
    this.trail.push({ x: view.pose.x, y: view.pose.y });
    if (this.trail.length > 600) this.trail.shift();
    const span = Math.max(
      2.0,
      ...this.trail.map((p) => Math.max(Math.abs(p.x), Math.abs(p.y))),
    );
    const toPx = (p: { x: number; y: number }) => ({
      x: width / 2 + (p.x / (span * 1.2)) * (width / 2 - 10),
      y: height / 2 - (p.y / (span * 1.2)) * (height / 2 - 10),
    });
    ctx.strokeStyle = "#3a506b";
    ctx.beginPath();
    this.trail.forEach((p, i) => {
      const q = toPx(p);
      if (i === 0) ctx.moveTo(q.x, q.y);
      else ctx.lineTo(q.x, q.y);
    });
    ctx.stroke();
    const here = toPx({ x: view.pose.x, y: view.pose.y });
    ctx.fillStyle = "#90e039";
    ctx.beginPath();
    ctx.arc(here.x, here.y, 6, 0, 2 * Math.PI);
    ctx.fill();
    ctx.strokeStyle = "#90e039";
    ctx.beginPath();
    ctx.moveTo(here.x, here.y);
    ctx.lineTo(
      here.x + 14 * Math.cos(-view.pose.heading),
      here.y + 14 * Math.sin(-view.pose.heading),
    );
    ctx.stroke();
  }
}

function el(tag: string, className: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  return node as HTMLElement;
}

function panel(title: string): HTMLElement {
  const box = el("section", "panel");
  const heading = el("h2", "panel-title");
  heading.textContent = title;
  box.appendChild(heading);
  return box;
}

function canvas(width: number, height: number): HTMLCanvasElement {
  const node = document.createElement("canvas");
  node.width = width;
  node.height = height;
  return node;
}

function defaultUrl(): string {
  const params = new URLSearchParams(window.location.search);
  return params.get("ws") ?? "ws://127.0.0.1:8765/ws";
}
