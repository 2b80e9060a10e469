"""Closed-loop orchestration.

Every hop (default 0.1 s) the loop pulls freshly synthesized samples into
per-electrode ring buffers, takes the most recent analysis window, subtracts
its mean, bandpass filters it forward-backward, computes the single-sided
spectrum, scores all six stimulus frequencies, emits the winning command as
a 5-byte frame, feeds that frame through the wire-format decoder into the
panel and the chair, and appends one telemetry frame.  Simulated time drives
everything, so runs are deterministic given a seed; wall-clock pacing is the
service layer's concern.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import classifier, dsp, panel as panel_mod, protocol, wheelchair
from .synth import ELECTRODES, SubjectModel

__all__ = [
    "DEFAULT_FLICKER_FREQS",
    "DEFAULT_THRESHOLDS",
    "LoopConfig",
    "RingBuffer",
    "SimLoop",
    "LoopResult",
    "ScenarioStep",
    "ScenarioScript",
    "StepDelay",
    "DelayReport",
    "TRIAL_1",
    "TRIAL_2",
    "run_loop",
    "run_scenario",
]

DEFAULT_FLICKER_FREQS = (7.0, 11.0, 9.0, 8.0, 20.0, 12.0)
DEFAULT_THRESHOLDS = (0.26, 0.26, 0.25, 0.22, 1.0, 1.0)
MAX_WINDOW_S = 4.0
SUPPORTED_WINDOWS_S = (1.0, 2.0, 4.0)

TELEMETRY_MAX_HZ = 60.0
TELEMETRY_MAX_BINS = 128

MANUAL_DIRECTION_CODES = {
    "none": 0,
    "forward": 1,
    "backward": 2,
    "left": 3,
    "right": 4,
}

@dataclass
class LoopConfig:
    """Everything the loop needs besides the subject."""

    fs: float = 256.0
    window_s: float = 2.0
    hop_s: float = 0.1
    band: tuple[float, float] = (3.0, 50.0)
    flicker_freqs: tuple[float, ...] = DEFAULT_FLICKER_FREQS
    thresholds: tuple[float, ...] = DEFAULT_THRESHOLDS
    seed: int = 0
    compat_mode: str = "strict"
    design_order: int = 3

    def validate(self) -> None:
        if self.fs <= 0:
            raise ValueError(f"fs must be positive, got {self.fs}")
        if float(self.window_s) not in SUPPORTED_WINDOWS_S:
            raise ValueError(f"window_s must be one of {SUPPORTED_WINDOWS_S}")
        if not 0 < self.hop_s <= self.window_s:
            raise ValueError(f"hop_s {self.hop_s} outside (0, window_s]")
        if abs(self.window_s * self.fs - round(self.window_s * self.fs)) > 1e-9:
            raise ValueError("window_s * fs must be integral")
        if self.compat_mode not in classifier.MODES:
            raise ValueError(f"compat_mode must be one of {classifier.MODES}")
        classifier.ThresholdVector(tuple(self.thresholds))
        # raises on bad cutoffs / frequencies
        dsp.design_bandpass(self.design_order, self.band[0], self.band[1], self.fs)
        classifier.build_plan(self.flicker_freqs, float(self.window_s), self.fs)


class RingBuffer:
    """Fixed-capacity circular sample store, zero-filled before first write.

    latest(n) always returns the n most recently written samples in
    chronological order (leading zeros while the buffer is still filling).
    """

    def __init__(self, capacity: int):
        self._data = np.zeros(int(capacity))
        self._pos = 0
        self.total_written = 0

    @property
    def capacity(self) -> int:
        return self._data.size

    def extend(self, samples) -> None:
        samples = np.asarray(samples, float)
        n = samples.size
        cap = self._data.size
        if n >= cap:
            self._data[:] = samples[-cap:]
            self._pos = 0
        else:
            end = self._pos + n
            if end <= cap:
                self._data[self._pos : end] = samples
            else:
                split = cap - self._pos
                self._data[self._pos :] = samples[:split]
                self._data[: end - cap] = samples[split:]
            self._pos = end % cap
        self.total_written += n

    def latest(self, n: int) -> np.ndarray:
        if not 0 < n <= self._data.size:
            raise ValueError(f"need 1..{self._data.size} samples, got {n}")
        start = (self._pos - n) % self._data.size
        if start + n <= self._data.size:
            return self._data[start : start + n].copy()
        return np.concatenate(
            [self._data[start:], self._data[: start + n - self._data.size]]
        )


class SimLoop:
    """Stateful hop-by-hop stepper of the whole closed loop.

    The subject's stimulus table is overridden with the loop's so the
    synthesized tones and the classifier always agree on what the six
    targets flicker at.
    """

    def __init__(self, config: LoopConfig, subject: SubjectModel):
        config.validate()
        self.config = config
        self.subject = subject
        subject.flicker_freqs = tuple(float(f) for f in config.flicker_freqs)
        self._rebuild_pipeline()
        capacity = round(MAX_WINDOW_S * config.fs)
        self.buffers = {name: RingBuffer(capacity) for name in ELECTRODES}
        self.decoder = protocol.FrameDecoder()
        self.panel = panel_mod.PanelState.initial(panel_mod.Menu.WHEELCHAIR)
        self.chair = wheelchair.WheelchairState()
        self.channels = wheelchair.command_to_channels(0)
        self.mode = "auto"
        self.manual_direction = "none"
        self.hop_index = 0
        self._samples_emitted = 0

    @property
    def t(self) -> float:
        return self.hop_index * self.config.hop_s

    def _rebuild_pipeline(self) -> None:
        cfg = self.config
        self.coeffs = dsp.design_bandpass(
            cfg.design_order, cfg.band[0], cfg.band[1], cfg.fs
        )
        self.plan = classifier.build_plan(
            cfg.flicker_freqs, float(cfg.window_s), cfg.fs
        )

    # -- control surface (used by the CLI/service between hops) ------------

    def set_gaze(self, target: int | None) -> None:
        self.subject.set_gaze(target)

    def set_window_s(self, seconds: float) -> None:
        if float(seconds) not in SUPPORTED_WINDOWS_S:
            raise ValueError(f"window seconds must be one of {SUPPORTED_WINDOWS_S}")
        self.config.window_s = float(seconds)
        self._rebuild_pipeline()

    def set_threshold(self, index: int, value: float) -> None:
        if not 0 <= index <= 5:
            raise ValueError(f"threshold index {index} outside 0..5")
        if not 0.0 < value <= 1.0:
            raise ValueError(f"threshold {value} outside (0, 1]")
        levels = list(self.config.thresholds)
        levels[index] = float(value)
        self.config.thresholds = tuple(levels)

    def set_mode(self, value: str) -> None:
        if value not in ("auto", "manual"):
            raise ValueError(f"mode must be 'auto' or 'manual', got {value!r}")
        self.mode = value
        target = panel_mod.Mode.MANUAL if value == "manual" else panel_mod.Mode.AUTO
        self.panel = panel_mod.set_mode(self.panel, target)
        if value == "auto":
            self.manual_direction = "none"

    def set_manual_direction(self, direction: str) -> None:
        if direction not in MANUAL_DIRECTION_CODES:
            raise ValueError(
                f"direction must be one of {sorted(MANUAL_DIRECTION_CODES)}"
            )
        self.manual_direction = direction

    # -- the hop ------------------------------------------------------------

    def step(self) -> dict:
        cfg = self.config
        fs = cfg.fs
        t_next = (self.hop_index + 1) * cfg.hop_s
        n_new = round(t_next * fs) - self._samples_emitted
        if n_new > 0:
            for window in self.subject.generate_window(n_new / fs, fs):
                self.buffers[window.electrode].extend(window.samples)
            self._samples_emitted += n_new

        window_n = round(cfg.window_s * fs)
        spectra: dict[str, dsp.SpectrumFrame] = {}
        peaks: dict[str, classifier.PeakMatrix] = {}
        for name in ELECTRODES:
            raw = self.buffers[name].latest(window_n)
            windowed = dsp.SignalWindow(
                samples=raw - raw.mean(),
                fs=fs,
                electrode=name,
                t0=max(0.0, t_next - window_n / fs),
            )
            spectra[name] = dsp.magnitude_spectrum(
                dsp.zero_phase_filter(self.coeffs, windowed)
            )
            peaks[name] = classifier.peak_frequencies(spectra[name], self.plan)

        points = classifier.harmonic_points(
            peaks["O1"], peaks["Oz"], peaks["O2"], self.plan, mode=cfg.compat_mode
        )
        decision = classifier.decide(
            points, classifier.ThresholdVector(tuple(cfg.thresholds))
        )

        for code in self.decoder.push(protocol.encode(decision.command_code)):
            if self.mode == "auto":
                self.panel = panel_mod.apply_command(self.panel, code)
                if code in wheelchair.COMMAND_CHANNEL_CODES:
                    self.channels = wheelchair.command_to_channels(code)
        if self.mode == "manual":
            self.channels = wheelchair.command_to_channels(
                MANUAL_DIRECTION_CODES[self.manual_direction]
            )

        v, omega = wheelchair.channels_to_velocity(
            self.channels, self.chair.k_v, self.chair.k_w
        )
        self.chair = wheelchair.step(self.chair, v, omega, cfg.hop_s)
        self.hop_index += 1
        return self._frame(t_next, decision, spectra)

    def _frame(self, t: float, decision, spectra) -> dict:
        return {
            "t": round(t, 9),
            "window_s": self.config.window_s,
            "gaze": self.subject.gaze,
            "points": [float(p) for p in decision.points.points],
            "thresholds": [float(x) for x in self.config.thresholds],
            "winner": decision.winner,
            "command_code": decision.command_code,
            "spectrum": _decimate_spectra(spectra),
            "panel": {
                "menu": self.panel.menu.value,
                "mode": self.panel.mode.value,
                "lcds": [list(row) for row in self.panel.lcds],
            },
            "chair": {
                "x": self.chair.x,
                "y": self.chair.y,
                "heading": self.chair.heading,
                "v": self.chair.v,
                "omega": self.chair.omega,
                "code_a": self.channels.code_a,
                "code_b": self.channels.code_b,
            },
        }


def _decimate_spectra(spectra: dict[str, dsp.SpectrumFrame]) -> dict:
    """Crop to the display band and thin to a transportable bin count."""
    freqs = spectra["O1"].freqs
    idx = np.nonzero(freqs <= TELEMETRY_MAX_HZ)[0]
    stride = max(1, math.ceil(idx.size / TELEMETRY_MAX_BINS))
    idx = idx[::stride]
    return {
        "freqs": [float(f) for f in freqs[idx]],
        "mags": {
            name: [float(m) for m in frame.mags[idx]]
            for name, frame in spectra.items()
        },
    }


@dataclass
class LoopResult:
    """Telemetry frames of one run plus flat-file writers."""

    frames: list[dict]
    config: LoopConfig

    EVENT_HEADER = (
        "t,gaze,points0,points1,points2,points3,points4,points5,"
        "command_code,x,y,heading"
    )

    def event_rows(self):
        for frame in self.frames:
            gaze = "" if frame["gaze"] is None else str(frame["gaze"])
            points = ",".join(f"{p:.6f}" for p in frame["points"])
            chair = frame["chair"]
            yield (
                f"{frame['t']:.3f},{gaze},{points},{frame['command_code']},"
                f"{chair['x']:.6f},{chair['y']:.6f},{chair['heading']:.6f}"
            )

    def event_csv_text(self) -> str:
        return "\n".join([self.EVENT_HEADER, *self.event_rows()]) + "\n"

    def write_event_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.event_csv_text())

    def write_frames_jsonl(self, path) -> None:
        with open(path, "w") as fh:
            for frame in self.frames:
                fh.write(json.dumps(frame) + "\n")


@dataclass(frozen=True)
class ScenarioStep:
    gaze: int | None
    hold_s: float

    def __post_init__(self):
        if self.hold_s <= 0:
            raise ValueError(f"hold_s must be positive, got {self.hold_s}")
        if self.gaze is not None and not 0 <= self.gaze <= 5:
            raise ValueError(f"gaze index {self.gaze} outside 0..5")


@dataclass(frozen=True)
class ScenarioScript:
    steps: tuple[ScenarioStep, ...]
    name: str = ""

    @classmethod
    def from_json(cls, path) -> "ScenarioScript":
        """Load `[{"gaze": 0, "hold_s": 5.0}, ...]`, optionally wrapped in
        `{"name": ..., "steps": [...]}`."""
        with open(path) as fh:
            data = json.load(fh)
        name = ""
        if isinstance(data, dict):
            name = data.get("name", "")
            data = data["steps"]
        steps = tuple(
            ScenarioStep(gaze=entry["gaze"], hold_s=float(entry["hold_s"]))
            for entry in data
        )
        return cls(steps=steps, name=name)


def _gaze_off_steps(motion_steps) -> tuple[ScenarioStep, ...]:
    out: list[ScenarioStep] = []
    for target in motion_steps:
        out.append(ScenarioStep(gaze=target, hold_s=5.0))
        out.append(ScenarioStep(gaze=None, hold_s=5.0))
    return tuple(out)


# forward - left - right - reverse, and its reshuffled second trial
TRIAL_1 = ScenarioScript(steps=_gaze_off_steps((0, 2, 3, 1)), name="trial-1")
TRIAL_2 = ScenarioScript(steps=_gaze_off_steps((2, 0, 1, 3)), name="trial-2")


@dataclass(frozen=True)
class StepDelay:
    """Delays for one gaze-on step; math.inf marks a timeout (a failed
    eng) and None a stop that the script never exercised."""

    target: int
    expected_code: int
    engage_s: float
    stop_s: float | None


@dataclass
class DelayReport:
    steps: list[StepDelay]
    name: str = ""
    log: "LoopResult | None" = None

    @staticmethod
    def _mean(values) -> float | None:
        finite = [v for v in values if v is not None and math.isfinite(v)]
        if not finite:
            return None
        return sum(finite) / len(finite)

    @property
    def mean_engage_s(self) -> float | None:
        return self._mean(s.engage_s for s in self.steps)

    @property
    def mean_stop_s(self) -> float | None:
        return self._mean(s.stop_s for s in self.steps)

    @property
    def failures(self) -> int:
        return sum(1 for s in self.steps if math.isinf(s.engage_s))

    def summary(self) -> str:
        lines = [f"scenario {self.name or '<unnamed>'}"]
        for s in self.steps:
            engage = "Fail" if math.isinf(s.engage_s) else f"{s.engage_s:.2f}s"
            stop = "-" if s.stop_s is None else (
                "Fail" if math.isinf(s.stop_s) else f"{s.stop_s:.2f}s"
            )
            lines.append(
                f"  target {s.target} (code {s.expected_code}): "
                f"engage {engage}, stop {stop}"
            )
        mean_engage = self.mean_engage_s
        mean_stop = self.mean_stop_s
        lines.append(
            "  mean engage "
            + ("Fail" if mean_engage is None else f"{mean_engage:.2f}s")
            + ", mean stop "
            + ("Fail" if mean_stop is None else f"{mean_stop:.2f}s")
        )
        return "\n".join(lines)


def run_loop(config: LoopConfig, subject: SubjectModel, until: float) -> LoopResult:
    """Step the loop for `until` simulated seconds and collect frames."""
    loop = SimLoop(config, subject)
    frames = []
    n_hops = round(until / config.hop_s)
    for _ in range(n_hops):
        frames.append(loop.step())
    return LoopResult(frames=frames, config=config)


def run_scenario(
    config: LoopConfig, subject: SubjectModel, script: ScenarioScript
) -> DelayReport:
    """Execute a gaze script and measure engage/stop delays from the log.

    Engage delay: gaze-on to the first emission of the step's command.
    Stop delay: gaze-off to the first frame in which the chair's speed and
    yaw rate are both zero; it is measured only when a rest step follows,
    and math.inf marks a chair still moving when the rest ran out.  The
    full telemetry log rides along as report.log.
    """
    loop = SimLoop(config, subject)
    frames: list[dict] = []
    boundaries: list[tuple[float, float, int | None]] = []
    t_cursor = 0.0
    for step in script.steps:
        loop.set_gaze(step.gaze)
        n_hops = round(step.hold_s / config.hop_s)
        for _ in range(n_hops):
            frames.append(loop.step())
        boundaries.append((t_cursor, loop.t, step.gaze))
        t_cursor = loop.t

    delays: list[StepDelay] = []
    for idx, (t_on, t_off, gaze) in enumerate(boundaries):
        if gaze is None:
            continue
        expected = classifier.DEFAULT_CODE_MAP[gaze]
        engage = math.inf
        for frame in frames:
            if t_on < frame["t"] <= t_off and frame["command_code"] == expected:
                engage = frame["t"] - t_on
                break
        stop: float | None = None
        if idx + 1 < len(boundaries) and boundaries[idx + 1][2] is None:
            rest_end = boundaries[idx + 1][1]
            stop = math.inf
            for frame in frames:
                if (
                    t_off < frame["t"] <= rest_end
                    and frame["chair"]["v"] == 0.0
                    and frame["chair"]["omega"] == 0.0
                ):
                    stop = frame["t"] - t_off
                    break
        delays.append(
            StepDelay(target=gaze, expected_code=expected, engage_s=engage, stop_s=stop)
        )
    return DelayReport(
        steps=delays, name=script.name, log=LoopResult(frames=frames, config=config)
    )
