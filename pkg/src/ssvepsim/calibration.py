"""Offline threshold calibration and the online fine-tuning rule.

A calibration session records rest followed by sustained focus on one
target.  The focus segment is re-analyzed offline with a longer window and
a wider band than the live loop uses (4 s, 3-60 Hz versus 2 s, 3-50 Hz),
sliding at the loop's hop; the decision threshold is a fixed fraction of
the median harmonic score the subject actually reached.  Online, a
threshold that fails to keep the chair moving continuously is lowered
multiplicatively until it does.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import classifier, dsp

__all__ = [
    "UNCALIBRATABLE",
    "CalibrationSession",
    "calibrate_threshold",
    "focus_points",
    "threshold_from_points",
    "fine_tune",
    "load_recording_csv",
    "write_recording_csv",
    "write_thresholds_file",
    "load_thresholds_file",
]

# Returned when a recording never produces a nonzero score for its target.
UNCALIBRATABLE = None

DEFAULT_REST_S = 10.0
DEFAULT_FOCUS_S = 20.0
DEFAULT_ANALYSIS_WINDOW_S = 4.0
DEFAULT_ANALYSIS_BAND = (3.0, 60.0)
DEFAULT_HOP_S = 0.1
THRESHOLD_FACTOR = 0.6
THRESHOLD_MIN = 0.05
THRESHOLD_MAX = 1.0
FINE_TUNE_FACTOR = 0.9
INITIAL_THRESHOLD = 0.25  # universal starting level before fine-tuning


@dataclass(eq=False)
class CalibrationSession:
    """One recorded calibration run: rest, then focus on a single target."""

    recording: dict[str, np.ndarray]  # electrode -> samples, microvolts
    fs: float
    target_freq: float
    rest_s: float = DEFAULT_REST_S
    focus_s: float = DEFAULT_FOCUS_S
    window_s: float = DEFAULT_ANALYSIS_WINDOW_S
    band: tuple[float, float] = DEFAULT_ANALYSIS_BAND

    def __post_init__(self):
        self.recording = {
            name: np.asarray(samples, float) for name, samples in self.recording.items()
        }
        lengths = {a.size for a in self.recording.values()}
        if len(lengths) != 1:
            raise ValueError("electrode recordings differ in length")
        needed = round((self.rest_s + self.focus_s) * self.fs)
        if lengths.pop() < needed:
            raise ValueError(
                f"recording too short: need at least {needed} samples "
                f"for {self.rest_s}s rest + {self.focus_s}s focus"
            )


def focus_points(
    session: CalibrationSession, plan_freqs, hop_s: float = DEFAULT_HOP_S
) -> np.ndarray:
    """Strict-mode score of the session's target in every focus window.

    The analysis window slides across the focus segment at hop_s steps; each
    window is mean-subtracted, bandpass filtered and scored exactly as the
    live pipeline would, only with the session's window/band configuration.
    """
    freqs = tuple(float(f) for f in plan_freqs)
    if session.target_freq not in freqs:
        raise ValueError(
            f"target {session.target_freq} Hz not among plan frequencies {freqs}"
        )
    target_row = freqs.index(session.target_freq)
    plan = classifier.build_plan(freqs, window_s=session.window_s, fs=session.fs)
    coeffs = dsp.design_bandpass(3, session.band[0], session.band[1], session.fs)

    window_n = round(session.window_s * session.fs)
    focus_start = round(session.rest_s * session.fs)
    focus_end = focus_start + round(session.focus_s * session.fs)
    hop_n = max(1, round(hop_s * session.fs))

    points = []
    for start in range(focus_start, focus_end - window_n + 1, hop_n):
        peak_sets = {}
        for name in ("O1", "Oz", "O2"):
            samples = session.recording[name][start : start + window_n]
            window = dsp.SignalWindow(
                samples=samples - samples.mean(),
                fs=session.fs,
                electrode=name,
                t0=start / session.fs,
            )
            spectrum = dsp.magnitude_spectrum(dsp.zero_phase_filter(coeffs, window))
            peak_sets[name] = classifier.peak_frequencies(spectrum, plan)
        vector = classifier.harmonic_points(
            peak_sets["O1"], peak_sets["Oz"], peak_sets["O2"], plan
        )
        points.append(vector.points[target_row])
    if not points:
        raise ValueError("focus segment shorter than one analysis window")
    return np.asarray(points)


def threshold_from_points(points: np.ndarray, factor: float = THRESHOLD_FACTOR):
    """Threshold = factor * median score, clamped; None when nothing scored."""
    points = np.asarray(points, float)
    if points.size == 0 or np.all(points == 0.0):
        return UNCALIBRATABLE
    level = factor * float(np.median(points))
    return min(THRESHOLD_MAX, max(THRESHOLD_MIN, level))


def calibrate_threshold(session: CalibrationSession, plan_freqs, hop_s: float = DEFAULT_HOP_S):
    """Compute the decision threshold for the session's target frequency.

    Returns UNCALIBRATABLE (None) when the recording never scores, e.g. for
    pure noise.
    """
    return threshold_from_points(focus_points(session, plan_freqs, hop_s=hop_s))


def fine_tune(threshold: float, movement_continuous: bool) -> float:
    """Lower the threshold while the chair fails to move continuously."""
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"threshold {threshold} outside (0, 1]")
    if movement_continuous:
        return threshold
    return max(THRESHOLD_MIN, threshold * FINE_TUNE_FACTOR)


def load_recording_csv(path) -> tuple[dict[str, np.ndarray], float]:
    """Read a `t,O1,Oz,O2` CSV with a `# fs=<Hz>` comment header."""
    fs = None
    columns: list[list[float]] = [[], [], []]
    with open(path) as fh:
        header_seen = False
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line.lstrip("#").strip()
                if body.startswith("fs="):
                    fs = float(body[3:])
                continue
            if not header_seen:
                header_seen = True
                if line.lower().startswith("t,"):
                    continue  # column header row
            parts = line.split(",")
            if len(parts) != 4:
                raise ValueError(f"expected 4 columns t,O1,Oz,O2, got {line!r}")
            for idx in range(3):
                columns[idx].append(float(parts[idx + 1]))
    if fs is None:
        raise ValueError(f"{path} is missing the '# fs=<Hz>' header")
    recording = {
        "O1": np.asarray(columns[0]),
        "Oz": np.asarray(columns[1]),
        "O2": np.asarray(columns[2]),
    }
    return recording, fs


def write_recording_csv(path, recording: dict[str, np.ndarray], fs: float) -> None:
    with open(path, "w") as fh:
        fh.write(f"# fs={fs:g}\n")
        fh.write("t,O1,Oz,O2\n")
        n = len(next(iter(recording.values())))
        for i in range(n):
            t = i / fs
            fh.write(
                f"{t:.6f},{recording['O1'][i]:.6f},"
                f"{recording['Oz'][i]:.6f},{recording['O2'][i]:.6f}\n"
            )


def write_thresholds_file(path, freqs, thresholds) -> None:
    """Persist six labeled levels, keyed by stimulus frequency."""
    levels = {f"{float(f):g}": float(t) for f, t in zip(freqs, thresholds)}
    if len(levels) != 6:
        raise ValueError("need six frequency/threshold pairs")
    with open(path, "w") as fh:
        json.dump({"thresholds": levels}, fh, indent=2)
        fh.write("\n")


def load_thresholds_file(path, freqs) -> tuple[float, ...]:
    """Read levels back in the order of the given stimulus frequencies."""
    with open(path) as fh:
        data = json.load(fh)
    levels = data["thresholds"]
    try:
        return tuple(float(levels[f"{float(f):g}"]) for f in freqs)
    except KeyError as exc:
        raise ValueError(f"thresholds file {path} lacks a level for {exc}") from exc
