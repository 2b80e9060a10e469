"""Synthetic SSVEP subject.

Replaces amplifier and human: three occipital electrodes carry a
fundamental-plus-harmonics response for the gazed target, a 10 Hz
background alpha tone and white Gaussian noise.  Harmonic amplitudes decay
geometrically; per-tone phase accumulators make consecutive windows splice
without discontinuities, so a streaming consumer sees one continuous
recording.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .dsp import SignalWindow

__all__ = ["ELECTRODES", "DEFAULT_FLICKER_FREQS", "SUBJECT_PRESETS", "SubjectModel"]

ELECTRODES = ("O1", "Oz", "O2")
DEFAULT_FLICKER_FREQS = (7.0, 11.0, 9.0, 8.0, 20.0, 12.0)
ALPHA_HZ = 10.0

# Named signal-quality presets.  "good" is the reference subject for the
# closed-loop accuracy checks; "weak" barely clears default thresholds;
# "absent" produces no evoked response at all (a non-responder).
SUBJECT_PRESETS: dict[str, dict] = {
    "good": dict(ssvep_amp=2.0, harmonic_decay=0.5, noise_sigma=1.2, alpha_amp=1.0),
    "weak": dict(ssvep_amp=0.7, harmonic_decay=0.35, noise_sigma=1.6, alpha_amp=1.2),
    "absent": dict(ssvep_amp=0.0, harmonic_decay=0.5, noise_sigma=1.2, alpha_amp=1.0),
}


@dataclass
class SubjectModel:
    """Mutable, single-owner generator of 3-electrode EEG windows.

    gaze selects which of the six stimulus frequencies is attended (None for
    rest).  Output per electrode:

        gain * sum_k amp * decay**(k-1) * sin(2*pi*k*f*t + phase_k)
        + alpha_amp * sin(2*pi*10*t + phase_alpha) + N(0, noise_sigma^2)

    Harmonics run up to n_harmonics or, when that is None, to every multiple
    below the Nyquist rate of the requested window.  Output is a pure
    function of (seed, construction parameters, call sequence).
    """

    flicker_freqs: tuple[float, ...] = DEFAULT_FLICKER_FREQS
    gaze: int | None = None
    ssvep_amp: float = 2.0
    harmonic_decay: float = 0.5
    n_harmonics: int | None = None
    electrode_gain: tuple[float, float, float] = (1.0, 0.85, 1.0)
    noise_sigma: float = 1.0
    alpha_amp: float = 1.0
    seed: int = 0

    def __post_init__(self):
        self.flicker_freqs = tuple(float(f) for f in self.flicker_freqs)
        if len(self.flicker_freqs) != 6:
            raise ValueError("need 6 stimulus frequencies")
        if not 0.0 < self.harmonic_decay <= 1.0:
            raise ValueError(f"harmonic_decay {self.harmonic_decay} outside (0, 1]")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        if len(self.electrode_gain) != 3 or any(g <= 0 for g in self.electrode_gain):
            raise ValueError("need 3 positive electrode gains")
        if self.gaze is not None and not 0 <= self.gaze <= 5:
            raise ValueError(f"gaze index {self.gaze} outside 0..5")
        self._rng = np.random.default_rng(self.seed)
        self._t = 0.0
        self._ssvep_phases = np.zeros(0)
        self._alpha_phase = 0.0

    @classmethod
    def preset(cls, name: str, **overrides) -> "SubjectModel":
        if name not in SUBJECT_PRESETS:
            raise ValueError(f"unknown preset {name!r}; have {sorted(SUBJECT_PRESETS)}")
        params = dict(SUBJECT_PRESETS[name])
        params.update(overrides)
        return cls(**params)

    @classmethod
    def from_profile(cls, path, **overrides) -> "SubjectModel":
        """Load a subject profile from a JSON key-value file."""
        with open(path) as fh:
            params = json.load(fh)
        if not isinstance(params, dict):
            raise ValueError(f"profile {path} must hold a JSON object")
        preset = params.pop("preset", None)
        if "electrode_gain" in params:
            params["electrode_gain"] = tuple(params["electrode_gain"])
        if "flicker_freqs" in params:
            params["flicker_freqs"] = tuple(params["flicker_freqs"])
        params.update(overrides)
        if preset is not None:
            return cls.preset(preset, **params)
        return cls(**params)

    def set_gaze(self, target: int | None) -> "SubjectModel":
        """Move the gaze; tones of a newly attended target restart at phase 0.

        Re-selecting the current target keeps every accumulator, so the
        evoked tones stay phase-continuous.
        """
        if target is not None and not 0 <= target <= 5:
            raise ValueError(f"gaze index {target} outside 0..5")
        if target != self.gaze:
            self.gaze = target
            self._ssvep_phases = np.zeros(0)
        return self

    def _harmonic_count(self, fs: float) -> int:
        if self.gaze is None:
            return 0
        f = self.flicker_freqs[self.gaze]
        below_nyquist = math.ceil(fs / 2.0 / f) - 1
        if self.n_harmonics is None:
            return max(0, below_nyquist)
        return max(0, min(self.n_harmonics, below_nyquist))

    def generate_window(self, duration: float, fs: float) -> list[SignalWindow]:
        """Produce one window per electrode, advancing the internal clock."""
        n = round(duration * fs)
        if n < 1 or abs(duration * fs - n) > 1e-6:
            raise ValueError(
                f"duration * fs must be a positive integer, got {duration} * {fs}"
            )
        t = np.arange(n) / fs
        base = np.zeros(n)
        if self.gaze is not None and self.ssvep_amp > 0:
            f = self.flicker_freqs[self.gaze]
            n_tones = self._harmonic_count(fs)
            if self._ssvep_phases.size < n_tones:
                grown = np.zeros(n_tones)
                grown[: self._ssvep_phases.size] = self._ssvep_phases
                self._ssvep_phases = grown
            for k in range(1, n_tones + 1):
                amp = self.ssvep_amp * self.harmonic_decay ** (k - 1)
                omega = 2.0 * math.pi * k * f
                base += amp * np.sin(self._ssvep_phases[k - 1] + omega * t)
                self._ssvep_phases[k - 1] = (
                    self._ssvep_phases[k - 1] + omega * n / fs
                ) % (2.0 * math.pi)
        alpha = self.alpha_amp * np.sin(
            self._alpha_phase + 2.0 * math.pi * ALPHA_HZ * t
        )
        self._alpha_phase = (
            self._alpha_phase + 2.0 * math.pi * ALPHA_HZ * n / fs
        ) % (2.0 * math.pi)
        # drawn unconditionally so the stream position is independent of sigma
        noise = self._rng.standard_normal((3, n)) * self.noise_sigma
        windows = [
            SignalWindow(
                samples=gain * base + alpha + noise[idx],
                fs=fs,
                electrode=name,
                t0=self._t,
            )
            for idx, (name, gain) in enumerate(zip(ELECTRODES, self.electrode_gain))
        ]
        self._t += n / fs
        return windows
