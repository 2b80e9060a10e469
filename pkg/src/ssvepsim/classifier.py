"""Harmonic-points classification of SSVEP spectra.

Each candidate stimulus frequency partitions the spectrum into intervals
centered on its harmonics.  A frequency scores one point for every interval,
on every occipital electrode, whose peak lands exactly on one of its
harmonics; the score is normalized by 3 * floor(cap / f), the number of
theoretically observable harmonics below the matching cap across three
electrodes.  The best-scoring frequency wins if it clears its threshold,
otherwise the decision is Stop.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dsp import SpectrumFrame
from ._util import next_pow2

__all__ = [
    "N_TARGETS",
    "N_INTERVALS",
    "DEFAULT_FREQ_CAP_HZ",
    "HarmonicSearchPlan",
    "PeakMatrix",
    "PointsVector",
    "ThresholdVector",
    "CommandDecision",
    "build_plan",
    "peak_frequencies",
    "harmonic_points",
    "decide",
]

N_TARGETS = 6
N_BORDERS = 10
N_INTERVALS = N_BORDERS - 1
DEFAULT_FREQ_CAP_HZ = 50.0

# Scoring modes: "strict" counts only harmonics at or below the cap, keeping
# scores in [0, 1]; "paper" also counts a super-cap harmonic admitted by the
# cap-boundary interval (lower border exactly at the cap), which can push a
# score above 1 for frequencies like 20 Hz.
MODES = ("strict", "paper")


@dataclass(frozen=True, eq=False)
class HarmonicSearchPlan:
    """Precomputed interval borders, harmonic targets and spectrum bins.

    Row i belongs to flicker_freqs[i].  Column j (0-based) holds the border
    f*(j + 0.5), the harmonic f*(j + 1), and the 0-based spectrum bin of the
    border.  harmonic_bins carries the harmonics in bin units so matching
    can be done on integers rather than floating-point frequencies.
    """

    flicker_freqs: tuple[float, ...]
    search_space: np.ndarray     # (6, 10) border frequencies, Hz
    harmonics: np.ndarray        # (6, 10) harmonic targets, Hz
    search_points: np.ndarray    # (6, 10) 0-based spectrum bin indices
    harmonic_bins: np.ndarray    # (6, 10) harmonic targets, 0-based bins
    window_s: float
    fs: float
    nfft: int
    freq_cap: float = DEFAULT_FREQ_CAP_HZ


@dataclass(frozen=True, eq=False)
class PeakMatrix:
    """Per-interval argmax frequencies (Hz) for one electrode.

    Entry (i, j) is 0.0 when interval j of frequency row i was skipped
    because its lower border exceeds the cap.
    """

    peak_freqs: np.ndarray  # (6, 9)


@dataclass(frozen=True, eq=False)
class PointsVector:
    """Six normalized harmonic scores, one per stimulus frequency."""

    points: np.ndarray  # (6,)


@dataclass(frozen=True)
class ThresholdVector:
    """Per-frequency decision levels in (0, 1]; 1.0 disables a command."""

    thresholds: tuple[float, ...]

    def __post_init__(self):
        if len(self.thresholds) != N_TARGETS:
            raise ValueError(f"need {N_TARGETS} thresholds, got {len(self.thresholds)}")
        for t in self.thresholds:
            if not (0.0 < t <= 1.0):
                raise ValueError(f"threshold {t} outside (0, 1]")


@dataclass(frozen=True, eq=False)
class CommandDecision:
    """Outcome of one classification hop.

    winner is None exactly when no score clears its threshold, in which case
    command_code is 0 (Stop).
    """

    winner: int | None
    points: PointsVector
    command_code: int


DEFAULT_CODE_MAP = (1, 2, 3, 4, 5, 6)


def build_plan(
    flicker_freqs,
    window_s: float = 2.0,
    fs: float = 256.0,
    freq_cap: float = DEFAULT_FREQ_CAP_HZ,
) -> HarmonicSearchPlan:
    """Precompute the search space for six stimulus frequencies.

    Frequencies must be distinct, within [5, fs/2], and bin-aligned for the
    window (f * window_s integral).  Window durations of 1, 2 and 4 seconds
    are supported; at fs 256 these give power-of-two window lengths, so the
    border-to-bin formula round(border * window_s) indexes the zero-padded
    spectrum exactly.
    """
    freqs = tuple(float(f) for f in flicker_freqs)
    if len(freqs) != N_TARGETS:
        raise ValueError(f"need {N_TARGETS} frequencies, got {len(freqs)}")
    if len(set(freqs)) != N_TARGETS:
        raise ValueError(f"duplicate frequency in {freqs}")
    if window_s not in (1.0, 2.0, 4.0):
        raise ValueError(f"window_s must be 1, 2 or 4 seconds, got {window_s}")
    for f in freqs:
        if not (5.0 <= f <= fs / 2.0):
            raise ValueError(f"frequency {f} outside [5, fs/2]")
        if abs(f * window_s - round(f * window_s)) > 1e-9:
            raise ValueError(f"frequency {f} not bin-aligned for window {window_s}s")

    j1 = np.arange(1, N_BORDERS + 1, dtype=float)  # 1-based column index
    freq_col = np.asarray(freqs)[:, None]
    search_space = freq_col * (j1 - 0.5)
    harmonics = freq_col * j1
    # round half away from zero; all values are non-negative here
    search_points = np.floor(search_space * window_s + 0.5).astype(int)
    harmonic_bins = np.floor(harmonics * window_s + 0.5).astype(int)
    nfft = next_pow2(int(round(fs * window_s)))
    return HarmonicSearchPlan(
        flicker_freqs=freqs,
        search_space=search_space,
        harmonics=harmonics,
        search_points=search_points,
        harmonic_bins=harmonic_bins,
        window_s=float(window_s),
        fs=float(fs),
        nfft=nfft,
        freq_cap=float(freq_cap),
    )


def peak_frequencies(spectrum: SpectrumFrame, plan: HarmonicSearchPlan) -> PeakMatrix:
    """Locate the strongest bin inside every admissible search interval.

    An interval is admissible while its lower border does not exceed the
    cap.  The argmax runs over the border bins inclusive; ties go to the
    lowest bin.  Skipped intervals store 0.0.
    """
    if spectrum.nfft != plan.nfft or spectrum.fs != plan.fs:
        raise ValueError(
            f"spectrum (nfft={spectrum.nfft}, fs={spectrum.fs}) does not match "
            f"plan (nfft={plan.nfft}, fs={plan.fs})"
        )
    peak_freqs = np.zeros((N_TARGETS, N_INTERVALS))
    bin_hz = plan.fs / plan.nfft
    for i in range(N_TARGETS):
        for j in range(N_INTERVALS):
            if plan.search_space[i, j] > plan.freq_cap:
                continue
            lo = plan.search_points[i, j]
            hi = plan.search_points[i, j + 1]
            offset = int(np.argmax(spectrum.mags[lo : hi + 1]))
            peak_freqs[i, j] = (lo + offset) * bin_hz
    return PeakMatrix(peak_freqs=peak_freqs)


def harmonic_points(
    peaks_o1: PeakMatrix,
    peaks_oz: PeakMatrix,
    peaks_o2: PeakMatrix,
    plan: HarmonicSearchPlan,
    mode: str = "strict",
) -> PointsVector:
    """Count harmonic hits across three electrodes and normalize.

    A peak hits when its spectrum bin coincides with a harmonic bin of the
    row.  In strict mode only harmonics at or below the cap count; in paper
    mode every tabulated harmonic counts, reproducing the original loop in
    which the cap was tested against interval borders only.  The normalizer
    is 3 * floor(cap / f) either way, so paper-mode scores may exceed 1.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    counts = np.zeros(N_TARGETS)
    for peaks in (peaks_o1, peaks_oz, peaks_o2):
        # exact inverse of the bin -> Hz conversion; 0.0 markers map to bin 0,
        # which is never a harmonic bin
        bins = np.floor(peaks.peak_freqs * plan.nfft / plan.fs + 0.5).astype(int)
        for i in range(N_TARGETS):
            targets = plan.harmonic_bins[i]
            if mode == "strict":
                targets = targets[plan.harmonics[i] <= plan.freq_cap]
            counts[i] += np.isin(bins[i], targets).sum()
    per_freq = np.array(
        [np.floor(plan.freq_cap / f) for f in plan.flicker_freqs]
    )
    return PointsVector(points=counts / (3.0 * per_freq))


def decide(
    points: PointsVector,
    thresholds: ThresholdVector,
    freq_to_code=DEFAULT_CODE_MAP,
) -> CommandDecision:
    """Pick the best-scoring frequency; emit its code only above threshold.

    The comparison is strict, so a disabled command (threshold 1.0) can
    never fire in strict mode.  Ties break to the lowest index.
    """
    codes = tuple(int(c) for c in freq_to_code)
    if len(codes) != N_TARGETS or any(c not in range(1, 7) for c in codes):
        raise ValueError(f"freq_to_code must map all six indices to codes 1..6, got {codes}")
    winner = int(np.argmax(points.points))
    if points.points[winner] > thresholds.thresholds[winner]:
        return CommandDecision(
            winner=winner, points=points, command_code=codes[winner]
        )
    return CommandDecision(winner=None, points=points, command_code=0)
