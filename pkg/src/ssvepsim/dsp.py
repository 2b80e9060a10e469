"""Bandpass design, zero-phase filtering and single-sided magnitude spectra.

The preprocessing chain mirrors the classic EEG recipe: a Butterworth IIR
bandpass run forward and backward over each window (squaring the magnitude
response and cancelling phase), then a zero-padded FFT normalized to
single-sided amplitude so a bin-aligned tone of amplitude A reads A.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal

from ._util import next_pow2

__all__ = [
    "FilterCoefficients",
    "SignalWindow",
    "SpectrumFrame",
    "design_bandpass",
    "zero_phase_filter",
    "magnitude_spectrum",
]


@dataclass(frozen=True, eq=False)
class FilterCoefficients:
    """Transfer-function coefficients b/a in descending powers of z.

    a[0] is normalized to 1.  A bandpass built from design order n has
    effective order 2n, so len(b) == len(a) == order + 1.
    """

    b: np.ndarray
    a: np.ndarray
    order: int
    f_low: float
    f_high: float
    fs: float


@dataclass(eq=False)
class SignalWindow:
    """A fixed-rate block of samples (microvolts) for one electrode."""

    samples: np.ndarray
    fs: float
    electrode: str = "Oz"
    t0: float = 0.0

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        if self.samples.ndim != 1:
            raise ValueError("window samples must be one-dimensional")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("window samples must be finite")

    @property
    def duration(self) -> float:
        return self.samples.size / self.fs


@dataclass(frozen=True, eq=False)
class SpectrumFrame:
    """Single-sided magnitudes over bin frequencies 0..fs/2."""

    freqs: np.ndarray
    mags: np.ndarray
    nfft: int
    fs: float


def design_bandpass(
    design_order: int, f_low: float, f_high: float, fs: float
) -> FilterCoefficients:
    """Design a Butterworth bandpass of effective order 2 * design_order.

    The analog prototype is pre-warped and mapped through the bilinear
    transform, giving a maximally flat passband with -3 dB at both cutoffs.

    Raises ValueError on cutoff ordering / Nyquist violations or (should a
    degenerate parameter set ever produce one) an unstable pole.
    """
    if design_order < 1:
        raise ValueError(f"design_order must be >= 1, got {design_order}")
    if not (0.0 < f_low < f_high < fs / 2.0):
        raise ValueError(
            f"invalid cutoffs: need 0 < f_low < f_high < fs/2, "
            f"got f_low={f_low}, f_high={f_high}, fs={fs}"
        )
    b, a = signal.butter(design_order, [f_low, f_high], btype="bandpass", fs=fs)
    a = np.asarray(a, float)
    b = np.asarray(b, float) / a[0]
    a = a / a[0]
    poles = np.roots(a)
    if poles.size and np.max(np.abs(poles)) >= 1.0:
        raise ValueError("unstable design: pole magnitude >= 1")
    return FilterCoefficients(
        b=b,
        a=a,
        order=2 * design_order,
        f_low=float(f_low),
        f_high=float(f_high),
        fs=float(fs),
    )


def zero_phase_filter(coeffs: FilterCoefficients, w: SignalWindow) -> SignalWindow:
    """Run the filter forward, then backward over the reversed output.

    The double pass leaves |H|^2 as the effective magnitude response and no
    net phase shift.  Edges are extended with an odd reflection of
    3 * order samples that is stripped after the backward pass, so the
    output has the input's length.
    """
    n_pad = 3 * coeffs.order
    if w.samples.size <= n_pad:
        raise ValueError(
            f"window too short: need more than {n_pad} samples, got {w.samples.size}"
        )
    filtered = signal.filtfilt(
        coeffs.b, coeffs.a, w.samples, padtype="odd", padlen=n_pad
    )
    return SignalWindow(
        samples=filtered, fs=w.fs, electrode=w.electrode, t0=w.t0
    )


def magnitude_spectrum(w: SignalWindow) -> SpectrumFrame:
    """Single-sided amplitude spectrum of the zero-padded window.

    The window is padded to nfft, the next power of two at or above its
    length, and the transform is scaled by 1/nfft before every half-spectrum
    bin -- DC and Nyquist included -- is doubled.  For power-of-two window
    lengths (every supported sampling configuration) a bin-aligned tone of
    amplitude A therefore reads exactly A; windows whose length is not a
    power of two come out biased by len/nfft, and DC always reads twice the
    mean.  Both quirks are kept deliberately: downstream classification only
    compares magnitudes inside one spectrum, and the bandpass removes DC.
    """
    if w.samples.size == 0:
        raise ValueError("cannot transform an empty window")
    nfft = next_pow2(w.samples.size)
    spectrum = np.fft.rfft(w.samples, n=nfft) / nfft
    mags = 2.0 * np.abs(spectrum)
    freqs = np.arange(nfft // 2 + 1) * (w.fs / nfft)
    return SpectrumFrame(freqs=freqs, mags=mags, nfft=nfft, fs=w.fs)
