"""Logic-level emulation of the stimulus panel's signal generation.

Covers the 2500 Hz interrupt scheduler that toggles six flicker channels,
the 16-bit DAC daisy-chain command words, the timer top-value arithmetic,
and the current-source power formulas used to qualify the LED driver.
Electrical timing (SCLK edges, sync pulse widths) is out of scope; the sync
line appears only as bracketing metadata on a word sequence.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

from ._util import round_half_away

__all__ = [
    "DEFAULT_INTERRUPT_HZ",
    "LEVEL_HIGH",
    "LEVEL_LOW",
    "TickScheduler",
    "DacWord",
    "DaisySequence",
    "make_scheduler",
    "dac_word",
    "daisy_sequence",
    "tick_words",
    "interrupt_top",
    "opamp_power",
    "regulator_vout",
    "write_trace",
]

DEFAULT_INTERRUPT_HZ = 2500.0  # one tick per 0.4 ms
LEVEL_HIGH = 15  # DAC register value while the LED is lit
LEVEL_LOW = 0
N_CHANNELS = 6

# Daisy-chain SCLK ceiling from the converter datasheet; recorded for
# reference, not simulated.
SCLK_MAX_HZ = 30_000_000

# Top nibble of each 16-bit command word.  "A" writes channel A and updates
# all outputs at once (the per-tick refresh); B..H write a single register;
# "WTM" switches the converter to write-through mode and ignores the value.
DAC_COMMAND_BASE = {
    "A": 0xB000,
    "B": 0x1000,
    "C": 0x2000,
    "D": 0x3000,
    "E": 0x4000,
    "F": 0x5000,
    "G": 0x6000,
    "H": 0x7000,
}
WTM_SELECT_WORD = 0x9000


@dataclass(frozen=True)
class DacWord:
    """One 16-bit daisy-chain command word."""

    word: int
    kind: str

    def __post_init__(self):
        if not 0 <= self.word <= 0xFFFF:
            raise ValueError(f"word {self.word:#x} does not fit 16 bits")


@dataclass(frozen=True)
class DaisySequence:
    """Words shifted through the 3-converter chain, farthest device first.

    The physical transfer is bracketed by pulling sync low before the first
    word and releasing it high after the last; here that bracket is metadata
    on the sequence, not a timed signal.
    """

    words: tuple[DacWord, ...]
    sync_open: str = "low"
    sync_close: str = "high"

    def hex_lines(self) -> list[str]:
        lines = [f"SYNC {self.sync_open}"]
        lines += [f"{w.word:04X}" for w in self.words]
        lines.append(f"SYNC {self.sync_close}")
        return lines


@dataclass
class TickScheduler:
    """Counter state of the interrupt-driven square-wave generator.

    Each channel divides the tick rate by max_counter[i] ticks per period
    and holds the level high for the first half_counter[i] of them, exactly
    as the firmware does -- including the frequency quantization that makes
    a requested 8 Hz come out as 2500/313 ~ 7.987 Hz.
    """

    freqs: tuple[float, ...]
    f_interrupt: float
    max_counter: list[int]
    half_counter: list[int]
    counters: list[int] = field(default_factory=lambda: [0] * N_CHANNELS)
    levels: list[int] = field(default_factory=lambda: [LEVEL_LOW] * N_CHANNELS)

    def tick(self) -> tuple[int, ...]:
        """Advance one interrupt period; return the six output levels."""
        for i in range(N_CHANNELS):
            self.counters[i] += 1
            remainder = self.counters[i] % self.max_counter[i]
            if remainder == 0:
                self.counters[i] = 0
            self.levels[i] = LEVEL_HIGH if remainder < self.half_counter[i] else LEVEL_LOW
        return tuple(self.levels)


def make_scheduler(freqs, f_interrupt: float = DEFAULT_INTERRUPT_HZ) -> TickScheduler:
    """Build a scheduler with firmware-style rounded counters."""
    freqs = tuple(float(f) for f in freqs)
    if len(freqs) != N_CHANNELS:
        raise ValueError(f"need {N_CHANNELS} frequencies, got {len(freqs)}")
    for f in freqs:
        if not 0.0 < f < f_interrupt / 2.0:
            raise ValueError(
                f"frequency {f} outside (0, f_interrupt/2) at f_interrupt={f_interrupt}"
            )
    max_counter = [round_half_away(f_interrupt / f) for f in freqs]
    half_counter = [round_half_away(f_interrupt / f / 2.0) for f in freqs]
    return TickScheduler(
        freqs=freqs,
        f_interrupt=float(f_interrupt),
        max_counter=max_counter,
        half_counter=half_counter,
    )


def dac_word(kind: str, value: int = 0) -> DacWord:
    """Encode a command word: base(kind) | value << 4.

    Register data occupies bits 11..4; bits 3..0 stay zero.  The WTM select
    word is the literal 0x9000 regardless of value.
    """
    if kind == "WTM":
        return DacWord(word=WTM_SELECT_WORD, kind=kind)
    if kind not in DAC_COMMAND_BASE:
        raise ValueError(f"unknown word kind {kind!r}")
    if not 0 <= value <= 255:
        raise ValueError(f"register value must be 0..255, got {value}")
    return DacWord(word=DAC_COMMAND_BASE[kind] | (value << 4), kind=kind)


def daisy_sequence(values, kind: str = "A") -> DaisySequence:
    """Order one register write for the chain of three converters.

    values are (DAC1, DAC2, DAC3); the word for DAC3 must be shifted in
    first so that after 3 x 16 clock edges each word sits in its device.
    """
    values = tuple(values)
    if len(values) != 3:
        raise ValueError(f"need 3 register values, got {len(values)}")
    words = tuple(dac_word(kind, v) for v in reversed(values))
    return DaisySequence(words=words)


def tick_words(levels) -> list[DaisySequence]:
    """The per-tick transfer set refreshing all six LED channels.

    Channels 0..2 live on registers A..C of the three chained converters,
    channels 3..5 on E..G; the channel-A write doubles as the simultaneous
    output update.
    """
    levels = tuple(levels)
    if len(levels) != N_CHANNELS:
        raise ValueError(f"need {N_CHANNELS} levels, got {len(levels)}")
    low, high = levels[:3], levels[3:]
    return [
        daisy_sequence(low, kind="A"),
        daisy_sequence(low, kind="B"),
        daisy_sequence(low, kind="C"),
        daisy_sequence(high, kind="E"),
        daisy_sequence(high, kind="F"),
        daisy_sequence(high, kind="G"),
    ]


def interrupt_top(period: float, clock: float) -> int:
    """Timer top value n such that (n + 1) / clock == period."""
    ticks = period * clock
    if ticks < 1.0:
        raise ValueError(f"period {period}s is under one clock cycle at {clock} Hz")
    return round_half_away(ticks) - 1


def opamp_power(
    vcc: float, vf: float, r: float, vin: float, legacy_rounding: bool = False
) -> tuple[float, float]:
    """Power dissipated in the current-source op amp, and the worst-case vin.

    P = (vcc - (vin + vf)) * vin / r, maximized at vin = (vcc - vf) / 2.
    legacy_rounding reproduces the original sizing arithmetic, which rounded vin to
    the nearest volt inside the current term only.

    Traceability note: the original driver qualification went on to estimate
    a junction temperature as 0.53 W * 137 degC/W + 23 = 95.61 degC, folding
    the junction-to-case coefficient (degC/W) in as if it were an ambient
    temperature; the figure is recorded here verbatim and nothing computes
    with it.
    """
    if r <= 0:
        raise ValueError(f"resistance must be positive, got {r}")
    if not 0.0 <= vin <= vcc - vf:
        raise ValueError(f"vin {vin} outside [0, vcc - vf] = [0, {vcc - vf}]")
    current = (round_half_away(vin) if legacy_rounding else vin) / r
    power = (vcc - (vin + vf)) * current
    vin_at_max = (vcc - vf) / 2.0
    return power, vin_at_max


def regulator_vout(r2: float = 360.0, r1: float = 120.0, v_ref: float = 1.25) -> float:
    """Adjustable-regulator output v_ref * (1 + r2/r1); 5 V for 360/120."""
    return v_ref * (1.0 + r2 / r1)


def write_trace(sched: TickScheduler, n_ticks: int, path) -> None:
    """Dump tick,level0..level5 rows for waveform inspection."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tick"] + [f"level{i}" for i in range(N_CHANNELS)])
        for t in range(n_ticks):
            writer.writerow([t, *sched.tick()])
