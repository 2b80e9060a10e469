"""Joystick-voltage model and planar kinematics of the simulated chair.

Commands map to 8-bit DAC codes on the two joystick terminals (channel A
forward/reverse, channel B left/right).  Terminal voltages are code/255 *
v_ref; deviations from the neutral voltages become a linear speed and a yaw
rate through configurable gains, with a deadband absorbing the few tens of
millivolts by which the mid-scale code misses the measured neutral.  There
is no inertia: velocity is a memoryless function of the channel voltages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

__all__ = [
    "STABLE_CODE",
    "COMMAND_CHANNEL_CODES",
    "JoystickChannels",
    "WheelchairState",
    "command_to_channels",
    "channels_to_velocity",
    "step",
]

STABLE_CODE = 128
INCREASE_CODE = 175  # forward
DECREASE_CODE = 80   # reverse
LEFT_CODE = 70
RIGHT_CODE = 185

# command code -> (channel A, channel B)
COMMAND_CHANNEL_CODES: dict[int, tuple[int, int]] = {
    0: (STABLE_CODE, STABLE_CODE),
    1: (INCREASE_CODE, STABLE_CODE),
    2: (DECREASE_CODE, STABLE_CODE),
    3: (STABLE_CODE, LEFT_CODE),
    4: (STABLE_CODE, RIGHT_CODE),
}

DEFAULT_V_REF = 5.0
DEFAULT_NEUTRAL_A = 2.55  # measured stable voltage, forward/reverse terminal
DEFAULT_NEUTRAL_B = 2.56  # measured stable voltage, left/right terminal
DEFAULT_DEADBAND_V = 0.06
DEFAULT_K_V = 1.0  # m/s per volt
DEFAULT_K_W = 0.8  # rad/s per volt


@dataclass(frozen=True)
class JoystickChannels:
    """DAC codes on the two joystick terminals and their derived voltages."""

    code_a: int
    code_b: int
    v_ref: float = DEFAULT_V_REF
    neutral_a: float = DEFAULT_NEUTRAL_A
    neutral_b: float = DEFAULT_NEUTRAL_B

    def __post_init__(self):
        for code in (self.code_a, self.code_b):
            if not 0 <= code <= 255:
                raise ValueError(f"channel code must be 0..255, got {code}")

    @property
    def v_a(self) -> float:
        return self.code_a / 255.0 * self.v_ref

    @property
    def v_b(self) -> float:
        return self.code_b / 255.0 * self.v_ref


@dataclass(frozen=True)
class WheelchairState:
    """Pose and current velocities of the chair, plus its motion gains."""

    x: float = 0.0
    y: float = 0.0
    heading: float = 0.0
    v: float = 0.0
    omega: float = 0.0
    k_v: float = DEFAULT_K_V
    k_w: float = DEFAULT_K_W


def command_to_channels(code: int, **channel_kwargs) -> JoystickChannels:
    """Channel codes for a motion command (0 stop .. 4 rotate cw)."""
    if code not in COMMAND_CHANNEL_CODES:
        raise ValueError(f"no channel mapping for command code {code}")
    code_a, code_b = COMMAND_CHANNEL_CODES[code]
    return JoystickChannels(code_a=code_a, code_b=code_b, **channel_kwargs)


def _dead(value: float, band: float) -> float:
    return 0.0 if abs(value) <= band else value


def channels_to_velocity(
    ch: JoystickChannels,
    k_v: float = DEFAULT_K_V,
    k_w: float = DEFAULT_K_W,
    deadband: float = DEFAULT_DEADBAND_V,
    left_positive: bool = True,
) -> tuple[float, float]:
    """Map terminal voltages to (linear speed, yaw rate).

    Positive omega means a leftward turn under the default convention: the
    left code (70) pulls channel B below neutral, so the yaw term is
    neutral_b - v_b.  left_positive=False flips the sign for chairs wired
    the other way round.  Voltages within +/- deadband of neutral produce
    exactly zero, which keeps the mid-scale stable code stationary despite
    the neutral-voltage mismatch.
    """
    if k_v <= 0 or k_w <= 0:
        raise ValueError("gains must be positive")
    v = k_v * _dead(ch.v_a - ch.neutral_a, deadband)
    omega = k_w * _dead(ch.neutral_b - ch.v_b, deadband)
    if not left_positive:
        omega = -omega
    return v, omega


def step(state: WheelchairState, v: float, omega: float, dt: float) -> WheelchairState:
    """Unicycle integration over dt; the heading updates first."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    heading = state.heading + omega * dt
    return replace(
        state,
        x=state.x + v * math.cos(heading) * dt,
        y=state.y + v * math.sin(heading) * dt,
        heading=heading,
        v=v,
        omega=omega,
    )
