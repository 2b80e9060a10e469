"""Stimulus-panel menu state machine and LCD text logic.

Six 8x2 LCDs sit next to six flickering targets.  The wheelchair menu
latches a "selected" tag under the active direction; the other menus form a
shallow tree in which target 6 always means back/off.  Device actions
outside the wheelchair menu are logged stubs.  States are immutable values;
every transition returns a new state.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from enum import Enum

__all__ = ["Menu", "Mode", "PanelState", "apply_command", "set_mode", "LCD_COLS", "LCD_ROWS"]

logger = logging.getLogger(__name__)

LCD_COLS = 8
LCD_ROWS = 2
N_LCDS = 6


class Menu(str, Enum):
    TURN_ON = "TurnOn"
    MAIN = "Main"
    WHEELCHAIR = "Wheelchair"
    TV = "TV"
    AIR_CONDITIONER = "AirConditioner"
    LIGHT = "Light"


class Mode(str, Enum):
    AUTO = "Auto"
    MANUAL = "Manual"


# First-line labels per menu, one per LCD; every label fits the 8-column
# display ("backward" is exactly 8).
MENU_LABELS: dict[Menu, tuple[str, ...]] = {
    Menu.TURN_ON: ("", "", "", "", "", "turn on"),
    Menu.MAIN: ("wheel", "tv", "aircond", "light", "", "off"),
    Menu.WHEELCHAIR: ("forward", "backward", "left", "right", "", "off"),
    Menu.TV: ("on", "ch up", "ch down", "vol up", "vol down", "off"),
    Menu.AIR_CONDITIONER: ("on", "temp up", "temp dn", "fan up", "fan down", "off"),
    Menu.LIGHT: ("on", "", "", "", "", "off"),
}

# Where each code navigates from each menu.  Target 6 is the master
# switch/back everywhere; the main menu fans out to the four devices.
MENU_NAV: dict[Menu, dict[int, Menu]] = {
    Menu.TURN_ON: {6: Menu.MAIN},
    Menu.MAIN: {
        1: Menu.WHEELCHAIR,
        2: Menu.TV,
        3: Menu.AIR_CONDITIONER,
        4: Menu.LIGHT,
        6: Menu.TURN_ON,
    },
    Menu.WHEELCHAIR: {6: Menu.MAIN},
    Menu.TV: {6: Menu.MAIN},
    Menu.AIR_CONDITIONER: {6: Menu.MAIN},
    Menu.LIGHT: {6: Menu.MAIN},
}

# Menus whose non-navigation codes are device-action stubs.
STUB_MENUS = (Menu.TV, Menu.AIR_CONDITIONER, Menu.LIGHT)


def _blank_lcds(menu: Menu) -> tuple[tuple[str, str], ...]:
    return tuple((label, "") for label in MENU_LABELS[menu])


@dataclass(frozen=True)
class PanelState:
    """Menu, LCD contents, the wheelchair selection latch and the mode."""

    menu: Menu = Menu.WHEELCHAIR
    lcds: tuple[tuple[str, str], ...] = _blank_lcds(Menu.WHEELCHAIR)
    selection: int = 0
    mode: Mode = Mode.AUTO
    last_code: int | None = None
    indicator_on: bool = False
    ignored_count: int = 0

    @classmethod
    def initial(cls, menu: Menu = Menu.WHEELCHAIR) -> "PanelState":
        return cls(menu=menu, lcds=_blank_lcds(menu))

    def _check(self) -> None:
        for row in self.lcds:
            for line in row:
                if len(line) > LCD_COLS:
                    raise AssertionError(f"LCD line {line!r} exceeds {LCD_COLS} columns")


def _with_lcd(lcds, index: int, line0: str | None = None, line1: str | None = None):
    rows = list(lcds)
    old0, old1 = rows[index]
    rows[index] = (old0 if line0 is None else line0, old1 if line1 is None else line1)
    return tuple(rows)


def _wheelchair_select(state: PanelState, code: int) -> PanelState:
    """The selection latch: tag one direction, relabel the other three."""
    if state.selection == code:
        return replace(state, last_code=code)
    labels = MENU_LABELS[Menu.WHEELCHAIR]
    lcds = list(state.lcds)
    for direction in range(1, 5):
        if direction == code:
            # second line only; the first line keeps its direction label
            lcds[direction - 1] = (lcds[direction - 1][0], "selected")
        else:
            # cleared and re-printed, wiping any stale "selected"
            lcds[direction - 1] = (labels[direction - 1], "")
    return replace(state, lcds=tuple(lcds), selection=code, last_code=code)


def _wheelchair_clear(state: PanelState, code: int) -> PanelState:
    if state.selection == 0:
        return replace(state, last_code=code)
    labels = MENU_LABELS[Menu.WHEELCHAIR]
    lcds = _with_lcd(state.lcds, state.selection - 1, labels[state.selection - 1], "")
    return replace(state, lcds=lcds, selection=0, last_code=code)


def _navigate(state: PanelState, code: int, target: Menu) -> PanelState:
    return replace(
        state,
        menu=target,
        lcds=_blank_lcds(target),
        selection=0,
        last_code=code,
        indicator_on=False if code == 6 else state.indicator_on,
    )


def apply_command(state: PanelState, code: int) -> PanelState:
    """Apply one decoded command code to the panel (auto mode only).

    A code identical to the previous one is a no-op, so the 10 Hz command
    stream does not cascade through menus while the subject keeps gazing.
    Codes outside 0..6 are ignored and counted.
    """
    if state.mode is not Mode.AUTO:
        raise ValueError("panel commands apply only in auto mode")
    if not isinstance(code, int) or not 0 <= code <= 6:
        return replace(state, ignored_count=state.ignored_count + 1)
    if code == state.last_code:
        return state

    nav = MENU_NAV[state.menu]
    if code in nav:
        return _navigate(state, code, nav[code])

    if state.menu is Menu.WHEELCHAIR:
        if code == 0:
            return _wheelchair_clear(state, code)
        if 1 <= code <= 4:
            return _wheelchair_select(state, code)
        if code == 5:
            logger.info("panel indicator on")
            return replace(state, indicator_on=True, last_code=code)
        return replace(state, last_code=code)

    if state.menu in STUB_MENUS and 1 <= code <= 5:
        label = MENU_LABELS[state.menu][code - 1] or f"f{code}"
        logger.info("panel stub action: %s %s", state.menu.value, label)
        if code == 5:
            return replace(state, indicator_on=True, last_code=code)
        return replace(state, last_code=code)

    if code == 5:
        logger.info("panel indicator on")
        return replace(state, indicator_on=True, last_code=code)

    # remaining codes are inert in this menu (e.g. directions in TurnOn,
    # where every target but f6 is dark)
    return replace(state, last_code=code)


def set_mode(state: PanelState, mode: Mode) -> PanelState:
    """Switch manual/auto, redrawing all six displays.

    Manual overwrites every first line with "manual"; returning to auto
    restores the current menu's labels with the selection cleared.
    """
    if mode is state.mode:
        return state
    if mode is Mode.MANUAL:
        lcds = tuple(("manual", "") for _ in range(N_LCDS))
    else:
        lcds = _blank_lcds(state.menu)
    return replace(state, mode=mode, lcds=lcds, selection=0, last_code=None)
