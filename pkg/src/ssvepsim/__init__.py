"""Closed-loop SSVEP wheelchair control simulator.

The package wires a synthetic EEG subject through bandpass filtering,
single-sided spectra and harmonic-points classification into 5-byte
wheelchair commands that drive a simulated chair and a stimulus-panel
menu state machine.  ``ssvepsim.runtime`` owns the loop, ``ssvepsim.cli``
the command line, ``ssvepsim.service`` the live telemetry endpoint.
"""

__version__ = "0.1.0"
