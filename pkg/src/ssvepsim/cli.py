"""Command line: closed-loop runs, calibration, stimulus emulation, schemas."""

from __future__ import annotations

import sys

import click

from . import calibration as cal
from . import stimulus
from .runtime import (
    DEFAULT_FLICKER_FREQS,
    DEFAULT_THRESHOLDS,
    LoopConfig,
    ScenarioScript,
    run_loop,
    run_scenario,
)
from .synth import SUBJECT_PRESETS, SubjectModel


@click.group()
def main():
    """SSVEP wheelchair control loop simulator."""


def _parse_bind(value: str) -> tuple[str, int]:
    host, _, port = value.rpartition(":")
    if not host or not port.isdigit():
        raise click.BadParameter(f"expected host:port, got {value!r}")
    return host, int(port)


def _build_subject(profile, preset, freqs, seed):
    if profile:
        return SubjectModel.from_profile(profile, seed=seed, flicker_freqs=freqs)
    return SubjectModel.preset(preset, seed=seed, flicker_freqs=freqs)


def _run_paced(config, subject, until):
    """Batch run held to wall clock, one hop per hop_s."""
    import time

    from .runtime import LoopResult, SimLoop

    loop = SimLoop(config, subject)
    frames = []
    start = time.monotonic()
    for _ in range(round(until / config.hop_s)):
        frames.append(loop.step())
        remaining = start + loop.hop_index * config.hop_s - time.monotonic()
        if remaining > 0:
            time.sleep(remaining)
    return LoopResult(frames=frames, config=config)


@main.command()
@click.option("--window", type=click.Choice(["1", "2", "4"]), default="2",
              help="FFT window duration in seconds.")
@click.option("--freqs", nargs=6, type=float, default=DEFAULT_FLICKER_FREQS,
              show_default=True, help="Six stimulus frequencies (Hz).")
@click.option("--thresholds", nargs=6, type=float, default=DEFAULT_THRESHOLDS,
              show_default=True, help="Six decision thresholds in (0, 1].")
@click.option("--thresholds-file", type=click.Path(exists=True, dir_okay=False),
              help="JSON thresholds file from `calibrate` (overrides --thresholds).")
@click.option("--subject", "profile", type=click.Path(exists=True, dir_okay=False),
              help="Subject profile JSON.")
@click.option("--preset", type=click.Choice(sorted(SUBJECT_PRESETS)), default="good",
              show_default=True, help="Subject preset when no profile is given.")
@click.option("--gaze", type=int, default=None,
              help="Fixed gaze target 0..5 for plain runs (default: rest).")
@click.option("--scenario", type=click.Path(exists=True, dir_okay=False),
              help="Scenario script JSON: [{gaze, hold_s}, ...].")
@click.option("--serve", "bind", default=None,
              help="Serve live telemetry on host:port instead of a batch run.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--until", type=float, default=10.0, show_default=True,
              help="Batch run duration in simulated seconds.")
@click.option("--log", "log_path", type=click.Path(dir_okay=False),
              help="Write the event log CSV here.")
@click.option("--frames-out", type=click.Path(dir_okay=False),
              help="Write one telemetry frame per hop as JSON lines.")
@click.option("--compat", type=click.Choice(["strict", "paper"]), default="strict",
              show_default=True, help="Harmonic matching mode.")
@click.option("--realtime/--no-realtime", default=None,
              help="Pace the loop to wall clock (default: only when serving).")
def run(window, freqs, thresholds, thresholds_file, profile, preset, gaze,
        scenario, bind, seed, until, log_path, frames_out, compat, realtime):
    """Run the closed loop: batch, scenario, or live service."""
    freqs = tuple(freqs)
    if thresholds_file:
        thresholds = cal.load_thresholds_file(thresholds_file, freqs)
    config = LoopConfig(
        window_s=float(window),
        flicker_freqs=freqs,
        thresholds=tuple(thresholds),
        seed=seed,
        compat_mode=compat,
    )
    config.validate()
    subject = _build_subject(profile, preset, freqs, seed)

    if bind:
        from .service import TelemetryService

        host, port = _parse_bind(bind)
        pacing = True if realtime is None else realtime
        click.echo(f"serving telemetry on ws://{host}:{port}/ws (realtime={pacing})")
        TelemetryService(config, subject, realtime=pacing).serve(host, port)
        return

    if scenario:
        script = ScenarioScript.from_json(scenario)
        report = run_scenario(config, subject, script)
        click.echo(report.summary())
        result = report.log
    else:
        if gaze is not None:
            subject.set_gaze(gaze)
        if realtime:
            result = _run_paced(config, subject, until)
        else:
            result = run_loop(config, subject, until=until)
        last = result.frames[-1] if result.frames else None
        if last:
            click.echo(
                f"ran {len(result.frames)} hops, final command "
                f"{last['command_code']}, chair at "
                f"({last['chair']['x']:.2f}, {last['chair']['y']:.2f})"
            )
    if log_path:
        result.write_event_csv(log_path)
        click.echo(f"event log written to {log_path}")
    if frames_out:
        result.write_frames_jsonl(frames_out)
        click.echo(f"telemetry frames written to {frames_out}")


@main.command()
@click.option("--recording", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Calibration recording CSV (t,O1,Oz,O2 with '# fs=' header).")
@click.option("--target", required=True, type=float, help="Focused frequency (Hz).")
@click.option("--out", "out_path", type=click.Path(dir_okay=False),
              help="Thresholds JSON to write/update (others default to 0.25).")
@click.option("--freqs", nargs=6, type=float, default=DEFAULT_FLICKER_FREQS,
              show_default=True)
@click.option("--rest", type=float, default=cal.DEFAULT_REST_S, show_default=True)
@click.option("--focus", type=float, default=cal.DEFAULT_FOCUS_S, show_default=True)
def calibrate(recording, target, out_path, freqs, rest, focus):
    """Compute a decision threshold from a recorded focus session."""
    freqs = tuple(freqs)
    samples, fs = cal.load_recording_csv(recording)
    session = cal.CalibrationSession(
        recording=samples, fs=fs, target_freq=target, rest_s=rest, focus_s=focus
    )
    level = cal.calibrate_threshold(session, freqs)
    if level is cal.UNCALIBRATABLE:
        click.echo(f"target {target:g} Hz: uncalibratable (no harmonic activity)")
        sys.exit(1)
    click.echo(f"target {target:g} Hz: threshold {level:.4f}")
    if out_path:
        from pathlib import Path

        if Path(out_path).exists():
            levels = list(cal.load_thresholds_file(out_path, freqs))
        else:
            levels = [cal.INITIAL_THRESHOLD] * 6
        levels[freqs.index(target)] = level
        cal.write_thresholds_file(out_path, freqs, levels)
        click.echo(f"thresholds written to {out_path}")


@main.command("emu-stimulus")
@click.option("--freqs", nargs=6, type=float, default=DEFAULT_FLICKER_FREQS,
              show_default=True, help="Six flicker frequencies (Hz).")
@click.option("--f-interrupt", type=float, default=stimulus.DEFAULT_INTERRUPT_HZ,
              show_default=True, help="Interrupt tick rate (Hz).")
@click.option("--ticks", type=int, default=25000, show_default=True)
@click.option("--trace", "trace_path", type=click.Path(dir_okay=False),
              help="Write tick,level0..level5 CSV here.")
@click.option("--words", "words_path", type=click.Path(dir_okay=False),
              help="Dump the first tick's daisy-chain words as hex lines.")
def emu_stimulus(freqs, f_interrupt, ticks, trace_path, words_path):
    """Emulate the flicker generator and report realized frequencies."""
    sched = stimulus.make_scheduler(freqs, f_interrupt=f_interrupt)
    for f, max_c in zip(sched.freqs, sched.max_counter):
        click.echo(
            f"requested {f:g} Hz -> counter {max_c} -> "
            f"realized {f_interrupt / max_c:.4f} Hz"
        )
    if words_path:
        levels = stimulus.make_scheduler(freqs, f_interrupt=f_interrupt).tick()
        with open(words_path, "w") as fh:
            for seq in stimulus.tick_words(levels):
                fh.write("\n".join(seq.hex_lines()) + "\n")
        click.echo(f"word dump written to {words_path}")
    if trace_path:
        stimulus.write_trace(sched, ticks, trace_path)
        click.echo(f"trace written to {trace_path}")


@main.command()
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False),
              help="Directory for the JSON Schema fixture files.")
def schema(out_dir):
    """Export control-message and telemetry-frame JSON Schemas."""
    from .service import export_schemas

    for path in export_schemas(out_dir):
        click.echo(f"wrote {path}")


if __name__ == "__main__":
    main()
