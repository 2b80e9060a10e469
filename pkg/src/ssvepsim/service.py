"""Live telemetry endpoint and its JSON message schemas.

One loop thread steps the simulation (optionally paced to wall clock) and
fans telemetry frames out to any number of WebSocket viewers; viewers send
control messages (gaze, threshold, window, mode, manual direction) that are
queued and applied in arrival order at the next hop boundary.  The pydantic
models below are the schema authority for both directions; export_schemas()
writes them as JSON Schema fixtures for out-of-tree consumers.
"""

from __future__ import annotations

import json
import logging
import queue
import threading
import time
from pathlib import Path
from typing import Annotated, Literal, Optional, Union

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError

from .runtime import LoopConfig, SimLoop
from .synth import SubjectModel

__all__ = [
    "GazeControl",
    "ThresholdControl",
    "WindowControl",
    "ModeControl",
    "ManualControl",
    "ControlMessage",
    "CONTROL_ADAPTER",
    "TelemetryFrame",
    "LoopRunner",
    "TelemetryService",
    "create_app",
    "export_schemas",
]

logger = logging.getLogger(__name__)

Index = Annotated[int, Field(ge=0, le=5)]


class _StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GazeControl(_StrictModel):
    type: Literal["gaze"]
    target: Optional[Index]


class ThresholdControl(_StrictModel):
    type: Literal["threshold"]
    index: Index
    value: Annotated[float, Field(gt=0.0, le=1.0)]


class WindowControl(_StrictModel):
    type: Literal["window"]
    seconds: Literal[1, 2, 4]


class ModeControl(_StrictModel):
    type: Literal["mode"]
    value: Literal["manual", "auto"]


class ManualControl(_StrictModel):
    type: Literal["manual"]
    direction: Literal["forward", "backward", "left", "right", "none"]


ControlMessage = Annotated[
    Union[GazeControl, ThresholdControl, WindowControl, ModeControl, ManualControl],
    Field(discriminator="type"),
]
CONTROL_ADAPTER: TypeAdapter = TypeAdapter(ControlMessage)


class SpectrumMags(_StrictModel):
    O1: list[float]
    Oz: list[float]
    O2: list[float]


class SpectrumPayload(_StrictModel):
    freqs: list[float]
    mags: SpectrumMags


class PanelPayload(_StrictModel):
    menu: str
    mode: str
    lcds: Annotated[list[Annotated[list[str], Field(min_length=2, max_length=2)]],
                    Field(min_length=6, max_length=6)]


class ChairPayload(_StrictModel):
    x: float
    y: float
    heading: float
    v: float
    omega: float
    code_a: Annotated[int, Field(ge=0, le=255)]
    code_b: Annotated[int, Field(ge=0, le=255)]


class TelemetryFrame(_StrictModel):
    """One frame per hop; the wire format every viewer consumes."""

    t: float
    window_s: float
    gaze: Optional[Index]
    points: Annotated[list[float], Field(min_length=6, max_length=6)]
    thresholds: Annotated[list[float], Field(min_length=6, max_length=6)]
    winner: Optional[Index]
    command_code: Annotated[int, Field(ge=0, le=6)]
    spectrum: SpectrumPayload
    panel: PanelPayload
    chair: ChairPayload


class LoopRunner(threading.Thread):
    """Steps the loop, applies queued controls, fans frames out to viewers."""

    def __init__(self, config: LoopConfig, subject: SubjectModel, realtime: bool = True):
        super().__init__(daemon=True, name="ssvepsim-loop")
        self.loop = SimLoop(config, subject)
        self.realtime = realtime
        self.controls: queue.Queue = queue.Queue()
        self.overruns = 0
        self._subscribers: list[queue.Queue] = []
        self._lock = threading.Lock()
        self._halt = threading.Event()

    # -- viewer side --------------------------------------------------------

    def subscribe(self, maxsize: int = 64) -> queue.Queue:
        q: queue.Queue = queue.Queue(maxsize=maxsize)
        with self._lock:
            self._subscribers.append(q)
        return q

    def unsubscribe(self, q: queue.Queue) -> None:
        with self._lock:
            if q in self._subscribers:
                self._subscribers.remove(q)

    def submit(self, message) -> None:
        """Queue a validated control message for the next hop."""
        self.controls.put(message)

    def hello(self) -> dict:
        cfg = self.loop.config
        return {
            "type": "hello",
            "config": {
                "fs": cfg.fs,
                "window_s": cfg.window_s,
                "hop_s": cfg.hop_s,
                "band": list(cfg.band),
                "flicker_freqs": [float(f) for f in cfg.flicker_freqs],
                "thresholds": [float(t) for t in cfg.thresholds],
                "compat_mode": cfg.compat_mode,
                "seed": cfg.seed,
                "mode": self.loop.mode,
                "gaze": self.loop.subject.gaze,
            },
        }

    # -- loop side ----------------------------------------------------------

    def _apply(self, message) -> None:
        loop = self.loop
        if isinstance(message, GazeControl):
            loop.set_gaze(message.target)
        elif isinstance(message, ThresholdControl):
            loop.set_threshold(message.index, message.value)
        elif isinstance(message, WindowControl):
            loop.set_window_s(float(message.seconds))
        elif isinstance(message, ModeControl):
            loop.set_mode(message.value)
        elif isinstance(message, ManualControl):
            loop.set_manual_direction(message.direction)
        else:  # pragma: no cover - adapter only produces the types above
            raise TypeError(f"unsupported control message {message!r}")

    def _broadcast(self, frame: dict) -> None:
        with self._lock:
            targets = list(self._subscribers)
        for q in targets:
            try:
                q.put_nowait(frame)
            except queue.Full:
                # slow viewer: drop its oldest frame, never stall the loop
                try:
                    q.get_nowait()
                except queue.Empty:
                    pass
                try:
                    q.put_nowait(frame)
                except queue.Full:
                    pass

    def run(self) -> None:
        hop = self.loop.config.hop_s
        start = time.monotonic()
        while not self._halt.is_set():
            while True:
                try:
                    self._apply(self.controls.get_nowait())
                except queue.Empty:
                    break
            frame = self.loop.step()
            self._broadcast(frame)
            if self.realtime:
                deadline = start + self.loop.hop_index * hop
                delay = deadline - time.monotonic()
                if delay > 0:
                    self._halt.wait(delay)
                else:
                    # classification + emission must fit one hop; count misses
                    self.overruns += 1

    def stop(self) -> None:
        self._halt.set()


def create_app(runner: LoopRunner) -> FastAPI:
    app = FastAPI(title="ssvepsim telemetry")

    @app.websocket("/ws")
    async def telemetry(ws: WebSocket):  # pragma: no branch
        import asyncio

        await ws.accept()
        await ws.send_json(runner.hello())
        frames = runner.subscribe()

        async def pump_frames():
            # polled handoff: never parks a worker thread on the queue, so
            # session teardown cannot strand an executor thread
            while True:
                try:
                    frame = frames.get_nowait()
                except queue.Empty:
                    await asyncio.sleep(0.02)
                    continue
                await ws.send_json(frame)

        async def pump_controls():
            while True:
                raw = await ws.receive_text()
                try:
                    message = CONTROL_ADAPTER.validate_json(raw)
                except ValidationError as exc:
                    await ws.send_json(
                        {"type": "error", "detail": json.loads(exc.json())}
                    )
                    continue
                runner.submit(message)

        sender = asyncio.create_task(pump_frames())
        try:
            await pump_controls()
        except WebSocketDisconnect:
            pass
        finally:
            sender.cancel()
            runner.unsubscribe(frames)

    return app


class TelemetryService:
    """Owns the loop thread and the ASGI app bound to it."""

    def __init__(
        self,
        config: LoopConfig | None = None,
        subject: SubjectModel | None = None,
        realtime: bool = True,
    ):
        self.runner = LoopRunner(
            config or LoopConfig(),
            subject if subject is not None else SubjectModel.preset("good"),
            realtime=realtime,
        )
        self.app = create_app(self.runner)

    def start(self) -> "TelemetryService":
        self.runner.start()
        return self

    def stop(self) -> None:
        self.runner.stop()
        self.runner.join(timeout=5.0)

    def serve(self, host: str, port: int) -> None:
        """Run uvicorn in the calling thread until interrupted."""
        import uvicorn

        self.start()
        try:
            uvicorn.run(self.app, host=host, port=port, log_level="info")
        finally:
            self.stop()


def export_schemas(out_dir) -> list[Path]:
    """Write the control/telemetry JSON Schemas as fixture files."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, schema in (
        ("control_message.schema.json", CONTROL_ADAPTER.json_schema()),
        ("telemetry_frame.schema.json", TelemetryFrame.model_json_schema()),
    ):
        path = out / name
        with open(path, "w") as fh:
            json.dump(schema, fh, indent=2, sort_keys=True)
            fh.write("\n")
        written.append(path)
    return written
