"""Async relay clients: frame-level link plus a scripted bot player.

``Link`` wraps one websocket with sequence stamping and type-filtered
receive.  ``play_session`` drives a complete session through the relay —
player and sensor connections, baseline, bot piloting from streamed
state frames, session end — and is what the CLI demo and the end-to-end
tests use.
"""

from __future__ import annotations

import asyncio
from collections import deque
from dataclasses import dataclass, field

from websockets.asyncio.client import connect

from ..engine import GameConfig, LevelSpec
from ..simulate import BotPilot, PilotRuntime
from . import protocol as proto

__all__ = ["Link", "FrameView", "play_session", "PlayResult"]


class Link:
    """One client connection; stamps sequence numbers, filters receives."""

    def __init__(self, ws) -> None:
        self.ws = ws
        self._seq = 0
        self.pending: deque[dict] = deque()

    @classmethod
    async def connect(cls, uri: str) -> "Link":
        return cls(await connect(uri))

    async def close(self) -> None:
        await self.ws.close()

    def next_seq(self) -> int:
        self._seq += 1
        return self._seq

    async def send(self, ftype: str, **fields) -> int:
        seq = self.next_seq()
        frame = {"v": proto.PROTOCOL_VERSION, "type": ftype, "seq": seq, **fields}
        await self.ws.send(proto.encode(frame))
        return seq

    async def recv(self, want: str | None = None, timeout: float = 5.0) -> dict:
        """Next frame, or next frame of type ``want`` (others are queued)."""
        if want is not None:
            for i, f in enumerate(self.pending):
                if f["type"] == want:
                    del self.pending[i]
                    return f
        elif self.pending:
            return self.pending.popleft()
        loop = asyncio.get_running_loop()
        deadline = loop.time() + timeout
        while True:
            remaining = deadline - loop.time()
            raw = await asyncio.wait_for(self.ws.recv(), timeout=remaining)
            import json

            frame = json.loads(raw)
            if want is None or frame["type"] == want:
                return frame
            self.pending.append(frame)


class FrameView:
    """Adapts a state frame to the pilot's view of the world."""

    def __init__(self, frame: dict, config: GameConfig) -> None:
        self.frame = frame
        self.config = config
        self.bird_x = frame["bird_x"]
        self.bird_y = frame["bird_y"]
        self.bird_vy = frame["bird_vy"]

    def nearest_gap(self):
        best = None
        best_x = float("inf")
        for p in self.frame["pillars"]:
            if p["x"] + self.config.pillar_width >= self.bird_x and p["x"] < best_x:
                best = p
                best_x = p["x"]
        if best is None:
            return None
        return (best["index"], best["x"], best["gap_center_y"], best["gap_height"],
                best["nominal_speed"])


@dataclass
class PlayResult:
    session_id: str
    reason: str
    final_score: int
    duration_s: float
    state_frames: int
    acked_inputs: int
    multipliers_seen: list[float] = field(default_factory=list)
    threshold: float | None = None


async def play_session(
    uri: str,
    level: LevelSpec,
    seed: int,
    bot: BotPilot,
    hr_bpm_fn=None,
    sample_every_frames: int = 60,
    config_overrides: dict | None = None,
    timeout_s: float = 120.0,
) -> PlayResult:
    """Play one full session against a relay at ``uri``.

    ``hr_bpm_fn(t_seconds) -> bpm`` supplies the synthetic sensor; when
    omitted a steady 70 bpm is sent.  The bot decides on every state
    frame, mirroring a human reacting to the rendered world.
    """
    if hr_bpm_fn is None:
        hr_bpm_fn = lambda t: 70.0

    player = await Link.connect(uri)
    sensor: Link | None = None
    try:
        open_fields: dict = {"level": level.to_dict(), "seed": seed}
        if config_overrides:
            open_fields["config"] = config_overrides
        await player.send("open_session", **open_fields)
        start = await player.recv("session_start")
        session_id = start["session_id"]
        config = GameConfig.from_dict(start["config"])
        pilot = PilotRuntime(bot, config)

        sensor = await Link.connect(uri)
        await sensor.send("join", session_id=session_id, role=proto.ROLE_SENSOR)
        await sensor.recv("joined")

        # baseline: five samples, one simulated second apart
        sample_t = 0.0
        if level.hr_adaptive:
            for _ in range(5):
                await sensor.send("hr", session_id=session_id, bpm=hr_bpm_fn(sample_t), ts=round(sample_t * 1000))
                await sensor.recv("ack")
                sample_t += 1.0

        async def send_hr_sample(t: float) -> None:
            # always drain the ack: an unread link eventually stalls its
            # transport and the keepalive tears the connection down
            await sensor.send("hr", session_id=session_id, bpm=hr_bpm_fn(t), ts=round(t * 1000))
            await sensor.recv("ack")

        await player.send("input", session_id=session_id, tick=0, flap=True)

        result = PlayResult(
            session_id=session_id, reason="", final_score=0, duration_s=0.0,
            state_frames=0, acked_inputs=0,
        )
        frames_until_sample = sample_every_frames
        deadline = asyncio.get_running_loop().time() + timeout_s
        while True:
            if asyncio.get_running_loop().time() > deadline:
                raise TimeoutError("session did not end within the timeout")
            frame = await player.recv()
            ftype = frame["type"]
            if ftype == "state":
                result.state_frames += 1
                if frame["multiplier"] not in result.multipliers_seen:
                    result.multipliers_seen.append(frame["multiplier"])
                if "threshold" in frame:
                    result.threshold = frame["threshold"]
                flap = pilot.decide(FrameView(frame, config))
                await player.send("input", session_id=session_id, tick=frame["tick"], flap=flap)
                frames_until_sample -= 1
                if frames_until_sample <= 0 and sensor is not None:
                    frames_until_sample = sample_every_frames
                    sample_t += 1.0
                    await send_hr_sample(sample_t)
            elif ftype == "ack":
                if frame.get("status") == "ok":
                    result.acked_inputs += 1
            elif ftype == "session_end":
                result.reason = frame["reason"]
                result.final_score = frame["final_score"]
                result.duration_s = frame["duration_s"]
                return result
    finally:
        if sensor is not None:
            await sensor.close()
        await player.close()
