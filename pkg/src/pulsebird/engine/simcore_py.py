"""Pure-Python tick kernel.

Reference implementation of the per-tick world update.  The compiled
kernel in ``_simcore.pyx`` mirrors this file statement for statement and
must produce bit-identical doubles; any change here must be made there
too (the parity tests will catch a drift).

Update order within one tick, fixed for determinism:

1. bird vertical: flap sets ``vy = -flap_impulse``, otherwise gravity
   integrates into ``vy``; then ``y += vy*dt``
2. pillars advance left by ``nominal_speed * multiplier * dt``
3. spawn: while the last spawned pillar has traveled ``pillar_spacing``,
   a new pillar appears at ``x = world_width``
4. horizontal: touching a pillar body drags the bird left at
   ``pushback_speed``; otherwise it relaxes toward ``bird_home_x`` at the
   same speed, never overshooting
5. scoring: each pillar whose right edge has passed ``bird_x`` scores
   exactly once (near-miss noted when the tightest observed clearance was
   under 10% of the gap)
6. recycle: pillars fully off-screen to the left are dropped
7. termination, first match wins: out-left, y below 0, y above
   world_height, target score reached

The bird is a point: its "right edge" is ``bird_x``.  Span and gap
boundary checks are inclusive — grazing a gap lip is safe.
"""

from __future__ import annotations

from .rng import gap_unit

__all__ = ["PySimCore", "EV_COLLISION_START", "EV_NEAR_MISS", "EV_SPAWNED", "EV_ENDED"]

EV_COLLISION_START = 1
EV_NEAR_MISS = 2
EV_SPAWNED = 4
EV_ENDED = 8

PHASE_READY = 0
PHASE_RUNNING = 1
PHASE_ENDED = 2

REASON_NONE = 0
REASON_SUCCESS = 1
REASON_OUT_LEFT = 2
REASON_OUT_TOP = 3
REASON_OUT_BOTTOM = 4

_INF = float("inf")


class PySimCore:
    """Mutable simulation core for one session.

    config_values order:
        (world_width, world_height, bird_home_x, gravity, flap_impulse,
         pillar_width, initial_gap, gap_increment_fraction,
         initial_pillar_speed, speed_growth_factor, speed_cap, gap_cap,
         pushback_speed, pillar_spacing, tick_rate)
    level_values order:
        (level_id, show_score, hr_adaptive, target_score or -1)
    """

    backend = "python"

    def __init__(self, config_values, level_values, seed):
        (
            self.world_w,
            self.world_h,
            self.home_x,
            self.gravity,
            self.flap_impulse,
            self.pillar_w,
            self.gap0,
            self.gap_inc,
            self.speed0,
            self.speed_growth,
            self.speed_cap,
            self.gap_cap,
            self.pushback,
            self.spacing,
            tick_rate,
        ) = (float(v) for v in config_values)
        self.tick_rate = int(tick_rate)
        self.dt = 1.0 / self.tick_rate

        level_id, show_score, hr_adaptive, target = level_values
        self.level_id = int(level_id)
        self.show_score = bool(show_score)
        self.hr_adaptive = bool(hr_adaptive)
        self.target = int(target)

        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF

        self.tick_no = 0
        self.bird_x = self.home_x
        self.bird_y = self.world_h * 0.5
        self.bird_vy = 0.0
        self.score = 0
        self.multiplier = 1.0
        self.phase = PHASE_READY
        self.reason = REASON_NONE
        self.was_overlapping = False

        # parallel pillar arrays, spawn order
        self.p_index: list[int] = []
        self.p_x: list[float] = []
        self.p_center: list[float] = []
        self.p_gap: list[float] = []
        self.p_speed: list[float] = []
        self.p_scored: list[bool] = []
        self.p_minclear: list[float] = []

        self.next_index = 0
        self.last_spawn_x = self.world_w
        self.last_spawn_speed = 0.0
        self._spawn()  # first pillar scheduled at x = world_width

    # -- spawn ---------------------------------------------------------

    def _spawn(self) -> None:
        i = self.next_index
        speed = self.speed0 * self.speed_growth ** float(i)
        if speed > self.speed_cap:
            speed = self.speed_cap
        gap = self.gap0 * (1.0 + self.gap_inc * float(i))
        if gap > self.gap_cap:
            gap = self.gap_cap
        u = gap_unit(self.seed, i)
        center = gap * 0.5 + u * (self.world_h - gap)
        self.p_index.append(i)
        self.p_x.append(self.world_w)
        self.p_center.append(center)
        self.p_gap.append(gap)
        self.p_speed.append(speed)
        self.p_scored.append(False)
        self.p_minclear.append(_INF)
        self.next_index = i + 1
        self.last_spawn_x = self.world_w
        self.last_spawn_speed = speed

    # -- tick ----------------------------------------------------------

    def tick(self, flap: bool) -> int:
        if self.phase == PHASE_ENDED:
            return 0
        if self.phase == PHASE_READY:
            self.phase = PHASE_RUNNING

        events = 0
        dt = self.dt

        # 1. bird vertical
        if flap:
            self.bird_vy = -self.flap_impulse
        else:
            self.bird_vy = self.bird_vy + self.gravity * dt
        self.bird_y = self.bird_y + self.bird_vy * dt

        # 2. pillars advance
        mult = self.multiplier
        n = len(self.p_x)
        for j in range(n):
            self.p_x[j] = self.p_x[j] - self.p_speed[j] * mult * dt
        self.last_spawn_x = self.last_spawn_x - self.last_spawn_speed * mult * dt

        # 3. spawn
        while self.world_w - self.last_spawn_x >= self.spacing:
            self._spawn()
            events |= EV_SPAWNED
            n = len(self.p_x)

        # 4. horizontal: pushback or relaxation
        overlapping = False
        bx = self.bird_x
        by = self.bird_y
        for j in range(n):
            px = self.p_x[j]
            if px <= bx <= px + self.pillar_w:
                half = self.p_gap[j] * 0.5
                dy = by - self.p_center[j]
                if dy < 0.0:
                    dy = -dy
                if dy > half:
                    overlapping = True
                else:
                    clearance = half - dy
                    if clearance < self.p_minclear[j]:
                        self.p_minclear[j] = clearance
        if overlapping:
            if not self.was_overlapping:
                events |= EV_COLLISION_START
            self.bird_x = bx - self.pushback * dt
        elif bx < self.home_x:
            nx = bx + self.pushback * dt
            self.bird_x = self.home_x if nx > self.home_x else nx
        self.was_overlapping = overlapping

        # 5. scoring
        bx = self.bird_x
        for j in range(n):
            if not self.p_scored[j] and self.p_x[j] + self.pillar_w < bx:
                self.p_scored[j] = True
                self.score += 1
                if self.p_minclear[j] < 0.10 * self.p_gap[j]:
                    events |= EV_NEAR_MISS

        # 6. recycle off-screen pillars
        j = 0
        while j < len(self.p_x):
            if self.p_x[j] + self.pillar_w < 0.0:
                del self.p_index[j]
                del self.p_x[j]
                del self.p_center[j]
                del self.p_gap[j]
                del self.p_speed[j]
                del self.p_scored[j]
                del self.p_minclear[j]
            else:
                j += 1

        # 7. advance clock, then terminate (first matching rule wins)
        self.tick_no += 1
        if self.bird_x < 0.0:
            self._end(REASON_OUT_LEFT)
            events |= EV_ENDED
        elif self.bird_y < 0.0:
            self._end(REASON_OUT_BOTTOM)
            events |= EV_ENDED
        elif self.bird_y > self.world_h:
            self._end(REASON_OUT_TOP)
            events |= EV_ENDED
        elif self.target >= 0 and self.score >= self.target:
            self._end(REASON_SUCCESS)
            events |= EV_ENDED
        return events

    def _end(self, reason: int) -> None:
        self.phase = PHASE_ENDED
        self.reason = reason

    # -- external control ----------------------------------------------

    def set_multiplier(self, m: float) -> None:
        self.multiplier = m

    @property
    def elapsed(self) -> float:
        return float(self.tick_no) * self.dt

    # -- bot/HUD view ----------------------------------------------------

    def nearest_gap(self):
        """(index, x, gap_center_y, gap_height, speed) of the next pillar
        to negotiate: smallest x whose right edge is at or ahead of the
        bird.  None when no pillar is ahead."""
        best = -1
        best_x = _INF
        for j in range(len(self.p_x)):
            if self.p_x[j] + self.pillar_w >= self.bird_x and self.p_x[j] < best_x:
                best = j
                best_x = self.p_x[j]
        if best < 0:
            return None
        return (
            self.p_index[best],
            self.p_x[best],
            self.p_center[best],
            self.p_gap[best],
            self.p_speed[best],
        )

    # -- snapshot / restore ----------------------------------------------

    def snapshot(self) -> tuple:
        pillars = tuple(
            (
                self.p_index[j],
                self.p_x[j],
                self.p_center[j],
                self.p_gap[j],
                self.p_speed[j],
                1 if self.p_scored[j] else 0,
                self.p_minclear[j],
            )
            for j in range(len(self.p_x))
        )
        return (
            self.tick_no,
            self.bird_x,
            self.bird_y,
            self.bird_vy,
            self.score,
            self.multiplier,
            self.phase,
            self.reason,
            self.next_index,
            self.last_spawn_x,
            1 if self.was_overlapping else 0,
            pillars,
        )

    def load(self, snap: tuple) -> None:
        (
            self.tick_no,
            self.bird_x,
            self.bird_y,
            self.bird_vy,
            self.score,
            self.multiplier,
            self.phase,
            self.reason,
            self.next_index,
            self.last_spawn_x,
            was_overlapping,
            pillars,
        ) = snap
        self.was_overlapping = bool(was_overlapping)
        self.p_index = [p[0] for p in pillars]
        self.p_x = [p[1] for p in pillars]
        self.p_center = [p[2] for p in pillars]
        self.p_gap = [p[3] for p in pillars]
        self.p_speed = [p[4] for p in pillars]
        self.p_scored = [bool(p[5]) for p in pillars]
        self.p_minclear = [p[6] for p in pillars]
        # derived: speed of the most recently spawned pillar
        i = self.next_index - 1
        speed = self.speed0 * self.speed_growth ** float(i)
        if speed > self.speed_cap:
            speed = self.speed_cap
        self.last_spawn_speed = speed
