# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled tick kernel.

Statement-for-statement mirror of ``simcore_py.PySimCore``; see that
module for the update-order contract.  Built with -ffp-contract=off so
double arithmetic rounds exactly like the interpreter's; the parity test
suite asserts bit-identical snapshots between the two backends.
"""

from libc.math cimport pow
from libc.stdlib cimport free, malloc

EV_COLLISION_START = 1
EV_NEAR_MISS = 2
EV_SPAWNED = 4
EV_ENDED = 8

cdef int C_EV_COLLISION_START = 1
cdef int C_EV_NEAR_MISS = 2
cdef int C_EV_SPAWNED = 4
cdef int C_EV_ENDED = 8

cdef int PHASE_READY = 0
cdef int PHASE_RUNNING = 1
cdef int PHASE_ENDED = 2

cdef int REASON_NONE = 0
cdef int REASON_SUCCESS = 1
cdef int REASON_OUT_LEFT = 2
cdef int REASON_OUT_TOP = 3
cdef int REASON_OUT_BOTTOM = 4

cdef unsigned long long GOLDEN = <unsigned long long>0x9E3779B97F4A7C15
cdef unsigned long long MIX_A = <unsigned long long>0xBF58476D1CE4E5B9
cdef unsigned long long MIX_B = <unsigned long long>0x94D049BB133111EB
cdef double TO_UNIT = 1.0 / 9007199254740992.0  # 2^-53
cdef double INF = float("inf")


cdef inline unsigned long long _mix64(unsigned long long z) noexcept nogil:
    z = (z ^ (z >> 30)) * MIX_A
    z = (z ^ (z >> 27)) * MIX_B
    return z ^ (z >> 31)


cdef inline double _gap_unit(unsigned long long seed, long long i) noexcept nogil:
    cdef unsigned long long z = seed + (<unsigned long long>(i + 1)) * GOLDEN
    return <double>(_mix64(z) >> 11) * TO_UNIT


cdef class SimCore:
    """Mutable simulation core for one session (compiled backend).

    Same constructor contract as ``PySimCore``: flat config tuple, flat
    level tuple, 64-bit seed.
    """

    cdef double world_w, world_h, home_x, gravity, flap_impulse, pillar_w
    cdef double gap0, gap_inc, speed0, speed_growth, speed_cap, gap_cap
    cdef double pushback, spacing, dt
    cdef int tick_rate_i
    cdef int level_id_i
    cdef bint show_score_b, hr_adaptive_b
    cdef long long target_i
    cdef unsigned long long seed_u

    cdef long long tick_c
    cdef double bird_x_c, bird_y_c, bird_vy_c
    cdef long long score_c
    cdef double multiplier_c
    cdef int phase_c, reason_c
    cdef bint was_overlapping_c

    cdef long long* p_index
    cdef double* p_x
    cdef double* p_center
    cdef double* p_gap
    cdef double* p_speed
    cdef char* p_scored
    cdef double* p_minclear
    cdef int p_count, p_capacity

    cdef long long next_index_c
    cdef double last_spawn_x_c, last_spawn_speed_c

    def __cinit__(self, config_values, level_values, seed):
        vals = [float(v) for v in config_values]
        if len(vals) != 15:
            raise ValueError("config_values must have 15 entries")
        self.world_w = vals[0]
        self.world_h = vals[1]
        self.home_x = vals[2]
        self.gravity = vals[3]
        self.flap_impulse = vals[4]
        self.pillar_w = vals[5]
        self.gap0 = vals[6]
        self.gap_inc = vals[7]
        self.speed0 = vals[8]
        self.speed_growth = vals[9]
        self.speed_cap = vals[10]
        self.gap_cap = vals[11]
        self.pushback = vals[12]
        self.spacing = vals[13]
        self.tick_rate_i = <int>vals[14]
        self.dt = 1.0 / <double>self.tick_rate_i

        level_id, show_score, hr_adaptive, target = level_values
        self.level_id_i = int(level_id)
        self.show_score_b = bool(show_score)
        self.hr_adaptive_b = bool(hr_adaptive)
        self.target_i = int(target)

        self.seed_u = <unsigned long long>(int(seed) & 0xFFFFFFFFFFFFFFFF)

        self.p_capacity = <int>((self.world_w + self.pillar_w) / self.spacing) + 4
        if self.p_capacity < 8:
            self.p_capacity = 8
        self._alloc(self.p_capacity)
        self.p_count = 0

        self.tick_c = 0
        self.bird_x_c = self.home_x
        self.bird_y_c = self.world_h * 0.5
        self.bird_vy_c = 0.0
        self.score_c = 0
        self.multiplier_c = 1.0
        self.phase_c = PHASE_READY
        self.reason_c = REASON_NONE
        self.was_overlapping_c = False

        self.next_index_c = 0
        self.last_spawn_x_c = self.world_w
        self.last_spawn_speed_c = 0.0
        self._spawn()

    cdef _alloc(self, int capacity):
        self.p_index = <long long*>malloc(capacity * sizeof(long long))
        self.p_x = <double*>malloc(capacity * sizeof(double))
        self.p_center = <double*>malloc(capacity * sizeof(double))
        self.p_gap = <double*>malloc(capacity * sizeof(double))
        self.p_speed = <double*>malloc(capacity * sizeof(double))
        self.p_scored = <char*>malloc(capacity * sizeof(char))
        self.p_minclear = <double*>malloc(capacity * sizeof(double))
        if (self.p_index == NULL or self.p_x == NULL or self.p_center == NULL
                or self.p_gap == NULL or self.p_speed == NULL
                or self.p_scored == NULL or self.p_minclear == NULL):
            raise MemoryError()

    def __dealloc__(self):
        free(self.p_index)
        free(self.p_x)
        free(self.p_center)
        free(self.p_gap)
        free(self.p_speed)
        free(self.p_scored)
        free(self.p_minclear)

    # -- spawn ---------------------------------------------------------

    cdef _spawn(self):
        cdef long long i = self.next_index_c
        cdef double speed, gap, u, center
        cdef int j
        speed = self.speed0 * pow(self.speed_growth, <double>i)
        if speed > self.speed_cap:
            speed = self.speed_cap
        gap = self.gap0 * (1.0 + self.gap_inc * <double>i)
        if gap > self.gap_cap:
            gap = self.gap_cap
        u = _gap_unit(self.seed_u, i)
        center = gap * 0.5 + u * (self.world_h - gap)
        if self.p_count >= self.p_capacity:
            raise RuntimeError("pillar capacity exceeded")
        j = self.p_count
        self.p_index[j] = i
        self.p_x[j] = self.world_w
        self.p_center[j] = center
        self.p_gap[j] = gap
        self.p_speed[j] = speed
        self.p_scored[j] = 0
        self.p_minclear[j] = INF
        self.p_count = j + 1
        self.next_index_c = i + 1
        self.last_spawn_x_c = self.world_w
        self.last_spawn_speed_c = speed

    # -- tick ----------------------------------------------------------

    def tick(self, bint flap):
        cdef int events = 0
        cdef double dt = self.dt
        cdef int j, w, n
        cdef double mult, bx, by, px, half, dy, clearance, nx
        cdef bint overlapping = False

        if self.phase_c == PHASE_ENDED:
            return 0
        if self.phase_c == PHASE_READY:
            self.phase_c = PHASE_RUNNING

        # 1. bird vertical
        if flap:
            self.bird_vy_c = -self.flap_impulse
        else:
            self.bird_vy_c = self.bird_vy_c + self.gravity * dt
        self.bird_y_c = self.bird_y_c + self.bird_vy_c * dt

        # 2. pillars advance
        mult = self.multiplier_c
        n = self.p_count
        for j in range(n):
            self.p_x[j] = self.p_x[j] - self.p_speed[j] * mult * dt
        self.last_spawn_x_c = self.last_spawn_x_c - self.last_spawn_speed_c * mult * dt

        # 3. spawn
        while self.world_w - self.last_spawn_x_c >= self.spacing:
            self._spawn()
            events |= C_EV_SPAWNED
            n = self.p_count

        # 4. horizontal: pushback or relaxation
        bx = self.bird_x_c
        by = self.bird_y_c
        for j in range(n):
            px = self.p_x[j]
            if px <= bx and bx <= px + self.pillar_w:
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
            if not self.was_overlapping_c:
                events |= C_EV_COLLISION_START
            self.bird_x_c = bx - self.pushback * dt
        elif bx < self.home_x:
            nx = bx + self.pushback * dt
            self.bird_x_c = self.home_x if nx > self.home_x else nx
        self.was_overlapping_c = overlapping

        # 5. scoring
        bx = self.bird_x_c
        for j in range(n):
            if self.p_scored[j] == 0 and self.p_x[j] + self.pillar_w < bx:
                self.p_scored[j] = 1
                self.score_c += 1
                if self.p_minclear[j] < 0.10 * self.p_gap[j]:
                    events |= C_EV_NEAR_MISS

        # 6. recycle off-screen pillars (order-preserving compaction)
        w = 0
        for j in range(self.p_count):
            if self.p_x[j] + self.pillar_w < 0.0:
                continue
            if w != j:
                self.p_index[w] = self.p_index[j]
                self.p_x[w] = self.p_x[j]
                self.p_center[w] = self.p_center[j]
                self.p_gap[w] = self.p_gap[j]
                self.p_speed[w] = self.p_speed[j]
                self.p_scored[w] = self.p_scored[j]
                self.p_minclear[w] = self.p_minclear[j]
            w += 1
        self.p_count = w

        # 7. advance clock, then terminate (first matching rule wins)
        self.tick_c += 1
        if self.bird_x_c < 0.0:
            self.phase_c = PHASE_ENDED
            self.reason_c = REASON_OUT_LEFT
            events |= C_EV_ENDED
        elif self.bird_y_c < 0.0:
            self.phase_c = PHASE_ENDED
            self.reason_c = REASON_OUT_BOTTOM
            events |= C_EV_ENDED
        elif self.bird_y_c > self.world_h:
            self.phase_c = PHASE_ENDED
            self.reason_c = REASON_OUT_TOP
            events |= C_EV_ENDED
        elif self.target_i >= 0 and self.score_c >= self.target_i:
            self.phase_c = PHASE_ENDED
            self.reason_c = REASON_SUCCESS
            events |= C_EV_ENDED
        return events

    # -- external control ----------------------------------------------

    def set_multiplier(self, double m):
        self.multiplier_c = m

    # -- bot/HUD view ----------------------------------------------------

    def nearest_gap(self):
        cdef int j, best = -1
        cdef double best_x = INF
        for j in range(self.p_count):
            if self.p_x[j] + self.pillar_w >= self.bird_x_c and self.p_x[j] < best_x:
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

    def snapshot(self):
        cdef int j
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
            for j in range(self.p_count)
        )
        return (
            self.tick_c,
            self.bird_x_c,
            self.bird_y_c,
            self.bird_vy_c,
            self.score_c,
            self.multiplier_c,
            self.phase_c,
            self.reason_c,
            self.next_index_c,
            self.last_spawn_x_c,
            1 if self.was_overlapping_c else 0,
            pillars,
        )

    def load(self, snap):
        cdef int j = 0
        cdef long long i
        cdef double speed
        (
            tick_no,
            bird_x,
            bird_y,
            bird_vy,
            score,
            multiplier,
            phase,
            reason,
            next_index,
            last_spawn_x,
            was_overlapping,
            pillars,
        ) = snap
        self.tick_c = tick_no
        self.bird_x_c = bird_x
        self.bird_y_c = bird_y
        self.bird_vy_c = bird_vy
        self.score_c = score
        self.multiplier_c = multiplier
        self.phase_c = phase
        self.reason_c = reason
        self.next_index_c = next_index
        self.last_spawn_x_c = last_spawn_x
        self.was_overlapping_c = bool(was_overlapping)
        if len(pillars) > self.p_capacity:
            raise RuntimeError("snapshot exceeds pillar capacity for this config")
        for p in pillars:
            self.p_index[j] = p[0]
            self.p_x[j] = p[1]
            self.p_center[j] = p[2]
            self.p_gap[j] = p[3]
            self.p_speed[j] = p[4]
            self.p_scored[j] = 1 if p[5] else 0
            self.p_minclear[j] = p[6]
            j += 1
        self.p_count = j
        # derived: speed of the most recently spawned pillar
        i = self.next_index_c - 1
        speed = self.speed0 * pow(self.speed_growth, <double>i)
        if speed > self.speed_cap:
            speed = self.speed_cap
        self.last_spawn_speed_c = speed

    # -- read-only views -------------------------------------------------

    @property
    def backend(self):
        return "cython"

    @property
    def tick_no(self):
        return self.tick_c

    @property
    def bird_x(self):
        return self.bird_x_c

    @property
    def bird_y(self):
        return self.bird_y_c

    @property
    def bird_vy(self):
        return self.bird_vy_c

    @property
    def score(self):
        return self.score_c

    @property
    def multiplier(self):
        return self.multiplier_c

    @property
    def phase(self):
        return self.phase_c

    @property
    def reason(self):
        return self.reason_c

    @property
    def elapsed(self):
        return <double>self.tick_c * self.dt
