"""Deterministic indoor simulation and the three indoor experiments.

``simulate_indoor`` runs a tick-driven loop (default 100 ms) over a room:
random-waypoint mobility, Poisson call arrivals with exponential holding
times, zone tracking, the admission/handover/idle-mode policies and one
protocol run per accepted handover. Runs are bit-identical for a fixed
(config, seed) pair; every random draw comes from a labeled substream.

The experiment entry points reproduce the published comparisons:

  * idle-mode probability vs number of active users (placement model
    against the closed-form bound),
  * femtocell SINR with and without the hybrid idle-mode thinning, for
    frequency-reuse factors 1 and 4,
  * LiFi-to-LiFi handover success vs AP spacing, against the closed-form
    crossing-success curve, with the hybrid fallback pinned at 1.

The SINR experiment reuses one set of interferer positions and uniform
draws across all four schemes, so the published orderings (hybrid above
pure, reuse 4 above reuse 1) hold drop by drop, not just on average.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import channel, policy, selection
from .channel import OpticalParams, RfParams
from .policy import (
    AdmissionDecision, ApMode, ApState, CallRequest, DwellTimers,
    HandoverDecision, NetworkKind, NetworkState, TrafficClass,
)
from .protocol import FixedLatency, HandoverKind, run_handover
from .rng import spawn_streams
from .zoning import GridPlan, Zone, classify_points, monte_carlo_zone_model, plan_grid


@dataclass(frozen=True)
class RoomConfig:
    a_m: float = 24.0
    b_m: float = 24.0
    coverage_radius_m: float = 5.0

    def plan(self) -> GridPlan:
        return plan_grid(self.a_m, self.b_m, self.coverage_radius_m)


@dataclass(frozen=True)
class MobilityConfig:
    speed_min_mps: float = 0.5
    speed_max_mps: float = 1.5
    pause_min_s: float = 0.0
    pause_max_s: float = 5.0
    tick_s: float = 0.1

    def __post_init__(self):
        if self.tick_s <= 0:
            raise ValueError("tick must be positive")
        if self.speed_min_mps < 0 or self.speed_max_mps < self.speed_min_mps:
            raise ValueError("need 0 <= speed_min <= speed_max")
        if self.pause_min_s < 0 or self.pause_max_s < self.pause_min_s:
            raise ValueError("need 0 <= pause_min <= pause_max")


@dataclass(frozen=True)
class TrafficConfig:
    arrival_rate_per_min: float = 0.5
    mean_holding_s: float = 120.0
    voice_fraction: float = 0.3

    def __post_init__(self):
        if self.arrival_rate_per_min < 0 or self.mean_holding_s <= 0:
            raise ValueError("rates and holding times must be positive")
        if not 0.0 <= self.voice_fraction <= 1.0:
            raise ValueError("voice fraction must lie in [0, 1]")


@dataclass(frozen=True)
class PolicyConfig:
    t_h_s: float = 2.0
    t_h1_s: float = 2.0
    fap_slots: int = 8
    lifi_slots: int = 10
    per_hop_latency_s: float = 0.005

    def __post_init__(self):
        if self.fap_slots <= 0 or self.lifi_slots <= 0:
            raise ValueError("slot counts must be positive")
        if self.t_h_s <= 0 or self.t_h1_s <= 0:
            raise ValueError("dwell thresholds must be positive")


DEFAULT_AHP_MATRIX = (
    (1.0, 2.0, 2.0, 4.0),
    (0.5, 1.0, 1.0, 2.0),
    (0.5, 1.0, 1.0, 2.0),
    (0.25, 0.5, 0.5, 1.0),
)


@dataclass(frozen=True)
class ScenarioConfig:
    room: RoomConfig = RoomConfig()
    user_count: int = 10
    duration_s: float = 120.0
    seed: int = 0
    mobility: MobilityConfig = MobilityConfig()
    traffic: TrafficConfig = TrafficConfig()
    policy: PolicyConfig = PolicyConfig()
    optical: OpticalParams = OpticalParams()
    rf: RfParams = RfParams()
    ahp_pairwise: tuple[tuple[float, ...], ...] = DEFAULT_AHP_MATRIX
    initial_positions: tuple[tuple[float, float], ...] | None = None
    start_in_call: TrafficClass | None = None

    def __post_init__(self):
        if self.user_count < 0 or self.duration_s <= 0:
            raise ValueError("user count must be >= 0 and duration positive")
        if self.initial_positions is not None and len(self.initial_positions) != self.user_count:
            raise ValueError("one initial position per user is required")


ADMISSION_KEYS = tuple(d.value for d in AdmissionDecision)
HANDOVER_KEYS = tuple(k.value for k in HandoverKind)


@dataclass
class Metrics:
    admissions: dict[str, int] = field(default_factory=lambda: {k: 0 for k in ADMISSION_KEYS})
    handovers: dict[str, int] = field(default_factory=lambda: {k: 0 for k in HANDOVER_KEYS})
    handovers_rejected: int = 0
    handover_latency_s: list[float] = field(default_factory=list)
    fap_idle_fraction: float = 0.0
    sinr_samples_db: list[float] = field(default_factory=list)
    capacity_samples_bps: list[float] = field(default_factory=list)
    calls_released: int = 0
    active_at_end: int = 0
    ahp_rank: tuple[float, float, str] | None = None

    def csv_rows(self) -> list[tuple[str, str]]:
        """Flat (metric, value) rows with a fixed ordering."""
        rows: list[tuple[str, str]] = []
        for key in ADMISSION_KEYS:
            rows.append((f"admissions.{key}", repr(self.admissions[key])))
        for key in HANDOVER_KEYS:
            rows.append((f"handovers.{key}", repr(self.handovers[key])))
        rows.append(("handovers.rejected", repr(self.handovers_rejected)))
        rows.append(("handover_latency_mean_s", repr(_mean(self.handover_latency_s))))
        rows.append(("fap_idle_fraction", repr(self.fap_idle_fraction)))
        rows.append(("sinr_mean_db", repr(_mean(self.sinr_samples_db))))
        rows.append(("capacity_mean_bps", repr(_mean(self.capacity_samples_bps))))
        rows.append(("calls_released", repr(self.calls_released)))
        rows.append(("active_at_end", repr(self.active_at_end)))
        if self.ahp_rank is not None:
            rows.append(("ahp.r_lifi", repr(self.ahp_rank[0])))
            rows.append(("ahp.r_femto", repr(self.ahp_rank[1])))
            rows.append(("ahp.chosen", self.ahp_rank[2]))
        return rows


def _mean(values: list[float]) -> float:
    return sum(values) / len(values) if values else 0.0


@dataclass
class _Call:
    call_id: int
    traffic_class: TrafficClass
    serving_kind: NetworkKind
    serving_ap: str
    end_time_s: float


@dataclass
class _Terminal:
    index: int
    x: float
    y: float
    waypoint: tuple[float, float] | None = None
    speed: float = 0.0
    pause_until: float = 0.0
    zone: Zone = Zone.Z1
    timers: DwellTimers = field(default_factory=DwellTimers)
    call: _Call | None = None
    next_arrival_s: float = 0.0
    last_handover_s: float = float("-inf")


class _IndoorSim:
    """Single-run state; use :func:`simulate_indoor`."""

    def __init__(self, config: ScenarioConfig):
        self.cfg = config
        self.plan = config.room.plan()
        self.centers = self.plan.centers_array()
        self.streams = spawn_streams(config.seed)
        self.state = NetworkState()
        self.state.add(ApState("fap", NetworkKind.FAP, ApMode.IDLE, config.policy.fap_slots, 0))
        for i in range(self.plan.ap_count):
            self.state.add(ApState(f"lifi{i}", NetworkKind.LIFI, ApMode.ACTIVE, config.policy.lifi_slots, 0))
        self.metrics = Metrics()
        self.latency = FixedLatency(config.policy.per_hop_latency_s)
        self._next_call_id = 0
        self._by_kind: dict[NetworkKind, list[tuple[float, float]]] = {
            NetworkKind.LIFI: [], NetworkKind.FAP: [],
        }
        self._terminals = self._init_terminals()

    def _init_terminals(self) -> list[_Terminal]:
        cfg = self.cfg
        timers = lambda: DwellTimers(t_h_s=cfg.policy.t_h_s, t_h1_s=cfg.policy.t_h1_s)
        terminals = []
        placement = self.streams["placement"]
        for i in range(cfg.user_count):
            if cfg.initial_positions is not None:
                x, y = cfg.initial_positions[i]
            else:
                x = float(placement.uniform(0.0, cfg.room.a_m))
                y = float(placement.uniform(0.0, cfg.room.b_m))
            t = _Terminal(index=i, x=x, y=y, timers=timers())
            t.next_arrival_s = 0.0 if cfg.start_in_call is not None else self._draw_interarrival()
            terminals.append(t)
        if terminals:
            codes = classify_points(self.plan, np.asarray([(t.x, t.y) for t in terminals]))
            for t, code in zip(terminals, codes):
                t.zone = Zone(int(code))
                if t.zone is Zone.Z4:
                    t.timers.zone4_entry_time_s = 0.0
                elif t.zone is Zone.Z3:
                    t.timers.zone3_entry_time_s = 0.0
        return terminals

    def _draw_interarrival(self) -> float:
        rate = self.cfg.traffic.arrival_rate_per_min / 60.0
        if rate <= 0:
            return float("inf")
        return float(self.streams["traffic"].exponential(1.0 / rate))

    def _draw_holding(self) -> float:
        return float(self.streams["traffic"].exponential(self.cfg.traffic.mean_holding_s))

    def _draw_class(self) -> TrafficClass:
        if float(self.streams["traffic"].random()) < self.cfg.traffic.voice_fraction:
            return TrafficClass.RT_VOICE
        return TrafficClass.DATA

    # Mobility -----------------------------------------------------------

    def _move(self, t: _Terminal, now: float) -> None:
        cfg = self.cfg.mobility
        room = self.cfg.room
        if t.waypoint is None:
            if now < t.pause_until:
                return
            gen = self.streams["mobility"]
            t.waypoint = (float(gen.uniform(0.0, room.a_m)), float(gen.uniform(0.0, room.b_m)))
            t.speed = float(gen.uniform(cfg.speed_min_mps, cfg.speed_max_mps))
        step = t.speed * cfg.tick_s
        dx, dy = t.waypoint[0] - t.x, t.waypoint[1] - t.y
        dist = math.hypot(dx, dy)
        if dist <= step:
            t.x, t.y = t.waypoint
            t.waypoint = None
            t.pause_until = now + float(self.streams["mobility"].uniform(cfg.pause_min_s, cfg.pause_max_s))
        elif step > 0.0:
            t.x += dx / dist * step
            t.y += dy / dist * step

    def _update_zone(self, t: _Terminal, now: float) -> None:
        new_zone = Zone(int(classify_points(self.plan, np.asarray([(t.x, t.y)]))[0]))
        if new_zone is not t.zone:
            t.timers.zone4_entry_time_s = now if new_zone is Zone.Z4 else None
            t.timers.zone3_entry_time_s = now if new_zone is Zone.Z3 else None
            t.zone = new_zone

    # Coverage helpers ---------------------------------------------------

    def _lifi_distances(self, t: _Terminal) -> np.ndarray:
        d = self.centers - np.asarray([t.x, t.y])
        return np.sqrt((d * d).sum(axis=1))

    def _covering_lifi(self, t: _Terminal) -> list[tuple[int, float]]:
        """(ap index, horizontal distance) covering the terminal, nearest first."""
        dists = self._lifi_distances(t)
        order = np.argsort(dists, kind="stable")
        r = self.cfg.room.coverage_radius_m
        return [(int(i), float(dists[i])) for i in order if dists[i] <= r]

    def _optical_rx_dB(self, horizontal_m: float) -> float:
        gain = channel.optical_channel_gain(
            channel.LinkGeometry(horizontal_distance_m=horizontal_m), self.cfg.optical
        )
        if gain <= 0:
            return float("-inf")
        return 10.0 * math.log10(self.cfg.optical.tx_optical_power_W * gain)

    # Call lifecycle -----------------------------------------------------

    def _occupy(self, ap_id: str) -> None:
        ap = self.state.aps[ap_id]
        if ap.mode is ApMode.IDLE:
            ap.mode = ApMode.ACTIVE
        ap.occupied_slots += 1
        ap.check()

    def _release(self, ap_id: str) -> None:
        ap = self.state.aps[ap_id]
        ap.occupied_slots -= 1
        ap.check()

    def _try_start_call(self, t: _Terminal, now: float, traffic_class: TrafficClass) -> None:
        candidates = [f"lifi{i}" for i, _ in self._covering_lifi(t)]
        request = CallRequest(self._next_call_id, t.index, traffic_class, t.zone, now)
        self._next_call_id += 1
        result = policy.admit_new_call(request, self.state, candidates)
        self.metrics.admissions[result.decision.value] += 1
        if result.decision is AdmissionDecision.BLOCKED:
            t.next_arrival_s = now + self._draw_interarrival()
            return
        self._occupy(result.ap_id)
        t.call = _Call(request.call_id, traffic_class, result.network, result.ap_id, now + self._draw_holding())

    def _release_call(self, t: _Terminal, now: float) -> None:
        self._release(t.call.serving_ap)
        t.call = None
        self.metrics.calls_released += 1
        t.next_arrival_s = now + self._draw_interarrival()

    def _execute_handover(self, t: _Terminal, now: float, kind: HandoverKind, target_ap: str) -> None:
        trace = run_handover(kind, latency_model=self.latency)
        self.metrics.handovers[kind.value] += 1
        self.metrics.handover_latency_s.append(trace.latency_s)
        self._release(t.call.serving_ap)
        self._occupy(target_ap)
        t.call.serving_ap = target_ap
        t.call.serving_kind = self.state.aps[target_ap].kind
        t.last_handover_s = now

    def _evaluate_handover(self, t: _Terminal, now: float) -> None:
        call = t.call
        if call is None or now - t.last_handover_s < self.cfg.policy.t_h_s:
            return
        if call.serving_kind is NetworkKind.FAP and call.traffic_class is TrafficClass.RT_VOICE:
            return  # voice stays pinned to the femtocell
        s_serving = float("-inf")
        s_target = float("-inf")
        target_idx: int | None = None
        if call.serving_kind is NetworkKind.LIFI and t.zone is Zone.Z4:
            serving_idx = int(call.serving_ap.removeprefix("lifi"))
            dists = self._lifi_distances(t)
            r = self.cfg.room.coverage_radius_m
            if dists[serving_idx] <= r:
                s_serving = self._optical_rx_dB(float(dists[serving_idx]))
            for i, _d in self._covering_lifi(t):
                if i != serving_idx:
                    target_idx = i
                    s_target = self._optical_rx_dB(float(_d))
                    break
        decision = policy.handover_decision(call.serving_kind, t.zone, s_serving, s_target, t.timers, now)
        if decision is HandoverDecision.STAY:
            return
        if decision is HandoverDecision.TO_FAP:
            fap = self.state.fap()
            if fap.free_slots > 0:
                self._execute_handover(t, now, HandoverKind.LIFI_TO_FEMTO, fap.identity)
            else:
                self.metrics.handovers_rejected += 1
            return
        if decision is HandoverDecision.TO_TARGET_LIFI:
            if target_idx is not None and self.state.aps[f"lifi{target_idx}"].free_slots > 0:
                self._execute_handover(t, now, HandoverKind.LIFI_TO_LIFI, f"lifi{target_idx}")
            else:
                self.metrics.handovers_rejected += 1
            return
        # TO_LIFI from the femtocell
        for i, _d in self._covering_lifi(t):
            ap = self.state.aps[f"lifi{i}"]
            if ap.free_slots > 0:
                self._execute_handover(t, now, HandoverKind.FEMTO_TO_LIFI, ap.identity)
                return
        self.metrics.handovers_rejected += 1

    def _apply_idle_mode(self, now: float) -> None:
        fap = self.state.fap()
        served = [(t.index, t.zone) for t in self._terminals if t.call is not None and t.call.serving_ap == fap.identity]
        update = policy.fap_mode_update(fap, served)
        for terminal_id in update.shift_to_lifi:
            t = self._terminals[terminal_id]
            for i, _d in self._covering_lifi(t):
                ap = self.state.aps[f"lifi{i}"]
                if ap.free_slots > 0:
                    self._execute_handover(t, now, HandoverKind.FEMTO_TO_LIFI, ap.identity)
                    break
        if fap.occupied_slots == 0 and fap.mode is ApMode.ACTIVE:
            fap.mode = ApMode.IDLE

    def _sample_link_quality(self, t: _Terminal) -> None:
        call = t.call
        if call is None:
            return
        if call.serving_kind is NetworkKind.LIFI:
            dists = self._lifi_distances(t)
            gains = channel.optical_channel_gain(
                channel.LinkGeometry(horizontal_distance_m=dists), self.cfg.optical
            )
            serving_idx = int(call.serving_ap.removeprefix("lifi"))
            interferers = [float(g) for i, g in enumerate(gains) if i != serving_idx and g > 0]
            sinr = channel.optical_sinr(float(gains[serving_idx]), interferers, self.cfg.optical)
            bandwidth = self.cfg.optical.bandwidth_Hz
        else:
            fx, fy = self.plan.fap_center
            dist = max(math.hypot(t.x - fx, t.y - fy), 0.1)
            rx = self.cfg.rf.fap_tx_dBm - channel.femto_path_loss(dist, self.cfg.rf, wall_count=0)
            sinr = channel.rf_sinr(rx, [], self.cfg.rf.noise_dBm(self.cfg.rf.femto_bandwidth_Hz))
            bandwidth = self.cfg.rf.femto_bandwidth_Hz
        capacity = channel.shannon_capacity(sinr.linear, bandwidth)
        self.metrics.sinr_samples_db.append(sinr.db)
        self.metrics.capacity_samples_bps.append(capacity)
        self._by_kind[call.serving_kind].append((sinr.db, capacity))

    def _check_slot_balance(self) -> None:
        active = sum(1 for t in self._terminals if t.call is not None)
        occupied = sum(ap.occupied_slots for ap in self.state.aps.values())
        if active != occupied:
            raise RuntimeError(f"slot leak: {occupied} occupied for {active} active calls")

    def run(self) -> Metrics:
        cfg = self.cfg
        ticks = int(round(cfg.duration_s / cfg.mobility.tick_s))
        idle_ticks = 0
        for step in range(ticks):
            now = step * cfg.mobility.tick_s
            for t in self._terminals:
                self._move(t, now)
                self._update_zone(t, now)
            for t in self._terminals:
                if t.call is not None and t.call.end_time_s <= now:
                    self._release_call(t, now)
            for t in self._terminals:
                if t.call is None and t.next_arrival_s <= now:
                    if cfg.start_in_call is not None and now == 0.0:
                        self._try_start_call(t, now, cfg.start_in_call)
                    else:
                        self._try_start_call(t, now, self._draw_class())
            for t in self._terminals:
                self._evaluate_handover(t, now)
            self._apply_idle_mode(now)
            for t in self._terminals:
                self._sample_link_quality(t)
            self._check_slot_balance()
            if self.state.fap().mode is ApMode.IDLE:
                idle_ticks += 1
        self.metrics.fap_idle_fraction = idle_ticks / ticks if ticks else 1.0
        self.metrics.active_at_end = sum(1 for t in self._terminals if t.call is not None)
        self._rank_networks()
        return self.metrics

    def _rank_networks(self) -> None:
        """Score the two networks from run aggregates and attach the ranking."""
        if not self.metrics.capacity_samples_bps:
            return
        lifi_aps = self.state.of_kind(NetworkKind.LIFI)
        fap = self.state.fap()
        lifi_load = _mean([ap.occupied_slots / ap.capacity_slots for ap in lifi_aps])
        fap_load = fap.occupied_slots / fap.capacity_slots

        def summarize(kind: NetworkKind) -> tuple[float, float]:
            samples = self._by_kind[kind]
            if not samples:
                return 0.0, 0.0
            return max(_mean([s for s, _ in samples]), 0.0), _mean([c for _, c in samples])

        lifi_sinr, lifi_cap = summarize(NetworkKind.LIFI)
        fap_sinr, fap_cap = summarize(NetworkKind.FAP)
        scores = selection.AlternativeScores(
            values=(
                (lifi_cap, lifi_sinr, 0.3, max(lifi_load, 1e-6)),
                (fap_cap, fap_sinr, 0.7, max(fap_load, 1e-6)),
            ),
            modes=("benefit", "benefit", "benefit", "cost"),
        )
        weights, _cr = selection.derive_weights(self.cfg.ahp_pairwise)
        self.metrics.ahp_rank = selection.rank_networks(scores, weights)


def simulate_indoor(config: ScenarioConfig) -> Metrics:
    """Run one indoor scenario; identical configs and seeds give identical metrics."""
    return _IndoorSim(config).run()


# Experiments ------------------------------------------------------------


@dataclass(frozen=True)
class IdleExperimentConfig:
    room: RoomConfig = RoomConfig()
    placements: int = 100_000
    zone_samples: int = 1 << 20
    lifi_slots: int = 10
    fap_slots: int = 8
    seed: int = 0


def lifi_assignment_idle(codes: np.ndarray, nearest: np.ndarray, ap_count: int, lifi_slots: int) -> np.ndarray:
    """Vectorized idle outcome for batches of user placements.

    ``codes`` and ``nearest`` have shape (placements, users). The femtocell
    ends idle exactly when no user sits in Zone 1 or Zone 4 and no covering
    LiFi AP is asked for more users than it has slots; this matches the
    sequential admission plus idle-mode pipeline, which tests verify.
    """
    needs_fap = (codes == 1) | (codes == 4)
    any_fap = needs_fap.any(axis=1)
    on_lifi = (codes == 2) | (codes == 3)
    n_place = codes.shape[0]
    loads = np.zeros((n_place, ap_count), dtype=np.int64)
    rows = np.repeat(np.arange(n_place), codes.shape[1])
    np.add.at(loads, (rows, nearest.ravel()), on_lifi.ravel().astype(np.int64))
    overflow = (loads > lifi_slots).any(axis=1)
    return ~any_fap & ~overflow


def placement_idle_reference(zones: list[Zone], lifi_slots: int = 10, fap_slots: int = 8) -> bool:
    """Idle outcome of one placement, driven through the policy module.

    Users arrive in list order as data calls against a fresh, idle
    femtocell; the idle-mode rule then runs to a fixed point. Positions are
    abstracted to zones, so all Zone 2/3 users share one LiFi AP; exact for
    user counts at or below the LiFi slot count.
    """
    state = NetworkState()
    state.add(ApState("fap", NetworkKind.FAP, ApMode.IDLE, fap_slots, 0))
    state.add(ApState("lifi0", NetworkKind.LIFI, ApMode.ACTIVE, lifi_slots, 0))
    fap_users: list[tuple[int, Zone]] = []
    for uid, zone in enumerate(zones):
        request = CallRequest(uid, uid, TrafficClass.DATA, zone, 0.0)
        result = policy.admit_new_call(request, state, ["lifi0"])
        if result.decision is AdmissionDecision.BLOCKED:
            continue
        ap = state.aps[result.ap_id]
        if ap.mode is ApMode.IDLE:
            ap.mode = ApMode.ACTIVE
        ap.occupied_slots += 1
        if result.network is NetworkKind.FAP:
            fap_users.append((uid, zone))
    fap = state.aps["fap"]
    while True:
        update = policy.fap_mode_update(fap, fap_users)
        if not update.shift_to_lifi:
            if fap.occupied_slots == 0:
                fap.mode = ApMode.IDLE
            return update.mode is ApMode.IDLE and fap.occupied_slots == 0
        shifted = False
        for uid in update.shift_to_lifi:
            lifi = state.aps["lifi0"]
            if lifi.free_slots > 0:
                lifi.occupied_slots += 1
                fap.occupied_slots -= 1
                fap_users = [(u, z) for u, z in fap_users if u != uid]
                shifted = True
        if not shifted:
            return False


def enumerate_idle_probability(zone_probs, p_users: int, lifi_slots: int = 10, fap_slots: int = 8) -> float:
    """Exact idle probability by summing over all zone assignments (4^p)."""
    zones = list(Zone)
    total = 0.0
    stack: list[tuple[list[Zone], float]] = [([], 1.0)]
    while stack:
        prefix, weight = stack.pop()
        if len(prefix) == p_users:
            if placement_idle_reference(prefix, lifi_slots, fap_slots):
                total += weight
            continue
        for zone in zones:
            w = weight * zone_probs[zone.value - 1]
            if w > 0.0:
                stack.append((prefix + [zone], w))
    return total


def idle_probability_experiment(config: IdleExperimentConfig, user_counts: list[int]):
    """Rows of (user count, empirical idle probability, closed-form value).

    The empirical column places users uniformly at random and applies the
    admission and idle-mode rules; the closed-form column evaluates the
    two-term binomial bound on the same Monte Carlo zone probabilities.
    """
    if not user_counts:
        raise ValueError("user_counts must be non-empty")
    plan = config.room.plan()
    streams = spawn_streams(config.seed)
    model = monte_carlo_zone_model(plan, config.zone_samples, seed=config.seed)
    gen = streams["placement"]
    centers = plan.centers_array()
    chunk = 20_000
    rows = []
    for p in user_counts:
        if p < 0:
            raise ValueError("user counts must be >= 0")
        if p == 0:
            rows.append((0, 1.0, 1.0))
            continue
        idle_count = 0
        done = 0
        while done < config.placements:
            n = min(chunk, config.placements - done)
            done += n
            pts = gen.random((n, p, 2))
            pts[..., 0] *= plan.room_x_m
            pts[..., 1] *= plan.room_y_m
            flat = pts.reshape(-1, 2)
            codes = classify_points(plan, flat).reshape(n, p)
            d2 = ((flat[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
            nearest = np.argmin(d2, axis=1).reshape(n, p)
            idle = lifi_assignment_idle(codes, nearest, plan.ap_count, config.lifi_slots)
            idle_count += int(idle.sum())
        empirical = idle_count / config.placements
        rows.append((p, empirical, policy.fap_idle_probability(p, model.zone_probs)))
    return rows, model


@dataclass(frozen=True)
class FemtoSinrConfig:
    fap_count: int = 50
    deployment_radius_m: float = 100.0
    user_distance_m: float = 8.0
    drops: int = 2000
    interferer_wall_count: int = 1
    hybrid_users_per_home: int = 5
    min_link_distance_m: float = 1.0
    room: RoomConfig = RoomConfig()
    zone_samples: int = 1 << 20
    seed: int = 0


@dataclass(frozen=True)
class FemtoSinrResult:
    scheme: str
    frf: int
    mean_db: float
    p5_db: float
    p50_db: float
    p95_db: float


def femto_sinr_experiment(config: FemtoSinrConfig, rf: RfParams | None = None) -> list[FemtoSinrResult]:
    """Monte Carlo femtocell SINR for pure and hybrid operation at FRF 1 and 4.

    One reference user sits at a fixed distance from its serving femtocell;
    interfering femtocells drop uniformly over a disk and are thinned two
    ways: reuse-4 keeps an interferer co-channel with probability 1/4, and
    hybrid operation further silences it with the idle-mode probability.
    All schemes share positions and thinning draws, so hybrid can never
    fall below pure on any drop.
    """
    if config.drops < 1:
        raise ValueError("at least one drop is required")
    rf = rf if rf is not None else RfParams()
    plan = config.room.plan()
    model = monte_carlo_zone_model(plan, config.zone_samples, seed=config.seed)
    p_idle = policy.fap_idle_probability(config.hybrid_users_per_home, model.zone_probs)
    gen = spawn_streams(config.seed)["drops"]

    n, k = config.drops, config.fap_count
    radii = config.deployment_radius_m * np.sqrt(gen.random((n, k)))
    angles = 2.0 * math.pi * gen.random((n, k))
    user = np.asarray([config.user_distance_m, 0.0])
    dx = radii * np.cos(angles) - user[0]
    dy = radii * np.sin(angles) - user[1]
    dist = np.maximum(np.hypot(dx, dy), config.min_link_distance_m)
    u_band = gen.random((n, k))
    u_idle = gen.random((n, k))

    signal_dbm = rf.fap_tx_dBm - channel.femto_path_loss(config.user_distance_m, rf, wall_count=0)
    interf_mw = 10.0 ** ((rf.fap_tx_dBm - channel.femto_path_loss(dist, rf, wall_count=config.interferer_wall_count)) / 10.0)

    results = []
    for frf in (1, 4):
        co_channel = u_band < (1.0 / frf)
        noise_mw = 10.0 ** (rf.noise_dBm(rf.femto_bandwidth_Hz / frf) / 10.0)
        for scheme in ("pure", "hybrid"):
            mask = co_channel & (u_idle >= p_idle) if scheme == "hybrid" else co_channel
            total_interf = (interf_mw * mask).sum(axis=1)
            sinr_db = signal_dbm - 10.0 * np.log10(noise_mw + total_interf)
            results.append(
                FemtoSinrResult(
                    scheme=scheme,
                    frf=frf,
                    mean_db=float(sinr_db.mean()),
                    p5_db=float(np.percentile(sinr_db, 5)),
                    p50_db=float(np.percentile(sinr_db, 50)),
                    p95_db=float(np.percentile(sinr_db, 95)),
                )
            )
    return results


@dataclass(frozen=True)
class HandoverSuccessConfig:
    coverage_radius_m: float = 5.0
    crossings: int = 20_000
    seed: int = 0


def lifi_crossing_success_exact(ap_distance_m: float, coverage_radius_m: float) -> float:
    """Closed-form success probability of a straight crossing between two APs.

    A crossing at lateral offset y (uniform over [-r, r]) stays covered iff
    the two circles overlap at that offset, giving sqrt(r^2 - (D/2)^2) / r
    for D <= 2r and 0 beyond.
    """
    r = coverage_radius_m
    if ap_distance_m < 0 or r <= 0:
        raise ValueError("distances must be non-negative and radius positive")
    if ap_distance_m >= 2.0 * r:
        return 0.0
    return math.sqrt(r * r - (ap_distance_m / 2.0) ** 2) / r


def handover_success_experiment(config: HandoverSuccessConfig, spacings: list[float]):
    """Rows of (AP spacing, LiFi-only Monte Carlo success, hybrid success).

    LiFi-only success samples straight-line crossings with a uniform
    lateral offset; the hybrid column is identically 1 because the
    femtocell bridges any coverage hole.
    """
    if not spacings or any(d < 0 for d in spacings):
        raise ValueError("spacings must be non-empty and non-negative")
    gen = spawn_streams(config.seed)["drops"]
    r = config.coverage_radius_m
    rows = []
    for d_apart in spacings:
        offsets = gen.uniform(-r, r, size=config.crossings)
        if d_apart >= 2.0 * r:
            success = np.zeros_like(offsets, dtype=bool)
        else:
            success = offsets**2 <= r * r - (d_apart / 2.0) ** 2
        rows.append((float(d_apart), float(success.mean()), 1.0))
    return rows
