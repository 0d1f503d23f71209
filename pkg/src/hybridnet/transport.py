"""Vehicle-side models: relay capacity, outage and car-to-car link reliability.

A roof-mounted relay terminates the macrocell downlink outside the vehicle
body, removing the vehicle-wall penetration loss; passengers then attach
to an in-vehicle LiFi AP or femtocell. The end-to-end relayed rate is the
minimum of the backhaul and access hops. Outage places log-normal
shadowing on the macro link and compares against separate receiver
thresholds for the in-vehicle user and the relay.

Car-following reliability treats the RF and optical links as availability
predicates: RF is up while the gap is inside the RF range, the optical
link while the heading difference between the two cars stays inside the
receiver field of view. A U-turn sweeps the leader's heading through 180
degrees and back as the follower takes the same turn, producing a
deterministic optical outage window.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from . import channel
from .channel import ObstacleClass, OpticalParams, RfParams
from .protocol import HandoverKind, canonical_sequence


class AccessKind(enum.Enum):
    LIFI = "lifi"
    FAP = "fap"


@dataclass(frozen=True)
class VehicleLink:
    mbs_distance_km: float = 0.5
    relay_mounted: bool = True
    in_vehicle_access: AccessKind = AccessKind.LIFI
    shadowing_sigma_dB: float = 8.0
    sinr_threshold_user_dB: float = 9.0
    sinr_threshold_relay_dB: float = 5.0
    access_horizontal_distance_m: float = 0.0
    access_femto_distance_m: float = 2.0

    def __post_init__(self):
        if self.mbs_distance_km <= 0:
            raise ValueError("MBS distance must be > 0 km")
        if self.shadowing_sigma_dB <= 0:
            raise ValueError("shadowing sigma must be > 0 dB")


@dataclass(frozen=True)
class CarFollowScenario:
    inter_vehicle_distance_m: float = 20.0
    rf_range_m: float = 30.0
    uturn_radius_m: float = 10.0
    speed_kmh: float = 40.0
    owc_fov_semi_angle_deg: float = 30.0
    window_s: float = 30.0
    uturn_start_s: float = 10.0

    def __post_init__(self):
        for v in (self.inter_vehicle_distance_m, self.rf_range_m, self.uturn_radius_m,
                  self.speed_kmh, self.owc_fov_semi_angle_deg, self.window_s):
            if v <= 0:
                raise ValueError("scenario parameters must be positive")


def macro_snr_dB(distance_km, rf: RfParams, obstacle: ObstacleClass):
    """Mean downlink SNR of the macro link over the macro bandwidth."""
    loss = channel.macro_path_loss(distance_km, rf, obstacle)
    return rf.mbs_tx_dBm - loss - rf.noise_dBm(rf.macro_bandwidth_Hz)


def access_capacity_bps(link: VehicleLink, optical: OpticalParams, rf: RfParams) -> float:
    """Capacity of the in-vehicle hop (LiFi AP or femtocell, no interferers)."""
    if link.in_vehicle_access is AccessKind.LIFI:
        gain = channel.optical_channel_gain(
            channel.LinkGeometry(horizontal_distance_m=link.access_horizontal_distance_m), optical
        )
        sinr = channel.optical_sinr(gain, [], optical)
        return channel.shannon_capacity(sinr.linear, optical.bandwidth_Hz)
    rx = rf.fap_tx_dBm - channel.femto_path_loss(link.access_femto_distance_m, rf, wall_count=0)
    sinr = channel.rf_sinr(rx, [], rf.noise_dBm(rf.femto_bandwidth_Hz))
    return channel.shannon_capacity(sinr.linear, rf.femto_bandwidth_Hz)


def vehicle_downlink_capacity(
    link: VehicleLink, optical: OpticalParams | None = None, rf: RfParams | None = None
) -> tuple[float, float]:
    """(direct, relayed) downlink rates in bit/s for one in-vehicle user.

    Direct connectivity pays the vehicle-wall penetration loss; the relayed
    path removes it on the backhaul and is bounded by the in-vehicle access
    hop: ``relayed = min(backhaul, access)``.
    """
    optical = optical if optical is not None else OpticalParams()
    rf = rf if rf is not None else RfParams()
    direct_snr = macro_snr_dB(link.mbs_distance_km, rf, ObstacleClass.VEHICLE_WALL)
    backhaul_snr = macro_snr_dB(link.mbs_distance_km, rf, ObstacleClass.NONE)
    direct = channel.shannon_capacity(channel.db_to_linear(direct_snr), rf.macro_bandwidth_Hz)
    backhaul = channel.shannon_capacity(channel.db_to_linear(backhaul_snr), rf.macro_bandwidth_Hz)
    relayed = min(backhaul, access_capacity_bps(link, optical, rf))
    return float(direct), float(relayed)


def _normal_cdf(x: float) -> float:
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def vehicle_outage(link: VehicleLink, rf: RfParams | None = None) -> tuple[float, float]:
    """(direct, relayed) outage probabilities at one MBS distance.

    Log-normal shadowing with the configured sigma rides on the macro
    link; outage is the probability that the shadowed SNR falls below the
    receiver threshold. The direct path uses the in-vehicle user threshold
    and pays the wall loss; the relayed path uses the relay threshold and
    does not.
    """
    rf = rf if rf is not None else RfParams()
    mean_direct = macro_snr_dB(link.mbs_distance_km, rf, ObstacleClass.VEHICLE_WALL)
    mean_relay = macro_snr_dB(link.mbs_distance_km, rf, ObstacleClass.NONE)
    sigma = link.shadowing_sigma_dB
    p_direct = _normal_cdf((link.sinr_threshold_user_dB - mean_direct) / sigma)
    p_relayed = _normal_cdf((link.sinr_threshold_relay_dB - mean_relay) / sigma)
    return p_direct, p_relayed


def car_link_reliability(scenario: CarFollowScenario, dt_s: float = 1e-3) -> tuple[float, float, float]:
    """(rf_only, owc_only, hybrid) up-time fractions over the window.

    The leader enters the U-turn at ``uturn_start_s`` and sweeps 180
    degrees of heading at constant speed; the follower does the same one
    gap-travel-time later, closing the heading difference again. The
    optical link is down while the difference exceeds the field-of-view
    semi-angle; the hybrid link is up when either component is.
    """
    if dt_s <= 0:
        raise ValueError("time step must be positive")
    speed_mps = scenario.speed_kmh / 3.6
    turn_duration = math.pi * scenario.uturn_radius_m / speed_mps
    follower_delay = scenario.inter_vehicle_distance_m / speed_mps
    t = (np.arange(int(round(scenario.window_s / dt_s))) + 0.5) * dt_s
    t0 = scenario.uturn_start_s
    lead = np.clip((t - t0) / turn_duration, 0.0, 1.0)
    follow = np.clip((t - t0 - follower_delay) / turn_duration, 0.0, 1.0)
    heading_diff_deg = 180.0 * (lead - follow)
    owc_up = heading_diff_deg <= scenario.owc_fov_semi_angle_deg
    rf_up = np.full_like(owc_up, scenario.inter_vehicle_distance_m <= scenario.rf_range_m)
    hybrid_up = rf_up | owc_up
    return float(rf_up.mean()), float(owc_up.mean()), float(hybrid_up.mean())


@dataclass(frozen=True)
class SignalingCount:
    individual_messages: int
    group_messages: int

    @property
    def savings_ratio(self) -> float:
        return 1.0 - self.group_messages / self.individual_messages


def group_handover_signaling(p_users: int, kind: HandoverKind) -> SignalingCount:
    """Message counts for per-user handovers vs one group handover.

    Handing over each of ``p`` onboard users individually costs ``p``
    full protocol runs; the relay performs a single run regardless of the
    passenger count.
    """
    if p_users < 1:
        raise ValueError("at least one user is required")
    steps = len(canonical_sequence(kind))
    return SignalingCount(individual_messages=p_users * steps, group_messages=steps)


# Figure sweeps ------------------------------------------------------------


def capacity_sweep(distances_km, link: VehicleLink | None = None,
                   optical: OpticalParams | None = None, rf: RfParams | None = None):
    """Rows of (distance_km, direct_bps, relayed_bps)."""
    base = link if link is not None else VehicleLink()
    rows = []
    for d in distances_km:
        direct, relayed = vehicle_downlink_capacity(replace(base, mbs_distance_km=float(d)), optical, rf)
        rows.append((float(d), direct, relayed))
    return rows


def outage_sweep(distances_km, link: VehicleLink | None = None, rf: RfParams | None = None):
    """Rows of (distance_km, p_out_direct, p_out_relayed)."""
    base = link if link is not None else VehicleLink()
    rows = []
    for d in distances_km:
        p_direct, p_relayed = vehicle_outage(replace(base, mbs_distance_km=float(d)), rf)
        rows.append((float(d), p_direct, p_relayed))
    return rows


def reliability_sweep(distances_m, scenario: CarFollowScenario | None = None, dt_s: float = 1e-3):
    """Rows of (inter_vehicle_distance_m, rf_only, owc_only, hybrid)."""
    base = scenario if scenario is not None else CarFollowScenario()
    rows = []
    for d in distances_m:
        rf_only, owc_only, hybrid = car_link_reliability(
            replace(base, inter_vehicle_distance_m=float(d)), dt_s
        )
        rows.append((float(d), rf_only, owc_only, hybrid))
    return rows
