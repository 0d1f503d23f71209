"""Downlink link-budget models for the optical and RF parts of the network.

Optical side: Lambertian line-of-sight channel gain with an idealized
concentrator, electrical-domain SINR (signal and interference terms enter
squared) and Shannon capacity. RF side: Okumura-Hata macrocell path loss
with the mobile-antenna correction term and per-obstacle wall penetration,
plus the indoor femtocell model ``20 log f + N log z + 4 q^2 - 28``.

Conventions:
  * the LiFi AP points straight down and the photodetector straight up, so
    the irradiation and incidence angles coincide and
    ``cos(theta) = h / sqrt(l^2 + h^2)``;
  * macro distances are in km, femto distances in m, frequencies in MHz;
  * dB/linear conversion is always ``10 * log10``.

All functions are pure and accept floats or numpy arrays for the distance
arguments.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np


def linear_to_db(x):
    """10*log10, with 0 mapping to -inf."""
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(x)


def db_to_linear(x_db):
    return np.power(10.0, np.asarray(x_db, dtype=float) / 10.0)


def dbm_to_mw(p_dbm):
    return np.power(10.0, np.asarray(p_dbm, dtype=float) / 10.0)


class ObstacleClass(enum.Enum):
    NONE = "none"
    BUILDING_WALL = "building_wall"
    VEHICLE_WALL = "vehicle_wall"


@dataclass(frozen=True)
class OpticalParams:
    """LiFi AP / photodetector constants.

    Defaults are the indoor evaluation values: a 60 degree half-intensity
    LED 3 m above the floor, a 1 cm^2 detector at 1 m (so 2 m of vertical
    separation), 6 W of optical power and a 20 MHz modulated band.
    """

    half_intensity_angle_deg: float = 60.0
    fov_semi_angle_deg: float = 90.0
    pd_area_m2: float = 1e-4
    filter_gain: float = 1.0
    refractive_index: float = 1.5
    tx_optical_power_W: float = 6.0
    responsivity_A_per_W: float = 0.53
    noise_psd_A2_per_Hz: float = 1e-21
    bandwidth_Hz: float = 20e6
    ap_height_m: float = 2.0

    def __post_init__(self):
        positive = (
            self.pd_area_m2, self.filter_gain, self.refractive_index,
            self.tx_optical_power_W, self.responsivity_A_per_W,
            self.noise_psd_A2_per_Hz, self.bandwidth_Hz, self.ap_height_m,
        )
        if any(v <= 0 for v in positive):
            raise ValueError("optical parameters must be strictly positive")
        if not 0.0 < self.fov_semi_angle_deg <= 90.0:
            raise ValueError("FOV semi-angle must lie in (0, 90] degrees")
        if not 0.0 < self.half_intensity_angle_deg < 90.0:
            raise ValueError("half-intensity angle must lie in (0, 90) degrees")


@dataclass(frozen=True)
class RfParams:
    """Macrocell and femtocell RF constants (powers in dBm, f in MHz)."""

    center_freq_MHz: float = 1800.0
    mbs_height_m: float = 50.0
    terminal_height_m: float = 1.0
    mbs_tx_dBm: float = 46.0
    fap_tx_dBm: float = 7.0
    building_wall_loss_dB: float = 20.0
    vehicle_wall_loss_dB: float = 10.0
    femto_loss_coeff: float = 28.0
    wall_count: int = 0
    noise_psd_dBm_per_Hz: float = -174.0
    macro_bandwidth_Hz: float = 10e6
    femto_bandwidth_Hz: float = 10e6

    def __post_init__(self):
        if self.mbs_height_m <= 0 or self.terminal_height_m <= 0:
            raise ValueError("antenna heights must be positive")
        if self.macro_bandwidth_Hz <= 0 or self.femto_bandwidth_Hz <= 0:
            raise ValueError("bandwidths must be positive")
        if self.center_freq_MHz <= 0:
            raise ValueError("center frequency must be positive (MHz)")

    def wall_loss_dB(self, obstacle: ObstacleClass) -> float:
        if obstacle is ObstacleClass.BUILDING_WALL:
            return self.building_wall_loss_dB
        if obstacle is ObstacleClass.VEHICLE_WALL:
            return self.vehicle_wall_loss_dB
        return 0.0

    def noise_dBm(self, bandwidth_Hz: float) -> float:
        """Thermal noise power over a bandwidth."""
        return self.noise_psd_dBm_per_Hz + 10.0 * math.log10(bandwidth_Hz)


@dataclass(frozen=True)
class LinkGeometry:
    """Relative geometry of one link.

    ``vertical_offset_m`` of None falls back to the AP height carried by
    the optical parameters.
    """

    horizontal_distance_m: float = 0.0
    vertical_offset_m: float | None = None
    obstacle_class: ObstacleClass = ObstacleClass.NONE

    def __post_init__(self):
        if np.any(np.asarray(self.horizontal_distance_m) < 0):
            raise ValueError("horizontal distance must be >= 0")
        if self.vertical_offset_m is not None and self.vertical_offset_m < 0:
            raise ValueError("vertical offset must be >= 0")


def lambertian_index(half_intensity_angle_deg: float) -> float:
    """Emission order of a Lambertian LED: ln 2 / ln(1 / cos(theta_1/2)).

    A 60 degree half-intensity angle gives order 1 (the plain Lambertian
    source); narrower beams give larger orders.
    """
    if not 0.0 < half_intensity_angle_deg < 90.0:
        raise ValueError("half-intensity angle must lie in (0, 90) degrees")
    return math.log(2.0) / math.log(1.0 / math.cos(math.radians(half_intensity_angle_deg)))


def concentrator_gain(incidence_angle_deg, params: OpticalParams):
    """Idealized concentrator gain: n^2 / sin^2(FOV) inside the FOV, else 0."""
    angle = np.asarray(incidence_angle_deg, dtype=float)
    if np.any(angle < 0):
        raise ValueError("incidence angle must be >= 0")
    in_fov = angle <= params.fov_semi_angle_deg
    g = params.refractive_index**2 / math.sin(math.radians(params.fov_semi_angle_deg)) ** 2
    out = np.where(in_fov, g, 0.0)
    return float(out) if np.isscalar(incidence_angle_deg) else out


def optical_channel_gain(geometry: LinkGeometry, params: OpticalParams):
    """LOS optical channel gain for a down-facing AP over an up-facing PD.

    Returns ``(m+1) A / (2 pi d^2) * g * T_s * cos^m(phi) * cos(theta)``
    with ``d^2 = l^2 + h^2`` when the incidence angle is inside the FOV,
    and exactly 0 beyond it. ``horizontal_distance_m`` may be an array.
    """
    h = params.ap_height_m if geometry.vertical_offset_m is None else geometry.vertical_offset_m
    if h <= 0:
        raise ValueError("degenerate geometry: AP and receiver planes coincide")
    l = np.asarray(geometry.horizontal_distance_m, dtype=float)
    m = lambertian_index(params.half_intensity_angle_deg)
    d2 = l * l + h * h
    cos_theta = h / np.sqrt(d2)
    # In-FOV test on cosines: theta <= FOV  <=>  cos(theta) >= cos(FOV).
    cos_fov = math.cos(math.radians(params.fov_semi_angle_deg))
    g = concentrator_gain(0.0, params)  # constant inside the FOV
    gain = (m + 1.0) * params.pd_area_m2 / (2.0 * math.pi * d2)
    gain = gain * g * params.filter_gain * cos_theta**m * cos_theta
    out = np.where(cos_theta >= cos_fov, gain, 0.0)
    return float(out) if np.isscalar(geometry.horizontal_distance_m) else out


class SinrResult(tuple):
    """(linear, dB) pair; dB is -inf when the linear ratio is 0."""

    __slots__ = ()

    def __new__(cls, linear: float):
        db = 10.0 * math.log10(linear) if linear > 0 else float("-inf")
        return super().__new__(cls, (linear, db))

    @property
    def linear(self) -> float:
        return self[0]

    @property
    def db(self) -> float:
        return self[1]


def optical_sinr(serving_gain: float, interferer_gains, params: OpticalParams) -> SinrResult:
    """Electrical-domain SINR: squared signal over noise plus squared interference.

    Signal and each interference term are ``(responsivity * P_t * H)^2``;
    the noise floor is ``N_0 * B_o``.
    """
    if serving_gain < 0 or any(g < 0 for g in interferer_gains):
        raise ValueError("channel gains must be >= 0")
    if serving_gain == 0.0:
        return SinrResult(0.0)
    scale = params.responsivity_A_per_W * params.tx_optical_power_W
    signal = (scale * serving_gain) ** 2
    interference = sum((scale * g) ** 2 for g in interferer_gains)
    noise = params.noise_psd_A2_per_Hz * params.bandwidth_Hz
    return SinrResult(signal / (noise + interference))


def shannon_capacity(sinr_linear, bandwidth_Hz):
    """Achievable rate B * log2(1 + SINR) in bit/s."""
    sinr = np.asarray(sinr_linear, dtype=float)
    if np.any(sinr < 0):
        raise ValueError("SINR must be >= 0")
    out = bandwidth_Hz * np.log2(1.0 + sinr)
    return float(out) if np.isscalar(sinr_linear) else out


def macro_path_loss(distance_km, rf: RfParams, obstacle: ObstacleClass = ObstacleClass.NONE):
    """Okumura-Hata urban path loss in dB, plus obstacle wall penetration.

    ``distance_km`` may be a float or array; every entry must be > 0.
    """
    d = np.asarray(distance_km, dtype=float)
    if np.any(d <= 0):
        raise ValueError("macro distance must be > 0 km")
    log_f = math.log10(rf.center_freq_MHz)
    log_hb = math.log10(rf.mbs_height_m)
    a_hm = 1.1 * (log_f - 0.7) * rf.terminal_height_m - (1.56 * log_f - 0.8)
    loss = (
        69.55
        + 26.16 * log_f
        - 13.82 * log_hb
        - a_hm
        + (44.9 - 6.55 * log_hb) * np.log10(d)
        + rf.wall_loss_dB(obstacle)
    )
    return float(loss) if np.isscalar(distance_km) else loss


def femto_path_loss(distance_m, rf: RfParams, wall_count: int | None = None):
    """Indoor femtocell path loss ``20 log f + N log z + 4 q^2 - 28`` in dB."""
    z = np.asarray(distance_m, dtype=float)
    if np.any(z <= 0):
        raise ValueError("femto distance must be > 0 m")
    q = rf.wall_count if wall_count is None else wall_count
    loss = 20.0 * math.log10(rf.center_freq_MHz) + rf.femto_loss_coeff * np.log10(z) + 4.0 * q * q - 28.0
    return float(loss) if np.isscalar(distance_m) else loss


def rf_sinr(serving_rx_dBm: float, interferer_rx_dBm, noise_dBm: float) -> SinrResult:
    """Compose received powers into an SINR: linear signal over noise plus interference."""
    if not math.isfinite(serving_rx_dBm) or not math.isfinite(noise_dBm):
        raise ValueError("powers must be finite dBm values")
    signal_mw = 10.0 ** (serving_rx_dBm / 10.0)
    interference_mw = sum(10.0 ** (p / 10.0) for p in interferer_rx_dBm)
    noise_mw = 10.0 ** (noise_dBm / 10.0)
    return SinrResult(signal_mw / (noise_mw + interference_mw))
