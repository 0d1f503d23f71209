"""LiFi grid planning and the four-zone partition of a room.

A rectangular room of size ``a x b`` is covered by a grid of LiFi APs with
circular coverage of radius ``r``. The room splits into four zones:

  Z1  femto-only area (LiFi coverage hole),
  Z2  central LiFi coverage (inner disk of radius ``r - l_z/2``),
  Z3  LiFi edge coverage reached by exactly one AP,
  Z4  area covered by two or more LiFi APs (the high-interference lenses).

The closed-form zone areas evaluate the published expressions verbatim;
they are approximations (the pairwise-overlap term is counted once per AP
rather than once per adjacent pair, and wall clipping is ignored), so their
sum equals ``a*b + A_Z4`` instead of ``a*b``. The Monte Carlo model and the
exact point classifier are the geometric ground truth; downstream
probability consumers use the Monte Carlo zone probabilities.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .rng import substreams

_MC_CHUNK = 1 << 18


class Zone(enum.Enum):
    Z1 = 1
    Z2 = 2
    Z3 = 3
    Z4 = 4


@dataclass(frozen=True)
class GridPlan:
    """AP grid geometry for one room; build with :func:`plan_grid`."""

    room_x_m: float
    room_y_m: float
    coverage_radius_m: float
    n_x: int
    n_y: int
    d_x_m: float
    d_y_m: float
    l_x_m: float
    l_y_m: float
    ap_centers: tuple[tuple[float, float], ...]
    fap_center: tuple[float, float]

    @property
    def ap_count(self) -> int:
        return len(self.ap_centers)

    @property
    def overlap_depth_m(self) -> float:
        """l_z, the larger of the two per-axis overlap depths."""
        return max(self.l_x_m, self.l_y_m)

    @property
    def inner_radius_m(self) -> float:
        """Radius of the Zone 2 disk around each AP."""
        return self.coverage_radius_m - self.overlap_depth_m / 2.0

    def centers_array(self) -> np.ndarray:
        return np.asarray(self.ap_centers, dtype=float)


def plan_grid(a: float, b: float, r: float) -> GridPlan:
    """Lay out the densest regular AP grid for an ``a x b`` room.

    Per-axis AP count is ``floor(a/2r + 1)``, pitch ``a / floor((a+2r)/2r)``
    and overlap depth ``(2 r n - a) / n``; the first row/column center sits
    ``r - l/2`` from the wall so overhang is symmetric. The femtocell AP is
    placed at the room center.
    """
    if a <= 0 or b <= 0 or r <= 0:
        raise ValueError("room dimensions and coverage radius must be positive")
    n_x = math.floor(a / (2.0 * r) + 1.0)
    n_y = math.floor(b / (2.0 * r) + 1.0)
    d_x = a / math.floor((a + 2.0 * r) / (2.0 * r))
    d_y = b / math.floor((b + 2.0 * r) / (2.0 * r))
    l_x = (2.0 * r * n_x - a) / n_x
    l_y = (2.0 * r * n_y - b) / n_y
    xs = [(r - l_x / 2.0) + i * (2.0 * r - l_x) for i in range(n_x)]
    ys = [(r - l_y / 2.0) + j * (2.0 * r - l_y) for j in range(n_y)]
    centers = tuple((x, y) for y in ys for x in xs)  # row-major
    return GridPlan(
        room_x_m=a, room_y_m=b, coverage_radius_m=r,
        n_x=n_x, n_y=n_y, d_x_m=d_x, d_y_m=d_y, l_x_m=l_x, l_y_m=l_y,
        ap_centers=centers, fap_center=(a / 2.0, b / 2.0),
    )


def min_ap_count(a: float, b: float, r: float) -> int:
    """Sparsest grid that still tiles the room: floor(a/2r) * floor(b/2r)."""
    if a <= 0 or b <= 0 or r <= 0:
        raise ValueError("room dimensions and coverage radius must be positive")
    return math.floor(a / (2.0 * r)) * math.floor(b / (2.0 * r))


def circle_segment_integral(r: float, overlap: float) -> float:
    """Closed form of ``integral_{r-l/2}^{r} sqrt(r^2 - x^2) dx``."""

    def antiderivative(x: float) -> float:
        return x * math.sqrt(max(r * r - x * x, 0.0)) / 2.0 + (r * r / 2.0) * math.asin(min(max(x / r, -1.0), 1.0))

    return antiderivative(r) - antiderivative(r - overlap / 2.0)


def analytic_zone_areas(plan: GridPlan) -> tuple[float, float, float, float]:
    """Closed-form zone areas (A_Z1, A_Z2, A_Z3, A_Z4) in m^2.

    Evaluated verbatim; the documented residual is
    ``A_Z1 + A_Z2 + A_Z3 + A_Z4 == a*b + A_Z4``.
    """
    a, b, r = plan.room_x_m, plan.room_y_m, plan.coverage_radius_m
    n = plan.n_x * plan.n_y
    seg = circle_segment_integral(r, plan.l_x_m) + circle_segment_integral(r, plan.l_y_m)
    a_z4 = 4.0 * n * seg
    a_z1 = a * b - n * math.pi * r * r + a_z4
    a_z2 = n * math.pi * plan.inner_radius_m**2
    a_z3 = n * math.pi * r * r - a_z2 - a_z4
    return a_z1, a_z2, a_z3, a_z4


def classify_points(plan: GridPlan, points: np.ndarray) -> np.ndarray:
    """Zone codes (1..4) for an (N, 2) array of in-room points.

    Precedence: two or more covering APs make Z4 regardless of the inner
    disk; a single covering AP splits Z2/Z3 on the inner radius; no
    coverage is Z1.
    """
    pts = np.asarray(points, dtype=float)
    a, b = plan.room_x_m, plan.room_y_m
    if np.any(pts[:, 0] < 0) or np.any(pts[:, 0] > a) or np.any(pts[:, 1] < 0) or np.any(pts[:, 1] > b):
        raise ValueError("point outside the room rectangle")
    centers = plan.centers_array()
    r2 = plan.coverage_radius_m**2
    inner2 = plan.inner_radius_m**2
    d2 = ((pts[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    covered = d2 <= r2
    n_cov = covered.sum(axis=1)
    d2_min = d2.min(axis=1)
    codes = np.where(n_cov >= 2, 4, np.where(n_cov == 0, 1, np.where(d2_min <= inner2, 2, 3)))
    return codes.astype(np.int8)


def classify_point(plan: GridPlan, point: tuple[float, float]) -> Zone:
    """Zone of a single point inside the room."""
    code = classify_points(plan, np.asarray([point], dtype=float))[0]
    return Zone(int(code))


@dataclass(frozen=True)
class ZoneModel:
    """Zone areas and occupancy probabilities for one grid plan.

    ``zone_probs`` and ``mc_areas_m2`` close the partition on Z4, so each
    4-tuple sums (left to right) to exactly 1.0 and exactly ``a*b``; the
    integer ``sample_counts`` are the raw classification tallies.
    """

    plan: GridPlan
    analytic_areas_m2: tuple[float, float, float, float]
    mc_areas_m2: tuple[float, float, float, float]
    zone_probs: tuple[float, float, float, float]
    sample_counts: tuple[int, int, int, int]
    sample_count: int
    seed: int

    def prob(self, zone: Zone) -> float:
        return self.zone_probs[zone.value - 1]

    def csv_rows(self) -> list[tuple[str, float, float, float]]:
        """(zone, analytic_area, mc_area, probability) per zone."""
        return [
            (zone.name, self.analytic_areas_m2[i], self.mc_areas_m2[i], self.zone_probs[i])
            for i, zone in enumerate(Zone)
        ]


def monte_carlo_zone_model(plan: GridPlan, sample_count: int = 10**6, seed: int = 0) -> ZoneModel:
    """Estimate zone areas by classifying uniform samples over the room.

    Sampling is sharded into fixed-size chunks with independent substreams
    spawned from the seed and merged in shard order, so results are
    reproducible and memory-bounded. Requires at least 10^4 samples.
    """
    if sample_count < 10**4:
        raise ValueError("sample_count must be at least 10^4")
    a, b = plan.room_x_m, plan.room_y_m
    n_chunks = (sample_count + _MC_CHUNK - 1) // _MC_CHUNK
    counts = np.zeros(4, dtype=np.int64)
    remaining = sample_count
    for gen in substreams(seed, n_chunks):
        n = min(_MC_CHUNK, remaining)
        remaining -= n
        pts = gen.random((n, 2))
        pts[:, 0] *= a
        pts[:, 1] *= b
        codes = classify_points(plan, pts)
        counts += np.bincount(codes, minlength=5)[1:5]
    c = [int(v) for v in counts]
    # Close the partition on Z4: the first three probabilities are the
    # exact count ratios and the last is 1 minus their running float sum,
    # which makes the left-to-right sum land on exactly 1.0.
    p1, p2, p3 = c[0] / sample_count, c[1] / sample_count, c[2] / sample_count
    p4 = 1.0 - ((p1 + p2) + p3)
    ab = a * b
    m1, m2, m3 = p1 * ab, p2 * ab, p3 * ab
    m4 = ab - ((m1 + m2) + m3)
    return ZoneModel(
        plan=plan,
        analytic_areas_m2=analytic_zone_areas(plan),
        mc_areas_m2=(m1, m2, m3, m4),
        zone_probs=(p1, p2, p3, p4),
        sample_counts=(c[0], c[1], c[2], c[3]),
        sample_count=sample_count,
        seed=seed,
    )


def occupancy_probability(p_users: int, zone_prob: float, m: int) -> float:
    """Probability that exactly ``m`` of ``p_users`` fall in a zone.

    Binomial point mass ``C(p, m) q^m (1-q)^(p-m)`` with ``q`` the zone
    occupancy probability.
    """
    if not 0.0 <= zone_prob <= 1.0:
        raise ValueError("zone probability must lie in [0, 1]")
    if m < 0 or p_users < 0 or m > p_users:
        raise ValueError("need 0 <= m <= p_users")
    return math.comb(p_users, m) * zone_prob**m * (1.0 - zone_prob) ** (p_users - m)
