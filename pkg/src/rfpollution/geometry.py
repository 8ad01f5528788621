"""Regular hexagonal site layout around a serving gNB at the origin."""

from __future__ import annotations

import math
from dataclasses import dataclass

from rfpollution.exceptions import ConfigurationError
from rfpollution.units import Meters

HEX_ZETA = math.sqrt(3.0) / 2.0


@dataclass(frozen=True)
class SitePosition:
    x: Meters
    y: Meters

    @property
    def distance(self) -> Meters:
        return math.hypot(self.x, self.y)


@dataclass(frozen=True)
class LayoutSpec:
    """Overlap parameter ``zeta`` (inter-site distance is 2*zeta*d_max) and
    the number of neighbor rings placed around the serving site."""

    zeta: float = HEX_ZETA
    neighbor_levels: int = 1

    def __post_init__(self):
        if not 0.0 < self.zeta < 1.0:
            raise ConfigurationError(f"zeta must lie in (0, 1), got {self.zeta}")
        if self.neighbor_levels not in (0, 1, 2):
            raise ConfigurationError(f"neighbor_levels must be 0, 1 or 2, got {self.neighbor_levels}")


def inter_site_distance(d_max: Meters, zeta: float) -> Meters:
    if not d_max > 0:
        raise ValueError(f"d_max must be positive, got {d_max}")
    return 2.0 * zeta * d_max


def _ring(radius: float, phase_deg: float) -> list[SitePosition]:
    out = []
    for k in range(6):
        a = math.radians(phase_deg + 60.0 * k)
        out.append(SitePosition(radius * math.cos(a), radius * math.sin(a)))
    return out


def hex_neighbors(d_max: Meters, spec: LayoutSpec) -> list[SitePosition]:
    """Neighbor sites of the triangular lattice, nearest rings first.

    Level 1 is the 6 sites at d_site; level 2 adds 6 at sqrt(3)*d_site
    (offset 30 deg) and 6 at 2*d_site.
    """
    d_site = inter_site_distance(d_max, spec.zeta)
    sites: list[SitePosition] = []
    if spec.neighbor_levels >= 1:
        sites += _ring(d_site, 0.0)
    if spec.neighbor_levels >= 2:
        sites += _ring(math.sqrt(3.0) * d_site, 30.0)
        sites += _ring(2.0 * d_site, 0.0)
    return sites


def in_coverage(p: SitePosition, d_min: Meters, d_max: Meters) -> bool:
    if not d_min < d_max:
        raise ConfigurationError(f"d_min ({d_min}) must be smaller than d_max ({d_max})")
    return d_min <= p.distance <= d_max
