"""Radiated-power policies and the point-source power-density check."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Union

import numpy as np

from rfpollution.exceptions import ConfigurationError
from rfpollution.propagation import PropagationParams
from rfpollution.units import Db, Dbm, Meters, Watts, db_to_linear, dbm_to_watts

if TYPE_CHECKING:
    from rfpollution.closed_form import Deployment
    from rfpollution.simulator import PixelGrid


@dataclass(frozen=True)
class MspConfig:
    """Minimum-sensitivity policy: guarantee ``p_th_dbm`` at the cell edge."""

    p_th_dbm: Dbm

    def __post_init__(self):
        if not math.isfinite(self.p_th_dbm):
            raise ConfigurationError("p_th_dbm must be finite")

    @property
    def p_th(self) -> Watts:
        return dbm_to_watts(self.p_th_dbm)


@dataclass(frozen=True)
class ElpConfig:
    """Exposure-limit policy: saturate ``s_max`` at the exclusion-zone edge."""

    s_max: float = 0.1
    g_tx_db: Db = 15.0
    l_tx_db: Db = 2.32

    def __post_init__(self):
        if not self.s_max > 0:
            raise ConfigurationError(f"s_max must be positive, got {self.s_max}")
        if not (math.isfinite(self.g_tx_db) and math.isfinite(self.l_tx_db)):
            raise ConfigurationError("g_tx_db and l_tx_db must be finite")


@dataclass(frozen=True)
class SpsConfig:
    """Spectrum-based policy: ``p_f_dbm`` per 10 MHz times the bandwidth.

    There is deliberately no default bandwidth.
    """

    p_f_dbm: Dbm
    b_mhz: float

    def __post_init__(self):
        if not self.b_mhz > 0:
            raise ConfigurationError(f"bandwidth must be positive, got {self.b_mhz}")
        if not math.isfinite(self.p_f_dbm):
            raise ConfigurationError("p_f_dbm must be finite")


PowerPolicy = Union[MspConfig, ElpConfig, SpsConfig]


def policy_name(policy: PowerPolicy) -> str:
    if isinstance(policy, MspConfig):
        return "msp"
    if isinstance(policy, ElpConfig):
        return "elp"
    if isinstance(policy, SpsConfig):
        return "sps"
    raise ConfigurationError(f"unknown power policy {policy!r}")


def msp_power(cfg: MspConfig, d_max: Meters, params: PropagationParams) -> Watts:
    if not d_max > 0:
        raise ValueError(f"d_max must be positive, got {d_max}")
    return cfg.p_th * d_max**params.gamma * params.frequency_loss


def elp_power(cfg: ElpConfig, d_min: Meters) -> Watts:
    if not d_min > 0:
        raise ValueError(f"d_min must be positive, got {d_min}")
    return 4.0 * math.pi * d_min**2 * cfg.s_max * db_to_linear(cfg.l_tx_db) / db_to_linear(cfg.g_tx_db)


def sps_power(cfg: SpsConfig) -> Watts:
    return dbm_to_watts(cfg.p_f_dbm) * cfg.b_mhz / 10.0


def pd_point_source(pe: Watts, cfg: ElpConfig, d):
    """Point-source power density [W/m^2] at distance ``d`` (scalar or array)."""
    d_arr = np.asarray(d, dtype=float)
    if np.any(d_arr <= 0):
        raise ValueError("distance must be positive")
    pd = pe * db_to_linear(cfg.g_tx_db) / (4.0 * math.pi * db_to_linear(cfg.l_tx_db) * d_arr**2)
    return float(pd) if pd.ndim == 0 else pd


@dataclass(frozen=True)
class ComplianceReport:
    max_pd: float
    s_max: float
    worst_pixel: tuple[float, float]
    worst_distance: float
    n_sources: int

    @property
    def passed(self) -> bool:
        return self.max_pd <= self.s_max

    @property
    def margin(self) -> float:
        """s_max minus the worst total PD (negative when non-compliant)."""
        return self.s_max - self.max_pd

    def as_dict(self) -> dict:
        return {
            "max_pd_w_m2": self.max_pd,
            "s_max_w_m2": self.s_max,
            "margin_w_m2": self.margin,
            "worst_pixel_m": list(self.worst_pixel),
            "worst_distance_m": self.worst_distance,
            "n_sources": self.n_sources,
            "passed": self.passed,
        }


def verify_elp_compliance(deployment: Deployment, grid: PixelGrid) -> ComplianceReport:
    """Sum serving and neighbor point-source PD over every unmasked pixel.

    The full per-pixel sum is checked, not only the serving-gNB condition
    at ``d_min`` that the ELP power rule is sized against.
    """
    from rfpollution.closed_form import emitted_power

    if not isinstance(deployment.policy, ElpConfig):
        raise ConfigurationError("ELP compliance requires a deployment using the ELP policy")
    cfg = deployment.policy
    pe = emitted_power(deployment)
    rows, cols = np.nonzero(grid.mask)
    x = grid.x_centers[cols]
    y = grid.y_centers[rows]
    if x.size == 0:
        raise ConfigurationError("grid has no unmasked pixels")
    # Same scale factor for every source, so accumulate 1/d^2 first.
    inv_sq = 1.0 / (x**2 + y**2)
    for site in grid.neighbors:
        inv_sq = inv_sq + 1.0 / ((x - site.x) ** 2 + (y - site.y) ** 2)
    scale = pe * db_to_linear(cfg.g_tx_db) / (4.0 * math.pi * db_to_linear(cfg.l_tx_db))
    pd = scale * inv_sq
    k = int(np.argmax(pd))
    return ComplianceReport(
        max_pd=float(pd[k]),
        s_max=cfg.s_max,
        worst_pixel=(float(x[k]), float(y[k])),
        worst_distance=float(math.hypot(x[k], y[k])),
        n_sources=1 + len(grid.neighbors),
    )
