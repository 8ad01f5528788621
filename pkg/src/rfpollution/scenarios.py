"""Scenario presets, comparison pipeline and parameter sweeps."""

from __future__ import annotations

import copy
import time
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Optional, Sequence

from rfpollution import simulator
from rfpollution.closed_form import (
    SCENARIO_IDS,
    ComparisonSpec,
    cell_rfp,
    emitted_power,
    fixed_rfp,
    neighbor_rfp_ub,
    total_cell_rfp,
    total_fixed_rfp,
)
from rfpollution.exceptions import ConfigurationError
from rfpollution.geometry import HEX_ZETA
from rfpollution.schema import DEPLOYMENT_KEYS, deployment_from_dict
from rfpollution.units import dbm_to_watts

POLICIES = ("msp", "elp", "sps")
METHODS = ("model", "simulation")
FCC_P_F_DBM = 47.0


@dataclass(frozen=True)
class ScenarioPreset:
    """Parameter bundle for one deployment pair. Pairs are (dep1, dep2)."""

    id: str
    d_max: tuple[float, float]
    gamma: tuple[float, float]
    f_ghz: tuple[float, float]
    p_th_dbm: tuple[float, float]
    d_min: float = 15.0
    eta: float = 2.0
    c_db: float = 32.4
    zeta: float = HEX_ZETA
    s_max: float = 0.1
    g_tx_db: float = 15.0
    l_tx_db: float = 2.32
    p_f_dbm: float = FCC_P_F_DBM
    b_mhz: Optional[tuple[float, float]] = None

    @property
    def delta_d_max(self) -> float:
        return self.d_max[0] / self.d_max[1]

    @property
    def delta_f(self) -> float:
        return self.f_ghz[0] / self.f_ghz[1]

    @property
    def delta_p_th(self) -> float:
        return dbm_to_watts(self.p_th_dbm[0]) / dbm_to_watts(self.p_th_dbm[1])

    @property
    def delta_c(self) -> float:
        return 1.0

    @property
    def delta_area(self) -> float:
        return (self.d_max[0] ** 2 - self.d_min**2) / (self.d_max[1] ** 2 - self.d_min**2)

    @property
    def delta_b(self) -> float:
        if self.b_mhz is None:
            raise ConfigurationError(f"{self.id}: no SPS bandwidths configured")
        return self.b_mhz[0] / self.b_mhz[1]

    def deployment_dict(self, k: int, policy: str, n_i: int = 0) -> dict[str, Any]:
        """Wire-format dict for deployment ``k`` (1 or 2)."""
        i = k - 1
        d: dict[str, Any] = {
            "d_min_m": self.d_min,
            "d_max_m": self.d_max[i],
            "gamma": self.gamma[i],
            "f_ghz": self.f_ghz[i],
            "eta": self.eta,
            "c_db": self.c_db,
            "zeta": self.zeta,
            "n_i": n_i,
            "policy": policy,
            "p_th_dbm": self.p_th_dbm[i],
            "s_max_w_m2": self.s_max,
            "g_tx_db": self.g_tx_db,
            "l_tx_db": self.l_tx_db,
            "p_f_dbm": self.p_f_dbm,
            "b_mhz": None if self.b_mhz is None else self.b_mhz[i],
        }
        return d


PRESETS: dict[str, ScenarioPreset] = {
    "S1": ScenarioPreset("S1", d_max=(500.0, 250.0), gamma=(3.0, 3.0), f_ghz=(0.7, 0.7), p_th_dbm=(-90.0, -90.0)),
    "S2": ScenarioPreset("S2", d_max=(500.0, 100.0), gamma=(3.0, 2.1), f_ghz=(0.7, 0.7), p_th_dbm=(-90.0, -90.0)),
    "S3": ScenarioPreset("S3", d_max=(500.0, 250.0), gamma=(3.0, 3.0), f_ghz=(0.7, 3.7), p_th_dbm=(-90.0, -90.0)),
    "S4": ScenarioPreset("S4", d_max=(500.0, 500.0), gamma=(3.0, 3.0), f_ghz=(0.7, 3.7), p_th_dbm=(-90.0, -87.0)),
    "S5": ScenarioPreset("S5", d_max=(500.0, 50.0), gamma=(3.0, 2.1), f_ghz=(0.7, 3.7), p_th_dbm=(-90.0, -87.0)),
}


def preset(scenario_id: str) -> ScenarioPreset:
    key = str(scenario_id).upper()
    if key not in PRESETS:
        raise ConfigurationError(f"unknown scenario {scenario_id!r} (expected one of {', '.join(SCENARIO_IDS)})")
    return PRESETS[key]


def build_comparison(
    p: ScenarioPreset,
    policy: str,
    n_i: int = 0,
    overrides: Optional[Mapping[str, Any]] = None,
) -> ComparisonSpec:
    """Merge ``overrides`` (pair-document shape) over the preset.

    Unless given explicitly, each fixed distance is that deployment's
    ``d_min + 1`` m, so overriding ``dep2.d_min_m`` moves ``d_fx2`` with it.
    """
    policy = policy.lower()
    if policy not in POLICIES:
        raise ConfigurationError(f"unknown policy {policy!r} (expected msp, elp or sps)")
    overrides = dict(overrides or {})
    deps = []
    for k in (1, 2):
        d = p.deployment_dict(k, policy, n_i)
        extra = overrides.get(f"dep{k}") or {}
        bad = set(extra) - DEPLOYMENT_KEYS
        if bad:
            raise ConfigurationError(f"dep{k}: unknown keys {sorted(bad)}")
        d.update(copy.deepcopy(dict(extra)))
        deps.append(deployment_from_dict(d, f"{p.id} dep{k}"))
    return ComparisonSpec(
        dep1=deps[0],
        dep2=deps[1],
        d_fx1=overrides.get("d_fx1_m"),
        d_fx2=overrides.get("d_fx2_m"),
        epsilon=float(overrides.get("epsilon_m", 1.0)),
    )


@dataclass
class ComparisonReport:
    scenario: str
    policy: str
    n_i: int
    method: str
    fixed_ratio: float
    cell_ratio: float
    pe1_w: float
    pe2_w: float
    cell1_w: float
    cell2_w: float
    fx1_w: float
    fx2_w: float
    d_min1_m: float
    d_min2_m: float
    d_fx1_m: float
    d_fx2_m: float
    neighbor_levels: int
    pixel_size_m: Optional[float] = None
    runtime_s: float = field(default=0.0, compare=False)

    CSV_FIELDS = ("scenario", "policy", "n_i", "method", "fixed_ratio", "cell_ratio",
                  "pe1_w", "pe2_w", "cell1_w", "cell2_w", "fx1_w", "fx2_w",
                  "d_min1_m", "d_min2_m", "d_fx1_m", "d_fx2_m", "neighbor_levels", "pixel_size_m")

    def as_dict(self) -> dict[str, Any]:
        """Data fields only; run metadata (runtime) is kept out."""
        return {
            "scenario": self.scenario,
            "policy": self.policy,
            "n_i": self.n_i,
            "method": self.method,
            "fixed_ratio": self.fixed_ratio,
            "cell_ratio": self.cell_ratio,
            "pe1_w": self.pe1_w,
            "pe2_w": self.pe2_w,
            "cell1_w": self.cell1_w,
            "cell2_w": self.cell2_w,
            "fx1_w": self.fx1_w,
            "fx2_w": self.fx2_w,
            "d_min1_m": self.d_min1_m,
            "d_min2_m": self.d_min2_m,
            "d_fx1_m": self.d_fx1_m,
            "d_fx2_m": self.d_fx2_m,
            "neighbor_levels": self.neighbor_levels,
            "pixel_size_m": self.pixel_size_m,
        }


def _check_method(method: str) -> str:
    method = method.lower()
    if method not in METHODS:
        raise ConfigurationError(f"unknown method {method!r} (expected model or simulation)")
    return method


def compare(
    spec: ComparisonSpec,
    method: str = "model",
    *,
    scenario: str = "custom",
    neighbor_levels: Optional[int] = None,
    pixel_size: float = 1.0,
    workers: int = 1,
) -> ComparisonReport:
    """Model or simulated RFP ratios for an arbitrary deployment pair."""
    method = _check_method(method)
    t0 = time.perf_counter()
    dep1, dep2 = spec.dep1, spec.dep2
    if neighbor_levels is None:
        neighbor_levels = 1 if dep1.n_i > 0 else 0
    if method == "model":
        if neighbor_levels not in (0, 1) or (neighbor_levels == 1) != (dep1.n_i > 0):
            raise ConfigurationError("the closed-form model only covers n_i=0 or first-level neighbors (n_i=6)")
        cell1, cell2 = total_cell_rfp(dep1), total_cell_rfp(dep2)
        fx1, fx2 = total_fixed_rfp(dep1, spec.d_fx1), total_fixed_rfp(dep2, spec.d_fx2)
        px = None
    else:
        g1 = simulator.build_grid(dep1, neighbor_levels, pixel_size, workers=workers)
        g2 = simulator.build_grid(dep2, neighbor_levels, pixel_size, workers=workers)
        cell1, cell2 = simulator.aggregate_cell(g1), simulator.aggregate_cell(g2)
        fx1 = simulator.aggregate_fixed(g1, spec.d_fx1, spec.epsilon)
        fx2 = simulator.aggregate_fixed(g2, spec.d_fx2, spec.epsilon)
        px = pixel_size
    return ComparisonReport(
        scenario=scenario,
        policy=dep1.policy_name,
        n_i=dep1.n_i if method == "model" else (0 if neighbor_levels == 0 else 6 if neighbor_levels == 1 else 18),
        method=method,
        fixed_ratio=fx1 / fx2,
        cell_ratio=cell1 / cell2,
        pe1_w=emitted_power(dep1),
        pe2_w=emitted_power(dep2),
        cell1_w=cell1,
        cell2_w=cell2,
        fx1_w=fx1,
        fx2_w=fx2,
        d_min1_m=dep1.d_min,
        d_min2_m=dep2.d_min,
        d_fx1_m=spec.d_fx1,
        d_fx2_m=spec.d_fx2,
        neighbor_levels=neighbor_levels,
        pixel_size_m=px,
        runtime_s=time.perf_counter() - t0,
    )


def run_comparison(
    p: ScenarioPreset | str,
    policy: str,
    n_i: int = 0,
    method: str = "model",
    *,
    overrides: Optional[Mapping[str, Any]] = None,
    pixel_size: float = 1.0,
    workers: int = 1,
) -> ComparisonReport:
    if isinstance(p, str):
        p = preset(p)
    spec = build_comparison(p, policy, n_i, overrides)
    return compare(spec, method, scenario=p.id, pixel_size=pixel_size, workers=workers)


def sweep_dmin2(
    p: ScenarioPreset | str,
    policy: str,
    values: Iterable[float],
    n_i: int = 0,
    method: str = "model",
    *,
    hold_elp_power: bool = True,
    overrides: Optional[Mapping[str, Any]] = None,
    pixel_size: float = 1.0,
) -> list[ComparisonReport]:
    """Shrink or grow deployment (2)'s exclusion zone; ``d_fx2`` follows as d_min2 + 1 m.

    With ``hold_elp_power`` the ELP power of deployment (2) stays sized at
    the preset exclusion zone (same equipment); otherwise it is re-sized to
    saturate the limit at each new ``d_min2``.
    """
    if isinstance(p, str):
        p = preset(p)
    reports = []
    for v in values:
        v = float(v)
        if not 0 < v < p.d_max[1]:
            raise ConfigurationError(f"d_min2={v} outside (0, {p.d_max[1]})")
        ov = copy.deepcopy(dict(overrides or {}))
        dep2 = dict(ov.get("dep2") or {})
        dep2["d_min_m"] = v
        if hold_elp_power and policy.lower() == "elp":
            dep2.setdefault("elp_sizing_d_min_m", p.d_min)
        ov["dep2"] = dep2
        ov.pop("d_fx2_m", None)
        reports.append(run_comparison(p, policy, n_i, method, overrides=ov, pixel_size=pixel_size))
    return reports


def sweep_neighbor_levels(
    p: ScenarioPreset | str,
    policy: str,
    levels: Sequence[int],
    *,
    overrides: Optional[Mapping[str, Any]] = None,
    pixel_size: float = 1.0,
    workers: int = 1,
) -> list[ComparisonReport]:
    """Simulated comparison for each neighbor ring count (0, 1 or 2)."""
    if isinstance(p, str):
        p = preset(p)
    reports = []
    for lv in levels:
        if lv not in (0, 1, 2):
            raise ConfigurationError(f"neighbor level must be 0, 1 or 2, got {lv}")
        spec = build_comparison(p, policy, 0 if lv == 0 else 6, overrides)
        reports.append(
            compare(spec, "simulation", scenario=p.id, neighbor_levels=lv, pixel_size=pixel_size, workers=workers)
        )
    return reports


def model_terms(spec: ComparisonSpec) -> dict[str, float]:
    """Constituent closed-form terms of both deployments, for reporting."""
    out = {}
    for k, dep, d_fx in ((1, spec.dep1, spec.d_fx1), (2, spec.dep2, spec.d_fx2)):
        out[f"cell{k}_w"] = cell_rfp(dep)
        out[f"fx{k}_w"] = fixed_rfp(dep, d_fx)
        out[f"neigh_ub{k}_w"] = neighbor_rfp_ub(dep)
    return out
