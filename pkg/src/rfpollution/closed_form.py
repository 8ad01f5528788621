"""Closed-form RFP: cell average, fixed distance, neighbor bound, ratios."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

from rfpollution.exceptions import ConfigurationError
from rfpollution.geometry import LayoutSpec
from rfpollution.power import (
    ElpConfig,
    MspConfig,
    PowerPolicy,
    SpsConfig,
    elp_power,
    msp_power,
    policy_name,
    sps_power,
)
from rfpollution.propagation import PropagationParams, path_gain
from rfpollution.units import Meters, Watts, dbm_to_watts

FIXED_DISTANCE_OFFSET = 1.0


@dataclass(frozen=True)
class Deployment:
    """One candidate deployment of identical gNBs.

    ``n_i`` is the neighbor count used by the closed-form upper bound (0 or 6).
    ``elp_sizing_d_min`` lets the ELP power be sized at a different distance
    than the exclusion zone used for aggregation (same equipment, smaller
    exclusion zone); it defaults to ``d_min``.
    """

    d_min: Meters
    d_max: Meters
    params: PropagationParams
    policy: PowerPolicy
    layout: LayoutSpec = field(default_factory=LayoutSpec)
    n_i: int = 0
    elp_sizing_d_min: Optional[Meters] = None

    def __post_init__(self):
        if not 0 < self.d_min < self.d_max:
            raise ConfigurationError(f"need 0 < d_min < d_max, got d_min={self.d_min}, d_max={self.d_max}")
        if self.n_i not in (0, 6):
            raise ConfigurationError(f"n_i must be 0 or 6, got {self.n_i}")
        if self.n_i > 0 and not self.layout.zeta > 0.5:
            raise ConfigurationError("the neighbor bound needs zeta > 0.5")
        if self.elp_sizing_d_min is not None and not self.elp_sizing_d_min > 0:
            raise ConfigurationError("elp_sizing_d_min must be positive")
        policy_name(self.policy)

    @property
    def policy_name(self) -> str:
        return policy_name(self.policy)

    @property
    def area(self) -> float:
        return math.pi * (self.d_max**2 - self.d_min**2)

    def with_neighbors(self, n_i: int) -> Deployment:
        return replace(self, n_i=n_i)


@dataclass(frozen=True)
class ComparisonSpec:
    """Deployment pair plus observation settings.

    Fixed distances default to ``d_min + 1`` m of each deployment.
    """

    dep1: Deployment
    dep2: Deployment
    d_fx1: Optional[Meters] = None
    d_fx2: Optional[Meters] = None
    epsilon: Meters = 1.0

    def __post_init__(self):
        if self.d_fx1 is None:
            object.__setattr__(self, "d_fx1", self.dep1.d_min + FIXED_DISTANCE_OFFSET)
        if self.d_fx2 is None:
            object.__setattr__(self, "d_fx2", self.dep2.d_min + FIXED_DISTANCE_OFFSET)
        for dep, d_fx in ((self.dep1, self.d_fx1), (self.dep2, self.d_fx2)):
            if not dep.d_min <= d_fx <= dep.d_max:
                raise ConfigurationError(f"d_fx={d_fx} outside [{dep.d_min}, {dep.d_max}]")
        if not self.epsilon > 0:
            raise ConfigurationError("epsilon must be positive")

    @property
    def beta1(self) -> float:
        return self.d_fx1 / self.dep1.d_max

    @property
    def beta2(self) -> float:
        return self.d_fx2 / self.dep2.d_max

    # deployment (1) over deployment (2) parameter ratios
    @property
    def delta_d_max(self) -> float:
        return self.dep1.d_max / self.dep2.d_max

    @property
    def delta_f(self) -> float:
        return self.dep1.params.f_ghz / self.dep2.params.f_ghz

    @property
    def delta_c(self) -> float:
        return self.dep1.params.c_linear / self.dep2.params.c_linear

    @property
    def delta_area(self) -> float:
        return self.dep1.area / self.dep2.area

    @property
    def delta_p_th(self) -> float:
        p1, p2 = self.dep1.policy, self.dep2.policy
        if not (isinstance(p1, MspConfig) and isinstance(p2, MspConfig)):
            raise ConfigurationError("delta(P_TH) needs MSP on both deployments")
        return dbm_to_watts(p1.p_th_dbm) / dbm_to_watts(p2.p_th_dbm)

    @property
    def delta_b(self) -> float:
        p1, p2 = self.dep1.policy, self.dep2.policy
        if not (isinstance(p1, SpsConfig) and isinstance(p2, SpsConfig)):
            raise ConfigurationError("delta(B) needs SPS on both deployments")
        return p1.b_mhz / p2.b_mhz

    def with_neighbors(self, n_i: int) -> ComparisonSpec:
        return replace(self, dep1=self.dep1.with_neighbors(n_i), dep2=self.dep2.with_neighbors(n_i))


def emitted_power(dep: Deployment) -> Watts:
    policy = dep.policy
    if isinstance(policy, MspConfig):
        return msp_power(policy, dep.d_max, dep.params)
    if isinstance(policy, ElpConfig):
        d = dep.d_min if dep.elp_sizing_d_min is None else dep.elp_sizing_d_min
        return elp_power(policy, d)
    if isinstance(policy, SpsConfig):
        return sps_power(policy)
    raise ConfigurationError(f"unknown power policy {policy!r}")


def cell_rfp(dep: Deployment) -> Watts:
    """Serving-gNB RFP averaged over the coverage annulus."""
    pe = emitted_power(dep)
    g = dep.params.gamma
    d_min, d_max = dep.d_min, dep.d_max
    pref = 2.0 * pe / ((d_max**2 - d_min**2) * dep.params.frequency_loss)
    if g == 2.0:
        return pref * (math.log(d_max) - math.log(d_min))
    # expm1 form keeps precision as gamma -> 2
    a = 2.0 - g
    bracket = (math.expm1(a * math.log(d_min)) - math.expm1(a * math.log(d_max))) / (g - 2.0)
    return pref * bracket


def fixed_rfp(dep: Deployment, d_fx: Meters) -> Watts:
    if not dep.d_min <= d_fx <= dep.d_max:
        raise ValueError(f"d_fx={d_fx} outside coverage [{dep.d_min}, {dep.d_max}]")
    return emitted_power(dep) * path_gain(d_fx, dep.params)


def neighbor_rfp_ub(dep: Deployment) -> Watts:
    """Every neighbor placed at its closest approach (2*zeta - 1)*d_max."""
    if dep.n_i == 0:
        return 0.0
    d_closest = (2.0 * dep.layout.zeta - 1.0) * dep.d_max
    return dep.n_i * emitted_power(dep) * path_gain(d_closest, dep.params)


def total_cell_rfp(dep: Deployment) -> Watts:
    return cell_rfp(dep) + neighbor_rfp_ub(dep)


def total_fixed_rfp(dep: Deployment, d_fx: Meters) -> Watts:
    return fixed_rfp(dep, d_fx) + neighbor_rfp_ub(dep)


def cell_ratio(spec: ComparisonSpec) -> float:
    return total_cell_rfp(spec.dep1) / total_cell_rfp(spec.dep2)


def fixed_ratio(spec: ComparisonSpec) -> float:
    return total_fixed_rfp(spec.dep1, spec.d_fx1) / total_fixed_rfp(spec.dep2, spec.d_fx2)


# --- per-scenario closed forms for N^I = 0 -------------------------------

def _area_inv(s: ComparisonSpec) -> float:
    return 1.0 / s.delta_area


def _edge_ratio(s: ComparisonSpec) -> float:
    d_min = s.dep1.d_min
    return (s.dep1.d_max - d_min) / (s.dep2.d_max - d_min)


def _gamma_bracket(s: ComparisonSpec) -> float:
    d_min = s.dep1.d_min
    g1, g2 = s.dep1.params.gamma, s.dep2.params.gamma
    num = d_min ** (2 - g1) - s.dep1.d_max ** (2 - g1)
    den = d_min ** (2 - g2) - s.dep2.d_max ** (2 - g2)
    return (g2 - 2) / (g1 - 2) * num / den


def _gammas(s: ComparisonSpec) -> tuple[float, float]:
    return s.dep1.params.gamma, s.dep2.params.gamma


def _msp_fx_densify(s):
    g1, g2 = _gammas(s)
    return s.delta_d_max**g2 / s.beta1 ** (g1 - g2)


def _msp_cell_densify(s):
    g1, g2 = _gammas(s)
    return _area_inv(s) * s.dep1.d_max**g1 / s.dep2.d_max**g2 * _gamma_bracket(s)


def _elp_fx_densify(s):
    g1, g2 = _gammas(s)
    return (s.beta1 * s.dep1.d_max) ** (g2 - g1)


def _elp_cell_densify(s):
    return _area_inv(s) * _gamma_bracket(s)


def _freq_gain(s):
    return s.delta_f ** (-s.dep1.params.eta)


_MSP_TABLE: dict[tuple[str, str], Callable[[ComparisonSpec], float]] = {
    ("S1", "fixed"): lambda s: s.delta_d_max**3,
    ("S1", "cell"): lambda s: _area_inv(s) * s.delta_d_max**2 * _edge_ratio(s),
    ("S2", "fixed"): _msp_fx_densify,
    ("S2", "cell"): _msp_cell_densify,
    ("S3", "fixed"): lambda s: s.delta_d_max**3,
    ("S3", "cell"): lambda s: _area_inv(s) * s.delta_d_max**2 * _edge_ratio(s),
    ("S4", "fixed"): lambda s: s.delta_p_th,
    ("S4", "cell"): lambda s: s.delta_p_th,
    ("S5", "fixed"): lambda s: _msp_fx_densify(s) * s.delta_p_th,
    ("S5", "cell"): lambda s: s.delta_p_th * _msp_cell_densify(s),
}

_ELP_TABLE: dict[tuple[str, str], Callable[[ComparisonSpec], float]] = {
    ("S1", "fixed"): lambda s: 1.0,
    ("S1", "cell"): lambda s: _area_inv(s) / s.delta_d_max * _edge_ratio(s),
    ("S2", "fixed"): _elp_fx_densify,
    ("S2", "cell"): _elp_cell_densify,
    ("S3", "fixed"): _freq_gain,
    ("S3", "cell"): lambda s: _area_inv(s) * _freq_gain(s) / s.delta_d_max * _edge_ratio(s),
    ("S4", "fixed"): _freq_gain,
    ("S4", "cell"): _freq_gain,
    ("S5", "fixed"): lambda s: _elp_fx_densify(s) * _freq_gain(s),
    ("S5", "cell"): lambda s: _freq_gain(s) * _elp_cell_densify(s),
}

SCENARIO_IDS = ("S1", "S2", "S3", "S4", "S5")
TABLE_POLICIES = ("msp", "elp", "sps")
TABLE_KINDS = ("fixed", "cell")


def table_expression(scenario: str, policy: str, kind: str, spec: ComparisonSpec) -> float:
    """Scenario-specific N^I=0 ratio expression evaluated on ``spec``.

    SPS uses the ELP expression scaled by the bandwidth ratio. The printed
    forms assume a shared exclusion zone and a shared observation distance.
    """
    scenario, policy, kind = scenario.upper(), policy.lower(), kind.lower()
    if scenario not in SCENARIO_IDS:
        raise ConfigurationError(f"unknown scenario {scenario!r}")
    if policy not in TABLE_POLICIES:
        raise ConfigurationError(f"unknown policy {policy!r}")
    if kind not in TABLE_KINDS:
        raise ConfigurationError(f"unknown ratio kind {kind!r}")
    if spec.dep1.policy_name != policy or spec.dep2.policy_name != policy:
        raise ConfigurationError(f"both deployments must use {policy}")
    if spec.dep1.d_min != spec.dep2.d_min:
        raise ConfigurationError("table expressions assume a shared d_min")
    if kind == "fixed" and spec.d_fx1 != spec.d_fx2:
        raise ConfigurationError("fixed-distance table expressions assume d_fx1 == d_fx2")
    if policy == "msp":
        return _MSP_TABLE[scenario, kind](spec)
    value = _ELP_TABLE[scenario, kind](spec)
    if policy == "sps":
        value *= spec.delta_b
    return value
