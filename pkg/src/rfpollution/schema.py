"""JSON wire format for deployments and deployment pairs.

Keys carry their unit as a suffix so no conversion is hidden:

    {"d_min_m": 15, "d_max_m": 500, "gamma": 3, "f_ghz": 0.7, "eta": 2,
     "c_db": 32.4, "zeta": 0.866, "n_i": 6, "policy": "msp", "p_th_dbm": -90}

A pair document holds ``dep1``/``dep2`` plus optional ``d_fx1_m``,
``d_fx2_m`` and ``epsilon_m``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping

from rfpollution.closed_form import ComparisonSpec, Deployment
from rfpollution.exceptions import ConfigurationError
from rfpollution.geometry import HEX_ZETA, LayoutSpec
from rfpollution.power import ElpConfig, MspConfig, SpsConfig
from rfpollution.propagation import PropagationParams

SCHEMA_VERSION = 1

_POLICY_KEYS = {
    "msp": ("p_th_dbm",),
    "elp": ("s_max_w_m2", "g_tx_db", "l_tx_db"),
    "sps": ("p_f_dbm", "b_mhz"),
}
DEPLOYMENT_KEYS = frozenset(
    {"d_min_m", "d_max_m", "gamma", "f_ghz", "eta", "c_db", "zeta", "n_i", "neighbor_levels",
     "policy", "elp_sizing_d_min_m"}
    | {k for keys in _POLICY_KEYS.values() for k in keys}
)
PAIR_KEYS = frozenset({"schema_version", "scenario", "policy", "dep1", "dep2", "d_fx1_m", "d_fx2_m", "epsilon_m"})


def _require(d: Mapping[str, Any], key: str, where: str):
    if key not in d or d[key] is None:
        raise ConfigurationError(f"{where}: missing required key {key!r}")
    return d[key]


def _num(d: Mapping[str, Any], key: str, where: str) -> float:
    v = _require(d, key, where)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigurationError(f"{where}: {key!r} must be a number, got {v!r}")
    return float(v)


def policy_from_dict(d: Mapping[str, Any], where: str = "deployment"):
    tag = str(_require(d, "policy", where)).lower()
    if tag == "msp":
        return MspConfig(p_th_dbm=_num(d, "p_th_dbm", where))
    if tag == "elp":
        return ElpConfig(
            s_max=_num(d, "s_max_w_m2", where),
            g_tx_db=_num(d, "g_tx_db", where),
            l_tx_db=_num(d, "l_tx_db", where),
        )
    if tag == "sps":
        if d.get("b_mhz") is None:
            raise ConfigurationError(f"{where}: SPS needs an explicit bandwidth 'b_mhz'")
        return SpsConfig(p_f_dbm=_num(d, "p_f_dbm", where), b_mhz=_num(d, "b_mhz", where))
    raise ConfigurationError(f"{where}: unknown policy {tag!r} (expected msp, elp or sps)")


def deployment_from_dict(d: Mapping[str, Any], where: str = "deployment") -> Deployment:
    unknown = set(d) - DEPLOYMENT_KEYS
    if unknown:
        raise ConfigurationError(f"{where}: unknown keys {sorted(unknown)}")
    n_i = int(d.get("n_i", 0))
    levels = d.get("neighbor_levels")
    if levels is None:
        levels = 1 if n_i > 0 else 0
    params = PropagationParams(
        gamma=_num(d, "gamma", where),
        f_ghz=_num(d, "f_ghz", where),
        eta=float(d.get("eta", 2.0)),
        c_db=float(d.get("c_db", 32.4)),
    )
    sizing = d.get("elp_sizing_d_min_m")
    return Deployment(
        d_min=_num(d, "d_min_m", where),
        d_max=_num(d, "d_max_m", where),
        params=params,
        policy=policy_from_dict(d, where),
        layout=LayoutSpec(zeta=float(d.get("zeta", HEX_ZETA)), neighbor_levels=int(levels)),
        n_i=n_i,
        elp_sizing_d_min=None if sizing is None else float(sizing),
    )


def deployment_to_dict(dep: Deployment) -> dict[str, Any]:
    out: dict[str, Any] = {
        "d_min_m": dep.d_min,
        "d_max_m": dep.d_max,
        "gamma": dep.params.gamma,
        "f_ghz": dep.params.f_ghz,
        "eta": dep.params.eta,
        "c_db": dep.params.c_db,
        "zeta": dep.layout.zeta,
        "n_i": dep.n_i,
        "neighbor_levels": dep.layout.neighbor_levels,
        "policy": dep.policy_name,
    }
    p = dep.policy
    if isinstance(p, MspConfig):
        out["p_th_dbm"] = p.p_th_dbm
    elif isinstance(p, ElpConfig):
        out.update(s_max_w_m2=p.s_max, g_tx_db=p.g_tx_db, l_tx_db=p.l_tx_db)
    else:
        out.update(p_f_dbm=p.p_f_dbm, b_mhz=p.b_mhz)
    if dep.elp_sizing_d_min is not None:
        out["elp_sizing_d_min_m"] = dep.elp_sizing_d_min
    return out


def comparison_from_dict(doc: Mapping[str, Any]) -> ComparisonSpec:
    unknown = set(doc) - PAIR_KEYS
    if unknown:
        raise ConfigurationError(f"pair document: unknown keys {sorted(unknown)}")
    _check_version(doc)
    dep1 = deployment_from_dict(_require(doc, "dep1", "pair document"), "dep1")
    dep2 = deployment_from_dict(_require(doc, "dep2", "pair document"), "dep2")
    return ComparisonSpec(
        dep1=dep1,
        dep2=dep2,
        d_fx1=doc.get("d_fx1_m"),
        d_fx2=doc.get("d_fx2_m"),
        epsilon=float(doc.get("epsilon_m", 1.0)),
    )


def comparison_to_dict(spec: ComparisonSpec) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "dep1": deployment_to_dict(spec.dep1),
        "dep2": deployment_to_dict(spec.dep2),
        "d_fx1_m": spec.d_fx1,
        "d_fx2_m": spec.d_fx2,
        "epsilon_m": spec.epsilon,
    }


def _check_version(doc: Mapping[str, Any]) -> None:
    v = doc.get("schema_version", SCHEMA_VERSION)
    if v != SCHEMA_VERSION:
        raise ConfigurationError(f"unsupported schema_version {v!r} (this build reads {SCHEMA_VERSION})")


def load_json(path) -> dict[str, Any]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"malformed JSON in {path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ConfigurationError(f"{path}: top-level JSON value must be an object")
    _check_version(doc)
    return doc
