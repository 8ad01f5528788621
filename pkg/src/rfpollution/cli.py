"""Command-line interface.

Exit codes: 0 success, 2 configuration/usage error, 3 I/O error,
4 computation error (grid cap, empty aggregate), 5 ELP compliance failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Sequence

from rfpollution import __version__, simulator
from rfpollution.exceptions import ConfigurationError, EmptyAggregateError, GridTooLargeError
from rfpollution.power import verify_elp_compliance
from rfpollution.scenarios import (
    ComparisonReport,
    build_comparison,
    compare,
    preset,
    sweep_dmin2,
    sweep_neighbor_levels,
)
from rfpollution.schema import SCHEMA_VERSION, comparison_from_dict, load_json

log = logging.getLogger("rfpollution")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_COMPUTE = 4
EXIT_NONCOMPLIANT = 5

COMMANDS = ("scenario", "compare", "simulate", "sweep", "heatmap", "verify-elp")


@dataclass
class RunConfig:
    command: str
    scenario: Optional[str] = None
    config_path: Optional[Path] = None
    overrides: dict[str, Any] = field(default_factory=dict)
    policy: str = "msp"
    n_i: int = 0
    levels: Optional[list[int]] = None
    methods: tuple[str, ...] = ("model",)
    dmin2_values: Optional[list[float]] = None
    resize_elp_power: bool = False
    deployment: str = "1"
    pixel_size: float = 1.0
    output: Optional[Path] = None
    fmt: str = "json"
    workers: int = 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigurationError(message)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rfpollution", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, *, method=False, fmt=True):
        p.add_argument("--id", dest="scenario", help="scenario preset S1..S5")
        p.add_argument("--config", type=Path, help="JSON pair document or preset overrides")
        p.add_argument("--policy", choices=("msp", "elp", "sps"))
        p.add_argument("--neighbors", type=int, choices=(0, 6), help="neighbor count N^I")
        p.add_argument("--b1-mhz", type=float, help="SPS bandwidth of deployment (1)")
        p.add_argument("--b2-mhz", type=float, help="SPS bandwidth of deployment (2)")
        p.add_argument("--pixel-size", type=float, default=None, help="simulation pixel edge [m], default 1")
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("-o", "--output", type=Path)
        if fmt:
            p.add_argument("--format", dest="fmt", choices=("json", "csv"))
        if method:
            p.add_argument("--method", choices=("model", "simulation", "both"))

    common(sub.add_parser("scenario", help="run a scenario preset S1..S5"), method=True)
    common(sub.add_parser("compare", help="compare a deployment pair from --config"), method=True)
    p = sub.add_parser("simulate", help="distance profile CSV of one deployment")
    common(p, fmt=False)
    p.add_argument("--levels", type=int, choices=(0, 1, 2))
    p.add_argument("--deployment", choices=("1", "2"), default="1")
    p = sub.add_parser("sweep", help="d_min(2) or neighbor-level sweep")
    common(p, method=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--dmin2", type=float, nargs="+", metavar="M")
    g.add_argument("--levels", type=int, nargs="+", choices=(0, 1, 2))
    p.add_argument("--resize-elp-power", action="store_true",
                   help="re-size deployment (2) ELP power at each d_min2 instead of holding it")
    p = sub.add_parser("heatmap", help="RFP raster CSV (dBm) of one deployment")
    common(p, fmt=False)
    p.add_argument("--levels", type=int, choices=(0, 1, 2))
    p.add_argument("--deployment", choices=("1", "2"), default="1")
    p = sub.add_parser("verify-elp", help="full power-density compliance check")
    common(p, fmt=False)
    p.add_argument("--levels", type=int, choices=(0, 1, 2))
    p.add_argument("--deployment", choices=("1", "2", "both"), default="both")
    return parser


def parse_config(argv: Sequence[str], file: Optional[Path] = None) -> RunConfig:
    """Validated run configuration; CLI flag > config file > preset default."""
    ns = _build_parser().parse_args(list(argv))
    cfg = RunConfig(command=ns.command)
    path = file or ns.config
    doc: dict[str, Any] = load_json(path) if path else {}
    cfg.config_path = path

    cfg.scenario = ns.scenario or doc.get("scenario")
    if cfg.scenario is not None:
        preset(cfg.scenario)  # fail early on unknown id
        cfg.scenario = cfg.scenario.upper()
    if cfg.command == "compare":
        if not path:
            raise ConfigurationError("compare needs --config with a deployment pair document")
        if "dep1" not in doc or "dep2" not in doc:
            raise ConfigurationError("compare --config must define both 'dep1' and 'dep2'")
    elif cfg.scenario is None:
        raise ConfigurationError(f"{cfg.command} needs --id S1..S5 or a config file with 'scenario'")

    cfg.policy = (ns.policy or doc.get("policy") or "msp").lower()
    cfg.overrides = {k: v for k, v in doc.items() if k in ("dep1", "dep2", "d_fx1_m", "d_fx2_m", "epsilon_m")}
    if ns.b1_mhz is not None or ns.b2_mhz is not None:
        for k, b in ((1, ns.b1_mhz), (2, ns.b2_mhz)):
            if b is not None:
                cfg.overrides.setdefault(f"dep{k}", {})
                cfg.overrides[f"dep{k}"] = {**cfg.overrides[f"dep{k}"], "b_mhz": b}

    cfg.n_i = ns.neighbors if ns.neighbors is not None else 0
    levels = getattr(ns, "levels", None)
    if isinstance(levels, int):
        levels = [levels]
    cfg.levels = levels
    if ns.neighbors is not None and levels and cfg.command != "sweep":
        implied = 0 if ns.neighbors == 0 else 1
        if levels[0] != implied and not (levels[0] == 2 and ns.neighbors == 6):
            raise ConfigurationError(f"--neighbors {ns.neighbors} conflicts with --levels {levels[0]}")

    method = getattr(ns, "method", None) or "model"
    cfg.methods = ("model", "simulation") if method == "both" else (method,)
    if cfg.command == "sweep":
        cfg.dmin2_values = ns.dmin2
        cfg.resize_elp_power = ns.resize_elp_power
        if ns.levels and getattr(ns, "method", None) == "model":
            raise ConfigurationError("a neighbor-level sweep is simulation only; drop --method model")
    cfg.deployment = getattr(ns, "deployment", "1")
    cfg.pixel_size = ns.pixel_size if ns.pixel_size is not None else 1.0
    if not cfg.pixel_size > 0:
        raise ConfigurationError("--pixel-size must be positive")
    cfg.output = ns.output
    cfg.fmt = getattr(ns, "fmt", None) or _format_from_path(ns.output)
    cfg.workers = max(1, ns.workers)
    if cfg.command in ("heatmap",) and cfg.output is None:
        raise ConfigurationError("heatmap needs --output")
    return cfg


def _format_from_path(path: Optional[Path]) -> str:
    if path is not None and path.suffix.lower() == ".csv":
        return "csv"
    return "json"


def reports_to_json(reports: Sequence[ComparisonReport]) -> str:
    rows = [{"schema_version": SCHEMA_VERSION, **r.as_dict()} for r in reports]
    return json.dumps(rows, indent=2) + "\n"


def _csv_cell(v: Any) -> Any:
    if v is None:
        return ""
    return repr(v) if isinstance(v, float) else v


def reports_to_csv(reports: Sequence[ComparisonReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ComparisonReport.CSV_FIELDS)
    for r in reports:
        d = r.as_dict()
        w.writerow([_csv_cell(d[k]) for k in ComparisonReport.CSV_FIELDS])
    return buf.getvalue()


def _write_text(text: str, path: Optional[Path]) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def write_sidecar(path: Optional[Path], meta: dict[str, Any]) -> None:
    """Run metadata next to a data file; data files never carry timestamps."""
    if path is None:
        return
    side = path.with_name(path.name + ".meta.json")
    payload = {"schema_version": SCHEMA_VERSION, "rfpollution_version": __version__, **meta}
    try:
        side.write_text(json.dumps(payload, indent=2) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {side}: {exc.strerror or exc}") from exc


def emit_report(reports: Sequence[ComparisonReport], fmt: str = "json", path: Optional[Path] = None) -> None:
    if not reports:
        raise ConfigurationError("no reports to emit")
    if fmt == "json":
        text = reports_to_json(reports)
    elif fmt == "csv":
        text = reports_to_csv(reports)
    else:
        raise ConfigurationError(f"unknown output format {fmt!r}")
    _write_text(text, path)
    write_sidecar(path, {"format": fmt, "runtime_s": [r.runtime_s for r in reports]})


def _spec(cfg: RunConfig, n_i: Optional[int] = None):
    n_i = cfg.n_i if n_i is None else n_i
    if cfg.command == "compare":
        doc = load_json(cfg.config_path)
        spec = comparison_from_dict({k: v for k, v in doc.items() if k not in ("scenario", "policy")})
        return spec.with_neighbors(n_i) if n_i else spec
    return build_comparison(preset(cfg.scenario), cfg.policy, n_i, cfg.overrides)


def _single_levels(cfg: RunConfig) -> int:
    if cfg.levels:
        return cfg.levels[0]
    return 1 if cfg.n_i > 0 else 0


def _run(cfg: RunConfig) -> int:
    t0 = time.perf_counter()
    name = cfg.scenario or "custom"

    if cfg.command in ("scenario", "compare"):
        spec = _spec(cfg)
        reports = [
            compare(spec, m, scenario=name, pixel_size=cfg.pixel_size, workers=cfg.workers) for m in cfg.methods
        ]
        emit_report(reports, cfg.fmt, cfg.output)
        return EXIT_OK

    if cfg.command == "sweep":
        if cfg.dmin2_values:
            reports = []
            for m in cfg.methods:
                reports += sweep_dmin2(
                    preset(cfg.scenario), cfg.policy, cfg.dmin2_values, cfg.n_i, m,
                    hold_elp_power=not cfg.resize_elp_power, overrides=cfg.overrides, pixel_size=cfg.pixel_size,
                )
        else:
            reports = sweep_neighbor_levels(
                preset(cfg.scenario), cfg.policy, cfg.levels, overrides=cfg.overrides,
                pixel_size=cfg.pixel_size, workers=cfg.workers,
            )
        emit_report(reports, cfg.fmt, cfg.output)
        return EXIT_OK

    levels = _single_levels(cfg)
    spec = _spec(cfg, 6 if levels > 0 else 0)

    if cfg.command == "verify-elp":
        deps = {"1": [spec.dep1], "2": [spec.dep2], "both": [spec.dep1, spec.dep2]}[cfg.deployment]
        results = []
        for k, dep in zip(("1", "2") if cfg.deployment == "both" else (cfg.deployment,), deps):
            grid = simulator.build_grid(dep, levels, cfg.pixel_size, workers=cfg.workers)
            rep = verify_elp_compliance(dep, grid)
            results.append({"scenario": name, "deployment": int(k), "neighbor_levels": levels, **rep.as_dict()})
        out = [{"schema_version": SCHEMA_VERSION, **r} for r in results]
        _write_text(json.dumps(out, indent=2) + "\n", cfg.output)
        write_sidecar(cfg.output, {"runtime_s": time.perf_counter() - t0})
        return EXIT_OK if all(r["passed"] for r in results) else EXIT_NONCOMPLIANT

    dep = spec.dep1 if cfg.deployment == "1" else spec.dep2
    if cfg.command == "simulate":
        grid = simulator.build_grid(dep, levels, cfg.pixel_size, workers=cfg.workers)
        prof = simulator.distance_profile(grid)
        if cfg.output is None:
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["bin_m", "mean_rfp_dbm", "pixels"])
            for e, v, c in zip(prof.lower_edges, prof.mean_rfp, prof.pixels):
                w.writerow([repr(float(e)), repr(simulator.watts_to_dbm(float(v))), int(c)])
            sys.stdout.write(buf.getvalue())
        else:
            prof.to_csv(cfg.output)
            write_sidecar(cfg.output, {"runtime_s": time.perf_counter() - t0, "neighbor_levels": levels})
        return EXIT_OK

    if cfg.command == "heatmap":
        grid = simulator.build_grid(dep, levels, cfg.pixel_size, workers=cfg.workers)
        simulator.export_heatmap(grid, cfg.output)
        write_sidecar(cfg.output, {
            "runtime_s": time.perf_counter() - t0,
            "rows": grid.shape[0],
            "cols": grid.shape[1],
            "pixel_size_m": grid.pixel_size,
            "first_center_m": float(grid.x_centers[0]),
            "neighbor_levels": levels,
        })
        return EXIT_OK

    raise ConfigurationError(f"unknown command {cfg.command!r}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    argv = sys.argv[1:] if argv is None else argv
    try:
        if not argv or argv[0] in ("-h", "--help", "--version"):
            _build_parser().parse_args(list(argv) or ["-h"])
        cfg = parse_config(argv)
        return _run(cfg)
    except ConfigurationError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except (GridTooLargeError, EmptyAggregateError) as exc:
        log.error("%s", exc)
        return EXIT_COMPUTE
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_IO
    except ValueError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except SystemExit as exc:  # argparse --help / --version
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
