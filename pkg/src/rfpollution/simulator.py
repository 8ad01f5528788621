"""Exact pixel-grid evaluation of serving plus neighbor RFP.

The serving gNB sits on a pixel corner at the origin so that no pixel
center coincides with it. Annulus membership is decided by pixel center.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from rfpollution.closed_form import Deployment, emitted_power
from rfpollution.exceptions import EmptyAggregateError, GridTooLargeError
from rfpollution.geometry import LayoutSpec, SitePosition, hex_neighbors
from rfpollution.units import Meters, watts_to_dbm

DEFAULT_PIXEL_CAP = 50_000_000
_ROW_CHUNK = 256


@dataclass(frozen=True, eq=False)
class PixelGrid:
    """Square raster centred on the serving gNB.

    Row ``i`` holds pixels with center ``y_centers[i]`` (ascending), column
    ``j`` those with ``x_centers[j]``. ``serving`` and ``neighbor`` are the
    two terms of the per-pixel RFP [W]; both are NaN outside the annulus.
    """

    pixel_size: Meters
    extent: Meters
    d_min: Meters
    d_max: Meters
    x_centers: np.ndarray
    y_centers: np.ndarray
    distance: np.ndarray
    mask: np.ndarray
    serving: np.ndarray
    neighbor: np.ndarray
    neighbors: tuple[SitePosition, ...]
    origin: SitePosition = SitePosition(0.0, 0.0)

    @property
    def rfp(self) -> np.ndarray:
        return self.serving + self.neighbor

    @property
    def shape(self) -> tuple[int, int]:
        return self.mask.shape

    def values(self) -> np.ndarray:
        """RFP of the unmasked pixels, row-major order."""
        return self.rfp[self.mask]


def _default_levels(dep: Deployment) -> int:
    return 1 if dep.n_i > 0 else 0


def build_grid(
    dep: Deployment,
    neighbor_levels: Optional[int] = None,
    pixel_size: Meters = 1.0,
    *,
    extent: Optional[Meters] = None,
    max_pixels: int = DEFAULT_PIXEL_CAP,
    workers: int = 1,
) -> PixelGrid:
    """Rasterize the coverage annulus of ``dep`` and evaluate every pixel.

    ``extent`` (half-width of the raster) defaults to ``d_max``; pixels
    beyond the annulus are masked anyway, so a larger extent only pads the
    raster. ``workers`` > 1 evaluates row blocks in threads; the result is
    identical to the serial evaluation.
    """
    if not pixel_size > 0:
        raise ValueError(f"pixel_size must be positive, got {pixel_size}")
    if neighbor_levels is None:
        neighbor_levels = _default_levels(dep)
    layout = LayoutSpec(zeta=dep.layout.zeta, neighbor_levels=neighbor_levels)
    sites = tuple(hex_neighbors(dep.d_max, layout))

    extent = dep.d_max if extent is None else max(extent, dep.d_max)
    half = math.ceil(extent / pixel_size - 1e-9)
    n = 2 * half
    if n * n > max_pixels:
        raise GridTooLargeError(f"raster of {n}x{n} pixels exceeds cap of {max_pixels}")

    centers = (np.arange(-half, half) + 0.5) * pixel_size
    pe = emitted_power(dep)
    gamma = dep.params.gamma
    scale = pe / dep.params.frequency_loss

    distance = np.empty((n, n))
    serving = np.empty((n, n))
    neighbor = np.empty((n, n))
    mask = np.empty((n, n), dtype=bool)

    def fill(lo: int, hi: int) -> None:
        y = centers[lo:hi, None]
        x = centers[None, :]
        d = np.hypot(x, y)
        m = (d >= dep.d_min) & (d <= dep.d_max)
        serv = scale * d ** (-gamma)
        neigh = np.zeros_like(d)
        for site in sites:
            neigh += scale * np.hypot(x - site.x, y - site.y) ** (-gamma)
        serv[~m] = np.nan
        neigh[~m] = np.nan
        distance[lo:hi] = d
        mask[lo:hi] = m
        serving[lo:hi] = serv
        neighbor[lo:hi] = neigh

    blocks = [(lo, min(lo + _ROW_CHUNK, n)) for lo in range(0, n, _ROW_CHUNK)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(lambda b: fill(*b), blocks))
    else:
        for b in blocks:
            fill(*b)

    for arr in (distance, mask, serving, neighbor):
        arr.flags.writeable = False
    return PixelGrid(
        pixel_size=pixel_size,
        extent=half * pixel_size,
        d_min=dep.d_min,
        d_max=dep.d_max,
        x_centers=centers,
        y_centers=centers,
        distance=distance,
        mask=mask,
        serving=serving,
        neighbor=neighbor,
        neighbors=sites,
    )


def aggregate_fixed(grid: PixelGrid, d_fx: Meters, epsilon: Meters = 1.0, *, part: str = "total") -> float:
    """Mean RFP of pixels whose center lies within ``d_fx +/- epsilon``."""
    window = grid.mask & (np.abs(grid.distance - d_fx) <= epsilon)
    if not window.any():
        raise EmptyAggregateError(f"no pixel centers within {d_fx} +/- {epsilon} m of the serving gNB")
    return float(np.mean(_part(grid, part)[window]))


def aggregate_cell(grid: PixelGrid, *, part: str = "total") -> float:
    if not grid.mask.any():
        raise EmptyAggregateError("grid has no pixels inside the coverage annulus")
    return float(np.mean(_part(grid, part)[grid.mask]))


def _part(grid: PixelGrid, part: str) -> np.ndarray:
    if part == "total":
        return grid.rfp
    if part == "serving":
        return grid.serving
    if part == "neighbor":
        return grid.neighbor
    raise ValueError(f"unknown RFP part {part!r}")


@dataclass(frozen=True)
class DistanceProfile:
    """Mean RFP per distance bin; only non-empty bins are kept."""

    lower_edges: np.ndarray
    mean_rfp: np.ndarray
    pixels: np.ndarray
    bin_width: float = 1.0

    def __len__(self) -> int:
        return len(self.lower_edges)

    @property
    def centers(self) -> np.ndarray:
        return self.lower_edges + 0.5 * self.bin_width

    def to_csv(self, path) -> None:
        path = Path(path)
        try:
            with path.open("w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["bin_m", "mean_rfp_dbm", "pixels"])
                for edge, val, cnt in zip(self.lower_edges, self.mean_rfp, self.pixels):
                    w.writerow([repr(float(edge)), repr(watts_to_dbm(float(val))), int(cnt)])
        except OSError as exc:
            raise OSError(f"cannot write profile to {path}: {exc}") from exc


def distance_profile(grid: PixelGrid, bin_width: Meters = 1.0) -> DistanceProfile:
    d = grid.distance[grid.mask]
    v = grid.rfp[grid.mask]
    n_bins = max(1, math.ceil((grid.d_max - grid.d_min) / bin_width - 1e-9))
    idx = np.floor((d - grid.d_min) / bin_width).astype(np.int64)
    np.clip(idx, 0, n_bins - 1, out=idx)
    counts = np.bincount(idx, minlength=n_bins)
    sums = np.bincount(idx, weights=v, minlength=n_bins)
    keep = counts > 0
    edges = grid.d_min + bin_width * np.arange(n_bins)
    return DistanceProfile(
        lower_edges=edges[keep],
        mean_rfp=sums[keep] / counts[keep],
        pixels=counts[keep],
        bin_width=bin_width,
    )


def heatmap_dbm(grid: PixelGrid) -> np.ndarray:
    """Per-pixel RFP in dBm rounded to 0.01, NaN where masked."""
    out = np.full(grid.shape, np.nan)
    vals = grid.rfp[grid.mask]
    out[grid.mask] = np.round(10.0 * np.log10(vals) + 30.0, 2)
    return out


def export_heatmap(grid: PixelGrid, path) -> None:
    """Row-major CSV raster in dBm; first row is the lowest y. Masked pixels are empty fields."""
    raster = heatmap_dbm(grid)
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            for row in raster:
                fh.write(",".join("" if math.isnan(v) else f"{v:.2f}" for v in row))
                fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write heatmap to {path}: {exc}") from exc


def read_heatmap(path) -> np.ndarray:
    rows = []
    with Path(path).open() as fh:
        for line in fh:
            rows.append([float(f) if f else math.nan for f in line.rstrip("\n").split(",")])
    return np.array(rows)


def profile_crossover(
    prof1: DistanceProfile, d_max1: Meters, prof2: DistanceProfile, d_max2: Meters, samples: int = 2000
) -> Optional[float]:
    """First normalized distance d/d_max where profile 1 drops below profile 2.

    Both profiles are interpolated in dB on their bin centers over the
    common range of d/d_max. Returns None when they do not cross.
    """
    b1 = prof1.centers / d_max1
    b2 = prof2.centers / d_max2
    lo, hi = max(b1[0], b2[0]), min(b1[-1], b2[-1])
    if lo >= hi:
        return None
    beta = np.linspace(lo, hi, samples)
    v1 = np.interp(beta, b1, 10 * np.log10(prof1.mean_rfp))
    v2 = np.interp(beta, b2, 10 * np.log10(prof2.mean_rfp))
    diff = v1 - v2
    below = np.nonzero(diff < 0)[0]
    if below.size == 0 or below[0] == 0:
        return None
    k = below[0]
    # linear interpolation between the straddling samples
    t = diff[k - 1] / (diff[k - 1] - diff[k])
    return float(beta[k - 1] + t * (beta[k] - beta[k - 1]))


def default_workers() -> int:
    return min(4, os.cpu_count() or 1)
