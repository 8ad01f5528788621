import math
from dataclasses import replace

import numpy as np
import pytest

from rfpollution import (
    Deployment,
    ElpConfig,
    EmptyAggregateError,
    GridTooLargeError,
    MspConfig,
    PropagationParams,
    cell_rfp,
    emitted_power,
    fixed_rfp,
    neighbor_rfp_ub,
)
from rfpollution.simulator import (
    DistanceProfile,
    aggregate_cell,
    aggregate_fixed,
    build_grid,
    distance_profile,
    export_heatmap,
    heatmap_dbm,
    profile_crossover,
    read_heatmap,
)

SMALL = Deployment(15.0, 100.0, PropagationParams(3.0, 0.7), MspConfig(-90.0))
SMALL_N6 = replace(SMALL, n_i=6)


@pytest.fixture(scope="module")
def grid0():
    return build_grid(SMALL, 0)


@pytest.fixture(scope="module")
def grid1():
    return build_grid(SMALL_N6, 1)


def test_single_pixel_equals_point_formula(grid0):
    i, j = np.argwhere(grid0.mask)[123]
    d = grid0.distance[i, j]
    assert d == pytest.approx(math.hypot(grid0.x_centers[j], grid0.y_centers[i]))
    assert grid0.serving[i, j] == pytest.approx(fixed_rfp(SMALL, d), rel=1e-12)
    assert grid0.neighbor[i, j] == 0.0


def test_origin_on_pixel_corner(grid0):
    assert grid0.x_centers[grid0.shape[1] // 2] == 0.5
    assert grid0.x_centers[grid0.shape[1] // 2 - 1] == -0.5
    assert grid0.shape == (200, 200)


def test_mask_follows_pixel_centers(grid0):
    d = grid0.distance
    assert np.array_equal(grid0.mask, (d >= 15.0) & (d <= 100.0))
    inner = np.unravel_index(np.argmin(np.where(d < 15.0, np.inf, d)), d.shape)
    assert grid0.mask[inner]
    # pixel with center at (10.5, 10.5), 14.85 m: straddles d_min but is excluded
    row = col = int(np.searchsorted(grid0.x_centers, 10.5))
    assert grid0.distance[row, col] < 15.0
    assert not grid0.mask[row, col]
    assert np.isnan(grid0.rfp[row, col])


def test_every_value_between_annulus_extremes(grid0):
    vals = grid0.values()
    assert vals.max() <= fixed_rfp(SMALL, 15.0)
    assert vals.min() >= fixed_rfp(SMALL, 100.0)


def test_neighbor_part_zero_without_sites(grid0):
    assert aggregate_fixed(grid0, 50.0, 1.0, part="neighbor") == 0.0
    assert aggregate_fixed(grid0, 50.0, 1.0, part="serving") == aggregate_fixed(grid0, 50.0, 1.0)


def test_empty_window_raises(grid0):
    with pytest.raises(EmptyAggregateError):
        aggregate_fixed(grid0, 15.05, 0.01)


def test_unknown_part(grid0):
    with pytest.raises(ValueError):
        aggregate_cell(grid0, part="peak")


def test_fixed_aggregate_close_to_model(grid0):
    assert aggregate_fixed(grid0, 16.0) == pytest.approx(fixed_rfp(SMALL, 16.0), rel=0.03)


def test_cell_mean_close_to_closed_form(grid0):
    assert aggregate_cell(grid0) == pytest.approx(cell_rfp(SMALL), rel=0.03)


def test_neighbors_only_add(grid0, grid1):
    assert np.all(grid1.rfp[grid1.mask] >= grid0.rfp[grid0.mask])
    assert aggregate_cell(grid1) > aggregate_cell(grid0)
    assert len(grid1.neighbors) == 6
    assert len(build_grid(SMALL_N6, 2, pixel_size=4.0).neighbors) == 18


def test_neighbor_term_below_upper_bound(grid1):
    assert np.nanmax(grid1.neighbor) <= neighbor_rfp_ub(SMALL_N6)
    assert aggregate_cell(grid1, part="neighbor") <= neighbor_rfp_ub(SMALL_N6)


def test_default_levels_follow_n_i():
    assert len(build_grid(SMALL, pixel_size=5.0).neighbors) == 0
    assert len(build_grid(SMALL_N6, pixel_size=5.0).neighbors) == 6


def test_profile(grid0):
    prof = distance_profile(grid0)
    assert len(prof) == 85
    assert prof.pixels.min() > 0
    assert prof.pixels.sum() == grid0.mask.sum()
    assert np.all(np.diff(prof.mean_rfp) < 0)
    assert prof.centers[0] == 15.5


def test_profile_csv(tmp_path, grid0):
    prof = distance_profile(grid0, 5.0)
    p = tmp_path / "prof.csv"
    prof.to_csv(p)
    lines = p.read_text().splitlines()
    assert lines[0] == "bin_m,mean_rfp_dbm,pixels"
    assert len(lines) == len(prof) + 1
    first = lines[1].split(",")
    assert float(first[0]) == 15.0
    assert float(first[1]) == pytest.approx(10 * math.log10(prof.mean_rfp[0]) + 30, abs=1e-12)


def test_heatmap_roundtrip(tmp_path, grid0):
    hm = heatmap_dbm(grid0)
    assert np.array_equal(np.isnan(hm), ~grid0.mask)
    peak = np.unravel_index(np.nanargmax(hm), hm.shape)
    assert grid0.distance[peak] < 16.0
    p = tmp_path / "hm.csv"
    export_heatmap(grid0, p)
    back = read_heatmap(p)
    assert back.shape == hm.shape
    assert np.array_equal(np.isnan(back), np.isnan(hm))
    assert np.allclose(back[grid0.mask], hm[grid0.mask], atol=0, rtol=0)


def test_heatmap_first_row_is_lowest_y(tmp_path):
    dep = replace(SMALL, d_min=1.0, d_max=3.0)
    g = build_grid(dep, 0)
    assert g.y_centers[0] < g.y_centers[-1]


def test_parallel_is_deterministic():
    dep = replace(SMALL_N6, d_max=300.0)
    a = build_grid(dep, 1, workers=1)
    b = build_grid(dep, 1, workers=4)
    assert np.array_equal(a.rfp, b.rfp, equal_nan=True)
    assert aggregate_cell(a) == aggregate_cell(b)


def test_arrays_are_read_only(grid0):
    with pytest.raises(ValueError):
        grid0.serving[0, 0] = 1.0


def test_grid_cap():
    with pytest.raises(GridTooLargeError):
        build_grid(SMALL, 0, pixel_size=1.0, max_pixels=1000)
    with pytest.raises(ValueError):
        build_grid(SMALL, 0, pixel_size=0.0)


def test_extent_pads_raster():
    g = build_grid(SMALL, 0, pixel_size=2.0, extent=150.0)
    assert g.shape == (150, 150)
    assert g.mask.sum() == build_grid(SMALL, 0, pixel_size=2.0).mask.sum()


def test_crossover_on_analytic_profiles():
    # beta^-3 against 8 beta^-2 meet at beta = 1/8
    edges = np.arange(0.05, 1.0, 0.001)
    c = edges + 0.0005
    ones = np.ones_like(edges, dtype=np.int64)
    p1 = DistanceProfile(edges, c**-3, ones, 0.001)
    p2 = DistanceProfile(edges, 8 * c**-2, ones, 0.001)
    assert profile_crossover(p1, 1.0, p2, 1.0, samples=20000) == pytest.approx(0.125, abs=1e-4)
    assert profile_crossover(p1, 1.0, p1, 1.0) is None
    assert profile_crossover(p2, 1.0, p1, 1.0) is None


def test_msp_profiles_on_normalized_axis_do_not_cross():
    # under MSP both profiles equal P_TH * beta^-gamma; gamma 2.1 stays below gamma 3
    near = replace(SMALL, d_max=50.0, params=PropagationParams(2.1, 0.7))
    p1 = distance_profile(build_grid(SMALL, 0))
    p2 = distance_profile(build_grid(near, 0))
    assert profile_crossover(p1, 100.0, p2, 50.0) is None


def test_elp_grid_uses_policy_power():
    dep = replace(SMALL, policy=ElpConfig())
    g = build_grid(dep, 0, pixel_size=5.0)
    i, j = np.argwhere(g.mask)[0]
    assert g.serving[i, j] == pytest.approx(
        emitted_power(dep) / (g.distance[i, j] ** 3 * dep.params.frequency_loss), rel=1e-12
    )
