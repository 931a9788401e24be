# pylint: disable=missing-module-docstring,missing-function-docstring
import math

import numpy as np
import pytest
from marketlab import sweeps
from marketlab.errors import (InvalidRange, MetricDivisionByZero,
                              SanityBandWarning)
from marketlab.market import Regime
from marketlab.settlement import da_mpm_profit_ratio_homogeneous

from tests.configs import small_config


def test_case_study_config():
    cfg = sweeps.case_study_config()
    assert cfg.num_generators == 4
    assert cfg.aggregate_demand == pytest.approx(332)
    assert cfg.slope_da == cfg.slope_rt == 10
    assert cfg.homogeneous_cost() == 0.1


def test_slope_choices():
    assert sweeps.slope_choices(0.1) == pytest.approx((8.0, 10.0, 40 / 3))
    assert sweeps.slope_choices(1.0, 0.0) == (1.0, 1.0, 1.0)


@pytest.mark.parametrize('epsilon', [-0.01, 0.1, 0.2])
def test_slope_choices_invalid(epsilon):
    with pytest.raises(InvalidRange):
        sweeps.slope_choices(0.1, epsilon)


def test_resized_config():
    base = small_config(costs=(1.0, 2.0), demands=(4.0, 2.0))
    cfg = sweeps.resized_config(base, 3, 4)
    assert [g.cost_coeff for g in cfg.generators] == [1.0, 2.0, 1.0]
    assert cfg.generator_ids == ('G1', 'G2', 'G3')
    assert [l.demand for l in cfg.loads] == [1.5] * 4
    assert cfg.slope_da == cfg.slope_rt == pytest.approx(1 / 1.5)


def test_resized_config_explicit_slope():
    cfg = sweeps.resized_config(small_config(), 2, 1, slope=3.0)
    assert cfg.slope_da == cfg.slope_rt == 3.0


def test_sweep_participants_da_mpm_profit_ratio():
    grid = sweeps.sweep_participants(sweeps.case_study_config(),
                                     [2, 3, 5], [1, 4])
    assert grid.label == Regime.DA_MPM.value
    assert grid.metric == sweeps.Metric.PROFIT_RATIO
    assert grid.x_axis == sweeps.Axis('generators', (2, 3, 5))
    assert grid.y_axis == sweeps.Axis('loads', (1, 4))
    assert grid.cells.shape == (3, 2)
    for i, num_gens in enumerate((2, 3, 5)):
        for j, num_loads in enumerate((1, 4)):
            assert grid.cells[i, j] == pytest.approx(
                da_mpm_profit_ratio_homogeneous(num_gens, num_loads, 1.0)
            )


def test_sweep_participants_da_mpm_allocation():
    grid = sweeps.sweep_participants(
        sweeps.case_study_config(), [2, 4], [1, 3],
        metric=sweeps.Metric.NORMALIZED_DA_ALLOCATION
    )
    for i, num_gens in enumerate((2, 4)):
        for j, num_loads in enumerate((1, 3)):
            ratio = (num_gens - 1) / num_gens
            assert grid.cells[i, j] == pytest.approx(
                1 - ratio / (num_loads + 1)
            )


def test_sweep_participants_absent_cells():
    grid = sweeps.sweep_participants(
        sweeps.case_study_config(), [2, 3], [1],
        regime=Regime.SLOPE_STANDARD
    )
    assert math.isnan(grid.cells[0, 0])
    assert not math.isnan(grid.cells[1, 0])
    cells = list(grid.iter_cells())
    assert cells[0] == (2, 1, None)


def test_sweep_participants_slope_profit_ratio():
    grid = sweeps.sweep_participants(
        sweeps.case_study_config(), [3], [2], regime=Regime.SLOPE_STANDARD
    )
    assert grid.cells[0, 0] == pytest.approx(17 / 9)


def test_sweep_participants_order_independent():
    base = small_config(costs=(0.5, 1.0, 2.0), demands=(3.0, 4.0))
    serial = sweeps.sweep_participants(base, [2, 3, 4], [1, 2],
                                       max_workers=1)
    parallel = sweeps.sweep_participants(base, [2, 3, 4], [1, 2],
                                         max_workers=4)
    np.testing.assert_array_equal(serial.cells, parallel.cells)


@pytest.mark.parametrize('g_range,l_range', [
    ([], [1]),
    ([2], []),
    ([0, 2], [1]),
    ([2], [1.5]),
])
def test_sweep_participants_invalid_range(g_range, l_range):
    with pytest.raises(InvalidRange):
        sweeps.sweep_participants(small_config(), g_range, l_range)


def test_sweep_slopes_threshold():
    grid = sweeps.sweep_slopes(small_config(), [4 / 3, 1.0], [1.0])
    assert grid.metric == sweeps.Metric.NORMALIZED_DA_ALLOCATION
    assert grid.x_axis.label == 'slope_da'
    assert grid.cells[0, 0] == pytest.approx(0.5)
    assert grid.cells[1, 0] == pytest.approx(3 / 7)


@pytest.mark.parametrize('bd_range,br_range', [
    ([], [1.0]),
    ([1.0], [0.0]),
    ([-1.0], [1.0]),
    ([1.0], [math.inf]),
])
def test_sweep_slopes_invalid_range(bd_range, br_range):
    with pytest.raises(InvalidRange):
        sweeps.sweep_slopes(small_config(), bd_range, br_range)


def test_sweep_slopes_zero_demand():
    with pytest.raises(MetricDivisionByZero):
        sweeps.sweep_slopes(small_config(demands=(0.0,)), [1.0], [1.0])


def test_sweep_slopes_sanity_band(monkeypatch):
    monkeypatch.setattr(sweeps, 'SANITY_BAND', (0.9, 1.0))
    with pytest.warns(SanityBandWarning):
        sweeps.sweep_slopes(small_config(), [1.0], [1.0])


def test_compare_mechanisms_labels():
    grids = sweeps.compare_mechanisms(
        sweeps.case_study_config(), [8.0, 10.0], [3, 4], [1, 2]
    )
    assert [g.label for g in grids] == \
        ['intercept b=8', 'intercept b=10', 'slope']
    assert all(g.cells.shape == (2, 2) for g in grids)


def test_compare_mechanisms_default_slopes():
    grids = sweeps.compare_mechanisms(sweeps.case_study_config(), None,
                                      [3], [1])
    assert len(grids) == 4
    assert grids[1].label == 'intercept b=10'


def test_participant_grids_signatures():
    base = sweeps.case_study_config()
    g_range, l_range = [3, 5, 8, 20], [1, 2, 6]
    da_mpm = sweeps.sweep_participants(base, g_range, l_range)
    assert np.all(da_mpm.cells < 1)
    assert np.all(np.diff(da_mpm.cells, axis=0) < 0)
    assert np.all(np.diff(da_mpm.cells, axis=1) > 0)

    standard = sweeps.sweep_participants(base, g_range, l_range,
                                         regime=Regime.STANDARD)
    assert np.all(standard.cells > 1)

    slope = sweeps.sweep_participants(base, g_range, l_range,
                                      regime=Regime.SLOPE_STANDARD)
    assert slope.cells[-1, 0] < 1
    assert slope.cells[0, -1] > 1


def test_sweep_slopes_increasing_in_day_ahead_slope():
    cfg = sweeps.case_study_config()
    grid = sweeps.sweep_slopes(cfg, [1.0, 2.0, 5.0, 10.0, 20.0, 50.0],
                               [1.0, 10.0, 50.0])
    assert np.all(np.diff(grid.cells, axis=0) > 0)
