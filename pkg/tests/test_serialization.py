# pylint: disable=missing-module-docstring,missing-function-docstring
import json
import math

import numpy as np
import pytest
from marketlab import serialization
from marketlab.equilibria import competitive_slope, nash_da_mpm
from marketlab.errors import ParseError, SplitMismatch
from marketlab.market import BidKind, Stage
from marketlab.settlement import settle
from marketlab.sweeps import Axis, Metric, SweepGrid
from marketlab.verifier import verify_equilibrium

from tests.configs import small_config


@pytest.mark.parametrize('value,expected', [
    (None, None),
    (math.nan, None),
    (-0.0, '0'),
    (0.1 + 0.2, '0.3'),
    (1 / 3, '0.333333333333'),
    (1234567.0, '1234567'),
    (2.5e-20, '2.5e-20'),
])
def test_format_number(value, expected):
    assert serialization.format_number(value) == expected


def test_bids_layout():
    cfg = small_config(demands=(1.0, 3.0))
    bids = nash_da_mpm(cfg).outcome.bids
    layout = serialization.bids_to_dict(bids)
    assert layout['kind'] == 'intercept'
    assert set(layout['generators']) == {'G1', 'G2'}
    assert layout['loads']['L1'] == {
        'day_ahead': serialization.format_number(bids.load_da['L1']),
        'real_time': serialization.format_number(bids.load_rt['L1']),
    }


def test_bids_from_dict_slope():
    cfg = small_config(costs=(1.0, 1.0, 1.0))
    bids = competitive_slope(cfg, 0.5).outcome.bids
    parsed = serialization.bids_from_dict(
        json.loads(json.dumps(serialization.bids_to_dict(bids))), cfg
    )
    assert parsed.bid_kind == BidKind.SLOPE
    assert dict(parsed.generator_bids(Stage.REAL_TIME)) == \
        pytest.approx(dict(bids.generator_bids(Stage.REAL_TIME)))
    assert list(parsed.gen_intercepts_da.values()) == [0.0] * 3


@pytest.mark.parametrize('values', [
    {},
    {'kind': 'quadratic', 'generators': {}, 'loads': {}},
    {'kind': 'intercept', 'generators': {}, 'loads': {}},
    {'kind': 'intercept',
     'generators': {'G1': {'day_ahead': '1', 'real_time': '1'},
                    'G2': {'day_ahead': 'x', 'real_time': '1'}},
     'loads': {'L1': {'day_ahead': '1', 'real_time': '0'}}},
])
def test_bids_from_dict_malformed(values):
    with pytest.raises(ParseError):
        serialization.bids_from_dict(values, small_config())


def test_bids_from_dict_split_mismatch():
    values = {
        'kind': 'intercept',
        'generators': {
            'G1': {'day_ahead': '0', 'real_time': '0'},
            'G2': {'day_ahead': '0', 'real_time': '0'},
        },
        'loads': {'L1': {'day_ahead': '0.25', 'real_time': '0.25'}},
    }
    with pytest.raises(SplitMismatch):
        serialization.bids_from_dict(values, small_config())


def test_read_bids_from_report(tmp_path):
    cfg = small_config(demands=(2.0,))
    eq = nash_da_mpm(cfg)
    path = tmp_path / 'equilibrium.json'
    path.write_text(serialization.dumps(
        serialization.result_to_dict(eq, settle(eq.outcome, cfg))
    ))
    bids = serialization.read_bids(str(path), cfg)
    assert bids.load_da['L1'] == pytest.approx(eq.outcome.bids.load_da['L1'])


def test_read_bids_not_json(tmp_path):
    path = tmp_path / 'bids.json'
    path.write_text('{')
    with pytest.raises(ParseError):
        serialization.read_bids(str(path), small_config())


def test_read_bids_no_bids(tmp_path):
    path = tmp_path / 'bids.json'
    path.write_text('[1, 2]')
    with pytest.raises(ParseError, match='holds no bids'):
        serialization.read_bids(str(path), small_config())


def test_result_to_dict():
    cfg = small_config()
    eq = nash_da_mpm(cfg)
    values = serialization.result_to_dict(eq, settle(eq.outcome, cfg))
    assert values['regime'] == 'da-mpm'
    assert values['behavior'] == 'nash'
    assert values['prices'] == {
        'day_ahead': '0.375', 'real_time': '0.625', 'equal': False
    }
    assert values['degenerate'] == {'day_ahead': False, 'real_time': False}
    assert set(values['dispatch']) == {'G1', 'G2'}
    assert set(values['settlement']['payments']) == {'L1'}


def test_result_deterministic():
    cfg = small_config(costs=(1.0, 2.0), demands=(3.0, 4.0))

    def render():
        eq = nash_da_mpm(cfg)
        return serialization.dumps(
            serialization.result_to_dict(eq, settle(eq.outcome, cfg))
        )
    assert render() == render()
    assert render().endswith('}\n')


def test_verification_to_dict():
    cfg = small_config()
    report = verify_equilibrium(nash_da_mpm(cfg), cfg)
    values = serialization.verification_to_dict(report)
    assert values['verdict'] == 'Verified'
    assert values['verified'] is True
    assert values['participant'] is None
    assert set(values['balance_residuals']) == {'day_ahead', 'real_time'}
    assert set(values['best_deviation_gain']) == {'G1', 'G2', 'L1'}


def _grid(label=''):
    return SweepGrid(
        x_axis=Axis('generators', (2, 3)),
        y_axis=Axis('loads', (1,)),
        cells=np.array([[0.5], [math.nan]]),
        metric=Metric.PROFIT_RATIO,
        label=label
    )


def test_grid_to_dict():
    values = serialization.grid_to_dict(_grid('da-mpm'))
    assert values == {
        'label': 'da-mpm',
        'metric': 'profit_ratio',
        'x_axis': {'label': 'generators', 'values': ['2', '3']},
        'y_axis': {'label': 'loads', 'values': ['1']},
        'cells': [['0.5'], [None]],
    }


def test_grids_to_csv_single():
    assert serialization.grids_to_csv([_grid()]) == \
        'x,y,value\n2,1,0.5\n3,1,null\n'


def test_grids_to_csv_several():
    text = serialization.grids_to_csv([_grid('a'), _grid('b')])
    lines = text.splitlines()
    assert lines[0] == 'grid,x,y,value'
    assert lines[1] == 'a,2,1,0.5'
    assert lines[4] == 'b,3,1,null'
    assert len(lines) == 5
