# pylint: disable=missing-module-docstring,missing-function-docstring
import json
import logging

import pytest
from marketlab.__main__ import (EXIT_MARKET_ERROR, EXIT_OK, EXIT_VIOLATED,
                                main, parse_counts, parse_reals)
from marketlab.errors import InvalidRange
from marketlab.market import config_to_dict
from marketlab.verifier import verify_equilibrium

from tests.configs import small_config


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for name in ('CONFIG', 'DEMAND_CSV', 'OUTPUT', 'TOLERANCE', 'FORMAT'):
        monkeypatch.delenv('MARKETLAB_' + name, raising=False)


def write_config(tmp_path, cfg, name='market.json'):
    path = tmp_path / name
    path.write_text(json.dumps(config_to_dict(cfg)))
    return str(path)


def test_parse_counts():
    assert parse_counts('2:5') == [2, 3, 4, 5]
    assert parse_counts('1,4,9') == [1, 4, 9]


@pytest.mark.parametrize('text', ['a:b', '1:2:3', '', '1,,2'])
def test_parse_counts_invalid(text):
    with pytest.raises(InvalidRange):
        parse_counts(text)


def test_parse_reals():
    assert parse_reals('0.5,2') == [0.5, 2.0]
    with pytest.raises(InvalidRange):
        parse_reals('0.5,x')


def test_equilibrium(tmp_path, capsys):
    config = write_config(tmp_path, small_config())
    status = main(['equilibrium', '--config', config,
                   '--regime', 'da-mpm', '--behavior', 'nash'])
    assert status == EXIT_OK
    values = json.loads(capsys.readouterr().out)
    assert values['regime'] == 'da-mpm'
    assert values['prices']['day_ahead'] == '0.375'


def test_equilibrium_output_file(tmp_path, capsys):
    config = write_config(tmp_path, small_config())
    output = tmp_path / 'out.json'
    status = main(['equilibrium', '--config', config, '--output', str(output),
                   '--regime', 'standard', '--behavior', 'competitive'])
    assert status == EXIT_OK
    assert capsys.readouterr().out == ''
    assert json.loads(output.read_text())['behavior'] == 'competitive'


def test_equilibrium_environment(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv('MARKETLAB_CONFIG', write_config(tmp_path,
                                                        small_config()))
    status = main(['equilibrium', '--regime', 'rt-mpm', '--behavior', 'nash'])
    assert status == EXIT_OK
    assert json.loads(capsys.readouterr().out)['regime'] == 'rt-mpm'


def test_equilibrium_demand_csv(tmp_path, capsys):
    config = write_config(tmp_path, small_config())
    demands = tmp_path / 'demand.csv'
    demands.write_text('load_id,demand_mw\nA,2\nB,5\n')
    status = main(['equilibrium', '--config', config,
                   '--demand-csv', str(demands),
                   '--regime', 'standard', '--behavior', 'nash'])
    assert status == EXIT_OK
    values = json.loads(capsys.readouterr().out)
    assert set(values['settlement']['payments']) == {'A', 'B'}


def test_equilibrium_missing_config():
    with pytest.raises(SystemExit):
        main(['equilibrium', '--regime', 'standard', '--behavior', 'nash'])


def test_equilibrium_market_error(tmp_path, capsys):
    config = write_config(tmp_path, small_config(costs=(1.0, 2.0)))
    status = main(['equilibrium', '--config', config,
                   '--regime', 'standard', '--behavior', 'nash'])
    assert status == EXIT_MARKET_ERROR
    assert 'error: HeterogeneousUnsupported:' in capsys.readouterr().err


def test_unreadable_config(tmp_path, capsys):
    path = tmp_path / 'market.json'
    path.write_text('not json')
    status = main(['equilibrium', '--config', str(path),
                   '--regime', 'standard', '--behavior', 'nash'])
    assert status == EXIT_MARKET_ERROR
    assert 'ParseError' in capsys.readouterr().err


def test_missing_config_file(tmp_path, capsys):
    status = main(['equilibrium', '--config', str(tmp_path / 'absent.json'),
                   '--regime', 'standard', '--behavior', 'nash'])
    assert status == EXIT_MARKET_ERROR
    assert 'FileNotFoundError' in capsys.readouterr().err


def test_verify(tmp_path, capsys):
    config = write_config(tmp_path, small_config(demands=(1.0, 2.0)))
    status = main(['verify', '--config', config,
                   '--regime', 'da-mpm', '--behavior', 'nash'])
    assert status == EXIT_OK
    values = json.loads(capsys.readouterr().out)
    assert values['verdict'] == 'Verified'


def test_verify_transplanted_bids(tmp_path, capsys):
    main(['equilibrium', '--config', write_config(tmp_path, small_config()),
          '--output', str(tmp_path / 'eq.json'),
          '--regime', 'standard', '--behavior', 'nash'])
    config = write_config(tmp_path, small_config(costs=(0.5, 2.0)),
                          'other.json')
    status = main(['verify', '--config', config,
                   '--bids', str(tmp_path / 'eq.json'),
                   '--regime', 'standard', '--behavior', 'nash'])
    assert status == EXIT_VIOLATED
    captured = capsys.readouterr()
    assert json.loads(captured.out)['verified'] is False
    assert 'Violated(G' in captured.err


def test_verify_bids_skip_solver(tmp_path, capsys, monkeypatch):
    cfg = small_config(demands=(1.0, 2.0))
    config = write_config(tmp_path, cfg)
    main(['equilibrium', '--config', config,
          '--output', str(tmp_path / 'eq.json'),
          '--regime', 'da-mpm', '--behavior', 'nash'])

    def unexpected(*args):
        raise AssertionError(f'solver called with {args}')

    monkeypatch.setattr('marketlab.__main__.solve_equilibrium', unexpected)
    status = main(['verify', '--config', config,
                   '--bids', str(tmp_path / 'eq.json'),
                   '--regime', 'da-mpm', '--behavior', 'nash'])
    assert status == EXIT_OK
    assert json.loads(capsys.readouterr().out)['verdict'] == 'Verified'


def test_verify_bids_of_wrong_kind(tmp_path, capsys):
    cfg = small_config(costs=(1.0, 1.0, 1.0))
    config = write_config(tmp_path, cfg)
    main(['equilibrium', '--config', config,
          '--output', str(tmp_path / 'eq.json'),
          '--regime', 'slope', '--behavior', 'nash'])
    status = main(['verify', '--config', config,
                   '--bids', str(tmp_path / 'eq.json'),
                   '--regime', 'standard', '--behavior', 'nash'])
    assert status == EXIT_MARKET_ERROR
    assert 'ParseError' in capsys.readouterr().err


def test_sweep_slopes_csv(tmp_path, capsys):
    config = write_config(tmp_path, small_config())
    status = main(['sweep', 'slopes', '--config', config,
                   '--slopes-da', '1', '--slopes-rt', '1'])
    assert status == EXIT_OK
    assert capsys.readouterr().out == 'x,y,value\n1,1,0.428571428571\n'


def test_sweep_participants_json(capsys):
    status = main(['sweep', 'participants', '--format', 'json',
                   '--generators', '2:3', '--loads', '1'])
    assert status == EXIT_OK
    values = json.loads(capsys.readouterr().out)
    assert values['label'] == 'da-mpm'
    assert values['x_axis']['values'] == ['2', '3']
    assert len(values['cells']) == 2


def test_sweep_format_environment(capsys, monkeypatch):
    monkeypatch.setenv('MARKETLAB_FORMAT', 'json')
    status = main(['sweep', 'participants', '--generators', '2',
                   '--loads', '1', '--metric', 'normalized_da_allocation'])
    assert status == EXIT_OK
    values = json.loads(capsys.readouterr().out)
    assert values['cells'] == [['0.75']]


def test_sweep_mechanisms_csv(capsys):
    status = main(['sweep', 'mechanisms', '--generators', '3',
                   '--loads', '1,2', '--b-values', '10'])
    assert status == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == 'grid,x,y,value'
    assert [line.split(',')[0] for line in lines[1:]] == \
        ['intercept b=10'] * 2 + ['slope'] * 2


def test_sweep_invalid_counts(capsys):
    status = main(['sweep', 'participants', '--generators', 'two'])
    assert status == EXIT_MARKET_ERROR
    assert 'InvalidRange' in capsys.readouterr().err


def test_verify_tolerance_environment(tmp_path, capsys, monkeypatch, mocker):
    monkeypatch.setenv('MARKETLAB_TOLERANCE', '0.001')
    verify = mocker.patch('marketlab.__main__.verify_equilibrium',
                          wraps=verify_equilibrium)
    config = write_config(tmp_path, small_config())
    status = main(['verify', '--config', config,
                   '--regime', 'rt-mpm', '--behavior', 'nash'])
    assert status == EXIT_OK
    assert verify.call_args.kwargs['tolerance'] == 0.001
    assert json.loads(capsys.readouterr().out)['tolerance'] == '0.001'


def test_verbose_flag_configures_debug(tmp_path, mocker):
    basic_config = mocker.patch('logging.basicConfig')
    config = write_config(tmp_path, small_config())
    main(['--verbose', 'equilibrium', '--config', config,
          '--regime', 'standard', '--behavior', 'competitive',
          '--output', str(tmp_path / 'out.json')])
    assert basic_config.call_args.kwargs['level'] == logging.DEBUG


def test_outputs_deterministic(tmp_path):
    config = write_config(tmp_path, small_config(costs=(0.5, 1.0, 2.0),
                                                 demands=(1.0, 4.0)))
    for name in ('a.json', 'b.json'):
        main(['equilibrium', '--config', config,
              '--output', str(tmp_path / name),
              '--regime', 'da-mpm', '--behavior', 'nash'])
    assert (tmp_path / 'a.json').read_bytes() == \
        (tmp_path / 'b.json').read_bytes()
