# pylint: disable=missing-module-docstring,missing-function-docstring
import pytest
from marketlab.equilibria import (competitive_da_mpm, competitive_rt_mpm,
                                  competitive_slope, competitive_standard,
                                  nash_da_mpm, nash_rt_mpm, nash_slope,
                                  nash_standard)
from marketlab.errors import UnsupportedRegimePair
from marketlab.market import Behavior, Regime, Stage, homogeneous_config
from marketlab.mechanism import create_mechanism
from marketlab.settlement import settle
from marketlab.verifier import (DEFAULT_TOLERANCE, SearchOptions, Verdict,
                                best_response_generator, best_response_load,
                                foc_residuals, verify_equilibrium)

from tests.configs import random_configs, small_config


def _scale(eq):
    return max(1.0, abs(eq.outcome.day_ahead.price),
               abs(eq.outcome.real_time.price))


def test_verdict_str():
    assert str(Verdict(True)) == 'Verified'
    assert str(Verdict(False, 'G2', 0.25)) == 'Violated(G2, 0.25)'


def test_search_options_defaults():
    options = SearchOptions()
    assert options.grid_radius is None
    assert options.grid_points == 41


def test_nash_standard_example_stationary():
    eq = nash_standard(small_config())
    residuals = foc_residuals(eq, small_config())
    assert set(residuals) == {'G1', 'G2', 'L1'}
    for value in residuals.values():
        assert value == pytest.approx(0, abs=1e-10)


def _intercept_cases(count):
    return (
        [(nash_standard, cfg)
         for cfg in random_configs(101, count, homogeneous=True)]
        + [(nash_rt_mpm, cfg) for cfg in random_configs(103, count)]
        + [(nash_da_mpm, cfg) for cfg in random_configs(107, count)]
    )


@pytest.mark.filterwarnings(
    'ignore::marketlab.errors.NegativeAllocationWarning'
)
@pytest.mark.parametrize('solver,cfg', _intercept_cases(100))
def test_nash_intercept_equilibria_verified(solver, cfg):
    eq = solver(cfg)
    report = verify_equilibrium(eq, cfg)
    assert report.verdict.verified, report.verdict
    assert str(report.verdict) == 'Verified'
    for value in report.foc_residuals.values():
        assert value == pytest.approx(0, abs=1e-7 * _scale(eq))
    for value in report.balance_residuals.values():
        assert value == pytest.approx(
            0, abs=1e-9 * max(1, cfg.aggregate_demand)
        )


def _perturbed_generator_bid(eq, factor):
    stage = create_mechanism(eq.regime).GENERATOR_STAGES[0]
    bids = eq.outcome.bids
    bid = bids.generator_bids(stage)['G1']
    return eq._replace(outcome=eq.outcome._replace(
        bids=bids.with_generator_bid(stage, 'G1', bid * factor)
    ))


PERTURBATION_CONFIGS = [
    homogeneous_config(2, 0.5, [0.05, 49.95], 2.0, 2.0),
    homogeneous_config(3, 1.0, [0.05, 59.95], 1.0, 1.5),
    homogeneous_config(2, 1.0, [0.1, 20.0, 40.0], 1.0, 1.0),
    homogeneous_config(3, 0.5, [0.05, 80.0], 2.0, 3.0),
    homogeneous_config(4, 0.25, [0.05, 30.0, 30.0], 4.0, 4.0),
    homogeneous_config(2, 2.0, [0.05, 50.0], 0.5, 1.0),
    homogeneous_config(3, 0.2, [0.1, 40.0], 5.0, 5.0),
]


@pytest.mark.filterwarnings(
    'ignore::marketlab.errors.NegativeAllocationWarning'
)
@pytest.mark.parametrize('solver', [nash_standard, nash_rt_mpm, nash_da_mpm])
@pytest.mark.parametrize('cfg', PERTURBATION_CONFIGS)
def test_one_percent_perturbation_violated(solver, cfg):
    perturbed = _perturbed_generator_bid(solver(cfg), 1.01)
    report = verify_equilibrium(perturbed, cfg)
    assert not report.verdict.verified
    assert report.verdict.gain > DEFAULT_TOLERANCE
    assert str(report.verdict).startswith('Violated(')


def test_nash_slope_day_ahead_stationarity():
    cfg = homogeneous_config(3, 1.0, [0.25, 0.75], 1.0, 1.0)
    residuals = foc_residuals(nash_slope(cfg), cfg)
    for gen_id in cfg.generator_ids:
        assert residuals[gen_id] == pytest.approx(-8 / 243, rel=1e-9)
    for load_id in cfg.load_ids:
        assert residuals[load_id] == pytest.approx(0, abs=1e-6)


@pytest.mark.parametrize('cfg', random_configs(109, 20, homogeneous=True,
                                               min_generators=3))
def test_nash_slope_day_ahead_deviation_found(cfg):
    eq = nash_slope(cfg)
    profit = settle(eq.outcome, cfg).profits['G1']
    real_time_gain = best_response_generator(eq, cfg, 'G1',
                                             stage=Stage.REAL_TIME)
    assert real_time_gain <= DEFAULT_TOLERANCE * max(1, abs(profit))
    assert best_response_generator(eq, cfg, 'G1') \
        > DEFAULT_TOLERANCE * max(1, abs(profit))

    report = verify_equilibrium(eq, cfg)
    assert not report.verdict.verified
    assert report.verdict.participant in cfg.generator_ids
    for gen_id in cfg.generator_ids:
        assert report.foc_residuals[gen_id] < 0


@pytest.mark.parametrize('solver', [
    competitive_standard, competitive_rt_mpm, competitive_da_mpm,
    competitive_slope
])
def test_competitive_equilibria_verified(solver):
    for cfg in random_configs(113, 6):
        eq = solver(cfg)
        report = verify_equilibrium(eq, cfg)
        assert report.verdict.verified, report.verdict
        for value in report.foc_residuals.values():
            assert value == pytest.approx(0, abs=1e-9 * _scale(eq))


def test_transplanted_bids_violated():
    eq = nash_standard(small_config())
    cfg = small_config(costs=(0.5, 2.0))
    report = verify_equilibrium(eq, cfg)
    assert not report.verdict.verified
    assert report.verdict.participant in cfg.generator_ids
    assert report.verdict.gain > DEFAULT_TOLERANCE
    assert str(report.verdict).startswith('Violated(G')


def test_competitive_outcome_not_a_nash_equilibrium():
    cfg = small_config()
    eq = competitive_standard(cfg)
    assert verify_equilibrium(eq, cfg).verdict.verified
    gain = best_response_generator(eq, cfg, 'G1', behavior=Behavior.NASH)
    assert gain > 1e-3
    report = verify_equilibrium(eq, cfg, behavior=Behavior.NASH)
    assert not report.verdict.verified


def test_perturbed_bid_detected():
    cfg = small_config()
    eq = nash_standard(cfg)
    bids = eq.outcome.bids
    beta = bids.gen_intercepts_rt['G1']
    perturbed = eq._replace(outcome=eq.outcome._replace(
        bids=bids.with_generator_bid(Stage.REAL_TIME, 'G1', beta * 1.1)
    ))
    residuals = foc_residuals(perturbed, cfg)
    assert abs(residuals['G1']) > 1e-6
    gain = best_response_generator(perturbed, cfg, 'G1',
                                   stage=Stage.REAL_TIME)
    assert gain > 1e-4
    assert not verify_equilibrium(perturbed, cfg).verdict.verified


def test_small_perturbation_moves_residual():
    cfg = small_config(demands=(5.0,))
    eq = nash_da_mpm(cfg)
    bids = eq.outcome.bids
    perturbed = eq._replace(outcome=eq.outcome._replace(
        bids=bids.with_load_day_ahead('L1', bids.load_da['L1'] * 1.01, 5.0)
    ))
    assert abs(foc_residuals(perturbed, cfg)['L1']) > 1e-6


def test_unsupported_stage():
    cfg = small_config()
    eq = nash_rt_mpm(cfg)
    with pytest.raises(UnsupportedRegimePair):
        best_response_generator(eq, cfg, 'G1', stage=Stage.REAL_TIME)


def test_bids_do_not_fit_regime():
    cfg = small_config(costs=(1.0, 1.0, 1.0))
    eq = nash_slope(cfg)
    with pytest.raises(UnsupportedRegimePair):
        foc_residuals(eq, cfg, regime=Regime.STANDARD)
    with pytest.raises(UnsupportedRegimePair):
        best_response_load(eq, cfg, 'L1', regime=Regime.DA_MPM)


def test_zero_demand():
    cfg = small_config(demands=(0.0,))
    eq = nash_rt_mpm(cfg)
    report = verify_equilibrium(eq, cfg, max_workers=1)
    assert report.verdict.verified
    for gain in report.best_deviation_gain.values():
        assert gain == pytest.approx(0, abs=1e-12)


def test_report_contents():
    cfg = small_config(demands=(1.0, 2.0))
    eq = nash_da_mpm(cfg)
    report = verify_equilibrium(eq, cfg, tolerance=1e-6)
    assert report.tolerance == 1e-6
    assert set(report.balance_residuals) == set(Stage)
    assert set(report.best_deviation_gain) == {'G1', 'G2', 'L1', 'L2'}
    assert set(report.baseline_objectives) == {'G1', 'G2', 'L1', 'L2'}
    assert all(gain >= 0 for gain in report.best_deviation_gain.values())


def test_violation_logged(caplog):
    eq = nash_standard(small_config())
    verify_equilibrium(eq, small_config(costs=(0.5, 2.0)))
    assert 'deviates profitably' in caplog.text
