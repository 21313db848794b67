import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pseudochain.config import ReservoirSpec
from pseudochain.model import RunConfig, SinkSpec, StateIndex, SystemSpec
from pseudochain.observables import (SINK_QUADRATURE_TOL, SinkConsistencyError, TimeSeries, compare_runs,
                                     efficiency_report, sink_population, sink_quadrature)
from pseudochain.pipeline import simulate

SHORT = RunConfig(t_final=100.0, sample_count=501)


def run(n=1, m=3, gamma_sink=0.6, run_cfg=SHORT, check_sink=True):
    return simulate(SystemSpec(n_chains=n, chain_len=m), ReservoirSpec(), SinkSpec(gamma_sink), run_cfg,
                    check_sink=check_sink)


def test_no_sink_gives_zeros():
    ts = run(gamma_sink=0.0).timeseries
    np.testing.assert_array_equal(sink_population(ts), 0)
    assert efficiency_report(ts).t_half is None


def test_two_level_sink_curve():
    res = simulate(SystemSpec(n_chains=1, chain_len=1, omega_big=0.0), ReservoirSpec(), SinkSpec(0.6),
                   RunConfig(t_final=20.0, sample_count=401))
    p = sink_population(res.timeseries)
    np.testing.assert_allclose(p, 1 - np.exp(-0.6 * res.timeseries.times), atol=1e-7)
    rep = res.report
    assert rep.t_half == pytest.approx(np.log(2 / (1 + np.exp(-12.0))) / 0.6, abs=1e-4)
    auc = 20.0 - (1 - np.exp(-12.0)) / 0.6
    assert rep.auc == pytest.approx(auc, abs=1e-3)


@settings(max_examples=6, deadline=None)
@given(st.integers(1, 3), st.integers(1, 5), st.floats(0.1, 1.2))
def test_quadrature_cross_check(n, m, gamma_sink):
    # spacing 0.05 keeps gamma_sink * dt small for every drawn rate
    ts = run(n, m, gamma_sink, RunConfig(t_final=100.0, sample_count=2001)).timeseries
    p = sink_population(ts)
    dev = np.abs(p - sink_quadrature(ts)).max()
    assert dev < SINK_QUADRATURE_TOL
    assert np.all(np.diff(p) >= -1e-12) and p[-1] <= 1.0


def test_trapezoid_rule_available():
    ts = run(run_cfg=RunConfig(t_final=100.0, sample_count=4001)).timeseries
    assert np.abs(ts.sink - sink_quadrature(ts, rule="trapezoid")).max() < SINK_QUADRATURE_TOL
    with pytest.raises(ValueError):
        sink_quadrature(ts, rule="gauss")


def test_coarse_sampling_fails_cross_check():
    ts = run(run_cfg=RunConfig(t_final=100.0, sample_count=11), check_sink=False).timeseries
    with pytest.raises(SinkConsistencyError):
        sink_population(ts)
    assert sink_population(ts, check=False)[-1] == ts.sink[-1]


def test_report_invariants():
    rep = run().report
    assert 0 <= rep.p_sink_final <= 1
    assert rep.t_half is not None and rep.t_half <= rep.t_final
    text = rep.to_csv()
    assert text.splitlines()[0] == "metric,value"
    assert text.splitlines()[1].startswith("p_sink_final,")


def test_efficiency_grows_with_auxiliary_chains():
    table = compare_runs([run(n).timeseries for n in (1, 2, 6)], ["N=1", "N=2", "N=6"])
    finals = list(table.finals.values())
    assert finals[0] < finals[1] < finals[2]
    assert table.ordering == ["N=1", "N=2", "N=6"]


def test_identical_runs_identical_columns():
    a, b = run(2).timeseries, run(2).timeseries
    table = compare_runs([a, b], ["a", "b"])
    np.testing.assert_array_equal(table.columns[:, 0], table.columns[:, 1])
    assert a.to_csv() == b.to_csv()


def test_compare_runs_errors():
    a = run().timeseries
    b = run(run_cfg=RunConfig(t_final=100.0, sample_count=401)).timeseries
    with pytest.raises(ValueError, match="time grid"):
        compare_runs([a, b], ["a", "b"])
    with pytest.raises(ValueError, match="unique"):
        compare_runs([a, a], ["x", "x"])
    with pytest.raises(ValueError):
        compare_runs([a], ["a", "b"])


def test_comparison_csv():
    ts = run(run_cfg=RunConfig(t_final=10.0, sample_count=3), check_sink=False).timeseries
    text = compare_runs([ts], ["only"]).to_csv()
    lines = text.splitlines()
    assert lines[0] == "t,only" and len(lines) == 4


def test_timeseries_csv_layout():
    ts = run(n=2, m=2, run_cfg=RunConfig(t_final=10.0, sample_count=5), check_sink=False).timeseries
    lines = ts.to_csv().splitlines()
    assert lines[0] == ("t,p_ground,p_site_1,p_site_2,p_site_3,p_site_4,p_pm_1,p_sink,purity,trace_err")
    assert len(lines) == 6
    row = [float(x) for x in lines[3].split(",")]
    np.testing.assert_array_equal(row[1:-2], ts.populations[2])


def test_timeseries_validation():
    idx = StateIndex(1, 1)
    with pytest.raises(ValueError):
        TimeSeries([0.0, 0.0], np.zeros((2, idx.dim)), idx, np.ones(2), np.zeros(2))
    with pytest.raises(ValueError):
        TimeSeries([0.0, 1.0], np.zeros((2, 3)), idx, np.ones(2), np.zeros(2))
