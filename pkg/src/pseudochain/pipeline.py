"""Config -> Hamiltonian -> generator -> time series, in one call."""

from __future__ import annotations

from dataclasses import dataclass

from .config import Config, ReservoirSpec
from .dynamics import ExtendedState, LindbladGenerator, build_generator, integrate
from .model import RunConfig, SinkSpec, SystemSpec, check_spec
from .observables import EfficiencyReport, TimeSeries, efficiency_report
from .system import ExtendedHamiltonian, build_site_hamiltonian


@dataclass
class SimulationResult:
    timeseries: TimeSeries
    report: EfficiencyReport
    hamiltonian: ExtendedHamiltonian
    generator: LindbladGenerator


def build_model(system: SystemSpec, reservoir: ReservoirSpec, sink: SinkSpec | None):
    check_spec(system, sink)
    pm = reservoir.pseudomodes()
    h = build_site_hamiltonian(system, pm)
    return h, build_generator(h, pm, sink)


def simulate(system: SystemSpec, reservoir: ReservoirSpec, sink: SinkSpec | None, run: RunConfig,
             keep_states: bool = False, check_sink: bool = True) -> SimulationResult:
    """Excite site ``run.initial_site`` of the channel and evolve."""
    h, gen = build_model(system, reservoir, sink)
    rho0 = ExtendedState.site_excitation(h.index, 1, run.initial_site)
    ts = integrate(gen, rho0, run, keep_states=keep_states)
    return SimulationResult(ts, efficiency_report(ts, check=check_sink), h, gen)


def simulate_config(cfg: Config, **kwargs) -> SimulationResult:
    return simulate(cfg.system, cfg.reservoir, cfg.sink, cfg.run, **kwargs)
