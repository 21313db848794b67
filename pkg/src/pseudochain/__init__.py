"""Excitation transport through XY spin chains sharing a Lorentzian reservoir,
simulated with the pseudomode Lindblad reduction."""

from .config import Config, ConfigError, ReservoirSpec, load_config
from .dynamics import (AmplitudeState, ExtendedState, InvariantError, apply_generator,
                       build_generator, integrate, integrate_amplitudes, integrate_discretized_bath)
from .kernels import BACKEND
from .model import (RunConfig, SinkSpec, SpecError, StateIndex, SystemSpec, state_dimension,
                    validate_spec)
from .observables import (ComparisonTable, EfficiencyReport, TimeSeries, compare_runs,
                          efficiency_report, sink_population)
from .pipeline import SimulationResult, simulate, simulate_config
from .spectral import (PseudomodeModel, SpectralDensity, evaluate_density, extract_pseudomodes,
                       kernel, reconstruct_density)
from .system import (Basis, EigenBasis, ExtendedHamiltonian, build_eigen_hamiltonian,
                     build_eigenbasis, build_site_hamiltonian, change_of_basis)

__version__ = "0.1.0"
