"""Three routes for the single-excitation dynamics.

Lindblad density-matrix integration is the production path; the pseudomode
amplitude equations and the discretized-bath propagation are independent
checks of it.
"""

from .amplitudes import AmplitudeState, amplitude_matrix, integrate_amplitudes
from .bath import DiscretizedBath, discretize_bath, integrate_discretized_bath
from .generator import Dissipator, LindbladGenerator, apply_generator, build_generator
from .integrate import ExtendedState, InvariantError, integrate

__all__ = [
    "AmplitudeState", "DiscretizedBath", "Dissipator", "ExtendedState", "InvariantError",
    "LindbladGenerator", "amplitude_matrix", "apply_generator", "build_generator",
    "discretize_bath", "integrate", "integrate_amplitudes", "integrate_discretized_bath",
]
