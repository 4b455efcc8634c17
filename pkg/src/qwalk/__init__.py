"""Quantum walk simulators and weak-convergence diagnostics.

Submodules:
  lattice     Hadamard walk on the integers with ballistic rescaling
  grids       periodic torus grids, unitary DFTs, shear operator
  plancherel  walk whose coin flip is the Fourier transform
  birkhoff    walk whose coin flip composes with a measure-preserving map
  limits      characteristic functions, KS/Lévy distances, convergence sweeps
  config/runner/cli  experiment configuration and the qwalk CLI
"""

__version__ = "0.1.0"

from .birkhoff import (
    BakerMap,
    CircleRotation,
    CoinDensity,
    ProductSampler,
    TrigPolynomial,
    birkhoff_average,
    limit_pushforward,
    pn_quadrature,
    sample_rescaled_position,
    trajectory_sum,
)
from .config import ConfigError, ExperimentConfig, emit_config, load_config, parse_config
from .grids import GridSpec, GridWavefunction, boundary_mass, dft, shear
from .limits import (
    cf_distance,
    characteristic_function,
    convergence_sweep,
    ks_distance,
    ks_distance_to_cdf,
    levy_distance,
    moments,
)
from .measures import DensityOnGrid, EmpiricalMeasure
from .plancherel import limit_density, plancherel_step, position_density
from .runner import run
from .states import BoxProfile, GaussianProfile, product_state

__all__ = [
    "BakerMap",
    "BoxProfile",
    "CircleRotation",
    "CoinDensity",
    "ConfigError",
    "DensityOnGrid",
    "EmpiricalMeasure",
    "ExperimentConfig",
    "GaussianProfile",
    "GridSpec",
    "GridWavefunction",
    "ProductSampler",
    "TrigPolynomial",
    "birkhoff_average",
    "boundary_mass",
    "cf_distance",
    "characteristic_function",
    "convergence_sweep",
    "dft",
    "emit_config",
    "ks_distance",
    "ks_distance_to_cdf",
    "levy_distance",
    "limit_density",
    "limit_pushforward",
    "load_config",
    "moments",
    "parse_config",
    "plancherel_step",
    "pn_quadrature",
    "position_density",
    "product_state",
    "run",
    "sample_rescaled_position",
    "shear",
    "trajectory_sum",
    "__version__",
]
