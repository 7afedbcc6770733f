"""Hydrogen bound states under deSitter / anti-deSitter deformed commutators.

Library layout:

- ``model``: deformation algebra, unit systems, coordinate map, uncertainty floor
- ``nu_engine``: generic reduction of hypergeometric-type ODEs (Nikiforov-Uvarov)
- ``polynomials``: Jacobi / Romanovski evaluators and weighted inner products
- ``spectra``: closed-form energies, critical and inversion deformations, bounds
- ``wavefunctions``: radial eigenfunctions, nodes, normalization, spherical harmonics
- ``oracle``: independent finite-difference eigensolver and commutator checks
- ``cli``: deterministic CSV/JSON exports of every table and figure dataset
"""

from .model import (
    HARTREE,
    SI,
    DeformationModel,
    QuantumNumbers,
    UnitSystem,
    min_momentum_uncertainty,
    r_of_s,
    s_of_r,
    uncertainty_floor,
)
from .spectra import (
    EnergyLevel,
    ScaledParameters,
    energy,
    lambda_critical,
    lambda_inversion,
    make_tables,
    spectroscopic_bound,
    transition_ratio,
)
from .wavefunctions import RadialEigenstate, build_state, count_nodes, psi_eval, radial_eval

__version__ = "0.1.0"

__all__ = [
    "HARTREE",
    "SI",
    "DeformationModel",
    "QuantumNumbers",
    "UnitSystem",
    "min_momentum_uncertainty",
    "r_of_s",
    "s_of_r",
    "uncertainty_floor",
    "EnergyLevel",
    "ScaledParameters",
    "energy",
    "lambda_critical",
    "lambda_inversion",
    "make_tables",
    "spectroscopic_bound",
    "transition_ratio",
    "RadialEigenstate",
    "build_state",
    "count_nodes",
    "psi_eval",
    "radial_eval",
    "__version__",
]
