"""Tonks-Girardeau and free-fermion gases in a magnetized cosine lattice.

Single-particle Bloch states come from the truncated Mathieu eigenproblem;
the N-particle ground states are a Slater determinant and its Fermi-Bose
mapped hard-core boson counterpart.
"""
__version__ = "0.1.0"

from .errors import (ConfigError, DegeneracyError, DomainError, NumericalError, TGError,
                     UnsupportedStatisticsError)
from .lattice import (LatticeConfig, PhysicalConstants, bloch_nu, dimensionless_coupling,
                      energy_from_lambda)
from .mathieu import (ModeOrbital, Orbital, build_tridiagonal, eigensolve_truncated,
                      evaluate_orbital, realize_degenerate_pair, solve_adaptive)
from .bands import BandStructure, GapScan, band_gap, boltzmann_ratio, compute_bands, gap_scan
from .manybody import (ManyBodyState, bose_wavefunction, fermi_wavefunction,
                       ground_state_occupation, sign_prefactor, total_energy)
from .observables import (DensityMatrixGrid, Grid1D, MomentumDistribution, PairDistributionGrid,
                          antidiagonal_cut, average_position_and_potential, density_profile,
                          momentum_distribution, pair_distribution, rspdm_fermi,
                          rspdm_quadrature_oracle, total_momentum)
from .montecarlo import McConfig, rspdm_bose_mc
