"""Exact diagonalization and surface-entanglement analysis for spin-1/2
XYZ networks with weakly coupled boundary spins."""

from .basis import SectorBasis, build_basis
from .effective import (EffectiveHamiltonian, effective_couplings,
                        effective_ground, validate_effective)
from .entanglement import (DensityMatrix, concurrence, dicke_state, fidelity,
                           partial_trace, pure_density, reduce_state,
                           residual_tangle, tangle_single, trace_distance)
from .geometry import GEOMETRY_KEYS, load_catalog_file, make_geometry
from .network import (Bond, Site, SpinNetwork, SymmetryClass, classify_symmetry,
                      load_network, save_network)
from .operators import SparseOperator, assemble_hamiltonian
from .solve import (SpectrumResult, dense_spectrum, ground_and_gap,
                    lanczos_spectrum, solve_sector)

__version__ = "0.1.0"

__all__ = [
    "Bond",
    "DensityMatrix",
    "EffectiveHamiltonian",
    "GEOMETRY_KEYS",
    "SectorBasis",
    "Site",
    "SparseOperator",
    "SpectrumResult",
    "SpinNetwork",
    "SymmetryClass",
    "assemble_hamiltonian",
    "build_basis",
    "classify_symmetry",
    "concurrence",
    "dense_spectrum",
    "dicke_state",
    "effective_couplings",
    "effective_ground",
    "fidelity",
    "ground_and_gap",
    "lanczos_spectrum",
    "load_catalog_file",
    "load_network",
    "make_geometry",
    "partial_trace",
    "pure_density",
    "reduce_state",
    "residual_tangle",
    "save_network",
    "solve_sector",
    "tangle_single",
    "trace_distance",
    "validate_effective",
    "__version__",
]
