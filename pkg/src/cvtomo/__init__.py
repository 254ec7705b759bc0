"""cvtomo: continuous-variable quantum tomography in a truncated Fock basis.

Simulates homodyne/heterodyne measurements of one- and two-mode states,
reconstructs density matrices by semidefinite programming (with an optional
maximum-entropy slack) or by regularized filtered back-projection, and
evaluates Wigner functions, fidelity, negativity, and probe entropies.
"""

from .errors import (AccuracyError, CompletenessError, ConfigError,
                     DegenerateDataError, DimensionMismatchError, DomainError,
                     TomographyError, TruncationError)
from .fock import (DensityMatrix, PureState, StateSpec, TruncationConfig,
                   annihilation_matrix, build_state, coherent_overlap,
                   fidelity, hermite_wavefunction, negativity,
                   shannon_entropy_probe, tensor_lift)
from .povm import (CoherentPoint, POVMElement, QuadraturePoint, SamplingGrid,
                   coherent_element, completeness_residual, elements_from_grid,
                   quadrature_element, quadrature_vector)
from .simulate import (MeasurementRecord, NoiseConfig, expectation, simulate)
from .sdp import (ReconstructionResult, SolverConfig, TomographyProblem,
                  assemble, solve, solve_biased)
from .radon import (KernelConfig, Sinogram, density_from_wigner, inverse_radon,
                    irt_kernel, sinogram)
from .wigner import (PhaseSpaceGrid, wigner_four_dim, wigner_grid,
                     wigner_kernel, wigner_two_mode_slice)

__version__ = "0.1.0"

__all__ = [
    "AccuracyError", "CompletenessError", "ConfigError", "DegenerateDataError",
    "DimensionMismatchError", "DomainError", "TomographyError", "TruncationError",
    "DensityMatrix", "PureState", "StateSpec", "TruncationConfig",
    "annihilation_matrix", "build_state", "coherent_overlap", "fidelity",
    "hermite_wavefunction", "negativity", "shannon_entropy_probe", "tensor_lift",
    "CoherentPoint", "POVMElement", "QuadraturePoint", "SamplingGrid",
    "coherent_element", "completeness_residual", "elements_from_grid",
    "quadrature_element", "quadrature_vector",
    "MeasurementRecord", "NoiseConfig", "expectation", "simulate",
    "ReconstructionResult", "SolverConfig", "TomographyProblem",
    "assemble", "solve", "solve_biased",
    "KernelConfig", "Sinogram", "density_from_wigner", "inverse_radon",
    "irt_kernel", "sinogram",
    "PhaseSpaceGrid", "wigner_four_dim", "wigner_grid", "wigner_kernel",
    "wigner_two_mode_slice",
    "__version__",
]
