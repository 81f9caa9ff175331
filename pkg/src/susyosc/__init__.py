"""Non-rational supersymmetric extensions of the harmonic oscillator.

Special functions, second-order SUSY transformations, fourth-order ladder
operators, Barut-Girardello coherent states and phase-space diagnostics.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    ConfigError, DeletedLevel, DomainError, NonConvergent, NumericalError, OscillatorOverflow,
    ParameterPole, PoleAtB, QuadratureFailure, SubspaceMismatch, SusyOscError, ZeroMeanOccupation,
    ZeroWronskian,
)
from .specfun import (  # noqa: F401
    bessel_k, hermite_fn, hyp_1f4, kummer_1f1, meijer_g2002, meijer_g4004, recip_gamma,
)
from .oscillator import FockState, SeedSolution, ladder_a, psi_n, seed_value  # noqa: F401
from .susy import (  # noqa: F401
    ExtendedHamiltonian, SusyTransform, apply_b, apply_b_plus, equivalence_report, h1_transform,
    h2_transform, missing_states, partner_potential, transformed_eigenstate, wronskian2,
)
from .ladder import LadderPair, SpectralState, apply_ladder, basis_state, kernel_basis, pha_check  # noqa: F401
from .coherent import (  # noqa: F401
    CoherentState, MeasureSpec, coefficients, density, evolve, mean_energy, measure_moments,
    normalization_c0, overlap, resolution_of_identity,
)
from .phase_space import WignerGrid, mandel_q, number_moments, wigner, wigner_grid, wigner_marginals  # noqa: F401
