"""Two-photon Dicke model toolkit.

Exact diagonalization with truncation-convergence filtering, analytics of
the integrable zero-splitting limit, Peres lattices, spectral statistics
(spacings, ratios, Anderson-Darling), and the classical mean-field limit
with Poincare sections.
"""

from .model import (
    BasisState,
    ModelParams,
    ParitySector,
    SymmetricOperator,
    build_basis,
    hamiltonian,
    observable,
    parity_class,
    perturbed_hamiltonian,
    sector_states,
)
from .eigensolve import (
    PhotonDistribution,
    SpectrumResult,
    converged_count,
    diagonalize,
    photon_distribution,
    solve_all_sectors,
    solve_sector,
)
from .integrable import (
    BogoliubovData,
    analytic_energy,
    analytic_spectrum,
    bogoliubov,
    cdagc_operator,
    gamma_collapse,
    overlay_curves,
)
from .peres import PeresPoint, cdagc_lattice, dominance_classify, peres_lattice
from .spectral_stats import (
    RatioPoint,
    SpacingSample,
    anderson_darling,
    average_ratio_curves,
    goe_pdf,
    poisson_pdf,
    ratio_sequence,
    sample_spacings,
    spacing_histogram,
    unfold,
    windowed_mean_ratio,
)
from .classical import (
    ClassicalState,
    ShellSampling,
    Trajectory,
    equations_of_motion,
    gradient,
    h_classical,
    integrate,
    poincare_section,
    q_plus,
    sample_shell,
)

__version__ = "0.1.0"
