"""Quasi-periodic cocycle toolkit.

Transfer-matrix cocycles and Lyapunov spectra for quasi-periodic Schrodinger
operators and their long-range strip duals, plus the exact rational-frequency
duality identities, Green's-function localization diagnostics and the
truncated-dual conjugation toward a constant rotation.
"""

__version__ = "0.1.0"

from .arithmetic import (
    ContinuedFraction,
    ResonanceReport,
    admissible_sequence,
    best_approx_residual,
    beta_estimate,
    continued_fraction,
    epsilon_resonances,
    rational_approx_divisible,
    torus_norm,
)
from .cocycles import (
    CocycleSpec,
    LyapunovSpectrum,
    acceleration,
    classify_energy,
    cocycle_product,
    exponent_shift_residual,
    finite_lyapunov_spectrum,
    rational_lyapunov,
    structural_residuals,
    top_lyapunov,
    transfer_matrix,
    uniform_upper_envelope,
)
from .duality import (
    acceleration_count_residual,
    chambers_decomposition,
    det_identity_dual,
    det_identity_periodic,
    det_identity_scalar,
    finite_dos,
    haro_puig_residual,
    herman_lower_bound,
    ids_relation_residual,
    jensen_average,
    rotation_number,
    thouless_residual,
)
from .linalg import (
    ScaledMatrix,
    SVDResult,
    compound_matrix,
    general_eigenvalues,
    gram_pairing,
    hermitian_eigen,
    lu_det,
    svd,
)
from .localization import (
    almost_reducibility_demo,
    ar_polynomial_growth,
    avalanche_check,
    cos_polynomial_symmetry,
    denominator_stats,
    eigen_decay_profile,
    greens_bundle,
    large_deviation_measure,
    numerator_bound_profile,
    poisson_residual,
    symplectic_pairing_check,
    uniformity_measure,
)
from .operators import (
    build_blocks,
    cyclic_fourier,
    cyclic_operators,
    dirichlet_matrix,
    duality_conjugation_residual,
    periodic_matrix,
    scalar_dirichlet_matrix,
)
from .potentials import TrigPotential, amo, pamo, potential_from_config, random_real_potential
