"""Truncated full Fock space, Wick calculus, free Bogoljubov actions,
eps-orthogonal subspaces and circle-measure diagnostics."""

__version__ = "0.1.0"

from .fock import (
    CutoffError,
    DimensionError,
    FockVector,
    HilbertSpec,
    HVector,
    annihilate,
    apply_letterwise,
    conj_vector,
    create,
    h_inner,
    inner,
    modular_conjugation,
    required_cutoff,
)
from .wick import (
    PreconditionError,
    W,
    WickExpression,
    WickWord,
    centered,
    freeness_probe,
    pairing,
    semicircle_moment,
    trace,
    vacuum_image,
    wick_adjoint,
    wick_apply,
    wick_apply_right,
    wick_product,
)
from .subspaces import (
    AdmissibilityError,
    EpsFamily,
    SubspaceFrame,
    delta,
    delta_iterate,
    eps_of_pair,
    eps_prime,
    family_bound_check,
    four_projection_bound,
    join,
    random_eps_family,
    three_subspace_fact,
    two_projection_bound,
)
from .bogoljubov import (
    ClaimResult,
    CrossedProductElement,
    OrthogonalRep,
    SectorMass,
    bogoljubov_act,
    claim_check,
    cp_adjoint,
    cp_norm2,
    cp_product,
    cp_trace,
    crossed_conjugation,
    mixing_coefficient,
    second_quantize,
    sector_decompose,
    step3_pairing,
)
from .measures import (
    AtomicMeasure,
    CantorMeasure,
    FamilyParams,
    FourierWindow,
    GridMeasure,
    cantor_family,
    convolve,
    fourier,
    h_space_rep,
    is_symmetric,
    m_infinity,
    rajchman_profile,
    singularity_score,
    support_cells,
)
from .spectra import (
    MasaInvariantReport,
    TorusSquareMeasure,
    disjointness_matrix,
    exoticness_probe,
    pushforward_psi,
)
