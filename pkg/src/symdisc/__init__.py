"""Membership, Minkowski functionals, Lempert bounds and two-point interpolation
for the symmetrized polydisc G_n and the spectral unit ball."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DegenerateStep,
    InvalidInput,
    NotInDomain,
    PoleAt,
    ReconciliationFailure,
    RootFindingError,
    SymdiscError,
    Unbounded,
)
from .interpolation import (  # noqa: E402
    Interpolant,
    SolveVerdict,
    Status,
    eval_interpolant,
    np2_necessary_gn,
    np2_solve_gn,
    np2_spectral,
    np2_sufficient_gn,
    verify_interpolant,
)
from .lempert import (  # noqa: E402
    LempertInterval,
    lempert_bounds,
    lempert_gn_bounds,
    lempert_spectral,
    poincare,
    pseudo_hyperbolic,
)
from .membership import (  # noqa: E402
    MembershipVerdict,
    Route,
    circle_sup,
    costara_eval,
    in_gn_costara,
    in_gn_roots,
    in_gn_schur_cohn,
    in_spectral_ball,
)
from .minkowski import (  # noqa: E402
    DomainOracle,
    LambdaWeights,
    lambda_action,
    lambda_scale,
    mink_gn,
    mink_lambda,
    mink_spectral,
    psh_probe,
)
from .polynomial import (  # noqa: E402
    MatrixPoint,
    SymPoint,
    char_coeffs,
    poly_eval,
    poly_from_roots,
    poly_roots,
    spectral_radius,
)
