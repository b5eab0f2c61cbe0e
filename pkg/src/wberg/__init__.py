"""Weighted Bergman hypercontraction toolkit.

Weight-sequence series calculus, positivity classification of commuting
operator tuples, dilations onto truncated weighted Bergman spaces over the
polydisc, and characteristic functions, with numerically checkable residuals
for every structural identity.
"""

from .bergman import (
    TruncatedSpace,
    kernel_eval,
    multiplier_matrix,
    multishift_purity_and_positivity,
    multishift_tuple,
    shift_matrix,
)
from .charfn import (
    CharFunction,
    CharTriple,
    build_char_triple,
    char_function,
    char_function_eval,
    coincidence_verify,
    contraction_C,
    key_identity_check,
    partial_isometry_check,
    rho_sequence,
    uniqueness_unitary,
)
from .dilation import (
    CommutantLift,
    DilationResult,
    LambdaBlock,
    OneVarDilation,
    commutant_lift,
    general_model,
    isometry_identity_check,
    model_colift,
    one_var_dilation,
    pure_dilation,
    transport_identities_check,
)
from .hyper import (
    DefectResult,
    OperatorTuple,
    TailResult,
    two_parameter_monotonicity_check,
    defect_limit,
    defect_operator,
    defect_series,
    delta_power,
    equivalence_crosscheck,
    is_gamma_contractive,
    is_omega_hypercontraction,
    is_pure,
    is_W_hypercontraction,
    subtuple,
    subtuple_inheritance_check,
    tail_operator,
)
from .linalg import (
    Operator,
    PsdCertificate,
    adjoint,
    complete_to_unitary,
    douglas_solve,
    kron,
    psd_check,
    psd_sqrt,
    range_basis,
)
from .series import (
    MultiWeightSpec,
    TruncatedSeries,
    WeightSpec,
    associated_series,
    check_properties,
    invert_series,
    quotient_coeffs,
    weight_values,
)

__version__ = "0.1.0"
