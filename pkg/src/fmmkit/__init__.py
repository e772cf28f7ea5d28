"""fmmkit: exactly verifiable fast matrix multiplication.

Tensor decompositions of the matrix-multiplication tensor in LRP form,
their exhaustive verification, isotropy-group actions, straight-line
program tooling, and recursive multipliers (plain and alternative-basis)
with operation counting checked against closed-form complexity bounds.
"""

from .linalg import Matrix
from .rings import (
    DD,
    F64,
    QI,
    QQ,
    CountingRing,
    DyadicRational,
    FloatRing,
    GaussianRational,
    Mod,
    OpCounter,
    RationalRing,
    ZmodRing,
    canonicalize,
    is_dyadic,
    ring_from_spec,
)
from .sms import SmsMatrix, dumps_sms, read_sms, reads_sms, write_sms
from .tensor import (
    LrpDecomposition,
    MatShape,
    RankOneTensor,
    TypePolynomial,
    builtin,
    builtin_names,
    contract_bilinear,
    equivalent_up_to_term_scaling,
    tensor_type,
    verify_by_contraction,
    verify_mm_tensor,
)
from .isotropy import (
    Isotropy,
    act_lrp,
    act_rank_one,
    builtin_isotropy,
    builtin_isotropy_names,
    compose,
    demote_to_rational,
    identity_isotropy,
    inverse,
)
from .slp import (
    OpCount,
    SlpProgram,
    SlpSyntaxError,
    count_ops,
    eval_slp,
    naive_slp_from_matrix,
    parse_slp,
    print_slp,
    run_full_slp_pipeline,
    verify_linear,
)
from .fastmm import (
    AltBasisAlgorithm,
    RecursionConfig,
    TransformedOperand,
    benchmark,
    closed_form_total,
    count_operations,
    multiply_alt_basis,
    multiply_recursive,
    naive_multiply,
)

__version__ = "0.1.0"
