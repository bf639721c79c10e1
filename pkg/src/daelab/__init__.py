"""daelab: a numerical laboratory for linear differential-algebraic systems.

Matrix pencils with resolvent evaluation, Wong and augmented Wong subspace
chains, algebraic and resolvent-growth indices, system nodes with transfer
functions and adjoints, consistent initialization, implicit time integration
with solution certificates, port-Hamiltonian structure checks, and a
staggered-grid discretization of the wave/diffusion/elliptic/index-2 example
family.
"""

__version__ = "0.1.0"

from .consistency import (
    ChainCertificate,
    InputJet,
    consistent_membership,
    consistent_projection,
    necessary_projection_check,
    solve_chain,
)
from .errors import (
    DaelabError,
    DimensionMismatch,
    InconsistentInitialValue,
    InvalidConfig,
    NotInResolventSet,
    NotRegular,
    ParseError,
    QSingular,
    ValidationFailed,
)
from .indices import (
    IndexReport,
    REAL_RAY,
    VERTICAL_LINE,
    algebraic_index,
    check_index_bound,
    fit_resolvent_index,
)
from .nodes import (
    SystemNode,
    TransferEval,
    adjoint_node,
    f_lambda,
    output_split_residual,
    transfer,
    transfer_identity_residual,
)
from .pde import (
    PDEConfig,
    RegimeExperiment,
    apply_A_inverse_exact,
    discretize,
    from_functions,
    inverse_agreement,
    lower_bound_witness,
    preset,
    regime_index_experiment,
)
from .pencil import (
    Pencil,
    RegularityWitness,
    ResolventSample,
    is_regular,
    operator_norm,
    resolvent,
)
from .ph import (
    EnergyLedger,
    PHForm,
    PHIndexAudit,
    PHValidationReport,
    dissipation_check,
    hamiltonian,
    ph_index_audit,
    reduce_q_invertible,
    to_node,
    validate_ph,
)
from .simulate import (
    SolutionCertificate,
    Trajectory,
    certify,
    classical_residual,
    integrate,
    mild_residual,
    pseudo_resolvent_transform,
    weak_residual,
)
from .subspaces import (
    Subspace,
    WongChain,
    augmented_wong_sequence,
    contains,
    from_columns,
    image,
    intersect,
    kernel,
    preimage,
    sum_spaces,
    wong_sequence,
)

__all__ = [name for name in dir() if not name.startswith("_")]
