"""Structure-preserving nearby commuting pairs for almost-commuting self-adjoint matrices.

Real-symmetric, complex and self-dual (quaternionic) pairs are handled through a
common reflection interface ``A -> S A^T S^*``.
"""
from .errors import (
    ACPError,
    AtCenter,
    DimensionMismatch,
    EmptyInput,
    NotNormal,
    NotSelfAdjoint,
    NotSelfTau,
    RealityViolation,
    Singular,
    StructureMismatch,
    TooFarFromGroup,
)
from .reflections import (
    Reflection,
    StructuredMatrix,
    apply_reflection,
    commutator_norm,
    is_self_tau,
    operator_norm,
    re_tau,
    symmetrize_self_tau,
)
from .quaternion import QuaternionMatrix, embed_quaternion, extract_quaternion
from .ensembles import random_structured_pair
from .spectral import (
    GridSpec,
    NormalEig,
    fun_calc,
    grid_project_matrix,
    grid_retract_point,
    normal_eig,
    perturb_to_invertible,
    self_tau_polar,
)
from .jacobi import (
    JointDiagResult,
    SolverOptions,
    joint_diag,
    normal_correct,
    pair_correct,
    project_to_group,
    rotation_solve,
)

__version__ = "0.1.0"
