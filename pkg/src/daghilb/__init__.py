"""Finite-dimensional dagger categories over R, C and H, with randomized audits."""

from .dagcat import Biproduct, FdObject, biproduct, equalizer, factorize, kernel, verify_scalar_field
from .l2equiv import DirectedDiagram, OrthonormalFamily, full_via_unitaries, l2, verify_equivalence
from .linalg import LinAlgError, Morphism, SingularMatrixError, dagger
from .monoidal import ObstructionError, TensorStructure, check_bullet_equals_circ, quaternionic_obstruction, tensor
from .ortho import ClosedSubspace, Subobject, check_orthomodular, join, meet, orthocomplement, phi
from .report import Report, check_rng
from .scalars import FieldTag, PromotedForm, Scalar, promote_complex, promote_quaternionic
from .tolerances import DEFAULT_TOL, ToleranceProfile
from .unidecomp import UnitaryDecomposition, decompose

__version__ = "0.1.0"

__all__ = [
    "Biproduct", "ClosedSubspace", "DEFAULT_TOL", "DirectedDiagram", "FdObject", "FieldTag", "LinAlgError",
    "Morphism", "ObstructionError", "OrthonormalFamily", "PromotedForm", "Report", "Scalar",
    "SingularMatrixError", "Subobject", "TensorStructure", "ToleranceProfile", "UnitaryDecomposition",
    "biproduct", "check_bullet_equals_circ", "check_orthomodular", "check_rng", "dagger", "decompose",
    "equalizer", "factorize", "full_via_unitaries", "join", "kernel", "l2", "meet", "orthocomplement", "phi",
    "promote_complex", "promote_quaternionic", "quaternionic_obstruction", "tensor", "verify_equivalence",
    "verify_scalar_field",
]
