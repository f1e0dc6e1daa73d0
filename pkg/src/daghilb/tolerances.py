from __future__ import annotations

from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class ToleranceProfile:
    """Every numeric threshold the library uses, in one place.

    Residuals are measured as the largest entry modulus of a difference
    unless a docstring says otherwise.
    """

    exact: float = 1e-14  # block/permutation constructions that should be bit-exact
    construct: float = 1e-12  # orthonormality of freshly built isometries
    zero: float = 1e-10  # A @ nullspace(A), unitarity of factors, orthomodular identity
    drop: float = 1e-10  # Gram-Schmidt drop threshold, relative to the input column norm
    rank_rtol: float = 1e-10  # singular values below rtol * s_max count as zero
    rank_atol: float = 1e-12  # ... and so do those below this absolute floor
    psd_clamp: float = 1e-10  # eigenvalues in [-psd_clamp, 0) are clamped to 0
    structure: float = 1e-10  # structure operator identities
    equal: float = 1e-8  # subobject equality, reconstruction, universal factorisations
    commute: float = 1e-9  # RS = SR inside the complex decomposition

    def override(self, **kwargs: float) -> "ToleranceProfile":
        known = {f.name for f in fields(self)}
        unknown = set(kwargs) - known
        if unknown:
            raise ValueError(f"unknown tolerance(s): {', '.join(sorted(unknown))}")
        for k, v in kwargs.items():
            if not (isinstance(v, (int, float)) and v > 0):
                raise ValueError(f"tolerance {k} must be a positive number, got {v!r}")
        return replace(self, **{k: float(v) for k, v in kwargs.items()})

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


DEFAULT_TOL = ToleranceProfile()
