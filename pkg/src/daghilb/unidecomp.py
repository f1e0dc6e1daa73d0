"""Writing a square operator as a linear combination of unitaries.

Complex case: split into self-adjoint parts, rescale each to norm 1/2 and
write ``S = (S + iR)/2 + (S - iR)/2`` with ``R = sqrt(1 - S^2)``; at most
four factors.

Real and quaternionic case (even dimension): rescale to norm 1/2, write
``T = I - U S`` from the polar decomposition of ``I - T``, split the
eigenbasis of ``S`` into two halves so ``S = S1 (+) S2`` on ``H1 (+) H1``,
and expand ``diag(A, A)`` and ``diag(B, -B)`` (``A, B`` the half sum and
half difference) with the 2x2 block orthogonal identities. At most five
factors, one of them the identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    LinAlgError,
    Morphism,
    block_diag,
    dagger,
    eigh,
    opnorm,
    polar,
    realify,
    sqrt_psd,
    unitary_defect,
)
from .report import Report, check_rng
from .scalars import FieldTag, Scalar, quaternion_right_ops
from .tolerances import DEFAULT_TOL, ToleranceProfile

MAX_TERMS = {FieldTag.C: 4, FieldTag.R: 5, FieldTag.H: 5}


class DecompositionError(LinAlgError):
    pass


@dataclass
class UnitaryDecomposition:
    field: FieldTag
    terms: list[tuple[Scalar, Morphism]]
    source_norm: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.terms[0][1].rows if self.terms else self.diagnostics.get("dim", 0)

    def reconstruct(self) -> Morphism:
        n = self.dim
        out = Morphism.zeros(self.field, n, n)
        for coeff, factor in self.terms:
            out = out + factor.lscale(coeff)
        return out

    def residual(self, target: Morphism) -> float:
        return self.reconstruct().diff(target)

    def worst_unitary_defect(self) -> float:
        return max((unitary_defect(u) for _, u in self.terms), default=0.0)

    def to_json(self, target: Morphism | None = None) -> dict:
        out = {
            "field": self.field.value,
            "terms": [{"coeff": c.to_json(), "factor": u.to_json()} for c, u in self.terms],
            "term_count": len(self.terms),
            "source_norm": self.source_norm,
            "diagnostics": _jsonable(self.diagnostics),
        }
        if target is not None:
            out["input"] = target.to_json()
            out["residual"] = self.residual(target)
        return out


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _check_square(t: Morphism, field: FieldTag) -> None:
    if t.field is not field:
        raise DecompositionError(f"expected a {field.value} matrix, got {t.field.value}")
    if not t.is_square():
        raise DecompositionError(f"operator must be square, got {t.shape}")


def _unitary_fast_path(t: Morphism, tol: ToleranceProfile) -> UnitaryDecomposition | None:
    if t.rows and unitary_defect(t) <= tol.zero:
        d = UnitaryDecomposition(t.field, [(Scalar.one(t.field), t)], 1.0, {"path": "unitary input"})
        return d
    return None


def _empty(t: Morphism) -> UnitaryDecomposition:
    return UnitaryDecomposition(t.field, [], 0.0, {"path": "zero operator", "dim": t.rows})


# ---------------------------------------------------------------------------
# complex


def _self_adjoint_to_unitaries(s_prime: Morphism, tol: ToleranceProfile, diag: dict, label: str):
    """``S' = ||S'|| (S + iR) + ||S'|| (S - iR)`` with ``S = S'/(2||S'||)``."""
    nrm = opnorm(s_prime)
    s = s_prime * (1.0 / (2.0 * nrm))
    n = s.rows
    eye = Morphism.identity(s.field, n)
    r = sqrt_psd(eye - s @ s, tol)
    diag[f"{label}: |RS - SR|"] = (r @ s - s @ r).max_abs()
    ir = r.scale(1j)
    return nrm, (s + ir, s - ir)


def decompose_complex(
    t: Morphism, tol: ToleranceProfile = DEFAULT_TOL, fast_path: bool = True
) -> UnitaryDecomposition:
    _check_square(t, FieldTag.C)
    if t.max_abs() == 0.0:
        return _empty(t)
    if fast_path and (d := _unitary_fast_path(t, tol)):
        return d
    td = dagger(t)
    sym = t + td  # T = (1/2) sym + (1/2i) anti
    anti = t.scale(1j) - td.scale(1j)
    diag: dict = {"path": "self-adjoint split"}
    diag["split exactness"] = (sym * 0.5 + anti.scale(1 / 2j)).diff(t)
    terms: list[tuple[Scalar, Morphism]] = []
    for part, outer, label in ((sym, 0.5, "hermitian part"), (anti, 1 / 2j, "skew part")):
        if part.max_abs() <= tol.exact * max(1.0, t.max_abs()):
            diag[f"{label}: skipped"] = True
            continue
        nrm, (u1, u2) = _self_adjoint_to_unitaries(part, tol, diag, label)
        coeff = Scalar.of(outer * nrm, FieldTag.C)  # outer * 2||S'|| * (1/2)
        terms.extend([(coeff, u1), (coeff, u2)])
    return UnitaryDecomposition(FieldTag.C, terms, opnorm(t), diag)


# ---------------------------------------------------------------------------
# real and quaternionic


def _block(a: np.ndarray, b: np.ndarray, c: np.ndarray, d: np.ndarray) -> np.ndarray:
    return np.block([[a, b], [c, d]])


def _orthogonal_pairs(vals: np.ndarray) -> tuple[list[tuple[float, np.ndarray]], dict]:
    """Expand diag(S1, S2) into real block matrices in the eigenbasis.

    Returns (coefficient, 2h x 2h real orthogonal matrix) pairs whose sum is
    diag(vals).
    """
    h = vals.size // 2
    s1, s2 = vals[:h], vals[h:]
    a = (s1 + s2) / 2
    b = (s1 - s2) / 2
    out: list[tuple[float, np.ndarray]] = []
    info = {}
    for name, part in (("A", a), ("B", b)):
        nrm = float(np.abs(part).max(initial=0.0))
        info[f"|{name}|"] = nrm
        if nrm == 0.0:
            continue
        unit = part / nrm  # unit norm, so sqrt(I - unit^2) is defined
        root = np.sqrt(np.clip(1.0 - unit**2, 0.0, None))
        du, dr = np.diag(unit), np.diag(root)
        if name == "A":
            w1 = _block(du, dr, -dr, du)
            w2 = _block(du, -dr, dr, du)
        else:
            w1 = _block(du, dr, dr, -du)
            w2 = _block(du, -dr, -dr, -du)
        out.append((nrm / 2, w1))
        out.append((nrm / 2, w2))
    return out, info


def h_linearity_defect(f: Morphism) -> float:
    """How far the real form of ``f`` is from commuting with right mult by i and j."""
    real = realify(f)
    n = f.rows
    ops = quaternion_right_ops(n)
    return max(
        float(np.abs(real @ ops.s - ops.s @ real).max(initial=0.0)),
        float(np.abs(real @ ops.t - ops.t @ real).max(initial=0.0)),
    )


def _decompose_real_like(
    t: Morphism, field: FieldTag, tol: ToleranceProfile, fast_path: bool, pad: bool
) -> UnitaryDecomposition:
    _check_square(t, field)
    n = t.rows
    if t.max_abs() == 0.0:
        raise DecompositionError("zero operator has no rescaling; nothing to decompose")
    if fast_path and (d := _unitary_fast_path(t, tol)):
        return d
    padded = False
    work = t
    if n % 2:
        if not pad:
            raise DecompositionError(f"dimension {n} is odd; pass pad=True to decompose T (+) [0]")
        work = block_diag(t, Morphism.zeros(field, 1, 1))
        padded = True
    m = work.rows
    diag: dict = {"path": "polar/eigen split", "padded": padded}
    nrm = opnorm(work)
    tt = work * (1.0 / (2.0 * nrm))
    eye = Morphism.identity(field, m)
    q = eye - tt
    u, s = polar(q, tol)
    diag["|I - T - U S|"] = (u @ s).diff(q)
    vals, v = eigh(s, tol)
    diag["S spectrum"] = [float(vals.min()), float(vals.max())]
    pairs, info = _orthogonal_pairs(vals)
    diag.update(info)
    vd = dagger(v)
    scale = 2.0 * nrm
    terms: list[tuple[Scalar, Morphism]] = [(Scalar.of(scale, field), eye)]
    for c, w in pairs:
        factor = u @ v @ Morphism.from_real(field, w) @ vd
        terms.append((Scalar.of(-scale * c, field), factor))
    if padded:
        diag["padding unitarity loss"] = [unitary_defect(f.submatrix(slice(0, n), slice(0, n))) for _, f in terms]
        terms = [(c, f.submatrix(slice(0, n), slice(0, n))) for c, f in terms]
    if field is FieldTag.H:
        diag["worst H-linearity defect"] = max(h_linearity_defect(f) for _, f in terms)
        diag["U commutes with structure"] = h_linearity_defect(u)
    diag["term bound"] = MAX_TERMS[field]
    return UnitaryDecomposition(field, terms, nrm, diag)


def decompose_real(
    t: Morphism, tol: ToleranceProfile = DEFAULT_TOL, fast_path: bool = True, pad: bool = False
) -> UnitaryDecomposition:
    return _decompose_real_like(t, FieldTag.R, tol, fast_path, pad)


def decompose_quaternionic(
    t: Morphism, tol: ToleranceProfile = DEFAULT_TOL, fast_path: bool = True, pad: bool = False
) -> UnitaryDecomposition:
    return _decompose_real_like(t, FieldTag.H, tol, fast_path, pad)


def decompose(t: Morphism, tol: ToleranceProfile = DEFAULT_TOL, fast_path: bool = True, pad: bool = False) -> UnitaryDecomposition:
    """Dispatch on the field tag."""
    if t.field is FieldTag.C:
        return decompose_complex(t, tol, fast_path)
    if t.max_abs() == 0.0:
        _check_square(t, t.field)
        return _empty(t)
    if t.field is FieldTag.R:
        return decompose_real(t, tol, fast_path, pad)
    return decompose_quaternionic(t, tol, fast_path, pad)


def check_decomposition(
    field: FieldTag | str,
    dims,
    trials: int,
    seed: int,
    tol: ToleranceProfile = DEFAULT_TOL,
) -> Report:
    """Random operators of the given (even, for R and H) dimensions: term bound,
    factor unitarity, reconstruction and, for H, H-linearity of each factor."""
    field = FieldTag.parse(field)
    bound = MAX_TERMS[field]
    rep = Report(
        f"unitary-decomposition/{field.value}",
        f"every operator is a combination of at most {bound} unitaries",
        tolerance=tol.equal,
    )
    rng = check_rng(rep.check, seed)
    dims = list(dims)
    if field is not FieldTag.C:
        dims = [d for d in dims if d % 2 == 0] or [2]
    worst_terms = 0
    for t in range(trials):
        n = int(dims[int(rng.integers(0, len(dims)))])
        T = Morphism.random(field, n, n, rng) * float(np.exp(rng.uniform(-3, 3)))
        try:
            dec = decompose(T, tol)
        except LinAlgError as exc:
            rep.fail(seed=seed, trial=t, detail=f"dim {n}: {exc}")
            continue
        worst_terms = max(worst_terms, len(dec.terms))
        rec = dec.residual(T) / max(1.0, T.max_abs())
        uni = dec.worst_unitary_defect()
        hlin = max((h_linearity_defect(u) for _, u in dec.terms), default=0.0) if field is FieldTag.H else 0.0
        ok_terms = len(dec.terms) <= bound
        rep.observe(rec, tol.equal, seed=seed, trial=t, detail=f"dim {n}: reconstruction {rec:.3e}")
        rep.observe(uni, tol.zero, seed=seed, trial=t, detail=f"dim {n}: factor unitarity defect {uni:.3e}")
        if field is FieldTag.H:
            rep.observe(hlin, tol.equal, seed=seed, trial=t, detail=f"dim {n}: H-linearity defect {hlin:.3e}")
        rep.check_true(ok_terms, seed=seed, trial=t, detail=f"dim {n}: {len(dec.terms)} terms > {bound}")
    rep.notes.append(f"largest term count: {worst_terms} (bound {bound}, not claimed minimal)")
    return rep
