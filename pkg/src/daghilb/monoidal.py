"""Tensor (Kronecker) structure on real and complex spaces.

Coherence witnesses are built from index reshapes, so they are permutation
matrices; for row-major Kronecker products they come out as identities,
which the checks confirm rather than assume.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import LinAlgError, Morphism, dagger, isometry_defect, unitary_defect
from .report import Report, check_rng
from .scalars import FieldTag, Scalar, quat_mul
from .tolerances import DEFAULT_TOL, ToleranceProfile


class ObstructionError(LinAlgError):
    """Raised when a tensor product is requested over noncommutative scalars."""


_H_MESSAGE = (
    "no dagger monoidal tensor over H: scalars of a monoidal category commute, "
    "but ij = k and ji = -k"
)


def _require_commutative(field: FieldTag) -> None:
    if field is FieldTag.H:
        raise ObstructionError(_H_MESSAGE)


def tensor(f: Morphism, g: Morphism) -> Morphism:
    if f.field is not g.field:
        raise LinAlgError(f"field mismatch: {f.field.value} vs {g.field.value}")
    _require_commutative(f.field)
    return Morphism(f.field, np.kron(f.data, g.data))


def _reshape_map(field: FieldTag, src_shape: tuple[int, ...], src_order: tuple[int, ...]) -> Morphism:
    """Permutation sending the row-major index of ``src_shape`` to the row-major
    index of the axes reordered by ``src_order`` (regrouping only when identity)."""
    n = int(np.prod(src_shape, dtype=int))
    idx = np.arange(n).reshape(src_shape).transpose(src_order).reshape(-1)
    p = np.zeros((n, n))
    p[np.arange(n), idx] = 1.0
    return Morphism.from_real(field, p)


@dataclass(frozen=True)
class TensorStructure:
    field: FieldTag

    def __post_init__(self) -> None:
        object.__setattr__(self, "field", FieldTag.parse(self.field))
        _require_commutative(self.field)

    @property
    def unit(self) -> int:
        return 1

    def associator(self, a: int, b: int, c: int) -> Morphism:
        """``(A (x) B) (x) C -> A (x) (B (x) C)``: regroup the (a, b, c) index."""
        return _reshape_map(self.field, (a, b, c), (0, 1, 2))

    def left_unitor(self, a: int) -> Morphism:
        """``K (x) A -> A``."""
        return _reshape_map(self.field, (1, a), (0, 1))

    def right_unitor(self, a: int) -> Morphism:
        """``A (x) K -> A``."""
        return _reshape_map(self.field, (a, 1), (0, 1))

    def symmetry(self, a: int, b: int) -> Morphism:
        """``A (x) B -> B (x) A``."""
        return _reshape_map(self.field, (a, b), (1, 0))

    def comparison(self, a: int, b: int) -> Morphism:
        """``m_{A,B}``: the tensor compared with itself, ``1_A (x) 1_B``."""
        return tensor(Morphism.identity(self.field, a), Morphism.identity(self.field, b))


def pentagon_residual(ts: TensorStructure, a: int, b: int, c: int, d: int) -> float:
    eye = lambda n: Morphism.identity(ts.field, n)  # noqa: E731
    lhs = ts.associator(a, b, c * d) @ ts.associator(a * b, c, d)
    rhs = (
        tensor(eye(a), ts.associator(b, c, d))
        @ ts.associator(a, b * c, d)
        @ tensor(ts.associator(a, b, c), eye(d))
    )
    return lhs.diff(rhs)


def triangle_residual(ts: TensorStructure, a: int, b: int) -> float:
    eye = lambda n: Morphism.identity(ts.field, n)  # noqa: E731
    lhs = tensor(eye(a), ts.left_unitor(b)) @ ts.associator(a, 1, b)
    rhs = tensor(ts.right_unitor(a), eye(b))
    return lhs.diff(rhs)


def naturality_residual(ts: TensorStructure, f: Morphism, g: Morphism, h: Morphism) -> float:
    """``alpha . ((f (x) g) (x) h) = (f (x) (g (x) h)) . alpha``."""
    lhs = ts.associator(f.rows, g.rows, h.rows) @ tensor(tensor(f, g), h)
    rhs = tensor(f, tensor(g, h)) @ ts.associator(f.cols, g.cols, h.cols)
    return lhs.diff(rhs)


def scalar_via_tensor(f: Morphism, lam: Morphism) -> Morphism:
    """``f . lam`` computed as ``r^-1 (f (x) lam) r`` with ``r`` the right unitor."""
    ts = TensorStructure(f.field)
    r_src = ts.right_unitor(f.cols)
    r_tgt = ts.right_unitor(f.rows)
    return r_tgt @ tensor(f, lam) @ dagger(r_src)


def check_bullet_equals_circ(
    trials: int = 1000, seed: int = 0, field: FieldTag | str = FieldTag.C, max_dim: int = 8,
    tol: ToleranceProfile = DEFAULT_TOL,
) -> Report:
    field = FieldTag.parse(field)
    rep = Report(
        f"bullet-equals-circ/{field.value}",
        "scalar multiplication through the right unitor agrees with composition",
        tolerance=tol.exact,
    )
    rng = check_rng(rep.check, seed)
    for t in range(trials):
        n = int(rng.integers(1, max_dim + 1))
        f = Morphism.random(field, n, 1, rng)
        lam = Morphism.random(field, 1, 1, rng)
        lhs = scalar_via_tensor(f, lam)
        rhs = f @ lam
        r = lhs.diff(rhs)
        rep.observe(r, tol.exact, seed=seed, trial=t, detail=f"dim {n}: |r^-1 (f x lam) r - f lam| = {r:.3e}")
    return rep


def check_monoidal(
    field: FieldTag | str, trials: int = 200, seed: int = 0, max_dim: int = 4, tol: ToleranceProfile = DEFAULT_TOL
) -> list[Report]:
    field = FieldTag.parse(field)
    ts = TensorStructure(field)
    coh = Report(
        f"coherence/{field.value}",
        "associator and unitors are unitary, natural, and satisfy pentagon and triangle",
        tolerance=tol.exact,
    )
    dag = Report(f"tensor-dagger/{field.value}", "tensor is a bifunctor commuting with dagger", tolerance=tol.exact)
    comp = Report(
        f"comparison-maps/{field.value}",
        "comparison maps m_{A,B} of the built tensor with itself are identities",
        tolerance=tol.exact,
        proxy=True,
    )
    gen = Report(
        f"monoidal-generator/{field.value}",
        "maps out of A (x) B are separated by h (x) k with h, k from the generator",
        tolerance=0.0,
        proxy=True,
    )
    gen.notes.append("the quantification over all h, k is sampled on basis vectors only")
    rng = check_rng(coh.check, seed)
    for t in range(trials):
        a, b, c, d = (int(x) for x in rng.integers(1, max_dim + 1, size=4))
        r = max(pentagon_residual(ts, a, b, c, d), triangle_residual(ts, a, b))
        r = max(r, unitary_defect(ts.associator(a, b, c)), unitary_defect(ts.left_unitor(a)),
                unitary_defect(ts.right_unitor(a)), unitary_defect(ts.symmetry(a, b)))
        f, g, h = (Morphism.random(field, int(rng.integers(1, 4)), int(rng.integers(1, 4)), rng) for _ in range(3))
        scale = max(1.0, f.max_abs() * g.max_abs() * h.max_abs())
        r = max(r, naturality_residual(ts, f, g, h) / scale)
        coh.observe(r, tol.exact, seed=seed, trial=t)

        f2 = Morphism.random(field, f.cols, int(rng.integers(1, 4)), rng)
        g2 = Morphism.random(field, g.cols, int(rng.integers(1, 4)), rng)
        r = tensor(f, g).dagger().diff(tensor(dagger(f), dagger(g)))
        bif = tensor(f @ f2, g @ g2).diff(tensor(f, g) @ tensor(f2, g2))
        r = max(r, bif / max(1.0, f.max_abs() * f2.max_abs() * g.max_abs() * g2.max_abs() * 4))
        dag.observe(r, tol.exact, seed=seed, trial=t)

        m = ts.comparison(a, b)
        comp.observe(max(m.diff(Morphism.identity(field, a * b)), isometry_defect(m)), tol.exact, seed=seed, trial=t)

        # two parallel maps out of A (x) B, equal or differing in one entry
        x = Morphism.random(field, 2, a * b, rng)
        y = x
        if t % 3:
            bump = np.zeros(x.data.shape)
            bump[int(rng.integers(0, 2)), int(rng.integers(0, a * b))] = 1.0
            y = Morphism(field, x.data + bump)
        separated = False
        for i in range(a):
            for j in range(b):
                hk = tensor(Morphism.basis_vector(field, a, i), Morphism.basis_vector(field, b, j))
                if (x @ hk).diff(y @ hk) > 0.0:
                    separated = True
        gen.check_true(separated == (x.diff(y) > 0.0), seed=seed, trial=t, detail="h (x) k failed to separate")
    return [coh, dag, comp, gen]


def unitor_shape_ok(d: int, n: int) -> bool:
    """Whether a unitary ``I (x) A -> A`` can exist for ``dim I = d``, ``dim A = n``."""
    return d * n == n


def unit_dimension_admissible(d: int) -> bool:
    """A unit must satisfy ``I (x) I = I``, so its unitor on itself must be square."""
    return unitor_shape_ok(d, d)


def quaternionic_obstruction(max_unit_dim: int = 4) -> Report:
    rep = Report(
        "quaternionic-obstruction",
        "a dagger monoidal tensor forces commutative scalars, which excludes H",
        tolerance=0.0,
        proxy=True,
    )
    i = np.array([0.0, 1.0, 0.0, 0.0])
    j = np.array([0.0, 0.0, 1.0, 0.0])
    k = np.array([0.0, 0.0, 0.0, 1.0])
    ij, ji = quat_mul(i, j), quat_mul(j, i)
    rep.check_true(np.array_equal(ij, k) and np.array_equal(ji, -k), seed=0, trial=0, detail=f"ij = {ij}, ji = {ji}")
    rep.check_true(not np.array_equal(ij, ji), seed=0, trial=1, detail="i and j commute")
    rep.notes.append(f"ij = {Scalar(FieldTag.H, tuple(ij)).comps}, ji = {Scalar(FieldTag.H, tuple(ji)).comps}: noncommutative")

    # a naive entrywise Kronecker product over H breaks the interchange law on 1x1 maps
    def qkron(a, b):
        return quat_mul(a, b)

    one = np.array([1.0, 0.0, 0.0, 0.0])
    lhs = qkron(quat_mul(one, i), quat_mul(j, one))  # (1 i) (x) (j 1)
    rhs = quat_mul(qkron(one, j), qkron(i, one))  # (1 (x) j)(i (x) 1)
    rep.check_true(not np.allclose(lhs, rhs), seed=0, trial=2, detail="interchange law held for i, j")
    rep.notes.append(f"interchange law: (1 i)(x)(j 1) = {lhs.tolist()} but (1(x)j)(i(x)1) = {rhs.tolist()}")

    try:
        tensor(Morphism.identity(FieldTag.H, 1), Morphism.identity(FieldTag.H, 1))
        rep.fail(seed=0, trial=3, detail="tensor over H was not rejected")
    except ObstructionError:
        rep.check_true(True, seed=0, trial=3, detail="")

    for d in range(max_unit_dim + 1):
        expected = d in (0, 1)  # d^2 = d by dimension count
        rep.check_true(
            unit_dimension_admissible(d) == expected, seed=0, trial=10 + d, detail=f"unit dimension {d} misclassified"
        )
    admissible = [d for d in range(max_unit_dim + 1) if unit_dimension_admissible(d)]
    rep.notes.append(f"unit dimensions passing the unitor shape test: {admissible}")
    return rep
