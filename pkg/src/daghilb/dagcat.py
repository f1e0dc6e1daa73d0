"""Finite-dimensional dagger category: biproducts, equalizers, kernels, factorisation.

Objects are :class:`FdObject` (a field tag and a dimension); morphisms are
:class:`~daghilb.linalg.Morphism` matrices. The zero object is the
0-dimensional space and the simple generator is the 1-dimensional one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    LinAlgError,
    Morphism,
    block_diag,
    dagger,
    hstack,
    inv,
    isometry_defect,
    nullspace,
    random_isometry,
    random_unitary,
    range_basis,
    vstack,
)
from .report import Report, check_rng
from .scalars import FieldMismatchError, FieldTag, Scalar, inv as scalar_inv
from .tolerances import DEFAULT_TOL, ToleranceProfile


@dataclass(frozen=True)
class FdObject:
    field: FieldTag
    dim: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "field", FieldTag.parse(self.field))
        if self.dim < 0:
            raise ValueError("dimension must be nonnegative")

    @classmethod
    def generator(cls, field: FieldTag | str) -> "FdObject":
        return cls(FieldTag.parse(field), 1)

    @classmethod
    def zero(cls, field: FieldTag | str) -> "FdObject":
        return cls(FieldTag.parse(field), 0)

    def identity(self) -> Morphism:
        return Morphism.identity(self.field, self.dim)

    def zero_to(self, other: "FdObject") -> Morphism:
        return Morphism.zeros(self.field, other.dim, self.dim)


def dom(f: Morphism) -> FdObject:
    return FdObject(f.field, f.cols)


def cod(f: Morphism) -> FdObject:
    return FdObject(f.field, f.rows)


@dataclass(frozen=True)
class Biproduct:
    first: FdObject
    second: FdObject
    total: FdObject
    p: Morphism
    q: Morphism
    i: Morphism
    j: Morphism

    def defects(self) -> dict[str, float]:
        """Largest entry of each defining identity's residual (all exactly 0 here)."""
        a, b = self.first, self.second
        ia, ib, it = a.identity(), b.identity(), self.total.identity()
        return {
            "p p^dagger = 1": (self.p @ dagger(self.p)).diff(ia),
            "q q^dagger = 1": (self.q @ dagger(self.q)).diff(ib),
            "p q^dagger = 0": (self.p @ dagger(self.q)).max_abs(),
            "q p^dagger = 0": (self.q @ dagger(self.p)).max_abs(),
            "i = p^dagger": self.i.diff(dagger(self.p)),
            "j = q^dagger": self.j.diff(dagger(self.q)),
            "p^dagger p + q^dagger q = 1": (dagger(self.p) @ self.p + dagger(self.q) @ self.q).diff(it),
        }

    def pair(self, f: Morphism, g: Morphism) -> Morphism:
        """Product pairing <f, g>: X -> A (+) B."""
        return self.i @ f + self.j @ g

    def copair(self, f: Morphism, g: Morphism) -> Morphism:
        """Coproduct copairing [f, g]: A (+) B -> Y."""
        return f @ self.p + g @ self.q


def _same_field(a: FdObject | Morphism, b: FdObject | Morphism) -> None:
    if a.field is not b.field:
        raise FieldMismatchError(f"field mismatch: {a.field.value} vs {b.field.value}")


def biproduct(a: FdObject, b: FdObject) -> Biproduct:
    _same_field(a, b)
    n = a.dim + b.dim
    p = np.zeros((a.dim, n))
    p[:, : a.dim] = np.eye(a.dim)
    q = np.zeros((b.dim, n))
    q[:, a.dim :] = np.eye(b.dim)
    pm = Morphism.from_real(a.field, p)
    qm = Morphism.from_real(a.field, q)
    return Biproduct(a, b, FdObject(a.field, n), pm, qm, dagger(pm), dagger(qm))


def diagonal(a: FdObject) -> Morphism:
    """A -> A (+) A."""
    return vstack([a.identity(), a.identity()])


def codiagonal(b: FdObject) -> Morphism:
    """B (+) B -> B."""
    return hstack([b.identity(), b.identity()])


def direct_sum(f: Morphism, g: Morphism) -> Morphism:
    _same_field(f, g)
    return block_diag(f, g)


def add_via_biproduct(f: Morphism, g: Morphism) -> Morphism:
    """``f + g`` computed as codiagonal . (f (+) g) . diagonal."""
    _same_field(f, g)
    if f.shape != g.shape:
        raise LinAlgError(f"cannot add non-parallel morphisms {f.shape} and {g.shape}")
    return codiagonal(cod(f)) @ direct_sum(f, g) @ diagonal(dom(f))


def zero_morphism(a: FdObject, b: FdObject) -> Morphism:
    return a.zero_to(b)


def equalizer(f: Morphism, g: Morphism, tol: ToleranceProfile = DEFAULT_TOL) -> Morphism:
    """Dagger mono ``e`` with ``f e = g e``, universal among such maps."""
    _same_field(f, g)
    if f.shape != g.shape:
        raise LinAlgError(f"equalizer needs parallel morphisms, got {f.shape} and {g.shape}")
    return nullspace(f - g, tol, scale=max(f.fro(), g.fro()))


def kernel(f: Morphism, tol: ToleranceProfile = DEFAULT_TOL) -> Morphism:
    return equalizer(f, Morphism.zeros(f.field, f.rows, f.cols), tol)


def cokernel(f: Morphism, tol: ToleranceProfile = DEFAULT_TOL) -> Morphism:
    """Dagger epi ``c`` with ``c f = 0``: the dagger of ``ker(f^dagger)``."""
    return dagger(kernel(dagger(f), tol))


def cokernel_pair(f: Morphism, tol: ToleranceProfile = DEFAULT_TOL) -> tuple[Morphism, Morphism]:
    """Pushout of ``f`` along itself, as two maps ``cod f -> C``."""
    b = cod(f)
    bp = biproduct(b, b)
    c = cokernel(bp.i @ f - bp.j @ f, tol)
    return c @ bp.i, c @ bp.j


def factorize(f: Morphism, tol: ToleranceProfile = DEFAULT_TOL) -> tuple[Morphism, Morphism]:
    """``f = m e`` with ``m`` a dagger mono onto the range and ``e`` epi."""
    m = range_basis(f, tol)
    return dagger(m) @ f, m


def factorize_via_cokernel_pair(f: Morphism, tol: ToleranceProfile = DEFAULT_TOL) -> tuple[Morphism, Morphism]:
    """Same factorisation, with ``m`` the equalizer of the cokernel pair of ``f``."""
    f1, f2 = cokernel_pair(f, tol)
    m = equalizer(f1, f2, tol)
    return dagger(m) @ f, m


def is_dagger_mono(f: Morphism, tol: ToleranceProfile = DEFAULT_TOL) -> bool:
    return isometry_defect(f) <= tol.zero


def is_dagger_epi(f: Morphism, tol: ToleranceProfile = DEFAULT_TOL) -> bool:
    return isometry_defect(dagger(f)) <= tol.zero


def is_unitary(f: Morphism, tol: ToleranceProfile = DEFAULT_TOL) -> bool:
    return is_dagger_mono(f, tol) and is_dagger_epi(f, tol)


def is_mono(f: Morphism, tol: ToleranceProfile = DEFAULT_TOL) -> bool:
    return kernel(f, tol).cols == 0


def is_epi(f: Morphism, tol: ToleranceProfile = DEFAULT_TOL) -> bool:
    return range_basis(f, tol).cols == f.rows


def additive_inverse_witness(field: FieldTag | str, tol: ToleranceProfile = DEFAULT_TOL) -> tuple[Morphism, Scalar]:
    """Kernel ``(x, y)`` of the codiagonal on K (+) K and the ratio ``y x^-1``.

    ``1 + y x^-1 = 0``, so the ratio is the additive inverse of 1.
    """
    k = FdObject.generator(field)
    ker = kernel(codiagonal(k), tol)
    if ker.cols != 1:
        raise LinAlgError(f"kernel of the codiagonal has {ker.cols} columns, expected 1")
    x, y = ker.entry(0, 0), ker.entry(1, 0)
    return ker, y * scalar_inv(x)


def _scalar_inverse_categorical(lam: Morphism, tol: ToleranceProfile) -> Morphism:
    """Invert a nonzero 1x1 scalar: factor it, see both it and its dagger are monic, invert."""
    e, m = factorize(lam, tol)
    if m.cols != 1:
        raise LinAlgError("nonzero scalar factors through the zero object")
    if not is_mono(dagger(lam), tol) or not is_mono(lam, tol):
        raise LinAlgError("nonzero scalar is not an isomorphism")
    return inv(lam)


def verify_scalar_field(
    field: FieldTag | str,
    trials: int = 1000,
    seed: int = 0,
    tol: ToleranceProfile = DEFAULT_TOL,
) -> Report:
    """Check that the endomorphisms of the generator form a division ring.

    (a) nonzero scalars are invertible, cross-checked against
    ``conj(q)/|q|^2``; (b) the codiagonal on K (+) K has a 1-dimensional
    kernel with both components nonzero, giving -1; (c) the generator is
    simple: every map into it has range of dimension 0 or 1.
    """
    field = FieldTag.parse(field)
    rep = Report(
        f"scalar-field/{field.value}",
        "scalars of the generator form an involutive division ring; generator is simple",
        tolerance=tol.construct,
    )
    one = Morphism.identity(field, 1)

    rng = check_rng(rep.check + "/invert", seed)
    for t in range(trials):
        lam = Morphism.random(field, 1, 1, rng)
        if lam.max_abs() == 0.0:
            continue
        try:
            li = _scalar_inverse_categorical(lam, tol)
        except LinAlgError as exc:
            rep.fail(seed=seed, trial=t, detail=f"(a) {exc}")
            continue
        oracle = scalar_inv(lam.entry(0, 0))
        scale = max(1.0, lam.max_abs() * li.max_abs())
        r = max((lam @ li).diff(one), (li @ lam).diff(one)) / scale
        r = max(r, (li.entry(0, 0) - oracle).norm() / max(oracle.norm(), 1e-300))
        rep.observe(r, tol.construct, seed=seed, trial=t, detail=f"(a) inverse residual {r:.3e}")

    ker, ratio = additive_inverse_witness(field, tol)
    x, y = ker.entry(0, 0), ker.entry(1, 0)
    minus_one = -Scalar.one(field)
    r = (ratio - minus_one).norm()
    rep.observe(r, tol.construct, seed=seed, trial=-1, detail=f"(b) additive inverse ratio off by {r:.3e}")
    rep.check_true(min(x.norm(), y.norm()) > 0, seed=seed, trial=-1, detail="(b) kernel witness has a zero component")
    rep.notes.append(f"additive inverse witness ratio y/x = {list(ratio.comps)}")

    rng = check_rng(rep.check + "/simple", seed)
    for t in range(max(1, trials // 10)):
        src = int(rng.integers(0, 5))
        f = Morphism.random(field, 1, src, rng)
        if rng.random() < 0.2:
            f = Morphism.zeros(field, 1, src)
        sub = range_basis(f, tol)
        nonzero = f.max_abs() > 0
        ok = sub.cols in (0, 1) and (sub.cols == 1) == nonzero
        if ok and sub.cols == 1:
            ok = (sub @ dagger(sub)).diff(one) <= tol.construct
        rep.check_true(ok, seed=seed, trial=t, detail=f"(c) subobject of K with {sub.cols} columns")
    rep.notes.append(
        "generator witnesses are standard basis columns, which are dagger monos; "
        "only the dagger-generator form of the axiom is exercised"
    )
    return rep


# ---------------------------------------------------------------------------
# batteries for the defining structure


def _dim(rng: np.random.Generator, max_dim: int, low: int = 0) -> int:
    return int(rng.integers(low, max_dim + 1))


def check_dagger_laws(field: FieldTag | str, trials: int, seed: int, max_dim: int = 8,
                      tol: ToleranceProfile = DEFAULT_TOL) -> Report:
    field = FieldTag.parse(field)
    rep = Report(
        f"dagger/{field.value}",
        "dagger is an involutive, identity-on-objects contravariant functor",
        tolerance=tol.exact,
    )
    rng = check_rng(rep.check, seed)
    for t in range(trials):
        a, b, c = (_dim(rng, max_dim, 1) for _ in range(3))
        f = Morphism.random(field, b, a, rng)
        g = Morphism.random(field, c, b, rng)
        scale = max(1.0, f.max_abs() * g.max_abs() * b)
        r = max(
            dagger(dagger(f)).diff(f),
            dagger(g @ f).diff(dagger(f) @ dagger(g)) / scale,
            dagger(FdObject(field, a).identity()).diff(FdObject(field, a).identity()),
        )
        rep.observe(r, tol.exact, seed=seed, trial=t)
    return rep


def check_biproduct_addition(field: FieldTag | str, trials: int, seed: int, max_dim: int = 16,
                             tol: ToleranceProfile = DEFAULT_TOL) -> Report:
    """``codiag (f (+) g) diag`` against the entrywise sum, and (f + g)^dagger."""
    field = FieldTag.parse(field)
    rep = Report(
        f"biproducts/{field.value}",
        "dagger biproducts exist and the induced addition is entrywise and commutes with dagger",
        tolerance=tol.exact,
    )
    rng = check_rng(rep.check, seed)
    for t in range(trials):
        a, b = _dim(rng, max_dim), _dim(rng, max_dim)
        f = Morphism.random(field, b, a, rng)
        g = Morphism.random(field, b, a, rng)
        bp = biproduct(FdObject(field, a), FdObject(field, b))
        defect = max(bp.defects().values(), default=0.0)
        s = add_via_biproduct(f, g)
        entrywise = Morphism(field, f.data + g.data)  # oracle: plain array sum
        r = max(defect, s.diff(entrywise), dagger(s).diff(dagger(f) + dagger(g)))
        rep.observe(r, tol.exact, seed=seed, trial=t, detail=f"{b}x{a}: residual {r:.3e}")
    return rep


def _equalizable_pair(field: FieldTag, rng: np.random.Generator, max_dim: int):
    """``f, g: A -> B`` agreeing exactly on the first ``k`` columns of a known unitary."""
    a, b = _dim(rng, max_dim, 1), _dim(rng, max_dim, 1)
    k = int(rng.integers(max(0, a - b), a + 1))  # f - g has rank a - k <= b
    q = random_unitary(field, a, rng)
    known = q.submatrix(slice(None), slice(0, k))
    rest = q.submatrix(slice(None), slice(k, a))
    diff = Morphism.random(field, b, a - k, rng) @ dagger(rest)
    f = Morphism.random(field, b, a, rng)
    return f, f - diff, known


def check_equalizers(field: FieldTag | str, trials: int, seed: int, max_dim: int = 8,
                     tol: ToleranceProfile = DEFAULT_TOL) -> Report:
    """Universal property of the equalizer against an independently built ``h``."""
    field = FieldTag.parse(field)
    rep = Report(
        f"equalizers/{field.value}",
        "every parallel pair has a dagger equalizer through which equalizing maps factor uniquely",
        tolerance=tol.equal,
    )
    rng = check_rng(rep.check, seed)
    for t in range(trials):
        f, g, known = _equalizable_pair(field, rng, max_dim)
        e = equalizer(f, g, tol)
        h = known @ Morphism.random(field, known.cols, _dim(rng, 4, 1), rng)  # f h = g h by construction
        u = dagger(e) @ h  # mediating map
        scale = max(1.0, f.max_abs(), g.max_abs())
        res = {
            "dagger mono": isometry_defect(e),
            "equalizes": (f @ e).diff(g @ e) / scale,
            "rank": 0.0 if e.cols == known.cols else float("inf"),
            "factorisation": (e @ u).diff(h) / max(1.0, h.max_abs()),
            "uniqueness": 0.0 if is_mono(e, tol) else float("inf"),
        }
        name, r = max(res.items(), key=lambda kv: kv[1])
        rep.observe(r, tol.equal, seed=seed, trial=t, detail=f"{name}: residual {r:.3e}")
    ker, ratio = additive_inverse_witness(field, tol)
    r = (ratio + Scalar.one(field)).norm()
    rep.observe(r, tol.construct, seed=seed, trial=-1, detail=f"codiagonal kernel ratio off -1 by {r:.3e}")
    rep.check_true(ker.cols == 1, seed=seed, trial=-1, detail=f"codiagonal kernel has {ker.cols} columns")
    return rep


def check_factorization(field: FieldTag | str, trials: int, seed: int, max_dim: int = 8,
                        tol: ToleranceProfile = DEFAULT_TOL) -> Report:
    field = FieldTag.parse(field)
    rep = Report(
        f"factorization/{field.value}",
        "every map factors as an epi followed by a dagger mono, the mono being an equalizer",
        tolerance=tol.equal,
    )
    rng = check_rng(rep.check, seed)
    for t in range(trials):
        a, b = _dim(rng, max_dim, 1), _dim(rng, max_dim, 1)
        r_ = int(rng.integers(0, min(a, b) + 1))
        f = Morphism.random(field, b, r_, rng) @ Morphism.random(field, r_, a, rng)
        e, m = factorize(f, tol)
        e2, m2 = factorize_via_cokernel_pair(f, tol)
        scale = max(1.0, f.max_abs())
        res = {
            "f = m e": (m @ e).diff(f) / scale,
            "m dagger mono": isometry_defect(m),
            "e epi": 0.0 if is_epi(e, tol) else float("inf"),
            "rank": 0.0 if m.cols == r_ else float("inf"),
            "same image as cokernel-pair route": (m @ dagger(m)).diff(m2 @ dagger(m2)),
        }
        name, r = max(res.items(), key=lambda kv: kv[1])
        rep.observe(r, tol.equal, seed=seed, trial=t, detail=f"{name}: residual {r:.3e}")
    return rep


def check_kernels(field: FieldTag | str, trials: int, seed: int, max_dim: int = 8,
                  tol: ToleranceProfile = DEFAULT_TOL) -> Report:
    """Kernels are dagger monos and every dagger mono is the kernel of its cokernel."""
    field = FieldTag.parse(field)
    rep = Report(
        f"kernels/{field.value}",
        "every dagger mono is a dagger kernel",
        tolerance=tol.equal,
    )
    rng = check_rng(rep.check, seed)
    for t in range(trials):
        n = _dim(rng, max_dim, 1)
        m = random_isometry(field, n, int(rng.integers(0, n + 1)), rng)
        c = cokernel(m, tol)
        k = kernel(c, tol)
        r = max(
            (c @ m).max_abs(),
            isometry_defect(dagger(c)),
            isometry_defect(k),
            (k @ dagger(k)).diff(m @ dagger(m)),
        )
        if k.cols != m.cols:
            r = float("inf")
        rep.observe(r, tol.equal, seed=seed, trial=t, detail=f"rank {m.cols} in dim {n}: residual {r:.3e}")
    return rep


def check_generator(field: FieldTag | str, trials: int, seed: int, max_dim: int = 8,
                    tol: ToleranceProfile = DEFAULT_TOL) -> Report:
    """K is simple and separates parallel pairs through dagger monos K -> A."""
    field = FieldTag.parse(field)
    rep = verify_scalar_field(field, max(1, trials), seed, tol)
    rep.check = f"generator/{field.value}"
    rep.statement_ref = "the unit object is a simple dagger generator whose scalars form a division ring"
    rng = check_rng(rep.check + "/separate", seed)
    for t in range(trials):
        a, b = _dim(rng, max_dim, 1), _dim(rng, max_dim, 1)
        f = Morphism.random(field, b, a, rng)
        g = f if t % 4 == 0 else f + Morphism.random(field, b, a, rng) * 1e-3
        seps = [FdObject(field, a).identity().col(k) for k in range(a)]  # dagger monos K -> A
        separated = any((f @ x).diff(g @ x) > 0.0 for x in seps)
        rep.check_true(separated == (f.diff(g) > 0.0), seed=seed, trial=t, detail="dagger monos failed to separate")
    return rep
