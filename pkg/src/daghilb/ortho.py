"""Dagger subobjects of a finite-dimensional object and their ortholattice.

A :class:`Subobject` is carried by an isometry but compared through its
range projection, since isometries with the same range differ by a unitary
on the right.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .dagcat import FdObject, kernel
from .linalg import (
    LinAlgError,
    Morphism,
    dagger,
    embed_complex,
    gram_schmidt,
    hstack,
    inv,
    isometry_defect,
    nullspace,
    random_isometry,
    range_basis,
    rank,
    vstack,
)
from .report import Report, check_rng
from .scalars import FieldMismatchError, FieldTag, Scalar
from .tolerances import DEFAULT_TOL, ToleranceProfile


class Subobject:
    __slots__ = ("iso", "proj")

    def __init__(self, iso: Morphism, tol: ToleranceProfile = DEFAULT_TOL) -> None:
        defect = isometry_defect(iso)
        if defect > tol.construct * max(1, iso.cols):
            raise LinAlgError(f"subobject needs an isometry (defect {defect:.3e})")
        self.iso = iso
        self.proj = iso @ dagger(iso)

    @classmethod
    def span(cls, vectors: "Morphism | Sequence[Morphism]", field: FieldTag | str | None = None, n: int | None = None) -> "Subobject":
        if not isinstance(vectors, Morphism) and not list(vectors):
            if field is None or n is None:
                raise ValueError("span of no vectors needs field and ambient dimension")
            return cls.bottom(FdObject(field, n))
        iso, _ = gram_schmidt(vectors)
        return cls(iso)

    @classmethod
    def top(cls, h: FdObject) -> "Subobject":
        return cls(h.identity())

    @classmethod
    def bottom(cls, h: FdObject) -> "Subobject":
        return cls(Morphism.zeros(h.field, h.dim, 0))

    @classmethod
    def random(cls, h: FdObject, rng: np.random.Generator, k: int | None = None) -> "Subobject":
        if k is None:
            k = int(rng.integers(0, h.dim + 1))
        return cls(random_isometry(h.field, h.dim, k, rng))

    @property
    def field(self) -> FieldTag:
        return self.iso.field

    @property
    def ambient(self) -> FdObject:
        return FdObject(self.iso.field, self.iso.rows)

    @property
    def rank(self) -> int:
        return self.iso.cols

    def same_as(self, other: "Subobject", tol: ToleranceProfile = DEFAULT_TOL) -> bool:
        _same_ambient(self, other)
        return self.proj.diff(other.proj) <= tol.equal

    def __repr__(self) -> str:
        return f"Subobject({self.field.value}, rank {self.rank} in dim {self.iso.rows})"

    def to_json(self) -> dict:
        return {
            "ambient": self.iso.rows,
            "field": self.field.value,
            "basis": [[list(self.iso.entry(i, j).comps) for i in range(self.iso.rows)] for j in range(self.rank)],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Subobject":
        try:
            field = FieldTag.parse(obj["field"])
            n = int(obj["ambient"])
            basis = obj["basis"]
        except (KeyError, TypeError, ValueError) as exc:
            raise LinAlgError(f"malformed subspace JSON: {exc}") from None
        vecs = []
        for v in basis:
            if len(v) != n:
                raise LinAlgError(f"basis vector of length {len(v)} in ambient dimension {n}")
            vecs.append(Morphism.column(field, [Scalar.from_json(field, x) for x in v]))
        return cls.span(vecs, field, n)


def _same_ambient(f: Subobject, g: Subobject) -> None:
    if f.field is not g.field:
        raise FieldMismatchError(f"field mismatch: {f.field.value} vs {g.field.value}")
    if f.iso.rows != g.iso.rows:
        raise LinAlgError(f"ambient mismatch: {f.iso.rows} vs {g.iso.rows}")


def leq(f: Subobject, g: Subobject, tol: ToleranceProfile = DEFAULT_TOL) -> bool:
    """``f <= g`` iff ``f`` factors through ``g``, i.e. ``g g^dagger f = f``."""
    _same_ambient(f, g)
    return (g.proj @ f.iso).diff(f.iso) <= tol.equal


def orthocomplement(f: Subobject, tol: ToleranceProfile = DEFAULT_TOL) -> Subobject:
    return Subobject(kernel(dagger(f.iso), tol))


def meet(f: Subobject, g: Subobject, tol: ToleranceProfile = DEFAULT_TOL) -> Subobject:
    """Intersection: vectors killed by both complements' daggers."""
    _same_ambient(f, g)
    fp, gp = orthocomplement(f, tol), orthocomplement(g, tol)
    stacked = vstack([dagger(fp.iso), dagger(gp.iso)], f.field, f.iso.rows)
    return Subobject(nullspace(stacked, tol))


def join(f: Subobject, g: Subobject, tol: ToleranceProfile = DEFAULT_TOL) -> Subobject:
    return orthocomplement(meet(orthocomplement(f, tol), orthocomplement(g, tol), tol), tol)


def meet_by_pullback(f: Subobject, g: Subobject, tol: ToleranceProfile = DEFAULT_TOL) -> Subobject:
    """Meet computed as the pullback of ``f`` and ``g`` (equalizer of f.p and g.q)."""
    _same_ambient(f, g)
    a = f.rank
    both = hstack([f.iso, -g.iso], f.field, f.iso.rows)  # f p - g q on A (+) B
    e = nullspace(both, tol)
    leg = e.submatrix(slice(0, a), slice(None)) if a else Morphism.zeros(f.field, 0, e.cols)
    return Subobject(range_basis(f.iso @ leg, tol))


def join_all(family: Iterable[Subobject], h: FdObject, tol: ToleranceProfile = DEFAULT_TOL) -> Subobject:
    return reduce(lambda x, y: join(x, y, tol), family, Subobject.bottom(h))


# ---------------------------------------------------------------------------
# the correspondence with closed subspaces of the hom-space C(K, H)


@dataclass(frozen=True)
class ClosedSubspace:
    """A subspace of the column space ``K^n``, given by any spanning set."""

    generators: Morphism

    @property
    def field(self) -> FieldTag:
        return self.generators.field

    @property
    def ambient_dim(self) -> int:
        return self.generators.rows

    def dim(self, tol: ToleranceProfile = DEFAULT_TOL) -> int:
        return rank(self.generators, tol)

    def perp(self, tol: ToleranceProfile = DEFAULT_TOL) -> "ClosedSubspace":
        """``{x : <x, g> = 0 for every generator g}``."""
        return ClosedSubspace(nullspace(dagger(self.generators), tol))

    def contains(self, x: Morphism, tol: ToleranceProfile = DEFAULT_TOL) -> bool:
        """Membership by least squares against the generators."""
        basis, _ = gram_schmidt(self.generators, tol) if self.generators.cols else (self.generators, 0)
        resid = x - basis @ (dagger(basis) @ x)
        return resid.max_abs() <= tol.equal * max(1.0, x.max_abs())

    def subset(self, other: "ClosedSubspace", tol: ToleranceProfile = DEFAULT_TOL) -> bool:
        return all(other.contains(g, tol) for g in self.generators.columns())

    def same_as(self, other: "ClosedSubspace", tol: ToleranceProfile = DEFAULT_TOL) -> bool:
        return self.subset(other, tol) and other.subset(self, tol)

    def is_closed(self, tol: ToleranceProfile = DEFAULT_TOL) -> bool:
        return self.perp(tol).perp(tol).same_as(self, tol)


def phi(f: Subobject) -> ClosedSubspace:
    """``{f a : a in C(K, A)}``, spanned by ``f`` applied to basis vectors of A."""
    a = FdObject(f.field, f.rank)
    gens = [f.iso @ Morphism.basis_vector(f.field, a.dim, k) for k in range(a.dim)]
    return ClosedSubspace(hstack(gens, f.field, f.iso.rows))


def subobject_of(space: ClosedSubspace, tol: ToleranceProfile = DEFAULT_TOL) -> Subobject:
    """Inverse of :func:`phi`: join of the dagger monos through which each generator factors."""
    h = FdObject(space.field, space.ambient_dim)
    pieces = []
    for g in space.generators.columns():
        m = range_basis(g, tol)  # g = m e with m a dagger mono
        pieces.append(Subobject(m))
    return join_all(pieces, h, tol)


# ---------------------------------------------------------------------------
# orthomodularity


def orthomodular_residual(m: Subobject, tol: ToleranceProfile = DEFAULT_TOL) -> float:
    """``max |m m^dagger + m' m'^dagger - I|`` with ``m'`` the orthocomplement."""
    mp = orthocomplement(m, tol)
    return (m.proj + mp.proj).diff(m.ambient.identity())


def _form_checks(form: Morphism, tol: ToleranceProfile) -> dict[str, float]:
    return {
        "conjugate symmetry": form.diff(dagger(form)),
        "non-singularity": 0.0 if rank(form, tol) == form.rows else float("inf"),
    }


def _form_complement(basis: Morphism, form: Morphism, tol: ToleranceProfile) -> Morphism:
    """Basis of ``{x : <x, b>_G = b^dagger G x = 0 for all b}``."""
    return nullspace(dagger(basis) @ form, tol)


def check_orthomodular(
    h: FdObject,
    trials: int = 1000,
    seed: int = 0,
    tol: ToleranceProfile = DEFAULT_TOL,
    form: Morphism | None = None,
) -> Report:
    """Sample subobjects ``m`` and verify ``H = m (+) m^perp``.

    Without ``form`` the inner product is the standard one and the residual
    is ``|m m^dagger + m' m'^dagger - I|``. With a Gram matrix ``form`` the
    Hermitian-form axioms are checked first, then for sampled subspaces the
    double complement and the splitting ``h = P h + P' h``.
    """
    rep = Report(
        f"orthomodular/{h.field.value}{h.dim}",
        "every closed subspace F of C(K,H) satisfies C(K,H) = F (+) F-perp",
        tolerance=tol.zero,
    )
    rng = check_rng(rep.check, seed)
    if form is not None:
        if form.shape != (h.dim, h.dim) or form.field is not h.field:
            raise LinAlgError("form must be a square matrix over the object's field")
        for name, r in _form_checks(form, tol).items():
            rep.observe(r, tol.zero, seed=seed, trial=-1, detail=f"form fails {name} (residual {r:.3e})")
    if h.dim == 0:
        rep.observe(orthomodular_residual(Subobject.bottom(h), tol), tol.zero, seed=seed, trial=0)
        rep.notes.append("zero object: vacuous")
        return rep
    for t in range(trials):
        m = Subobject.random(h, rng)
        x = Morphism.random(h.field, h.dim, 1, rng)
        if form is None:
            mp = orthocomplement(m, tol)
            r = (m.proj + mp.proj).diff(h.identity())
            split = m.proj @ x + mp.proj @ x
            r = max(r, split.diff(x) / max(1.0, x.max_abs()))
        else:
            b = m.iso
            c = _form_complement(b, form, tol)
            cc = _form_complement(c, form, tol)
            closed = Subobject(range_basis(cc, tol)).proj.diff(m.proj) if cc.cols == b.cols else float("inf")
            both = hstack([b, c], h.field, h.dim)
            if both.cols != h.dim or rank(both, tol) != h.dim:
                r = float("inf")
            else:
                coeffs = inv(both) @ x
                r = max(closed, (both @ coeffs).diff(x) / max(1.0, x.max_abs()))
        rep.observe(r, tol.zero, seed=seed, trial=t, detail=f"rank {m.rank}: residual {r:.3e}")
    return rep


def operation_table(subs: Sequence[Subobject], tol: ToleranceProfile = DEFAULT_TOL) -> dict:
    """Pairwise order, meets, joins and complements of a list of subobjects."""
    if not subs:
        return {"count": 0, "leq": [], "meet_rank": [], "join_rank": [], "complement_of": [], "orthomodular_residual": []}
    for s in subs[1:]:
        _same_ambient(subs[0], s)
    comps = [orthocomplement(s, tol) for s in subs]
    n = len(subs)
    return {
        "count": n,
        "ambient": subs[0].iso.rows,
        "field": subs[0].field.value,
        "ranks": [s.rank for s in subs],
        "leq": [[leq(a, b, tol) for b in subs] for a in subs],
        "meet_rank": [[meet(a, b, tol).rank for b in subs] for a in subs],
        "join_rank": [[join(a, b, tol).rank for b in subs] for a in subs],
        "complement_of": [[j for j in range(n) if comps[i].same_as(subs[j], tol)] for i in range(n)],
        "orthomodular_residual": [orthomodular_residual(s, tol) for s in subs],
    }


# ---------------------------------------------------------------------------
# batteries


def _correlated_pair(field: FieldTag, n: int, rng: np.random.Generator) -> tuple[Subobject, Subobject]:
    """Two subobjects sharing a random common part, so meets are often nonzero."""
    k0 = int(rng.integers(0, n + 1))
    common = random_isometry(field, n, k0, rng)
    a_extra = Morphism.random(field, n, int(rng.integers(0, n - k0 + 1)), rng)
    b_extra = Morphism.random(field, n, int(rng.integers(0, n - k0 + 1)), rng)

    def build(extra: Morphism) -> Subobject:
        cols = hstack([common, extra], field, n)
        return Subobject(range_basis(cols)) if cols.cols else Subobject.bottom(FdObject(field, n))

    return build(a_extra), build(b_extra)


def projector_oracle(gens: Morphism) -> np.ndarray:
    """Orthogonal projector onto the column span, via the pseudo-inverse of the
    complex (or real) form. Independent of the Gram-Schmidt/SVD code paths."""
    a = embed_complex(gens).data if gens.field is FieldTag.H else gens.data
    if a.shape[1] == 0:
        return np.zeros((a.shape[0], a.shape[0]), dtype=a.dtype)
    return a @ np.linalg.pinv(a, rcond=1e-10)


def _oracle_leq(pf: np.ndarray, pg: np.ndarray) -> bool:
    return float(np.abs(pg @ pf - pf).max(initial=0.0)) <= 1e-8


def check_ortholattice(
    field: FieldTag | str, dims: Sequence[int], trials: int, seed: int, tol: ToleranceProfile = DEFAULT_TOL
) -> Report:
    field = FieldTag.parse(field)
    rep = Report(
        f"ortholattice/{field.value}",
        "dagger subobjects form a complete orthomodular ortholattice (complement, De Morgan, bounds, chains)",
        tolerance=tol.equal,
    )
    rng = check_rng(rep.check, seed)
    for t in range(trials):
        n = int(dims[int(rng.integers(0, len(dims)))])
        h = FdObject(field, n)
        a, b = _correlated_pair(field, n, rng)
        ac, bc = orthocomplement(a, tol), orthocomplement(b, tol)
        eye = h.identity()
        zero = Morphism.zeros(field, n, n)
        res = {
            "double complement": orthocomplement(ac, tol).proj.diff(a.proj),
            "De Morgan (meet)": orthocomplement(meet(a, b, tol), tol).proj.diff(join(ac, bc, tol).proj),
            "De Morgan (join)": orthocomplement(join(a, b, tol), tol).proj.diff(meet(ac, bc, tol).proj),
            "a meet a-perp = 0": meet(a, ac, tol).proj.diff(zero),
            "a join a-perp = 1": join(a, ac, tol).proj.diff(eye),
            "meet equals pullback": meet(a, b, tol).proj.diff(meet_by_pullback(a, b, tol).proj),
            "meet is lower bound": 0.0 if leq(meet(a, b, tol), a, tol) and leq(meet(a, b, tol), b, tol) else 1.0,
            "join is upper bound": 0.0 if leq(a, join(a, b, tol), tol) and leq(b, join(a, b, tol), tol) else 1.0,
        }
        # orthomodular law on a <= a v b
        c = join(a, b, tol)
        m = meet(a, b, tol)
        res["orthomodular law"] = join(a, meet(c, ac, tol), tol).proj.diff(c.proj)
        res["absorption"] = max(meet(a, c, tol).proj.diff(a.proj), join(a, m, tol).proj.diff(a.proj))
        res["complement reverses order"] = 0.0 if leq(ac, orthocomplement(m, tol), tol) else 1.0
        # finite completeness proxy: the join of a nested chain is its largest member
        res["directed join"] = join_all([m, a, c], h, tol).proj.diff(c.proj)
        name, worst = max(res.items(), key=lambda kv: kv[1])
        rep.observe(worst, tol.equal, seed=seed, trial=t, detail=f"dim {n}: {name} residual {worst:.3e}")
    return rep


def check_orthomodular_battery(
    field: FieldTag | str, dims: Sequence[int], trials: int, seed: int, tol: ToleranceProfile = DEFAULT_TOL
) -> Report:
    """``|m m^dagger + m' m'^dagger - I|`` over random subobjects of random dimension."""
    field = FieldTag.parse(field)
    rep = Report(
        f"orthomodular/{field.value}",
        "every dagger subobject m satisfies m m^dagger + m-perp m-perp^dagger = 1",
        tolerance=tol.zero,
    )
    rng = check_rng(rep.check, seed)
    for t in range(trials):
        n = int(dims[int(rng.integers(0, len(dims)))])
        m = Subobject.random(FdObject(field, n), rng)
        r = orthomodular_residual(m, tol)
        rep.observe(r, tol.zero, seed=seed, trial=t, detail=f"dim {n}, rank {m.rank}: residual {r:.3e}")
    return rep


def check_phi(
    field: FieldTag | str, dims: Sequence[int], trials: int, seed: int, tol: ToleranceProfile = DEFAULT_TOL
) -> Report:
    """phi preserves and reflects order, preserves complements and is inverted
    by :func:`subobject_of`; compared against the projector oracle."""
    field = FieldTag.parse(field)
    rep = Report(
        f"subspace-correspondence/{field.value}",
        "dagger subobjects of H correspond to closed subspaces of C(K,H), preserving order and complement",
        tolerance=0.0,
    )
    rng = check_rng(rep.check, seed)
    for t in range(trials):
        n = int(dims[int(rng.integers(0, len(dims)))])
        if t % 2:
            g = Subobject.random(FdObject(field, n), rng)
            # f factors through g
            inner_iso = random_isometry(field, g.rank, int(rng.integers(0, g.rank + 1)), rng)
            f = Subobject(g.iso @ inner_iso)
        else:
            f, g = _correlated_pair(field, n, rng)
        pf, pg = projector_oracle(f.iso), projector_oracle(g.iso)
        problems = []
        if phi(f).subset(phi(g), tol) != _oracle_leq(pf, pg):
            problems.append("order")
        if leq(f, g, tol) != _oracle_leq(pf, pg):
            problems.append("lattice order")
        fc = orthocomplement(f, tol)
        pfc = projector_oracle(fc.iso)
        if not phi(fc).same_as(phi(f).perp(tol), tol) or np.abs(pfc - (np.eye(len(pf)) - pf)).max(initial=0.0) > 1e-8:
            problems.append("complement")
        if not subobject_of(phi(f), tol).same_as(f, tol):
            problems.append("inverse")
        if not phi(f).is_closed(tol):
            problems.append("closedness")
        rep.check_true(not problems, seed=seed, trial=t, detail=f"dim {n}: disagreement in {', '.join(problems)}")
    return rep
