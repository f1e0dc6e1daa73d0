"""l2 of a finite label set, orthonormal bases, finite directed colimits and
the hom-functor ``C(K, -)`` into Hilbert spaces over the scalars.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from .dagcat import FdObject
from .linalg import (
    LinAlgError,
    Morphism,
    dagger,
    gram_schmidt,
    hstack,
    inner,
    isometry_defect,
    nullspace,
    random_isometry,
    random_unitary,
)
from .report import Report, check_rng
from .scalars import FieldTag, Scalar
from .tolerances import DEFAULT_TOL, ToleranceProfile
from .unidecomp import UnitaryDecomposition, decompose


class NotOrthonormalError(LinAlgError):
    def __init__(self, deviation: float) -> None:
        super().__init__(f"family is not orthonormal (max Gram deviation {deviation:.3e})")
        self.deviation = deviation


@dataclass(frozen=True)
class OrthonormalFamily:
    ambient: FdObject
    labels: tuple
    members: tuple[Morphism, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "members", tuple(self.members))
        if len(self.labels) != len(self.members):
            raise ValueError("one label per member")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("labels must be distinct")
        for m in self.members:
            if m.field is not self.ambient.field or m.shape != (self.ambient.dim, 1):
                raise LinAlgError(f"member {m!r} is not a vector of {self.ambient}")

    def __len__(self) -> int:
        return len(self.members)

    def gram_deviation(self) -> float:
        """``max |<m_a, m_b> - delta_ab|``."""
        if not self.members:
            return 0.0
        return isometry_defect(hstack(list(self.members)))

    def is_orthonormal(self, tol: ToleranceProfile = DEFAULT_TOL) -> bool:
        return self.gram_deviation() <= tol.zero

    def member(self, label: Hashable) -> Morphism:
        return self.members[self.labels.index(label)]


def l2(labels: Sequence[Hashable], field: FieldTag | str) -> tuple[FdObject, OrthonormalFamily]:
    """``l2 X`` for finite ``X``: the |X|-fold biproduct of the generator with its components."""
    field = FieldTag.parse(field)
    labels = tuple(labels)
    n = len(labels)
    obj = FdObject(field, n)
    comps = [Morphism.basis_vector(field, n, k) for k in range(n)]
    return obj, OrthonormalFamily(obj, labels, comps)


def subset_inclusion(labels: Sequence[Hashable], subset: Sequence[Hashable], field: FieldTag | str) -> Morphism:
    """The map ``(+)_{a in A} K -> l2 X`` induced by the components ``x_a``, ``a in A``."""
    _, fam = l2(labels, field)
    cols = [fam.member(a) for a in subset]
    return hstack(cols, field, len(fam))


def family_to_mono(fam: OrthonormalFamily, tol: ToleranceProfile = DEFAULT_TOL) -> Morphism:
    dev = fam.gram_deviation()
    if dev > tol.zero:
        raise NotOrthonormalError(dev)
    return hstack(list(fam.members), fam.ambient.field, fam.ambient.dim)


def mono_to_family(m: Morphism, labels: Sequence[Hashable] | None = None) -> OrthonormalFamily:
    """Compose a dagger mono ``l2 X -> H`` with the components ``x_a``."""
    labels = tuple(range(m.cols)) if labels is None else tuple(labels)
    return OrthonormalFamily(FdObject(m.field, m.rows), labels, m.columns())


def orthonormal_basis(
    h: FdObject, seed_family: OrthonormalFamily | None = None, tol: ToleranceProfile = DEFAULT_TOL
) -> OrthonormalFamily:
    """Extend ``seed_family`` until the induced mono is invertible.

    Each step takes the first standard basis vector with a nonzero component
    orthogonal to the current family and normalises that component.
    """
    if seed_family is None:
        seed_family = OrthonormalFamily(h, (), ())
    if seed_family.ambient != h:
        raise LinAlgError("seed family lives in a different object")
    members = list(seed_family.members)
    labels = list(seed_family.labels)
    m = family_to_mono(seed_family, tol)
    next_label = 0
    while len(members) < h.dim:
        comp = nullspace(dagger(m), tol)  # kernel of m^dagger, the orthocomplement
        if comp.cols == 0:
            break
        proj = comp @ dagger(comp)
        best = None
        for k in range(h.dim):
            e = Morphism.basis_vector(h.field, h.dim, k)
            r = proj @ e
            if r.fro() > 1e-6:
                best = r
                break
        if best is None:  # cannot happen while comp has columns; keep the loop finite
            best = comp.col(0)
        v = best * (1.0 / best.fro())
        members.append(v)
        while next_label in labels:
            next_label += 1
        labels.append(next_label)
        m = hstack(members)
    return OrthonormalFamily(h, tuple(labels), tuple(members))


# ---------------------------------------------------------------------------
# finite directed diagrams of dagger monos


class NotDirectedError(ValueError):
    pass


@dataclass
class DirectedDiagram:
    """Objects indexed by a finite poset; ``maps[(a, b)]`` for generating relations ``a < b``."""

    objects: dict
    maps: dict
    _closure: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self) -> None:
        for (a, b), t in self.maps.items():
            if a not in self.objects or b not in self.objects:
                raise NotDirectedError(f"edge {a}->{b} mentions an unknown object")
            if t.shape != (self.objects[b].dim, self.objects[a].dim):
                raise LinAlgError(f"transition {a}->{b} has shape {t.shape}")

    def validate(self, tol: ToleranceProfile = DEFAULT_TOL) -> None:
        for (a, b), t in self.maps.items():
            d = isometry_defect(t)
            if d > tol.zero:
                raise LinAlgError(f"transition {a}->{b} is not a dagger mono (defect {d:.3e})")
        self.transitions(tol)

    def transitions(self, tol: ToleranceProfile = DEFAULT_TOL) -> dict:
        """All composite transitions ``(a, b) -> map``, checking path independence."""
        if self._closure:
            return self._closure
        closure: dict = {(a, a): self.objects[a].identity() for a in self.objects}
        succ: dict = {a: [] for a in self.objects}
        for (a, b), t in self.maps.items():
            succ[a].append((b, t))
        for a in self.objects:
            stack = [(a, self.objects[a].identity(), {a})]
            while stack:
                x, acc, seen = stack.pop()
                for y, t in succ[x]:
                    if y in seen:
                        raise NotDirectedError(f"cycle through {y}: not a poset")
                    comp = t @ acc
                    if (a, y) in closure:
                        r = closure[(a, y)].diff(comp)
                        if r > tol.zero:
                            raise LinAlgError(f"diagram does not commute on {a}->{y} (residual {r:.3e})")
                    else:
                        closure[(a, y)] = comp
                    stack.append((y, comp, seen | {y}))
        self._closure = closure
        return closure

    def leq(self, a, b) -> bool:
        return (a, b) in self.transitions()

    def maximum(self):
        """The top element; a finite poset is directed exactly when it has one."""
        if not self.objects:
            raise NotDirectedError("empty diagram is not directed")
        tops = [b for b in self.objects if all(self.leq(a, b) for a in self.objects)]
        if not tops:
            pair = next(
                (a, b) for a in self.objects for b in self.objects
                if not any(self.leq(a, c) and self.leq(b, c) for c in self.objects)
            )
            raise NotDirectedError(f"{pair[0]!r} and {pair[1]!r} have no upper bound")
        return tops[0]

    @classmethod
    def from_json(cls, obj: Mapping) -> "DirectedDiagram":
        field = FieldTag.parse(obj["field"])
        objects = {str(k): FdObject(field, int(v)) for k, v in obj["objects"].items()}
        maps = {}
        for edge in obj["edges"]:
            maps[(str(edge["from"]), str(edge["to"]))] = Morphism.from_json(edge["map"])
        return cls(objects, maps)

    def to_json(self) -> dict:
        field = next(iter(self.objects.values())).field if self.objects else FieldTag.R
        return {
            "field": field.value,
            "objects": {str(k): v.dim for k, v in self.objects.items()},
            "edges": [{"from": str(a), "to": str(b), "map": t.to_json()} for (a, b), t in self.maps.items()],
        }


def directed_colimit(d: DirectedDiagram, tol: ToleranceProfile = DEFAULT_TOL) -> tuple[FdObject, dict]:
    """Apex and cocone legs. For a finite directed poset this is the top object."""
    d.validate(tol)
    top = d.maximum()
    legs = {a: d.transitions(tol)[(a, top)] for a in d.objects}
    return d.objects[top], legs


def cocone_mediator(d: DirectedDiagram, legs: Mapping, other_legs: Mapping, tol: ToleranceProfile = DEFAULT_TOL) -> Morphism:
    """The unique ``u`` with ``other_legs[a] = u . legs[a]``; raises if none exists."""
    top = d.maximum()
    u = other_legs[top]
    for a, leg in legs.items():
        r = (u @ leg).diff(other_legs[a])
        if r > tol.equal:
            raise LinAlgError(f"cocone does not factor at {a!r} (residual {r:.3e})")
    return u


# ---------------------------------------------------------------------------
# hom-functor C(K, -)


@dataclass(frozen=True)
class HomSpace:
    """``C(K, H)`` as the column space ``K^dim`` with ``<u, v> = v^dagger u``."""

    field: FieldTag
    dim: int

    def inner(self, u: Morphism, v: Morphism) -> Scalar:
        return inner(u, v)

    def basis(self) -> list[Morphism]:
        return [Morphism.basis_vector(self.field, self.dim, k) for k in range(self.dim)]

    def random_vector(self, rng: np.random.Generator) -> Morphism:
        return Morphism.random(self.field, self.dim, 1, rng)


@dataclass(frozen=True)
class BoundedMap:
    """``C(K, f)``: post-composition with ``f``."""

    source: HomSpace
    target: HomSpace
    matrix: Morphism

    def __call__(self, h: Morphism) -> Morphism:
        return self.matrix @ h

    def adjoint(self) -> "BoundedMap":
        return BoundedMap(self.target, self.source, dagger(self.matrix))

    def then(self, other: "BoundedMap") -> "BoundedMap":
        return BoundedMap(self.source, other.target, other.matrix @ self.matrix)

    def __add__(self, other: "BoundedMap") -> "BoundedMap":
        return BoundedMap(self.source, self.target, self.matrix + other.matrix)


def hom_functor(h: FdObject) -> HomSpace:
    return HomSpace(h.field, h.dim)


def hom_map(f: Morphism) -> BoundedMap:
    return BoundedMap(HomSpace(f.field, f.cols), HomSpace(f.field, f.rows), f)


def adjoint_residual(f: Morphism, rng: np.random.Generator, samples: int = 4) -> float:
    """Worst ``|<f^dagger h2, h1> - <h2, f h1>|`` over random pairs."""
    F, Fd = hom_map(f), hom_map(dagger(f))
    worst = 0.0
    for _ in range(samples):
        h1 = F.source.random_vector(rng)
        h2 = F.target.random_vector(rng)
        lhs = inner(Fd(h2), h1)
        rhs = inner(h2, F(h1))
        worst = max(worst, (lhs - rhs).norm())
    return worst


# ---------------------------------------------------------------------------
# fullness: lifting bounded maps through unitary decompositions


def lift_unitary(u: Morphism, tol: ToleranceProfile = DEFAULT_TOL) -> Morphism:
    """The endomorphism of ``l2 X`` induced by the orthonormal basis ``U(x_a)``."""
    labels = tuple(range(u.cols))
    obj, comps = l2(labels, u.field)
    images = OrthonormalFamily(FdObject(u.field, u.rows), labels, [u @ x for x in comps.members])
    return family_to_mono(images, tol)


@dataclass
class FullnessResult:
    t: Morphism
    decomposition: UnitaryDecomposition
    reductions: list[str]


def _needs_even(field: FieldTag) -> bool:
    return field is not FieldTag.C


def full_via_unitaries(
    T: Morphism, tol: ToleranceProfile = DEFAULT_TOL, shortcut: bool = False
) -> tuple[Morphism, UnitaryDecomposition]:
    """Find ``t`` with ``C(K, t) = T`` by the reductions to the unitary case."""
    res = _full(T, tol, shortcut, [])
    return res.t, res.decomposition


def full_via_unitaries_traced(T: Morphism, tol: ToleranceProfile = DEFAULT_TOL, shortcut: bool = False) -> FullnessResult:
    return _full(T, tol, shortcut, [])


def _full(T: Morphism, tol: ToleranceProfile, shortcut: bool, trail: list[str]) -> FullnessResult:
    if T.cols > T.rows:
        trail.append(f"dagger: {T.rows}x{T.cols} -> {T.cols}x{T.rows}")
        inner_res = _full(dagger(T), tol, shortcut, trail)
        return FullnessResult(dagger(inner_res.t), inner_res.decomposition, trail)
    if T.cols < T.rows or (_needs_even(T.field) and T.rows % 2):
        # pad along a dagger mono m: H1 -> H2 and lift T m^dagger (square, even where needed)
        n2 = T.rows + (T.rows % 2 if _needs_even(T.field) else 0)
        m = Morphism.from_real(T.field, np.eye(n2, T.cols))
        embed_out = Morphism.from_real(T.field, np.eye(n2, T.rows))
        square = embed_out @ T @ dagger(m)
        trail.append(f"pad by dagger mono: {T.rows}x{T.cols} -> {n2}x{n2}")
        inner_res = _full(square, tol, shortcut, trail)
        t = dagger(embed_out) @ inner_res.t @ m
        return FullnessResult(t, inner_res.decomposition, trail)
    if shortcut:
        trail.append("shortcut: t = T")
        return FullnessResult(T, UnitaryDecomposition(T.field, [], 0.0, {"path": "shortcut"}), trail)
    dec = decompose(T, tol)
    t = Morphism.zeros(T.field, T.rows, T.cols)
    for coeff, u in dec.terms:
        t = t + lift_unitary(u, tol).lscale(coeff)
    trail.append(f"{len(dec.terms)} unitary terms lifted")
    return FullnessResult(t, dec, trail)


# ---------------------------------------------------------------------------
# the equivalence audit


def _rand_dim(rng: np.random.Generator, dims: Sequence[int]) -> int:
    return int(dims[int(rng.integers(0, len(dims)))])


def check_faithful(field: FieldTag, dims: Sequence[int], trials: int, seed: int, tol: ToleranceProfile = DEFAULT_TOL) -> Report:
    rep = Report(
        f"faithful/{field.value}",
        "C(K,-) is faithful: distinct parallel maps are separated by some h: K -> H",
        tolerance=0.0,
    )
    rng = check_rng(rep.check, seed)
    for t in range(trials):
        n, m = max(1, _rand_dim(rng, dims)), max(1, _rand_dim(rng, dims))
        f = Morphism.random(field, m, n, rng)
        g = f
        if t % 5 != 4:
            i, j = int(rng.integers(0, m)), int(rng.integers(0, n))
            bump = np.zeros(g.data.shape)
            bump[i, j] = rng.standard_normal(bump.shape[2:]) if field is FieldTag.H else 1.0 + rng.random()
            g = Morphism(field, g.data + bump)
        separated = any((f @ h).diff(g @ h) > 0.0 for h in hom_functor(FdObject(field, n)).basis())
        rep.check_true(separated == (f.diff(g) > 0.0), seed=seed, trial=t, detail="basis vectors failed to separate")
    rep.notes.append("separating vectors are basis columns, i.e. dagger monos K -> H")
    return rep


def check_essentially_surjective(
    field: FieldTag, dims: Sequence[int], trials: int, seed: int, tol: ToleranceProfile = DEFAULT_TOL
) -> Report:
    rep = Report(
        f"essentially-surjective/{field.value}",
        "every finite-dimensional inner-product space is unitarily isomorphic to C(K, l2 X)",
        tolerance=tol.equal,
    )
    rng = check_rng(rep.check, seed)
    for t in range(trials):
        n = _rand_dim(rng, dims)
        # abstract space K^n with inner product <u, v>_G = v^dagger G u, G = L^dagger L
        L = Morphism.random(field, n, n, rng) + Morphism.identity(field, n) * float(n)
        G = dagger(L) @ L
        B, r = gram_schmidt(Morphism.identity(field, n), tol, gram=G)
        if r != n:
            rep.fail(seed=seed, trial=t, detail=f"Gram-Schmidt found {r} of {n} basis vectors")
            continue
        obj, fam = l2(tuple(range(n)), field)
        W = B @ family_to_mono(fam, tol)  # l2 X -> (K^n, G), x_a -> b_a
        W_adj = dagger(W) @ G  # adjoint w.r.t. G on the target
        eye = Morphism.identity(field, n)
        res = max((W_adj @ W).diff(eye), (W @ W_adj).diff(eye)) if n else 0.0
        rep.observe(res, tol.equal, seed=seed, trial=t, detail=f"dim {n}: comparison unitary residual {res:.3e}")
    return rep


def check_full(
    field: FieldTag, dims: Sequence[int], trials: int, seed: int, tol: ToleranceProfile = DEFAULT_TOL
) -> Report:
    rep = Report(
        f"full/{field.value}",
        "every bounded map C(K,H1) -> C(K,H2) is C(K,t), via a combination of lifted unitaries",
        tolerance=tol.equal,
    )
    rng = check_rng(rep.check, seed)
    worst_terms = 0
    for t in range(trials):
        n1, n2 = max(1, _rand_dim(rng, dims)), max(1, _rand_dim(rng, dims))
        T = Morphism.random(field, n2, n1, rng)
        try:
            lifted, dec = full_via_unitaries(T, tol)
        except LinAlgError as exc:
            rep.fail(seed=seed, trial=t, detail=f"{n2}x{n1}: {exc}")
            continue
        worst_terms = max(worst_terms, len(dec.terms))
        res = lifted.diff(T)
        rep.observe(res, tol.equal, seed=seed, trial=t, detail=f"{n2}x{n1}: |t - T| = {res:.3e}")
    rep.notes.append(f"largest unitary term count used: {worst_terms}")
    return rep


def check_dagger_functor(
    field: FieldTag, dims: Sequence[int], trials: int, seed: int, tol: ToleranceProfile = DEFAULT_TOL
) -> Report:
    rep = Report(
        f"dagger-functor/{field.value}",
        "C(K,-) preserves dagger, composition, identities and addition",
        tolerance=tol.zero,
    )
    rng = check_rng(rep.check, seed)
    for t in range(trials):
        a, b, c = (max(1, _rand_dim(rng, dims)) for _ in range(3))
        f = Morphism.random(field, b, a, rng)
        g = Morphism.random(field, c, b, rng)
        f2 = Morphism.random(field, b, a, rng)
        h = Morphism.random(field, a, 1, rng)
        r = adjoint_residual(f, rng, 2) / max(1.0, f.max_abs())
        r = max(r, (hom_map(g @ f)(h)).diff(hom_map(g)(hom_map(f)(h))))
        r = max(r, hom_map(FdObject(field, a).identity())(h).diff(h))
        r = max(r, (hom_map(f) + hom_map(f2))(h).diff(hom_map(f)(h) + hom_map(f2)(h)))
        rep.observe(r, tol.zero * 10, seed=seed, trial=t)
    return rep


def verify_equivalence(
    fields: Iterable[FieldTag | str],
    dims: Sequence[int],
    trials: int,
    seed: int,
    tol: ToleranceProfile = DEFAULT_TOL,
) -> list[Report]:
    out: list[Report] = []
    for fld in fields:
        fld = FieldTag.parse(fld)
        out.append(check_dagger_functor(fld, dims, trials, seed, tol))
        out.append(check_faithful(fld, dims, trials, seed, tol))
        out.append(check_essentially_surjective(fld, dims, trials, seed, tol))
        out.append(check_full(fld, dims, trials, seed, tol))
    out[-1].notes.append(
        "open: whether the finite equivalence can be exhibited without dagger-mono separators is not decided"
    )
    return out


def random_directed_diagram(field: FieldTag, rng: np.random.Generator, max_dim: int = 6) -> DirectedDiagram:
    """A diamond ``a, b <= c <= d`` plus a chain ``e <= c`` of dagger monos."""
    dd = int(rng.integers(1, max_dim + 1))
    dc = int(rng.integers(0, dd + 1))
    da, db, de = (int(rng.integers(0, dc + 1)) for _ in range(3))
    objs = {k: FdObject(field, v) for k, v in dict(a=da, b=db, c=dc, d=dd, e=de).items()}
    maps = {
        ("a", "c"): random_isometry(field, dc, da, rng),
        ("b", "c"): random_isometry(field, dc, db, rng),
        ("e", "c"): random_isometry(field, dc, de, rng),
        ("c", "d"): random_isometry(field, dd, dc, rng),
    }
    return DirectedDiagram(objs, maps)


def check_directed_colimits(field: FieldTag | str, trials: int, seed: int, tol: ToleranceProfile = DEFAULT_TOL) -> Report:
    field = FieldTag.parse(field)
    rep = Report(
        f"directed-colimits/{field.value}",
        "directed diagrams of dagger monos have colimits with dagger-mono legs",
        tolerance=tol.equal,
    )
    rep.notes.append("finite directed posets only; the colimit is the top object")
    rng = check_rng(rep.check, seed)
    for t in range(trials):
        d = random_directed_diagram(field, rng)
        try:
            apex, legs = directed_colimit(d, tol)
        except (LinAlgError, NotDirectedError) as exc:
            rep.fail(seed=seed, trial=t, detail=str(exc))
            continue
        trans = d.transitions(tol)
        r = max(isometry_defect(leg) for leg in legs.values())
        for (x, y), m in trans.items():
            r = max(r, (legs[y] @ m).diff(legs[x]))
        # another cocone: legs followed by a unitary; the mediator must be that unitary
        v = random_unitary(field, apex.dim, rng)
        other = {k: v @ leg for k, leg in legs.items()}
        try:
            u = cocone_mediator(d, legs, other, tol)
            r = max(r, u.diff(v))
        except LinAlgError:
            r = float("inf")
        rep.observe(r, tol.equal, seed=seed, trial=t, detail=f"colimit residual {r:.3e}")
    return rep
