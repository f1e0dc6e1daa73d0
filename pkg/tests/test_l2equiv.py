import numpy as np
import pytest

from daghilb.dagcat import FdObject
from daghilb.l2equiv import (
    DirectedDiagram,
    NotDirectedError,
    NotOrthonormalError,
    OrthonormalFamily,
    adjoint_residual,
    check_directed_colimits,
    check_dagger_functor,
    check_essentially_surjective,
    check_faithful,
    check_full,
    cocone_mediator,
    directed_colimit,
    family_to_mono,
    full_via_unitaries,
    full_via_unitaries_traced,
    hom_functor,
    hom_map,
    l2,
    lift_unitary,
    mono_to_family,
    orthonormal_basis,
    random_directed_diagram,
    subset_inclusion,
)
from daghilb.linalg import LinAlgError, Morphism, isometry_defect, random_isometry, random_unitary
from daghilb.scalars import Scalar


def test_l2_components_are_orthonormal(field):
    obj, fam = l2(["a", "b", "c"], field)
    assert obj.dim == 3 and len(fam) == 3
    assert fam.gram_deviation() == 0.0
    assert family_to_mono(fam) == obj.identity()


def test_subset_inclusion(field):
    inc = subset_inclusion(["a", "b", "c"], ["c", "a"], field)
    assert inc.shape == (3, 2)
    assert isometry_defect(inc) == 0.0
    assert inc.col(0) == Morphism.basis_vector(field, 3, 2)


def test_non_orthonormal_family_reports_deviation(field):
    h = FdObject(field, 2)
    v = Morphism.basis_vector(field, 2, 0)
    fam = OrthonormalFamily(h, ("x", "y"), (v, v * 1.5))
    with pytest.raises(NotOrthonormalError) as exc:
        family_to_mono(fam)
    assert exc.value.deviation == pytest.approx(1.5)
    assert not fam.is_orthonormal()


def test_family_validation(field):
    h = FdObject(field, 2)
    v = Morphism.basis_vector(field, 2, 0)
    with pytest.raises(ValueError):
        OrthonormalFamily(h, ("x", "x"), (v, v))
    with pytest.raises(LinAlgError):
        OrthonormalFamily(h, ("x",), (Morphism.basis_vector(field, 3, 0),))


def test_mono_family_roundtrip(field, rng):
    m = random_isometry(field, 5, 3, rng)
    fam = mono_to_family(m, "pqr")
    assert fam.labels == ("p", "q", "r")
    assert family_to_mono(fam) == m


def test_orthonormal_basis_extends_seed(field, rng):
    h = FdObject(field, 5)
    seed_fam = mono_to_family(random_isometry(field, 5, 2, rng), ["s0", "s1"])
    basis = orthonormal_basis(h, seed_fam)
    assert len(basis) == 5
    assert basis.labels[:2] == ("s0", "s1")
    m = family_to_mono(basis)
    assert isometry_defect(m) <= 1e-12
    assert m.rows == m.cols == 5


def test_orthonormal_basis_from_nothing(field):
    b = orthonormal_basis(FdObject(field, 3))
    assert family_to_mono(b) == FdObject(field, 3).identity()
    assert len(orthonormal_basis(FdObject(field, 0))) == 0


# -- directed diagrams ----------------------------------------------------------


def _chain(field, rng, dims=(1, 2, 4)):
    names = [str(i) for i in range(len(dims))]
    objs = {n: FdObject(field, d) for n, d in zip(names, dims)}
    maps = {(names[i], names[i + 1]): random_isometry(field, dims[i + 1], dims[i], rng) for i in range(len(dims) - 1)}
    return DirectedDiagram(objs, maps)


def test_chain_colimit_is_the_top(field, rng):
    d = _chain(field, rng)
    apex, legs = directed_colimit(d)
    assert apex.dim == 4
    assert legs["2"] == apex.identity()
    assert (legs["1"] @ d.maps[("0", "1")]).diff(legs["0"]) <= 1e-12


def test_cocone_mediator_is_unique(field, rng):
    d = _chain(field, rng)
    apex, legs = directed_colimit(d)
    v = random_unitary(field, apex.dim, rng)
    other = {k: v @ leg for k, leg in legs.items()}
    assert cocone_mediator(d, legs, other).diff(v) <= 1e-12
    broken = dict(other)
    broken["0"] = broken["0"] * 2.0
    with pytest.raises(LinAlgError):
        cocone_mediator(d, legs, broken)


def test_non_directed_diagram_rejected(field, rng):
    objs = {k: FdObject(field, 1) for k in "abc"}
    maps = {("a", "b"): Morphism.identity(field, 1), ("a", "c"): Morphism.identity(field, 1)}
    with pytest.raises(NotDirectedError, match="no upper bound"):
        directed_colimit(DirectedDiagram(objs, maps))


def test_non_commuting_diamond_rejected(field, rng):
    objs = {"a": FdObject(field, 1), "b": FdObject(field, 2), "c": FdObject(field, 2), "d": FdObject(field, 3)}
    e = Morphism.basis_vector
    maps = {
        ("a", "b"): e(field, 2, 0),
        ("a", "c"): e(field, 2, 0),
        ("b", "d"): Morphism.from_real(field, np.eye(3, 2)),
        ("c", "d"): Morphism.from_real(field, np.eye(3, 2)[::-1].copy()),
    }
    with pytest.raises(LinAlgError, match="does not commute"):
        directed_colimit(DirectedDiagram(objs, maps))


def test_cycle_rejected(field):
    objs = {k: FdObject(field, 1) for k in "ab"}
    i = Morphism.identity(field, 1)
    with pytest.raises(NotDirectedError):
        DirectedDiagram(objs, {("a", "b"): i, ("b", "a"): i}).transitions()


def test_non_mono_transition_rejected(field):
    objs = {"a": FdObject(field, 1), "b": FdObject(field, 1)}
    with pytest.raises(LinAlgError, match="dagger mono"):
        DirectedDiagram(objs, {("a", "b"): Morphism.identity(field, 1) * 2.0}).validate()


def test_diagram_json_roundtrip(field, rng):
    d = random_directed_diagram(field, rng)
    e = DirectedDiagram.from_json(d.to_json())
    assert set(e.objects) == set(d.objects)
    for k, m in d.maps.items():
        assert e.maps[k] == m


# -- the hom-functor --------------------------------------------------------


def test_hom_functor_adjoint(field, rng):
    f = Morphism.random(field, 3, 4, rng)
    assert adjoint_residual(f, rng, 8) <= 1e-12
    assert hom_map(f).adjoint().matrix.diff(hom_map(f).matrix.dagger()) == 0.0
    assert len(hom_functor(FdObject(field, 4)).basis()) == 4


def test_lift_unitary_recovers_the_unitary(field, rng):
    u = random_unitary(field, 4, rng)
    assert lift_unitary(u).diff(u) <= 1e-14


@pytest.mark.parametrize("shape", [(3, 3), (4, 4), (2, 5), (5, 2), (1, 1), (3, 1)])
def test_fullness_on_every_shape(field, rng, shape):
    T = Morphism.random(field, *shape, rng)
    t, dec = full_via_unitaries(T)
    assert t.diff(T) <= 1e-8
    assert len(dec.terms) <= (4 if field.value == "C" else 5)


def test_fullness_trace_names_reductions(rng):
    res = full_via_unitaries_traced(Morphism.random("R", 3, 2, rng))
    assert any("pad" in step for step in res.reductions)
    res = full_via_unitaries_traced(Morphism.random("H", 2, 3, rng))
    assert res.reductions[0].startswith("dagger")
    res = full_via_unitaries_traced(Morphism.random("C", 2, 2, rng), shortcut=True)
    assert res.reductions[-1] == "shortcut: t = T"


@pytest.mark.parametrize(
    "battery", [check_dagger_functor, check_faithful, check_essentially_surjective, check_full]
)
def test_equivalence_batteries(battery, field):
    rep = battery(field, [0, 1, 2, 3, 5], 30, 6)
    assert rep.passed, rep.failures


def test_directed_colimit_battery(field):
    rep = check_directed_colimits(field, 40, 3)
    assert rep.passed, rep.failures


def test_single_label_is_the_generator(field):
    obj, fam = l2(["a"], field)
    assert obj == FdObject.generator(field)
    assert fam.member("a") == Morphism.identity(field, 1)


def test_complex_unit_family_and_empty_family():
    r = 1 / np.sqrt(2)
    v = Morphism.from_scalars("C", [[Scalar.of(r, "C")], [Scalar.of(1j * r, "C")]])
    fam = OrthonormalFamily(FdObject("C", 2), ("v",), (v,))
    assert family_to_mono(fam) == v
    assert isometry_defect(v) <= 1e-15
    empty = OrthonormalFamily(FdObject("C", 2), (), ())
    assert family_to_mono(empty).shape == (2, 0)


def test_seed_basis_is_returned_unchanged(field, rng):
    u = random_unitary(field, 3, rng)
    fam = mono_to_family(u)
    out = orthonormal_basis(FdObject(field, 3), fam)
    assert out.members == fam.members and out.labels == fam.labels


def test_singleton_diagram_has_identity_cocone(field):
    d = DirectedDiagram({"x": FdObject(field, 2)}, {})
    apex, legs = directed_colimit(d)
    assert apex.dim == 2 and legs["x"] == Morphism.identity(field, 2)


def test_real_diagonal_adjoint_identity(rng):
    f = Morphism.from_real("R", np.diag([2.0, 3.0]))
    assert adjoint_residual(f, rng, 20) <= 1e-14


def test_faithful_on_single_entry_difference(field):
    f = Morphism.zeros(field, 2, 2)
    bump = np.zeros(f.data.shape)
    bump[(0, 0) + (0,) * (bump.ndim - 2)] = 1.0  # real part of entry (1, 1)
    g = Morphism(field, f.data + bump)
    e1 = Morphism.basis_vector(field, 2, 0)
    assert (f @ e1).diff(g @ e1) == 1.0
    assert (f @ Morphism.basis_vector(field, 2, 1)).diff(g @ Morphism.basis_vector(field, 2, 1)) == 0.0


def test_lift_of_scalar_multiple_of_identity():
    # the skew part is exactly zero and is skipped, so two terms suffice here
    T = Morphism.from_real("C", np.diag([0.3, 0.3]))
    t, dec = full_via_unitaries(T)
    assert len(dec.terms) == 2
    assert t.diff(T) <= 1e-12
