import numpy as np
import pytest

from daghilb.dagcat import FdObject
from daghilb.linalg import LinAlgError, Morphism, dagger, random_unitary
from daghilb.ortho import (
    Subobject,
    check_orthomodular,
    check_orthomodular_battery,
    check_ortholattice,
    check_phi,
    join,
    join_all,
    leq,
    meet,
    meet_by_pullback,
    operation_table,
    orthocomplement,
    orthomodular_residual,
    phi,
    projector_oracle,
    subobject_of,
)
from daghilb.scalars import FieldMismatchError, Scalar


def _basis(field, n, idx):
    return Subobject.span([Morphism.basis_vector(field, n, k) for k in idx], field, n)


def test_coordinate_lattice(field):
    n = 4
    a, b = _basis(field, n, [0, 1]), _basis(field, n, [1, 2])
    assert meet(a, b).same_as(_basis(field, n, [1]))
    assert join(a, b).same_as(_basis(field, n, [0, 1, 2]))
    assert orthocomplement(a).same_as(_basis(field, n, [2, 3]))
    assert leq(_basis(field, n, [1]), a)
    assert not leq(a, b)


def test_bounds(field, rng):
    h = FdObject(field, 3)
    a = Subobject.random(h, rng, 2)
    top, bot = Subobject.top(h), Subobject.bottom(h)
    assert leq(bot, a) and leq(a, top)
    assert meet(a, top).same_as(a) and join(a, bot).same_as(a)
    assert orthocomplement(top).same_as(bot)


def test_non_distributive(field):
    # three lines in a plane: x meet (y join z) = x but (x meet y) join (x meet z) = 0
    n = 2
    e0 = Morphism.basis_vector(field, n, 0)
    e1 = Morphism.basis_vector(field, n, 1)
    x, y, z = (Subobject.span([v], field, n) for v in (e0, e1, e0 + e1))
    lhs = meet(x, join(y, z))
    rhs = join(meet(x, y), meet(x, z))
    assert lhs.rank == 1 and rhs.rank == 0


def test_meet_by_pullback_agrees(field, rng):
    h = FdObject(field, 5)
    common = Subobject.random(h, rng, 2)
    a = Subobject.span([common.iso, Morphism.random(field, 5, 1, rng)])
    b = Subobject.span([common.iso, Morphism.random(field, 5, 1, rng)])
    assert meet(a, b).same_as(meet_by_pullback(a, b))
    assert meet(a, b).same_as(common)


def test_orthomodular_residual_small(field, rng):
    for k in range(5):
        m = Subobject.random(FdObject(field, 4), rng, k)
        assert orthomodular_residual(m) <= 1e-12


def test_subobject_requires_isometry(rng):
    with pytest.raises(LinAlgError):
        Subobject(Morphism.random("R", 3, 2, rng) * 3.0)


def test_mixed_ambients_rejected(rng):
    with pytest.raises(LinAlgError):
        leq(Subobject.random(FdObject("C", 2), rng), Subobject.random(FdObject("C", 3), rng))
    with pytest.raises(FieldMismatchError):
        meet(Subobject.random(FdObject("C", 2), rng), Subobject.random(FdObject("R", 2), rng))


def test_json_roundtrip(field, rng):
    a = Subobject.random(FdObject(field, 4), rng, 2)
    b = Subobject.from_json(a.to_json())
    assert a.same_as(b)
    with pytest.raises(LinAlgError):
        Subobject.from_json({"field": "R", "ambient": 3, "basis": [[[1.0], [0.0]]]})
    with pytest.raises(LinAlgError):
        Subobject.from_json({"field": "R"})


def test_phi_roundtrip_and_oracle(field, rng):
    h = FdObject(field, 4)
    f = Subobject.random(h, rng, 2)
    space = phi(f)
    assert space.dim() == 2
    assert subobject_of(space).same_as(f)
    p = projector_oracle(f.iso)
    q = projector_oracle(space.generators)
    np.testing.assert_allclose(p, q, atol=1e-10)
    assert space.perp().same_as(phi(orthocomplement(f)))


def test_closed_subspace_membership(field, rng):
    f = Subobject.random(FdObject(field, 3), rng, 1)
    space = phi(f)
    assert space.contains(f.iso)
    e = orthocomplement(f).iso.col(0)
    assert not space.contains(e)


def test_chain_operation_table(field, rng):
    u = random_unitary(field, 3, rng)
    chain = [Subobject(u.submatrix(slice(None), slice(0, k))) for k in range(4)]
    table = operation_table(chain)
    leq_m = np.array(table["leq"])
    np.testing.assert_array_equal(leq_m, np.triu(np.ones((4, 4), dtype=bool)))
    assert table["meet_rank"] == [[min(i, j) for j in range(4)] for i in range(4)]
    assert table["join_rank"] == [[max(i, j) for j in range(4)] for i in range(4)]
    assert table["complement_of"][0] == [3] and table["complement_of"][3] == [0]
    assert table["ranks"] == [0, 1, 2, 3]


def test_empty_operation_table():
    t = operation_table([])
    assert t["count"] == 0 and t["leq"] == []


def test_orthomodular_with_standard_and_custom_forms(field, rng):
    h = FdObject(field, 4)
    assert check_orthomodular(h, 50, 1).passed
    l = Morphism.random(field, 4, 4, rng) + Morphism.identity(field, 4) * 4.0
    g = dagger(l) @ l
    assert check_orthomodular(h, 30, 1, form=g).passed


def test_corrupted_form_fails(rng):
    h = FdObject("C", 3)
    bad = Morphism.random("C", 3, 3, rng)  # not self-adjoint
    rep = check_orthomodular(h, 10, 1, form=bad)
    assert not rep.passed
    assert any("conjugate symmetry" in f["detail"] for f in rep.failures)


def test_zero_dimensional_instance():
    assert check_orthomodular(FdObject("H", 0), 5, 0).passed


@pytest.mark.parametrize("battery", [check_ortholattice, check_orthomodular_battery, check_phi])
def test_batteries(battery, field):
    rep = battery(field, [0, 1, 2, 3, 5], 40, 11)
    assert rep.passed, rep.failures


def test_complex_line_complement():
    v = Morphism.from_scalars("C", [[Scalar.of(1 / np.sqrt(2), "C")], [Scalar.of(1j / np.sqrt(2), "C")]])
    m = Subobject(v)
    p = m.proj.data
    np.testing.assert_allclose(p, np.array([[1, -1j], [1j, 1]]) / 2, atol=1e-15)
    np.testing.assert_allclose(orthocomplement(m).proj.data, np.eye(2) - p, atol=1e-15)
    assert orthomodular_residual(m) <= 1e-15


def test_complement_reverses_order_and_absorption(field, rng):
    h = FdObject(field, 5)
    g = Subobject.random(h, rng, 3)
    f = Subobject(g.iso @ random_unitary(field, 3, rng).submatrix(slice(None), slice(0, 1)))
    assert leq(f, g)
    assert leq(orthocomplement(g), orthocomplement(f))
    b = Subobject.random(h, rng, 2)
    assert meet(g, join(g, b)).same_as(g)
    assert join(g, meet(g, b)).same_as(g)


def test_join_of_nested_chain_is_its_maximum(field, rng):
    h = FdObject(field, 6)
    u = random_unitary(field, 6, rng)
    chain = [Subobject(u.submatrix(slice(None), slice(0, k))) for k in (1, 3, 4)]
    assert join_all(chain[::-1], h).same_as(chain[-1])
