import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import morphisms
from daghilb.dagcat import (
    FdObject,
    add_via_biproduct,
    additive_inverse_witness,
    biproduct,
    check_biproduct_addition,
    check_dagger_laws,
    check_equalizers,
    check_factorization,
    check_generator,
    check_kernels,
    codiagonal,
    cokernel,
    cokernel_pair,
    dom,
    equalizer,
    factorize,
    factorize_via_cokernel_pair,
    is_dagger_epi,
    is_dagger_mono,
    is_epi,
    is_mono,
    is_unitary,
    kernel,
    verify_scalar_field,
)
from daghilb.linalg import LinAlgError, Morphism, dagger, random_unitary, rank
from daghilb.scalars import FieldMismatchError, Scalar


def test_biproduct_identities(field):
    bp = biproduct(FdObject(field, 2), FdObject(field, 3))
    assert bp.total.dim == 5
    assert max(bp.defects().values()) == 0.0


def test_biproduct_with_zero_object(field):
    bp = biproduct(FdObject(field, 0), FdObject(field, 2))
    assert bp.total.dim == 2
    assert max(bp.defects().values()) == 0.0


def test_pair_and_copair(field, rng):
    bp = biproduct(FdObject(field, 2), FdObject(field, 1))
    f = Morphism.random(field, 2, 3, rng)
    g = Morphism.random(field, 1, 3, rng)
    h = bp.pair(f, g)
    assert bp.p @ h == f and bp.q @ h == g
    a = Morphism.random(field, 4, 2, rng)
    b = Morphism.random(field, 4, 1, rng)
    c = bp.copair(a, b)
    assert c @ bp.i == a and c @ bp.j == b


def test_biproduct_mixed_fields():
    with pytest.raises(FieldMismatchError):
        biproduct(FdObject("R", 1), FdObject("C", 1))


@given(st.data())
def test_addition_via_biproduct_matches_array_sum(data):
    f = data.draw(morphisms(max_dim=5))
    g = data.draw(morphisms(field=f.field, rows=f.rows, cols=f.cols, max_dim=5))
    want = f.data + g.data
    assert np.abs(add_via_biproduct(f, g).data - want).max(initial=0.0) <= 1e-14 * max(1.0, np.abs(want).max(initial=0.0))


def test_addition_rejects_non_parallel(rng):
    with pytest.raises(LinAlgError):
        add_via_biproduct(Morphism.random("R", 2, 2, rng), Morphism.random("R", 2, 3, rng))


def test_equalizer_of_pair_agreeing_on_a_plane(field, rng):
    u = random_unitary(field, 4, rng)
    plane = u.submatrix(slice(None), slice(0, 2))
    other = u.submatrix(slice(None), slice(2, 4))
    f = Morphism.random(field, 3, 4, rng)
    # g agrees with f on the plane and differs on its complement
    g = f + Morphism.random(field, 3, 2, rng) @ dagger(other)
    e = equalizer(f, g)
    assert e.cols == 2
    assert is_dagger_mono(e)
    assert (f @ e).diff(g @ e) <= 1e-12
    # e spans the same plane
    assert (e @ dagger(e)).diff(plane @ dagger(plane)) <= 1e-12


def test_equalizer_universal_property(field, rng):
    f = Morphism.random(field, 2, 4, rng)
    e = equalizer(f, Morphism.zeros(field, 2, 4))
    h = e @ Morphism.random(field, e.cols, 3, rng)
    # h equalizes, so it factors uniquely through e
    k = dagger(e) @ h
    assert (e @ k).diff(h) <= 1e-12


def test_equalizer_shape_error(rng):
    with pytest.raises(LinAlgError):
        equalizer(Morphism.random("C", 2, 2, rng), Morphism.random("C", 2, 3, rng))


def test_kernel_and_cokernel(field, rng):
    f = Morphism.random(field, 5, 2, rng) @ Morphism.random(field, 2, 4, rng)
    k = kernel(f)
    c = cokernel(f)
    assert k.cols == 2 and (f @ k).max_abs() <= 1e-12
    assert c.rows == 3 and (c @ f).max_abs() <= 1e-12
    assert is_dagger_epi(c)


def test_every_dagger_mono_is_a_kernel(field, rng):
    m = random_unitary(field, 5, rng).submatrix(slice(None), slice(0, 2))
    k = kernel(cokernel(m))
    assert (k @ dagger(k)).diff(m @ dagger(m)) <= 1e-12


def test_cokernel_pair_commutes(field, rng):
    f = Morphism.random(field, 4, 2, rng)
    f1, f2 = cokernel_pair(f)
    assert (f1 @ f).diff(f2 @ f) <= 1e-12


def test_factorizations_agree(field, rng):
    f = Morphism.random(field, 5, 2, rng) @ Morphism.random(field, 2, 3, rng)
    e, m = factorize(f)
    e2, m2 = factorize_via_cokernel_pair(f)
    assert m.cols == m2.cols == 2
    assert (m @ e).diff(f) <= 1e-12 and (m2 @ e2).diff(f) <= 1e-12
    assert is_dagger_mono(m) and is_epi(e)
    assert (m @ dagger(m)).diff(m2 @ dagger(m2)) <= 1e-12


def test_mono_epi_predicates(field, rng):
    u = random_unitary(field, 3, rng)
    assert is_unitary(u) and is_mono(u) and is_epi(u)
    tall = Morphism.random(field, 4, 2, rng)
    assert is_mono(tall) and not is_epi(tall)
    assert not is_dagger_mono(tall * 2.0)


def test_zero_object_maps():
    z = FdObject.zero("H")
    one = FdObject.generator("H")
    assert z.zero_to(one).shape == (1, 0)
    assert dom(one.zero_to(z)) == one
    with pytest.raises(ValueError):
        FdObject("R", -1)


def test_codiagonal_kernel_gives_minus_one(field):
    ker, ratio = additive_inverse_witness(field)
    assert ker.shape == (2, 1)
    assert (ratio + Scalar.one(field)).norm() <= 1e-12
    assert rank(codiagonal(FdObject.generator(field))) == 1


def test_scalar_field_battery(field):
    rep = verify_scalar_field(field, trials=100, seed=2)
    assert rep.passed, rep.failures


@pytest.mark.parametrize(
    "battery", [check_dagger_laws, check_biproduct_addition, check_equalizers,
                check_factorization, check_kernels, check_generator],
)
def test_batteries_pass(battery, field):
    rep = battery(field, 30, 4)
    assert rep.passed, rep.failures
    assert rep.trials > 0


def test_battery_is_deterministic(field):
    a = check_equalizers(field, 10, 9).to_dict()
    b = check_equalizers(field, 10, 9).to_dict()
    assert a == b


def test_cokernel_pair_of_ill_conditioned_map(field, rng):
    # full rank but condition number ~1e5: f1 - f2 is pure rounding, so the
    # equalizer must see it as zero relative to f1 and f2
    u, v = random_unitary(field, 6, rng), random_unitary(field, 6, rng)
    s = Morphism.from_real(field, np.diag([10.0, 5.0, 3.0, 2.0, 1.0, 1e-4]))
    f = u @ s @ v
    e, m = factorize_via_cokernel_pair(f)
    assert m.cols == 6
    assert (m @ e).diff(f) <= 1e-10
