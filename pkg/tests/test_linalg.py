import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import morphisms
from daghilb.linalg import (
    LinAlgError,
    Morphism,
    SingularMatrixError,
    _hmatmul_table,
    block_diag,
    dagger,
    eigh,
    embed_complex,
    gram_schmidt,
    hstack,
    inner,
    inv,
    isometry_defect,
    nullspace,
    opnorm,
    polar,
    random_isometry,
    random_unitary,
    range_basis,
    rank,
    realify,
    singular_values,
    sqrt_psd,
    unembed,
    unitary_defect,
    vstack,
)
from daghilb.scalars import FieldMismatchError, FieldTag, Scalar, quat_mul, quaternion_right_ops


def _entrywise_hmatmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Oracle: sum_k a_ik b_kj with the scalar Hamilton product."""
    return quat_mul(a[:, :, None, :], b[None, :, :, :]).sum(axis=1)


def _hermitian(field, n, rng):
    a = Morphism.random(field, n, n, rng)
    return a + dagger(a)


# -- products and dagger ---------------------------------------------------


def test_quaternionic_product_matches_entrywise_oracle(rng):
    for r, k, c in [(1, 1, 1), (3, 4, 2), (5, 5, 5), (2, 0, 3)]:
        a = Morphism.random("H", r, k, rng)
        b = Morphism.random("H", k, c, rng)
        want = _entrywise_hmatmul(a.data, b.data) if k else np.zeros((r, c, 4))
        np.testing.assert_allclose((a @ b).data, want, atol=1e-13)
        np.testing.assert_allclose(_hmatmul_table(a.data, b.data), want, atol=1e-13)


@given(st.data())
def test_dagger_is_an_involutive_antihomomorphism(data):
    f = data.draw(morphisms(max_dim=4))
    g = data.draw(morphisms(field=f.field, cols=f.rows, max_dim=4))
    assert dagger(dagger(f)) == f
    assert dagger(g @ f).diff(dagger(f) @ dagger(g)) <= 1e-12 * max(1.0, f.max_abs() * g.max_abs() * 4)


def test_identity_laws(field, rng):
    f = Morphism.random(field, 3, 4, rng)
    assert (Morphism.identity(field, 3) @ f) == f
    assert (f @ Morphism.identity(field, 4)) == f


def test_shape_and_field_errors(rng):
    a = Morphism.random("C", 2, 3, rng)
    with pytest.raises(LinAlgError):
        a @ a
    with pytest.raises(FieldMismatchError):
        a + Morphism.random("R", 2, 3, rng)
    with pytest.raises(LinAlgError):
        Morphism("H", np.zeros((2, 2)))


def test_data_is_read_only(rng):
    a = Morphism.random("R", 2, 2, rng)
    with pytest.raises(ValueError):
        a.data[0, 0] = 1.0


def test_right_and_left_scalar_actions_differ_over_h():
    i, j = Scalar.unit("i"), Scalar.unit("j")
    a = Morphism.from_scalars("H", [[i]])
    assert a.scale(j).entry(0, 0) == i * j
    assert a.lscale(j).entry(0, 0) == j * i


def test_inner_is_conjugate_linear_in_second_slot(rng):
    u = Morphism.random("H", 3, 1, rng)
    v = Morphism.random("H", 3, 1, rng)
    lam = Scalar.random("H", rng)
    lhs = inner(u.scale(lam), v)
    assert (lhs - inner(u, v) * lam).norm() <= 1e-12
    assert (inner(u, v) - inner(v, u).conj()).norm() <= 1e-12


def test_block_helpers(rng):
    a = Morphism.random("C", 2, 2, rng)
    b = Morphism.random("C", 1, 3, rng)
    d = block_diag(a, b)
    assert d.shape == (3, 5)
    assert d.submatrix(slice(0, 2), slice(0, 2)) == a
    assert d.submatrix(slice(2, 3), slice(2, 5)) == b
    assert d.submatrix(slice(0, 2), slice(2, 5)).max_abs() == 0.0
    assert hstack([a, a]).shape == (2, 4)
    assert vstack([a, a]).shape == (4, 2)
    assert hstack([], "R", 3).shape == (3, 0)


def test_json_roundtrip_and_malformed(field, rng):
    a = Morphism.random(field, 2, 3, rng)
    assert Morphism.from_json(a.to_json()) == a
    with pytest.raises(LinAlgError):
        Morphism.from_json({"field": "R", "rows": 2, "cols": 1, "data": [[[1.0]]]})
    with pytest.raises(LinAlgError):
        Morphism.from_json({"rows": 1})


def test_promote_embeds_real_entries(rng):
    a = Morphism.random("R", 2, 2, rng)
    h = a.promote("H")
    np.testing.assert_array_equal(h.data[..., 0], a.data)
    assert np.all(h.data[..., 1:] == 0)


# -- complex embedding -----------------------------------------------------


@given(st.data())
def test_embedding_is_a_dagger_homomorphism(data):
    a = data.draw(morphisms(field=FieldTag.H, max_dim=4))
    b = data.draw(morphisms(field=FieldTag.H, rows=a.cols, max_dim=4))
    scale = max(1.0, a.max_abs() * b.max_abs() * 4)
    assert embed_complex(a @ b).diff(embed_complex(a) @ embed_complex(b)) <= 1e-12 * scale
    assert embed_complex(dagger(a)) == dagger(embed_complex(a))


def test_embedding_of_i_is_diag_i_minus_i():
    e = embed_complex(Morphism.from_scalars("H", [[Scalar.unit("i")]]))
    np.testing.assert_array_equal(e.data, np.diag([1j, -1j]))


def test_unembed_roundtrip_and_rejection(rng):
    a = Morphism.random("H", 3, 2, rng)
    assert unembed(embed_complex(a)).diff(a) <= 1e-15
    with pytest.raises(LinAlgError, match="subalgebra"):
        unembed(Morphism.random("C", 4, 4, rng))


def test_realify_commutes_with_right_structure(rng):
    a = Morphism.random("H", 3, 3, rng)
    real = realify(a)
    ops = quaternion_right_ops(3)
    assert np.abs(real @ ops.s - ops.s @ real).max() <= 1e-14
    assert np.abs(real @ ops.t - ops.t @ real).max() <= 1e-14
    b = Morphism.random("H", 3, 3, rng)
    np.testing.assert_allclose(realify(a @ b), real @ realify(b), atol=1e-12)


# -- Gram-Schmidt and subspaces -------------------------------------------------


def test_gram_schmidt_orthonormal_and_spanning(field, rng):
    a = Morphism.random(field, 6, 4, rng)
    q, r = gram_schmidt(a)
    assert r == 4
    assert isometry_defect(q) <= 1e-13
    # every input column lies in the span
    assert (q @ (dagger(q) @ a)).diff(a) <= 1e-12


def test_gram_schmidt_drops_dependent_columns(field, rng):
    a = Morphism.random(field, 5, 2, rng)
    dep = hstack([a, a.col(0).scale(Scalar.random(field, rng)) + a.col(1)])
    _, r = gram_schmidt(dep)
    assert r == 2


def test_gram_schmidt_with_gram(field, rng):
    l = Morphism.random(field, 4, 4, rng) + Morphism.identity(field, 4) * 4.0
    g = dagger(l) @ l
    q, r = gram_schmidt(Morphism.identity(field, 4), gram=g)
    assert r == 4
    assert (dagger(q) @ g @ q).diff(Morphism.identity(field, 4)) <= 1e-12


def _pinv_projector(m: Morphism) -> np.ndarray:
    a = embed_complex(m).data if m.field is FieldTag.H else m.data
    return a @ np.linalg.pinv(a)


def test_range_and_nullspace(field, rng):
    a = Morphism.random(field, 6, 2, rng) @ Morphism.random(field, 2, 5, rng)
    assert rank(a) == 2
    n = nullspace(a)
    assert n.cols == 3
    assert (a @ n).max_abs() <= 1e-12
    assert isometry_defect(n) <= 1e-12
    m = range_basis(a)
    assert m.cols == 2 and isometry_defect(m) <= 1e-12
    p = m @ dagger(m)
    want = _pinv_projector(a)
    got = embed_complex(p).data if field is FieldTag.H else p.data
    np.testing.assert_allclose(got, want, atol=1e-10)


def test_zero_matrix_has_full_nullspace(field):
    z = Morphism.zeros(field, 3, 4)
    assert rank(z) == 0
    assert nullspace(z).cols == 4
    assert range_basis(z).cols == 0


# -- spectral routines --------------------------------------------------------


def test_eigh_reconstructs(field, rng):
    s = _hermitian(field, 5, rng)
    w, v = eigh(s)
    assert np.all(np.diff(w) >= 0)
    assert unitary_defect(v) <= 1e-12
    d = Morphism.from_real(field, np.diag(w))
    assert (v @ d @ dagger(v)).diff(s) <= 1e-12


def test_quaternionic_eigenvalues_are_halves_of_embedded_spectrum(rng):
    s = _hermitian("H", 4, rng)
    w, _ = eigh(s)
    ref = np.linalg.eigvalsh(embed_complex(s).data)
    np.testing.assert_allclose(np.repeat(w, 2), ref, atol=1e-12)


def test_eigh_handles_repeated_eigenvalues(field, rng):
    u = random_unitary(field, 4, rng)
    d = Morphism.from_real(field, np.diag([1.0, 1.0, 2.0, 2.0]))
    s = u @ d @ dagger(u)
    w, v = eigh(s)
    np.testing.assert_allclose(w, [1, 1, 2, 2], atol=1e-12)
    assert (v @ d @ dagger(v)).diff(s) <= 1e-12


def test_eigh_rejects_non_self_adjoint(rng):
    with pytest.raises(LinAlgError):
        eigh(Morphism.random("C", 3, 3, rng))


def test_sqrt_psd(field, rng):
    a = Morphism.random(field, 4, 4, rng)
    p = dagger(a) @ a
    r = sqrt_psd(p)
    assert (r @ r).diff(p) <= 1e-11 * max(1.0, p.max_abs())
    assert r.diff(dagger(r)) <= 1e-14
    with pytest.raises(LinAlgError):
        sqrt_psd(Morphism.from_real(field, -np.eye(2)))


def test_inverse(field, rng):
    a = Morphism.random(field, 4, 4, rng) + Morphism.identity(field, 4) * 3.0
    assert (a @ inv(a)).diff(Morphism.identity(field, 4)) <= 1e-12
    with pytest.raises(SingularMatrixError):
        inv(Morphism.zeros(field, 2, 2))


def test_polar(field, rng):
    q = Morphism.random(field, 5, 5, rng)
    u, p = polar(q)
    assert unitary_defect(u) <= 1e-12
    assert (u @ p).diff(q) <= 1e-12
    assert p.diff(dagger(p)) <= 1e-14
    assert (p @ p).diff(dagger(q) @ q) <= 1e-11
    with pytest.raises(SingularMatrixError):
        polar(Morphism.zeros(field, 2, 2))


def test_opnorm_and_singular_values(field, rng):
    a = Morphism.random(field, 3, 3, rng)
    s = singular_values(a)
    assert len(s) == 3
    assert opnorm(a) == pytest.approx(s[0])
    u = random_unitary(field, 3, rng)
    assert opnorm(u @ a) == pytest.approx(opnorm(a), rel=1e-12)


def test_random_isometry(field, rng):
    m = random_isometry(field, 5, 3, rng)
    assert m.shape == (5, 3) and isometry_defect(m) <= 1e-13
    with pytest.raises(LinAlgError):
        random_isometry(field, 2, 3, rng)
    assert unitary_defect(m) == float("inf")
