"""Dense matrices over R, C and H.

A :class:`Morphism` with ``rows`` rows and ``cols`` columns is a map from a
``cols``-dimensional object to a ``rows``-dimensional one.  Storage is a
read-only numpy array: ``float64 (r, c)`` for R, ``complex128 (r, c)`` for C
and ``float64 (r, c, 4)`` for H.  Scalars act on vectors from the right, so
``A @ (v . lam) == (A @ v) . lam`` for every field.

Spectral work over H (SVD, eigendecomposition, square roots, inverses) is
done on the complex adjoint embedding and mapped back.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from .scalars import QUAT_TABLE, QUAT_TENSOR, FieldMismatchError, FieldTag, Scalar, left_mult_matrix, quat_conj, quat_mul
from .tolerances import DEFAULT_TOL, ToleranceProfile


class LinAlgError(ValueError):
    pass


class SingularMatrixError(LinAlgError):
    pass


def _dtype(field: FieldTag):
    return complex if field is FieldTag.C else float


class Morphism:
    __slots__ = ("field", "data")

    def __init__(self, field: FieldTag | str, data) -> None:
        field = FieldTag.parse(field)
        arr = np.array(data, dtype=_dtype(field), copy=True)
        want = 3 if field is FieldTag.H else 2
        if arr.ndim != want or (field is FieldTag.H and arr.shape[2] != 4):
            raise LinAlgError(f"bad array shape {arr.shape} for a {field.value} matrix")
        arr.flags.writeable = False
        self.field = field
        self.data = arr

    # -- construction -------------------------------------------------
    @classmethod
    def zeros(cls, field: FieldTag | str, rows: int, cols: int) -> "Morphism":
        field = FieldTag.parse(field)
        shape = (rows, cols, 4) if field is FieldTag.H else (rows, cols)
        return cls(field, np.zeros(shape, dtype=_dtype(field)))

    @classmethod
    def identity(cls, field: FieldTag | str, n: int) -> "Morphism":
        field = FieldTag.parse(field)
        if field is FieldTag.H:
            arr = np.zeros((n, n, 4))
            arr[np.arange(n), np.arange(n), 0] = 1.0
            return cls(field, arr)
        return cls(field, np.eye(n, dtype=_dtype(field)))

    @classmethod
    def from_real(cls, field: FieldTag | str, real) -> "Morphism":
        """Embed a real matrix into ``field``."""
        field = FieldTag.parse(field)
        real = np.asarray(real, dtype=float)
        if field is FieldTag.H:
            arr = np.zeros(real.shape + (4,))
            arr[..., 0] = real
            return cls(field, arr)
        return cls(field, real)

    @classmethod
    def from_scalars(cls, field: FieldTag | str, rows: Sequence[Sequence]) -> "Morphism":
        field = FieldTag.parse(field)
        comps = [[Scalar.of(x, field).comps for x in row] for row in rows]
        arr = np.array(comps, dtype=float)
        if arr.size == 0:
            return cls.zeros(field, len(rows), 0)
        return cls(field, _from_comps(field, arr))

    @classmethod
    def column(cls, field: FieldTag | str, entries: Sequence) -> "Morphism":
        return cls.from_scalars(field, [[x] for x in entries])

    @classmethod
    def basis_vector(cls, field: FieldTag | str, n: int, k: int) -> "Morphism":
        field = FieldTag.parse(field)
        e = np.zeros((n, 1))
        e[k, 0] = 1.0
        return cls.from_real(field, e)

    @classmethod
    def random(cls, field: FieldTag | str, rows: int, cols: int, rng: np.random.Generator) -> "Morphism":
        field = FieldTag.parse(field)
        raw = rng.standard_normal((rows, cols, field.ncomp))
        return cls(field, _from_comps(field, raw))

    # -- shape --------------------------------------------------------
    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape[0], self.data.shape[1]

    def is_square(self) -> bool:
        return self.rows == self.cols

    def comps(self) -> np.ndarray:
        """Entries as a real ``(rows, cols, ncomp)`` array."""
        return _to_comps(self.field, self.data)

    def entry(self, i: int, j: int) -> Scalar:
        return Scalar(self.field, tuple(self.comps()[i, j]))

    def col(self, j: int) -> "Morphism":
        return Morphism(self.field, self.data[:, j : j + 1])

    def columns(self) -> list["Morphism"]:
        return [self.col(j) for j in range(self.cols)]

    def submatrix(self, rows: slice | Sequence[int], cols: slice | Sequence[int]) -> "Morphism":
        r = np.arange(self.rows)[rows]
        c = np.arange(self.cols)[cols]
        return Morphism(self.field, self.data[np.ix_(r, c)] if self.field is not FieldTag.H else self.data[r][:, c])

    # -- algebra ------------------------------------------------------
    def _check(self, other: "Morphism") -> None:
        if not isinstance(other, Morphism):
            raise TypeError(f"expected Morphism, got {type(other).__name__}")
        if self.field is not other.field:
            raise FieldMismatchError(f"field mismatch: {self.field.value} vs {other.field.value}")

    def __matmul__(self, other: "Morphism") -> "Morphism":
        self._check(other)
        if self.cols != other.rows:
            raise LinAlgError(f"cannot compose {self.shape} after {other.shape}")
        if self.field is FieldTag.H:
            return Morphism(self.field, _hmatmul(self.data, other.data))
        return Morphism(self.field, self.data @ other.data)

    def __add__(self, other: "Morphism") -> "Morphism":
        self._check(other)
        if self.shape != other.shape:
            raise LinAlgError(f"cannot add {self.shape} and {other.shape}")
        return Morphism(self.field, self.data + other.data)

    def __sub__(self, other: "Morphism") -> "Morphism":
        self._check(other)
        if self.shape != other.shape:
            raise LinAlgError(f"cannot subtract {other.shape} from {self.shape}")
        return Morphism(self.field, self.data - other.data)

    def __neg__(self) -> "Morphism":
        return Morphism(self.field, -self.data)

    def __mul__(self, other: float) -> "Morphism":
        """Multiplication by a real number (central in every field)."""
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Morphism(self.field, self.data * float(other))
        return NotImplemented

    __rmul__ = __mul__

    def scale(self, lam: "Scalar | float | complex") -> "Morphism":
        """Right action ``A . lam``: every entry multiplied by ``lam`` on the right."""
        lam = Scalar.of(lam, self.field)
        if self.field is FieldTag.H:
            return Morphism(self.field, quat_mul(self.data, lam.as_array()))
        return Morphism(self.field, self.data * lam.to_number())

    def lscale(self, lam: "Scalar | float | complex") -> "Morphism":
        """Left action ``lam . A``."""
        lam = Scalar.of(lam, self.field)
        if self.field is FieldTag.H:
            return Morphism(self.field, quat_mul(lam.as_array(), self.data))
        return Morphism(self.field, lam.to_number() * self.data)

    def dagger(self) -> "Morphism":
        return dagger(self)

    @property
    def T(self) -> "Morphism":  # noqa: N802
        return dagger(self)

    # -- measurement --------------------------------------------------
    def max_abs(self) -> float:
        if self.data.size == 0:
            return 0.0
        if self.field is FieldTag.H:
            return float(np.sqrt((self.data**2).sum(axis=-1)).max())
        return float(np.abs(self.data).max())

    def fro(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.data) ** 2)))

    def diff(self, other: "Morphism") -> float:
        return (self - other).max_abs()

    def allclose(self, other: "Morphism", tol: float) -> bool:
        return self.shape == other.shape and self.diff(other) <= tol

    def promote(self, field: FieldTag | str) -> "Morphism":
        field = FieldTag.parse(field)
        if field.rank < self.field.rank:
            raise FieldMismatchError(f"cannot demote {self.field.value} matrix to {field.value}")
        comps = self.comps()
        pad = np.zeros(comps.shape[:2] + (field.ncomp - comps.shape[2],))
        return Morphism(field, _from_comps(field, np.concatenate([comps, pad], axis=-1)))

    # -- serialisation ------------------------------------------------
    def to_json(self) -> dict:
        return {
            "field": self.field.value,
            "rows": self.rows,
            "cols": self.cols,
            "data": self.comps().tolist(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Morphism":
        try:
            field = FieldTag.parse(obj["field"])
            rows, cols = int(obj["rows"]), int(obj["cols"])
            data = obj["data"]
        except (KeyError, TypeError, ValueError) as exc:
            raise LinAlgError(f"malformed matrix JSON: {exc}") from None
        if len(data) != rows or any(len(r) != cols for r in data):
            raise LinAlgError(f"matrix JSON data does not match declared shape {rows}x{cols}")
        comps = [[Scalar.from_json(field, x).comps for x in r] for r in data]
        arr = np.array(comps, dtype=float).reshape(rows, cols, field.ncomp)
        return cls(field, _from_comps(field, arr))

    def __repr__(self) -> str:
        return f"Morphism({self.field.value}, {self.rows}x{self.cols})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Morphism)
            and self.field is other.field
            and self.data.shape == other.data.shape
            and bool(np.array_equal(self.data, other.data))
        )

    __hash__ = None  # type: ignore[assignment]


Vector = Morphism  # a Morphism with a single column


def _to_comps(field: FieldTag, data: np.ndarray) -> np.ndarray:
    if field is FieldTag.R:
        return data[..., None].astype(float)
    if field is FieldTag.C:
        return np.stack([data.real, data.imag], axis=-1)
    return data


def _from_comps(field: FieldTag, comps: np.ndarray) -> np.ndarray:
    if field is FieldTag.R:
        return comps[..., 0]
    if field is FieldTag.C:
        return comps[..., 0] + 1j * comps[..., 1]
    return comps


def _hmatmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Quaternionic matrix product via ``A = A1 + A2 j`` with complex ``A1, A2``:
    ``(A1 + A2 j)(B1 + B2 j) = (A1 B1 - A2 conj B2) + (A1 B2 + A2 conj B1) j``."""
    out = np.zeros((a.shape[0], b.shape[1], 4))
    if a.shape[1] == 0:
        return out
    a1 = a[..., 0] + 1j * a[..., 1]
    a2 = a[..., 2] + 1j * a[..., 3]
    b1 = b[..., 0] + 1j * b[..., 1]
    b2 = b[..., 2] + 1j * b[..., 3]
    c1 = a1 @ b1 - a2 @ b2.conj()
    c2 = a1 @ b2 + a2 @ b1.conj()
    out[..., 0], out[..., 1] = c1.real, c1.imag
    out[..., 2], out[..., 3] = c2.real, c2.imag
    return out


def _hmatmul_table(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Reference product: sixteen real products from the multiplication table."""
    out = np.zeros((a.shape[0], b.shape[1], 4))
    if a.shape[1] == 0:
        return out
    for (i, j), (k, sign) in QUAT_TABLE.items():
        out[..., k] += sign * (a[..., i] @ b[..., j])
    return out


# ---------------------------------------------------------------------------
# block helpers


def hstack(parts: Sequence[Morphism], field: FieldTag | str | None = None, rows: int | None = None) -> Morphism:
    if not parts:
        if field is None or rows is None:
            raise LinAlgError("hstack of nothing needs field and rows")
        return Morphism.zeros(field, rows, 0)
    f = parts[0].field
    for p in parts:
        parts[0]._check(p)
    return Morphism(f, np.concatenate([p.data for p in parts], axis=1))


def vstack(parts: Sequence[Morphism], field: FieldTag | str | None = None, cols: int | None = None) -> Morphism:
    if not parts:
        if field is None or cols is None:
            raise LinAlgError("vstack of nothing needs field and cols")
        return Morphism.zeros(field, 0, cols)
    for p in parts:
        parts[0]._check(p)
    return Morphism(parts[0].field, np.concatenate([p.data for p in parts], axis=0))


def block_diag(*parts: Morphism) -> Morphism:
    field = parts[0].field
    rows = sum(p.rows for p in parts)
    cols = sum(p.cols for p in parts)
    out = np.array(Morphism.zeros(field, rows, cols).data)
    r = c = 0
    for p in parts:
        parts[0]._check(p)
        out[r : r + p.rows, c : c + p.cols] = p.data
        r += p.rows
        c += p.cols
    return Morphism(field, out)


# ---------------------------------------------------------------------------
# dagger and inner product


def dagger(a: Morphism) -> Morphism:
    if a.field is FieldTag.R:
        return Morphism(a.field, a.data.T)
    if a.field is FieldTag.C:
        return Morphism(a.field, a.data.conj().T)
    return Morphism(a.field, quat_conj(np.transpose(a.data, (1, 0, 2))))


def inner(u: Morphism, v: Morphism) -> Scalar:
    """``<u, v> = v^dagger u``: linear in ``u`` for the right action."""
    u._check(v)
    if u.cols != 1 or v.cols != 1 or u.rows != v.rows:
        raise LinAlgError(f"inner product needs two vectors of equal length, got {u.shape} and {v.shape}")
    return (dagger(v) @ u).entry(0, 0)


def vec_norm(u: Morphism) -> float:
    return u.fro()


# ---------------------------------------------------------------------------
# column-vector kernels shared by Gram-Schmidt and eigenvector extraction.
# A column is (n,) for R/C and (n, 4) for H.


_T_IJ_K = QUAT_TENSOR.reshape(16, 4)
_T_IK_J = QUAT_TENSOR.transpose(0, 2, 1).reshape(16, 4)


def _vinner(field: FieldTag, x: np.ndarray, y: np.ndarray):
    if field is FieldTag.R:
        return float(y @ x)
    if field is FieldTag.C:
        return complex(np.vdot(y, x))
    g = quat_conj(y).T @ x  # g[i, j] = sum_n conj(y)_ni x_nj
    return g.reshape(16) @ _T_IJ_K


def _vsub_proj(field: FieldTag, x: np.ndarray, q: np.ndarray, c) -> np.ndarray:
    if field is FieldTag.H:
        return x - q @ (_T_IK_J @ c).reshape(4, 4)
    return x - q * c


def _vnorm(x: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.abs(x) ** 2)))


def _gram_matvec(field: FieldTag, gram: Morphism | None, x: np.ndarray) -> np.ndarray:
    if gram is None:
        return x
    col = x[:, None] if field is not FieldTag.H else x[:, None, :]
    return (gram @ Morphism(field, col)).data[:, 0]


def _as_columns(cols) -> tuple[FieldTag, int, list[np.ndarray]]:
    if isinstance(cols, Morphism):
        return cols.field, cols.rows, [cols.data[:, j] for j in range(cols.cols)]
    cols = list(cols)
    if not cols:
        raise LinAlgError("need at least one column (or pass a Morphism with zero columns)")
    field, n = cols[0].field, cols[0].rows
    out = []
    for c in cols:
        cols[0]._check(c)
        if c.rows != n:
            raise LinAlgError("columns of different lengths")
        out.extend(c.data[:, j] for j in range(c.cols))
    return field, n, out


def _stack_cols(field: FieldTag, n: int, vecs: list[np.ndarray]) -> Morphism:
    if not vecs:
        return Morphism.zeros(field, n, 0)
    return Morphism(field, np.stack(vecs, axis=1))


def gram_schmidt(
    cols: "Morphism | Iterable[Morphism]",
    tol: ToleranceProfile = DEFAULT_TOL,
    gram: Morphism | None = None,
) -> tuple[Morphism, int]:
    """Modified Gram-Schmidt with one reorthogonalisation pass.

    Columns whose residual falls below ``tol.drop`` times their original
    norm are treated as dependent and dropped. With ``gram`` the inner
    product is ``<u, v> = v^dagger G u`` and the output satisfies
    ``M^dagger G M = I`` instead.
    """
    field, n, vecs = _as_columns(cols)
    basis: list[np.ndarray] = []
    gbasis: list[np.ndarray] = []  # G q for each accepted q
    for v in vecs:
        v = np.array(v, dtype=_dtype(field))
        n0 = math.sqrt(abs(_real_part(_vinner(field, _gram_matvec(field, gram, v), v))))
        if n0 == 0.0:
            continue
        for _ in range(2):
            for q, gq in zip(basis, gbasis):
                v = _vsub_proj(field, v, q, _vinner(field, v, gq) if gram is not None else _vinner(field, v, q))
        gv = _gram_matvec(field, gram, v)
        nv = math.sqrt(abs(_real_part(_vinner(field, gv, v))))
        if nv <= tol.drop * n0:
            continue
        basis.append(v / nv)
        gbasis.append(gv / nv)
    return _stack_cols(field, n, basis), len(basis)


def _real_part(x) -> float:
    if isinstance(x, np.ndarray):
        return float(x[0])
    return float(np.real(x))


def _project_out(field: FieldTag, res: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Remove the ``q`` component from every stacked vector ``res[m]``."""
    if field is FieldTag.H:
        g = np.einsum("ni,mnj->mij", quat_conj(q), res)
        c = np.einsum("mij,ijk->mk", g, QUAT_TENSOR)  # <r, q> for each r
        return res - np.einsum("ni,mj,ijk->mnk", q, c, QUAT_TENSOR)
    c = res @ q.conj()
    return res - c[:, None] * q[None, :]


def _pivoted_basis(field: FieldTag, n: int, cands: list[np.ndarray], k: int, against: list[np.ndarray] = ()) -> list[np.ndarray]:
    """Pick ``k`` orthonormal vectors from the span of ``cands``, largest residual first."""
    if not cands:
        return []
    res = np.stack([np.array(c, dtype=_dtype(field)) for c in cands])
    for q in against:
        res = _project_out(field, res, q)
    chosen: list[np.ndarray] = []
    alive = np.ones(len(res), dtype=bool)
    for _ in range(k):
        norms = np.sqrt((np.abs(res.reshape(len(res), -1)) ** 2).sum(axis=1))
        norms[~alive] = -1.0
        idx = int(np.argmax(norms))
        if norms[idx] <= 0.0:
            break
        alive[idx] = False
        q = res[idx].copy()
        for p in list(against) + chosen:  # second pass against drift
            q = _vsub_proj(field, q, p, _vinner(field, q, p))
        q = q / _vnorm(q)
        chosen.append(q)
        res = _project_out(field, res, q)
    return chosen


# ---------------------------------------------------------------------------
# complex adjoint embedding of quaternionic matrices


def embed_complex(a: Morphism) -> Morphism:
    """``A = A1 + A2 j  ->  [[A1, A2], [-conj(A2), conj(A1)]]``."""
    if a.field is not FieldTag.H:
        raise FieldMismatchError("embed_complex needs a quaternionic matrix")
    return Morphism(FieldTag.C, _embed(a.data))


def _embed(arr: np.ndarray) -> np.ndarray:
    r, c = arr.shape[:2]
    out = np.empty((2 * r, 2 * c), dtype=complex)
    out[:r, :c].real, out[:r, :c].imag = arr[..., 0], arr[..., 1]
    out[:r, c:].real, out[:r, c:].imag = arr[..., 2], arr[..., 3]
    out[r:, :c] = -out[:r, c:].conj()
    out[r:, c:] = out[:r, :c].conj()
    return out


def _unembed(m: np.ndarray, tol: float | None) -> np.ndarray:
    if m.shape[0] % 2 or m.shape[1] % 2:
        raise LinAlgError(f"embedded matrix must have even shape, got {m.shape}")
    r, c = m.shape[0] // 2, m.shape[1] // 2
    p, q = m[:r, :c], m[:r, c:]
    s_, t_ = m[r:, :c], m[r:, c:]
    if tol is not None and m.size:
        scale = max(1.0, float(np.abs(m).max()))
        dev = max(
            float(np.abs(s_ + q.conj()).max(initial=0.0)),
            float(np.abs(t_ - p.conj()).max(initial=0.0)),
        )
        if dev > tol * scale:
            raise LinAlgError(f"matrix is not in the quaternionic subalgebra (deviation {dev:.3e})")
    z1 = (p + t_.conj()) / 2
    z2 = (q - s_.conj()) / 2
    return np.stack([z1.real, z1.imag, z2.real, z2.imag], axis=-1)


def unembed(m: Morphism, tol: float = 1e-10) -> Morphism:
    if m.field is not FieldTag.C:
        raise FieldMismatchError("unembed needs a complex matrix")
    return Morphism(FieldTag.H, _unembed(m.data, tol))


def realify(a: Morphism) -> np.ndarray:
    """Real matrix of ``a`` acting on coordinates (1 real per R entry, 2 per C, 4 per H)."""
    if a.field is FieldTag.R:
        return np.array(a.data)
    if a.field is FieldTag.C:
        re, im = a.data.real, a.data.imag
        out = np.zeros((2 * a.rows, 2 * a.cols))
        out[0::2, 0::2] = re
        out[0::2, 1::2] = -im
        out[1::2, 0::2] = im
        out[1::2, 1::2] = re
        return out
    out = np.zeros((4 * a.rows, 4 * a.cols))
    for i in range(a.rows):
        for j in range(a.cols):
            out[4 * i : 4 * i + 4, 4 * j : 4 * j + 4] = left_mult_matrix(a.data[i, j])
    return out


# ---------------------------------------------------------------------------
# spectral routines


def _cplx(a: Morphism) -> np.ndarray:
    return _embed(a.data) if a.field is FieldTag.H else a.data


def singular_values(a: Morphism) -> np.ndarray:
    """Singular values in descending order (each once, also over H)."""
    if 0 in a.shape:
        return np.zeros(0)
    s = np.linalg.svd(_cplx(a), compute_uv=False)
    return s[::2] if a.field is FieldTag.H else s


def opnorm(a: Morphism) -> float:
    s = singular_values(a)
    return float(s[0]) if s.size else 0.0


def _rank_cut(s: np.ndarray, tol: ToleranceProfile, scale: float = 0.0) -> int:
    """Singular values above ``rank_rtol`` times the larger of ``s_max`` and
    ``scale`` (and above ``rank_atol``) count toward the rank."""
    ref = max(float(s[0]) if s.size else 0.0, scale)
    if s.size == 0 or s[0] <= tol.rank_atol:
        return 0
    return int(np.count_nonzero(s > max(tol.rank_rtol * ref, tol.rank_atol)))


def rank(a: Morphism, tol: ToleranceProfile = DEFAULT_TOL) -> int:
    return _rank_cut(singular_values(a), tol)


def _h_basis_from_projector(proj: np.ndarray, k: int) -> Morphism:
    n = proj.shape[0]
    chosen = _pivoted_basis(FieldTag.H, n, [proj[:, j] for j in range(n)], k)
    return _stack_cols(FieldTag.H, n, chosen)


def range_basis(a: Morphism, tol: ToleranceProfile = DEFAULT_TOL) -> Morphism:
    """Isometry whose range is the range of ``a``."""
    n = a.rows
    if 0 in a.shape:
        return Morphism.zeros(a.field, n, 0)
    u, s, _ = np.linalg.svd(_cplx(a))
    if a.field is FieldTag.H:
        r = _rank_cut(s[::2], tol)
        ur = u[:, : 2 * r]
        proj = _unembed(ur @ ur.conj().T, None)
        return _h_basis_from_projector(proj, r)
    r = _rank_cut(s, tol)
    return Morphism(a.field, u[:, :r])


def nullspace(a: Morphism, tol: ToleranceProfile = DEFAULT_TOL, scale: float = 0.0) -> Morphism:
    """Isometry whose range is the kernel of ``a``.

    ``scale`` sets the size against which small singular values are judged
    when ``a`` is a difference of larger maps and may itself be pure rounding.
    """
    m = a.cols
    if a.rows == 0 or m == 0:
        return Morphism.identity(a.field, m)
    _, s, vh = np.linalg.svd(_cplx(a))
    if a.field is FieldTag.H:
        r = _rank_cut(s[::2], tol, scale)
        vr = vh[2 * r :].conj().T
        proj = _unembed(vr @ vr.conj().T, None)
        return _h_basis_from_projector(proj, m - r)
    r = _rank_cut(s, tol, scale)
    return Morphism(a.field, vh[r:].conj().T)


def orth_complement_basis(iso: Morphism, tol: ToleranceProfile = DEFAULT_TOL) -> Morphism:
    """Isometry onto the orthogonal complement of the range of ``iso``."""
    return nullspace(dagger(iso), tol)


def _check_self_adjoint(s: Morphism, tol: ToleranceProfile, what: str) -> None:
    if not s.is_square():
        raise LinAlgError(f"{what} needs a square matrix, got {s.shape}")
    dev = s.diff(dagger(s))
    if dev > tol.zero * max(1.0, s.max_abs()):
        raise LinAlgError(f"{what} needs a self-adjoint matrix (deviation {dev:.3e})")


def eigh(s: Morphism, tol: ToleranceProfile = DEFAULT_TOL) -> tuple[np.ndarray, Morphism]:
    """Spectral decomposition ``S = V diag(w) V^dagger`` with ``w`` ascending and ``V`` unitary."""
    _check_self_adjoint(s, tol, "eigh")
    n = s.rows
    if s.field is not FieldTag.H:
        w, v = np.linalg.eigh(s.data)
        return w, Morphism(s.field, v.real if s.field is FieldTag.R else v)
    w, x = np.linalg.eigh(_embed(s.data))
    # quaternionic eigenvalues appear twice; extract one H-eigenvector per pair
    def to_quat(col: np.ndarray) -> np.ndarray:
        z1, z2 = col[:n], -col[n:].conj()
        return np.stack([z1.real, z1.imag, z2.real, z2.imag], axis=-1)

    gap = 1e-8 * max(1.0, float(np.abs(w).max(initial=0.0)))
    vecs: list[np.ndarray] = []
    vals: list[float] = []
    i = 0
    while i < 2 * n:
        j = i + 1
        while j < 2 * n and w[j] - w[j - 1] <= gap:
            j += 1
        k = (j - i) // 2
        picked = _pivoted_basis(FieldTag.H, n, [to_quat(x[:, c]) for c in range(i, j)], k, against=vecs)
        vecs.extend(picked)
        vals.extend([float(np.mean(w[i:j]))] * len(picked))
        i = j
    if len(vecs) != n:
        raise LinAlgError(f"quaternionic eigenvector extraction found {len(vecs)} of {n} vectors")
    return np.array(vals), _stack_cols(FieldTag.H, n, vecs)


def _psd_function(s: Morphism, fn, tol: ToleranceProfile, what: str) -> Morphism:
    _check_self_adjoint(s, tol, what)
    herm = _cplx(s)
    herm = (herm + herm.conj().T) / 2
    w, v = np.linalg.eigh(herm)
    floor = -tol.psd_clamp * max(1.0, float(np.abs(w).max(initial=0.0)))
    if w.size and w.min() < floor:
        raise LinAlgError(f"{what} needs a positive semidefinite matrix (eigenvalue {w.min():.3e})")
    fw = fn(np.clip(w, 0.0, None))
    out = (v * fw) @ v.conj().T
    out = (out + out.conj().T) / 2
    if s.field is FieldTag.H:
        return Morphism(FieldTag.H, _unembed(out, None))
    if s.field is FieldTag.R:
        return Morphism(FieldTag.R, out.real)
    return Morphism(FieldTag.C, out)


def sqrt_psd(s: Morphism, tol: ToleranceProfile = DEFAULT_TOL) -> Morphism:
    """The unique positive self-adjoint square root of a positive self-adjoint ``s``."""
    return _psd_function(s, np.sqrt, tol, "sqrt_psd")


def inv(a: Morphism) -> Morphism:
    if not a.is_square():
        raise LinAlgError(f"cannot invert a {a.shape} matrix")
    try:
        if a.field is FieldTag.H:
            return Morphism(FieldTag.H, _unembed(np.linalg.inv(_embed(a.data)), None))
        return Morphism(a.field, np.linalg.inv(a.data))
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(str(exc)) from None


def polar(q: Morphism, tol: ToleranceProfile = DEFAULT_TOL) -> tuple[Morphism, Morphism]:
    """``Q = U P`` with ``U`` unitary and ``P = sqrt(Q^dagger Q)``."""
    if not q.is_square():
        raise LinAlgError(f"polar decomposition needs a square matrix, got {q.shape}")
    if q.rows == 0:
        return q, q
    w, s, vh = np.linalg.svd(_cplx(q))
    if s[-1] < 1e-10:
        raise SingularMatrixError(f"polar decomposition needs an invertible matrix (smallest singular value {s[-1]:.3e})")
    u = w @ vh
    p = (vh.conj().T * s) @ vh
    p = (p + p.conj().T) / 2
    if q.field is FieldTag.H:
        return Morphism(FieldTag.H, _unembed(u, None)), Morphism(FieldTag.H, _unembed(p, None))
    if q.field is FieldTag.R:
        return Morphism(FieldTag.R, u.real), Morphism(FieldTag.R, p.real)
    return Morphism(FieldTag.C, u), Morphism(FieldTag.C, p)


# ---------------------------------------------------------------------------
# random generation


def random_isometry(field: FieldTag | str, n: int, k: int, rng: np.random.Generator) -> Morphism:
    """Haar-like isometry ``K^k -> K^n`` from Gram-Schmidt on a Gaussian matrix."""
    field = FieldTag.parse(field)
    if k > n:
        raise LinAlgError(f"no isometry from dimension {k} into {n}")
    while True:
        m, r = gram_schmidt(Morphism.random(field, n, k, rng))
        if r == k:
            return m


def random_unitary(field: FieldTag | str, n: int, rng: np.random.Generator) -> Morphism:
    return random_isometry(field, n, n, rng)


def isometry_defect(m: Morphism) -> float:
    """``max |m^dagger m - I|``."""
    return (dagger(m) @ m).diff(Morphism.identity(m.field, m.cols))


def unitary_defect(m: Morphism) -> float:
    if not m.is_square():
        return math.inf
    eye = Morphism.identity(m.field, m.rows)
    return max((dagger(m) @ m).diff(eye), (m @ dagger(m)).diff(eye))
