"""Scalars over the involutive division rings R, C and H.

Quaternions are stored as ``(w, x, y, z)`` for ``w + x i + y j + z k``.
Everything here is immutable; the array-level helpers (``quat_mul`` and
friends) are vectorised over leading axes and are what the matrix layer
uses internally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Sequence

import numpy as np

from .report import Report, check_rng


class FieldTag(str, Enum):
    R = "R"
    C = "C"
    H = "H"

    @property
    def ncomp(self) -> int:
        return {"R": 1, "C": 2, "H": 4}[self.value]

    @property
    def rank(self) -> int:
        return {"R": 0, "C": 1, "H": 2}[self.value]

    @classmethod
    def parse(cls, value: "FieldTag | str") -> "FieldTag":
        if isinstance(value, FieldTag):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ValueError(f"unknown field tag {value!r}; expected R, C or H") from None


class FieldMismatchError(ValueError):
    pass


# (a, b) -> (c, sign) with e_a e_b = sign * e_c, basis order 1, i, j, k.
QUAT_TABLE: dict[tuple[int, int], tuple[int, float]] = {
    (0, 0): (0, 1.0), (0, 1): (1, 1.0), (0, 2): (2, 1.0), (0, 3): (3, 1.0),
    (1, 0): (1, 1.0), (1, 1): (0, -1.0), (1, 2): (3, 1.0), (1, 3): (2, -1.0),
    (2, 0): (2, 1.0), (2, 1): (3, -1.0), (2, 2): (0, -1.0), (2, 3): (1, 1.0),
    (3, 0): (3, 1.0), (3, 1): (2, 1.0), (3, 2): (1, -1.0), (3, 3): (0, -1.0),
}


def _structure_tensor() -> np.ndarray:
    t = np.zeros((4, 4, 4))
    for (i, j), (k, sign) in QUAT_TABLE.items():
        t[i, j, k] = sign
    return t


# QUAT_TENSOR[i, j, k]: coefficient of basis unit k in e_i e_j
QUAT_TENSOR = _structure_tensor()


def quat_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hamilton product of quaternion arrays with trailing axis 4."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    aw, ax, ay, az = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    bw, bx, by, bz = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    out = np.empty(np.broadcast_shapes(a.shape, b.shape))
    out[..., 0] = aw * bw - ax * bx - ay * by - az * bz
    out[..., 1] = aw * bx + ax * bw + ay * bz - az * by
    out[..., 2] = aw * by - ax * bz + ay * bw + az * bx
    out[..., 3] = aw * bz + ax * by - ay * bx + az * bw
    return out


def quat_conj(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float, copy=True)
    out[..., 1:] *= -1.0
    return out


def left_mult_matrix(q: Sequence[float]) -> np.ndarray:
    """Real 4x4 matrix of ``v -> q v`` in the basis (1, i, j, k)."""
    w, x, y, z = q
    return np.array(
        [
            [w, -x, -y, -z],
            [x, w, -z, y],
            [y, z, w, -x],
            [z, -y, x, w],
        ],
        dtype=float,
    )


def right_mult_matrix(q: Sequence[float]) -> np.ndarray:
    """Real 4x4 matrix of ``v -> v q`` in the basis (1, i, j, k)."""
    w, x, y, z = q
    return np.array(
        [
            [w, -x, -y, -z],
            [x, w, z, -y],
            [y, -z, w, x],
            [z, y, -x, w],
        ],
        dtype=float,
    )


@dataclass(frozen=True)
class Scalar:
    field: FieldTag
    comps: tuple[float, ...]

    def __post_init__(self) -> None:
        field = FieldTag.parse(self.field)
        object.__setattr__(self, "field", field)
        comps = tuple(float(c) for c in self.comps)
        if len(comps) != field.ncomp:
            raise ValueError(f"{field.value} scalar needs {field.ncomp} components, got {len(comps)}")
        object.__setattr__(self, "comps", comps)

    # -- construction -------------------------------------------------
    @classmethod
    def _raw(cls, field: FieldTag, comps: tuple) -> "Scalar":
        """Trusted constructor for arithmetic results (no validation)."""
        out = object.__new__(cls)
        object.__setattr__(out, "field", field)
        object.__setattr__(out, "comps", comps)
        return out

    @classmethod
    def of(cls, value: "Scalar | complex | float | Sequence[float]", field: FieldTag | str) -> "Scalar":
        """Coerce a python number, component sequence or Scalar into ``field``."""
        field = FieldTag.parse(field)
        if isinstance(value, Scalar):
            return value.promote(field)
        if isinstance(value, (int, float, np.floating, np.integer)):
            return cls(field, (float(value),) + (0.0,) * (field.ncomp - 1))
        if isinstance(value, (complex, np.complexfloating)):
            if field is FieldTag.R:
                if value.imag != 0:
                    raise FieldMismatchError("complex value in a real field")
                return cls(field, (value.real,))
            return cls(field, (value.real, value.imag) + (0.0,) * (field.ncomp - 2))
        comps = tuple(float(c) for c in value)
        if len(comps) < field.ncomp:
            comps = comps + (0.0,) * (field.ncomp - len(comps))
        return cls(field, comps)

    @classmethod
    def zero(cls, field: FieldTag | str) -> "Scalar":
        return cls.of(0.0, field)

    @classmethod
    def one(cls, field: FieldTag | str) -> "Scalar":
        return cls.of(1.0, field)

    @classmethod
    def unit(cls, name: str) -> "Scalar":
        """Quaternion unit ``"1"``, ``"i"``, ``"j"`` or ``"k"``."""
        idx = "1ijk".index(name)
        comps = [0.0] * 4
        comps[idx] = 1.0
        return cls(FieldTag.H, tuple(comps))

    @classmethod
    def random(cls, field: FieldTag | str, rng: np.random.Generator) -> "Scalar":
        field = FieldTag.parse(field)
        return cls(field, tuple(rng.standard_normal(field.ncomp)))

    def promote(self, field: FieldTag | str) -> "Scalar":
        field = FieldTag.parse(field)
        if field.rank < self.field.rank:
            raise FieldMismatchError(f"cannot demote {self.field.value} scalar to {field.value}")
        return Scalar(field, self.comps + (0.0,) * (field.ncomp - self.field.ncomp))

    # -- arithmetic ---------------------------------------------------
    def _check(self, other: "Scalar") -> None:
        if self.field is not other.field:
            raise FieldMismatchError(f"field mismatch: {self.field.value} vs {other.field.value}")

    def __add__(self, other: "Scalar") -> "Scalar":
        self._check(other)
        return Scalar._raw(self.field, tuple(a + b for a, b in zip(self.comps, other.comps)))

    def __sub__(self, other: "Scalar") -> "Scalar":
        self._check(other)
        return Scalar._raw(self.field, tuple(a - b for a, b in zip(self.comps, other.comps)))

    def __neg__(self) -> "Scalar":
        return Scalar._raw(self.field, tuple(-a for a in self.comps))

    def __mul__(self, other: "Scalar | float") -> "Scalar":
        if isinstance(other, (int, float)):
            return Scalar._raw(self.field, tuple(a * other for a in self.comps))
        return mul(self, other)

    def __rmul__(self, other: float) -> "Scalar":
        if isinstance(other, (int, float)):
            return Scalar._raw(self.field, tuple(other * a for a in self.comps))
        return NotImplemented

    def __truediv__(self, other: float) -> "Scalar":
        return Scalar._raw(self.field, tuple(a / other for a in self.comps))

    def conj(self) -> "Scalar":
        return conj(self)

    def inv(self) -> "Scalar":
        return inv(self)

    def norm(self) -> float:
        return math.hypot(*self.comps)

    def norm2(self) -> float:
        return sum(c * c for c in self.comps)

    @property
    def real(self) -> float:
        return self.comps[0]

    def imag_norm(self) -> float:
        return math.sqrt(sum(c * c for c in self.comps[1:]))

    def as_array(self) -> np.ndarray:
        return np.array(self.comps, dtype=float)

    def to_number(self) -> "float | complex":
        if self.field is FieldTag.R:
            return self.comps[0]
        if self.field is FieldTag.C:
            return complex(self.comps[0], self.comps[1])
        raise FieldMismatchError("quaternions have no python number equivalent")

    def isclose(self, other: "Scalar", tol: float = 1e-12) -> bool:
        return (self - other).norm() <= tol

    def to_json(self) -> list[float]:
        return list(self.comps)

    @classmethod
    def from_json(cls, field: FieldTag | str, value: Sequence[float]) -> "Scalar":
        field = FieldTag.parse(field)
        if not isinstance(value, (list, tuple)) or len(value) != field.ncomp:
            raise ValueError(f"{field.value} scalar must be an array of {field.ncomp} numbers, got {value!r}")
        return cls(field, tuple(float(v) for v in value))

    def __repr__(self) -> str:
        if self.field is FieldTag.R:
            return f"Scalar(R, {self.comps[0]:g})"
        if self.field is FieldTag.C:
            return f"Scalar(C, {self.comps[0]:g}{self.comps[1]:+g}i)"
        w, x, y, z = self.comps
        return f"Scalar(H, {w:g}{x:+g}i{y:+g}j{z:+g}k)"


def mul(a: Scalar, b: Scalar) -> Scalar:
    a._check(b)
    if a.field is FieldTag.R:
        return Scalar._raw(a.field, (a.comps[0] * b.comps[0],))
    if a.field is FieldTag.C:
        ar, ai = a.comps
        br, bi = b.comps
        return Scalar._raw(a.field, (ar * br - ai * bi, ar * bi + ai * br))
    aw, ax, ay, az = a.comps
    bw, bx, by, bz = b.comps
    return Scalar._raw(
        a.field,
        (
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ),
    )


def conj(a: Scalar) -> Scalar:
    return Scalar._raw(a.field, (a.comps[0],) + tuple(-c for c in a.comps[1:]))


def norm(a: Scalar) -> float:
    return math.hypot(*a.comps)


def inv(a: Scalar) -> Scalar:
    n2 = a.norm2()
    if n2 == 0.0:
        raise ZeroDivisionError("zero scalar has no inverse")
    c = conj(a)
    return Scalar._raw(a.field, tuple(x / n2 for x in c.comps))


# ---------------------------------------------------------------------------
# Structure transfer from real inner-product spaces.


class StructureError(ValueError):
    pass


def _as_real_matrix(x) -> np.ndarray:
    arr = np.asarray(getattr(x, "data", x))
    if np.iscomplexobj(arr):
        if np.abs(arr.imag).max(initial=0.0) > 0:
            raise StructureError("structure operators must be real matrices")
        arr = arr.real
    arr = np.asarray(arr, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise StructureError(f"structure operator must be square, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class StructureOps:
    """Operators ``s`` (and ``t``) on a real space making it complex (quaternionic).

    Scalars act on the right: ``u.i = s u``, ``u.j = t u`` and therefore
    ``u.k = t s u``.
    """

    s: np.ndarray
    t: np.ndarray | None = None

    def __post_init__(self) -> None:
        s = _as_real_matrix(self.s)
        s.flags.writeable = False
        object.__setattr__(self, "s", s)
        if self.t is not None:
            t = _as_real_matrix(self.t)
            if t.shape != s.shape:
                raise StructureError("s and t must act on the same space")
            t.flags.writeable = False
            object.__setattr__(self, "t", t)

    @property
    def dim(self) -> int:
        return self.s.shape[0]

    def violations(self, gram: np.ndarray | None = None) -> dict[str, float]:
        """Residual of every defining identity; adjoints taken w.r.t. ``gram``."""
        n = self.dim
        g = np.eye(n) if gram is None else np.asarray(gram, dtype=float)
        ginv = np.linalg.inv(g)

        def adj(a: np.ndarray) -> np.ndarray:
            return ginv @ a.T @ g

        eye = np.eye(n)
        out = {
            "s^2 = -1": float(np.abs(self.s @ self.s + eye).max(initial=0.0)),
            "s^dagger = -s": float(np.abs(adj(self.s) + self.s).max(initial=0.0)),
        }
        if self.t is not None:
            s, t = self.s, self.t
            out["t^2 = -1"] = float(np.abs(t @ t + eye).max(initial=0.0))
            out["st = -ts"] = float(np.abs(s @ t + t @ s).max(initial=0.0))
            out["t^dagger = -t"] = float(np.abs(adj(t) + t).max(initial=0.0))
        return out

    def validate(self, gram: np.ndarray | None = None, tol: float = 1e-10) -> None:
        bad = {k: v for k, v in self.violations(gram).items() if v > tol}
        if bad:
            detail = ", ".join(f"{k} (residual {v:.3e})" for k, v in bad.items())
            raise StructureError(f"structure operators violate: {detail}")


@dataclass(frozen=True)
class PromotedForm:
    """The C- or H-valued inner product induced on a real space by structure ops."""

    field: FieldTag
    gram: np.ndarray
    ops: StructureOps

    def real_inner(self, u: np.ndarray, v: np.ndarray) -> float:
        return float(np.asarray(v, dtype=float) @ self.gram @ np.asarray(u, dtype=float))

    def __call__(self, u: Sequence[float], v: Sequence[float]) -> Scalar:
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        s = self.ops.s
        ip = self.real_inner
        if self.field is FieldTag.C:
            return Scalar(FieldTag.C, (ip(u, v), -ip(s @ u, v)))
        t = self.ops.t
        return Scalar(FieldTag.H, (ip(u, v), -ip(s @ u, v), -ip(t @ u, v), -ip(t @ (s @ u), v)))

    def act(self, u: Sequence[float], lam: Scalar) -> np.ndarray:
        """Right scalar action ``u . lam`` on the underlying real space."""
        u = np.asarray(u, dtype=float)
        lam = Scalar.of(lam, self.field)
        out = lam.comps[0] * u + lam.comps[1] * (self.ops.s @ u)
        if self.field is FieldTag.H:
            out = out + lam.comps[2] * (self.ops.t @ u) + lam.comps[3] * (self.ops.t @ (self.ops.s @ u))
        return out


def _check_gram(gram, n: int) -> np.ndarray:
    g = np.eye(n) if gram is None else np.asarray(gram, dtype=float)
    if g.shape != (n, n):
        raise StructureError(f"gram matrix shape {g.shape} does not match dimension {n}")
    if np.abs(g - g.T).max(initial=0.0) > 1e-10:
        raise StructureError("real inner product must be symmetric")
    if n and np.linalg.eigvalsh(g).min() <= 0:
        raise StructureError("real inner product must be positive definite")
    return g


def promote_complex(gram, s, tol: float = 1e-10) -> PromotedForm:
    ops = StructureOps(s)
    if ops.dim % 2:
        raise StructureError(f"real dimension {ops.dim} is not divisible by 2")
    g = _check_gram(gram, ops.dim)
    ops.validate(g, tol)
    return PromotedForm(FieldTag.C, g, ops)


def promote_quaternionic(gram, s, t, tol: float = 1e-10) -> PromotedForm:
    ops = StructureOps(s, t)
    if ops.dim % 4:
        raise StructureError(f"real dimension {ops.dim} is not divisible by 4")
    g = _check_gram(gram, ops.dim)
    ops.validate(g, tol)
    return PromotedForm(FieldTag.H, g, ops)


def complex_structure(n: int) -> np.ndarray:
    """Multiplication by i on R^{2n} laid out as (re, im) pairs."""
    return np.kron(np.eye(n), np.array([[0.0, -1.0], [1.0, 0.0]]))


def quaternion_right_ops(n: int) -> StructureOps:
    """Right multiplication by i and j on H^n = R^{4n}, coordinatewise."""
    return StructureOps(
        np.kron(np.eye(n), right_mult_matrix((0, 1, 0, 0))),
        np.kron(np.eye(n), right_mult_matrix((0, 0, 1, 0))),
    )


def quaternion_left_ops(n: int) -> StructureOps:
    """Left multiplication by i and j on H^n = R^{4n}, coordinatewise."""
    return StructureOps(
        np.kron(np.eye(n), left_mult_matrix((0, 1, 0, 0))),
        np.kron(np.eye(n), left_mult_matrix((0, 0, 1, 0))),
    )


def random_scalars(field: FieldTag | str, rng: np.random.Generator, count: int) -> list[Scalar]:
    field = FieldTag.parse(field)
    comps = rng.standard_normal((count, field.ncomp))
    return [Scalar._raw(field, tuple(row)) for row in comps.tolist()]


def scalar_law_residuals(
    field: FieldTag | str, rng: np.random.Generator, count: int
) -> dict[str, float]:
    """Worst relative residual of each ring/involution law over ``count`` random triples."""
    field = FieldTag.parse(field)
    worst: dict[str, float] = {
        "associativity": 0.0,
        "left distributivity": 0.0,
        "right distributivity": 0.0,
        "conj involution": 0.0,
        "conj anti-homomorphism": 0.0,
        "norm multiplicative": 0.0,
        "two-sided inverse": 0.0,
    }
    one = Scalar.one(field)
    pad = (0.0,) * (field.ncomp - 1)
    # each law gets the triple and its norms, and returns (lhs, rhs, scale)
    laws: dict[str, Callable[..., tuple[Scalar, Scalar, float]]] = {
        "associativity": lambda a, b, c, na, nb, nc: ((a * b) * c, a * (b * c), na * nb * nc),
        "left distributivity": lambda a, b, c, na, nb, nc: (a * (b + c), a * b + a * c, na * (nb + nc)),
        "right distributivity": lambda a, b, c, na, nb, nc: ((a + b) * c, a * c + b * c, (na + nb) * nc),
        "conj involution": lambda a, b, c, na, nb, nc: (conj(conj(a)), a, na),
        "conj anti-homomorphism": lambda a, b, c, na, nb, nc: (conj(a * b), conj(b) * conj(a), na * nb),
        "norm multiplicative": lambda a, b, c, na, nb, nc: (
            Scalar._raw(field, (norm(a * b),) + pad),
            Scalar._raw(field, (na * nb,) + pad),
            na * nb,
        ),
        "two-sided inverse": lambda a, b, c, na, nb, nc: (a * inv(a) + inv(a) * a, one + one, 1.0),
    }
    triples: Iterable = zip(*(random_scalars(field, rng, count) for _ in range(3)))
    for a, b, c in triples:
        na, nb, nc = norm(a), norm(b), norm(c)
        for name, law in laws.items():
            lhs, rhs, scale = law(a, b, c, na, nb, nc)
            r = norm(lhs - rhs) / max(scale, 1e-300)
            if r > worst[name]:
                worst[name] = r
    return worst


def check_scalar_laws(field: FieldTag | str, samples: int = 10_000, seed: int = 0, tol: float = 1e-12):
    """Report wrapper around :func:`scalar_law_residuals`, one trial per law."""
    field = FieldTag.parse(field)
    rep = Report(
        f"scalar-laws/{field.value}",
        f"{field.value} is an involutive division ring with multiplicative norm",
        tolerance=tol,
    )
    worst = scalar_law_residuals(field, check_rng(rep.check, seed), samples)
    for k, (name, r) in enumerate(worst.items()):
        rep.observe(r, tol, seed=seed, trial=k, detail=f"{name}: worst relative residual {r:.3e} over {samples} samples")
    rep.notes.append(f"{samples} samples per law")
    return rep


def quaternion_inner_oracle(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """``sum_n conj(v_n) u_n`` with coordinates grouped as quaternions (w, x, y, z)."""
    u = np.asarray(u, dtype=float).reshape(-1, 4)
    v = np.asarray(v, dtype=float).reshape(-1, 4)
    return quat_mul(quat_conj(v), u).sum(axis=0)


def check_promoted_form(trials: int = 1000, seed: int = 0, max_blocks: int = 3, tol: float = 1e-12):
    """The quaternion-valued form built from a real inner product and right
    multiplication by i, j agrees with ``conj(v) u``; ``<u, u>`` is real."""
    rep = Report(
        "promoted-inner-product",
        "a real inner product with compatible anti-self-adjoint i, j promotes to a quaternionic one",
        tolerance=tol,
    )
    rng = check_rng(rep.check, seed)
    for t in range(trials):
        nb = int(rng.integers(1, max_blocks + 1))
        form = promote_quaternionic(None, *_right_ops_arrays(nb))
        u, v = rng.standard_normal(4 * nb), rng.standard_normal(4 * nb)
        got = np.array(form(u, v).comps)
        want = quaternion_inner_oracle(u, v)
        scale = max(1.0, float(np.linalg.norm(u) * np.linalg.norm(v)))
        r = float(np.abs(got - want).max()) / scale
        uu = np.array(form(u, u).comps)
        r = max(r, float(np.abs(uu[1:]).max()) / max(1.0, float(u @ u)))
        # sesquilinearity in the right action: <u a, v> = <u, v> a
        a = Scalar.random(FieldTag.H, rng)
        lhs = np.array(form(form.act(u, a), v).comps)
        rhs = quat_mul(want, np.array(a.comps))
        r = max(r, float(np.abs(lhs - rhs).max()) / (scale * max(1.0, a.norm())))
        rep.observe(r, tol, seed=seed, trial=t, detail=f"{nb} quaternion coordinates: residual {r:.3e}")
    left = promote_quaternionic(None, quaternion_left_ops(1).s, quaternion_left_ops(1).t)
    val = left([1, 0, 0, 0], [0, 1, 0, 0])
    rep.notes.append(f"with left multiplication instead, <1, i> = {list(val.comps)}")
    return rep


def _right_ops_arrays(nb: int) -> tuple[np.ndarray, np.ndarray]:
    ops = quaternion_right_ops(nb)
    return ops.s, ops.t
