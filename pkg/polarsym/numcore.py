"""Numeric kernels: forward-mode dual numbers, finite-difference oracles and
dense linear algebra.

Dual numbers carry a tag. Nested differentiation (a derivative of a function
that itself differentiates) seeds a fresh, larger tag; when two duals with
different tags meet, the larger tag wraps the smaller one, which is treated
as a constant. Because inner differentiations are always extracted before
the outer one, this keeps perturbations from different levels apart.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Sequence

import numpy as np
from scipy import linalg as sla

from polarsym.errors import DomainViolationError, EmptySystemError

_tags = itertools.count(1)

FD_STEP = 1e-5
LSTSQ_RCOND = 1e-10
RANK_RTOL = 1e-8
RANK_ATOL = 1e-12


class DualScalar:
    """A real number with a vector of first-order partials."""

    __slots__ = ("value", "partials", "tag")

    def __init__(self, value: Any, partials: Any, tag: int = 0):
        self.value = value
        self.partials = np.asarray(partials)
        self.tag = tag

    @classmethod
    def variable(cls, value: float, index: int, size: int, tag: int = 0) -> "DualScalar":
        partials = np.zeros(size)
        partials[index] = 1.0
        return cls(value, partials, tag)

    def __repr__(self) -> str:
        return f"DualScalar({self.value!r}, {self.partials!r}, tag={self.tag})"

    def __float__(self) -> float:
        return float(self.value)

    def _wrapped_by(self, other: Any) -> bool:
        return isinstance(other, DualScalar) and other.tag > self.tag

    def __add__(self, other: Any) -> Any:
        if isinstance(other, np.ndarray):
            return NotImplemented
        if isinstance(other, DualScalar):
            if other.tag == self.tag:
                return DualScalar(self.value + other.value, self.partials + other.partials, self.tag)
            if other.tag > self.tag:
                return other.__radd__(self)
        return DualScalar(self.value + other, self.partials, self.tag)

    def __radd__(self, other: Any) -> Any:
        if isinstance(other, np.ndarray):
            return NotImplemented
        return DualScalar(other + self.value, self.partials, self.tag)

    def __neg__(self) -> "DualScalar":
        return DualScalar(-self.value, -self.partials, self.tag)

    def __pos__(self) -> "DualScalar":
        return self

    def __sub__(self, other: Any) -> Any:
        if isinstance(other, np.ndarray):
            return NotImplemented
        if isinstance(other, DualScalar):
            if other.tag == self.tag:
                return DualScalar(self.value - other.value, self.partials - other.partials, self.tag)
            if other.tag > self.tag:
                return other.__rsub__(self)
        return DualScalar(self.value - other, self.partials, self.tag)

    def __rsub__(self, other: Any) -> Any:
        if isinstance(other, np.ndarray):
            return NotImplemented
        return DualScalar(other - self.value, -self.partials, self.tag)

    def __mul__(self, other: Any) -> Any:
        if isinstance(other, np.ndarray):
            return NotImplemented
        if isinstance(other, DualScalar):
            if other.tag == self.tag:
                return DualScalar(
                    self.value * other.value,
                    self.value * other.partials + self.partials * other.value,
                    self.tag,
                )
            if other.tag > self.tag:
                return other.__rmul__(self)
        return DualScalar(self.value * other, self.partials * other, self.tag)

    def __rmul__(self, other: Any) -> Any:
        if isinstance(other, np.ndarray):
            return NotImplemented
        return DualScalar(other * self.value, other * self.partials, self.tag)

    def __truediv__(self, other: Any) -> Any:
        if isinstance(other, np.ndarray):
            return NotImplemented
        if isinstance(other, DualScalar):
            if other.tag == self.tag:
                quotient = self.value / other.value
                return DualScalar(
                    quotient,
                    (self.partials - quotient * other.partials) / other.value,
                    self.tag,
                )
            if other.tag > self.tag:
                return other.__rtruediv__(self)
        return DualScalar(self.value / other, self.partials / other, self.tag)

    def __rtruediv__(self, other: Any) -> Any:
        if isinstance(other, np.ndarray):
            return NotImplemented
        quotient = other / self.value
        return DualScalar(quotient, -quotient * self.partials / self.value, self.tag)

    def __pow__(self, exponent: Any) -> "DualScalar":
        if isinstance(exponent, DualScalar):
            return (self.log() * exponent).exp()
        if isinstance(exponent, int) and exponent == 0:
            return DualScalar(self.value**0, self.partials * 0.0, self.tag)
        if float(self) < 0.0 and float(exponent) != int(exponent):
            raise DomainViolationError(f"fractional power {exponent!r} of negative value {float(self)!r}")
        return DualScalar(
            self.value**exponent,
            exponent * self.value ** (exponent - 1) * self.partials,
            self.tag,
        )

    def __abs__(self) -> "DualScalar":
        return -self if float(self) < 0 else self

    def __lt__(self, other: Any) -> bool:
        return float(self) < float(other)

    def __le__(self, other: Any) -> bool:
        return float(self) <= float(other)

    def __gt__(self, other: Any) -> bool:
        return float(self) > float(other)

    def __ge__(self, other: Any) -> bool:
        return float(self) >= float(other)

    # numpy dispatches ufuncs on object arrays to these methods
    def sin(self) -> "DualScalar":
        return DualScalar(np.sin(self.value), np.cos(self.value) * self.partials, self.tag)

    def cos(self) -> "DualScalar":
        return DualScalar(np.cos(self.value), -np.sin(self.value) * self.partials, self.tag)

    def tan(self) -> "DualScalar":
        return self.sin() / self.cos()

    def exp(self) -> "DualScalar":
        e = np.exp(self.value)
        return DualScalar(e, e * self.partials, self.tag)

    def log(self) -> "DualScalar":
        if float(self) <= 0.0:
            raise DomainViolationError(f"log of non-positive value {float(self)!r}")
        return DualScalar(np.log(self.value), self.partials / self.value, self.tag)

    def sqrt(self) -> "DualScalar":
        if float(self) < 0.0:
            raise DomainViolationError(f"sqrt of negative value {float(self)!r}")
        root = np.sqrt(self.value)
        return DualScalar(root, self.partials / (2.0 * root), self.tag)

    def arccos(self) -> "DualScalar":
        if abs(float(self)) > 1.0:
            raise DomainViolationError(f"arccos outside [-1, 1]: {float(self)!r}")
        return DualScalar(
            np.arccos(self.value),
            -self.partials / np.sqrt(1.0 - self.value * self.value),
            self.tag,
        )

    def arctan2(self, other: Any) -> Any:
        return atan2(self, other)


def atan2(y: Any, x: Any) -> Any:
    """Two-argument arctangent that accepts dual numbers in either slot."""
    if not isinstance(y, DualScalar) and not isinstance(x, DualScalar):
        return math.atan2(float(y), float(x))
    tag = max(getattr(y, "tag", -1), getattr(x, "tag", -1))
    yv, yp = _at_tag(y, tag)
    xv, xp = _at_tag(x, tag)
    r2 = xv * xv + yv * yv
    return DualScalar(atan2(yv, xv), (xv * yp - yv * xp) / r2, tag)


def _at_tag(a: Any, tag: int) -> tuple[Any, Any]:
    if isinstance(a, DualScalar) and a.tag == tag:
        return a.value, a.partials
    return a, 0.0


def is_dual(a: Any) -> bool:
    if isinstance(a, DualScalar):
        return True
    return isinstance(a, np.ndarray) and a.dtype == object


def primal(a: Any) -> Any:
    """Strip every dual layer; returns a float or a float array."""
    if isinstance(a, DualScalar):
        return primal(a.value)
    if isinstance(a, np.ndarray):
        if a.dtype == object:
            return np.array([primal(v) for v in a.ravel()], dtype=float).reshape(a.shape)
        return a.astype(float)
    return float(a)


def pack(nested: Any) -> np.ndarray:
    """Build an array, object-typed only when a dual number is present."""
    arr = np.array(nested, dtype=object)
    if any(isinstance(v, DualScalar) for v in arr.ravel()):
        return arr
    return arr.astype(float)


def seed(x: Sequence[Any]) -> tuple[np.ndarray, int]:
    """Promote each coordinate to a dual variable under a fresh tag."""
    tag = next(_tags)
    x = list(x)
    n = len(x)
    eye = np.eye(n)
    return np.array([DualScalar(x[i], eye[i], tag) for i in range(n)], dtype=object), tag


def _extract(y: Any, tag: int, n: int) -> tuple[Any, np.ndarray]:
    if isinstance(y, DualScalar) and y.tag == tag:
        return y.value, y.partials
    return y, np.zeros(n)


def dual_jacobian(f: Callable[[np.ndarray], Any], x: Sequence[Any]) -> tuple[Any, Any]:
    """Value and Jacobian of f at x by forward-mode dual numbers.

    x may itself hold dual numbers (nested differentiation). For scalar f the
    Jacobian is returned as a 1-D gradient.
    """
    n = len(x)
    xs, tag = seed(x)
    y = f(xs)
    if isinstance(y, np.ndarray):
        flat = y.ravel()
        values, rows = zip(*(_extract(v, tag, n) for v in flat)) if flat.size else ((), ())
        value = pack(list(values)).reshape(y.shape)
        jac = pack([list(r) for r in rows]).reshape(y.shape + (n,)) if flat.size else np.zeros(y.shape + (n,))
        return value, jac
    value, partials = _extract(y, tag, n)
    return value, pack(list(partials))


def dual_gradient(f: Callable[[np.ndarray], Any], x: Sequence[float]) -> np.ndarray:
    """Gradient of a scalar function, exact to machine precision for polynomials."""
    value, grad = dual_jacobian(f, np.asarray(x, dtype=float))
    grad = primal(grad)
    if not np.all(np.isfinite(primal(value))):
        raise DomainViolationError(f"non-finite value at {list(x)}")
    if not np.all(np.isfinite(grad)):
        raise DomainViolationError(f"non-finite derivative at {list(x)}")
    return grad


def finite_diff_jacobian(f: Callable[[np.ndarray], Any], x: Sequence[float], step: float = FD_STEP) -> np.ndarray:
    """Central-difference Jacobian, shape (m, n); m = 1 for scalar f."""
    if step <= 0:
        raise ValueError("finite-difference step must be positive")
    x = np.asarray(x, dtype=float)
    cols = []
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = step
        hi = np.atleast_1d(np.asarray(f(x + e), dtype=float)).ravel()
        lo = np.atleast_1d(np.asarray(f(x - e), dtype=float)).ravel()
        cols.append((hi - lo) / (2.0 * step))
    return np.stack(cols, axis=1)


@dataclass(frozen=True)
class LinSolveReport:
    solution: np.ndarray
    residual_norm: float
    rank: int


def least_squares(A: Any, b: Any) -> LinSolveReport:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float)
    if A.size == 0 or A.shape[1] == 0:
        raise EmptySystemError("least squares needs at least one column")
    solution, _, rank, _ = np.linalg.lstsq(A, b, rcond=LSTSQ_RCOND)
    residual = float(np.linalg.norm(A @ solution - b))
    return LinSolveReport(solution=solution, residual_norm=residual, rank=int(rank))


def _threshold(s: np.ndarray, rtol: float, atol: float) -> float:
    largest = float(s[0]) if s.size else 0.0
    return max(rtol * largest, atol)


def numerical_rank(A: Any, rtol: float = RANK_RTOL, atol: float = RANK_ATOL) -> int:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.size == 0:
        return 0
    s = sla.svdvals(A)
    return int(np.sum(s > _threshold(s, rtol, atol)))


def null_space(A: Any, rtol: float = RANK_RTOL, atol: float = RANK_ATOL) -> np.ndarray:
    """Orthonormal basis (columns) of ker A."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    n = A.shape[1]
    if A.size == 0:
        return np.eye(n)
    _, s, vh = sla.svd(A)
    rank = int(np.sum(s > _threshold(s, rtol, atol)))
    return vh[rank:].T.conj().copy()


def column_basis(A: Any, rtol: float = RANK_RTOL, atol: float = RANK_ATOL) -> np.ndarray:
    """Orthonormal basis (columns) of the column span of A."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.size == 0:
        return np.zeros((A.shape[0], 0))
    u, s, _ = sla.svd(A, full_matrices=False)
    rank = int(np.sum(s > _threshold(s, rtol, atol)))
    return u[:, :rank]


def metric_orthonormal_basis(vectors: np.ndarray, gram: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Gram-orthonormal basis (columns) of span(vectors) for the inner product ``gram``."""
    L = np.linalg.cholesky(gram)
    y = L.T @ np.atleast_2d(vectors).reshape(gram.shape[0], -1)
    q = column_basis(y, rtol=rtol)
    return sla.solve_triangular(L.T, q, lower=False)


def metric_complement(vectors: np.ndarray, gram: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Gram-orthonormal basis of the ``gram``-orthogonal complement of span(vectors)."""
    n = gram.shape[0]
    vectors = np.asarray(vectors, dtype=float).reshape(n, -1)
    if vectors.shape[1] == 0:
        return metric_orthonormal_basis(np.eye(n), gram)
    ker = null_space(vectors.T @ gram, rtol=rtol)
    if ker.shape[1] == 0:
        return ker
    return metric_orthonormal_basis(ker, gram)


def span_residual(vectors: np.ndarray, basis: np.ndarray, gram: np.ndarray) -> float:
    """Largest gram-norm of the part of each vector outside span(basis).

    ``basis`` must be gram-orthonormal.
    """
    vectors = np.asarray(vectors, dtype=float).reshape(gram.shape[0], -1)
    if vectors.shape[1] == 0:
        return 0.0
    if basis.shape[1] == 0:
        rest = vectors
    else:
        rest = vectors - basis @ (basis.T @ gram @ vectors)
    norms = np.sqrt(np.maximum(np.einsum("ij,ik,kj->j", rest, gram, rest), 0.0))
    return float(norms.max())


def mat_inv(A: np.ndarray) -> np.ndarray:
    """Matrix inverse that also accepts object arrays of dual numbers."""
    A = np.asarray(A)
    if A.dtype != object:
        return np.linalg.inv(A.astype(float))
    n = A.shape[0]
    return mat_solve(A, np.eye(n))


def mat_solve(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Solve A X = B by Gauss-Jordan elimination with partial pivoting."""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.dtype != object and B.dtype != object:
        return np.linalg.solve(A.astype(float), B.astype(float))
    n = A.shape[0]
    vector_rhs = B.ndim == 1
    M = np.concatenate([A.astype(object), B.astype(object).reshape(n, -1)], axis=1)
    for col in range(n):
        pivot = max(range(col, n), key=lambda r: abs(float(primal(M[r, col]))))
        if abs(float(primal(M[pivot, col]))) == 0.0:
            raise np.linalg.LinAlgError("singular matrix")
        if pivot != col:
            M[[col, pivot]] = M[[pivot, col]]
        M[col] = M[col] / M[col, col]
        for r in range(n):
            if r != col:
                M[r] = M[r] - M[r, col] * M[col]
    X = M[:, n:]
    return X.ravel() if vector_rhs else X


def all_finite(values: Iterable[Any]) -> bool:
    return all(np.all(np.isfinite(primal(v))) for v in values)
