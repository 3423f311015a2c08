"""Proper rotations: validation, construction, and Haar sampling.

A proper rotation of order m is a real m-by-m matrix Q with Q^T Q = I
and det Q = 1. Reflections (det = -1) are rejected, never silently
repaired. All functions are pure; the random source for sampling is
passed explicitly and owned by the caller.
"""

from __future__ import annotations

import math

import numpy as np

from .linalg import (
    DimensionMismatchError,
    SquareMatrix,
    Vector,
    _det_array,
    gram_schmidt_complete,
)

__all__ = [
    "RotationMatrix",
    "RotationError",
    "NotOrthogonalError",
    "WrongDeterminantError",
    "ReflectionError",
    "NonUnitVectorError",
    "NoProperRotationError",
    "DEFAULT_TOL",
    "validate_rotation",
    "rotation_2d",
    "rotation_mapping",
    "haar_sample",
]

DEFAULT_TOL = 1e-10

# Unit-norm slack accepted by rotation_mapping on its input vectors.
UNIT_TOL = 1e-10


class RotationError(ValueError):
    """A matrix failed to qualify as a proper rotation."""


class NotOrthogonalError(RotationError):
    """Q^T Q differs from the identity beyond tolerance."""


class WrongDeterminantError(RotationError):
    """The determinant is not 1 within tolerance."""


class ReflectionError(WrongDeterminantError):
    """The determinant is near -1: an orthogonal reflection, not a rotation."""


class NonUnitVectorError(ValueError):
    """An input vector was required to have unit norm."""


class NoProperRotationError(ValueError):
    """No proper rotation performs the requested mapping (only possible for m = 1)."""


def _effective_tol(tol: float, m: int) -> float:
    # Residuals accumulate with order; loosen proportionally past m = 16.
    return tol if m <= 16 else tol * (m / 16.0)


class RotationMatrix:
    """A validated proper rotation.

    Instances are only created through :func:`validate_rotation` or the
    constructors in this module, so holding one certifies that the
    orthogonality and determinant invariants held at construction time.
    """

    __slots__ = ("_matrix",)

    def __init__(self, matrix: SquareMatrix, tol: float = DEFAULT_TOL):
        validated = validate_rotation(matrix, tol)
        self._matrix = validated._matrix

    @classmethod
    def _trusted(cls, matrix: SquareMatrix) -> "RotationMatrix":
        # Internal fast path for matrices that satisfy the invariants by
        # construction.
        self = object.__new__(cls)
        self._matrix = matrix
        return self

    @property
    def matrix(self) -> SquareMatrix:
        return self._matrix

    @property
    def data(self) -> np.ndarray:
        return self._matrix.data

    @property
    def order(self) -> int:
        return self._matrix.order

    def apply(self, x: Vector) -> Vector:
        """Rotate x (norm is preserved up to roundoff)."""
        if self._matrix.order != x.dim:
            raise DimensionMismatchError(
                f"cannot apply order {self._matrix.order} rotation to dimension {x.dim} vector"
            )
        # A rotation of a finite vector stays finite; skip revalidation.
        return Vector._trusted(self._matrix.data @ x.data)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RotationMatrix):
            return NotImplemented
        return self._matrix == other._matrix

    def __hash__(self) -> int:
        return hash((RotationMatrix, self._matrix))

    def __repr__(self) -> str:
        return f"RotationMatrix({self._matrix.tolist()!r})"


def validate_rotation(q: SquareMatrix, tol: float = DEFAULT_TOL) -> RotationMatrix:
    """Check Q^T Q = I and det Q = 1 within tol and wrap the matrix.

    A determinant near -1 raises ReflectionError, distinct from generic
    determinant failure, since a reflection is the telltale near-miss.
    """
    if tol <= 0.0:
        raise ValueError("tol must be > 0")
    d = q.data
    eff = _effective_tol(tol, q.order)
    residual = float(np.max(np.abs(d.T @ d - np.eye(q.order))))
    if residual > eff:
        raise NotOrthogonalError(f"orthogonality residual {residual:.3e} exceeds tolerance {eff:.3e}")
    det = _det_array(d)
    if abs(det + 1.0) <= 0.5:
        raise ReflectionError(f"determinant {det:.6f} is near -1: reflection, not a proper rotation")
    if abs(det - 1.0) > eff:
        raise WrongDeterminantError(f"determinant {det!r} differs from 1 beyond tolerance {eff:.3e}")
    return RotationMatrix._trusted(q)


def rotation_2d(theta: float) -> RotationMatrix:
    """The plane rotation [[cos t, -sin t], [sin t, cos t]]."""
    if not math.isfinite(theta):
        raise ValueError("theta must be finite")
    c, s = math.cos(theta), math.sin(theta)
    return RotationMatrix._trusted(SquareMatrix([[c, -s], [s, c]]))


def _first_canonical_not_parallel(u: np.ndarray) -> np.ndarray:
    # For unit u, e_j is parallel to u only when u = +/- e_j.
    for j in range(u.size):
        if abs(u[j]) < 1.0 - 1e-8:
            e = np.zeros(u.size)
            e[j] = 1.0
            return e
    raise AssertionError("unreachable: a unit vector is parallel to at most one canonical axis")


def rotation_mapping(u: Vector, v: Vector) -> RotationMatrix:
    """Construct a proper rotation Q with Qu = v for unit vectors u, v.

    For m = 2 this is the plane rotation through the angle between u and
    v (extracted with atan2, which stays stable near +/- pi). For m >= 3
    an orthonormal basis is built whose first two vectors span {u, v};
    the plane rotation is expressed there and embedded as
    block-diag(Q2, I) conjugated back to the standard basis. When u and
    v are colinear the plane is under-determined and is completed with
    the first canonical basis vector not parallel to u, so the output is
    deterministic.

    For m = 1 the only proper rotation is [1], so u = -v is impossible
    and raises NoProperRotationError.
    """
    if u.dim != v.dim:
        raise DimensionMismatchError(f"u has dimension {u.dim}, v has dimension {v.dim}")
    m = u.dim
    un, vn = u.norm(), v.norm()
    if abs(un - 1.0) > UNIT_TOL or abs(vn - 1.0) > UNIT_TOL:
        raise NonUnitVectorError(f"u and v must be unit vectors (norms {un!r}, {vn!r})")
    ud = u.data / un
    vd = v.data / vn
    if m == 1:
        if ud[0] * vd[0] < 0.0:
            raise NoProperRotationError(
                "impossible in dimension 1: det Q = 1 leaves [1] as the only proper rotation, "
                "and [1] cannot map u to -u"
            )
        return RotationMatrix._trusted(SquareMatrix([[1.0]]))
    if m == 2:
        theta = math.atan2(vd[1], vd[0]) - math.atan2(ud[1], ud[0])
        return rotation_2d(theta)
    # m >= 3: pick the rotation plane. Spanning it with the normalized
    # residual of v against u keeps nearly colinear pairs exact (handing
    # v itself to Gram-Schmidt would trip its dependence threshold);
    # only a genuinely colinear v leaves the plane under-determined, and
    # then the first canonical axis not parallel to u completes it.
    resid = vd - (ud @ vd) * ud
    resid_norm = float(np.linalg.norm(resid))
    if resid_norm < 1e-13:
        second = _first_canonical_not_parallel(ud)
    else:
        second = resid / resid_norm
    basis = gram_schmidt_complete([Vector(ud), Vector(second)], m)
    g = np.column_stack([b.data for b in basis])
    # Coordinates of v in the (g1, g2) plane; u is (1, 0) there.
    a = float(vd @ g[:, 0])
    b = float(vd @ g[:, 1])
    block = np.eye(m)
    block[0, 0] = a
    block[0, 1] = -b
    block[1, 0] = b
    block[1, 1] = a
    q = g @ block @ g.T
    return validate_rotation(SquareMatrix(q), DEFAULT_TOL)


def haar_sample(m: int, rng: np.random.Generator) -> RotationMatrix:
    """Draw a Haar-uniform sample from SO(m).

    Standard-normal fill, QR factorization, then each column of the
    orthogonal factor is multiplied by the sign of the corresponding
    diagonal entry of the triangular factor (making the distribution
    Haar over O(m)); a determinant of -1 is folded into SO(m) by
    negating the last column. Reproducible: the same generator state
    yields a bitwise-identical matrix.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if m == 1:
        return RotationMatrix._trusted(SquareMatrix([[1.0]]))
    z = rng.standard_normal((m, m))
    q, r = np.linalg.qr(z)
    signs = np.sign(np.diag(r))
    signs[signs == 0.0] = 1.0
    q = q * signs
    # Only the sign of the determinant matters here; LAPACK's det is an
    # order of magnitude cheaper than the library LU at sampling rates.
    if np.linalg.det(q) < 0.0:
        q[:, -1] = -q[:, -1]
    return RotationMatrix._trusted(SquareMatrix(q))
