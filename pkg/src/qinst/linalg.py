"""Dense complex linear algebra kernel.

Conventions used throughout the package:

* Operators are numpy arrays of ``complex`` with explicit (rows, cols) shape.
  Vectors are 1-D arrays.
* ``vectorize`` stacks a matrix row-major: component (m, n) of ``F`` sits at
  index ``m * cols + n``.  Equivalently ``|F>> = (F x 1)|1>>`` with ``|1>>``
  the unnormalized maximally entangled vector of the standard basis.
* Transposition and complex conjugation are always taken entrywise in the
  standard computational basis; that basis is fixed once and for all.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import NegativeEigenvalueError, NotHermitianError

DEFAULT_TOL = 1e-10


def as_matrix(a) -> np.ndarray:
    """Coerce input to a 2-D complex ndarray without copying when possible."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got array of ndim {m.ndim}")
    return m


def kron(a, b) -> np.ndarray:
    """Tensor (Kronecker) product with the usual block ordering."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def vectorize(f) -> np.ndarray:
    """Row-major vectorization ``|F>>`` of a d_out x d_in matrix."""
    return as_matrix(f).reshape(-1)


def devectorize(v, d_out: int, d_in: int) -> np.ndarray:
    """Inverse of :func:`vectorize`."""
    v = np.asarray(v, dtype=complex).reshape(-1)
    if v.size != d_out * d_in:
        raise ValueError(f"vector of length {v.size} cannot be a {d_out}x{d_in} matrix")
    return v.reshape(d_out, d_in)


def transpose_op(f) -> np.ndarray:
    """Entrywise transpose in the computational basis."""
    return as_matrix(f).T.copy()


def conjugate_op(f) -> np.ndarray:
    """Entrywise complex conjugate in the computational basis."""
    return as_matrix(f).conj()


def adjoint_op(f) -> np.ndarray:
    """Hermitian adjoint (conjugate transpose)."""
    return as_matrix(f).conj().T.copy()


def frob(x) -> float:
    """Frobenius norm."""
    return float(np.linalg.norm(np.asarray(x)))


def is_hermitian(h, tol: float = DEFAULT_TOL) -> bool:
    h = as_matrix(h)
    if h.shape[0] != h.shape[1]:
        return False
    return frob(h - h.conj().T) <= tol * max(1.0, frob(h))


def _require_hermitian(h, tol: float) -> np.ndarray:
    h = as_matrix(h)
    if not is_hermitian(h, tol):
        raise NotHermitianError(
            f"matrix is not Hermitian within tolerance {tol} "
            f"(residual {frob(h - h.conj().T):.3e})"
        )
    return h


class HermitianEig(NamedTuple):
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending."""

    values: np.ndarray
    vectors: np.ndarray


def eigh_desc(h, tol: float = DEFAULT_TOL) -> HermitianEig:
    """Hermitian eigendecomposition with eigenvalues sorted descending.

    The eigenvector basis within degenerate eigenspaces is an arbitrary
    orthonormal choice; callers must only rely on basis-independent facts.
    """
    h = _require_hermitian(h, tol)
    w, u = np.linalg.eigh((h + h.conj().T) / 2)
    order = np.argsort(w)[::-1]
    return HermitianEig(w[order], u[:, order])


def herm_sqrt(h, tol: float = DEFAULT_TOL) -> np.ndarray:
    """PSD square root of a Hermitian matrix.

    Eigenvalues in ``[-tol * lam_max, tol * lam_max]`` are treated as exact
    zeros (the square root would amplify their noise); anything more negative
    raises :class:`NegativeEigenvalueError`.
    """
    w, u = eigh_desc(h, tol)
    scale = float(np.abs(w).max()) if w.size else 0.0
    if w.size and w.min() < -tol * scale:
        raise NegativeEigenvalueError(
            f"eigenvalue {w.min():.3e} below clamp threshold {-tol * scale:.3e}"
        )
    w = np.where(w > tol * scale, w, 0.0)
    s = (u * np.sqrt(w)) @ u.conj().T
    return (s + s.conj().T) / 2


def herm_pinv_sqrt(h, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose pseudo-inverse square root of a Hermitian PSD matrix.

    Eigenvalues at or below ``tol * lam_max`` are treated as exactly zero, so
    the result is supported on the numerical support of ``h``.
    """
    w, u = eigh_desc(h, tol)
    scale = float(np.abs(w).max()) if w.size else 0.0
    if w.size and w.min() < -tol * scale:
        raise NegativeEigenvalueError(
            f"matrix is not PSD: eigenvalue {w.min():.3e}"
        )
    inv = np.where(w > tol * scale, 1.0 / np.sqrt(np.clip(w, 1e-300, None)), 0.0)
    s = (u * inv) @ u.conj().T
    return (s + s.conj().T) / 2


def support_basis(h, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (as columns) of the support of a Hermitian PSD matrix.

    The column count equals the numerical rank: eigenvectors whose eigenvalue
    exceeds ``tol * lam_max`` are kept, in descending eigenvalue order.
    """
    w, u = eigh_desc(h, tol)
    scale = float(np.abs(w).max()) if w.size else 0.0
    keep = w > tol * scale
    return u[:, keep]


def support_projector(h, tol: float = DEFAULT_TOL) -> np.ndarray:
    b = support_basis(h, tol)
    return b @ b.conj().T


def numerical_rank(h, tol: float = DEFAULT_TOL) -> int:
    return support_basis(h, tol).shape[1]


def partial_trace(x, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out all tensor factors not listed in ``keep``.

    ``dims`` lists the factor dimensions of the square matrix ``x`` in order;
    the kept factors preserve their original order.
    """
    x = as_matrix(x)
    dims = [int(d) for d in dims]
    n = len(dims)
    side = int(np.prod(dims))
    if x.shape != (side, side):
        raise ValueError(f"matrix of shape {x.shape} does not factor as {dims}")
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= n for k in keep):
        raise ValueError(f"keep indices {keep} out of range for {n} factors")
    traced = [i for i in range(n) if i not in keep]
    t = x.reshape(dims + dims)
    perm = keep + traced + [i + n for i in keep] + [i + n for i in traced]
    t = t.transpose(perm)
    dk = int(np.prod([dims[i] for i in keep])) if keep else 1
    dt = int(np.prod([dims[i] for i in traced])) if traced else 1
    t = t.reshape(dk, dt, dk, dt)
    return np.einsum("akbk->ab", t)


def swap_operator(d: int) -> np.ndarray:
    """Unitary swap E on C^d x C^d with E(|i>|j>) = |j>|i>."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    e = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            e[j * d + i, i * d + j] = 1.0
    return e


def matrix_units(d_out: int, d_in: int | None = None) -> list[np.ndarray]:
    """The matrix-unit basis E_ij of d_out x d_in matrices, row-major order."""
    if d_in is None:
        d_in = d_out
    units = []
    for i in range(d_out):
        for j in range(d_in):
            e = np.zeros((d_out, d_in), dtype=complex)
            e[i, j] = 1.0
            units.append(e)
    return units
