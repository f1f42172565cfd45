"""Finite weighted operator frames and their duals.

A frame is a finite family ``{(mu_i, A_i)}`` of operators on one space with
strictly positive weights.  Its frame operator is the PSD operator

    A = sum_i mu_i |A_i>><<A_i|

on the doubled space.  A frame is *tight* when ``A = 1 (x) 1`` and
*left-tight* when ``A = 1 (x) K`` for some PSD ``K``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg as la
from .errors import NotInSpanError

DEFAULT_TOL = 1e-10


class OperatorFrame:
    """Weighted operator family on a d-dimensional space."""

    def __init__(self, members):
        members = [(float(mu), la.as_matrix(a)) for mu, a in members]
        if not members:
            raise ValueError("frame needs at least one member")
        d = members[0][1].shape[0]
        for mu, a in members:
            if mu <= 0:
                raise ValueError("frame weights must be strictly positive")
            if a.shape != (d, d):
                raise ValueError("all frame members must be square of one size")
        self.d = d
        self.members = members
        self._frame_operator: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.members)

    @property
    def weights(self) -> list[float]:
        return [mu for mu, _ in self.members]

    @property
    def operators(self) -> list[np.ndarray]:
        return [a for _, a in self.members]

    @property
    def frame_operator(self) -> np.ndarray:
        if self._frame_operator is None:
            self._frame_operator = frame_operator(self)
        return self._frame_operator

    def rescaled(self, factor: float) -> "OperatorFrame":
        """Same operators with all weights multiplied by ``factor``."""
        return OperatorFrame([(mu * factor, a) for mu, a in self.members])

    def __repr__(self) -> str:
        return f"OperatorFrame(d={self.d}, members={len(self.members)})"


def frame_operator(frame: OperatorFrame) -> np.ndarray:
    vecs = np.stack([la.vectorize(a) for a in frame.operators])
    mus = np.asarray(frame.weights)
    return np.einsum("i,ia,ib->ab", mus, vecs, vecs.conj())


def canonical_dual(frame: OperatorFrame, tol: float = DEFAULT_TOL) -> list[np.ndarray]:
    """Canonical dual operators, pseudo-inverse of the frame operator applied
    to each member."""
    fo = frame.frame_operator
    pinv_root = la.herm_pinv_sqrt(fo, tol)
    pinv = pinv_root @ pinv_root
    return [la.devectorize(pinv @ la.vectorize(a), frame.d, frame.d) for a in frame.operators]


def expand(frame: OperatorFrame, dual, x, tol: float = 1e-9) -> np.ndarray:
    """Expansion coefficients of ``x`` on the frame.

    Returns ``c_i = mu_i <<N_i|x>>`` (the weight is folded into the
    coefficient), so that ``sum_i c_i A_i = x`` whenever ``x`` lies in the
    span of the frame; otherwise :class:`NotInSpanError` is raised.
    """
    x = la.as_matrix(x)
    vx = la.vectorize(x)
    proj = la.support_projector(frame.frame_operator, DEFAULT_TOL)
    out_of_span = la.frob(vx - proj @ vx)
    if out_of_span > tol * max(1.0, la.frob(vx)):
        raise NotInSpanError(f"operator lies outside the frame span (residual {out_of_span:.3e})")
    return np.array(
        [mu * np.vdot(la.vectorize(n), vx) for (mu, _), n in zip(frame.members, dual)]
    )


@dataclass
class TightnessReport:
    kind: str  # "tight" | "left_tight" | "generic"
    k_operator: np.ndarray | None
    residual: float
    identity_residuals: dict[str, float]

    @property
    def is_tight(self) -> bool:
        return self.kind == "tight"

    @property
    def is_left_tight(self) -> bool:
        return self.kind in ("tight", "left_tight")


def classify_tightness(frame: OperatorFrame, tol: float = 1e-9) -> TightnessReport:
    """Classify a frame as tight, left-tight, or generic.

    Left-tightness fixes the candidate uniquely: ``K = Tr_1[A] / d``.  When
    the frame qualifies, the two equivalent resolution identities (the
    twirl identity on a matrix-unit basis, and
    ``sum mu_i A_i (x) A_i^* = |1>><<K^T|``) are also verified and their
    residuals reported.
    """
    fo = frame.frame_operator
    d = frame.d
    k = la.partial_trace(fo, [d, d], keep=[1]) / d
    residual_left = la.frob(fo - la.kron(np.eye(d), k))
    residual_tight = la.frob(fo - np.eye(d * d))
    scale = tol * d
    if residual_tight <= scale:
        kind, k_op, residual = "tight", np.eye(d, dtype=complex), residual_tight
    elif residual_left <= scale:
        kind, k_op, residual = "left_tight", (k + k.conj().T) / 2, residual_left
    else:
        return TightnessReport("generic", None, min(residual_left, residual_tight), {})

    # Equivalent identities, checked on a matrix-unit basis.
    twirl = 0.0
    for e in la.matrix_units(d):
        acc = np.zeros((d, d), dtype=complex)
        for mu, a in frame.members:
            acc += mu * (a @ e @ a.conj().T)
        twirl = max(twirl, la.frob(acc - np.trace(e @ k_op.T) * np.eye(d)))
    pairing = np.zeros((d * d, d * d), dtype=complex)
    for mu, a in frame.members:
        pairing += mu * la.kron(a, a.conj())
    bell = np.outer(la.vectorize(np.eye(d)), la.vectorize(k_op.T).conj())
    identity_residuals = {
        "twirl-identity": twirl,
        "bell-pairing-identity": la.frob(pairing - bell),
    }
    return TightnessReport(kind, k_op, residual, identity_residuals)


# ---------------------------------------------------------------------------
# Named frames


def pauli_operators() -> list[np.ndarray]:
    i2 = np.eye(2, dtype=complex)
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    y = np.array([[0, -1j], [1j, 0]], dtype=complex)
    z = np.array([[1, 0], [0, -1]], dtype=complex)
    return [i2, x, y, z]


def weyl_heisenberg_unitaries(d: int) -> list[np.ndarray]:
    """The d^2 clock-and-shift unitaries ``X^a Z^b`` on C^d."""
    if d < 2:
        raise ValueError("dimension must be >= 2")
    omega = np.exp(2j * np.pi / d)
    shift = np.zeros((d, d), dtype=complex)
    for j in range(d):
        shift[(j + 1) % d, j] = 1.0
    clock = np.diag(omega ** np.arange(d))
    out = []
    xa = np.eye(d, dtype=complex)
    for _ in range(d):
        zb = np.eye(d, dtype=complex)
        for _ in range(d):
            out.append(xa @ zb)
            zb = zb @ clock
        xa = xa @ shift
    return out


def pauli_frame() -> OperatorFrame:
    """The qubit Pauli frame with weights 1/2; tight."""
    return OperatorFrame([(0.5, p) for p in pauli_operators()])


def weyl_heisenberg_frame(d: int) -> OperatorFrame:
    """Clock-and-shift unitary frame with weights 1/d; tight for every d."""
    return OperatorFrame([(1.0 / d, u) for u in weyl_heisenberg_unitaries(d)])


def matrix_unit_frame(d: int) -> OperatorFrame:
    """The matrix units with unit weights; an orthonormal operator basis."""
    return OperatorFrame([(1.0, e) for e in la.matrix_units(d)])


def named_frame(name: str, d: int = 2) -> OperatorFrame:
    builders = {
        "pauli": lambda: pauli_frame(),
        "weyl-heisenberg": lambda: weyl_heisenberg_frame(d),
        "matrix-units": lambda: matrix_unit_frame(d),
    }
    if name not in builders:
        raise ValueError(f"unknown frame name {name!r}; choose from {sorted(builders)}")
    if name == "pauli" and d != 2:
        raise ValueError("the pauli frame is defined for d=2")
    return builders[name]()
