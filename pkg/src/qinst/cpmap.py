"""Completely positive maps between finite-dimensional spaces.

A :class:`CPMap` keeps a Kraus list and/or a Choi operator and converts
lazily between the two.  The Choi operator of a map ``M`` with Kraus
operators ``M_i`` (each d_out x d_in) is the PSD operator on
``H_out (x) H_in``

    R = sum_i |M_i>><<M_i|,

and map application reads ``M(rho) = Tr_in[(1 (x) rho^T) R]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg as la
from .errors import NotCPError, NotPSDError
from .reports import VerificationReport

DEFAULT_TOL = 1e-10


def choi_from_kraus(kraus) -> np.ndarray:
    """Choi operator ``sum_i |M_i>><<M_i|`` of a Kraus list."""
    ops = [la.as_matrix(k) for k in kraus]
    if not ops:
        raise ValueError("empty Kraus list")
    shape = ops[0].shape
    if any(k.shape != shape for k in ops):
        raise ValueError("Kraus operators must share one shape")
    vecs = np.stack([la.vectorize(k) for k in ops])
    return np.einsum("ia,ib->ab", vecs, vecs.conj())


def kraus_from_choi(choi, d_out: int, d_in: int, tol: float = DEFAULT_TOL) -> list[np.ndarray]:
    """Canonical Kraus operators of a PSD Choi operator.

    These are the devectorized eigenvectors scaled by the square roots of the
    eigenvalues, so they satisfy ``Tr[K_i^dag K_j] = delta_ij ||K_i||_2^2``.
    """
    choi = la.as_matrix(choi)
    if choi.shape != (d_out * d_in, d_out * d_in):
        raise ValueError("Choi operator has the wrong side length")
    w, u = la.eigh_desc(choi, tol)
    scale = float(np.abs(w).max()) if w.size else 0.0
    if w.size and w.min() < -tol * scale:
        raise NotPSDError(f"Choi operator has eigenvalue {w.min():.3e}")
    ops = []
    for lam, vec in zip(w, u.T):
        if lam > tol * scale:
            ops.append(la.devectorize(np.sqrt(lam) * vec, d_out, d_in))
    return ops


class CPMap:
    """A CP map with input dimension ``d_in`` and output dimension ``d_out``.

    At least one of ``kraus`` / ``choi`` must be given; the missing
    representation is computed on first access and cached (write-once).
    """

    def __init__(self, d_in: int, d_out: int, kraus=None, choi=None, tol: float = DEFAULT_TOL):
        if kraus is None and choi is None:
            raise ValueError("need a Kraus list or a Choi operator")
        self.d_in = int(d_in)
        self.d_out = int(d_out)
        self.tol = float(tol)
        self._kraus = None if kraus is None else [la.as_matrix(k) for k in kraus]
        self._choi = None if choi is None else la.as_matrix(choi)
        if self._kraus is not None:
            for k in self._kraus:
                if k.shape != (self.d_out, self.d_in):
                    raise ValueError(
                        f"Kraus operator of shape {k.shape}, expected {(self.d_out, self.d_in)}"
                    )
        if self._choi is not None:
            side = self.d_out * self.d_in
            if self._choi.shape != (side, side):
                raise ValueError(f"Choi operator of shape {self._choi.shape}, expected {(side, side)}")

    @classmethod
    def from_kraus(cls, kraus, tol: float = DEFAULT_TOL) -> "CPMap":
        ops = [la.as_matrix(k) for k in kraus]
        d_out, d_in = ops[0].shape
        return cls(d_in, d_out, kraus=ops, tol=tol)

    @classmethod
    def from_choi(cls, choi, d_in: int, d_out: int, tol: float = DEFAULT_TOL) -> "CPMap":
        return cls(d_in, d_out, choi=choi, tol=tol)

    @classmethod
    def identity(cls, d: int) -> "CPMap":
        return cls(d, d, kraus=[np.eye(d, dtype=complex)])

    @classmethod
    def from_unitary(cls, u) -> "CPMap":
        u = la.as_matrix(u)
        return cls(u.shape[1], u.shape[0], kraus=[u])

    @property
    def kraus(self) -> list[np.ndarray]:
        if self._kraus is None:
            self._kraus = kraus_from_choi(self._choi, self.d_out, self.d_in, self.tol)
        return self._kraus

    @property
    def choi(self) -> np.ndarray:
        if self._choi is None:
            self._choi = choi_from_kraus(self._kraus)
        return self._choi

    def scaled(self, factor: float) -> "CPMap":
        """The map multiplied by a nonnegative scalar."""
        if factor < 0:
            raise ValueError("scale factor must be nonnegative")
        root = np.sqrt(factor)
        return CPMap(self.d_in, self.d_out, kraus=[root * k for k in self.kraus], tol=self.tol)

    def apply(self, rho) -> np.ndarray:
        """Apply the map to a d_in x d_in operator."""
        rho = la.as_matrix(rho)
        if rho.shape != (self.d_in, self.d_in):
            raise ValueError(f"input of shape {rho.shape}, expected {(self.d_in, self.d_in)}")
        if self._kraus is not None:
            out = np.zeros((self.d_out, self.d_out), dtype=complex)
            for k in self._kraus:
                out += k @ rho @ k.conj().T
            return out
        x = la.kron(np.eye(self.d_out), rho.T) @ self._choi
        return la.partial_trace(x, [self.d_out, self.d_in], keep=[0])

    def __call__(self, rho) -> np.ndarray:
        return self.apply(rho)

    def trace_out_map(self) -> np.ndarray:
        """``Tr_out[choi]``; equals ``(sum_i M_i^dag M_i)^T``."""
        return la.partial_trace(self.choi, [self.d_out, self.d_in], keep=[1])

    def is_channel(self, tol: float = 1e-9) -> bool:
        return la.frob(self.trace_out_map() - np.eye(self.d_in)) <= tol * max(1.0, self.d_in)

    def is_trace_nonincreasing(self, tol: float = 1e-9) -> bool:
        gap = np.eye(self.d_in) - self.trace_out_map()
        w = np.linalg.eigvalsh((gap + gap.conj().T) / 2)
        return bool(w.min() >= -tol)

    def validate(self, tol: float = 1e-9) -> VerificationReport:
        """Check CP (Choi PSD), Hermiticity, and Kraus/Choi consistency."""
        report = VerificationReport()
        choi = self.choi
        report.add("choi-hermitian", la.frob(choi - choi.conj().T) / max(1.0, la.frob(choi)), tol)
        w = np.linalg.eigvalsh((choi + choi.conj().T) / 2)
        scale = float(np.abs(w).max()) if w.size else 0.0
        report.add("choi-psd", max(0.0, -float(w.min())) / max(1.0, scale), tol)
        if self._kraus is not None and self._choi is not None:
            report.add(
                "kraus-choi-consistency",
                la.frob(self._choi - choi_from_kraus(self._kraus)),
                tol * max(1.0, la.frob(choi)),
            )
        return report

    def require_cp(self, tol: float = DEFAULT_TOL) -> None:
        w = np.linalg.eigvalsh((self.choi + self.choi.conj().T) / 2)
        scale = float(np.abs(w).max()) if w.size else 0.0
        if la.frob(self.choi - self.choi.conj().T) > tol * max(1.0, scale):
            raise NotCPError("Choi operator is not Hermitian")
        if w.size and w.min() < -tol * scale:
            raise NotCPError(f"Choi operator has negative eigenvalue {w.min():.3e}")

    def __repr__(self) -> str:
        reps = []
        if self._kraus is not None:
            reps.append(f"kraus[{len(self._kraus)}]")
        if self._choi is not None:
            reps.append("choi")
        return f"CPMap(d_in={self.d_in}, d_out={self.d_out}, {'+'.join(reps)})"


def map_adjoint(m: CPMap) -> CPMap:
    """Adjoint map w.r.t. the Hilbert-Schmidt inner product: Kraus ``{M_i^dag}``."""
    return CPMap(m.d_out, m.d_in, kraus=[k.conj().T for k in m.kraus], tol=m.tol)


def map_transpose(m: CPMap) -> CPMap:
    """Transposed map: Kraus ``{M_i^T}``."""
    return CPMap(m.d_out, m.d_in, kraus=[k.T for k in m.kraus], tol=m.tol)


def map_conjugate(m: CPMap) -> CPMap:
    """Conjugate map: Kraus ``{M_i^*}``."""
    return CPMap(m.d_in, m.d_out, kraus=[k.conj() for k in m.kraus], tol=m.tol)


def check_operator(m: CPMap) -> np.ndarray:
    """The operator acting on vectorized inputs: ``R_check |A>> = |M(A)>>``.

    Equals ``sum_i M_i (x) M_i^*`` and is obtained from the Choi operator by
    the index reshuffle ``R_check[(m,m'),(n,n')] = R[(m,n),(m',n')]``.
    """
    r = m.choi.reshape(m.d_out, m.d_in, m.d_out, m.d_in)
    return r.transpose(0, 2, 1, 3).reshape(m.d_out * m.d_out, m.d_in * m.d_in).copy()


def compose(f: CPMap, g: CPMap) -> CPMap:
    """The composition ``f after g``."""
    if f.d_in != g.d_out:
        raise ValueError(f"cannot compose: f.d_in={f.d_in} but g.d_out={g.d_out}")
    kraus = [a @ b for a in f.kraus for b in g.kraus]
    return CPMap(g.d_in, f.d_out, kraus=kraus, tol=min(f.tol, g.tol))


def tensor(f: CPMap, g: CPMap) -> CPMap:
    """The tensor product map ``f (x) g``."""
    kraus = [la.kron(a, b) for a in f.kraus for b in g.kraus]
    return CPMap(f.d_in * g.d_in, f.d_out * g.d_out, kraus=kraus, tol=min(f.tol, g.tol))


@dataclass
class StinespringDilation:
    """An isometric dilation ``M(rho) = Tr_A[V rho V^dag]``.

    ``ancilla_embedding`` (when present) holds orthonormal columns embedding
    the ancilla space into ``H_out (x) H_in``; for the minimal construction it
    spans the support of the transposed Choi operator.
    """

    ancilla_dim: int
    v: np.ndarray
    ancilla_embedding: np.ndarray | None = None

    @property
    def d_in(self) -> int:
        return self.v.shape[1]

    @property
    def d_out(self) -> int:
        return self.v.shape[0] // self.ancilla_dim


def stinespring_minimal(m: CPMap, tol: float = DEFAULT_TOL) -> StinespringDilation:
    """Minimal Stinespring dilation computed directly from the Choi operator.

    ``V = (1_out (x) (R^T)^(1/2)) (|1_out>> (x) 1_in)`` compressed onto the
    support of ``R^T``, whose dimension is the Choi rank.  For channels the
    result is an isometry; for trace-non-increasing maps a contraction.
    """
    m.require_cp(tol)
    d_in, d_out = m.d_in, m.d_out
    rt = m.choi.T
    root = la.herm_sqrt(rt, tol)
    w = la.support_basis(rt, tol)
    r = w.shape[1]
    vec_one = la.vectorize(np.eye(d_out)).reshape(-1, 1)
    v_full = la.kron(np.eye(d_out), root) @ la.kron(vec_one, np.eye(d_in))
    v = la.kron(np.eye(d_out), w.conj().T) @ v_full
    return StinespringDilation(ancilla_dim=r, v=v, ancilla_embedding=w)


def verify_stinespring(m: CPMap, dilation: StinespringDilation, tol: float = 1e-9) -> VerificationReport:
    """Check ``Tr_A[V E_ij V^dag] = M(E_ij)`` over the matrix-unit basis."""
    report = VerificationReport()
    v = la.as_matrix(dilation.v)
    r = dilation.ancilla_dim
    d_out = v.shape[0] // r
    if v.shape != (d_out * r, m.d_in) or d_out != m.d_out:
        raise ValueError("dilation shapes are inconsistent with the map")
    worst = 0.0
    for e in la.matrix_units(m.d_in):
        lhs = la.partial_trace(v @ e @ v.conj().T, [d_out, r], keep=[0])
        worst = max(worst, la.frob(lhs - m.apply(e)))
    report.add("map-reconstruction", worst, tol)
    gram = v.conj().T @ v
    report.add("gram-vs-trace-map", la.frob(gram - m.trace_out_map().T), tol)
    if m.is_channel(tol):
        report.add("isometry", la.frob(gram - np.eye(m.d_in)), tol)
    elif m.is_trace_nonincreasing(tol):
        wmin = float(np.linalg.eigvalsh(np.eye(m.d_in) - (gram + gram.conj().T) / 2).min())
        report.add("contraction", max(0.0, -wmin), tol)
    if dilation.ancilla_embedding is not None:
        emb = dilation.ancilla_embedding
        report.add("embedding-orthonormal", la.frob(emb.conj().T @ emb - np.eye(r)), tol)
        report.add("minimality", abs(r - la.numerical_rank(m.choi, DEFAULT_TOL)), 0.0)
    return report
