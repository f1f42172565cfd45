"""Finite-outcome quantum instruments and their minimal ancilla-POVM dilations.

An instrument assigns to each outcome a weight ``mu_i > 0`` and a CP density
map ``S_i`` so that the total map ``sum_i mu_i S_i`` is trace preserving.
Its operator-valued measure has one PSD block per outcome,
``Z_i = mu_i * choi(S_i)``, normalized by ``Tr_out[sum_i Z_i] = 1``.

The minimal dilation realizes every outcome by a single isometry into
system + ancilla followed by an ancilla POVM:

    V   = (1_out (x) (Z^T)^(1/2)) (|1_out>> (x) 1_in)   restricted to supp(Z^T)
    Q_i = (Z^(-1/2) Z_i Z^(-1/2))^T                      in the same subspace

with ``Z`` the total block sum, and ancilla dimension equal to rank(Z).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import linalg as la
from .cpmap import CPMap
from .errors import DegenerateStateError, NotNormalizedError, NotPSDError
from .reports import VerificationReport

DEFAULT_TOL = 1e-10


class Outcome(NamedTuple):
    label: str
    weight: float
    density: CPMap


class Instrument:
    """Finite list of labeled outcomes with positive weights and CP densities."""

    def __init__(self, outcomes: Sequence[Outcome] | Sequence[tuple]):
        outcomes = [Outcome(str(l), float(w), d) for l, w, d in outcomes]
        if not outcomes:
            raise ValueError("instrument needs at least one outcome")
        d_in, d_out = outcomes[0].density.d_in, outcomes[0].density.d_out
        for o in outcomes:
            if o.weight <= 0:
                raise ValueError("outcome weights must be strictly positive")
            if (o.density.d_in, o.density.d_out) != (d_in, d_out):
                raise ValueError("all outcome densities must share dimensions")
        self.d_in = d_in
        self.d_out = d_out
        self.outcomes = outcomes

    def __len__(self) -> int:
        return len(self.outcomes)

    @property
    def labels(self) -> list[str]:
        return [o.label for o in self.outcomes]

    @classmethod
    def from_channel(cls, channel: CPMap, label: str = "0") -> "Instrument":
        return cls([Outcome(label, 1.0, channel)])

    def total_map(self) -> CPMap:
        kraus = [np.sqrt(o.weight) * k for o in self.outcomes for k in o.density.kraus]
        return CPMap(self.d_in, self.d_out, kraus=kraus)

    def normalization_residual(self) -> float:
        _, total = cjm(self)
        marginal = la.partial_trace(total, [self.d_out, self.d_in], keep=[1])
        return la.frob(marginal - np.eye(self.d_in))

    def validate(self, tol: float = 1e-9) -> VerificationReport:
        report = VerificationReport()
        report.add("trace-preservation", self.normalization_residual(), tol)
        for o in self.outcomes:
            sub = o.density.validate(tol)
            report.add(f"outcome[{o.label}]-cp", sub.residual("choi-psd"), tol)
        return report

    def require_normalized(self, tol: float = 1e-9) -> None:
        res = self.normalization_residual()
        if res > tol:
            raise NotNormalizedError(
                f"instrument total map is not trace preserving (residual {res:.3e})"
            )

    def __repr__(self) -> str:
        return f"Instrument(d_in={self.d_in}, d_out={self.d_out}, outcomes={len(self)})"


def cjm(instr: Instrument) -> tuple[list[np.ndarray], np.ndarray]:
    """Per-outcome operator blocks ``Z_i = mu_i choi(S_i)`` and their sum."""
    blocks = [o.weight * o.density.choi for o in instr.outcomes]
    return blocks, sum(blocks)


def povm(instr: Instrument) -> list[np.ndarray]:
    """Outcome effects ``P_i = Tr_out[Z_i^T]`` on the input space."""
    blocks, _ = cjm(instr)
    return [la.partial_trace(z, [instr.d_out, instr.d_in], keep=[1]).T for z in blocks]


def density_from_cjm(blocks, d_in: int, d_out: int, labels=None, tol: float = DEFAULT_TOL) -> Instrument:
    """Rebuild an instrument from operator blocks.

    Weights are ``mu_i = Tr[Z_i]``; outcomes with ``mu_i <= tol`` are dropped.
    """
    blocks = [la.as_matrix(z) for z in blocks]
    if labels is None:
        labels = [str(i) for i in range(len(blocks))]
    total = sum(blocks)
    marginal = la.partial_trace(total, [d_out, d_in], keep=[1])
    if la.frob(marginal - np.eye(d_in)) > max(tol, 1e-9):
        raise NotNormalizedError("blocks do not sum to a trace-preserving total map")
    outcomes = []
    for label, z in zip(labels, blocks):
        w = np.linalg.eigvalsh((z + z.conj().T) / 2)
        scale = float(np.abs(w).max()) if w.size else 0.0
        if w.size and w.min() < -max(tol, 1e-9) * max(1.0, scale):
            raise NotPSDError(f"block {label!r} has negative eigenvalue {w.min():.3e}")
        mu = float(np.trace(z).real)
        if mu <= tol:
            continue
        outcomes.append(Outcome(label, mu, CPMap(d_in, d_out, choi=z / mu)))
    return Instrument(outcomes)


@dataclass
class InstrumentDilation:
    """Triple (ancilla, isometry, ancilla POVM) realizing an instrument."""

    ancilla_dim: int
    v: np.ndarray
    q: list[np.ndarray]
    ancilla_embedding: np.ndarray | None = None
    labels: list[str] | None = None


def minimal_dilation(instr: Instrument, tol: float = DEFAULT_TOL) -> InstrumentDilation:
    """Minimal ancilla-POVM dilation of a normalized instrument.

    The ancilla dimension equals the rank of the total block sum; outcomes of
    zero weight yield zero POVM effects (pseudo-inverses act on the support).
    """
    instr.require_normalized(max(tol, 1e-9))
    blocks, total = cjm(instr)
    d_in, d_out = instr.d_in, instr.d_out
    zt = total.T
    w = la.support_basis(zt, tol)
    r = w.shape[1]
    root = la.herm_sqrt(zt, tol)
    vec_one = la.vectorize(np.eye(d_out)).reshape(-1, 1)
    v_full = la.kron(np.eye(d_out), root) @ la.kron(vec_one, np.eye(d_in))
    v = la.kron(np.eye(d_out), w.conj().T) @ v_full
    pinv_root = la.herm_pinv_sqrt(total, tol)
    q = [w.conj().T @ (pinv_root @ z @ pinv_root).T @ w for z in blocks]
    return InstrumentDilation(r, v, q, ancilla_embedding=w, labels=instr.labels)


def verify_dilation(instr: Instrument, dil: InstrumentDilation, tol: float = 1e-9) -> VerificationReport:
    """Per-outcome reconstruction, POVM completeness and isometry residuals."""
    report = VerificationReport()
    v = la.as_matrix(dil.v)
    r = dil.ancilla_dim
    d_out = v.shape[0] // r
    if v.shape != (d_out * r, instr.d_in) or d_out != instr.d_out:
        raise ValueError("dilation shapes are inconsistent with the instrument")
    if len(dil.q) != len(instr):
        raise ValueError("one POVM effect per outcome is required")
    report.add("isometry", la.frob(v.conj().T @ v - np.eye(instr.d_in)), tol)
    report.add("povm-completeness", la.frob(sum(dil.q) - np.eye(r)), tol)
    for q in dil.q:
        wmin = float(np.linalg.eigvalsh((q + q.conj().T) / 2).min())
        if wmin < -tol:
            report.add("povm-positivity", -wmin, tol)
            break
    units = la.matrix_units(instr.d_in)
    images = [v @ e @ v.conj().T for e in units]
    for o, q in zip(instr.outcomes, dil.q):
        worst = 0.0
        for e, img in zip(units, images):
            lhs = la.partial_trace(img @ la.kron(np.eye(d_out), q), [d_out, r], keep=[0])
            worst = max(worst, la.frob(lhs - o.weight * o.density.apply(e)))
        report.add(f"outcome[{o.label}]-reconstruction", worst, tol)
    return report


def outcome_probabilities(instr: Instrument, rho) -> np.ndarray:
    """Born probabilities ``p_i = mu_i Tr[S_i(rho)] = Tr[P_i rho]``."""
    rho = la.as_matrix(rho)
    probs = np.array([np.trace(p @ rho).real for p in povm(instr)])
    return probs


def sample(instr: Instrument, rho, rng) -> tuple[str, np.ndarray]:
    """Draw one outcome and return its label with the normalized posterior."""
    rng = np.random.default_rng(rng)
    probs = outcome_probabilities(instr, rho)
    total = probs.clip(0).sum()
    if total < 1e-12:
        raise DegenerateStateError("all outcome probabilities vanish for this state")
    probs = probs.clip(0) / total
    i = int(rng.choice(len(probs), p=probs))
    o = instr.outcomes[i]
    post = o.density.apply(rho)
    return o.label, post / np.trace(post).real


def sample_counts(instr: Instrument, rho, n: int, rng) -> dict[str, int]:
    """Histogram of ``n`` independent outcome draws (posteriors not computed)."""
    rng = np.random.default_rng(rng)
    probs = outcome_probabilities(instr, rho)
    total = probs.clip(0).sum()
    if total < 1e-12:
        raise DegenerateStateError("all outcome probabilities vanish for this state")
    probs = probs.clip(0) / total
    counts = rng.multinomial(n, probs)
    return {o.label: int(c) for o, c in zip(instr.outcomes, counts)}
