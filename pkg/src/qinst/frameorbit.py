"""Frame-orbit instruments, feed-forward realizations and teleportation schemes.

A frame-orbit specification consists of an operator frame ``{(mu_i, A_i)}``
on the input space, one conditional channel ``B_i`` per member on the output
space, and a seed CP map ``S0``.  The induced instrument has outcome weights
``mu_i`` and densities ``S_i = B_i . S0 . A_i^dag(.)A_i``; it is normalized
exactly when ``sum_i mu_i A_i xi A_i^dag = 1`` for ``xi = sum_k S_k^dag S_k``
built from any Kraus form of the seed.

For left-tight frames (frame operator ``1 (x) K``) the feed-forward
realization collapses to a two-party teleportation scheme: a shared resource
state, a joint POVM on (Alice's resource half, input), classical
communication of the outcome, and the conditional channel at Bob's end.
Operator ordering in all schemes is (Bob's half, Alice's half, input).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations

import numpy as np

from . import linalg as la
from .cpmap import CPMap, compose
from .errors import NormalizationFailedError, NotCovariantError, NotLeftTightError, NotTightError
from .frames import OperatorFrame, classify_tightness
from .instruments import Instrument, InstrumentDilation, Outcome, minimal_dilation
from .reports import VerificationReport

DEFAULT_TOL = 1e-10


def xi_of(seed_map: CPMap) -> np.ndarray:
    """The operator ``xi = sum_k S_k^dag S_k`` governing normalization."""
    marginal = la.partial_trace(seed_map.choi, [seed_map.d_out, seed_map.d_in], keep=[1])
    return marginal.T


class FrameOrbitSpec:
    """Frame + conditional channels + seed map defining a frame-orbit instrument."""

    def __init__(self, frame: OperatorFrame, conditional_channels, seed_map: CPMap,
                 tol: float = 1e-9):
        if isinstance(conditional_channels, CPMap):
            conditional_channels = [conditional_channels] * len(frame)
        conditional_channels = list(conditional_channels)
        if len(conditional_channels) == 1 and len(frame) > 1:
            conditional_channels = conditional_channels * len(frame)
        if len(conditional_channels) != len(frame):
            raise ValueError("need one conditional channel per frame member")
        if seed_map.d_in != frame.d:
            raise ValueError("seed map input dimension must match the frame")
        for b in conditional_channels:
            if b.d_in != b.d_out:
                raise ValueError("conditional channels act on the output space")
            if not b.is_channel(tol):
                raise ValueError("conditional channels must be trace preserving")
        self.frame = frame
        self.conditional_channels = conditional_channels
        self.seed_map = seed_map

    @property
    def d_in(self) -> int:
        return self.frame.d

    @property
    def d_out(self) -> int:
        return self.seed_map.d_out

    def normalization_residual(self) -> float:
        xi = xi_of(self.seed_map)
        acc = np.zeros((self.d_in, self.d_in), dtype=complex)
        for mu, a in self.frame.members:
            acc += mu * (a @ xi @ a.conj().T)
        return la.frob(acc - np.eye(self.d_in))

    def require_normalized(self, tol: float = 1e-9) -> None:
        res = self.normalization_residual()
        if res > tol:
            raise NormalizationFailedError(
                f"frame-orbit normalization fails (residual {res:.3e})"
            )


def build_instrument(spec: FrameOrbitSpec, tol: float = 1e-9) -> Instrument:
    """The instrument with weights ``mu_i`` and densities ``B_i S0 A_i^dag(.)A_i``."""
    spec.require_normalized(tol)
    outcomes = []
    for i, ((mu, a), b) in enumerate(zip(spec.frame.members, spec.conditional_channels)):
        pull_back = CPMap(spec.d_in, spec.d_in, kraus=[a.conj().T])
        density = compose(b, compose(spec.seed_map, pull_back))
        outcomes.append(Outcome(str(i), mu, density))
    return Instrument(outcomes)


def povm_densities(spec: FrameOrbitSpec) -> list[np.ndarray]:
    """Densities ``xi_i = A_i xi A_i^dag`` of the induced measurement POVM."""
    xi = xi_of(spec.seed_map)
    return [a @ xi @ a.conj().T for _, a in spec.frame.members]


def _cjm_density_blocks(spec: FrameOrbitSpec, with_b: bool) -> list[np.ndarray]:
    s0 = spec.seed_map.choi
    d_out = spec.d_out
    blocks = []
    for (mu, a), b in zip(spec.frame.members, spec.conditional_channels):
        m = la.kron(np.eye(d_out), a.conj())
        block = m @ s0 @ m.conj().T
        if with_b:
            block = sum(la.kron(k, np.eye(spec.d_in)) @ block @ la.kron(k, np.eye(spec.d_in)).conj().T
                        for k in b.kraus)
        blocks.append(block)
    return blocks


def reduced_total_choi(spec: FrameOrbitSpec) -> tuple[np.ndarray, np.ndarray]:
    """Choi operator of the conditional-channel-free total map, two ways.

    Path one sums the per-outcome blocks directly; path two evaluates the
    closed form ``(S0 (x) I)(E A^* E)`` with ``E`` the swap and ``A`` the
    frame operator.  Both must agree for a consistent implementation.
    """
    blocks = _cjm_density_blocks(spec, with_b=False)
    direct = sum(mu * blk for (mu, _), blk in zip(spec.frame.members, blocks))
    d = spec.d_in
    e = la.swap_operator(d)
    core = e @ spec.frame.frame_operator.conj() @ e
    swapped = np.zeros((spec.d_out * d, spec.d_out * d), dtype=complex)
    for k in spec.seed_map.kraus:
        m = la.kron(k, np.eye(d))
        swapped += m @ core @ m.conj().T
    return direct, swapped


def reduced_instrument(spec: FrameOrbitSpec, tol: float = 1e-9) -> Instrument:
    """The equivalent instrument with the conditional channels stripped off."""
    spec.require_normalized(tol)
    outcomes = []
    for i, (mu, a) in enumerate(spec.frame.members):
        pull_back = CPMap(spec.d_in, spec.d_in, kraus=[a.conj().T])
        outcomes.append(Outcome(str(i), mu, compose(spec.seed_map, pull_back)))
    return Instrument(outcomes)


@dataclass
class FeedForwardRealization:
    """Minimal dilation of the reduced instrument plus the conditional channels."""

    dilation: InstrumentDilation
    conditional_channels: list[CPMap]


def feedforward_realization(spec: FrameOrbitSpec, tol: float = DEFAULT_TOL) -> FeedForwardRealization:
    reduced = reduced_instrument(spec, max(tol, 1e-9))
    return FeedForwardRealization(minimal_dilation(reduced, tol), list(spec.conditional_channels))


def verify_feedforward(spec: FrameOrbitSpec, real: FeedForwardRealization,
                       tol: float = 1e-9) -> VerificationReport:
    """Check ``mu_i S_i(rho) = B_i(Tr_A[V rho V^dag (1 (x) Q_i)])`` on a basis."""
    report = VerificationReport()
    dil = real.dilation
    v, r, d_out = dil.v, dil.ancilla_dim, spec.d_out
    report.add("isometry", la.frob(v.conj().T @ v - np.eye(spec.d_in)), tol)
    report.add("povm-completeness", la.frob(sum(dil.q) - np.eye(r)), tol)
    instr = build_instrument(spec, max(tol, 1e-9))
    units = la.matrix_units(spec.d_in)
    images = [v @ e @ v.conj().T for e in units]
    for o, q, b in zip(instr.outcomes, dil.q, real.conditional_channels):
        worst = 0.0
        for e, img in zip(units, images):
            red = la.partial_trace(img @ la.kron(np.eye(d_out), q), [d_out, r], keep=[0])
            worst = max(worst, la.frob(b.apply(red) - o.weight * o.density.apply(e)))
        report.add(f"outcome[{o.label}]-reconstruction", worst, tol)
    return report


# ---------------------------------------------------------------------------
# Generalized teleportation schemes for (left-)tight frames


@dataclass
class TeleportationScheme:
    """Shared resource + joint POVM densities + conditional channels.

    ``joint_povm[i]`` is the POVM density of outcome ``i``; the actual effect
    is ``weights[i] * joint_povm[i]`` and these sum to the identity on the
    support of Alice's marginal.  ``ordering`` documents the tensor factor
    convention of ``resource_state (x) input``.
    """

    kind: str  # "minimal" | "nonminimal"
    resource_state: np.ndarray
    joint_povm: list[np.ndarray]
    conditional_channels: list[CPMap]
    weights: list[float]
    d_bob: int
    d_alice: int
    d_in: int
    ordering: str = "bob,alice,input"
    support_warnings: list[int] = field(default_factory=list)

    def reconstruct_density(self, index: int, rho) -> np.ndarray:
        """Apply the scheme for one announced outcome to an input operator."""
        rho = la.as_matrix(rho)
        joint = la.kron(self.resource_state, rho) @ la.kron(
            np.eye(self.d_bob), self.joint_povm[index]
        )
        red = la.partial_trace(joint, [self.d_bob, self.d_alice, self.d_in], keep=[0])
        return self.conditional_channels[index].apply(red)

    def reconstruct_density_choi(self, index: int) -> np.ndarray:
        """Choi operator of the map realized for one announced outcome."""
        d_in, d_bob = self.d_in, self.d_bob
        acc = np.zeros((d_bob * d_in, d_bob * d_in), dtype=complex)
        for a in range(d_in):
            for b in range(d_in):
                e = np.zeros((d_in, d_in), dtype=complex)
                e[a, b] = 1.0
                img = self.reconstruct_density(index, e)
                acc[a::d_in, b::d_in] += img
        return acc

    def reconstruct_total_choi(self) -> np.ndarray:
        """Choi operator of the weighted sum over outcomes (the total channel)."""
        return sum(
            mu * self.reconstruct_density_choi(i) for i, mu in enumerate(self.weights)
        )


def tele_minimal(spec: FrameOrbitSpec, tol: float = DEFAULT_TOL) -> TeleportationScheme:
    """Teleportation scheme with a pure resource, for left-tight frames.

    Resource: ``|s>><<s|`` with ``s`` the PSD root of ``sigma = S0(K^T)``.
    POVM densities: ``zeta_i = (sigma^(-1/2)T (x) A_i) S0_choi^T (.)^dag``.
    """
    spec.require_normalized(max(tol, 1e-9))
    tight = classify_tightness(spec.frame, max(tol, 1e-9))
    if not tight.is_left_tight:
        raise NotLeftTightError("the frame operator is not of the form 1 (x) K")
    k_op = tight.k_operator
    sigma = spec.seed_map.apply(k_op.T)
    sigma = (sigma + sigma.conj().T) / 2
    root = la.herm_sqrt(sigma, tol)
    resource = np.outer(la.vectorize(root), la.vectorize(root).conj())
    pinv_root_t = la.herm_pinv_sqrt(sigma, tol).T
    s0_t = spec.seed_map.choi.T
    zetas = []
    for _, a in spec.frame.members:
        m = la.kron(pinv_root_t, a)
        zetas.append(m @ s0_t @ m.conj().T)
    return TeleportationScheme(
        kind="minimal",
        resource_state=resource,
        joint_povm=zetas,
        conditional_channels=list(spec.conditional_channels),
        weights=list(spec.frame.weights),
        d_bob=spec.d_out,
        d_alice=spec.d_out,
        d_in=spec.d_in,
    )


def tele_nonminimal(spec: FrameOrbitSpec, tol: float = DEFAULT_TOL) -> TeleportationScheme:
    """Teleportation scheme with rank-one POVM effects, for left-tight frames.

    Resource: ``(S0 (x) I)(|K^T 1/2>><<K^T 1/2|)`` (generally mixed).
    POVM densities: rank-one ``|K^(-1/2) A_i^T>><<K^(-1/2) A_i^T|``.
    Outcomes whose ``A_i^T`` leaks outside the support of ``K`` are recorded
    in ``support_warnings`` (the pseudo-inverse drops that part).
    """
    spec.require_normalized(max(tol, 1e-9))
    tight = classify_tightness(spec.frame, max(tol, 1e-9))
    if not tight.is_left_tight:
        raise NotLeftTightError("the frame operator is not of the form 1 (x) K")
    k_op = tight.k_operator
    d_in = spec.d_in
    root_kt = la.herm_sqrt(k_op.T, tol)
    seed_vec = np.outer(la.vectorize(root_kt), la.vectorize(root_kt).conj())
    resource = np.zeros((spec.d_out * d_in, spec.d_out * d_in), dtype=complex)
    for k in spec.seed_map.kraus:
        m = la.kron(k, np.eye(d_in))
        resource += m @ seed_vec @ m.conj().T
    pinv_root = la.herm_pinv_sqrt(k_op, tol)
    proj_k = la.support_projector(k_op, tol)
    warnings = []
    zetas = []
    for i, (_, a) in enumerate(spec.frame.members):
        at = a.T
        if la.frob(at - proj_k @ at) > max(tol, 1e-9) * max(1.0, la.frob(at)):
            warnings.append(i)
        vec = la.vectorize(pinv_root @ at)
        zetas.append(np.outer(vec, vec.conj()))
    return TeleportationScheme(
        kind="nonminimal",
        resource_state=resource,
        joint_povm=zetas,
        conditional_channels=list(spec.conditional_channels),
        weights=list(spec.frame.weights),
        d_bob=spec.d_out,
        d_alice=d_in,
        d_in=d_in,
        support_warnings=warnings,
    )


def verify_teleportation(spec: FrameOrbitSpec, scheme: TeleportationScheme,
                         tol: float = 1e-9) -> VerificationReport:
    """Check resource-state validity, POVM completeness, and per-outcome
    reconstruction of the instrument densities on a matrix-unit basis."""
    report = VerificationReport()
    res = scheme.resource_state
    report.add("resource-trace", abs(np.trace(res).real - 1.0), tol)
    wmin = float(np.linalg.eigvalsh((res + res.conj().T) / 2).min())
    report.add("resource-psd", max(0.0, -wmin), tol)
    total = sum(mu * z for mu, z in zip(scheme.weights, scheme.joint_povm))
    alice_marginal = la.partial_trace(res, [scheme.d_bob, scheme.d_alice], keep=[1])
    proj = la.support_projector(alice_marginal, DEFAULT_TOL)
    expected = la.kron(proj, np.eye(scheme.d_in))
    report.add("povm-completeness-on-support", la.frob(total - expected), tol)
    instr = build_instrument(spec, max(tol, 1e-9))
    units = la.matrix_units(spec.d_in)
    for i, o in enumerate(instr.outcomes):
        worst = 0.0
        for e in units:
            worst = max(worst, la.frob(scheme.reconstruct_density(i, e) - o.density.apply(e)))
        report.add(f"outcome[{o.label}]-reconstruction", worst, tol)
    return report


def cross_check_schemes(spec: FrameOrbitSpec, minimal: TeleportationScheme,
                        nonminimal: TeleportationScheme, tol: float = 1e-9) -> VerificationReport:
    """Mutual consistency: both schemes realize identical per-outcome densities."""
    report = VerificationReport()
    units = la.matrix_units(spec.d_in)
    for i in range(len(spec.frame)):
        worst = 0.0
        for e in units:
            worst = max(
                worst,
                la.frob(minimal.reconstruct_density(i, e) - nonminimal.reconstruct_density(i, e)),
            )
        report.add(f"outcome[{i}]-cross-check", worst, tol)
    return report


# ---------------------------------------------------------------------------
# Covariant channels as tele-channels


@dataclass
class CovariantChannelSchemes:
    minimal: TeleportationScheme
    nonminimal: TeleportationScheme
    spec: FrameOrbitSpec


def covariant_channel_schemes(channel: CPMap, frame: OperatorFrame,
                              conditional_channels, tol: float = 1e-9) -> CovariantChannelSchemes:
    """Both teleportation realizations of a channel covariant w.r.t. a tight
    unitary frame (``C . A_i(.)A_i^dag = B_i . C`` for every member).

    Internally the frame weights are divided by ``d_in`` so every outcome
    density equals the channel itself; the scheme operators are invariant
    under that bookkeeping change.
    """
    if isinstance(conditional_channels, CPMap):
        conditional_channels = [conditional_channels] * len(frame)
    conditional_channels = list(conditional_channels)
    if len(conditional_channels) != len(frame):
        raise ValueError("need one conditional channel per frame member")
    tight = classify_tightness(frame, tol)
    if not tight.is_tight:
        raise NotTightError("the frame operator is not the identity")
    d_in = frame.d
    for (_, a), b in zip(frame.members, conditional_channels):
        if la.frob(a @ a.conj().T - np.eye(d_in)) > tol * d_in:
            raise NotTightError("covariant schemes require a unitary frame")
        m = la.kron(np.eye(channel.d_out), a.T)
        lhs = m @ channel.choi @ m.conj().T
        rhs = sum(
            la.kron(k, np.eye(d_in)) @ channel.choi @ la.kron(k, np.eye(d_in)).conj().T
            for k in b.kraus
        )
        res = la.frob(lhs - rhs)
        if res > tol * max(1.0, la.frob(channel.choi)):
            raise NotCovariantError(
                f"channel is not covariant for this frame member (residual {res:.3e})"
            )
    spec = FrameOrbitSpec(frame.rescaled(1.0 / d_in), conditional_channels, channel)
    return CovariantChannelSchemes(
        minimal=tele_minimal(spec),
        nonminimal=tele_nonminimal(spec),
        spec=spec,
    )


# ---------------------------------------------------------------------------


def symmetric_projector(d: int, m: int) -> np.ndarray:
    """Projector onto the totally symmetric subspace of ``(C^d)^(x m)``.

    Average of all permutation operators; rank ``binom(m + d - 1, d - 1)``.
    """
    if d < 2 or m < 1 or m > 4:
        raise ValueError("supported range: d >= 2 and 1 <= m <= 4")
    if d ** m > 4096:
        raise ValueError("tensor power too large for dense construction")
    dim = d ** m
    proj = np.zeros((dim, dim), dtype=complex)
    strides = [d ** (m - 1 - k) for k in range(m)]
    for perm in permutations(range(m)):
        p = np.zeros((dim, dim), dtype=complex)
        for idx in range(dim):
            digits = [(idx // strides[k]) % d for k in range(m)]
            out = sum(digits[perm[k]] * strides[k] for k in range(m))
            p[out, idx] = 1.0
        proj += p
    return proj / math.factorial(m)
