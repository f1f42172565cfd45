"""Named covariant-channel constructions: ideal teleportation, symmetric
cloning, and the universal NOT, together with the finite unitary 2-design
and the Haar-grid oracle used to validate the qubit averages."""

from __future__ import annotations

import math

import numpy as np

from . import linalg as la
from .cpmap import CPMap
from .frameorbit import (
    CovariantChannelSchemes,
    FrameOrbitSpec,
    covariant_channel_schemes,
    symmetric_projector,
)
from .frames import OperatorFrame, weyl_heisenberg_frame


def ideal_teleportation_schemes(d: int) -> CovariantChannelSchemes:
    """Teleportation of the identity channel over the clock-and-shift frame."""
    frame = weyl_heisenberg_frame(d)
    channel = CPMap.identity(d)
    conditionals = [CPMap.from_unitary(a) for _, a in frame.members]
    return covariant_channel_schemes(channel, frame, conditionals)


def symmetric_subspace_dim(d: int, m: int) -> int:
    return math.comb(m + d - 1, d - 1)


def cloning_channel(d: int, n_copies: int, m_copies: int) -> CPMap:
    """Optimal symmetric cloning channel from n to m copies.

    The input space is the symmetric subspace of ``n`` tensor factors
    (compressed to its dimension via an isometric embedding); the output
    lives in the full ``m``-factor space, supported on its symmetric
    subspace.
    """
    if not 1 <= n_copies <= m_copies:
        raise ValueError("need 1 <= n_copies <= m_copies")
    p_m = symmetric_projector(d, m_copies)
    d_n = symmetric_subspace_dim(d, n_copies)
    d_m = symmetric_subspace_dim(d, m_copies)
    if n_copies == 1:
        # one input copy: the symmetric subspace is the whole space, and the
        # identity embedding keeps the channel covariant for frames acting
        # directly on the input
        embed = np.eye(d, dtype=complex)
    else:
        embed = la.support_basis(symmetric_projector(d, n_copies))
    scale = np.sqrt(d_n / d_m)
    pad = d ** (m_copies - n_copies)
    # Kraus operators: scale * P_m (J rho J^dag (x) 1) P_m  expanded over the
    # computational basis of the padding factor.
    kraus = []
    for j in range(pad):
        inj = np.zeros((pad, 1), dtype=complex)
        inj[j, 0] = 1.0
        kraus.append(scale * p_m @ la.kron(embed, inj))
    return CPMap(d_n, d ** m_copies, kraus=kraus)


def cloning_conditionals(d: int, m_copies: int, frame: OperatorFrame) -> list[CPMap]:
    """Conditional channels ``U^(x m) . U^(x m)dag`` matching each frame member."""
    out = []
    for _, u in frame.members:
        um = u
        for _ in range(m_copies - 1):
            um = la.kron(um, u)
        out.append(CPMap.from_unitary(um))
    return out


def telecloning_schemes(d: int, m_copies: int) -> CovariantChannelSchemes:
    """Teleportation realizations of 1 -> m symmetric cloning.

    Restricted to one input copy: the tight clock-and-shift frame acts
    directly on the input space, and the receiver applies ``U^(x m)``.
    """
    channel = cloning_channel(d, 1, m_copies)
    frame = weyl_heisenberg_frame(d)
    conditionals = cloning_conditionals(d, m_copies, frame)
    return covariant_channel_schemes(channel, frame, conditionals)


def single_clone_state(channel: CPMap, rho, d: int, m_copies: int, clone: int = 0) -> np.ndarray:
    """Reduced state of one output clone."""
    out = channel.apply(rho)
    return la.partial_trace(out, [d] * m_copies, keep=[clone])


def single_clone_fidelity(channel: CPMap, psi, d: int, m_copies: int, clone: int = 0) -> float:
    """Overlap of one clone with the pure input state ``psi``."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    rho = np.outer(psi, psi.conj())
    red = single_clone_state(channel, rho, d, m_copies, clone)
    return float(np.real(psi.conj() @ red @ psi))


# ---------------------------------------------------------------------------
# Qubit 2-design and the universal NOT


def qubit_clifford_group() -> list[np.ndarray]:
    """The 24 single-qubit Clifford unitaries, modulo global phase.

    Generated as the closure of the Hadamard and phase gates; this set is a
    unitary 3-design, hence in particular the 2-design used for the
    qubit averages in this module.
    """
    h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    s = np.diag([1.0, 1j])

    def canonical(u: np.ndarray) -> tuple[np.ndarray, tuple]:
        flat = u.reshape(-1)
        k = int(np.argmax(np.abs(flat) > 0.3))
        fixed = u / (flat[k] / abs(flat[k]))
        return fixed, tuple(np.round(fixed.reshape(-1), 9).tolist())

    found: dict[tuple, np.ndarray] = {}
    frontier = [np.eye(2, dtype=complex)]
    while frontier:
        fresh = []
        for u in frontier:
            fixed, key = canonical(u)
            if key not in found:
                found[key] = fixed
                fresh += [fixed @ h, fixed @ s]
        frontier = fresh
    group = list(found.values())
    if len(group) != 24:
        raise AssertionError(f"Clifford closure produced {len(group)} elements")
    return group


def unot_spec(unitaries=None, weights=None) -> FrameOrbitSpec:
    """Measure-and-reprepare universal NOT as a frame-orbit specification.

    The frame is a uniform unitary 2-design (default: the Clifford group)
    with probability weights, so the frame operator is ``1 (x) 1/2``; the
    seed maps ``rho -> 2 <0|rho|0> |1><1|`` and the receiver applies the
    announced unitary.
    """
    if unitaries is None:
        unitaries = qubit_clifford_group()
    if weights is None:
        weights = [1.0 / len(unitaries)] * len(unitaries)
    frame = OperatorFrame(list(zip(weights, unitaries)))
    seed = CPMap(2, 2, kraus=[np.sqrt(2.0) * np.array([[0, 0], [1, 0]], dtype=complex)])
    conditionals = [CPMap.from_unitary(u) for u in unitaries]
    return FrameOrbitSpec(frame, conditionals, seed)


def measure_reprepare_channel(unitaries, weights) -> CPMap:
    """Channel ``rho -> sum_j w_j 2 Tr[rho U_j|0><0|U_j^dag] U_j|1><1|U_j^dag``."""
    choi = np.zeros((4, 4), dtype=complex)
    for u, w in zip(unitaries, weights):
        effect = 2.0 * np.outer(u[:, 0], u[:, 0].conj())
        prepared = np.outer(u[:, 1], u[:, 1].conj())
        choi += w * la.kron(prepared, effect.T)
    return CPMap(2, 2, choi=choi)


def unot_channel() -> CPMap:
    """Universal NOT evaluated exactly through the Clifford 2-design."""
    group = qubit_clifford_group()
    return measure_reprepare_channel(group, [1.0 / len(group)] * len(group))


def su2_euler(alpha: float, beta: float, gamma: float) -> np.ndarray:
    ca, sa = np.exp(-0.5j * alpha), np.exp(0.5j * alpha)
    cg, sg = np.exp(-0.5j * gamma), np.exp(0.5j * gamma)
    cb, sb = np.cos(beta / 2), np.sin(beta / 2)
    return np.array(
        [[ca * cb * cg, -ca * sb * sg], [sa * sb * cg, sa * cb * sg]], dtype=complex
    )


def su2_grid(n_target: int, rng) -> tuple[list[np.ndarray], list[float]]:
    """Randomly shifted Euler-angle product grid of about ``n_target`` points.

    Equispaced nodes (with a random phase offset) in the two azimuthal angles
    cancel every low-order harmonic exactly, and Gauss-Legendre nodes handle
    the polar factor, so the grid average of any low-degree polynomial in the
    matrix entries reproduces the invariant average to machine precision.
    """
    rng = np.random.default_rng(rng)
    per_axis = max(6, round(n_target ** (1.0 / 3.0)))
    shift_a, shift_c = rng.uniform(0.0, 2.0 * np.pi, size=2)
    alphas = shift_a + 2.0 * np.pi * np.arange(per_axis) / per_axis
    gammas = shift_c + 2.0 * np.pi * np.arange(per_axis) / per_axis
    nodes, gauss_w = np.polynomial.legendre.leggauss(per_axis)
    betas = np.arccos(nodes)
    unitaries, weights = [], []
    for a in alphas:
        for b, w in zip(betas, gauss_w):
            for c in gammas:
                unitaries.append(su2_euler(a, b, c))
                weights.append(w / (2.0 * per_axis * per_axis))
    return unitaries, weights


def unot_channel_grid(n_target: int = 10_000, rng=0) -> CPMap:
    """Independent oracle for the universal NOT: explicit invariant average
    over a dense randomly-shifted grid on the unitary group."""
    unitaries, weights = su2_grid(n_target, rng)
    return measure_reprepare_channel(unitaries, weights)


def orthogonal_fidelity(channel: CPMap, psi) -> float:
    """``<psi_perp| C(|psi><psi|) |psi_perp>`` for a qubit channel."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.size != 2 or channel.d_in != 2 or channel.d_out != 2:
        raise ValueError("orthogonal fidelity is defined for qubit channels")
    perp = np.array([-np.conj(psi[1]), np.conj(psi[0])], dtype=complex)
    out = channel.apply(np.outer(psi, psi.conj()))
    return float(np.real(perp.conj() @ out @ perp))
