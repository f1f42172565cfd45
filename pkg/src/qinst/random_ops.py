"""Seeded random generators for states, unitaries, CP maps and instruments."""

from __future__ import annotations

import numpy as np

from . import linalg as la
from .cpmap import CPMap
from .frames import OperatorFrame
from .frameorbit import FrameOrbitSpec
from .instruments import Instrument, density_from_cjm


def ginibre(d_out: int, d_in: int, rng) -> np.ndarray:
    rng = np.random.default_rng(rng)
    return rng.normal(size=(d_out, d_in)) + 1j * rng.normal(size=(d_out, d_in))


def random_state_vector(d: int, rng) -> np.ndarray:
    v = ginibre(d, 1, rng).reshape(-1)
    return v / np.linalg.norm(v)


def random_density(d: int, rng) -> np.ndarray:
    g = ginibre(d, d, rng)
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_unitary(d: int, rng) -> np.ndarray:
    q, r = np.linalg.qr(ginibre(d, d, rng))
    phase = np.diag(r).copy()
    phase /= np.abs(phase)
    return q * phase


def random_isometry(d_from: int, d_to: int, rng) -> np.ndarray:
    if d_to < d_from:
        raise ValueError("an isometry needs d_to >= d_from")
    return random_unitary(d_to, rng)[:, :d_from]


def random_cp_map(d_in: int, d_out: int, n_kraus: int, rng, scale: float = 1.0) -> CPMap:
    """Generic CP map; not normalized."""
    rng = np.random.default_rng(rng)
    kraus = [ginibre(d_out, d_in, rng) / np.sqrt(n_kraus * d_out) * scale for _ in range(n_kraus)]
    return CPMap(d_in, d_out, kraus=kraus)


def random_channel(d_in: int, d_out: int, n_kraus: int, rng) -> CPMap:
    """Trace-preserving CP map with the given number of Kraus operators."""
    rng = np.random.default_rng(rng)
    kraus = [ginibre(d_out, d_in, rng) for _ in range(n_kraus)]
    gram = sum(k.conj().T @ k for k in kraus)
    fix = la.herm_pinv_sqrt(gram, 1e-14)
    return CPMap(d_in, d_out, kraus=[k @ fix for k in kraus])


def random_instrument(d_in: int, d_out: int, n_outcomes: int, rng) -> Instrument:
    """Normalized random instrument.

    Draws one random PSD block per outcome, then right-conjugates all blocks
    on the input factor so that the total marginal is exactly the identity.
    """
    rng = np.random.default_rng(rng)
    side = d_out * d_in
    blocks = []
    for _ in range(n_outcomes):
        g = ginibre(side, max(2, side // 2), rng)
        blocks.append(g @ g.conj().T)
    total = sum(blocks)
    marginal = la.partial_trace(total, [d_out, d_in], keep=[1])
    fix = la.kron(np.eye(d_out), la.herm_pinv_sqrt(marginal, 1e-14))
    blocks = [fix @ z @ fix.conj().T for z in blocks]
    return density_from_cjm(blocks, d_in, d_out)


def random_seed_map_for(frame: OperatorFrame, d_out: int, n_kraus: int, rng) -> CPMap:
    """Random seed map normalized against a tight frame (trace-one xi)."""
    rng = np.random.default_rng(rng)
    kraus = [ginibre(d_out, frame.d, rng) for _ in range(n_kraus)]
    xi = sum(k.conj().T @ k for k in kraus)
    kraus = [k / np.sqrt(np.trace(xi).real) for k in kraus]
    return CPMap(frame.d, d_out, kraus=kraus)


def random_frame_orbit_spec(frame: OperatorFrame, d_out: int, rng,
                            n_kraus: int = 2, conditional_kraus: int = 2) -> FrameOrbitSpec:
    """Random normalized specification over a tight frame."""
    rng = np.random.default_rng(rng)
    seed = random_seed_map_for(frame, d_out, n_kraus, rng)
    conditionals = [random_channel(d_out, d_out, conditional_kraus, rng) for _ in frame.members]
    return FrameOrbitSpec(frame, conditionals, seed)
