import numpy as np
import pytest

from qinst import linalg as la
from qinst.cpmap import CPMap, stinespring_minimal
from qinst.errors import DegenerateStateError, NotNormalizedError
from qinst.instruments import (
    Instrument,
    InstrumentDilation,
    Outcome,
    cjm,
    density_from_cjm,
    minimal_dilation,
    outcome_probabilities,
    povm,
    sample,
    sample_counts,
    verify_dilation,
)
from qinst.frames import pauli_operators
from qinst.random_ops import random_channel, random_density, random_instrument, random_isometry


def projective_qubit() -> Instrument:
    outcomes = []
    for i in range(2):
        proj = np.zeros((2, 2), dtype=complex)
        proj[i, i] = 1.0
        outcomes.append(Outcome(str(i), 1.0, CPMap.from_kraus([proj])))
    return Instrument(outcomes)


def test_cjm_projective_measurement():
    blocks, total = cjm(projective_qubit())
    for i, z in enumerate(blocks):
        proj = np.zeros((2, 2))
        proj[i, i] = 1.0
        assert np.allclose(z, la.kron(proj, proj), atol=1e-12)
    dephasing = np.zeros((4, 4))
    dephasing[0, 0] = dephasing[3, 3] = 1.0
    assert np.allclose(total, dephasing, atol=1e-12)


def test_cjm_single_outcome_channel():
    rng = np.random.default_rng(40)
    ch = random_channel(2, 3, 2, rng)
    instr = Instrument.from_channel(ch)
    blocks, total = cjm(instr)
    assert np.allclose(blocks[0], ch.choi)
    assert np.allclose(total, ch.choi)


def test_cjm_two_half_identities():
    half = CPMap.identity(2)
    instr = Instrument([("a", 0.5, half), ("b", 0.5, half)])
    blocks, _ = cjm(instr)
    v = la.vectorize(np.eye(2))
    for z in blocks:
        assert np.allclose(z, np.outer(v, v.conj()) / 2, atol=1e-12)
    instr.require_normalized()


def test_povm_projective():
    effects = povm(projective_qubit())
    assert np.allclose(effects[0], np.diag([1.0, 0.0]), atol=1e-12)
    assert np.allclose(effects[1], np.diag([0.0, 1.0]), atol=1e-12)


def test_povm_channel_is_identity():
    rng = np.random.default_rng(41)
    instr = Instrument.from_channel(random_channel(3, 2, 2, rng))
    (effect,) = povm(instr)
    assert np.allclose(effect, np.eye(3), atol=1e-9)


def test_povm_pauli_twirl():
    outcomes = [
        Outcome(str(i), 0.25, CPMap.from_kraus([p])) for i, p in enumerate(pauli_operators())
    ]
    effects = povm(Instrument(outcomes))
    for e in effects:
        assert np.allclose(e, np.eye(2) / 4, atol=1e-12)


def test_povm_completeness_random():
    rng = np.random.default_rng(42)
    for _ in range(5):
        instr = random_instrument(3, 2, 4, rng)
        assert np.linalg.norm(sum(povm(instr)) - np.eye(3)) <= 1e-9


def test_density_from_cjm_round_trip():
    instr = projective_qubit()
    blocks, _ = cjm(instr)
    rebuilt = density_from_cjm(blocks, 2, 2, labels=instr.labels)
    assert rebuilt.labels == instr.labels
    for a, b in zip(instr.outcomes, rebuilt.outcomes):
        assert abs(a.weight - b.weight) < 1e-12  # trace of |ii><ii| is 1
        assert np.linalg.norm(a.weight * a.density.choi - b.weight * b.density.choi) <= 1e-12


def test_density_from_cjm_drops_zero_outcome():
    blocks, _ = cjm(projective_qubit())
    rebuilt = density_from_cjm(blocks + [np.zeros((4, 4))], 2, 2)
    assert len(rebuilt) == 2


def test_density_from_cjm_rejects_unnormalized():
    with pytest.raises(NotNormalizedError):
        density_from_cjm([np.eye(4)], 2, 2)


def test_minimal_dilation_projective():
    instr = projective_qubit()
    dil = minimal_dilation(instr)
    assert dil.ancilla_dim == 2
    for q in dil.q:
        w = np.linalg.eigvalsh(q)
        assert np.allclose(sorted(w), [0, 1], atol=1e-10)  # rank-one projectors
    report = verify_dilation(instr, dil, tol=1e-10)
    assert report.passed, report.summary()


def test_minimal_dilation_channel_only():
    rng = np.random.default_rng(43)
    ch = random_channel(2, 3, 2, rng)
    instr = Instrument.from_channel(ch)
    dil = minimal_dilation(instr)
    assert len(dil.q) == 1
    assert np.allclose(dil.q[0], np.eye(dil.ancilla_dim), atol=1e-9)
    stine = stinespring_minimal(ch)
    assert dil.ancilla_dim == stine.ancilla_dim
    # same isometry up to the shared construction
    assert np.linalg.norm(dil.v - stine.v) <= 1e-9


def test_minimal_dilation_random_instruments():
    rng = np.random.default_rng(44)
    for _ in range(5):
        instr = random_instrument(2, 2, 3, rng)
        dil = minimal_dilation(instr)
        _, total = cjm(instr)
        assert dil.ancilla_dim == la.numerical_rank(total)
        report = verify_dilation(instr, dil, tol=1e-9)
        assert report.passed, report.summary()


def test_dilation_marginal_channel():
    rng = np.random.default_rng(45)
    instr = random_instrument(3, 2, 3, rng)
    dil = minimal_dilation(instr)
    _, total = cjm(instr)
    total_map = CPMap.from_choi(total, 3, 2)
    for e in la.matrix_units(3):
        marg = la.partial_trace(dil.v @ e @ dil.v.conj().T, [2, dil.ancilla_dim], keep=[0])
        assert np.linalg.norm(marg - total_map.apply(e)) <= 1e-9


def test_verify_dilation_accepts_embedded_nonminimal():
    rng = np.random.default_rng(46)
    instr = random_instrument(2, 2, 3, rng)
    dil = minimal_dilation(instr)
    big = dil.ancilla_dim + 2
    y = random_isometry(dil.ancilla_dim, big, rng)
    leftover = np.eye(big) - y @ y.conj().T
    q_big = [y @ q @ y.conj().T + leftover / len(dil.q) for q in dil.q]
    v_big = la.kron(np.eye(2), y) @ dil.v
    report = verify_dilation(instr, InstrumentDilation(big, v_big, q_big), tol=1e-9)
    assert report.passed, report.summary()


def test_verify_dilation_flags_perturbation():
    instr = projective_qubit()
    dil = minimal_dilation(instr)
    bad_q = [q.copy() for q in dil.q]
    bad_q[0][0, 0] += 1e-3
    report = verify_dilation(instr, InstrumentDilation(dil.ancilla_dim, dil.v, bad_q))
    assert not report.passed


def test_probability_consistency_three_ways():
    rng = np.random.default_rng(47)
    instr = random_instrument(3, 2, 4, rng)
    rho = random_density(3, rng)
    p_povm = outcome_probabilities(instr, rho)
    p_density = np.array(
        [o.weight * np.trace(o.density.apply(rho)).real for o in instr.outcomes]
    )
    dil = minimal_dilation(instr)
    vrv = dil.v @ rho @ dil.v.conj().T
    p_dil = np.array(
        [np.trace(vrv @ la.kron(np.eye(2), q)).real for q in dil.q]
    )
    assert np.allclose(p_povm, p_density, atol=1e-9)
    assert np.allclose(p_povm, p_dil, atol=1e-9)
    assert abs(p_povm.sum() - 1) < 1e-9


def test_sample_deterministic_outcome():
    instr = projective_qubit()
    label, post = sample(instr, np.diag([1.0, 0.0]), rng=123)
    assert label == "0"
    assert np.allclose(post, np.diag([1.0, 0.0]), atol=1e-12)
    assert abs(np.trace(post) - 1) < 1e-12


def test_sample_counts_balanced():
    instr = projective_qubit()
    counts = sample_counts(instr, np.eye(2) / 2, 100_000, rng=7)
    freq = counts["0"] / 100_000
    assert abs(freq - 0.5) <= 3 * np.sqrt(0.25 / 100_000)


def test_sample_rejects_degenerate():
    proj = CPMap.from_kraus([np.array([[0, 0], [1, 0]], dtype=complex)])
    other = CPMap.from_kraus([np.array([[0, 1], [0, 0]], dtype=complex)])
    instr = Instrument([("down", 1.0, proj), ("up", 1.0, other)])
    with pytest.raises(DegenerateStateError):
        sample(instr, np.zeros((2, 2)), rng=0)


def test_posterior_trace_one():
    rng = np.random.default_rng(48)
    instr = random_instrument(2, 3, 3, rng)
    rho = random_density(2, rng)
    for seed in range(5):
        _, post = sample(instr, rho, rng=seed)
        assert abs(np.trace(post).real - 1) < 1e-9
