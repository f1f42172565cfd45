"""Finite-group covariant instruments: covariance checks, group averages,
isotypic projectors, the group dilation with eta vectors, and the
finite-group Naimark dilation.

Compact-group integrals are replaced throughout by uniform averages over a
finite group given as an explicit multiplication table.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations as _permutations

import numpy as np

from . import linalg as la
from .cpmap import CPMap
from .errors import (
    NormalizationFailedError,
    ProjectiveUnsupportedError,
    StabilizerInvarianceError,
)
from .instruments import Instrument, Outcome, cjm
from .reports import VerificationReport

DEFAULT_TOL = 1e-10


class FiniteGroup:
    """A finite group given by its multiplication table.

    ``cayley[i, j]`` is the index of the product of elements ``i`` and ``j``.
    Associativity, identity and inverses are checked at construction.
    """

    def __init__(self, cayley):
        cayley = np.asarray(cayley, dtype=int)
        n = cayley.shape[0]
        if cayley.shape != (n, n):
            raise ValueError("multiplication table must be square")
        if cayley.min() < 0 or cayley.max() >= n:
            raise ValueError("table entries must be element indices")
        identity = None
        for e in range(n):
            if all(cayley[e, j] == j and cayley[j, e] == j for j in range(n)):
                identity = e
                break
        if identity is None:
            raise ValueError("no identity element found")
        inverse = np.full(n, -1, dtype=int)
        for a in range(n):
            for b in range(n):
                if cayley[a, b] == identity and cayley[b, a] == identity:
                    inverse[a] = b
                    break
            if inverse[a] < 0:
                raise ValueError(f"element {a} has no inverse")
        # spot-check associativity on the full table (n <= desk scale)
        for a in range(n):
            for b in range(n):
                if not np.array_equal(cayley[cayley[a, b], :], cayley[a, cayley[b, :]]):
                    raise ValueError("multiplication table is not associative")
        self.order = n
        self.cayley = cayley
        self.identity = identity
        self.inverse = inverse

    def mult(self, a: int, b: int) -> int:
        return int(self.cayley[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverse[a])

    def __len__(self) -> int:
        return self.order


def cyclic_group(n: int) -> FiniteGroup:
    idx = np.arange(n)
    return FiniteGroup((idx[:, None] + idx[None, :]) % n)


def symmetric_group(n: int) -> FiniteGroup:
    """S_n on the permutations of range(n) in lexicographic order."""
    elems = list(_permutations(range(n)))
    index = {e: i for i, e in enumerate(elems)}
    size = len(elems)
    cayley = np.zeros((size, size), dtype=int)
    for i, a in enumerate(elems):
        for j, b in enumerate(elems):
            cayley[i, j] = index[tuple(a[b[x]] for x in range(n))]
    return FiniteGroup(cayley)


def symmetric_group_elements(n: int) -> list[tuple[int, ...]]:
    return list(_permutations(range(n)))


def direct_product(a: FiniteGroup, b: FiniteGroup) -> FiniteGroup:
    """Direct product with elements indexed row-major as ``i * |B| + j``."""
    na, nb = a.order, b.order
    cayley = np.zeros((na * nb, na * nb), dtype=int)
    for i1 in range(na):
        for j1 in range(nb):
            for i2 in range(na):
                for j2 in range(nb):
                    cayley[i1 * nb + j1, i2 * nb + j2] = a.mult(i1, i2) * nb + b.mult(j1, j2)
    return FiniteGroup(cayley)


class UnitaryRep:
    """A (possibly projective) unitary representation of a finite group."""

    def __init__(self, group: FiniteGroup, matrices, projective: bool = False,
                 tol: float = DEFAULT_TOL):
        matrices = [la.as_matrix(u) for u in matrices]
        if len(matrices) != group.order:
            raise ValueError("need one matrix per group element")
        d = matrices[0].shape[0]
        for u in matrices:
            if u.shape != (d, d):
                raise ValueError("representation matrices must share one square shape")
            if la.frob(u @ u.conj().T - np.eye(d)) > max(tol, 1e-9) * d:
                raise ValueError("representation matrices must be unitary")
        for g in range(group.order):
            for h in range(group.order):
                prod = matrices[g] @ matrices[h]
                target = matrices[group.mult(g, h)]
                if projective:
                    overlap = abs(np.trace(target.conj().T @ prod))
                    if abs(overlap - d) > max(tol, 1e-9) * d:
                        raise ValueError("matrices do not form a projective representation")
                elif la.frob(prod - target) > max(tol, 1e-9) * d:
                    raise ValueError("matrices do not satisfy the group law")
        self.group = group
        self.matrices = matrices
        self.projective = bool(projective)
        self.dim = d

    def __getitem__(self, g: int) -> np.ndarray:
        return self.matrices[g]

    def require_ordinary(self) -> None:
        if self.projective:
            raise ProjectiveUnsupportedError(
                "character-based operations require an ordinary (non-projective) representation"
            )


def regular_representation(group: FiniteGroup) -> UnitaryRep:
    """Left-regular permutation representation on C^|G|."""
    n = group.order
    mats = []
    for g in range(n):
        m = np.zeros((n, n), dtype=complex)
        for h in range(n):
            m[group.mult(g, h), h] = 1.0
        mats.append(m)
    return UnitaryRep(group, mats)


def permutation_representation(group_elements, n: int, group: FiniteGroup) -> UnitaryRep:
    """Natural permutation matrices for S_n elements given as tuples."""
    mats = []
    for e in group_elements:
        m = np.zeros((n, n), dtype=complex)
        for x in range(n):
            m[e[x], x] = 1.0
        mats.append(m)
    return UnitaryRep(group, mats)


class CharacterTable:
    """Irreducible characters, one value per group element.

    Validated against row orthogonality ``sum_g chi_a^*(g) chi_b(g) = n d_ab``.
    """

    def __init__(self, group: FiniteGroup, irreps, tol: float = 1e-9):
        self.group = group
        entries = []
        for label, dim, values in irreps:
            values = np.asarray(values, dtype=complex).reshape(-1)
            if values.size != group.order:
                raise ValueError("need one character value per group element")
            if abs(values[group.identity] - dim) > tol:
                raise ValueError(f"character of {label!r} at the identity must equal its dimension")
            entries.append((str(label), int(dim), values))
        n = group.order
        for i, (la_, _, va) in enumerate(entries):
            for j, (lb, _, vb) in enumerate(entries):
                s = np.vdot(va, vb)
                target = n if i == j else 0.0
                if abs(s - target) > tol * n:
                    raise ValueError(
                        f"characters {la_!r}/{lb!r} violate row orthogonality (got {s:.3e})"
                    )
        self.irreps = entries

    @property
    def labels(self) -> list[str]:
        return [label for label, _, _ in self.irreps]


def cyclic_characters(n: int) -> CharacterTable:
    group = cyclic_group(n)
    omega = np.exp(2j * np.pi / n)
    irreps = [(f"chi{k}", 1, [omega ** (j * k) for j in range(n)]) for k in range(n)]
    return CharacterTable(group, irreps)


def _cycle_type(perm) -> tuple[int, ...]:
    seen, lengths = set(), []
    for x in range(len(perm)):
        if x in seen:
            continue
        length, y = 0, x
        while y not in seen:
            seen.add(y)
            y = perm[y]
            length += 1
        lengths.append(length)
    return tuple(sorted(lengths, reverse=True))


def s3_characters() -> CharacterTable:
    group = symmetric_group(3)
    elems = symmetric_group_elements(3)
    types = [_cycle_type(e) for e in elems]
    triv = [1.0] * 6
    sign = [1.0 if t in [(1, 1, 1), (3,)] else -1.0 for t in types]
    std = [{(1, 1, 1): 2.0, (2, 1): 0.0, (3,): -1.0}[t] for t in types]
    return CharacterTable(group, [("trivial", 1, triv), ("sign", 1, sign), ("standard", 2, std)])


# ---------------------------------------------------------------------------
# Covariance and covariant instruments


def check_covariance(instr: Instrument, rep_in: UnitaryRep, rep_out: UnitaryRep,
                     action, tol: float = 1e-9) -> VerificationReport:
    """Residuals of the covariance condition per (group element, outcome).

    ``action[g][i]`` is the outcome index that ``g`` sends outcome ``i`` to.
    The check compares, in Choi form, pre-composition with the input
    automorphism against post-composition with the output automorphism of the
    permuted outcome.
    """
    group = rep_in.group
    n = group.order
    action = [list(map(int, row)) for row in action]
    if len(action) != n or any(len(row) != len(instr) for row in action):
        raise ValueError("action must give an outcome permutation per group element")
    blocks, _ = cjm(instr)
    report = VerificationReport()
    worst = 0.0
    eye_out = np.eye(instr.d_out)
    eye_in = np.eye(instr.d_in)
    for g in range(n):
        u = rep_in[g]
        v = rep_out[g]
        pre = la.kron(eye_out, u.T)
        post = la.kron(v, eye_in)
        g_inv = group.inv(g)
        for i in range(len(instr)):
            lhs = pre @ blocks[i] @ pre.conj().T
            rhs = post @ blocks[action[g_inv][i]] @ post.conj().T
            worst = max(worst, la.frob(lhs - rhs))
    report.add("covariance", worst, tol)
    return report


def _coset_partition(group: FiniteGroup, stabilizer: list[int], section: list[int]) -> list[list[int]]:
    stab = sorted(set(int(h) for h in stabilizer))
    if group.identity not in stab:
        raise ValueError("the stabilizer must contain the identity")
    for a in stab:
        for b in stab:
            if group.mult(a, b) not in stab:
                raise ValueError("the stabilizer is not closed under multiplication")
    cosets = []
    covered = set()
    for rep in section:
        coset = sorted(group.mult(int(rep), h) for h in stab)
        if covered & set(coset):
            raise ValueError("coset representatives overlap")
        covered.update(coset)
        cosets.append(coset)
    if len(covered) != group.order:
        raise ValueError("coset representatives do not cover the group")
    return cosets


def build_covariant_instrument(seed_map: CPMap, rep_in: UnitaryRep, rep_out: UnitaryRep,
                               coset_section, stabilizer, tol: float = 1e-9) -> Instrument:
    """Covariant instrument with one outcome per coset of the stabilizer.

    Each outcome carries the uniform weight ``|G_0| / |G|`` and the density
    obtained by conjugating the seed with the section representative.  The
    seed must commute with ``V_h (x) U_h^*`` for every stabilizer element,
    and the group average of ``xi`` must be the identity.
    """
    group = rep_in.group
    stab = sorted(set(int(h) for h in stabilizer))
    _coset_partition(group, stab, [int(s) for s in coset_section])
    s0 = seed_map.choi
    for h in stab:
        w = la.kron(rep_out[h], rep_in[h].conj())
        res = la.frob(w @ s0 - s0 @ w)
        if res > tol * max(1.0, la.frob(s0)):
            raise StabilizerInvarianceError(
                f"seed map is not stabilizer invariant (element {h}, residual {res:.3e})"
            )
    xi = la.partial_trace(s0, [seed_map.d_out, seed_map.d_in], keep=[1]).T
    avg = np.zeros_like(xi)
    for g in range(group.order):
        avg += rep_in[g] @ xi @ rep_in[g].conj().T
    avg /= group.order
    res = la.frob(avg - np.eye(seed_map.d_in))
    if res > tol * seed_map.d_in:
        raise NormalizationFailedError(
            f"group average of xi is not the identity (residual {res:.3e})"
        )
    weight = len(stab) / group.order
    outcomes = []
    for rep_idx in coset_section:
        kraus = [rep_out[int(rep_idx)] @ k @ rep_in[int(rep_idx)].conj().T for k in seed_map.kraus]
        outcomes.append(Outcome(str(int(rep_idx)), weight, CPMap(seed_map.d_in, seed_map.d_out, kraus=kraus)))
    return Instrument(outcomes)


def coset_action(group: FiniteGroup, stabilizer, coset_section) -> list[list[int]]:
    """Outcome permutations induced by left multiplication on the cosets."""
    stab = sorted(set(int(h) for h in stabilizer))
    section = [int(s) for s in coset_section]
    cosets = _coset_partition(group, stab, section)
    member_of = {}
    for i, coset in enumerate(cosets):
        for g in coset:
            member_of[g] = i
    return [
        [member_of[group.mult(g, section[i])] for i in range(len(section))]
        for g in range(group.order)
    ]


# ---------------------------------------------------------------------------
# Harmonic analysis: averages, isotypic projectors, irrep blocks


def group_average(x, rep: UnitaryRep) -> np.ndarray:
    """Uniform average ``(1/n) sum_g U_g X U_g^dag``."""
    x = la.as_matrix(x)
    if x.shape != (rep.dim, rep.dim):
        raise ValueError("operator dimension does not match the representation")
    acc = np.zeros_like(x)
    for u in rep.matrices:
        acc += u @ x @ u.conj().T
    return acc / rep.group.order


def isotypic_projectors(rep: UnitaryRep, chars: CharacterTable,
                        tol: float = DEFAULT_TOL) -> list[tuple[str, np.ndarray]]:
    """Projectors ``(d_mu / n) sum_g chi_mu^*(g) U_g`` onto the isotypic
    components present in the representation; absent irreps are dropped."""
    rep.require_ordinary()
    n = rep.group.order
    out = []
    for label, dim, values in chars.irreps:
        p = np.zeros((rep.dim, rep.dim), dtype=complex)
        for g in range(n):
            p += np.conj(values[g]) * rep.matrices[g]
        p *= dim / n
        rank = np.trace(p).real
        if rank < 0.5:
            continue
        out.append((label, p))
    return out


@dataclass
class IrrepBlocks:
    """One isotypic component resolved into irrep and multiplicity factors.

    ``embedding`` has orthonormal columns indexed by (irrep index, copy
    index) row-major, so that ``embedding^dag U_g embedding = block_g (x) 1``.
    """

    label: str
    dim: int
    multiplicity: int
    blocks: list[np.ndarray]
    embedding: np.ndarray


def _cluster_indices(values: np.ndarray, size: int) -> list[np.ndarray]:
    """Group sorted eigenvalue indices into clusters of exactly ``size``."""
    order = np.argsort(values)
    groups = [order[k * size:(k + 1) * size] for k in range(len(values) // size)]
    # clusters must be separated more than they spread internally
    for g1, g2 in zip(groups, groups[1:]):
        spread = max(np.ptp(values[g1]), np.ptp(values[g2]))
        gap = values[g2].min() - values[g1].max()
        if gap < 10 * spread + 1e-12:
            raise ArithmeticError("eigenvalue clusters are not separated")
    return groups


def irrep_blocks(rep: UnitaryRep, chars: CharacterTable, seed: int = 0,
                 tol: float = DEFAULT_TOL) -> list[IrrepBlocks]:
    """Concrete irrep matrices for every irrep present in the representation.

    Within each isotypic component the commutant is diagonalized via the
    group average of a random Hermitian operator (seeded); copies are aligned
    by averaged intertwiners.  The basis choice inside multiplicity spaces is
    arbitrary, so callers may only rely on basis-independent quantities.
    """
    rep.require_ordinary()
    rng = np.random.default_rng(seed)
    n = rep.group.order
    dims = {label: dim for label, dim, _ in chars.irreps}
    result = []
    for label, proj in isotypic_projectors(rep, chars, tol):
        d_mu = dims[label]
        rank = int(round(np.trace(proj).real))
        m_mu = rank // d_mu
        w, u = la.eigh_desc(proj)
        comp = u[:, w > 0.5]
        copies = None
        for _ in range(8):
            x = rng.normal(size=(rep.dim, rep.dim)) + 1j * rng.normal(size=(rep.dim, rep.dim))
            x = group_average(x + x.conj().T, rep)
            m = comp.conj().T @ x @ comp
            vals, vecs = np.linalg.eigh((m + m.conj().T) / 2)
            try:
                groups = _cluster_indices(vals, d_mu)
            except ArithmeticError:
                continue
            copies = [comp @ vecs[:, g] for g in groups]
            break
        if copies is None:
            raise ArithmeticError("failed to split a multiplicity space; retry with another seed")
        base = copies[0]
        aligned = [base]
        for k in range(1, m_mu):
            q_k = copies[k] @ copies[k].conj().T
            q_1 = base @ base.conj().T
            t_map = None
            for _ in range(8):
                r = rng.normal(size=(rep.dim, rep.dim)) + 1j * rng.normal(size=(rep.dim, rep.dim))
                t = group_average(q_k @ r @ q_1, rep) * rep.group.order
                tb = t @ base
                norm = np.sqrt(max(np.trace(tb.conj().T @ tb).real, 0.0) / d_mu)
                if norm > 1e-8:
                    t_map = tb / norm
                    break
            if t_map is None:
                raise ArithmeticError("failed to align multiplicity copies")
            aligned.append(t_map)
        blocks = [base.conj().T @ rep.matrices[g] @ base for g in range(n)]
        embedding = np.zeros((rep.dim, d_mu * m_mu), dtype=complex)
        for i in range(d_mu):
            for k in range(m_mu):
                embedding[:, i * m_mu + k] = aligned[k][:, i]
        result.append(IrrepBlocks(label, d_mu, m_mu, blocks, embedding))
    return result


def group_average_block_form(x, rep: UnitaryRep, decomposition: list[IrrepBlocks]) -> np.ndarray:
    """Group average evaluated through the isotypic block structure.

    Independent route to :func:`group_average`: project onto each component,
    trace out the irrep factor, and re-expand against ``1 / d_mu``.
    """
    x = la.as_matrix(x)
    acc = np.zeros_like(x)
    for comp in decomposition:
        e = comp.embedding
        inner = e.conj().T @ x @ e
        mult_part = la.partial_trace(inner, [comp.dim, comp.multiplicity], keep=[1])
        acc += e @ la.kron(np.eye(comp.dim) / comp.dim, mult_part) @ e.conj().T
    return acc


# ---------------------------------------------------------------------------
# Group dilation with eta vectors, and the Naimark dilation


@dataclass
class GroupDilation:
    """Non-minimal covariant dilation data.

    ``v`` maps the input into (Kraus index space) (x) H_out (x) H_tilde; the
    POVM density at ``g`` is the rank-one projector on ``eta[g]``, and the
    actual effect is ``(1/n) |eta_g><eta_g|``.
    """

    v: np.ndarray
    eta: list[np.ndarray]
    kraus_rank: int
    d_out: int
    tilde_dim: int
    verification: VerificationReport


def eta_vectors(decomposition: list[IrrepBlocks], n: int) -> list[np.ndarray]:
    """Vectors ``eta_g = oplus_mu sqrt(d_mu) vec(block_mu(g))``."""
    out = []
    for g in range(n):
        parts = [np.sqrt(comp.dim) * comp.blocks[g].reshape(-1) for comp in decomposition]
        out.append(np.concatenate(parts))
    return out


def nonminimal_group_dilation(seed_map: CPMap, rep_in: UnitaryRep, rep_out: UnitaryRep,
                              chars: CharacterTable, stabilizer=None, seed: int = 0,
                              tol: float = 1e-9) -> GroupDilation:
    """Group-theoretic dilation of the covariant instrument generated by a seed.

    Verifies the resolution of the identity by the eta vectors, the isometry
    property of the dilating map, and the per-element reconstruction of the
    density ``V_g S0 U_g^dag(.)U_g V_g^dag`` on a matrix-unit basis.
    """
    rep_in.require_ordinary()
    group = rep_in.group
    n = group.order
    if stabilizer is None:
        stabilizer = [group.identity]
    s0 = seed_map.choi
    for h in sorted(set(int(x) for x in stabilizer)):
        w = la.kron(rep_out[h], rep_in[h].conj())
        res = la.frob(w @ s0 - s0 @ w)
        if res > tol * max(1.0, la.frob(s0)):
            raise StabilizerInvarianceError(
                f"seed map is not stabilizer invariant (element {h}, residual {res:.3e})"
            )
    xi = la.partial_trace(s0, [seed_map.d_out, seed_map.d_in], keep=[1]).T
    avg = group_average(xi, rep_in)
    if la.frob(avg - np.eye(seed_map.d_in)) > tol * seed_map.d_in:
        raise NormalizationFailedError("group average of xi is not the identity")

    decomposition = irrep_blocks(rep_in, chars, seed=seed)
    etas = eta_vectors(decomposition, n)
    tilde_dim = sum(comp.dim ** 2 for comp in decomposition)
    kraus = seed_map.kraus
    r = len(kraus)
    d_out, d_in = seed_map.d_out, seed_map.d_in
    v = np.zeros((r * d_out * tilde_dim, d_in), dtype=complex)
    for i, k in enumerate(kraus):
        acc = np.zeros((d_out * tilde_dim, d_in), dtype=complex)
        for g in range(n):
            acc += la.kron(k @ rep_in[g].conj().T, etas[g].reshape(-1, 1))
        v[i * d_out * tilde_dim:(i + 1) * d_out * tilde_dim, :] = acc / n

    report = VerificationReport()
    resolution = sum(np.outer(e, e.conj()) for e in etas) / n
    report.add("eta-resolution-of-identity", la.frob(resolution - np.eye(tilde_dim)), tol)
    report.add("isometry", la.frob(v.conj().T @ v - np.eye(d_in)), tol)
    units = la.matrix_units(d_in)
    worst = 0.0
    for g in range(n):
        zeta = np.outer(etas[g], etas[g].conj())
        sandwich = la.kron(np.eye(r * d_out), zeta)
        u_g = rep_in[g]
        v_g = rep_out[g]
        for e in units:
            big = (v @ e @ v.conj().T) @ sandwich
            red = la.partial_trace(big, [r, d_out, tilde_dim], keep=[1])
            rec = v_g @ red @ v_g.conj().T
            exact = v_g @ seed_map.apply(u_g.conj().T @ e @ u_g) @ v_g.conj().T
            worst = max(worst, la.frob(rec - exact))
    report.add("per-element-reconstruction", worst, tol)
    return GroupDilation(v, etas, r, d_out, tilde_dim, report)


@dataclass
class NaimarkDilation:
    """Isometry into C^|G| carrying the diagonal projective measure."""

    y: np.ndarray
    tilde_dim: int
    verification: VerificationReport


def naimark_group(chars: CharacterTable, rep_in: UnitaryRep, seed: int = 0,
                  tol: float = 1e-10) -> NaimarkDilation:
    """Finite-group Naimark dilation of the eta-vector POVM.

    Row ``g`` of the isometry is ``sqrt(d_mu / n) <<block_mu(g)|`` per irrep
    block, so compressing the diagonal projectors ``E_g = |g><g|`` reproduces
    the effects ``(1/n) |eta_g><eta_g|`` exactly.
    """
    rep_in.require_ordinary()
    n = rep_in.group.order
    decomposition = irrep_blocks(rep_in, chars, seed=seed)
    etas = eta_vectors(decomposition, n)
    tilde_dim = sum(comp.dim ** 2 for comp in decomposition)
    y = np.zeros((n, tilde_dim), dtype=complex)
    for g in range(n):
        y[g, :] = etas[g].conj() / np.sqrt(n)
    report = VerificationReport()
    report.add("isometry", la.frob(y.conj().T @ y - np.eye(tilde_dim)), tol)
    worst = 0.0
    for g in range(n):
        compressed = np.outer(y[g, :].conj(), y[g, :])
        effect = np.outer(etas[g], etas[g].conj()) / n
        worst = max(worst, la.frob(compressed - effect))
    report.add("compression-identity", worst, tol)
    return NaimarkDilation(y, tilde_dim, report)
