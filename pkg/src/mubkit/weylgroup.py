"""Shift/clock operators, the N^2 error operators V and their commuting families.

``V^j_i = clock(j) @ shift(i)`` acts as

    V^j_i |k> = gamma^((k+i)*j) |k+i>

with ``+`` and ``*`` taken in the finite structure.  Labels are written
``(j, i)``: clock power first, shift power second.

A commuting family is the set of scalar multiples ``{(a*j, a*i)}`` of one
label.  For each family there is a basis e_k and phased operators
``U_l = phase_l * V^(label_l)`` with

    U_l = sum_k gamma^(k*l) |e_k><e_k|,   U_l1 @ U_l2 = U_(l1+l2).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .bases import Basis, family_basis, normalized
from .errors import (
    DomainError,
    InvariantViolation,
    LabelRangeError,
    NumericalDegeneracy,
)
from .galois import FiniteStructure, half_phase
from .report import Check, boolean_check, residual_check

DEFAULT_SEED = 0x5EED

Label = tuple[int, int]


@dataclass(frozen=True, eq=False)
class ErrorOperator:
    j: int
    i: int
    matrix: np.ndarray = field(repr=False)
    structure: FiniteStructure = field(repr=False)

    @property
    def labels(self) -> Label:
        return (self.j, self.i)


def _check_label(s: FiniteStructure, *labels: int):
    for x in labels:
        if not 0 <= x < s.size:
            raise LabelRangeError(f"label {x} outside 0..{s.size - 1}")


def v_matrix(s: FiniteStructure, j: int, i: int) -> np.ndarray:
    N = s.size
    k = np.arange(N)
    target = s.add[k, i]
    M = np.zeros((N, N), dtype=complex)
    M[target, k] = np.exp(2j * np.pi * s.chi_table[s.mul[target, j]] / s.char_order)
    return M


def v_op(s: FiniteStructure, j: int, i: int) -> ErrorOperator:
    _check_label(s, j, i)
    return ErrorOperator(j, i, v_matrix(s, j, i), s)


def shift(s: FiniteStructure, i: int) -> ErrorOperator:
    """Permutation |k> -> |k+i>."""
    return v_op(s, 0, i)


def clock(s: FiniteStructure, j: int) -> ErrorOperator:
    """Diagonal gamma^(k*j) on |k>."""
    return v_op(s, j, 0)


def compose_labels(s: FiniteStructure, a: Label, b: Label) -> tuple[complex, Label]:
    """Phase and labels with V^a @ V^b == phase * V^(a+b).

    The phase is gamma^-(i_a * j_b).
    """
    (ja, ia), (jb, ib) = a, b
    phase = s.gamma(s.neg_table[s.mul[ia, jb]])
    return phase, (s.plus(ja, jb), s.plus(ia, ib))


def compose(a: ErrorOperator, b: ErrorOperator, tol: float | None = None) -> tuple[complex, Label]:
    if a.structure is not b.structure:
        raise DomainError("operators belong to different structures")
    s = a.structure
    tol = linalg.default_tol() if tol is None else tol
    phase, labels = compose_labels(s, a.labels, b.labels)
    residual = linalg.max_abs(a.matrix @ b.matrix - phase * v_matrix(s, *labels))
    if residual >= tol:
        raise InvariantViolation(f"composition law fails for {a.labels}.{b.labels}: {residual:.2e}")
    return phase, labels


def commute(s: FiniteStructure, a: Label, b: Label) -> bool:
    """V^a and V^b commute iff gamma^(i_a*j_b) == gamma^(i_b*j_a)."""
    (ja, ia), (jb, ib) = a, b
    return s.chi(s.mul[ia, jb]) == s.chi(s.mul[ib, ja])


# ---------------------------------------------------------------------------
# Phased operators
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PhasedOperator:
    basis_index: int
    l: int
    labels: Label
    phase: complex
    matrix: np.ndarray = field(repr=False)


def u_phase(s: FiniteStructure, i: int, l: int) -> complex:
    """Scalar relating U^(i*l)_l to V^((i-1)*l)_l for 1 <= i <= N.

    This is the conjugate of the half-phase h_{i-1}(l), i.e. a square root
    of gamma^-((i-1)*l*l) on the branch used for the family bases.
    """
    return half_phase(s, i - 1, l).conjugate()


def u_labels(s: FiniteStructure, i: int, l: int) -> Label:
    if i == 0:
        return (l, 0)
    return (s.times(i - 1, l), l)


def u_op(s: FiniteStructure, i: int, l: int) -> PhasedOperator:
    """U operator with cycle label l for basis index i (0 <= i <= N).

    Indices above N address the additional families that appear for
    composite N; see :func:`operator_families`.
    """
    _check_label(s, l)
    if i > s.size:
        return operator_families(s)[i].operator(l)
    if i < 0:
        raise LabelRangeError(f"basis index must be >= 0, got {i}")
    labels = u_labels(s, i, l)
    phase = 1 + 0j if i == 0 else u_phase(s, i, l)
    return PhasedOperator(i, l, labels, phase, phase * v_matrix(s, *labels))


@dataclass(frozen=True, eq=False)
class OperatorFamily:
    """N commuting V operators, their phases and their joint eigenbasis."""

    index: int
    labels: tuple[Label, ...]
    phases: tuple[complex, ...]
    basis: Basis = field(repr=False)
    structure: FiniteStructure = field(repr=False)

    def operator(self, l: int) -> PhasedOperator:
        lab, ph = self.labels[l], self.phases[l]
        return PhasedOperator(self.index, l, lab, ph, ph * v_matrix(self.structure, *lab))

    @property
    def label_set(self) -> frozenset[Label]:
        return frozenset(self.labels)


def standard_family(s: FiniteStructure, k: int) -> OperatorFamily:
    labels = tuple(u_labels(s, k, l) for l in s.elements)
    phases = tuple(u_op(s, k, l).phase for l in s.elements)
    return OperatorFamily(k, labels, phases, family_basis(s, k), s)


# ---------------------------------------------------------------------------
# Subgroups
# ---------------------------------------------------------------------------

def scalar_line(s: FiniteStructure, g: Label) -> frozenset[Label]:
    """All multiples (a*j, a*i) of the label g; a cyclic subgroup for Z_N."""
    j, i = g
    return frozenset((int(s.mul[a, j]), int(s.mul[a, i])) for a in s.elements)


@dataclass
class SubgroupDecomposition:
    subgroups: list[tuple[Label, ...]]
    eigenbases: list[Basis] = field(default_factory=list, repr=False)

    @property
    def count(self) -> int:
        return len(self.subgroups)

    def excess(self, N: int) -> int:
        return self.count - (N + 1)

    def to_json(self, include_bases: bool = True) -> dict:
        out = {
            "count": self.count,
            "subgroups": [[list(lab) for lab in g] for g in self.subgroups],
        }
        if include_bases:
            out["eigenbases"] = [b.to_json() for b in self.eigenbases]
        return out


def _sorted_labels(group) -> tuple[Label, ...]:
    return tuple(sorted(group))


@functools.lru_cache(maxsize=64)
def _subgroup_sets(s: FiniteStructure) -> tuple[frozenset[Label], ...]:
    """Standard lines first (clock, then (c, 1) for c = 0..N-1), extras sorted."""
    N = s.size
    standard = [scalar_line(s, (1, 0))] + [scalar_line(s, (c, 1)) for c in s.elements]
    seen = set(standard)
    extras = set()
    for j in s.elements:
        for i in s.elements:
            line = scalar_line(s, (j, i))
            if len(line) == N and line not in seen:
                extras.add(line)
    return tuple(standard) + tuple(sorted(extras, key=_sorted_labels))


def enumerate_subgroups(s: FiniteStructure, seed: int = DEFAULT_SEED, with_bases: bool = True) -> SubgroupDecomposition:
    groups = _subgroup_sets(s)
    bases = [f.basis for f in operator_families(s, seed)] if with_bases else []
    return SubgroupDecomposition([_sorted_labels(g) for g in groups], bases)


# ---------------------------------------------------------------------------
# Joint eigenbases
# ---------------------------------------------------------------------------

def _eigen_signature(v: np.ndarray, operators) -> tuple[float, ...]:
    sig = []
    for A in operators:
        ang = float(np.angle(np.vdot(v, A @ v)))
        if ang < -1e-9:
            ang += 2 * np.pi
        sig.append(round(ang, 6))
    return tuple(sig)


def joint_eigenbasis(
    operators,
    seed: int = DEFAULT_SEED,
    tol: float | None = None,
    max_tries: int = 8,
    index: int = -1,
) -> Basis:
    """Common eigenbasis of pairwise commuting unitaries.

    Diagonalises a random real combination of the Hermitian parts
    ``A + A^dagger`` and ``i(A - A^dagger)``; a draw whose spectrum is
    degenerate is discarded and redrawn.  States are sorted by the phases of
    their eigenvalues under the operators in the given order.
    """
    tol = linalg.default_tol() if tol is None else tol
    mats = [linalg.as_matrix(A) for A in operators]
    N = len(mats[0])
    for a in range(len(mats)):
        for b in range(a + 1, len(mats)):
            if linalg.commutator_norm(mats[a], mats[b]) >= tol:
                raise DomainError("joint_eigenbasis needs pairwise commuting operators")
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        c, d = rng.standard_normal(len(mats)), rng.standard_normal(len(mats))
        H = sum(ck * (A + A.conj().T) + dk * 1j * (A - A.conj().T) for ck, dk, A in zip(c, d, mats))
        values, vectors = linalg.eig_hermitian(H, tol=1e-8)
        if N == 1 or np.min(np.diff(values)) > 1e-6 * max(1.0, np.abs(values).max()):
            break
    else:
        raise NumericalDegeneracy(f"combination stayed degenerate after {max_tries} draws")
    for A in mats:
        D = vectors.conj().T @ A @ vectors
        if linalg.max_abs(D - np.diag(np.diag(D))) >= max(tol, 1e-9):
            raise InvariantViolation("operators are not diagonal in the computed eigenbasis")
    order = sorted(range(N), key=lambda n: _eigen_signature(vectors[:, n], mats))
    return Basis(N, index, normalized(vectors[:, order]))


def _operator_order(s: FiniteStructure, g: Label) -> int:
    x, n = g, 1
    while x != (0, 0):
        x = (s.plus(x[0], g[0]), s.plus(x[1], g[1]))
        n += 1
    return n


def cyclic_family(s: FiniteStructure, group, index: int, seed: int = DEFAULT_SEED, tol: float | None = None) -> OperatorFamily:
    """Family for a cyclic subgroup, phases fixed by U_1^N = identity."""
    tol = linalg.default_tol() if tol is None else tol
    N = s.size
    generators = sorted(g for g in group if _operator_order(s, g) == N)
    if not generators:
        raise DomainError("subgroup is not cyclic of order N")
    g = generators[0]
    Vg = v_matrix(s, *g)
    lam = linalg.proportionality(np.linalg.matrix_power(Vg, N), np.eye(N), tol)
    U1 = np.exp(-1j * np.angle(lam) / N) * Vg
    labels, phases, U = [], [], np.eye(N, dtype=complex)
    for l in range(N):
        lab = _multiple(s, g, l)
        ph = linalg.proportionality(U, v_matrix(s, *lab), tol)
        if ph is None:
            raise InvariantViolation(f"U_1^{l} is not proportional to V{lab}")
        labels.append(lab)
        phases.append(ph)
        U = U @ U1
    basis = joint_eigenbasis([v_matrix(s, *lab) for lab in sorted(group)], seed, tol, index=index)
    # relabel states so that U_1 e_k = gamma^k e_k
    ks = []
    for v in basis.states:
        mu = np.vdot(v, U1 @ v)
        ks.append(int(round(np.angle(mu) * N / (2 * np.pi))) % N)
    if sorted(ks) != list(range(N)):
        raise InvariantViolation("U_1 eigenvalues are not the N distinct N-th roots of unity")
    matrix = basis.matrix[:, np.argsort(ks)]
    return OperatorFamily(index, tuple(labels), tuple(phases), Basis(N, index, matrix, s), s)


def _multiple(s: FiniteStructure, g: Label, l: int) -> Label:
    x = (0, 0)
    for _ in range(l):
        x = (s.plus(x[0], g[0]), s.plus(x[1], g[1]))
    return x


@functools.lru_cache(maxsize=64)
def operator_families(s: FiniteStructure, seed: int = DEFAULT_SEED) -> tuple[OperatorFamily, ...]:
    """One family per subgroup, in the order of :func:`enumerate_subgroups`."""
    groups = _subgroup_sets(s)
    N = s.size
    families = [standard_family(s, k) for k in range(N + 1)]
    for index, group in enumerate(groups[N + 1:], start=N + 1):
        families.append(cyclic_family(s, group, index, seed))
    return tuple(families)


# ---------------------------------------------------------------------------
# Basis change
# ---------------------------------------------------------------------------

def basis_change(s: FiniteStructure, k: int) -> np.ndarray:
    """W^k = sum_i |e^k_i><e^0_i|."""
    return family_basis(s, k).matrix


def predicted_intertwine_labels(s: FiniteStructure, k: int, m: int, n: int) -> Label:
    return (n, s.minus(s.times(k - 1, n), m))


def intertwine_check(s: FiniteStructure, k: int, m: int, n: int, tol: float | None = None) -> tuple[Label, complex]:
    """Identify (W^k)^dagger V^m_n W^k as phase * V^n_((k-1)*n - m)."""
    tol = linalg.default_tol() if tol is None else tol
    _check_label(s, m, n)
    W = basis_change(s, k)
    C = W.conj().T @ v_matrix(s, m, n) @ W
    predicted = predicted_intertwine_labels(s, k, m, n)
    phase = linalg.proportionality(C, v_matrix(s, *predicted), tol)
    if phase is not None:
        return predicted, phase
    for j in s.elements:
        for i in s.elements:
            if linalg.proportionality(C, v_matrix(s, j, i), tol) is not None:
                raise InvariantViolation(f"V{(m, n)} maps to V{(j, i)}, expected V{predicted}")
    raise InvariantViolation(f"conjugated V{(m, n)} is not proportional to any V")


def intertwine_is_bijection(s: FiniteStructure, k: int) -> bool:
    images = {predicted_intertwine_labels(s, k, m, n) for m in s.elements for n in s.elements}
    return len(images) == s.size**2


# ---------------------------------------------------------------------------
# Verification suite
# ---------------------------------------------------------------------------

def verification_suite(s: FiniteStructure, tol: float | None = None, seed: int = DEFAULT_SEED) -> list[Check]:
    tol = linalg.default_tol() if tol is None else tol
    N = s.size
    labels = [(j, i) for j in s.elements for i in s.elements]
    mats = {lab: v_matrix(s, *lab) for lab in labels}

    unitary = max(linalg.max_abs(M.conj().T @ M - np.eye(N)) for M in mats.values())
    compo = 0.0
    for a in labels:
        for b in labels:
            phase, lab = compose_labels(s, a, b)
            compo = max(compo, linalg.max_abs(mats[a] @ mats[b] - phase * mats[lab]))
    weyl = 0.0
    for i in s.elements:
        for j in s.elements:
            lhs = mats[(0, i)] @ mats[(j, 0)]
            rhs = s.gamma(s.neg_table[s.mul[i, j]]) * mats[(j, 0)] @ mats[(0, i)]
            weyl = max(weyl, linalg.max_abs(lhs - rhs))

    families = operator_families(s, seed)
    closure = diag = 0.0
    for fam in families:
        ops = [fam.operator(l).matrix for l in s.elements]
        for l1 in s.elements:
            for l2 in s.elements:
                closure = max(closure, linalg.max_abs(ops[l1] @ ops[l2] - ops[s.plus(l1, l2)]))
        B = fam.basis.matrix
        for l in s.elements:
            target = np.diag([s.gamma(s.mul[k, l]) for k in s.elements])
            diag = max(diag, linalg.max_abs(B.conj().T @ ops[l] @ B - target))

    decomposition = enumerate_subgroups(s, seed, with_bases=False)
    covered = set().union(*map(set, decomposition.subgroups)) == set(labels)
    commuting = all(commute(s, a, b) for g in decomposition.subgroups for a in g for b in g)
    return [
        residual_check("V operators unitary", unitary, tol),
        residual_check("composition law", compo, tol),
        residual_check("Weyl commutation rule", weyl, tol),
        residual_check("U group closure", closure, tol),
        residual_check("U diagonal in family basis", diag, tol),
        boolean_check(f"subgroups cover all labels ({decomposition.count} subgroups)", covered),
        boolean_check("subgroups commute", commuting),
    ]
