"""Generalized Bell states on C^N (x) C^N.

    |B_(m,n)> = N^(-1/2) sum_k gamma^(k*n) conj(|b_k>) (x) |b_(k+m)>

relative to a reference basis {b_k}; m is the shift label and n the phase
label.  Bipartite index (a, b) maps to a*N + b; four-party index
(a, b, e, e') maps to ((a*N + b)*N + e)*N + e'.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .bases import Basis, computational_basis, dual_basis, family_basis
from .errors import DegenerateProjection, InvariantViolation, LabelRangeError
from .galois import FiniteStructure
from .report import Check, residual_check
from .weylgroup import predicted_intertwine_labels, shift, v_matrix


@dataclass(frozen=True, eq=False)
class BellState:
    m: int
    n: int
    vector: np.ndarray = field(repr=False)
    basis: Basis = field(repr=False)
    structure: FiniteStructure = field(repr=False)

    def as_matrix(self) -> np.ndarray:
        """Amplitudes reshaped to [first factor, second factor]."""
        N = self.structure.size
        return self.vector.reshape(N, N)


def _check(s: FiniteStructure, *labels: int):
    for x in labels:
        if not 0 <= x < s.size:
            raise LabelRangeError(f"label {x} outside 0..{s.size - 1}")


def bell_matrix(s: FiniteStructure, m: int, n: int, basis: Basis | None = None) -> np.ndarray:
    B = np.eye(s.size, dtype=complex) if basis is None else basis.matrix
    out = np.zeros((s.size, s.size), dtype=complex)
    for k in s.elements:
        out += s.gamma(s.mul[k, n]) * np.outer(B[:, k].conj(), B[:, s.add[k, m]])
    return out / np.sqrt(s.size)


def bell_state(s: FiniteStructure, basis: Basis | None, m: int, n: int) -> BellState:
    _check(s, m, n)
    basis = computational_basis(s.size, s) if basis is None else basis
    return BellState(m, n, bell_matrix(s, m, n, basis).reshape(-1), basis, s)


def bell_gram_residual(s: FiniteStructure, basis: Basis | None = None) -> float:
    """max |<B_a|B_b> - delta_ab| over all N^2 Bell states."""
    vecs = np.array([bell_matrix(s, m, n, basis).reshape(-1) for m in s.elements for n in s.elements])
    return linalg.max_abs(vecs.conj() @ vecs.T - np.eye(len(vecs)))


def bell_duality_check(s: FiniteStructure, m: int, n: int, tol: float | None = None) -> bool:
    """Dual-basis Bell (m, n) equals computational Bell (-n, m) up to a phase."""
    tol = linalg.default_tol() if tol is None else tol
    return duality_residual(s, m, n) < tol


def duality_residual(s: FiniteStructure, m: int, n: int, dual: Basis | None = None) -> float:
    _check(s, m, n)
    dual = dual_basis(s) if dual is None else dual
    lhs = bell_matrix(s, m, n, dual).reshape(-1)
    rhs = bell_matrix(s, s.neg_table[n], m).reshape(-1)
    return linalg.phase_distance(lhs, rhs)


def label_shift_operator(s: FiniteStructure, basis: Basis, i: int) -> np.ndarray:
    """Operator sending b_k to b_(k+i) for the reference basis."""
    B = basis.matrix
    return B @ shift(s, i).matrix @ B.conj().T


def permutation_invariance_check(
    s: FiniteStructure, i: int, m: int, n: int, basis: Basis | None = None, tol: float | None = None
) -> complex:
    """Eigen-phase of a Bell state under the label shift by i on both factors.

    The shift acts conjugated on the first factor and directly on the second;
    the phase must be gamma^((-i)*n).
    """
    tol = linalg.default_tol() if tol is None else tol
    _check(s, i, m, n)
    basis = computational_basis(s.size, s) if basis is None else basis
    T = label_shift_operator(s, basis, i)
    psi = bell_matrix(s, m, n, basis).reshape(-1)
    moved = np.kron(T.conj(), T) @ psi
    phase = np.vdot(psi, moved)
    if linalg.max_abs(moved - phase * psi) >= tol:
        raise InvariantViolation(f"Bell state {(m, n)} is not invariant under the shift by {i}")
    expected = s.gamma(s.mul[s.neg_table[i], n])
    if abs(phase - expected) >= tol:
        raise InvariantViolation(f"eigen-phase {phase:.6f} differs from gamma^(-i*n) = {expected:.6f}")
    return complex(phase)


def error_channel(s: FiniteStructure, m: int, n: int, k_measured: int, tol: float | None = None) -> np.ndarray:
    """Bob's state after Alice finds conj(|k>) on her half of Bell (m, n).

    The result is proportional to V^n_m |k>: the shift label of the Bell
    state becomes the shift power of the error and the phase label its
    clock power.
    """
    tol = linalg.default_tol() if tol is None else tol
    _check(s, m, n, k_measured)
    psi = bell_matrix(s, m, n)
    bob = psi[k_measured]  # <k*|_A projects onto row k
    norm = np.linalg.norm(bob)
    if norm < tol:
        raise DegenerateProjection(f"outcome {k_measured} has zero probability")
    bob = bob / norm
    expected = v_matrix(s, n, m)[:, k_measured]
    if linalg.phase_distance(bob, expected) >= tol:
        raise InvariantViolation(f"collapsed state differs from V^{n}_{m}|{k_measured}>")
    return bob


def apply_local(op_a, op_b, state: np.ndarray) -> np.ndarray:
    return np.kron(op_a, op_b) @ state


def repairing_vectors(s: FiniteStructure, m: int, n: int, i: int, j: int) -> tuple[np.ndarray, np.ndarray]:
    """The two four-party vectors compared by :func:`repairing_overlap`.

    first:  B_(m, n) on (A, B)  (x)  B_(m, -n) on (E, E')
    second: B_(i, -j) on (A, E) (x)  B_(i, j) on (B, E')

    The second is built in (A, E, B, E') order and then re-indexed into
    (A, B, E, E').
    """
    neg = s.neg_table
    ab = bell_matrix(s, m, n)
    ee = bell_matrix(s, m, neg[n])
    ae = bell_matrix(s, i, neg[j])
    be = bell_matrix(s, i, j)
    first = np.multiply.outer(ab, ee)  # axes a, b, e, e'
    second = np.multiply.outer(ae, be).transpose(0, 2, 1, 3)  # a, e, b, e' -> a, b, e, e'
    return first.reshape(-1), second.reshape(-1)


def repairing_formula(s: FiniteStructure, m: int, n: int, i: int, j: int) -> complex:
    return s.gamma(s.mul[i, n]) * s.gamma(s.mul[m, j]) / s.size


def repairing_overlap(s: FiniteStructure, m: int, n: int, i: int, j: int, tol: float | None = None) -> complex:
    """Overlap between the (AB)(EE') and (AE)(BE') Bell products.

    Equals (1/N) gamma^(i*n) gamma^(m*j).
    """
    tol = linalg.default_tol() if tol is None else tol
    _check(s, m, n, i, j)
    first, second = repairing_vectors(s, m, n, i, j)
    value = complex(np.vdot(first, second))
    if abs(value - repairing_formula(s, m, n, i, j)) >= tol:
        raise InvariantViolation(f"re-pairing overlap {value:.6f} off the formula at {(m, n, i, j)}")
    return value


def _label_tuples(s: FiniteStructure, count: int, sample: int | None, rng):
    if sample is None:
        return list(itertools.product(s.elements, repeat=count))
    return [tuple(int(x) for x in rng.integers(0, s.size, count)) for _ in range(sample)]


def verification_suite(
    s: FiniteStructure, tol: float | None = None, seed: int = 0x5EED, sample: int | None = None
) -> list[Check]:
    """Duality, invariance, orthonormality, re-pairing and intertwining.

    ``sample`` limits the label sweeps to that many random tuples.
    """
    tol = linalg.default_tol() if tol is None else tol
    rng = np.random.default_rng(seed)
    dual = dual_basis(s)
    duality = max(duality_residual(s, m, n, dual) for m, n in _label_tuples(s, 2, sample, rng))

    invariance = 0.0
    for basis in (computational_basis(s.size, s), dual):
        for i, m, n in _label_tuples(s, 3, sample, rng):
            T = label_shift_operator(s, basis, i)
            psi = bell_matrix(s, m, n, basis).reshape(-1)
            expected = s.gamma(s.mul[s.neg_table[i], n])
            invariance = max(invariance, linalg.max_abs(np.kron(T.conj(), T) @ psi - expected * psi))

    repair = 0.0
    for m, n, i, j in _label_tuples(s, 4, sample, rng):
        first, second = repairing_vectors(s, m, n, i, j)
        repair = max(repair, abs(np.vdot(first, second) - repairing_formula(s, m, n, i, j)))

    channel = 0.0
    for m, n, k in _label_tuples(s, 3, sample, rng):
        bob = bell_matrix(s, m, n)[k]
        channel = max(channel, linalg.phase_distance(bob / np.linalg.norm(bob), v_matrix(s, n, m)[:, k]))

    return [
        residual_check("Bell basis orthonormal", bell_gram_residual(s), tol),
        residual_check("Bell basis orthonormal (dual reference)", bell_gram_residual(s, dual), tol),
        residual_check("Bell duality", duality, tol),
        residual_check("permutation invariance phase", invariance, tol),
        residual_check("error channel", channel, tol),
        residual_check("re-pairing overlap", repair, tol),
        residual_check("Bell intertwining under W^k", intertwining_residual(s, sample, rng), tol),
    ]


def intertwining_residual(s: FiniteStructure, sample: int | None = None, rng=None) -> float:
    """Errors on Bob's half, seen through W^k, act as the relabelled V.

    (1 (x) W^dagger V^m_n W) |B_00> must equal, up to phase,
    (1 (x) V^n_((k-1)n - m)) |B_00>.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    phi = bell_matrix(s, 0, 0).reshape(-1)
    eye = np.eye(s.size)
    worst = 0.0
    for k in range(1, s.size + 1):
        W = family_basis(s, k).matrix
        for m, n in _label_tuples(s, 2, sample, rng):
            lhs = apply_local(eye, W.conj().T @ v_matrix(s, m, n) @ W, phi)
            rhs = apply_local(eye, v_matrix(s, *predicted_intertwine_labels(s, k, m, n)), phi)
            worst = max(worst, linalg.phase_distance(lhs, rhs))
    return worst
