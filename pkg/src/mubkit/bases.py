"""Orthonormal bases: computational, dual, and the N+1 family.

A :class:`Basis` keeps its states as the *columns* of ``matrix``, so the
matrix itself is the unitary sending the computational basis onto it.

Family members are indexed k = 0..N: k = 0 is the computational basis and,
for k >= 1, state i of basis k has amplitude

    gamma^(-(q*i)) * h_{k-1}(q) / sqrt(N)

on |q>, where h_c(q) is the quadratic half-phase of
:func:`mubkit.galois.half_phase`.  Over a field the N+1 bases are mutually
unbiased; over Z_N with composite N each one is unbiased only with respect
to the computational basis.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import LabelRangeError, ShapeError
from .galois import MOD_N, FiniteStructure, half_phase, verify_axioms
from .report import boolean_check, residual_check


@dataclass(frozen=True, eq=False)
class Basis:
    dim: int
    construction_index: int
    matrix: np.ndarray = field(repr=False)
    structure: FiniteStructure | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.matrix.shape != (self.dim, self.dim):
            raise ShapeError(f"basis matrix must be {self.dim}x{self.dim}, got {self.matrix.shape}")

    def state(self, i: int) -> np.ndarray:
        return self.matrix[:, i]

    @property
    def states(self) -> list[np.ndarray]:
        return [self.matrix[:, i] for i in range(self.dim)]

    def projector(self, i: int) -> np.ndarray:
        v = self.matrix[:, i]
        return np.outer(v, v.conj())

    def orthonormality_residual(self) -> float:
        return linalg.max_abs(self.matrix.conj().T @ self.matrix - np.eye(self.dim))

    def is_orthonormal(self, tol: float | None = None) -> bool:
        tol = linalg.default_tol() if tol is None else tol
        return self.orthonormality_residual() < tol

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "construction_index": self.construction_index,
            "states": [linalg.array_to_json(v) for v in self.states],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Basis":
        states = [linalg.array_from_json(v) for v in data["states"]]
        dim = int(data["dim"])
        if len(states) != dim or any(len(v) != dim for v in states):
            raise ShapeError(f"basis file must hold {dim} states of length {dim}")
        return cls(dim, int(data["construction_index"]), np.column_stack(states))


def normalized(matrix: np.ndarray) -> np.ndarray:
    """Apply the phase gauge (first nonzero amplitude real positive) per column."""
    return np.column_stack([linalg.normalize_phase(matrix[:, i]) for i in range(matrix.shape[1])])


def computational_basis(N: int, structure: FiniteStructure | None = None) -> Basis:
    return Basis(N, 0, np.eye(N, dtype=complex), structure)


def dual_basis(s: FiniteStructure) -> Basis:
    """Character transform of the computational basis: amplitude gamma^(k*j)/sqrt(N)."""
    N = s.size
    chi = s.chi_table[s.mul]
    matrix = np.exp(2j * np.pi * chi / s.char_order) / np.sqrt(N)
    return Basis(N, 1, normalized(matrix), s)


def _check_family_index(s: FiniteStructure, k: int):
    if not 1 <= k <= s.size:
        raise LabelRangeError(f"basis index must lie in 1..{s.size}, got {k}")


def half_phases(s: FiniteStructure, c: int) -> np.ndarray:
    return np.array([half_phase(s, c, q) for q in s.elements])


def phased_computational(s: FiniteStructure, k: int) -> Basis:
    """Computational basis with the half-phase h_{k-1}(q) attached to |q>.

    This is an intermediate step of the family construction, so the phase
    gauge is deliberately not applied.
    """
    _check_family_index(s, k)
    return Basis(s.size, k, np.diag(half_phases(s, k - 1)), s)


def family_basis(s: FiniteStructure, k: int) -> Basis:
    if k == 0:
        return computational_basis(s.size, s)
    _check_family_index(s, k)
    N = s.size
    neg_prod = s.neg_table[s.mul]  # [q, i] -> -(q*i)
    fourier = np.exp(2j * np.pi * s.chi_table[neg_prod] / s.char_order) / np.sqrt(N)
    matrix = half_phases(s, k - 1)[:, None] * fourier
    return Basis(N, k, normalized(matrix), s)


def mub_family(s: FiniteStructure) -> list[Basis]:
    return [family_basis(s, k) for k in range(s.size + 1)]


@dataclass
class UnbiasednessReport:
    pair_deviations: dict[tuple[int, int], float]
    overall_max: float
    is_complete_mub: bool

    def to_json(self) -> dict:
        return {
            "pair_deviations": [[k, l, d] for (k, l), d in sorted(self.pair_deviations.items())],
            "overall_max": self.overall_max,
            "is_complete_mub": self.is_complete_mub,
        }


def pair_deviation(a: Basis, b: Basis) -> float:
    """max_ij | |<a_i|b_j>|^2 - 1/N |."""
    gram = np.abs(a.matrix.conj().T @ b.matrix) ** 2
    return float(np.abs(gram - 1.0 / a.dim).max())


def unbiasedness(bases: list[Basis], tol: float | None = None) -> UnbiasednessReport:
    tol = linalg.default_tol() if tol is None else tol
    dims = {b.dim for b in bases}
    if len(dims) > 1:
        raise ShapeError(f"bases of mixed dimensions: {sorted(dims)}")
    deviations = {
        (x, y): pair_deviation(bases[x], bases[y])
        for x, y in itertools.combinations(range(len(bases)), 2)
    }
    overall = max(deviations.values(), default=0.0)
    N = dims.pop() if dims else 0
    return UnbiasednessReport(deviations, overall, overall < tol and len(bases) == N + 1)


def overlap(bra, ket) -> complex:
    """<bra|ket> for two basis states."""
    return linalg.inner(bra, ket)


def overlap_closed_form(s: FiniteStructure, l: int, j: int, k: int, i: int) -> complex:
    """<e^l_j|e^k_i> from the Gauss-sum expression, Z_N only, k, l >= 1.

        (1/N) sum_p gamma^(p*(j-i)) * exp(i*pi*(k-l)*p*(p+N)/N)

    The result refers to the un-gauged family states; family bases built by
    :func:`family_basis` already have a real positive first amplitude, so the
    two agree.
    """
    if s.kind != MOD_N:
        raise ValueError("the closed form is stated for the modulo-N structure")
    N = s.size
    total = 0j
    for p in range(N):
        # exponent of exp(i*pi*e/N), kept as an exact integer mod 2N
        e = (2 * p * (j - i) + (k - l) * p * (p + N)) % (2 * N)
        total += np.exp(1j * np.pi * e / N)
    return complex(total / N)


def family_to_json(bases: list[Basis], s: FiniteStructure | None = None) -> dict:
    out = {"dim": bases[0].dim}
    if s is not None:
        out["construction"] = s.kind
    out["bases"] = [b.to_json() for b in bases]
    return out


def load_bases(data: dict) -> list[Basis]:
    """Accept a single basis file, a family file or a subgroup report."""
    if "bases" in data:
        return [Basis.from_json(b) for b in data["bases"]]
    if "eigenbases" in data:
        return [Basis.from_json(b) for b in data["eigenbases"]]
    return [Basis.from_json(data)]


def verification_suite(s: FiniteStructure, tol: float | None = None):
    """Orthonormality, shift covariance of the dual basis and unbiasedness."""
    tol = linalg.default_tol() if tol is None else tol
    family = mub_family(s)
    dual = dual_basis(s)
    ortho = max(b.orthonormality_residual() for b in family + [dual])
    covariance = 0.0
    # C|k> = |k+1>
    C = np.zeros((s.size, s.size))
    C[s.add[:, 1], np.arange(s.size)] = 1
    minus_one = int(s.neg_table[1])
    for j in s.elements:
        expected = s.gamma(s.mul[minus_one, j]) * dual.state(j)
        covariance = max(covariance, linalg.max_abs(C @ dual.state(j) - expected))
    vs_computational = max(pair_deviation(family[0], b) for b in family[1:])
    report = unbiasedness(family, tol)
    checks = [
        residual_check("bases orthonormal", ortho, tol),
        residual_check("dual basis is shift covariant", covariance, tol),
        residual_check("family unbiased to computational basis", vs_computational, tol),
    ]
    if verify_axioms(s).is_field:
        checks.append(residual_check("complete set of mutually unbiased bases", report.overall_max, tol))
    else:
        checks.append(boolean_check("composite N: some family pair is biased", report.overall_max > 0.01))
    return checks
