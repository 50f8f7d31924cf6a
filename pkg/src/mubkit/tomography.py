"""Linear-inversion tomography through the V / U operator expansion.

Any N x N matrix expands as ``L = (1/N) sum_(j,i) Tr(V^j_i^dagger L) V^j_i``.
Measuring rho in the eigenbasis e_k of a commuting family gives every
coefficient of that family at once,

    Tr(U_l^dagger rho) = sum_k gamma^-(k*l) <e_k|rho|e_k>,

and ``U_l = phase_l * V^(label_l)`` turns it into a V coefficient.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .bases import Basis
from .errors import DomainError, IncompleteData, InconsistentData, ShapeError
from .report import boolean_check, residual_check
from .galois import FiniteStructure
from .weylgroup import DEFAULT_SEED, enumerate_subgroups, operator_families, v_matrix


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def residuals(self) -> dict[str, float]:
        M = self.matrix
        return {
            "hermitian": linalg.max_abs(M - M.conj().T),
            "trace": abs(np.trace(M) - 1),
            "min_eigenvalue": float(np.linalg.eigvalsh((M + M.conj().T) / 2).min()),
        }

    def is_physical(self, tol: float | None = None) -> bool:
        tol = linalg.default_tol() if tol is None else tol
        r = self.residuals()
        return r["hermitian"] < tol and r["trace"] < tol and r["min_eigenvalue"] > -tol

    @classmethod
    def validated(cls, matrix, tol: float | None = None) -> "DensityMatrix":
        """Build and reject anything that is not a density matrix within tol."""
        rho = cls(linalg.as_matrix(matrix))
        if rho.matrix.shape[0] != rho.matrix.shape[1]:
            raise ShapeError("density matrix must be square")
        if not rho.is_physical(tol):
            raise DomainError(f"not a density matrix: {rho.residuals()}")
        return rho

    def to_json(self) -> dict:
        return {"dim": self.dim, "matrix": linalg.array_to_json(self.matrix)}

    @classmethod
    def from_json(cls, data: dict, tol: float | None = None) -> "DensityMatrix":
        matrix = linalg.array_from_json(data["matrix"])
        if matrix.shape != (data["dim"], data["dim"]):
            raise ShapeError(f"matrix shape {matrix.shape} does not match dim {data['dim']}")
        return cls.validated(matrix, tol)

    @classmethod
    def load(cls, path, tol: float | None = None) -> "DensityMatrix":
        with open(path) as fh:
            return cls.from_json(json.load(fh), tol)


def random_density_matrix(N: int, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Ginibre-distributed density matrix (full rank unless ``rank`` is given)."""
    rank = N if rank is None else rank
    G = rng.standard_normal((N, rank)) + 1j * rng.standard_normal((N, rank))
    rho = G @ G.conj().T
    return DensityMatrix(rho / np.trace(rho).real)


def maximally_mixed(N: int) -> DensityMatrix:
    return DensityMatrix(np.eye(N, dtype=complex) / N)


def pure_state(v) -> DensityMatrix:
    v = linalg.as_vector(v)
    v = v / np.linalg.norm(v)
    return DensityMatrix(np.outer(v, v.conj()))


# ---------------------------------------------------------------------------
# Operator expansion
# ---------------------------------------------------------------------------

def expand(L, s: FiniteStructure) -> np.ndarray:
    """Coefficients c[j, i] = Tr(V^j_i^dagger L)."""
    L = linalg.as_matrix(L)
    if L.shape != (s.size, s.size):
        raise ShapeError(f"expected a {s.size}x{s.size} matrix, got {L.shape}")
    c = np.zeros((s.size, s.size), dtype=complex)
    for j in s.elements:
        for i in s.elements:
            # Tr(V^dagger L) = sum of conj(V) * L entrywise
            c[j, i] = np.sum(v_matrix(s, j, i).conj() * L)
    return c


def synthesize(c: np.ndarray, s: FiniteStructure) -> np.ndarray:
    """(1/N) sum c[j, i] V^j_i, the inverse of :func:`expand`."""
    out = np.zeros((s.size, s.size), dtype=complex)
    for j in s.elements:
        for i in s.elements:
            if c[j, i] != 0:
                out += c[j, i] * v_matrix(s, j, i)
    return out / s.size


# ---------------------------------------------------------------------------
# Measurement and reconstruction
# ---------------------------------------------------------------------------

@dataclass
class MeasurementTable:
    """Outcome probabilities p[row][k] = <e_k|rho|e_k> per measured basis."""

    basis_indices: list[int]
    probabilities: np.ndarray
    shots: int | None = None

    def row(self, index: int) -> np.ndarray:
        return self.probabilities[self.basis_indices.index(index)]

    def to_json(self) -> dict:
        return {
            "basis_indices": list(self.basis_indices),
            "probabilities": self.probabilities.tolist(),
            "shots": self.shots,
        }


def measure(
    rho: DensityMatrix,
    bases: list[Basis],
    shots: int | None = None,
    rng: np.random.Generator | None = None,
) -> MeasurementTable:
    """Born-rule probabilities; with ``shots`` each row is a multinomial estimate."""
    M = rho.matrix
    rows = []
    for basis in bases:
        B = basis.matrix
        p = np.einsum("qk,qr,rk->k", B.conj(), M, B).real
        if shots is not None:
            if rng is None:
                raise ValueError("sampling needs a random generator")
            p = np.clip(p, 0, None)
            p = rng.multinomial(shots, p / p.sum()) / shots
        rows.append(p)
    return MeasurementTable([b.construction_index for b in bases], np.array(rows), shots)


def measurement_bases(s: FiniteStructure, seed: int = DEFAULT_SEED) -> list[Basis]:
    """The N+1+i eigenbases, one per commuting family."""
    return [f.basis for f in operator_families(s, seed)]


@dataclass
class CoefficientEstimate:
    coefficients: np.ndarray
    spread: float


def estimate_coefficients(
    table: MeasurementTable,
    s: FiniteStructure,
    seed: int = DEFAULT_SEED,
    consistency_tol: float | None = None,
) -> CoefficientEstimate:
    """V coefficients from basis probabilities.

    Labels reached from several families (the identity always, others for
    composite N) are averaged.  When ``consistency_tol`` is given, estimates
    of one coefficient that disagree by more than it raise InconsistentData.
    """
    N = s.size
    families = operator_families(s, seed)
    missing = [f.index for f in families if f.index not in table.basis_indices]
    if missing:
        raise IncompleteData(f"no measurement row for bases {missing}")
    # gamma^-(k*l) as a matrix [l, k]
    chars = np.exp(-2j * np.pi * s.chi_table[s.mul] / s.char_order)
    estimates: dict[tuple[int, int], list[complex]] = {}
    for fam in families:
        p = table.row(fam.index)
        if p.shape != (N,):
            raise ShapeError(f"row for basis {fam.index} must have {N} entries")
        u_coeffs = chars @ p
        for l in s.elements:
            # U = phase V  =>  Tr(V^dagger rho) = phase * Tr(U^dagger rho)
            estimates.setdefault(fam.labels[l], []).append(fam.phases[l] * u_coeffs[l])
    c = np.zeros((N, N), dtype=complex)
    spread = 0.0
    for (j, i), values in estimates.items():
        values = np.array(values)
        c[j, i] = values.mean()
        spread = max(spread, linalg.max_abs(values - c[j, i]))
    if len(estimates) != N * N:
        raise IncompleteData("the families do not cover every V operator")
    if consistency_tol is not None and spread > consistency_tol:
        raise InconsistentData(f"duplicate coefficient estimates disagree by {spread:.3e}")
    return CoefficientEstimate(c, spread)


def reconstruct(
    table: MeasurementTable,
    s: FiniteStructure,
    seed: int = DEFAULT_SEED,
    tol: float | None = None,
) -> DensityMatrix:
    """Linear inversion; no positivity projection is applied.

    Exact tables are checked for consistency at ``tol``; sampled tables
    (``table.shots`` set) are not, since duplicates then differ by noise.
    """
    tol = linalg.default_tol() if tol is None else tol
    consistency = None if table.shots is not None else max(tol, 1e-9)
    est = estimate_coefficients(table, s, seed, consistency)
    return DensityMatrix(synthesize(est.coefficients, s))


@dataclass
class DegreesOfFreedom:
    dim: int
    parameters: int
    bases: int
    measured: int

    @property
    def excess(self) -> int:
        return self.measured - self.parameters

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "parameters": self.parameters,
            "bases": self.bases,
            "measured": self.measured,
            "excess": self.excess,
        }


def degrees_of_freedom_report(s: FiniteStructure) -> DegreesOfFreedom:
    N = s.size
    count = enumerate_subgroups(s, with_bases=False).count
    return DegreesOfFreedom(N, N * N - 1, count, (N - 1) * count)


def reconstruction_residual(rho: DensityMatrix, s: FiniteStructure, seed: int = DEFAULT_SEED, shots=None, rng=None) -> float:
    table = measure(rho, measurement_bases(s, seed), shots, rng)
    return linalg.max_abs(reconstruct(table, s, seed).matrix - rho.matrix)


def verification_suite(
    s: FiniteStructure, tol: float | None = None, seed: int = DEFAULT_SEED, states: int = 10
):
    """Operator-basis completeness, exact round trips and the parameter count."""
    tol = linalg.default_tol() if tol is None else tol
    N = s.size
    ops = np.array([v_matrix(s, j, i).reshape(-1) for j in s.elements for i in s.elements])
    gram = ops.conj() @ ops.T / N
    completeness = linalg.max_abs(gram - np.eye(N * N))

    rng = np.random.default_rng(seed)
    bases = measurement_bases(s, seed)
    worst = herm = tr = 0.0
    for _ in range(states):
        rho = random_density_matrix(N, rng)
        out = reconstruct(measure(rho, bases), s, seed, tol).matrix
        worst = max(worst, linalg.max_abs(out - rho.matrix))
        herm = max(herm, linalg.max_abs(out - out.conj().T))
        tr = max(tr, abs(np.trace(out) - 1))
    dof = degrees_of_freedom_report(s)
    return [
        residual_check("V operators form an orthogonal operator basis", completeness, tol),
        residual_check(f"tomography round trip ({states} states)", worst, max(tol, 1e-9)),
        residual_check("reconstruction Hermitian and unit trace", max(herm, tr), tol),
        boolean_check(f"measured values cover parameters ({dof.measured} >= {dof.parameters})", dof.excess >= 0),
    ]
