"""Finite rings Z_N and Galois fields GF(p^m) with their additive characters.

Elements are labelled 0..N-1.  For GF(p^m) a label encodes the polynomial
``sum(d_t * x**t)`` through its base-p digits ``d_t`` (least significant
digit = constant term).  Addition and multiplication are materialised as
N x N lookup tables.

Every character value is an exact root of unity ``exp(2j*pi*r/order)``
where ``order`` is N for Z_N and p for GF(p^m); :meth:`FiniteStructure.chi`
returns the integer exponent ``r``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import (
    InvalidCharacteristic,
    InvalidDimension,
    NoInverse,
    NotPrimePower,
    TooLarge,
)
from .report import boolean_check, residual_check

MAX_SIZE = 256

MOD_N = "mod-n"
GALOIS = "galois"
CONSTRUCTIONS = (MOD_N, GALOIS)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, int(n**0.5) + 1))


def prime_power(n: int) -> tuple[int, int] | None:
    """Return ``(p, m)`` with ``n == p**m`` or None if n is not a prime power."""
    if n < 2:
        return None
    p = next(d for d in range(2, n + 1) if n % d == 0)
    m = 0
    while n % p == 0:
        n //= p
        m += 1
    return (p, m) if n == 1 else None


# ---------------------------------------------------------------------------
# Polynomials over Z_p, coefficient lists [c0, c1, ...]
# ---------------------------------------------------------------------------

def _trim(poly: list[int]) -> list[int]:
    while poly and poly[-1] == 0:
        poly.pop()
    return poly


def _poly_rem(num: list[int], den: list[int], p: int) -> list[int]:
    num = _trim(list(num))
    den = _trim(list(den))
    inv_lead = pow(den[-1], -1, p)
    while len(num) >= len(den):
        coef = num[-1] * inv_lead % p
        shift = len(num) - len(den)
        for t, d in enumerate(den):
            num[shift + t] = (num[shift + t] - coef * d) % p
        _trim(num)
    return num


def _monic_polys(p: int, degree: int):
    """Monic polynomials of the given degree, in increasing integer encoding."""
    for low in itertools.product(range(p), repeat=degree):
        yield list(reversed(low)) + [1]


def is_irreducible(poly: list[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    deg = len(poly) - 1
    for d in range(1, deg // 2 + 1):
        for div in _monic_polys(p, d):
            if not _poly_rem(poly, div, p):
                return False
    return deg >= 1


def smallest_irreducible(p: int, m: int) -> list[int]:
    """Smallest monic irreducible of degree m, ordered by ``sum(c_t * p**t)``.

    For m = 1 this is ``x`` itself, which makes GF(p) coincide with Z_p.
    """
    for poly in _monic_polys(p, m):
        if is_irreducible(poly, p):
            return poly
    raise AssertionError("an irreducible polynomial exists for every degree")


def _digits(label: int, p: int, m: int) -> list[int]:
    return [(label // p**t) % p for t in range(m)]


def _label(digits, p: int) -> int:
    return sum(int(d) * p**t for t, d in enumerate(digits))


def _poly_mulmod(a: list[int], b: list[int], modulus: list[int], p: int) -> list[int]:
    m = len(modulus) - 1
    prod = [0] * (2 * m)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    rem = _poly_rem(prod, modulus, p)
    return rem + [0] * (m - len(rem))


# ---------------------------------------------------------------------------
# Structures
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FiniteStructure:
    """Commutative ring on labels 0..size-1 given by lookup tables.

    ``character_kind`` selects the additive character for Galois fields:
    ``"digit"`` uses the constant-term digit, ``"trace"`` the absolute field
    trace.  Both map onto Z_p; Z_N always uses ``x -> x``.
    """

    size: int
    kind: str
    add: np.ndarray = field(repr=False)
    mul: np.ndarray = field(repr=False)
    p: int | None = None
    m: int | None = None
    modulus: tuple[int, ...] | None = None
    character_kind: str = "digit"

    def __post_init__(self):
        self.add.setflags(write=False)
        self.mul.setflags(write=False)

    @property
    def name(self) -> str:
        if self.kind == MOD_N:
            return f"Z_{self.size}"
        return f"GF({self.p}^{self.m})"

    @property
    def elements(self) -> range:
        return range(self.size)

    @cached_property
    def neg_table(self) -> np.ndarray:
        table = np.argmin(self.add, axis=1)  # column holding the 0 entry
        table.setflags(write=False)
        return table

    @property
    def char_order(self) -> int:
        """Order of the root of unity the character takes values in."""
        return self.size if self.kind == MOD_N else self.p

    @cached_property
    def chi_table(self) -> np.ndarray:
        N = self.size
        if self.kind == MOD_N:
            table = np.arange(N)
        elif self.character_kind == "digit":
            table = np.arange(N) % self.p
        else:
            table = np.array([self._trace(x) for x in range(N)])
        table.setflags(write=False)
        return table

    def _trace(self, x: int) -> int:
        total, power = 0, x
        for _ in range(self.m):
            total = int(self.add[total, power])
            power = self.pow(power, self.p)
        # the trace lies in the prime subfield, whose labels are 0..p-1
        assert total < self.p
        return total

    def plus(self, a: int, b: int) -> int:
        return int(self.add[a, b])

    def times(self, a: int, b: int) -> int:
        return int(self.mul[a, b])

    def minus(self, a: int, b: int) -> int:
        return int(self.add[a, self.neg_table[b]])

    def pow(self, a: int, e: int) -> int:
        out = 1
        for _ in range(e):
            out = int(self.mul[out, a])
        return out

    def chi(self, x: int) -> int:
        """Integer exponent r with character value exp(2j*pi*r/char_order)."""
        return int(self.chi_table[x])

    def gamma(self, x: int) -> complex:
        return complex(np.exp(2j * np.pi * self.chi(x) / self.char_order))

    @cached_property
    def two_inverse(self) -> int | None:
        two = self.plus(1, 1)
        hits = np.flatnonzero(self.mul[two] == 1)
        return int(hits[0]) if len(hits) else None

    def to_json(self) -> dict:
        return {
            "size": self.size,
            "kind": self.kind,
            "p": self.p,
            "m": self.m,
            "modulus": list(self.modulus) if self.modulus is not None else None,
            "add": self.add.tolist(),
            "mul": self.mul.tolist(),
        }


def _check_size(n: int):
    if n > MAX_SIZE:
        raise TooLarge(f"structure size {n} exceeds the bound {MAX_SIZE}")


def ring_mod_n(N: int) -> FiniteStructure:
    """Integers modulo N with ordinary addition and multiplication."""
    if N < 2:
        raise InvalidDimension(f"dimension must be >= 2, got {N}")
    _check_size(N)
    x = np.arange(N)
    return FiniteStructure(
        size=N,
        kind=MOD_N,
        add=(x[:, None] + x[None, :]) % N,
        mul=(x[:, None] * x[None, :]) % N,
    )


def galois_field(p: int, m: int = 1, character: str = "digit") -> FiniteStructure:
    """GF(p^m) built from the smallest monic irreducible polynomial of degree m."""
    if not is_prime(p):
        raise InvalidCharacteristic(f"characteristic must be prime, got {p}")
    if m < 1:
        raise InvalidDimension(f"extension degree must be >= 1, got {m}")
    if character not in ("digit", "trace"):
        raise ValueError(f"unknown character kind {character!r}")
    N = p**m
    _check_size(N)
    modulus = smallest_irreducible(p, m)
    digits = [_digits(a, p, m) for a in range(N)]
    add = np.array(
        [[_label([(x + y) % p for x, y in zip(da, db)], p) for db in digits] for da in digits]
    )
    mul = np.zeros((N, N), dtype=int)
    for a in range(N):
        for b in range(a, N):
            mul[a, b] = mul[b, a] = _label(_poly_mulmod(digits[a], digits[b], modulus, p), p)
    return FiniteStructure(
        size=N,
        kind=GALOIS,
        add=add,
        mul=mul,
        p=p,
        m=m,
        modulus=tuple(modulus),
        character_kind=character,
    )


def build_structure(dim: int, construction: str, character: str = "digit") -> FiniteStructure:
    """Resolve a ``(dim, construction)`` pair as used on the command line."""
    if construction == MOD_N:
        return ring_mod_n(dim)
    if construction == GALOIS:
        if dim < 2:
            raise InvalidDimension(f"dimension must be >= 2, got {dim}")
        pm = prime_power(dim)
        if pm is None:
            raise NotPrimePower(f"no field with {dim} elements: {dim} is not a prime power")
        return galois_field(*pm, character=character)
    raise ValueError(f"unknown construction {construction!r}")


def neg(s: FiniteStructure, a: int) -> int:
    return int(s.neg_table[a])


def inv(s: FiniteStructure, a: int) -> int:
    hits = np.flatnonzero(s.mul[a] == 1)
    if a == 0 or not len(hits):
        raise NoInverse(f"{a} has no multiplicative inverse in {s.name}")
    return int(hits[0])


# ---------------------------------------------------------------------------
# Characters
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Character:
    structure: FiniteStructure
    values: np.ndarray

    def __call__(self, x: int) -> complex:
        return complex(self.values[x])

    def homomorphism_residual(self) -> float:
        """max |chi(a+b) - chi(a) chi(b)| over all pairs."""
        v = self.values
        return float(np.abs(v[self.structure.add] - v[:, None] * v[None, :]).max())

    def delta_sum_residual(self) -> float:
        """max_q |sum_x chi(x*q) - N delta_{q,0}|."""
        s = self.structure
        sums = self.values[s.mul].sum(axis=0)
        target = np.zeros(s.size)
        target[0] = s.size
        return float(np.abs(sums - target).max())

    def is_nontrivial(self, tol: float = 1e-12) -> bool:
        return bool(np.any(np.abs(self.values - 1) > tol))


def character(s: FiniteStructure) -> Character:
    values = np.exp(2j * np.pi * s.chi_table / s.char_order)
    values.setflags(write=False)
    return Character(s, values)


def half_phase_exponent(s: FiniteStructure, c: int, q: int) -> int:
    """Exponent e (mod 2*char_order) of a square root of gamma^(c*q*q).

    The returned phase ``exp(1j*pi*e/char_order)`` squares to the character
    value of ``c*q*q``.  The branch is chosen so that, as a function of q,
    the phase is quadratic with polar form gamma^(c*q*t):

        h(q + t) = h(q) * h(t) * gamma^(c*q*t)

    which is what makes the resulting bases mutually unbiased.

    * Z_N:           e = c*q*(q+N)          (mod 2N)
    * GF(p^m), odd p: e = 2*chi(c*q*q/2)     (mod 2p)
    * GF(2^m):       Z_4 lift over the digit basis x^t of the field
    """
    ord_ = s.char_order
    if s.kind == MOD_N:
        return c * q * (q + s.size) % (2 * ord_)
    if s.p != 2:
        return 2 * s.chi(s.times(s.two_inverse, s.times(c, s.times(q, q)))) % (2 * ord_)
    bits = _digits(q, 2, s.m)
    basis = [1 << t for t in range(s.m)]
    e = 0
    for a in range(s.m):
        if not bits[a]:
            continue
        e += s.chi(s.times(c, s.times(basis[a], basis[a])))
        for b in range(a + 1, s.m):
            if bits[b]:
                e += 2 * s.chi(s.times(c, s.times(basis[a], basis[b])))
    return e % 4


def half_phase(s: FiniteStructure, c: int, q: int) -> complex:
    return complex(np.exp(1j * np.pi * half_phase_exponent(s, c, q) / s.char_order))


# ---------------------------------------------------------------------------
# Axiom checks
# ---------------------------------------------------------------------------

@dataclass
class AxiomReport:
    additive_group: bool
    add_commutative: bool
    mul_commutative: bool
    mul_associative: bool
    mul_identity: bool
    distributive: bool
    zero_divisor_free: bool
    multiplicative_inverses: bool
    zero_divisors: list[tuple[int, int]]

    @property
    def is_field(self) -> bool:
        return all(
            (
                self.additive_group,
                self.add_commutative,
                self.mul_commutative,
                self.mul_associative,
                self.mul_identity,
                self.distributive,
                self.zero_divisor_free,
                self.multiplicative_inverses,
            )
        )

    def to_json(self) -> dict:
        out = {k: v for k, v in self.__dict__.items() if k != "zero_divisors"}
        out["zero_divisors"] = [list(z) for z in self.zero_divisors]
        out["is_field"] = self.is_field
        return out


def _associative(table: np.ndarray) -> bool:
    for a in range(len(table)):
        # (a.b).c == a.(b.c) for every b, c
        if not np.array_equal(table[table[a]], table[a][table]):
            return False
    return True


def verify_axioms(s: FiniteStructure) -> AxiomReport:
    """Scan the tables; never raises."""
    N = s.size
    add, mul = s.add, s.mul
    x = np.arange(N)
    closed = add.min() >= 0 and add.max() < N and mul.min() >= 0 and mul.max() < N
    additive_group = bool(
        closed
        and np.array_equal(add[0], x)
        and np.all((add == 0).sum(axis=1) == 1)
        and _associative(add)
    )
    distributive = bool(
        closed
        and all(np.array_equal(mul[a][add], add[mul[a]][:, mul[a]]) for a in range(N))
    )
    zero_divisors = [(int(a), int(b)) for a, b in zip(*np.nonzero(mul[1:, 1:] == 0))]
    zero_divisors = [(a + 1, b + 1) for a, b in zero_divisors]
    return AxiomReport(
        additive_group=additive_group,
        add_commutative=bool(np.array_equal(add, add.T)),
        mul_commutative=bool(np.array_equal(mul, mul.T)),
        mul_associative=bool(closed and _associative(mul)),
        mul_identity=bool(np.array_equal(mul[1], x)),
        distributive=distributive,
        zero_divisor_free=not zero_divisors,
        multiplicative_inverses=bool(np.all((mul[1:] == 1).any(axis=1))),
        zero_divisors=zero_divisors,
    )


def verification_suite(s: FiniteStructure, tol: float = 1e-12):
    """Axioms required by the structure's kind plus the character identities."""
    report = verify_axioms(s)
    chi = character(s)
    ring_ok = all(
        (
            report.additive_group,
            report.add_commutative,
            report.mul_commutative,
            report.mul_associative,
            report.mul_identity,
            report.distributive,
        )
    )
    checks = [boolean_check("commutative ring axioms", ring_ok)]
    if s.kind == GALOIS:
        checks.append(boolean_check("field axioms", report.is_field))
    else:
        checks.append(boolean_check("field iff N prime", report.is_field == is_prime(s.size)))
    checks += [
        residual_check("character homomorphism", chi.homomorphism_residual(), tol),
        residual_check("character orthogonality sum", chi.delta_sum_residual(), tol),
        boolean_check("character nontrivial", chi.is_nontrivial()),
    ]
    return checks
