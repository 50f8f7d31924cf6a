import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mubkit import bases, bell, galois
from mubkit.errors import LabelRangeError
from mubkit.weylgroup import v_matrix


def brute_bell(s, basis, m, n):
    """N^(-1/2) sum_k gamma^(k*n) conj(b_k) (x) b_(k+m), built with np.kron."""
    B = basis.matrix
    out = np.zeros(s.size**2, dtype=complex)
    for k in s.elements:
        out += s.gamma(s.times(k, n)) * np.kron(B[:, k].conj(), B[:, s.plus(k, m)])
    return out / np.sqrt(s.size)


SMALL = [galois.ring_mod_n(2), galois.ring_mod_n(3), galois.ring_mod_n(4), galois.ring_mod_n(5), galois.galois_field(2, 2)]


def test_qubit_bell_states():
    s = galois.ring_mod_n(2)
    r = 1 / np.sqrt(2)
    assert np.allclose(bell.bell_state(s, None, 0, 0).vector, [r, 0, 0, r])
    assert np.allclose(bell.bell_state(s, None, 0, 1).vector, [r, 0, 0, -r])
    assert np.allclose(bell.bell_state(s, None, 1, 0).vector, [0, r, r, 0])
    assert np.allclose(bell.bell_state(s, None, 1, 1).vector, [0, r, -r, 0])


@pytest.mark.parametrize("s", SMALL, ids=lambda s: s.name)
def test_matches_kron_construction(s):
    for basis in (bases.computational_basis(s.size, s), bases.dual_basis(s), bases.family_basis(s, 2)):
        for m in s.elements:
            for n in s.elements:
                assert np.allclose(bell.bell_state(s, basis, m, n).vector, brute_bell(s, basis, m, n), atol=1e-12)


@pytest.mark.parametrize("s", SMALL, ids=lambda s: s.name)
def test_orthonormal(s):
    assert bell.bell_gram_residual(s) < 1e-10
    assert bell.bell_gram_residual(s, bases.dual_basis(s)) < 1e-10


@pytest.mark.parametrize("s", SMALL, ids=lambda s: s.name)
def test_duality(s):
    for m in s.elements:
        for n in s.elements:
            assert bell.bell_duality_check(s, m, n)


@pytest.mark.parametrize("s", SMALL, ids=lambda s: s.name)
def test_duality_involution(s):
    # two dual steps send (m, n) -> (-n, m) -> (-m, -n); the doubly
    # transformed basis is |-k>, so Bell states referenced to it must be
    # the computational ones with negated labels
    neg = s.neg_table
    parity = bases.Basis(s.size, 0, np.eye(s.size, dtype=complex)[:, neg], s)
    for m in s.elements:
        for n in s.elements:
            twice = bell.bell_matrix(s, m, n, parity).reshape(-1)
            direct = bell.bell_matrix(s, neg[m], neg[n]).reshape(-1)
            assert 1 - abs(np.vdot(twice, direct)) < 1e-10
            # and the label map composes as stated
            once = (neg[n], m)
            assert (neg[once[1]], neg[neg[once[0]]]) == (neg[m], neg[n])


@pytest.mark.parametrize("s", SMALL, ids=lambda s: s.name)
def test_permutation_invariance(s):
    for basis in (None, bases.dual_basis(s)):
        for i in s.elements:
            for m in s.elements:
                for n in s.elements:
                    phase = bell.permutation_invariance_check(s, i, m, n, basis)
                    assert abs(phase - s.gamma(s.times(s.neg_table[i], n))) < 1e-10


@pytest.mark.parametrize("s", SMALL, ids=lambda s: s.name)
def test_error_channel(s):
    for m in s.elements:
        for n in s.elements:
            for k in s.elements:
                bob = bell.error_channel(s, m, n, k)
                assert 1 - abs(np.vdot(bob, v_matrix(s, n, m)[:, k])) < 1e-10


def brute_repairing(s, m, n, i, j):
    """Inner product over explicit (a, b, e, e') loops."""
    N = s.size
    ab = bell.bell_matrix(s, m, n)
    ee = bell.bell_matrix(s, m, s.neg_table[n])
    ae = bell.bell_matrix(s, i, s.neg_table[j])
    be = bell.bell_matrix(s, i, j)
    total = 0j
    for a in range(N):
        for b in range(N):
            for e in range(N):
                for f in range(N):
                    total += np.conj(ab[a, b] * ee[e, f]) * ae[a, e] * be[b, f]
    return total


@pytest.mark.parametrize("s", [galois.ring_mod_n(2), galois.ring_mod_n(3)], ids=lambda s: s.name)
def test_repairing_exhaustive(s):
    for m in s.elements:
        for n in s.elements:
            for i in s.elements:
                for j in s.elements:
                    value = bell.repairing_overlap(s, m, n, i, j)
                    assert abs(value - brute_repairing(s, m, n, i, j)) < 1e-10
                    assert abs(value - s.gamma(s.times(i, n)) * s.gamma(s.times(m, j)) / s.size) < 1e-10


def test_repairing_n3_time():
    s = galois.ring_mod_n(3)
    t0 = time.perf_counter()
    for m in s.elements:
        for n in s.elements:
            for i in s.elements:
                for j in s.elements:
                    bell.repairing_overlap(s, m, n, i, j)
    assert time.perf_counter() - t0 < 60


def test_repairing_index_layout():
    # four-party index ((a*N + b)*N + e)*N + e'
    s = galois.ring_mod_n(3)
    first, _ = bell.repairing_vectors(s, 1, 2, 0, 1)
    ab, ee = bell.bell_matrix(s, 1, 2), bell.bell_matrix(s, 1, 1)
    a, b, e, f = 2, 0, 1, 2
    assert first[((a * 3 + b) * 3 + e) * 3 + f] == pytest.approx(ab[a, b] * ee[e, f])


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([galois.ring_mod_n(5), galois.galois_field(2, 2), galois.ring_mod_n(4)]), st.data())
def test_repairing_random(s, data):
    m, n, i, j = (data.draw(st.integers(0, s.size - 1)) for _ in range(4))
    bell.repairing_overlap(s, m, n, i, j)


def test_label_checks():
    s = galois.ring_mod_n(3)
    with pytest.raises(LabelRangeError):
        bell.bell_state(s, None, 3, 0)
    with pytest.raises(LabelRangeError):
        bell.error_channel(s, 0, 0, 5)


@pytest.mark.parametrize("s", [galois.ring_mod_n(2), galois.ring_mod_n(3), galois.ring_mod_n(5)], ids=lambda s: s.name)
def test_intertwining_on_bell_states(s):
    assert bell.intertwining_residual(s) < 1e-10


def test_suite():
    assert all(c.passed for c in bell.verification_suite(galois.ring_mod_n(3)))
    assert all(c.passed for c in bell.verification_suite(galois.galois_field(2, 2), sample=100))
    assert all(c.passed for c in bell.verification_suite(galois.ring_mod_n(5), sample=100))
