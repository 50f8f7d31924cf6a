import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import structures
from mubkit import bases, galois, weylgroup as wg
from mubkit.errors import DomainError, LabelRangeError, NumericalDegeneracy

W3 = np.exp(2j * np.pi / 3)

Z4_SUBGROUPS = [
    {(0, 0), (1, 0), (2, 0), (3, 0)},
    {(0, 0), (0, 1), (0, 2), (0, 3)},
    {(0, 0), (1, 1), (2, 2), (3, 3)},
    {(0, 0), (1, 2), (2, 0), (3, 2)},
    {(0, 0), (1, 3), (2, 2), (3, 1)},
    {(0, 0), (2, 1), (0, 2), (2, 3)},
]

# rows of the GF(4) subgroup table as tensor products of Pauli matrices
GF4_TABLE = [
    {"Z1", "1Z", "ZZ"},
    {"1X", "X1", "XX"},
    {"Y1", "1Y", "YY"},
    {"ZX", "XY", "YZ"},
    {"YX", "ZY", "XZ"},
]
PAULI_NAMES = [a + b for a in "1XYZ" for b in "1XYZ" if a + b != "11"]


def pauli_name(M):
    hits = [n for n in PAULI_NAMES if (c := oracles.scalar_multiple(M, oracles.tensor_pauli(n))) is not None and abs(abs(c) - 1) < 1e-10]
    assert len(hits) == 1
    return hits[0]


def test_qubit_paulis():
    s = galois.ring_mod_n(2)
    assert np.array_equal(wg.shift(s, 1).matrix, oracles.X)
    assert np.allclose(wg.clock(s, 1).matrix, oracles.Z)
    assert np.allclose(wg.v_op(s, 1, 1).matrix, 1j * oracles.Y)
    assert np.allclose(wg.v_op(s, 0, 0).matrix, np.eye(2))


def test_clock_mod4(z4):
    assert np.allclose(wg.clock(z4, 1).matrix, np.diag([1, 1j, -1, -1j]))


def test_v_entries_n3():
    M = wg.v_op(galois.ring_mod_n(3), 1, 1).matrix
    expected = np.zeros((3, 3), dtype=complex)
    expected[1, 0], expected[2, 1], expected[0, 2] = W3, W3**2, 1
    assert np.allclose(M, expected, atol=1e-15)


def test_label_range():
    with pytest.raises(LabelRangeError):
        wg.shift(galois.ring_mod_n(3), 3)
    with pytest.raises(LabelRangeError):
        wg.v_op(galois.ring_mod_n(3), -1, 0)


def test_shift_group(gf4):
    for i in range(4):
        for j in range(4):
            assert np.array_equal(wg.shift(gf4, i).matrix @ wg.shift(gf4, j).matrix, wg.shift(gf4, gf4.plus(i, j)).matrix)


def test_compose_examples():
    s = galois.ring_mod_n(3)
    phase, labels = wg.compose(wg.v_op(s, 1, 0), wg.v_op(s, 0, 1))
    assert labels == (1, 1) and abs(phase - 1) < 1e-15
    phase, labels = wg.compose(wg.v_op(s, 0, 1), wg.v_op(s, 1, 0))
    assert labels == (1, 1) and abs(phase - W3.conjugate()) < 1e-15
    q = galois.ring_mod_n(2)
    phase, _ = wg.compose(wg.shift(q, 1), wg.clock(q, 1))
    assert abs(phase + 1) < 1e-15


def test_compose_structure_mismatch():
    with pytest.raises(DomainError):
        wg.compose(wg.shift(galois.ring_mod_n(4), 1), wg.shift(galois.galois_field(2, 2), 1))


@pytest.mark.parametrize("s", structures(max_n=8), ids=lambda s: s.name)
def test_composition_and_weyl_exhaustive(s):
    labels = [(j, i) for j in s.elements for i in s.elements]
    mats = {lab: wg.v_matrix(s, *lab) for lab in labels}
    for a in labels:
        for b in labels:
            phase, lab = wg.compose_labels(s, a, b)
            assert np.abs(mats[a] @ mats[b] - phase * mats[lab]).max() < 1e-10
    for i in s.elements:
        for j in s.elements:
            lhs = wg.shift(s, i).matrix @ wg.clock(s, j).matrix
            rhs = s.gamma(s.neg_table[s.mul[i, j]]) * wg.clock(s, j).matrix @ wg.shift(s, i).matrix
            assert np.abs(lhs - rhs).max() < 1e-10


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(structures(max_n=16)), st.data())
def test_composition_random(s, data):
    lab = st.tuples(st.integers(0, s.size - 1), st.integers(0, s.size - 1))
    a, b = data.draw(lab), data.draw(lab)
    phase, out = wg.compose(wg.v_op(s, *a), wg.v_op(s, *b))
    assert abs(abs(phase) - 1) < 1e-12
    assert wg.commute(s, a, b) == (np.abs(wg.v_matrix(s, *a) @ wg.v_matrix(s, *b) - wg.v_matrix(s, *b) @ wg.v_matrix(s, *a)).max() < 1e-10)


def test_u_examples(gf4):
    s = galois.ring_mod_n(5)
    for l in range(5):
        assert np.allclose(wg.u_op(s, 0, l).matrix, wg.clock(s, l).matrix)
    for i in range(6):
        assert np.allclose(wg.u_op(s, i, 0).matrix, np.eye(5))
    u = wg.u_op(gf4, 2, 1)
    assert u.labels == (1, 1)
    assert abs(u.phase - (-1j)) < 1e-15
    # the cycle returns to the identity after N steps
    U1 = u.matrix
    assert np.allclose(np.linalg.matrix_power(U1, 2), wg.u_op(gf4, 2, gf4.plus(1, 1)).matrix)


@pytest.mark.parametrize("s", structures(max_n=9), ids=lambda s: s.name)
def test_u_closure_and_diagonal(s):
    for fam in wg.operator_families(s):
        ops = [fam.operator(l).matrix for l in s.elements]
        for l1 in s.elements:
            for l2 in s.elements:
                assert np.abs(ops[l1] @ ops[l2] - ops[s.plus(l1, l2)]).max() < 1e-10
        B = fam.basis.matrix
        for l in s.elements:
            expected = np.diag([s.gamma(s.mul[k, l]) for k in s.elements])
            assert np.abs(B.conj().T @ ops[l] @ B - expected).max() < 1e-10


def test_u_op_fourier_phase_formula():
    # gamma^(-(i-1)l(l-1)/2) gamma^((i-1)l(N-1)/2), exponents kept over 2N
    for N in (3, 4, 5, 6):
        s = galois.ring_mod_n(N)
        for i in range(1, N + 1):
            for l in range(N):
                e = -(i - 1) * l * (l - 1) + (i - 1) * l * (N - 1)
                expected = np.exp(1j * np.pi * e / N)
                assert abs(wg.u_op(s, i, l).phase - expected) < 1e-12


@pytest.mark.parametrize("N", [2, 3, 5, 7, 11])
def test_prime_subgroup_count(N):
    assert wg.enumerate_subgroups(galois.ring_mod_n(N), with_bases=False).count == N + 1


def test_z4_subgroups_match_list(z4):
    dec = wg.enumerate_subgroups(z4)
    assert dec.count == 6
    assert sorted(map(sorted, map(set, dec.subgroups))) == sorted(map(sorted, Z4_SUBGROUPS))
    assert len(dec.eigenbases) == 6


def test_gf4_subgroups_are_tensor_paulis(gf4):
    dec = wg.enumerate_subgroups(gf4, with_bases=False)
    assert dec.count == 5
    rows = [{pauli_name(wg.v_matrix(gf4, *lab)) for lab in g if lab != (0, 0)} for g in dec.subgroups]
    assert sorted(map(sorted, rows)) == sorted(map(sorted, GF4_TABLE))


@pytest.mark.parametrize("N", [2, 3, 4, 5, 6, 8, 9, 10])
def test_subgroups_are_the_cyclic_lagrangians(N):
    found = {frozenset(g) for g in wg.enumerate_subgroups(galois.ring_mod_n(N), with_bases=False).subgroups}
    iso = oracles.isotropic_subgroups_mod_n(N)
    assert found == {g for g in iso if oracles.is_cyclic(g, N)}


def test_z4_has_one_non_cyclic_lagrangian():
    iso = oracles.isotropic_subgroups_mod_n(4)
    assert len(iso) == 7
    (extra,) = [g for g in iso if not oracles.is_cyclic(g, 4)]
    assert extra == {(0, 0), (2, 0), (0, 2), (2, 2)}


@pytest.mark.parametrize("s", [galois.galois_field(2, 3), galois.galois_field(3, 2)], ids=lambda s: s.name)
def test_field_subgroup_count(s):
    assert wg.enumerate_subgroups(s, with_bases=False).count == s.size + 1


@pytest.mark.parametrize("s", structures(max_n=10), ids=lambda s: s.name)
def test_decomposition_covers_and_commutes(s):
    dec = wg.enumerate_subgroups(s)
    everything = {(j, i) for j in s.elements for i in s.elements}
    assert set().union(*map(set, dec.subgroups)) == everything
    for g in dec.subgroups:
        assert len(g) == s.size and (0, 0) in g
        for a in g:
            for b in g:
                assert np.abs(wg.v_matrix(s, *a) @ wg.v_matrix(s, *b) - wg.v_matrix(s, *b) @ wg.v_matrix(s, *a)).max() < 1e-10
    # eigenbases of different subgroups are different sets of rays
    for x in range(dec.count):
        for y in range(x + 1, dec.count):
            G = np.abs(dec.eigenbases[x].matrix.conj().T @ dec.eigenbases[y].matrix)
            assert not np.allclose(np.sort(G, axis=1)[:, -1], 1)
    if galois.verify_axioms(s).is_field:
        assert bases.unbiasedness(dec.eigenbases).is_complete_mub


def test_joint_eigenbasis_examples():
    s = galois.ring_mod_n(3)
    comp = wg.joint_eigenbasis([wg.clock(s, j).matrix for j in range(3)])
    assert np.allclose(np.abs(comp.matrix), np.eye(3)[:, np.argmax(np.abs(comp.matrix), axis=0)])
    dual = wg.joint_eigenbasis([wg.shift(s, i).matrix for i in range(3)])
    G = np.abs(dual.matrix.conj().T @ bases.dual_basis(s).matrix)
    assert np.allclose(np.sort(G, axis=1)[:, -1], 1)
    diag = wg.joint_eigenbasis([wg.v_matrix(s, l, l) for l in range(3)])
    G = np.abs(diag.matrix.conj().T @ bases.family_basis(s, 2).matrix)
    assert np.allclose(np.sort(G, axis=1)[:, -1], 1)


def test_joint_eigenbasis_errors():
    s = galois.ring_mod_n(3)
    with pytest.raises(DomainError):
        wg.joint_eigenbasis([wg.shift(s, 1).matrix, wg.clock(s, 1).matrix])
    with pytest.raises(NumericalDegeneracy):
        wg.joint_eigenbasis([np.eye(3)])


def test_joint_eigenbasis_is_seeded():
    s = galois.ring_mod_n(6)
    a = wg.enumerate_subgroups(s, seed=11).eigenbases
    b = wg.enumerate_subgroups(s, seed=11).eigenbases
    assert all(np.array_equal(x.matrix, y.matrix) for x, y in zip(a, b))


def test_extra_families_exist_only_for_composite():
    assert len(wg.operator_families(galois.ring_mod_n(4))) == 6
    assert len(wg.operator_families(galois.ring_mod_n(6))) == 12
    u = wg.u_op(galois.ring_mod_n(4), 5, 2)
    assert u.basis_index == 5


def test_intertwine_n2():
    s = galois.ring_mod_n(2)
    labels, phase = wg.intertwine_check(s, 2, 1, 0)
    assert labels == (0, 1) and abs(phase - 1) < 1e-12
    assert wg.intertwine_check(s, 2, 0, 0) == ((0, 0), pytest.approx(1))


@pytest.mark.parametrize("N", [2, 3, 5, 7])
def test_intertwine_bijective_for_primes(N):
    s = galois.ring_mod_n(N)
    for k in range(1, N + 1):
        images = set()
        for m in s.elements:
            for n in s.elements:
                labels, phase = wg.intertwine_check(s, k, m, n)
                assert abs(abs(phase) - 1) < 1e-10
                images.add(labels)
        assert len(images) == N * N
        assert wg.intertwine_is_bijection(s, k)


@pytest.mark.parametrize("s", [galois.ring_mod_n(4), galois.ring_mod_n(6), galois.galois_field(2, 2)], ids=lambda s: s.name)
def test_intertwine_holds_beyond_primes(s):
    for k in range(1, s.size + 1):
        for m in s.elements:
            for n in s.elements:
                wg.intertwine_check(s, k, m, n)


def test_basis_change_is_family_matrix():
    s = galois.ring_mod_n(5)
    assert np.array_equal(wg.basis_change(s, 3), bases.family_basis(s, 3).matrix)


def test_decomposition_json(z4):
    data = json.loads(json.dumps(wg.enumerate_subgroups(z4).to_json()))
    assert data["count"] == 6
    assert [0, 0] in data["subgroups"][0]
    assert len(data["eigenbases"]) == 6


@pytest.mark.parametrize("s", structures(max_n=8), ids=lambda s: s.name)
def test_suite(s):
    assert all(c.passed for c in wg.verification_suite(s))
