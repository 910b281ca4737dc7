import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import inversion_parity
from permsym.permutations import (
    EigenPhase,
    EigenvalueMultiset,
    ModePermutation,
    PermutationError,
    canonical_eigenbasis,
    induced_particle_permutation,
    induced_transposition_parity,
    is_invariant,
    permutation_eigenphases,
    randomized_eigenbasis,
)

perms = st.integers(1, 9).flatmap(lambda n: st.permutations(list(range(n)))).map(lambda im: ModePermutation(tuple(im)))


def test_parse_forms():
    p = ModePermutation.parse("(1 2 3)(4 5)")
    assert p == ModePermutation.parse("2,3,1,5,4")
    assert p.cycles == ((0, 1, 2), (3, 4))
    assert p.order == 6
    assert ModePermutation.parse("(1 2)", 4).cycle_lengths == (2, 1, 1)
    with pytest.raises(PermutationError):
        ModePermutation.parse("(1 2)(2 3)")
    with pytest.raises(PermutationError):
        ModePermutation.parse("1,1,2")


def test_eigenphase_arithmetic():
    a = EigenPhase(3, 4)
    assert a + EigenPhase(1, 4) == EigenPhase(0)
    assert a * 4 == EigenPhase(0)
    assert a.is_root_of_unity(4) and not a.is_root_of_unity(2)
    assert EigenPhase.from_angle(np.pi / 2, 4) == EigenPhase(1, 4)
    assert EigenPhase.from_angle(1.0, 12) is None
    assert np.isclose(a.to_complex(), -1j)


@given(perms)
def test_matrix_and_spectrum(p):
    P = p.matrix()
    v = np.arange(p.n) + 1.0
    assert np.allclose(P @ v, [v[p(j)] for j in range(p.n)])
    eig = np.sort_complex(np.round(np.linalg.eigvals(P), 8))
    expected = np.sort_complex(np.round([e.to_complex() for e in permutation_eigenphases(p).sorted()], 8))
    assert np.allclose(eig, expected)
    assert permutation_eigenphases(p).size == p.n


@given(perms)
def test_group_laws(p):
    assert p.compose(p.inverse()).is_identity()
    assert p.power(p.order).is_identity()
    assert sum(len(c) for c in p.cycles) == p.n


@given(perms)
def test_canonical_eigenbasis(p):
    E = canonical_eigenbasis(p)
    E.validate()
    res_unitary, res_eig = E.residuals()
    assert res_unitary < 1e-12 and res_eig < 1e-12
    assert EigenvalueMultiset(E.phases) == permutation_eigenphases(p)


@given(perms, st.integers(0, 2**31))
def test_randomized_eigenbasis(p, seed):
    E = randomized_eigenbasis(p, seed)
    E.validate()
    assert E.phases == canonical_eigenbasis(p).phases
    assert np.array_equal(E.basis, randomized_eigenbasis(p, seed).basis)


def test_single_cycle_is_fourier():
    n = 5
    E = canonical_eigenbasis(ModePermutation(tuple((j + 1) % n for j in range(n))))
    F = np.exp(2j * np.pi * np.outer(range(n), range(n)) / n) / np.sqrt(n)
    assert np.allclose(E.basis, F)


def _invariant_inputs(p, max_occ=1):
    for occ_per_cycle in np.ndindex(*([max_occ + 1] * len(p.cycles))):
        r = [0] * p.n
        for c, k in zip(p.cycles, occ_per_cycle):
            for j in c:
                r[j] = k
        yield r


@given(perms)
def test_induced_parity_matches_inversion_count(p):
    for r in _invariant_inputs(p):
        assert is_invariant(r, p)
        if sum(r) == 0:
            continue
        sigma = induced_particle_permutation(r, p)
        assert sorted(sigma) == list(range(sum(r)))
        assert induced_transposition_parity(r, p) == inversion_parity(sigma)


def test_non_invariant_rejected():
    p = ModePermutation.parse("(1 2 3)")
    assert not is_invariant([1, 0, 0], p)
    with pytest.raises(PermutationError):
        induced_particle_permutation([1, 0, 0], p)
