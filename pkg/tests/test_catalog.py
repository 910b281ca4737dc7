import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import random_unitary
from permsym.catalog import (
    CatalogError,
    build_unitary,
    compose,
    fourier_cyclic_shift,
    fourier_unitary,
    hypercube_permutation,
    hypercube_theta,
    hypercube_unitary,
    jx_eigenphases,
    jx_mirror_permutation,
    jx_unitary,
    jx_unitary_closed_form,
    smallest_period,
    sylvester_unitary,
    verify_symmetric_phase_relation,
    walsh_eigenphases,
)
from permsym.linalg import is_unitary
from permsym.permutations import EigenPhase, ModePermutation, permutation_eigenphases


@pytest.mark.parametrize("n", [1, 2, 5, 12])
def test_fourier_is_unitary(n):
    assert is_unitary(fourier_unitary(n))


@pytest.mark.parametrize("n,chi", [(12, 3), (12, 6), (12, 4), (8, 2), (6, 1)])
def test_fourier_witness(n, chi):
    w = verify_symmetric_phase_relation(fourier_unitary(n), fourier_cyclic_shift(n, chi))
    assert w.ok, w.reason
    m = n // chi
    assert w.eigenphases == tuple(EigenPhase((k * chi) % n, n) for k in range(n))
    assert all(e.is_root_of_unity(m) for e in w.eigenphases)
    assert np.allclose(w.local_phase, 0, atol=1e-9)


def test_smallest_period():
    assert smallest_period([1, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0]) == 3
    assert smallest_period([1, 0, 1, 0, 0, 0] * 2) == 6
    assert smallest_period([1, 0, 0]) == 3


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_sylvester_and_hypercube(d):
    n = 2**d
    S, H = sylvester_unitary(d), hypercube_unitary(d)
    assert is_unitary(S) and is_unitary(H)
    theta = hypercube_theta(n)
    assert np.allclose(compose(theta, S, theta), H)
    powers = [2**l for l in range(1, d + 1)]
    for size in range(1, d + 1):
        for pvec in itertools.combinations(powers, size):
            p = hypercube_permutation(pvec, n)
            for U in (S, H):
                w = verify_symmetric_phase_relation(U, p)
                assert w.ok, (d, pvec, w.reason)
                assert w.eigenphases == walsh_eigenphases(pvec, n)


@pytest.mark.parametrize("n", range(2, 10))
def test_jx(n):
    U = jx_unitary(n)
    assert is_unitary(U)
    assert np.max(np.abs(U - jx_unitary_closed_form(n))) < 1e-10
    p = jx_mirror_permutation(n)
    w = verify_symmetric_phase_relation(U, p)
    assert w.ok, w.reason
    assert w.eigenphases == jx_eigenphases(n)
    # z_j = exp(i (theta(pi(j)) - theta(j))) with theta(j) = pi j / 2
    z = np.exp(1j * np.pi / 2 * (np.array([p(j) for j in range(n)]) - np.arange(n)))
    assert np.allclose(np.exp(1j * w.z_phases()), z)


@given(st.integers(2, 7).flatmap(lambda n: st.permutations(list(range(n)))), st.integers(0, 1000))
def test_witness_recovers_random_eigenbasis(images, seed):
    p = ModePermutation(tuple(images))
    entry = build_unitary(f"eigenbasis:perm={p.to_cycle_string()},n={p.n},seed={seed},theta=random,sigma=random")
    w = verify_symmetric_phase_relation(entry.unitary, p)
    assert w.ok, w.reason
    assert w.eigenvalue_multiset() == permutation_eigenphases(p)


def test_witness_rejects_generic_unitary(rng):
    U = random_unitary(6, rng)
    w = verify_symmetric_phase_relation(U, ModePermutation.parse("(1 2 3)(4 5 6)"))
    assert not w
    assert w.reason


def test_build_unitary_errors():
    with pytest.raises(CatalogError):
        build_unitary("nope:n=3")
    with pytest.raises(CatalogError):
        build_unitary("fourier")
    with pytest.raises(CatalogError):
        build_unitary("sylvester:d=0")
    with pytest.raises(CatalogError):
        build_unitary("eigenbasis:perm=(1 2),theta=random")


def test_build_unitary_determinism():
    a = build_unitary("eigenbasis:perm=(1 2 3)(4 5),seed=9,theta=random,sigma=0.5").unitary
    b = build_unitary("eigenbasis:perm=(1 2 3)(4 5),seed=9,theta=random,sigma=0.5").unitary
    assert np.array_equal(a, b)
