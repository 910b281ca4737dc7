
import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import random_unitary, state_vector_probability
from permsym.events import enumerate_bosonic_outputs, enumerate_fermionic_outputs
from permsym.permutations import ModePermutation, canonical_eigenbasis
from permsym.probabilities import (
    ProbabilityError,
    distribution_sweep,
    mean_distribution_over_random_bases,
    output_distribution,
    transition_probability,
)


def _inputs(n, N, fermion):
    gen = enumerate_fermionic_outputs(n, N) if fermion else enumerate_bosonic_outputs(n, N)
    return list(gen)


@pytest.mark.parametrize("stat", ["boson", "fermion", "distinguishable"])
@pytest.mark.parametrize("n,N", [(3, 2), (4, 3), (4, 4), (5, 2)])
def test_against_state_vector_oracle(rng, stat, n, N):
    U = random_unitary(n, rng)
    fermion = stat == "fermion"
    if fermion and N > n:
        return
    r = _inputs(n, N, fermion)[-1]
    dist = output_distribution(U, r, stat)
    for s, p in zip(dist.events, dist.probabilities):
        assert abs(p - state_vector_probability(U, r, s, stat)) < 1e-12
        assert abs(transition_probability(U, r, s, stat) - p) < 1e-13


@given(st.integers(2, 6), st.integers(1, 4), st.sampled_from(["boson", "fermion", "distinguishable"]), st.integers(0, 999))
def test_normalisation(n, N, stat, seed):
    if stat == "fermion" and N > n:
        return
    rng = np.random.default_rng(seed)
    U = random_unitary(n, rng)
    r = _inputs(n, N, stat == "fermion")[seed % len(_inputs(n, N, stat == "fermion"))]
    dist = output_distribution(U, r, stat)
    assert abs(dist.total() - 1) < 1e-9
    assert np.all(dist.probabilities >= 0)


def test_hong_ou_mandel():
    H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    assert output_distribution(H, [1, 1], "boson").as_dict() == pytest.approx({(2, 0): 0.5, (1, 1): 0.0, (0, 2): 0.5})
    assert output_distribution(H, [1, 1], "fermion")[[1, 1]] == pytest.approx(1.0)
    assert output_distribution(H, [1, 1], "distinguishable")[[1, 1]] == pytest.approx(0.5)


def test_fermion_rejects_multiple_occupation(rng):
    with pytest.raises(ProbabilityError):
        transition_probability(random_unitary(3, rng), [2, 0, 0], [1, 1, 0], "fermion")


def test_mean_is_deterministic_and_thread_independent(monkeypatch):
    p = ModePermutation.parse("(1 2 3)(4 5)")
    r = [1, 1, 1, 0, 0]
    a = mean_distribution_over_random_bases(p, r, None, None, "boson", 8, seed=3)
    monkeypatch.setenv("PERMSYM_THREADS", "3")
    b = mean_distribution_over_random_bases(p, r, None, None, "boson", 8, seed=3)
    assert np.array_equal(a.probabilities, b.probabilities)
    c = mean_distribution_over_random_bases(p, r, None, None, "boson", 8, seed=4)
    assert not np.array_equal(a.probabilities, c.probabilities)


def test_mean_rejects_non_invariant_input():
    with pytest.raises(ProbabilityError):
        mean_distribution_over_random_bases(ModePermutation.parse("(1 2 3)"), [1, 0, 0], None, None, "boson", 2, 0)


def test_sweep_matches_direct():
    p = ModePermutation.parse("(1 2)(3 4)")
    sweep = list(distribution_sweep(p, [1, 1, 0, 0], "fermion", seed=5, samples=2))
    assert [lab for lab, _, _ in sweep] == ["canonical", "seed=5,sample=0", "seed=5,sample=1"]
    _, E, d = sweep[0]
    assert np.allclose(d.probabilities, output_distribution(canonical_eigenbasis(p).basis, [1, 1, 0, 0], "fermion").probabilities)
