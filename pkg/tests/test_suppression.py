import pytest
from hypothesis import given, strategies as st

from permsym.catalog import fourier_cyclic_shift, fourier_unitary, verify_symmetric_phase_relation
from permsym.events import assignment_to_occupation, enumerate_bosonic_outputs, enumerate_fermionic_outputs
from permsym.permutations import EigenPhase, EigenvalueMultiset, ModePermutation
from permsym.suppression import (
    LawError,
    Statistics,
    Symmetry,
    boson_law_suppressed,
    classify_event,
    cycle_populations,
    fermion_adapted_suppressed,
    fermion_extended_suppressed,
    final_eigenvalue_distribution,
    initial_eigenvalue_distribution,
    parity_phase,
    single_particle_forbidden,
)

SWEEP_PERM = ModePermutation.parse("(1 2 3)(4 5 6)(7 8 9)(10 11)")
SWEEP_INPUT = [1, 1, 1, 0, 0, 0, 0, 0, 0, 1, 1]


def test_statistics_parse():
    assert Statistics.parse("F") is Statistics.FERMION
    assert Statistics.parse("bosons") is Statistics.BOSON
    with pytest.raises(ValueError):
        Statistics.parse("anyon")


def test_symmetry_validates_spectrum():
    p = ModePermutation.parse("(1 2)")
    with pytest.raises(LawError):
        Symmetry(p, (EigenPhase(0), EigenPhase(0)))
    assert Symmetry(p, (EigenPhase(1, 2), EigenPhase(0))).n == 2


def test_distributions_on_eleven_mode_setting():
    assert cycle_populations(SWEEP_PERM, SWEEP_INPUT) == {2: 2, 3: 3}
    ini = initial_eigenvalue_distribution(SWEEP_PERM, SWEEP_INPUT)
    assert ini == EigenvalueMultiset([EigenPhase(0), EigenPhase(1, 3), EigenPhase(2, 3), EigenPhase(0), EigenPhase(1, 2)])
    with pytest.raises(LawError):
        initial_eigenvalue_distribution(SWEEP_PERM, [1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0])


def test_fourier_worked_example():
    n, chi = 12, 3
    sym = Symmetry.from_witness(verify_symmetric_phase_relation(fourier_unitary(n), fourier_cyclic_shift(n, chi)))
    r = assignment_to_occupation([1, 4, 7, 10], n)
    s = assignment_to_occupation([1, 2, 5, 6], n)
    q = [EigenPhase(k, 4) for k in range(4)]
    assert initial_eigenvalue_distribution(sym, r) == EigenvalueMultiset(q)
    assert final_eigenvalue_distribution(sym, s) == EigenvalueMultiset([q[0], q[1], q[0], q[1]])
    assert parity_phase(sym, r) == EigenPhase(1, 2)
    assert not fermion_adapted_suppressed(sym, r, s)
    assert fermion_extended_suppressed(sym, r, s)


@pytest.mark.parametrize("stat", ["boson", "fermion"])
def test_domain_invariants(stat):
    outputs = enumerate_bosonic_outputs(11, 5) if stat == "boson" else enumerate_fermionic_outputs(11, 5)
    domains = {}
    for s in outputs:
        v = classify_event(SWEEP_PERM, SWEEP_INPUT, s, stat)
        domains[v.domain] = domains.get(v.domain, 0) + 1
        assert v.law_predicted == (v.domain not in ("IV", "V") if stat == "boson" else v.domain != "V")
        if stat == "fermion" and v.fermion_adapted_suppressed:
            assert v.fermion_extended_suppressed
    expected = {"I", "II", "III", "IV"} | ({"V"} if stat == "fermion" else set())
    assert set(domains) == expected


def test_boson_law_is_product_of_eigenvalues():
    p = ModePermutation.parse("(1 2)(3 4)")
    # canonical eigenphases: (0, 1/2, 0, 1/2)
    assert boson_law_suppressed(p, [0, 1, 0, 0])
    assert not boson_law_suppressed(p, [0, 1, 0, 1])
    assert not boson_law_suppressed(p, [2, 0, 0, 0])


@given(st.lists(st.integers(0, 2), min_size=5, max_size=5))
def test_single_particle_forbidden_needs_enough_roots(s):
    p = ModePermutation.parse("(1 2)", 5)  # cycle lengths 2,1,1,1
    r = [0, 0, 1, 0, 0]
    if sum(s) != 1:
        return
    # one particle in a fixed point needs an output eigenvalue equal to 1
    assert single_particle_forbidden(p, r, s) == (s[1] == 1)


def test_identity_flags_nothing():
    p = ModePermutation.identity(4)
    for s in enumerate_fermionic_outputs(4, 2):
        assert not classify_event(p, [1, 1, 0, 0], s, "fermion").law_predicted
    for s in enumerate_bosonic_outputs(4, 2):
        assert not classify_event(p, [1, 1, 0, 0], s, "boson").law_predicted
