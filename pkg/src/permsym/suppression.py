"""Suppression-law predicates and domain classification.

Every predicate here is exact: it depends only on the permutation, the
eigenphase attached to each output mode, and the occupation lists.  No
matrix entries are consulted.

The eigenphase of output mode ``k`` is the eigenvalue of the ``k``-th column
of the eigenbasis.  It depends on the column order of that basis, so the
laws take a :class:`Symmetry`, which pairs a permutation with the eigenphase
of each column.  Passing a bare :class:`ModePermutation` uses its canonical
eigenbasis.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .events import OccupationList, as_occupation, occupation_to_assignment
from .permutations import (
    EigenbasisRealization,
    EigenPhase,
    EigenvalueMultiset,
    ModePermutation,
    PermutationError,
    canonical_eigenbasis,
    induced_transposition_parity,
    is_invariant,
    permutation_eigenphases,
)


class LawError(ValueError):
    pass


class Statistics(str, Enum):
    BOSON = "boson"
    FERMION = "fermion"
    DISTINGUISHABLE = "distinguishable"

    @classmethod
    def parse(cls, value) -> "Statistics":
        if isinstance(value, Statistics):
            return value
        aliases = {"b": "boson", "f": "fermion", "d": "distinguishable", "bosons": "boson", "fermions": "fermion"}
        value = str(value).lower()
        return cls(aliases.get(value, value))


@dataclass(frozen=True)
class Symmetry:
    """A permutation together with the eigenphase carried by each output mode."""

    permutation: ModePermutation
    phases: tuple[EigenPhase, ...]

    def __post_init__(self):
        if len(self.phases) != self.permutation.n:
            raise LawError("need one eigenphase per mode")
        if EigenvalueMultiset(self.phases) != permutation_eigenphases(self.permutation):
            raise LawError("eigenphases do not match the spectrum of the permutation")

    @classmethod
    def canonical(cls, p: ModePermutation) -> "Symmetry":
        return cls(p, canonical_eigenbasis(p).phases)

    @classmethod
    def from_realization(cls, E: EigenbasisRealization) -> "Symmetry":
        return cls(E.permutation, E.phases)

    @classmethod
    def from_witness(cls, witness) -> "Symmetry":
        if not witness.ok:
            raise LawError(f"no symmetric phase relation: {witness.reason}")
        return cls(witness.permutation, witness.eigenphases)

    @property
    def n(self) -> int:
        return self.permutation.n


def as_symmetry(sym) -> Symmetry:
    if isinstance(sym, Symmetry):
        return sym
    if isinstance(sym, ModePermutation):
        return Symmetry.canonical(sym)
    if isinstance(sym, EigenbasisRealization):
        return Symmetry.from_realization(sym)
    raise TypeError(f"cannot interpret {type(sym).__name__} as a symmetry")


def final_eigenvalue_distribution(sym, s) -> EigenvalueMultiset:
    sym = as_symmetry(sym)
    s = as_occupation(s, sym.n)
    return EigenvalueMultiset(sym.phases[d - 1] for d in occupation_to_assignment(s))


def _invariant(sym: Symmetry, r) -> OccupationList:
    r = as_occupation(r, sym.n)
    if not is_invariant(r, sym.permutation):
        raise LawError(f"input {r} is not invariant under {sym.permutation}")
    return r


def _single_occupancy(r: OccupationList) -> None:
    if not r.is_single_occupancy:
        raise LawError(f"fermionic input must be singly occupied: {r}")


def cycle_populations(sym, r) -> dict[int, int]:
    """``N_l``: particles initially in cycles of length ``m_l``, keyed by ``m_l``."""
    sym = as_symmetry(sym)
    r = _invariant(sym, r)
    out: Counter = Counter()
    for cyc in sym.permutation.cycles:
        out[len(cyc)] += sum(r[j] for j in cyc)
    return {m: out[m] for m in sorted(out)}


def initial_eigenvalue_distribution(sym, r) -> EigenvalueMultiset:
    """Multiset sum of all ``m``-th roots of unity over occupied cycles of length ``m``."""
    sym = as_symmetry(sym)
    r = _invariant(sym, r)
    _single_occupancy(r)
    out = EigenvalueMultiset()
    for cyc in sym.permutation.cycles:
        if r[cyc[0]]:
            m = len(cyc)
            out.update(EigenPhase(k, m) for k in range(m))
    return out


def single_particle_forbidden(sym, r, s) -> bool:
    """True iff fewer output eigenvalues satisfy ``lam**m_l == 1`` than there are particles in length-``m_l`` cycles."""
    sym = as_symmetry(sym)
    final = final_eigenvalue_distribution(sym, s)
    return any(final.count_roots(m) < N_l for m, N_l in cycle_populations(sym, r).items())


def boson_law_suppressed(sym, s) -> bool:
    return final_eigenvalue_distribution(sym, s).product() != EigenPhase(0)


def parity_phase(sym, r) -> EigenPhase:
    """``(-1)**w`` for the exchange count of the input, as a phase (0 or 1/2)."""
    sym = as_symmetry(sym)
    r = _invariant(sym, r)
    try:
        sign = induced_transposition_parity(r, sym.permutation)
    except PermutationError as exc:
        raise LawError(str(exc)) from None
    return EigenPhase(0) if sign == 1 else EigenPhase(1, 2)


def fermion_adapted_suppressed(sym, r, s) -> bool:
    sym = as_symmetry(sym)
    r = _invariant(sym, r)
    _single_occupancy(r)
    return final_eigenvalue_distribution(sym, s).product() != parity_phase(sym, r)


def fermion_extended_suppressed(sym, r, s) -> bool:
    sym = as_symmetry(sym)
    return final_eigenvalue_distribution(sym, s) != initial_eigenvalue_distribution(sym, r)


def pure_state_law_suppressed(phi, sym, s) -> bool:
    """True iff the product of output eigenvalues differs from ``exp(i phi)``; ``phi`` in turns."""
    return final_eigenvalue_distribution(sym, s).product() != EigenPhase.of(phi)


@dataclass(frozen=True)
class LawVerdict:
    event: OccupationList
    statistics: Statistics
    single_particle_forbidden: bool
    boson_suppressed: bool | None = None
    fermion_adapted_suppressed: bool | None = None
    fermion_extended_suppressed: bool | None = None
    pure_state_suppressed: bool | None = None
    domain: str = ""

    @property
    def law_predicted(self) -> bool:
        flags = (
            self.single_particle_forbidden,
            self.boson_suppressed,
            self.fermion_adapted_suppressed,
            self.fermion_extended_suppressed,
            self.pure_state_suppressed,
        )
        return any(bool(f) for f in flags)


def classify_event(sym, r, s, stat) -> LawVerdict:
    """Assign the event to a domain.

    Bosons: I single-particle only, II single-particle and boson law,
    III boson law only, IV neither.  Fermions: I single-particle only,
    II single-particle and adapted law, III adapted law, IV extended law
    only, V none.  Distinguishable particles: I single-particle, IV otherwise.
    """
    sym = as_symmetry(sym)
    stat = Statistics.parse(stat)
    s = as_occupation(s, sym.n)
    spf = single_particle_forbidden(sym, r, s)
    if stat is Statistics.BOSON:
        bl = boson_law_suppressed(sym, s)
        domain = ("II" if bl else "I") if spf else ("III" if bl else "IV")
        return LawVerdict(s, stat, spf, boson_suppressed=bl, domain=domain)
    if stat is Statistics.FERMION:
        if not s.is_single_occupancy:
            raise LawError(f"fermionic output must be singly occupied: {s}")
        adapted = fermion_adapted_suppressed(sym, r, s)
        extended = fermion_extended_suppressed(sym, r, s)
        if adapted and not extended:
            raise AssertionError(f"adapted law fired without the extended law for {s}")
        if spf and not extended:
            raise AssertionError(f"single-particle forbidden event {s} not covered by the extended law")
        if spf:
            domain = "II" if adapted else "I"
        elif adapted:
            domain = "III"
        elif extended:
            domain = "IV"
        else:
            domain = "V"
        return LawVerdict(
            s, stat, spf, fermion_adapted_suppressed=adapted, fermion_extended_suppressed=extended, domain=domain
        )
    return LawVerdict(s, stat, spf, domain="I" if spf else "IV")


def fourier_sum_residue(s, chi: int) -> int:
    """``mod[chi * sum_a d_a(s), n]``, the classic Fourier criterion."""
    s = as_occupation(s)
    return (chi * sum(occupation_to_assignment(s))) % s.n


def walsh_product(s, pvec: Sequence[int]) -> int:
    from .catalog import walsh

    s = as_occupation(s)
    out = 1
    for d in occupation_to_assignment(s):
        out *= walsh(d, pvec, s.n)
    return out
