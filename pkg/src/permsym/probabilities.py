"""Exact transition probabilities and full output distributions."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import factorial, prod

import numpy as np

from . import kernels
from .catalog import compose
from .events import (
    OccupationList,
    as_occupation,
    enumerate_bosonic_outputs,
    enumerate_fermionic_outputs,
    occupation_to_assignment,
)
from .linalg import MatrixError, as_unitary, determinant, permanent, permanent_of_squared_moduli, scattering_matrix
from .permutations import ModePermutation, is_invariant, randomized_eigenbasis
from .suppression import Statistics

TAU_SUM = 1e-9
ZERO_REPORT = 1e-20


class ProbabilityError(ValueError):
    pass


def _check_fermion(occ: OccupationList, what: str) -> None:
    if not occ.is_single_occupancy:
        raise ProbabilityError(f"fermionic {what} must be singly occupied: {occ}")


def _clamp(p: float) -> float:
    return min(max(float(p), 0.0), 1.0 + TAU_SUM)


def transition_probability(U, r, s, stat) -> float:
    stat = Statistics.parse(stat)
    U = as_unitary(U)
    r = as_occupation(r, U.shape[0])
    s = as_occupation(s, U.shape[0])
    try:
        M = scattering_matrix(U, r, s)
    except MatrixError as exc:
        raise ProbabilityError(str(exc)) from None
    if stat is Statistics.BOSON:
        p = abs(permanent(M)) ** 2 / (r.factorial_product() * s.factorial_product())
    elif stat is Statistics.FERMION:
        _check_fermion(r, "input")
        _check_fermion(s, "output")
        p = abs(determinant(M)) ** 2
    else:
        p = permanent_of_squared_moduli(M) / s.factorial_product()
    return _clamp(p)


def enumerate_outputs(n: int, N: int, stat) -> list[OccupationList]:
    stat = Statistics.parse(stat)
    if stat is Statistics.FERMION:
        return list(enumerate_fermionic_outputs(n, N))
    return list(enumerate_bosonic_outputs(n, N))


@dataclass
class OutputDistribution:
    statistics: Statistics
    input: OccupationList
    unitary_id: str
    events: list[OccupationList] = field(repr=False)
    probabilities: np.ndarray = field(repr=False)
    metadata: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.events)

    def total(self) -> float:
        return float(np.sum(self.probabilities))

    def check_normalized(self, tol: float = TAU_SUM) -> None:
        if abs(self.total() - 1.0) > tol:
            raise ProbabilityError(f"distribution sums to {self.total():.12f}")

    def as_dict(self) -> dict[OccupationList, float]:
        return dict(zip(self.events, self.probabilities.tolist()))

    def __getitem__(self, s) -> float:
        s = as_occupation(s)
        return float(self.probabilities[self._index()[s]])

    def _index(self) -> dict:
        if "_index" not in self.__dict__:
            self.__dict__["_index"] = {e: i for i, e in enumerate(self.events)}
        return self.__dict__["_index"]

    def numerically_zero(self) -> np.ndarray:
        return self.probabilities < ZERO_REPORT


class _DistributionPlan:
    """Precomputed index arrays for all events of one ``(n, r, stat)`` sweep."""

    def __init__(self, n: int, r: OccupationList, stat: Statistics):
        self.n, self.r, self.stat = n, r, stat
        if stat is Statistics.FERMION:
            _check_fermion(r, "input")
        self.events = enumerate_outputs(n, r.N, stat)
        self.rows = np.array(occupation_to_assignment(r), dtype=int) - 1
        self.cols = np.array([occupation_to_assignment(s) for s in self.events], dtype=int).reshape(
            len(self.events), r.N
        ) - 1
        s_fact = np.array([s.factorial_product() for s in self.events], dtype=float)
        if stat is Statistics.BOSON:
            self.norm = s_fact * r.factorial_product()
        elif stat is Statistics.DISTINGUISHABLE:
            self.norm = s_fact
        else:
            self.norm = np.ones(len(self.events))

    def evaluate(self, U: np.ndarray) -> np.ndarray:
        N = self.r.N
        if N == 0:
            return np.ones(len(self.events))
        # M[e, a, b] = U[rows[a], cols[e, b]]
        M = U[self.rows[None, :, None], self.cols[:, None, :]]
        if self.stat is Statistics.BOSON:
            vals = np.abs(kernels.permanent_batch(M)) ** 2
        elif self.stat is Statistics.FERMION:
            vals = np.abs(np.linalg.det(M)) ** 2
        else:
            vals = kernels.permanent_nonneg_batch(np.abs(M) ** 2)
        return np.clip(vals / self.norm, 0.0, 1.0 + TAU_SUM)


def output_distribution(U, r, stat, unitary_id: str = "", metadata: dict | None = None) -> OutputDistribution:
    stat = Statistics.parse(stat)
    U = as_unitary(U)
    r = as_occupation(r, U.shape[0])
    plan = _DistributionPlan(U.shape[0], r, stat)
    meta = {"tau_sum": TAU_SUM, "zero_report": ZERO_REPORT, **(metadata or {})}
    dist = OutputDistribution(stat, r, unitary_id, plan.events, plan.evaluate(U), meta)
    dist.check_normalized()
    return dist


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("PERMSYM_THREADS", "1")))
    except ValueError:
        return 1


def mean_distribution_over_random_bases(
    p: ModePermutation, r, theta, sigma, stat, samples: int, seed: int, include_canonical: bool = False
) -> OutputDistribution:
    """Mean over ``samples`` randomized eigenbases (sample ``i`` uses substream ``(seed, i)``).

    The running sum is accumulated in sample order, so the result does not
    depend on the thread count.
    """
    stat = Statistics.parse(stat)
    r = as_occupation(r, p.n)
    if not is_invariant(r, p):
        raise ProbabilityError(f"input {r} is not invariant under {p}")
    if samples < 1:
        raise ProbabilityError("need at least one sample")
    plan = _DistributionPlan(p.n, r, stat)

    def one(i: int) -> np.ndarray:
        E = randomized_eigenbasis(p, seed, i)
        return plan.evaluate(compose(theta, E, sigma))

    total = np.zeros(len(plan.events))
    count = 0
    if include_canonical:
        from .permutations import canonical_eigenbasis

        total += plan.evaluate(compose(theta, canonical_eigenbasis(p), sigma))
        count += 1
    workers = thread_count()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            for vals in pool.map(one, range(samples)):
                total += vals
                count += 1
    else:
        for i in range(samples):
            total += one(i)
            count += 1
    meta = {
        "permutation": str(p),
        "samples": samples,
        "seed": seed,
        "include_canonical": include_canonical,
        "tau_sum": TAU_SUM,
        "zero_report": ZERO_REPORT,
    }
    dist = OutputDistribution(stat, r, f"mean-eigenbasis:perm={p},seed={seed}", plan.events, total / count, meta)
    dist.check_normalized()
    return dist


def distribution_sweep(p: ModePermutation, r, stat, seed=None, samples: int = 0, theta=None, sigma=None, include_canonical=True):
    """Yield ``(label, E, distribution)`` for the canonical basis and ``samples`` randomized ones.

    Randomized basis ``i`` uses substream ``(seed, i)``, matching
    :func:`mean_distribution_over_random_bases`.
    """
    from .permutations import canonical_eigenbasis

    stat = Statistics.parse(stat)
    r = as_occupation(r, p.n)
    if samples and seed is None:
        raise ProbabilityError("randomized bases need a seed")
    plan = _DistributionPlan(p.n, r, stat)
    if include_canonical:
        E = canonical_eigenbasis(p)
        yield "canonical", E, OutputDistribution(stat, r, "canonical", plan.events, plan.evaluate(compose(theta, E, sigma)))
    for i in range(samples):
        E = randomized_eigenbasis(p, seed, i)
        label = f"seed={seed},sample={i}"
        yield label, E, OutputDistribution(stat, r, label, plan.events, plan.evaluate(compose(theta, E, sigma)))


def factorial_product(occ) -> int:
    return prod(factorial(x) for x in occ)
