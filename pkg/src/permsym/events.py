"""Occupation lists, assignment lists and enumeration of output events."""
from __future__ import annotations

from itertools import combinations, combinations_with_replacement
from math import comb, factorial, prod
from typing import Iterator, Sequence


class EventError(ValueError):
    pass


class OccupationList(tuple):
    """Per-mode particle counts ``(r_1, ..., r_n)``."""

    def __new__(cls, occupations: Sequence[int] = ()):
        occ = tuple(int(x) for x in occupations)
        if len(occ) == 0:
            raise EventError("occupation list needs at least one mode")
        if any(x < 0 for x in occ):
            raise EventError(f"negative occupation in {occ}")
        return super().__new__(cls, occ)

    @property
    def n(self) -> int:
        return len(self)

    @property
    def N(self) -> int:
        return sum(self)

    @property
    def is_single_occupancy(self) -> bool:
        return all(x <= 1 for x in self)

    def factorial_product(self) -> int:
        return prod(factorial(x) for x in self)

    def assignment(self) -> "AssignmentList":
        return occupation_to_assignment(self)

    def __str__(self):
        return ",".join(map(str, self))

    def __repr__(self):
        return f"OccupationList({tuple(self)})"

    @classmethod
    def parse(cls, text: str) -> "OccupationList":
        try:
            return cls(int(x) for x in text.replace(" ", "").strip("()").split(",") if x != "")
        except ValueError as exc:
            raise EventError(f"cannot parse occupation list {text!r}") from exc


class AssignmentList(tuple):
    """Sorted 1-based mode of each particle, ``(d_1, ..., d_N)``."""

    def __new__(cls, modes: Sequence[int] = ()):
        modes = tuple(int(x) for x in modes)
        if any(a > b for a, b in zip(modes, modes[1:])):
            raise EventError(f"assignment list must be ascending: {modes}")
        if any(x < 1 for x in modes):
            raise EventError(f"modes are 1-based: {modes}")
        return super().__new__(cls, modes)

    def __str__(self):
        return "(" + ",".join(map(str, self)) + ")"

    def __repr__(self):
        return f"AssignmentList({tuple(self)})"


def as_occupation(r, n: int | None = None) -> OccupationList:
    r = r if isinstance(r, OccupationList) else OccupationList(r)
    if n is not None and r.n != n:
        raise EventError(f"occupation list has {r.n} modes, expected {n}")
    return r


def occupation_to_assignment(r) -> AssignmentList:
    r = as_occupation(r)
    return AssignmentList(j + 1 for j, rj in enumerate(r) for _ in range(rj))


def assignment_to_occupation(d: Sequence[int], n: int) -> OccupationList:
    occ = [0] * n
    for mode in d:
        if not 1 <= mode <= n:
            raise EventError(f"mode {mode} outside 1..{n}")
        occ[mode - 1] += 1
    return OccupationList(occ)


def from_assignment(d: Sequence[int], n: int) -> OccupationList:
    return assignment_to_occupation(sorted(d), n)


def enumerate_bosonic_outputs(n: int, N: int) -> Iterator[OccupationList]:
    """All occupations of ``N`` particles in ``n`` modes, lexicographically descending in ``r``.

    Equivalently the assignment lists come out in ascending lexicographic order.
    """
    if n < 1 or N < 0:
        raise EventError("need n >= 1 and N >= 0")
    for d in combinations_with_replacement(range(1, n + 1), N):
        yield assignment_to_occupation(d, n)


def enumerate_fermionic_outputs(n: int, N: int) -> Iterator[OccupationList]:
    if n < 1 or not 0 <= N <= n:
        raise EventError(f"need 0 <= N <= n, got N={N}, n={n}")
    for d in combinations(range(1, n + 1), N):
        yield assignment_to_occupation(d, n)


def count_bosonic_outputs(n: int, N: int) -> int:
    return comb(n + N - 1, N)


def count_fermionic_outputs(n: int, N: int) -> int:
    return comb(n, N)
