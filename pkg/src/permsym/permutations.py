"""Mode permutations, exact eigenphases and permutation eigenbases.

Modes are 1-based in every user-facing representation (cycle strings,
one-line notation, assignment lists) and 0-based internally.

The permutation operator acts as ``P[j, k] = delta(pi(j), k)``, so
``(P @ v)[j] = v[pi(j)]``.  An eigenbasis ``A`` of ``P`` satisfies
``A[pi(j), k] = lambda_k * A[j, k]``.
"""
from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from typing import Iterable, Sequence

import numpy as np

from .events import OccupationList, as_occupation, occupation_to_assignment

TAU_MAT = 1e-10


class PermutationError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class EigenPhase:
    """Eigenvalue ``exp(2 pi i p/q)`` stored as the reduced fraction ``p/q`` in [0, 1)."""

    numerator: int
    denominator: int = 1

    def __post_init__(self):
        frac = Fraction(self.numerator, self.denominator) % 1
        object.__setattr__(self, "numerator", frac.numerator)
        object.__setattr__(self, "denominator", frac.denominator)

    @classmethod
    def of(cls, value) -> "EigenPhase":
        if isinstance(value, EigenPhase):
            return value
        frac = Fraction(value)
        return cls(frac.numerator, frac.denominator)

    @classmethod
    def from_angle(cls, angle: float, max_denominator: int, tol: float = TAU_MAT) -> "EigenPhase | None":
        """Round ``angle`` (radians) to a rational phase, or ``None`` if not close enough."""
        turns = (angle / (2 * math.pi)) % 1.0
        frac = Fraction(turns).limit_denominator(max_denominator)
        if abs(np.exp(2j * math.pi * float(frac)) - np.exp(1j * angle)) > tol:
            return None
        return cls(frac.numerator, frac.denominator)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def __add__(self, other) -> "EigenPhase":
        return EigenPhase.of(self.fraction + EigenPhase.of(other).fraction)

    __radd__ = __add__

    def __neg__(self) -> "EigenPhase":
        return EigenPhase.of(-self.fraction)

    def __sub__(self, other) -> "EigenPhase":
        return self + (-EigenPhase.of(other))

    def __mul__(self, k: int) -> "EigenPhase":
        # the phase of lambda**k
        return EigenPhase.of(self.fraction * k)

    __rmul__ = __mul__

    def is_root_of_unity(self, m: int) -> bool:
        """True iff ``lambda**m == 1``."""
        return (m * self.numerator) % self.denominator == 0

    @property
    def angle(self) -> float:
        return 2 * math.pi * self.numerator / self.denominator

    def to_complex(self) -> complex:
        return complex(np.exp(1j * self.angle))

    def __str__(self):
        return "0" if self.numerator == 0 else f"{self.numerator}/{self.denominator}"

    def __repr__(self):
        return f"EigenPhase({self})"


class EigenvalueMultiset(Counter):
    """Multiset of eigenphases.  Equality is exact."""

    def __init__(self, phases: Iterable = ()):
        super().__init__(EigenPhase.of(p) for p in phases)

    @property
    def size(self) -> int:
        return sum(self.values())

    def product(self) -> EigenPhase:
        """Phase of the product of all eigenvalues."""
        return sum((ph * k for ph, k in self.items()), EigenPhase(0))

    def count_roots(self, m: int) -> int:
        """Number of elements ``lam`` (with multiplicity) such that ``lam**m == 1``."""
        return sum(k for ph, k in self.items() if ph.is_root_of_unity(m))

    def multiset_sum(self, other: "EigenvalueMultiset") -> "EigenvalueMultiset":
        out = EigenvalueMultiset()
        out.update(self)
        out.update(other)
        return out

    def sorted(self) -> list[EigenPhase]:
        return sorted(self.elements())

    def __eq__(self, other):
        if not isinstance(other, Counter):
            return NotImplemented
        return {k: v for k, v in self.items() if v} == {k: v for k, v in other.items() if v}

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    __hash__ = None

    def __repr__(self):
        return "{" + ", ".join(str(p) for p in self.sorted()) + "}"


@dataclass(frozen=True)
class ModePermutation:
    """Bijection on ``n`` modes, stored 0-based in one-line notation."""

    images: tuple[int, ...]

    def __post_init__(self):
        images = tuple(int(i) for i in self.images)
        n = len(images)
        if n == 0 or sorted(images) != list(range(n)):
            raise PermutationError(f"not a permutation of 0..{n - 1}: {images}")
        object.__setattr__(self, "images", images)

    @classmethod
    def identity(cls, n: int) -> "ModePermutation":
        return cls(tuple(range(n)))

    @classmethod
    def from_one_line(cls, images: Sequence[int]) -> "ModePermutation":
        """From 1-based one-line notation ``(pi(1), ..., pi(n))``."""
        return cls(tuple(int(i) - 1 for i in images))

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], n: int | None = None) -> "ModePermutation":
        """From 1-based cycles; modes not mentioned are fixed points."""
        cycles = [list(c) for c in cycles]
        mentioned = [j for c in cycles for j in c]
        if len(set(mentioned)) != len(mentioned):
            raise PermutationError("cycles are not disjoint")
        if n is None:
            n = max(mentioned, default=0)
        if any(j < 1 or j > n for j in mentioned):
            raise PermutationError(f"cycle entry outside 1..{n}")
        images = list(range(n))
        for c in cycles:
            for a, b in zip(c, c[1:] + c[:1]):
                images[a - 1] = b - 1
        return cls(tuple(images))

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> "ModePermutation":
        """Parse cycle notation ``"(1 2 3)(4 5)"`` or one-line ``"2,3,1,5,4"``."""
        text = text.strip()
        if text.startswith("("):
            groups = re.findall(r"\(([^()]*)\)", text)
            if "".join(f"({g})" for g in groups).replace(" ", "") != text.replace(" ", ""):
                raise PermutationError(f"malformed cycle notation: {text!r}")
            cycles = [[int(x) for x in re.split(r"[\s,]+", g.strip()) if x] for g in groups]
            return cls.from_cycles(cycles, n)
        try:
            images = [int(x) for x in re.split(r"[\s,]+", text) if x]
        except ValueError as exc:
            raise PermutationError(f"cannot parse permutation {text!r}") from exc
        perm = cls.from_one_line(images)
        if n is not None and perm.n != n:
            raise PermutationError(f"permutation acts on {perm.n} modes, expected {n}")
        return perm

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, j: int) -> int:
        """Image of the 0-based mode ``j``."""
        return self.images[j]

    @cached_property
    def cycles(self) -> tuple[tuple[int, ...], ...]:
        """0-based cycles, sorted by smallest mode; each starts at its smallest mode."""
        seen = [False] * self.n
        out = []
        for start in range(self.n):
            if seen[start]:
                continue
            cyc = []
            j = start
            while not seen[j]:
                seen[j] = True
                cyc.append(j)
                j = self.images[j]
            out.append(tuple(cyc))
        return tuple(out)

    @cached_property
    def cycle_of_mode(self) -> tuple[int, ...]:
        lookup = [0] * self.n
        for c, cyc in enumerate(self.cycles):
            for j in cyc:
                lookup[j] = c
        return tuple(lookup)

    @property
    def cycle_lengths(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.cycles)

    @property
    def distinct_cycle_lengths(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.cycle_lengths)))

    @property
    def order(self) -> int:
        return reduce(math.lcm, self.cycle_lengths, 1)

    def inverse(self) -> "ModePermutation":
        inv = [0] * self.n
        for j, i in enumerate(self.images):
            inv[i] = j
        return ModePermutation(tuple(inv))

    def compose(self, other: "ModePermutation") -> "ModePermutation":
        """``self after other``: j -> self(other(j))."""
        if other.n != self.n:
            raise PermutationError("size mismatch")
        return ModePermutation(tuple(self.images[other.images[j]] for j in range(self.n)))

    def power(self, k: int) -> "ModePermutation":
        k %= self.order
        out = ModePermutation.identity(self.n)
        for _ in range(k):
            out = self.compose(out)
        return out

    def is_identity(self) -> bool:
        return all(i == j for j, i in enumerate(self.images))

    def matrix(self) -> np.ndarray:
        P = np.zeros((self.n, self.n))
        P[np.arange(self.n), self.images] = 1.0
        return P

    def apply(self, r) -> OccupationList:
        """``(P r)_j = r_{pi(j)}``."""
        r = as_occupation(r, self.n)
        return OccupationList(tuple(r[self.images[j]] for j in range(self.n)))

    def move_particles(self, r) -> OccupationList:
        """Occupation after every particle in mode ``j`` moves to ``pi(j)``."""
        r = as_occupation(r, self.n)
        out = [0] * self.n
        for j, rj in enumerate(r):
            out[self.images[j]] = rj
        return OccupationList(tuple(out))

    def to_cycle_string(self, include_fixed: bool = False) -> str:
        parts = [c for c in self.cycles if include_fixed or len(c) > 1]
        if not parts:
            return "()"
        return "".join("(" + " ".join(str(j + 1) for j in c) + ")" for c in parts)

    def __str__(self):
        return self.to_cycle_string()


def cycle_decomposition(p: ModePermutation) -> list[tuple[int, ...]]:
    """1-based cycles in the canonical order of :attr:`ModePermutation.cycles`."""
    return [tuple(j + 1 for j in c) for c in p.cycles]


def permutation_eigenphases(p: ModePermutation) -> EigenvalueMultiset:
    return EigenvalueMultiset(
        EigenPhase(k, m) for m in p.cycle_lengths for k in range(m)
    )


def is_invariant(r, p: ModePermutation) -> bool:
    r = as_occupation(r, p.n)
    return all(r[p(j)] == r[j] for j in range(p.n))


def _require_invariant(r, p: ModePermutation) -> OccupationList:
    r = as_occupation(r, p.n)
    if not is_invariant(r, p):
        raise PermutationError(f"occupation {r} is not invariant under {p}")
    return r


def induced_particle_permutation(r, p: ModePermutation) -> list[int]:
    """Permutation of particle indices induced by moving each particle from ``d_a`` to ``pi(d_a)``.

    Particles sharing a mode are matched in order.
    """
    r = _require_invariant(r, p)
    d = occupation_to_assignment(r)
    slots: dict[int, list[int]] = {}
    for a, mode in enumerate(d):
        slots.setdefault(mode, []).append(a)
    used = {mode: 0 for mode in slots}
    sigma = []
    for mode in d:
        target = p(mode - 1) + 1
        sigma.append(slots[target][used[target]])
        used[target] += 1
    return sigma


def induced_transposition_parity(r, p: ModePermutation) -> int:
    """``(-1)**w`` with ``w`` the number of particle exchanges realising ``p`` on ``r``."""
    sigma = induced_particle_permutation(r, p)
    seen = [False] * len(sigma)
    transpositions = 0
    for start in range(len(sigma)):
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = sigma[j]
            length += 1
        if length:
            transpositions += length - 1
    return -1 if transpositions % 2 else 1


@dataclass(frozen=True)
class EigenbasisRealization:
    """Unitary whose columns are eigenvectors of ``P``, with the phase of each column."""

    permutation: ModePermutation
    basis: np.ndarray = field(repr=False)
    phases: tuple[EigenPhase, ...]
    provenance: str = "canonical"
    seed: int | None = None

    def eigenvalues(self) -> np.ndarray:
        return np.array([ph.to_complex() for ph in self.phases])

    def residuals(self) -> tuple[float, float]:
        """(eigen-equation residual, unitarity residual), max-norm."""
        A = self.basis
        P = self.permutation.matrix()
        eig = np.max(np.abs(P @ A - A * self.eigenvalues()[None, :]))
        uni = np.max(np.abs(A.conj().T @ A - np.eye(A.shape[0])))
        return float(eig), float(uni)

    def validate(self, tol: float = TAU_MAT) -> None:
        eig, uni = self.residuals()
        if eig >= tol or uni >= tol:
            raise PermutationError(f"invalid eigenbasis: eigen residual {eig:.2e}, unitarity {uni:.2e}")


def canonical_eigenbasis(p: ModePermutation) -> EigenbasisRealization:
    """Block Fourier eigenbasis: one ``m x m`` Fourier block per cycle.

    Column for phase ``k/m`` on the cycle ``(j_0, j_1 = pi(j_0), ...)`` has
    component ``exp(2 pi i k t/m)/sqrt(m)`` at mode ``j_t``.
    """
    n = p.n
    A = np.zeros((n, n), dtype=complex)
    phases = []
    col = 0
    for cyc in p.cycles:
        m = len(cyc)
        t = np.arange(m)
        for k in range(m):
            A[list(cyc), col] = np.exp(2j * np.pi * k * t / m) / np.sqrt(m)
            phases.append(EigenPhase(k, m))
            col += 1
    return EigenbasisRealization(p, A, tuple(phases))


def haar_unitary(q: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random ``q x q`` unitary: QR of a complex Ginibre matrix, R's diagonal phase-normalised."""
    z = (rng.standard_normal((q, q)) + 1j * rng.standard_normal((q, q))) / np.sqrt(2.0)
    Q, R = np.linalg.qr(z)
    d = np.diagonal(R)
    return Q * (d / np.abs(d))[None, :]


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """PCG64 generator for ``seed``; extra integers select an independent substream."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), *map(int, stream)])))


def randomized_eigenbasis(p: ModePermutation, seed: int, *stream: int) -> EigenbasisRealization:
    """Canonical basis with every degenerate eigenspace rotated by a Haar-random unitary."""
    canon = canonical_eigenbasis(p)
    rng = make_rng(seed, *stream)
    A = canon.basis.copy()
    groups: dict[EigenPhase, list[int]] = {}
    for col, ph in enumerate(canon.phases):
        groups.setdefault(ph, []).append(col)
    for ph in sorted(groups):
        cols = groups[ph]
        A[:, cols] = A[:, cols] @ haar_unitary(len(cols), rng)
    return EigenbasisRealization(p, A, canon.phases, provenance="randomized", seed=int(seed))
