"""Pure states with internal degrees of freedom.

A state is a sum of terms ``c * a+_{j1,I1} a+_{j2,I2} ... |0>``.  Internal
states are integer labels; their overlaps ``<I_a|I_b>`` live only in the Gram
matrix of an :class:`InternalSpace`.  The creation operators obey
``[a_{j,I}, a+_{k,J}]_(+/-) = delta_jk <I|J>``, so two terms overlap through
the permanent (bosons) or determinant (fermions) of their single-particle
overlap matrix.  Because distinct modes are orthogonal that matrix is block
diagonal by mode, which keeps the cost at ``prod_j s_j!`` per pair.

Terms are stored canonically: particles sorted by ``(mode, label)``, with
the reordering sign applied for fermions and Pauli-forbidden terms dropped.
Modes are 0-based internally and 1-based in JSON.
"""
from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import groupby
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .events import OccupationList, as_occupation, enumerate_bosonic_outputs
from .linalg import TAU_MAT, as_unitary
from .permutations import EigenPhase, ModePermutation, is_invariant
from .suppression import Statistics, as_symmetry, pure_state_law_suppressed

TAU_STATE = 1e-10
MAX_EVOLVE_PARTICLES = 6
# coefficients below this are dropped during canonicalisation
_COEF_EPS = 1e-300

Particle = tuple[int, int]
Key = tuple[Particle, ...]


class StateError(ValueError):
    pass


@dataclass(frozen=True)
class InternalSpace:
    gram: np.ndarray = field(repr=False)

    def __post_init__(self):
        g = np.atleast_2d(np.asarray(self.gram, dtype=complex))
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise StateError("Gram matrix must be square")
        if not np.allclose(g, g.conj().T, atol=TAU_MAT):
            raise StateError("Gram matrix must be Hermitian")
        if not np.allclose(np.diag(g), 1.0, atol=TAU_MAT):
            raise StateError("internal states must be normalised")
        if np.min(np.linalg.eigvalsh((g + g.conj().T) / 2)) < -1e-9:
            raise StateError("Gram matrix must be positive semidefinite")
        object.__setattr__(self, "gram", g)

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    @classmethod
    def trivial(cls) -> "InternalSpace":
        return cls(np.eye(1))

    @classmethod
    def orthonormal(cls, dim: int) -> "InternalSpace":
        return cls(np.eye(dim))

    @classmethod
    def two_level(cls, overlap: complex) -> "InternalSpace":
        return cls(np.array([[1.0, overlap], [np.conj(overlap), 1.0]]))


def _sort_with_sign(particles: Sequence[Particle]) -> tuple[Key, int]:
    order = sorted(range(len(particles)), key=lambda i: particles[i])
    seen = [False] * len(order)
    transpositions = 0
    for start in range(len(order)):
        j, length = start, 0
        while not seen[j]:
            seen[j] = True
            j = order[j]
            length += 1
        if length:
            transpositions += length - 1
    return tuple(particles[i] for i in order), (-1 if transpositions % 2 else 1)


def _has_repeat(key: Key) -> bool:
    return any(a == b for a, b in zip(key, key[1:]))


def occupation_of(key: Key, n: int) -> OccupationList:
    occ = [0] * n
    for mode, _ in key:
        occ[mode] += 1
    return OccupationList(occ)


@dataclass(frozen=True)
class PureState:
    statistics: Statistics
    n: int
    internal: InternalSpace
    terms: tuple[tuple[Key, complex], ...]

    @classmethod
    def from_terms(
        cls,
        statistics,
        n: int,
        terms: Iterable[tuple[complex, Sequence[Particle]]],
        internal: InternalSpace | None = None,
        normalize: bool = True,
    ) -> "PureState":
        """Build from ``(coefficient, [(mode0, label), ...])`` pairs, canonicalising."""
        stat = Statistics.parse(statistics)
        if stat is Statistics.DISTINGUISHABLE:
            raise StateError("use orthogonal internal labels to model distinguishable particles")
        internal = internal or InternalSpace.trivial()
        acc: dict[Key, complex] = defaultdict(complex)
        for coef, particles in terms:
            particles = [(int(m), int(l)) for m, l in particles]
            for m, l in particles:
                if not 0 <= m < n:
                    raise StateError(f"mode {m + 1} outside 1..{n}")
                if not 0 <= l < internal.dim:
                    raise StateError(f"internal label {l} outside 0..{internal.dim - 1}")
            key, sign = _sort_with_sign(particles)
            if stat is Statistics.FERMION:
                if _has_repeat(key):
                    continue
                coef = coef * sign
            acc[key] += coef
        state = cls(stat, n, internal, _freeze(acc))
        if normalize:
            state = state.normalized()
        return state

    @property
    def is_fermion(self) -> bool:
        return self.statistics is Statistics.FERMION

    def particle_numbers(self) -> set[int]:
        return {len(k) for k, _ in self.terms}

    def with_internal(self, internal: InternalSpace) -> "PureState":
        return PureState(self.statistics, self.n, internal, self.terms).normalized()

    def inner(self, other: "PureState") -> complex:
        """``<self|other>``."""
        _compatible(self, other)
        left = _by_occupation(self)
        right = _by_occupation(other)
        total = 0j
        for occ, lterms in left.items():
            rterms = right.get(occ)
            if not rterms:
                continue
            for k1, c1 in lterms:
                for k2, c2 in rterms:
                    total += np.conj(c1) * c2 * term_overlap(k1, k2, self.internal, self.is_fermion)
        return complex(total)

    def norm(self) -> float:
        return math.sqrt(max(self.inner(self).real, 0.0))

    def normalized(self) -> "PureState":
        nrm = self.norm()
        if nrm < 1e-14:
            raise StateError("state has zero norm")
        return PureState(self.statistics, self.n, self.internal, tuple((k, c / nrm) for k, c in self.terms))

    def scaled(self, factor: complex) -> "PureState":
        return PureState(self.statistics, self.n, self.internal, tuple((k, c * factor) for k, c in self.terms))

    def __sub__(self, other: "PureState") -> "PureState":
        _compatible(self, other)
        acc: dict[Key, complex] = defaultdict(complex)
        for k, c in self.terms:
            acc[k] += c
        for k, c in other.terms:
            acc[k] -= c
        return PureState(self.statistics, self.n, self.internal, _freeze(acc))

    def permuted(self, p: ModePermutation) -> "PureState":
        """Image under ``a+_{j,I} -> a+_{pi(j),I}``."""
        if p.n != self.n:
            raise StateError("permutation size does not match the number of modes")
        return PureState.from_terms(
            self.statistics,
            self.n,
            ((c, [(p(m), l) for m, l in k]) for k, c in self.terms),
            self.internal,
            normalize=False,
        )

    # serialisation -------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "statistics": self.statistics.value,
            "modes": self.n,
            "gram": [[[float(z.real), float(z.imag)] for z in row] for row in self.internal.gram],
            "terms": [
                {"coefficient": [float(c.real), float(c.imag)], "particles": [[m + 1, l] for m, l in k]}
                for k, c in self.terms
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping | str, normalize: bool = True) -> "PureState":
        if isinstance(data, str):
            data = json.loads(data)
        gram = np.asarray(data.get("gram", [[[1.0, 0.0]]]), dtype=float)
        internal = InternalSpace(gram[..., 0] + 1j * gram[..., 1])
        terms = []
        n = int(data["modes"]) if "modes" in data else 0
        for t in data["terms"]:
            re_, im_ = t.get("coefficient", [1.0, 0.0])
            particles = [(int(m) - 1, int(l)) for m, l in t["particles"]]
            n = max(n, max((m + 1 for m, _ in particles), default=0))
            terms.append((complex(re_, im_), particles))
        return cls.from_terms(data.get("statistics", "boson"), n, terms, internal, normalize)


def _freeze(acc: Mapping[Key, complex]) -> tuple[tuple[Key, complex], ...]:
    return tuple((k, complex(c)) for k, c in sorted(acc.items()) if abs(c) > _COEF_EPS)


def _compatible(a: PureState, b: PureState) -> None:
    if a.statistics is not b.statistics or a.n != b.n:
        raise StateError("states differ in statistics or mode count")
    if a.internal.gram.shape != b.internal.gram.shape or not np.allclose(a.internal.gram, b.internal.gram):
        raise StateError("states use different internal spaces")


def _by_occupation(state: PureState) -> dict[OccupationList, list[tuple[Key, complex]]]:
    out: dict[OccupationList, list] = defaultdict(list)
    for k, c in state.terms:
        out[occupation_of(k, state.n)].append((k, c))
    return out


def term_overlap(k1: Key, k2: Key, internal: InternalSpace, fermion: bool) -> complex:
    """``<0| ... a_{k1} a+_{k2} ... |0>`` for canonical keys, block by block per mode."""
    if len(k1) != len(k2):
        return 0j
    g = internal.gram
    total = 1 + 0j
    blocks1 = {m: [l for _, l in grp] for m, grp in groupby(k1, key=lambda x: x[0])}
    blocks2 = {m: [l for _, l in grp] for m, grp in groupby(k2, key=lambda x: x[0])}
    if blocks1.keys() != blocks2.keys():
        return 0j
    for m, labels1 in blocks1.items():
        labels2 = blocks2[m]
        if len(labels1) != len(labels2):
            return 0j
        B = g[np.ix_(labels1, labels2)]
        if len(labels1) == 1:
            val = B[0, 0]
        elif fermion:
            val = np.linalg.det(B)
        else:
            val = kernels.permanent(B)
        total *= val
        if total == 0:
            return 0j
    return total


def evolve(state: PureState, U) -> PureState:
    """Apply ``a+_{j,I} -> sum_k U[j,k] b+_{k,I}`` to every term."""
    U = as_unitary(U)
    if U.shape[0] != state.n:
        raise StateError("unitary size does not match the number of modes")
    if max(state.particle_numbers(), default=0) > MAX_EVOLVE_PARTICLES:
        raise StateError(f"evolution is limited to {MAX_EVOLVE_PARTICLES} particles")
    fermion = state.is_fermion
    support = [np.nonzero(np.abs(U[j]) > 0)[0] for j in range(state.n)]
    out: dict[Key, complex] = defaultdict(complex)
    for key, coef in state.terms:
        current: dict[Key, complex] = {(): coef}
        for mode, label in key:
            nxt: dict[Key, complex] = defaultdict(complex)
            for partial, c in current.items():
                for k in support[mode]:
                    new = (int(k), label)
                    # insert into the sorted key; fermions pick up (-1) per element passed
                    pos = len(partial)
                    while pos > 0 and partial[pos - 1] > new:
                        pos -= 1
                    if fermion:
                        if pos > 0 and partial[pos - 1] == new:
                            continue
                        sign = -1 if (len(partial) - pos) % 2 else 1
                    else:
                        sign = 1
                    nxt[partial[:pos] + (new,) + partial[pos:]] += sign * c * U[mode, k]
            current = nxt
        for k, c in current.items():
            out[k] += c
    return PureState(state.statistics, state.n, state.internal, _freeze(out))


def occupation_distribution(state: PureState) -> dict[OccupationList, float]:
    """Probability of every mode-occupation pattern, marginalised over internal states."""
    norm2 = state.inner(state).real
    if norm2 <= 0:
        raise StateError("state has zero norm")
    out = {}
    fermion = state.is_fermion
    for occ, terms in _by_occupation(state).items():
        val = 0j
        for k1, c1 in terms:
            for k2, c2 in terms:
                val += np.conj(c1) * c2 * term_overlap(k1, k2, state.internal, fermion)
        out[occ] = float(max(val.real, 0.0) / norm2)
    return out


def mode_occupation_probability(state: PureState, s) -> float:
    s = as_occupation(s, state.n)
    if s.N not in state.particle_numbers():
        return 0.0
    return occupation_distribution(state).get(s, 0.0)


def detect_permutation_phase(state: PureState, p: ModePermutation, tol: float = TAU_STATE) -> EigenPhase | None:
    """Rational ``phi`` (in turns) with ``P state = exp(2 pi i phi) state``, or ``None``."""
    norm2 = state.inner(state).real
    image = state.permuted(p)
    overlap = state.inner(image) / norm2
    if abs(overlap) < 0.5:
        return None
    phase = overlap / abs(overlap)
    residual = (image - state.scaled(phase)).norm() / math.sqrt(norm2)
    if residual >= tol:
        return None
    return EigenPhase.from_angle(float(np.angle(phase)), p.order, tol)


# builders ---------------------------------------------------------------


def build_fock_state(r, stat="boson", label: int = 0, internal: InternalSpace | None = None) -> PureState:
    r = as_occupation(r)
    particles = [(j, label) for j, rj in enumerate(r) for _ in range(rj)]
    return PureState.from_terms(stat, r.n, [(1.0, particles)], internal)


def build_superposition(r, p: ModePermutation, k: int, stat="boson", internal: InternalSpace | None = None) -> PureState:
    """``sum_l exp(2 pi i l k/m)`` times the Fock state with every particle moved by ``pi**l``.

    The result picks up ``exp(-2 pi i k/m)`` under the permutation.
    """
    r = as_occupation(r, p.n)
    m = p.order
    terms = []
    for l in range(m):
        pl = p.power(l)
        particles = [(pl(j), 0) for j, rj in enumerate(r) for _ in range(rj)]
        terms.append((np.exp(2j * np.pi * l * k / m), particles))
    return PureState.from_terms(stat, p.n, terms, internal)


def build_entangled(
    d: Sequence[int], labels: Sequence[int], p: ModePermutation, k: int, stat="boson", internal: InternalSpace | None = None
) -> PureState:
    """``sum_l exp(2 pi i l k/m) prod_a a+_{pi^l(d_a), I_a}`` with 1-based modes ``d``."""
    if len(d) != len(labels):
        raise StateError("need one label per particle")
    r = [0] * p.n
    for mode in d:
        r[mode - 1] += 1
    if not is_invariant(r, p):
        raise StateError("mode assignment must be invariant under the permutation")
    if internal is None:
        internal = InternalSpace.orthonormal(max(labels) + 1)
    m = p.order
    terms = []
    for l in range(m):
        pl = p.power(l)
        terms.append((np.exp(2j * np.pi * l * k / m), [(pl(mode - 1), lab) for mode, lab in zip(d, labels)]))
    return PureState.from_terms(stat, p.n, terms, internal)


def build_bell(sign: int, internal: InternalSpace | None = None, stat="boson") -> PureState:
    """``|up>_1|down>_2 + sign |down>_1|up>_2`` (labels: up = 0, down = 1)."""
    k = 0 if sign > 0 else 1
    return build_entangled((1, 2), (0, 1), ModePermutation.parse("(1 2)"), k, stat, internal or InternalSpace.orthonormal(2))


def build_router(m: int, k: int) -> PureState:
    """Single particle ``sum_l exp(2 pi i l k/m) a+_{l+1}`` over ``m`` modes."""
    cycle = ModePermutation(tuple((j + 1) % m for j in range(m)))
    return build_superposition([1] + [0] * (m - 1), cycle, k)


def build_partially_distinguishable(
    p: ModePermutation, cycle_labels: Mapping[int, Sequence[int]], internal: InternalSpace, stat="boson"
) -> PureState:
    """Every mode of a cycle holds the same particles: one per label in ``cycle_labels``.

    ``cycle_labels`` maps any (1-based) mode of a cycle to that cycle's labels.
    """
    particles = []
    used = set()
    for mode, labels in cycle_labels.items():
        c = p.cycle_of_mode[mode - 1]
        if c in used:
            raise StateError(f"cycle of mode {mode} given twice")
        used.add(c)
        for j in p.cycles[c]:
            particles.extend((j, lab) for lab in labels)
    return PureState.from_terms(stat, p.n, [(1.0, particles)], internal)


# suppression harness -------------------------------------------------------


@dataclass
class PureStateReport:
    phase: EigenPhase
    flagged: list[OccupationList]
    violations: list[tuple[OccupationList, float]]
    probabilities: dict[OccupationList, float] = field(repr=False)

    @property
    def ok(self) -> bool:
        return not self.violations

    def allowed(self, tol: float = TAU_MAT) -> list[OccupationList]:
        return [s for s, v in self.probabilities.items() if v >= tol]


def verify_pure_state_suppression(state: PureState, sym, U=None, outputs=None, tol: float = TAU_MAT) -> PureStateReport:
    """Check that every output flagged by the pure-state law has zero probability.

    ``sym`` is a :class:`Symmetry` or eigenbasis realization; ``U`` defaults
    to that basis (no input-side phases).
    """
    sym_ = as_symmetry(sym)
    phi = detect_permutation_phase(state, sym_.permutation)
    if phi is None:
        raise StateError("state is not symmetric under the permutation up to a rational phase")
    if U is None:
        if not hasattr(sym, "basis"):
            raise StateError("need a unitary or an eigenbasis realization")
        U = sym.basis
    evo = evolve(state, U)
    dist = occupation_distribution(evo)
    if outputs is None:
        outputs = [s for N in sorted(state.particle_numbers()) for s in enumerate_bosonic_outputs(state.n, N)]
    probs = {s: dist.get(s, 0.0) for s in map(as_occupation, outputs)}
    flagged = [s for s in probs if pure_state_law_suppressed(phi, sym_, s)]
    violations = [(s, probs[s]) for s in flagged if probs[s] >= tol]
    return PureStateReport(phi, flagged, violations, probs)


def fock_phase(r, sym, stat) -> EigenPhase:
    """Permutation phase of a Fock product state: 0 for bosons, parity for fermions."""
    from .suppression import parity_phase

    if Statistics.parse(stat) is Statistics.BOSON:
        return EigenPhase(0)
    return parity_phase(sym, r)


__all__ = [
    "InternalSpace",
    "PureState",
    "PureStateReport",
    "build_bell",
    "build_entangled",
    "build_fock_state",
    "build_partially_distinguishable",
    "build_router",
    "build_superposition",
    "detect_permutation_phase",
    "evolve",
    "fock_phase",
    "mode_occupation_probability",
    "occupation_distribution",
    "verify_pure_state_suppression",
]
