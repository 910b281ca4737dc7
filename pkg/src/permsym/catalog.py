"""Named unitaries, the ``U = Theta A Sigma`` family, and the symmetric phase relation solver."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .linalg import TAU_MAT, MatrixError, as_unitary
from .permutations import (
    EigenbasisRealization,
    EigenPhase,
    EigenvalueMultiset,
    ModePermutation,
    canonical_eigenbasis,
    make_rng,
    randomized_eigenbasis,
)

# entries below this magnitude are treated as structural zeros by the phase solver
_SUPPORT_TOL = 1e-8


class CatalogError(ValueError):
    pass


def fourier_unitary(n: int) -> np.ndarray:
    if n < 1:
        raise CatalogError("n must be positive")
    jk = np.outer(np.arange(n), np.arange(n))
    return np.exp(2j * np.pi * jk / n) / np.sqrt(n)


def fourier_cyclic_shift(n: int, chi: int) -> ModePermutation:
    """``pi(j) = 1 + mod(j + chi - 1, n)``: ``chi`` cycles of length ``n/chi``."""
    if chi < 1 or n % chi:
        raise CatalogError(f"period chi={chi} must divide n={n}")
    return ModePermutation(tuple((j + chi) % n for j in range(n)))


def smallest_period(r) -> int:
    """Smallest ``chi`` dividing ``n`` with ``r`` invariant under the cyclic shift by ``chi``."""
    r = tuple(r)
    n = len(r)
    for chi in range(1, n + 1):
        if n % chi == 0 and all(r[j] == r[(j + chi) % n] for j in range(n)):
            return chi
    return n


def _tensor_power(kernel: np.ndarray, d: int) -> np.ndarray:
    if d < 1:
        raise CatalogError("d must be at least 1")
    # most-significant factor first: mode j-1 in binary, leading bit <-> first factor
    return reduce(np.kron, [kernel] * d) / np.sqrt(2.0**d)


def sylvester_unitary(d: int) -> np.ndarray:
    return _tensor_power(np.array([[1, 1], [1, -1]], dtype=complex), d)


def hypercube_unitary(d: int) -> np.ndarray:
    return _tensor_power(np.array([[1, 1j], [1j, 1]], dtype=complex), d)


def _check_power_of_two(n: int) -> int:
    d = n.bit_length() - 1
    if n < 2 or 1 << d != n:
        raise CatalogError(f"n={n} is not a power of two")
    return d


def rademacher(j: int, p: int, n: int) -> int:
    """``x(j, p) = (-1)**floor(p (j-1) / n)`` for 1-based ``j``."""
    _check_power_of_two(n)
    if p < 2 or p > n or p & (p - 1):
        raise CatalogError(f"p={p} must be a power of two in 2..{n}")
    return -1 if (p * (j - 1) // n) % 2 else 1


def walsh(j: int, pvec, n: int) -> int:
    pvec = tuple(pvec)
    if len(set(pvec)) != len(pvec):
        raise CatalogError("entries of p must be distinct")
    out = 1
    for p in pvec:
        out *= rademacher(j, p, n)
    return out


def hypercube_theta(n: int) -> np.ndarray:
    """``theta_H(j) = pi/4 sum_l [1 - x(j, 2**l)]``, l = 1..d."""
    d = _check_power_of_two(n)
    return np.array(
        [math.pi / 4 * sum(1 - rademacher(j, 2**l, n) for l in range(1, d + 1)) for j in range(1, n + 1)]
    )


def hypercube_permutation(pvec, n: int) -> ModePermutation:
    """``pi(j) = j + sum_k x(j, p_k) n / p_k``."""
    pvec = tuple(pvec)
    if not pvec:
        raise CatalogError("p must be non-empty")
    for p in pvec:
        rademacher(1, p, n)
    images = [j + sum(rademacher(j, p, n) * (n // p) for p in pvec) for j in range(1, n + 1)]
    if len(set(pvec)) != len(pvec):
        raise CatalogError("entries of p must be distinct")
    return ModePermutation.from_one_line(images)


def walsh_eigenphases(pvec, n: int) -> tuple[EigenPhase, ...]:
    """Column eigenphases of the Sylvester/hypercube unitary: ``0`` if the Walsh value is +1 else ``1/2``."""
    return tuple(EigenPhase(0 if walsh(k, pvec, n) == 1 else 1, 2) for k in range(1, n + 1))


def jx_generator(n: int) -> np.ndarray:
    """Real symmetric tridiagonal ``J_x`` (hbar = 1)."""
    if n < 2:
        raise CatalogError("n must be at least 2")
    J = np.zeros((n, n))
    for k in range(1, n):
        J[k, k - 1] = J[k - 1, k] = 0.5 * math.sqrt(k * (n - k))
    return J


def jx_unitary(n: int, t: float = math.pi / 2) -> np.ndarray:
    """``exp(i J_x t)`` via the eigendecomposition of the tridiagonal generator."""
    w, V = np.linalg.eigh(jx_generator(n))
    return (V * np.exp(1j * w * t)[None, :]) @ V.T


def jacobi_at_zero(order: int, alpha: int, beta: int) -> float:
    """``P_order^(alpha, beta)(0)`` for integers with ``order + alpha``, ``order + beta`` >= 0."""
    if order + alpha < 0 or order + beta < 0:
        raise CatalogError("unsupported Jacobi parameters")
    total = sum((-1) ** s * math.comb(order + alpha, order - s) * math.comb(order + beta, s) for s in range(order + 1))
    return total / 2.0**order


def jx_unitary_closed_form(n: int) -> np.ndarray:
    """``U_jk = exp(i pi (j-k)/2) u^(j)_k`` with ``u`` from Jacobi polynomials at the origin."""
    U = np.zeros((n, n), dtype=complex)
    for j in range(1, n + 1):
        for k in range(1, n + 1):
            norm = math.sqrt(
                math.factorial(k - 1) * math.factorial(n - k) / (math.factorial(j - 1) * math.factorial(n - j))
            )
            u = 2.0 ** (-(n + 1) / 2 + k) * norm * jacobi_at_zero(k - 1, j - k, n - j - k + 1)
            U[j - 1, k - 1] = np.exp(1j * math.pi * (j - k) / 2) * u
    return U


def jx_mirror_permutation(n: int) -> ModePermutation:
    if n < 2:
        raise CatalogError("n must be at least 2")
    return ModePermutation(tuple(n - 1 - j for j in range(n)))


def jx_eigenphases(n: int) -> tuple[EigenPhase, ...]:
    """``lambda_k = exp(i pi (k-1))``."""
    return tuple(EigenPhase(k % 2, 2) for k in range(n))


def compose(theta, A, sigma) -> np.ndarray:
    """``diag(exp(i theta)) A diag(exp(i sigma))``."""
    basis = A.basis if isinstance(A, EigenbasisRealization) else np.asarray(A, dtype=complex)
    n = basis.shape[0]
    theta = np.zeros(n) if theta is None else np.broadcast_to(np.asarray(theta, dtype=float), (n,))
    sigma = np.zeros(n) if sigma is None else np.broadcast_to(np.asarray(sigma, dtype=float), (n,))
    if basis.shape != (n, n) or theta.shape != (n,) or sigma.shape != (n,):
        raise CatalogError("dimension mismatch in Theta A Sigma")
    if not (np.all(np.isfinite(theta)) and np.all(np.isfinite(sigma))):
        raise CatalogError("phases must be finite")
    return np.exp(1j * theta)[:, None] * basis * np.exp(1j * sigma)[None, :]


@dataclass(frozen=True)
class SymmetricPhaseWitness:
    """Solution of ``U[pi(j), k] = exp(i[theta(pi(j)) - theta(j)]) U[j, k] lambda_k``.

    ``ok`` is False when no consistent assignment was found; ``reason`` then says why.
    """

    permutation: ModePermutation
    eigenphases: tuple[EigenPhase, ...] | None
    local_phase: np.ndarray | None = field(repr=False)
    residual: float
    ok: bool
    reason: str = ""

    def __bool__(self):
        return self.ok

    def z_phases(self) -> np.ndarray:
        """``theta(pi(j)) - theta(j)`` for every mode."""
        th = self.local_phase
        return np.array([th[self.permutation(j)] - th[j] for j in range(len(th))])

    def eigenvalue_multiset(self) -> EigenvalueMultiset:
        return EigenvalueMultiset(self.eigenphases or ())


def _turns(z: complex) -> float:
    t = (np.angle(z) / (2 * np.pi)) % 1.0
    return 0.0 if t > 1 - 1e-9 else t


def _failure(p, reason, residual=float("inf")):
    return SymmetricPhaseWitness(p, None, None, residual, False, reason)


def verify_symmetric_phase_relation(U, p: ModePermutation, tol: float = TAU_MAT) -> SymmetricPhaseWitness:
    """Solve for per-column eigenphases and per-mode local phases.

    Modes and columns form a bipartite graph with an edge wherever ``U[j, k]``
    is nonzero; on each connected component the unknowns are fixed up to one
    global phase, which the cycle closure ``prod_cycle z = 1`` restricts to a
    finite set.  Among those, the candidate giving the lowest-indexed column
    the smallest phase in [0, 1) is chosen.  The gauge is ``theta = 0`` on the
    smallest mode of every cycle.
    """
    try:
        U = as_unitary(U, tol)
    except MatrixError as exc:
        return _failure(p, str(exc))
    n = U.shape[0]
    if p.n != n:
        return _failure(p, f"permutation acts on {p.n} modes, unitary on {n}")
    support = np.abs(U) > _SUPPORT_TOL
    img = np.array(p.images)
    if np.any(support != support[img]):
        return _failure(p, "zero pattern is not invariant under the permutation")
    ratio = np.where(support, U[img] / np.where(support, U, 1.0), 0.0)

    z = np.full(n, np.nan, dtype=complex)
    lam = np.full(n, np.nan, dtype=complex)
    mode_seen = np.zeros(n, bool)
    col_seen = np.zeros(n, bool)
    for root in range(n):
        if mode_seen[root]:
            continue
        # propagate z_j * lam_k = ratio[j, k] with z_root = 1
        comp_modes, comp_cols = [root], []
        z[root] = 1.0
        mode_seen[root] = True
        stack = [("m", root)]
        while stack:
            kind, idx = stack.pop()
            if kind == "m":
                for k in np.nonzero(support[idx])[0]:
                    if not col_seen[k]:
                        col_seen[k] = True
                        lam[k] = ratio[idx, k] / z[idx]
                        comp_cols.append(k)
                        stack.append(("c", k))
            else:
                for j in np.nonzero(support[:, idx])[0]:
                    if not mode_seen[j]:
                        mode_seen[j] = True
                        z[j] = ratio[j, idx] / lam[idx]
                        comp_modes.append(j)
                        stack.append(("m", j))
        comp_modes = np.array(sorted(comp_modes))
        comp_cols = np.array(sorted(comp_cols))
        if comp_cols.size == 0:
            return _failure(p, f"mode {root + 1} has no nonzero entry")
        # global phase zeta: z -> zeta z, lam -> lam / zeta; cycles must close
        cycles = [c for c in p.cycles if c[0] in set(comp_modes.tolist())]
        c0 = cycles[0]
        closure = np.prod(z[list(c0)])
        base = (1 / closure) ** (1.0 / len(c0))
        candidates = [base * np.exp(2j * np.pi * t / len(c0)) for t in range(len(c0))]
        valid = [
            zeta for zeta in candidates
            if all(abs(zeta ** len(c) * np.prod(z[list(c)]) - 1) < 1e-8 for c in cycles)
        ]
        if not valid:
            return _failure(p, "local phases cannot close around every cycle")
        first = comp_cols[0]
        zeta = min(valid, key=lambda zz: _turns(lam[first] / zz))
        z[comp_modes] *= zeta
        lam[comp_cols] /= zeta

    phases = []
    for k in range(n):
        ph = EigenPhase.from_angle(float(np.angle(lam[k])), n, tol)
        if ph is None:
            return _failure(p, f"column {k + 1} eigenvalue is not a rational phase with denominator <= {n}")
        phases.append(ph)
    theta = np.zeros(n)
    for cyc in p.cycles:
        for a, b in zip(cyc, cyc[1:]):
            theta[b] = theta[a] + np.angle(z[a])
    lam_exact = np.array([ph.to_complex() for ph in phases])
    Z = np.exp(1j * (theta[img] - theta))
    residual = float(np.max(np.abs(U[img] - Z[:, None] * U * lam_exact[None, :])))
    if residual >= tol:
        return SymmetricPhaseWitness(p, tuple(phases), theta, residual, False, "residual above tolerance")
    return SymmetricPhaseWitness(p, tuple(phases), theta, residual, True)


# catalog addressing ------------------------------------------------------


@dataclass
class CatalogEntry:
    """A unitary with the permutation and column eigenphases it is known to carry (if any)."""

    name: str
    unitary: np.ndarray = field(repr=False)
    permutation: ModePermutation | None = None
    eigenphases: tuple[EigenPhase, ...] | None = None
    params: dict = field(default_factory=dict)


def _split_params(text: str) -> dict:
    # commas inside parentheses belong to the permutation
    parts, depth, cur = [], 0, ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    if cur:
        parts.append(cur)
    out = {}
    for part in parts:
        if "=" not in part:
            raise CatalogError(f"expected key=value, got {part!r}")
        key, value = part.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _phase_vector(value: str | None, n: int, rng_seed: int | None, salt: int) -> np.ndarray:
    if value is None or value in ("0", ""):
        return np.zeros(n)
    if value == "random":
        if rng_seed is None:
            raise CatalogError("random phases need a seed")
        return make_rng(rng_seed, salt).uniform(0, 2 * np.pi, n)
    vals = [float(x) for x in re.split(r"[;\s]+", value) if x]
    if len(vals) == 1:
        return np.full(n, vals[0])
    if len(vals) != n:
        raise CatalogError(f"phase vector needs {n} entries, got {len(vals)}")
    return np.array(vals)


def build_unitary(spec: str) -> CatalogEntry:
    """Construct a unitary from ``name:key=value,...``.

    Names: ``fourier:n=12``, ``sylvester:d=3``, ``hypercube:d=3``, ``jx:n=11``,
    ``identity:n=4``, ``eigenbasis:perm=(1 2 3)(4 5),seed=7,theta=random,sigma=0``.
    ``eigenbasis`` accepts ``n=`` to pad with fixed points; without ``seed`` the
    canonical basis is used.  Phase vectors are ``random``, a scalar, or
    ``;``-separated values.
    """
    name, _, rest = spec.strip().partition(":")
    params = _split_params(rest) if rest else {}
    try:
        if name == "fourier":
            n = int(params["n"])
            return CatalogEntry(name, fourier_unitary(n), params=params)
        if name in ("sylvester", "hypercube"):
            d = int(params["d"])
            U = sylvester_unitary(d) if name == "sylvester" else hypercube_unitary(d)
            return CatalogEntry(name, U, params=params)
        if name == "jx":
            n = int(params["n"])
            return CatalogEntry(name, jx_unitary(n), jx_mirror_permutation(n), jx_eigenphases(n), params)
        if name == "identity":
            n = int(params["n"])
            return CatalogEntry(name, np.eye(n, dtype=complex), ModePermutation.identity(n), (EigenPhase(0),) * n, params)
        if name == "eigenbasis":
            n = int(params["n"]) if "n" in params else None
            perm = ModePermutation.parse(params["perm"], n)
            seed = int(params["seed"]) if "seed" in params else None
            A = canonical_eigenbasis(perm) if seed is None else randomized_eigenbasis(perm, seed)
            theta = _phase_vector(params.get("theta"), perm.n, seed, 1)
            sigma = _phase_vector(params.get("sigma"), perm.n, seed, 2)
            return CatalogEntry(name, compose(theta, A, sigma), perm, A.phases, params)
    except KeyError as exc:
        raise CatalogError(f"{name!r} needs parameter {exc.args[0]!r}") from None
    except ValueError as exc:
        raise CatalogError(str(exc)) from None
    raise CatalogError(f"unknown unitary {name!r}")
