"""``permsym`` command-line interface.

Exit codes: 0 success, 1 usage error, 2 a law flagged an event that has
non-negligible probability.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .catalog import (
    CatalogError,
    build_unitary,
    fourier_cyclic_shift,
    hypercube_permutation,
    jx_mirror_permutation,
    verify_symmetric_phase_relation,
)
from .events import EventError, OccupationList, as_occupation, assignment_to_occupation
from .linalg import MatrixError, to_json_array
from .permutations import ModePermutation, PermutationError
from .probabilities import (
    TAU_SUM,
    ZERO_REPORT,
    OutputDistribution,
    ProbabilityError,
    distribution_sweep,
    mean_distribution_over_random_bases,
    output_distribution,
)
from .purestates import (
    InternalSpace,
    PureState,
    StateError,
    build_bell,
    build_entangled,
    build_partially_distinguishable,
    build_router,
    build_superposition,
    evolve,
    occupation_distribution,
    verify_pure_state_suppression,
)
from .suppression import LawError, Statistics, Symmetry, classify_event

VIOLATION_TOL = 1e-10
EXIT_OK, EXIT_USAGE, EXIT_VIOLATION = 0, 1, 2

_USER_ERRORS = (
    CatalogError,
    EventError,
    LawError,
    MatrixError,
    PermutationError,
    ProbabilityError,
    StateError,
    ValueError,
)


class UsageError(Exception):
    pass


# argument helpers -----------------------------------------------------------


def parse_permutation(text: str, n: int | None = None) -> ModePermutation:
    """Cycle or one-line notation, or ``shift:chi``, ``mirror``, ``walsh:p1,p2``, ``identity``."""
    text = text.strip()
    name, _, arg = text.partition(":")
    if name in ("shift", "mirror", "walsh", "identity"):
        if n is None:
            raise UsageError(f"{name!r} needs the mode count (give --unitary or a cycle string)")
        if name == "shift":
            return fourier_cyclic_shift(n, int(arg))
        if name == "mirror":
            return jx_mirror_permutation(n)
        if name == "identity":
            return ModePermutation.identity(n)
        return hypercube_permutation([int(x) for x in arg.split(",") if x], n)
    return ModePermutation.parse(text, n)


def parse_input(args, n: int | None) -> OccupationList:
    if getattr(args, "assign", None):
        if n is None:
            raise UsageError("--assign needs the mode count")
        return assignment_to_occupation([int(x) for x in args.assign.strip("()").split(",") if x], n)
    if not getattr(args, "input", None):
        raise UsageError("give --input or --assign")
    return as_occupation(OccupationList.parse(args.input), n)


@dataclass
class Setup:
    """Resolved unitary / permutation / input for ``table`` and ``check``."""

    n: int
    r: OccupationList
    stat: Statistics
    symmetry: Symmetry | None
    unitary: np.ndarray | None
    unitary_id: str
    permutation: ModePermutation | None


def resolve_setup(args) -> Setup:
    stat = Statistics.parse(args.stat)
    U = None
    unitary_id = ""
    entry = None
    n = None
    if args.unitary:
        entry = build_unitary(args.unitary)
        U = entry.unitary
        unitary_id = args.unitary
        n = U.shape[0]
    p = None
    if args.perm:
        p = parse_permutation(args.perm, n)
        n = p.n
    elif entry is not None and entry.permutation is not None:
        p = entry.permutation
    if n is None:
        raise UsageError("give --unitary and/or --perm")
    r = parse_input(args, n)
    sym = None
    if p is not None:
        if U is None:
            sym = Symmetry.canonical(p)
        elif entry.permutation == p and entry.eigenphases is not None:
            sym = Symmetry(p, entry.eigenphases)
        else:
            witness = verify_symmetric_phase_relation(U, p)
            if not witness:
                raise UsageError(f"{unitary_id} has no symmetric phase relation under {p}: {witness.reason}")
            sym = Symmetry.from_witness(witness)
    return Setup(n, r, stat, sym, U, unitary_id, p)


def _needs_seed(args) -> None:
    if args.samples and args.seed is None:
        raise UsageError("--seed is required for randomized runs")


def _header(args, extra: dict | None = None) -> dict:
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "output") and v is not None}
    return {"tool": "permsym", "version": __version__, "config": config, "seed": args.seed if "seed" in args else None, **(extra or {})}


def _write(text: str, path: str | None) -> None:
    if path and path != "-":
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fmt_prob(p: float) -> str:
    return repr(float(p))


# table ---------------------------------------------------------------------


def compute_table(args) -> tuple[Setup, OutputDistribution]:
    setup = resolve_setup(args)
    _needs_seed(args)
    if setup.unitary is not None:
        dist = output_distribution(setup.unitary, setup.r, setup.stat, setup.unitary_id)
    elif args.samples:
        dist = mean_distribution_over_random_bases(
            setup.permutation, setup.r, None, None, setup.stat, args.samples, args.seed, args.include_canonical
        )
    else:
        from .permutations import canonical_eigenbasis

        dist = output_distribution(
            canonical_eigenbasis(setup.permutation).basis, setup.r, setup.stat, f"eigenbasis:perm={setup.permutation}"
        )
    return setup, dist


def table_rows(setup: Setup, dist: OutputDistribution) -> list[dict]:
    rows = []
    for s, prob in zip(dist.events, dist.probabilities):
        if setup.symmetry is not None:
            verdict = classify_event(setup.symmetry, setup.r, s, setup.stat)
            predicted, domain = verdict.law_predicted, verdict.domain
        else:
            predicted, domain = False, ""
        rows.append(
            {
                "occupation": str(s),
                "assignment": str(s.assignment()),
                "probability": float(prob),
                "law_predicted": predicted,
                "numerically_zero": bool(prob < ZERO_REPORT),
                "domain": domain,
            }
        )
    return rows


CSV_FIELDS = ["occupation", "assignment", "probability", "law_predicted", "numerically_zero", "domain"]


def render_rows(rows: list[dict], header: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({**header, "rows": rows}, indent=1) + "\n"
    buf = io.StringIO()
    for key, value in header.items():
        buf.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for row in rows:
        writer.writerow(
            [
                row["occupation"],
                row["assignment"],
                _fmt_prob(row["probability"]),
                str(row["law_predicted"]).lower(),
                str(row["numerically_zero"]).lower(),
                row["domain"],
            ]
        )
    return buf.getvalue()


def cmd_table(args) -> int:
    setup, dist = compute_table(args)
    rows = table_rows(setup, dist)
    header = _header(args, {"unitary": dist.unitary_id, "total_probability": dist.total()})
    _write(render_rows(rows, header, args.format), args.output)
    return EXIT_OK


# check ---------------------------------------------------------------------


def cmd_check(args) -> int:
    setup = resolve_setup(args)
    _needs_seed(args)
    if setup.symmetry is None:
        raise UsageError("check needs a permutation symmetry (--perm)")
    if setup.unitary is not None:
        dists = [(setup.unitary_id, output_distribution(setup.unitary, setup.r, setup.stat, setup.unitary_id))]
    else:
        dists = [
            (label, d)
            for label, _, d in distribution_sweep(
                setup.permutation, setup.r, setup.stat, args.seed, args.samples or 0, include_canonical=True
            )
        ]
    verdicts = [classify_event(setup.symmetry, setup.r, s, setup.stat) for s in dists[0][1].events]
    violations = []
    zero_everywhere = np.ones(len(verdicts), dtype=bool)
    for label, dist in dists:
        dist.check_normalized(TAU_SUM)
        zero_everywhere &= dist.probabilities < ZERO_REPORT
        for v, prob in zip(verdicts, dist.probabilities):
            if v.law_predicted and prob >= VIOLATION_TOL:
                violations.append({"basis": label, "event": str(v.event), "probability": float(prob), "domain": v.domain})
    unpredicted = [str(v.event.assignment()) for v, z in zip(verdicts, zero_everywhere) if z and not v.law_predicted]
    domains: dict[str, int] = {}
    for v in verdicts:
        domains[v.domain] = domains.get(v.domain, 0) + 1
    report = {
        **_header(args),
        "events": len(verdicts),
        "bases": len(dists),
        "law_predicted": sum(v.law_predicted for v in verdicts),
        "domains": dict(sorted(domains.items())),
        "violations": violations,
        "unpredicted": unpredicted,
    }
    _write(json.dumps(report, indent=1) + "\n", args.output)
    return EXIT_VIOLATION if violations else EXIT_OK


# catalog / phase-witness --------------------------------------------------------


def cmd_catalog(args) -> int:
    entry = build_unitary(args.spec)
    if args.format == "json":
        out = {
            **_header(args),
            "name": entry.name,
            "unitary": to_json_array(entry.unitary),
            "permutation": str(entry.permutation) if entry.permutation else None,
            "eigenphases": [str(e) for e in entry.eigenphases] if entry.eigenphases else None,
        }
        _write(json.dumps(out, indent=1) + "\n", args.output)
    else:
        with np.printoptions(precision=args.precision, suppress=True, linewidth=160):
            _write(f"# {args.spec}  (permsym {__version__})\n{entry.unitary}\n", args.output)
    return EXIT_OK


def cmd_phase_witness(args) -> int:
    entry = build_unitary(args.spec)
    p = parse_permutation(args.perm, entry.unitary.shape[0])
    w = verify_symmetric_phase_relation(entry.unitary, p)
    out = {
        **_header(args),
        "ok": w.ok,
        "reason": w.reason,
        "permutation": str(p),
        "residual": w.residual,
        "eigenphases": [str(e) for e in w.eigenphases] if w.ok else None,
        "theta_over_pi": [float(x / np.pi) for x in w.local_phase] if w.ok else None,
    }
    _write(json.dumps(out, indent=1) + "\n", args.output)
    return EXIT_OK


# pure states ----------------------------------------------------------------


def _gram_from_arg(text: str | None, dim: int) -> InternalSpace:
    """``None`` -> orthonormal; a number -> uniform overlap; else JSON ``[[re, im], ...]`` rows."""
    if text is None:
        return InternalSpace.orthonormal(dim)
    try:
        g = complex(float(text))
        G = np.full((dim, dim), g, dtype=complex)
        np.fill_diagonal(G, 1.0)
        return InternalSpace(G)
    except ValueError:
        arr = np.asarray(json.loads(text), dtype=float)
        return InternalSpace(arr[..., 0] + 1j * arr[..., 1])


def cmd_state(args) -> int:
    kind = args.kind
    if kind == "router":
        state = build_router(args.m, args.k)
    elif kind == "bell":
        state = build_bell(1 if args.sign == "+" else -1, InternalSpace.two_level(args.overlap), args.stat)
    else:
        if not args.perm:
            raise UsageError(f"state {kind} needs --perm")
        p = parse_permutation(args.perm)
        if kind == "superposition":
            r = parse_input(args, p.n)
            state = build_superposition(r, p, args.k, args.stat)
        elif kind == "entangled":
            if not args.assign or not args.labels:
                raise UsageError("entangled needs --assign and --labels")
            d = [int(x) for x in args.assign.strip("()").split(",") if x]
            labels = [int(x) for x in args.labels.split(",")]
            state = build_entangled(d, labels, p, args.k, args.stat, _gram_from_arg(args.gram, max(labels) + 1))
        elif kind == "partial":
            if not args.cycles:
                raise UsageError("partial needs --cycles, e.g. '1:0,0;10:1'")
            cycle_labels = {}
            for part in args.cycles.split(";"):
                mode, _, labels = part.partition(":")
                cycle_labels[int(mode)] = [int(x) for x in labels.split(",") if x]
            dim = 1 + max(l for ls in cycle_labels.values() for l in ls)
            state = build_partially_distinguishable(p, cycle_labels, _gram_from_arg(args.gram, dim), args.stat)
        else:
            raise UsageError(f"unknown state kind {kind!r}")
    _write(json.dumps({**_header(args), **state.to_json()}, indent=1) + "\n", args.output)
    return EXIT_OK


def cmd_state_check(args) -> int:
    with open(args.state) if args.state != "-" else sys.stdin as fh:
        state = PureState.from_json(fh.read())
    p = parse_permutation(args.perm, state.n)
    if args.unitary:
        entry = build_unitary(args.unitary)
        witness = verify_symmetric_phase_relation(entry.unitary, p)
        if not witness:
            raise UsageError(f"unitary is not symmetric under {p}: {witness.reason}")
        if np.max(np.abs(witness.local_phase)) > 1e-9:
            raise UsageError("pure-state checks need a unitary without input-side phases")
        sym, U = Symmetry.from_witness(witness), entry.unitary
    else:
        from .permutations import canonical_eigenbasis, randomized_eigenbasis

        E = canonical_eigenbasis(p) if args.seed is None else randomized_eigenbasis(p, args.seed)
        sym, U = Symmetry.from_realization(E), E.basis
    report = verify_pure_state_suppression(state, sym, U)
    out = {
        **_header(args),
        "phase": str(report.phase),
        "flagged": len(report.flagged),
        "violations": [{"event": str(s), "probability": prob} for s, prob in report.violations],
        "allowed": [str(s) for s in report.allowed()],
    }
    _write(json.dumps(out, indent=1) + "\n", args.output)
    return EXIT_VIOLATION if report.violations else EXIT_OK


# demos ----------------------------------------------------------------------


def _demo_hom(args) -> dict:
    U = build_unitary("sylvester:d=1").unitary
    out = {}
    for stat in Statistics:
        dist = output_distribution(U, [1, 1], stat)
        out[stat.value] = {str(s): round(float(p), 12) for s, p in zip(dist.events, dist.probabilities)}
    return out


def _demo_bell(args) -> dict:
    U = build_unitary("sylvester:d=1").unitary
    out = {}
    for g in args.overlaps:
        row = {}
        for sign, name in ((1, "psi+"), (-1, "psi-")):
            state = build_bell(sign, InternalSpace.two_level(g))
            evo = evolve(state, U)
            row[name] = {
                "evolved_terms": [
                    {"coefficient": [round(c.real, 12), round(c.imag, 12)], "particles": [[m + 1, "ud"[l]] for m, l in k]}
                    for k, c in evo.terms
                    if abs(c) > 1e-12
                ],
                "probabilities": {str(s): round(p, 12) for s, p in sorted(occupation_distribution(evo).items())},
            }
        out[f"overlap={g}"] = row
    return out


def _demo_router(args) -> dict:
    from .catalog import fourier_unitary

    state = build_router(args.m, args.k)
    dist = occupation_distribution(evolve(state, fourier_unitary(args.m)))
    allowed = [s.assignment()[0] for s, p in dist.items() if p > VIOLATION_TOL]
    predicted = (-args.k) % args.m + 1
    return {"m": args.m, "k": args.k, "allowed_modes": allowed, "predicted_mode": predicted}


def _law_summary(U, sym, r, stat) -> dict:
    dist = output_distribution(U, r, stat)
    predicted = violations = 0
    for s, prob in zip(dist.events, dist.probabilities):
        v = classify_event(sym, r, s, stat)
        predicted += v.law_predicted
        violations += bool(v.law_predicted and prob >= VIOLATION_TOL)
    return {"input": str(as_occupation(r)), "statistics": stat.value, "events": len(dist), "law_predicted": predicted, "violations": violations}


def _demo_jx(args) -> dict:
    n = args.n
    entry = build_unitary(f"jx:n={n}")
    sym = Symmetry(entry.permutation, entry.eigenphases)
    r = [0] * n
    r[(n - 1) // 2] = 1
    r[0] = r[-1] = 1
    return {stat.value: _law_summary(entry.unitary, sym, r, stat) for stat in Statistics}


def _demo_hypercube(args) -> dict:
    from .catalog import hypercube_permutation

    d = args.d
    n = 2**d
    out = {}
    for name in ("sylvester", "hypercube"):
        U = build_unitary(f"{name}:d={d}").unitary
        p = hypercube_permutation([2], n)
        w = verify_symmetric_phase_relation(U, p)
        sym = Symmetry.from_witness(w)
        r = [1 if j in (0, n // 2) else 0 for j in range(n)]
        out[name] = _law_summary(U, sym, r, Statistics.BOSON)
    return out


_DEMOS = {"hom": _demo_hom, "bell": _demo_bell, "router": _demo_router, "jx": _demo_jx, "hypercube": _demo_hypercube}


def cmd_demo(args) -> int:
    result = _DEMOS[args.name](args)
    _write(json.dumps({**_header(args), "result": result}, indent=1) + "\n", args.output)
    if args.name == "router" and result["allowed_modes"] != [result["predicted_mode"]]:
        return EXIT_VIOLATION
    if args.name in ("jx", "hypercube") and any(v["violations"] for v in result.values()):
        return EXIT_VIOLATION
    return EXIT_OK


# parser ---------------------------------------------------------------------


def _add_common_io(sp) -> None:
    sp.add_argument("-o", "--output", help="output path (default: stdout)")


def _add_setup(sp) -> None:
    sp.add_argument("--unitary", help="catalog spec, e.g. fourier:n=12")
    sp.add_argument("--perm", help="'(1 2 3)(4 5)', one-line images, shift:chi, mirror or walsh:p1,p2")
    sp.add_argument("--input", help="occupation list, e.g. 1,0,1,0")
    sp.add_argument("--assign", help="1-based mode assignment list, e.g. 1,4,7,10")
    sp.add_argument("--stat", default="boson", help="boson | fermion | distinguishable")
    sp.add_argument("--samples", type=int, default=0, help="number of randomized eigenbases")
    sp.add_argument("--seed", type=int, help="RNG seed (required with --samples)")
    _add_common_io(sp)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="permsym", description="Permutation-symmetric interferometers and suppression laws.")
    parser.add_argument("--version", action="version", version=f"permsym {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("table", help="full output distribution with law verdicts")
    _add_setup(sp)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--include-canonical", action="store_true", help="add the canonical basis to the random average")
    sp.set_defaults(func=cmd_table)

    sp = sub.add_parser("check", help="soundness sweep: law verdicts against exact probabilities")
    _add_setup(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("catalog", help="print a unitary")
    sp.add_argument("spec")
    sp.add_argument("--format", choices=("text", "json"), default="text")
    sp.add_argument("--precision", type=int, default=4)
    _add_common_io(sp)
    sp.set_defaults(func=cmd_catalog)

    sp = sub.add_parser("phase-witness", help="search for a symmetric phase relation")
    sp.add_argument("spec")
    sp.add_argument("--perm", required=True)
    _add_common_io(sp)
    sp.set_defaults(func=cmd_phase_witness)

    sp = sub.add_parser("demo", help="named demonstrations")
    sp.add_argument("name", choices=sorted(_DEMOS))
    sp.add_argument("--m", type=int, default=8)
    sp.add_argument("--k", type=int, default=3)
    sp.add_argument("--n", type=int, default=5)
    sp.add_argument("--d", type=int, default=3)
    sp.add_argument("--overlaps", type=float, nargs="+", default=[0.0, 0.3, 0.9])
    _add_common_io(sp)
    sp.set_defaults(func=cmd_demo)

    sp = sub.add_parser("state", help="generate a pure state as JSON")
    sp.add_argument("kind", choices=("superposition", "entangled", "bell", "router", "partial"))
    sp.add_argument("--perm")
    sp.add_argument("--input")
    sp.add_argument("--assign")
    sp.add_argument("--labels", help="internal label per particle, e.g. 0,1")
    sp.add_argument("--cycles", help="labels per cycle, e.g. '1:0;10:1'")
    sp.add_argument("--gram", help="uniform overlap or JSON Gram matrix")
    sp.add_argument("--k", type=int, default=0)
    sp.add_argument("--m", type=int, default=4)
    sp.add_argument("--sign", choices=("+", "-"), default="+")
    sp.add_argument("--overlap", type=float, default=0.0)
    sp.add_argument("--stat", default="boson")
    _add_common_io(sp)
    sp.set_defaults(func=cmd_state)

    sp = sub.add_parser("state-check", help="check the pure-state law on a state file")
    sp.add_argument("state", help="JSON state file, or - for stdin")
    sp.add_argument("--perm", required=True)
    sp.add_argument("--unitary", help="catalog spec (default: eigenbasis of the permutation)")
    sp.add_argument("--seed", type=int, help="use a randomized eigenbasis")
    _add_common_io(sp)
    sp.set_defaults(func=cmd_state_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"permsym: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _USER_ERRORS as exc:
        print(f"permsym: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
