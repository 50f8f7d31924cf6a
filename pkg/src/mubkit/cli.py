"""Command-line entry point: ``mubkit <command> [options]``.

Exit status is 0 when every check passes, 1 when a check fails (the failing
names are printed) and 2 for usage errors such as a Galois construction in
a dimension that is not a prime power.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import bases, bell, galois, linalg, tomography, weylgroup
from .errors import MubkitError, NotPrimePower, TooLarge
from .report import Check, boolean_check, residual_check

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# exhaustive Bell sweeps are N^4 tuples on an N^4-dimensional space
BELL_EXHAUSTIVE_MAX = 5
BELL_SAMPLE = 100


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    dim: int = 3
    construction: str = galois.MOD_N
    tolerance: float = linalg.DEFAULT_TOL
    seed: int = weylgroup.DEFAULT_SEED
    output: str = "text"
    shots: int | None = None
    character: str = "digit"

    def __post_init__(self):
        if self.dim < 2:
            raise UsageError(f"--dim must be >= 2, got {self.dim}")
        if self.construction not in galois.CONSTRUCTIONS:
            raise UsageError(f"unknown construction {self.construction!r}")
        if self.construction == galois.GALOIS and galois.prime_power(self.dim) is None:
            raise UsageError(f"no field with {self.dim} elements: {self.dim} is not a prime power")
        if self.tolerance <= 0:
            raise UsageError("--tol must be positive")
        if self.shots is not None and self.shots < 1:
            raise UsageError("--shots must be a positive integer")

    def structure(self) -> galois.FiniteStructure:
        return galois.build_structure(self.dim, self.construction, self.character)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "construction": self.construction,
            "tolerance": self.tolerance,
            "seed": self.seed,
            "character": self.character,
        }


@dataclass
class Result:
    """What a command produced: a JSON payload, a text rendering and checks."""

    payload: dict
    text: str
    checks: list[Check]

    @property
    def failures(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]


def _check_lines(checks) -> str:
    return "\n".join(c.line() for c in checks)


def _checks_result(checks: list[Check], header: str) -> Result:
    return Result({"checks": [c.to_json() for c in checks]}, header + "\n" + _check_lines(checks), checks)


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# Per-module suites
# ---------------------------------------------------------------------------

def _suite(section: str, cfg: RunConfig, s: galois.FiniteStructure) -> list[Check]:
    tol = cfg.tolerance
    if section == "galois":
        return galois.verification_suite(s, min(tol, 1e-12))
    if section == "bases":
        return bases.verification_suite(s, tol)
    if section == "weylgroup":
        return weylgroup.verification_suite(s, tol, cfg.seed)
    if section == "bell":
        sample = None if s.size <= BELL_EXHAUSTIVE_MAX else BELL_SAMPLE
        return bell.verification_suite(s, tol, cfg.seed, sample)
    if section == "tomography":
        return tomography.verification_suite(s, tol, cfg.seed)
    raise ValueError(section)


SECTIONS = ("galois", "bases", "weylgroup", "bell", "tomography")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_field_show(cfg: RunConfig, args) -> Result:
    s = cfg.structure()
    payload = s.to_json()
    lines = [f"{s.name}  ({s.kind})"]
    if s.modulus is not None:
        lines.append("modulus coefficients (constant first): " + " ".join(map(str, s.modulus)))
    width = len(str(s.size - 1))
    for title, table in (("addition", s.add), ("multiplication", s.mul)):
        lines.append(f"{title}:")
        lines += ["  " + " ".join(f"{x:>{width}}" for x in row) for row in table]
    checks = galois.verification_suite(s, min(cfg.tolerance, 1e-12))
    return Result(payload, "\n".join(lines), checks)


def cmd_mub_generate(cfg: RunConfig, args) -> Result:
    s = cfg.structure()
    family = bases.mub_family(s)
    payload = bases.family_to_json(family, s)
    payload["is_field"] = galois.verify_axioms(s).is_field
    report = bases.unbiasedness(family, cfg.tolerance)
    text = f"{len(family)} bases for {s.name}; max pair deviation {report.overall_max:.3e}"
    checks = [residual_check("bases orthonormal", max(b.orthonormality_residual() for b in family), cfg.tolerance)]
    return Result(payload, text, checks)


def _verify_bases(family: list[bases.Basis], require_mub: bool, tol: float, is_family: bool = True) -> list[Check]:
    checks = [
        residual_check(f"basis {b.construction_index} orthonormal", b.orthonormality_residual(), tol)
        for b in family
    ]
    for b in family:
        norms = [linalg.max_abs(linalg.normalize_phase(v) - v) for v in b.states]
        checks.append(residual_check(f"basis {b.construction_index} phase convention", max(norms), tol))
    if len(family) > 1 and is_family:
        report = bases.unbiasedness(family, tol)
        zero = [b for b in family if b.construction_index == 0]
        if zero:
            worst = max(
                (bases.pair_deviation(zero[0], b) for b in family if b is not zero[0]), default=0.0
            )
            checks.append(residual_check("unbiased to computational basis", worst, tol))
        if require_mub:
            checks.append(residual_check("mutually unbiased", report.overall_max, tol))
            checks.append(boolean_check("complete set (N+1 bases)", len(family) == family[0].dim + 1))
    return checks


def cmd_mub_verify(cfg: RunConfig, args) -> Result:
    if args.input:
        data = _load_json(args.input)
        try:
            family = bases.load_bases(data)
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"{args.input} is not a basis file: {exc}") from exc
        require = bool(data.get("is_field", False)) or args.require_mub
        # eigenbases of a subgroup report need not be unbiased to anything
        is_family = "eigenbases" not in data
        source = args.input
    else:
        s = cfg.structure()
        family = bases.mub_family(s)
        require = galois.verify_axioms(s).is_field or args.require_mub
        is_family = True
        source = s.name
    checks = _verify_bases(family, require, cfg.tolerance, is_family)
    report = bases.unbiasedness(family, cfg.tolerance)
    payload = {
        "dim": family[0].dim,
        "bases": len(family),
        "unbiasedness": report.to_json(),
        "checks": [c.to_json() for c in checks],
    }
    header = f"{len(family)} bases from {source}; max pair deviation {report.overall_max:.3e}"
    return Result(payload, header + "\n" + _check_lines(checks), checks)


def cmd_pauli_subgroups(cfg: RunConfig, args) -> Result:
    s = cfg.structure()
    dec = weylgroup.enumerate_subgroups(s, cfg.seed)
    payload = dec.to_json()
    lines = [f"{dec.count} commuting subgroups for {s.name} (excess {dec.excess(s.size)})"]
    for g in dec.subgroups:
        lines.append("  " + " ".join(f"({j},{i})" for j, i in g))
    covered = set().union(*map(set, dec.subgroups)) == {(j, i) for j in s.elements for i in s.elements}
    checks = [boolean_check("subgroups cover all labels", covered)]
    return Result(payload, "\n".join(lines), checks)


def cmd_pauli_check(cfg: RunConfig, args) -> Result:
    s = cfg.structure()
    return _checks_result(weylgroup.verification_suite(s, cfg.tolerance, cfg.seed), f"operator checks for {s.name}")


def cmd_bell_verify(cfg: RunConfig, args) -> Result:
    s = cfg.structure()
    return _checks_result(_suite("bell", cfg, s), f"Bell checks for {s.name}")


def cmd_tomo_demo(cfg: RunConfig, args) -> Result:
    s = cfg.structure()
    rng = np.random.default_rng(cfg.seed)
    if args.state == "random":
        rho = tomography.random_density_matrix(s.size, rng)
    elif args.state == "mixed":
        rho = tomography.maximally_mixed(s.size)
    else:
        try:
            rho = tomography.DensityMatrix.from_json(_load_json(args.state), cfg.tolerance)
        except (KeyError, TypeError, ValueError, MubkitError) as exc:
            raise UsageError(f"{args.state} is not a usable density matrix: {exc}") from exc
        if rho.dim != s.size:
            raise UsageError(f"state has dim {rho.dim}, expected {s.size}")
    table = tomography.measure(rho, tomography.measurement_bases(s, cfg.seed), cfg.shots, rng)
    est = tomography.estimate_coefficients(table, s, cfg.seed)
    out = tomography.DensityMatrix(tomography.synthesize(est.coefficients, s))
    residual = linalg.max_abs(out.matrix - rho.matrix)
    dof = tomography.degrees_of_freedom_report(s)
    payload = {
        "residual": residual,
        "dof": dof.to_json(),
        "rows": table.to_json(),
        "duplicate_spread": est.spread,
        "physical": out.is_physical(cfg.tolerance),
        "reconstructed": out.to_json(),
    }
    # sampled data carries shot noise; the exact-data bound does not apply
    bound = max(cfg.tolerance, 1e-9) if cfg.shots is None else np.inf
    checks = [residual_check("reconstruction residual", residual, bound)]
    if cfg.shots is None:
        checks.append(residual_check("duplicate estimates agree", est.spread, max(cfg.tolerance, 1e-9)))
    lines = [
        f"tomography of a {args.state} state on {s.name}"
        + (f" with {cfg.shots} shots" if cfg.shots else " (exact probabilities)"),
        f"  bases measured: {dof.bases}; parameters {dof.parameters}, measured values {dof.measured}, excess {dof.excess}",
        f"  max-entry residual {residual:.3e}; physical: {payload['physical']}",
    ]
    return Result(payload, "\n".join(lines) + "\n" + _check_lines(checks), checks)


def cmd_all(cfg: RunConfig, args) -> Result:
    s = cfg.structure()
    checks, sections, lines = [], [], []
    for section in SECTIONS:
        found = _suite(section, cfg, s)
        for c in found:
            c.name = f"{section}: {c.name}"
        sections.append({"name": section, "checks": [c.to_json() for c in found]})
        checks += found
        lines.append(f"== {section}")
        lines.append(_check_lines(found))
    payload = {
        "config": cfg.to_json(),
        "sections": sections,
        "checks": [c.to_json() for c in checks],
        "pass": all(c.passed for c in checks),
    }
    return Result(payload, "\n".join(lines), checks)


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--dim", type=int, default=3, help="dimension N (default 3)")
    p.add_argument(
        "--construction", choices=galois.CONSTRUCTIONS, default=galois.MOD_N, help="finite structure to build on"
    )
    p.add_argument("--character", choices=("digit", "trace"), default="digit", help="additive character (Galois only)")
    p.add_argument("--tol", type=float, default=None, help="tolerance (default 1e-10 or $MUBKIT_TOL)")
    p.add_argument("--seed", type=lambda x: int(x, 0), default=weylgroup.DEFAULT_SEED, help="RNG seed")
    p.add_argument("--json", action="store_true", help="emit JSON")
    p.add_argument("--output", metavar="FILE", help="write the JSON report to FILE")
    p.add_argument("--shots", type=int, default=None, help="multinomial shots per basis (tomography)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="mubkit", description="finite-field bases, Pauli groups, Bell states, tomography")
    sub = parser.add_subparsers(dest="command", required=True)

    def group(name, help_):
        p = sub.add_parser(name, help=help_)
        return p.add_subparsers(dest="action", required=True)

    field_ = group("field", "finite ring / field tables")
    field_.add_parser("show", parents=[common]).set_defaults(func=cmd_field_show)

    mub = group("mub", "basis families")
    mub.add_parser("generate", parents=[common]).set_defaults(func=cmd_mub_generate)
    verify = mub.add_parser("verify", parents=[common])
    verify.add_argument("--input", help="basis or family JSON file")
    verify.add_argument("--require-mub", action="store_true", help="demand mutual unbiasedness")
    verify.set_defaults(func=cmd_mub_verify)

    pauli = group("pauli", "error operators and commuting subgroups")
    pauli.add_parser("subgroups", parents=[common]).set_defaults(func=cmd_pauli_subgroups)
    pauli.add_parser("check", parents=[common]).set_defaults(func=cmd_pauli_check)

    bell_ = group("bell", "generalized Bell states")
    bell_.add_parser("verify", parents=[common]).set_defaults(func=cmd_bell_verify)

    tomo = group("tomo", "state tomography")
    demo = tomo.add_parser("demo", parents=[common])
    demo.add_argument("--state", default="random", help="random, mixed, or a density-matrix JSON file")
    demo.set_defaults(func=cmd_tomo_demo)

    sub.add_parser("all", parents=[common], help="run every verification suite").set_defaults(func=cmd_all)
    return parser


def _config(args) -> RunConfig:
    tol = args.tol if args.tol is not None else linalg.default_tol()
    return RunConfig(
        dim=args.dim,
        construction=args.construction,
        tolerance=tol,
        seed=args.seed,
        output="json" if args.json else "text",
        shots=args.shots,
        character=args.character,
    )


def render(result: Result, cfg: RunConfig) -> str:
    if cfg.output == "json":
        return json.dumps(result.payload, indent=2, sort_keys=True) + "\n"
    return result.text + "\n"


def run(command, cfg: RunConfig, args=None) -> tuple[int, Result]:
    """Run a command function under ``cfg``; returns (exit status, result)."""
    result = command(cfg, args)
    return (EXIT_FAIL if result.failures else EXIT_OK), result


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = _config(args)
        status, result = run(args.func, cfg, args)
    except (UsageError, NotPrimePower, TooLarge, ValueError) as exc:
        print(f"mubkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MubkitError as exc:
        # a library invariant broke while running checks
        print(f"mubkit: check failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL

    # files are always JSON so they can be fed back to the verify commands;
    # stdout then only carries the text summary
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(render(result, RunConfig(**{**cfg.__dict__, "output": "json"})))
        if cfg.output == "text":
            sys.stdout.write(render(result, cfg))
    else:
        sys.stdout.write(render(result, cfg))
    if status == EXIT_FAIL:
        print("failed checks: " + ", ".join(result.failures), file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
