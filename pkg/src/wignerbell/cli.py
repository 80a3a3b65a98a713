"""Command-line front end.

Exit codes: 0 when every check passes, 1 when a property check fails,
2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from collections.abc import Sequence

import numpy as np

from wignerbell import __version__
from wignerbell.bellstate import BellVector, bell_rotation, so4_residuals, transform_bell
from wignerbell.density import (
    Spectrum,
    block_diagonalize,
    entropy_from_blocks,
    one_particle_from_C,
    reduce_state,
    von_neumann_entropy,
)
from wignerbell.errors import BoundaryLeakError, GridCollisionError, WignerBellError
from wignerbell.fockspace import Mode, fock_from_bell, lorentz_transform_state, two_particle_from_C
from wignerbell.generators import (
    CROSSED,
    MATCHED,
    GridSpec,
    WavefunctionGrid,
    convergence_study,
    default_packets,
    hermiticity_margin,
    hermiticity_table,
    spin_algebra_residual,
)
from wignerbell.lorentz import (
    BoostParams,
    RotationParams,
    boost_matrix,
    on_shell,
    polar_decompose,
    random_lorentz,
    random_momentum,
    rotation_matrix,
)
from wignerbell.wigner import oracle_rotation, wigner_finite
from wignerbell.zeta import (
    ZetaSpectrum,
    direct_entropy,
    entropy_via_alpha,
    entropy_via_inverse_zeta_at_one,
    entropy_via_zeta_at_minus_one,
)

TOLERANCES: dict[str, float] = {
    "oracle": 1e-10,
    "orthogonality": 1e-10,
    "norm": 1e-12,
    "entropy": 1e-10,
    "zeta": 1e-12,
    "invariance": 1e-10,
    "spectrum": 1e-10,
    "order_low": 3.5,
    "order_high": 4.5,
    "hermiticity_margin": 10.0,
    "spin_algebra": 1e-14,
    "boundary": 1e-8,
}


class UsageError(Exception):
    pass


class CheckFailure(Exception):
    """A property check could not be completed; carries a partial report."""

    def __init__(self, message: str, report: dict):
        super().__init__(message)
        self.report = report


def _floats(text: str, n: int, what: str) -> np.ndarray:
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"{what}: expected {n} comma-separated numbers, got {text!r}") from None
    if len(vals) != n or not all(np.isfinite(vals)):
        raise UsageError(f"{what}: expected {n} finite comma-separated numbers, got {text!r}")
    return np.array(vals)


def _axis(v: np.ndarray, what: str) -> tuple[float, float, float]:
    n = np.linalg.norm(v)
    if n == 0:
        raise UsageError(f"{what}: axis must be nonzero")
    return tuple(float(x) for x in v / n)


def _lambda_from_spec(spec: Sequence[tuple[str, str]]) -> np.ndarray:
    """Product of the factors in the order given; the rightmost acts first."""
    L = np.eye(4)
    for kind, text in spec:
        a, *axis = _floats(text, 4, f"--{kind}")
        if kind == "rotate":
            L = L @ rotation_matrix(RotationParams(a, _axis(np.array(axis), "--rotate")))
        else:
            if a < 0:
                raise UsageError("--boost: rapidity must be nonnegative (flip the axis instead)")
            L = L @ boost_matrix(BoostParams(a, _axis(np.array(axis), "--boost")))
    return L


class _LambdaAction(argparse.Action):
    def __call__(self, parser, namespace, values, option_string=None):
        items = list(getattr(namespace, "lambda_spec", None) or [])
        items.append((self.dest, values))
        namespace.lambda_spec = items


def _complex_list(text: str, n: int, what: str) -> np.ndarray:
    try:
        vals = [complex(x.strip().replace(" ", "")) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"{what}: expected {n} comma-separated complex numbers, got {text!r}") from None
    if len(vals) != n:
        raise UsageError(f"{what}: expected {n} values, got {len(vals)}")
    return np.array(vals)


def _cx(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def _matrix(M) -> list:
    M = np.asarray(M)
    if np.iscomplexobj(M):
        return [[_cx(z) for z in row] for row in M]
    return M.tolist()


# ---------------------------------------------------------------- commands


def cmd_wigner(args, tol) -> dict:
    L = _lambda_from_spec(getattr(args, "lambda_spec", None) or [])
    if not args.mass > 0:
        raise UsageError("--mass must be positive")
    p = on_shell(_floats(args.momentum, 3, "--momentum"), args.mass)
    w = wigner_finite(L, p, args.mass)
    oracle = oracle_rotation(L, p, args.mass)
    residual = float(np.abs(w.so3 - oracle.so3).max())
    return {
        "lambda": L.tolist(),
        "momentum": p.tolist(),
        "mass": args.mass,
        "angle": w.angle,
        "axis": w.axis.tolist(),
        "angle_vector": w.angle_vector.tolist(),
        "quaternion": w.quat.tolist(),
        "su2": _matrix(w.su2),
        "oracle_residual": residual,
        "checks": {"oracle": residual <= tol["oracle"]},
    }


def cmd_bell_transform(args, tol) -> dict:
    L = _lambda_from_spec(getattr(args, "lambda_spec", None) or [])
    if not (args.m1 > 0 and args.m2 > 0):
        raise UsageError("masses must be positive")
    p1 = on_shell(_floats(args.p1, 3, "--p1"), args.m1)
    p2 = on_shell(_floats(args.p2, 3, "--p2"), args.m2)
    C = _complex_list(args.amplitudes, 4, "--amplitudes")
    b = BellVector(p1, p2, C, (args.species1, args.species2))
    out = transform_bell(L, b, args.m1, args.m2)
    R, w1, w2 = bell_rotation(L, p1, p2, args.m1, args.m2)
    orth, det = so4_residuals(R)
    norm_res = abs(out.norm2 - b.norm2)
    return {
        "lambda": L.tolist(),
        "so4": R.tolist(),
        "theta_w1": w1.angle_vector.tolist(),
        "theta_w2": w2.angle_vector.tolist(),
        "p1": out.p1.tolist(),
        "p2": out.p2.tolist(),
        "amplitudes_in": [_cx(z) for z in C],
        "amplitudes_out": [_cx(z) for z in out.amplitudes],
        "orthogonality_residual": orth,
        "det_residual": det,
        "norm_residual": norm_res,
        "checks": {
            "orthogonality": max(orth, det) <= tol["orthogonality"],
            "norm": norm_res <= tol["norm"] * max(1.0, b.norm2),
        },
    }


def _demo_case(name: str, C: np.ndarray, expected: float, tol) -> dict:
    rho = one_particle_from_C(C)
    spec = Spectrum.of(rho)
    S = von_neumann_entropy(rho)
    S_blocks = entropy_from_blocks(block_diagonalize(C))
    z = ZetaSpectrum.of(spec)
    routes = {
        "zeta_at_minus_one": entropy_via_zeta_at_minus_one(z),
        "inverse_zeta_at_one": entropy_via_inverse_zeta_at_one(z),
        **{f"alpha_{a:g}": entropy_via_alpha(z, a) for a in (-2.0, -1.0, -0.5, 0.5, 1.0, 2.0)},
    }
    direct = direct_entropy(z)
    zeta_res = max(abs(v - direct) for v in routes.values())
    return {
        "case": name,
        "C": _matrix(C),
        "rho1_trace": rho.trace,
        "spectrum": list(spec.eigenvalues),
        "S1": S,
        "expected": expected,
        "residual": abs(S - expected),
        "S1_blocks": S_blocks,
        "zeta": routes,
        "zeta_residual": zeta_res,
        "checks": {
            "entropy": abs(S - expected) <= tol["entropy"] and abs(S_blocks - expected) <= tol["entropy"],
            "zeta": zeta_res <= tol["zeta"],
        },
    }


def entropy_demo_matrices() -> tuple[np.ndarray, np.ndarray]:
    """The unentangled pair (one 1/2 block) and the B^0 pair (two 1/(2 sqrt 2) blocks).

    Mode order for the second matrix: (p1,+), (p1,-), (p2,+), (p2,-).
    """
    unentangled = np.array([[0, 0.5], [-0.5, 0]], dtype=complex)
    c = 1.0 / (2.0 * np.sqrt(2.0))
    singlet = np.zeros((4, 4), dtype=complex)
    singlet[0, 3], singlet[3, 0] = c, -c
    singlet[1, 2], singlet[2, 1] = -c, c
    return unentangled, singlet


def cmd_entropy_demo(args, tol) -> dict:
    unentangled, singlet = entropy_demo_matrices()
    cases = [
        _demo_case("unentangled", unentangled, float(np.log(2.0)), tol),
        _demo_case("bell_B0", singlet, float(2.0 * np.log(2.0)), tol),
    ]
    return {
        "cases": cases,
        "checks": {f"{c['case']}_{k}": v for c in cases for k, v in c["checks"].items()},
    }


def _random_pair_state(rng: np.random.Generator, kind: str, max_rapidity: float):
    m = 1.0
    p1 = random_momentum(rng, m, max_rapidity)
    p2 = random_momentum(rng, m, max_rapidity)
    if kind == "bell":
        C = np.zeros(4, dtype=complex)
        C[rng.integers(4)] = 1.0
        return fock_from_bell(BellVector(p1, p2, C, (0, 0)))
    modes = [Mode(p1[1:], 0), Mode(p1[1:], 1), Mode(p2[1:], 0), Mode(p2[1:], 1)]
    A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    return two_particle_from_C(A - A.T, modes).normalized()


def cmd_invariance_sweep(args, tol) -> dict:
    if args.samples < 1:
        raise UsageError("--samples must be at least 1")
    if not args.max_rapidity >= 0:
        raise UsageError("--max-rapidity must be nonnegative")
    rng = np.random.default_rng(args.seed)
    rows = []
    for i in range(args.samples):
        L, _, _ = random_lorentz(rng, args.max_rapidity)
        state = _random_pair_state(rng, "bell" if i % 2 == 0 else "random", args.max_rapidity)
        try:
            moved = lorentz_transform_state(L, state, 1.0)
        except GridCollisionError as exc:
            raise CheckFailure(f"grid collision at sample {i} for Lambda = {L.tolist()}: {exc}", {"rows": rows}) from exc
        a = reduce_state(state, 1).spectrum()
        b = reduce_state(moved, 1).spectrum()
        rows.append(
            {
                "sample": i,
                "kind": "bell" if i % 2 == 0 else "random",
                "rapidity": polar_decompose(L)[1].rapidity,
                "abs_dS1": abs(a.entropy() - b.entropy()),
                "abs_dspectrum": a.displacement(b),
            }
        )
    max_ds = max(r["abs_dS1"] for r in rows)
    max_dl = max(r["abs_dspectrum"] for r in rows)
    return {
        "samples": args.samples,
        "max_rapidity": args.max_rapidity,
        "rows": rows,
        "max_abs_dS1": max_ds,
        "max_abs_dspectrum": max_dl,
        "checks": {"entropy": max_ds <= tol["invariance"], "spectrum": max_dl <= tol["spectrum"]},
        "_table": rows,
    }


def cmd_generators_check(args, tol) -> dict:
    if args.levels < 2:
        raise UsageError("--levels must be at least 2")
    try:
        spec = GridSpec(args.n, args.mass, args.extent)
    except (ValueError, WignerBellError) as exc:
        raise UsageError(str(exc)) from exc
    phi_p, psi_p = default_packets()
    phi = WavefunctionGrid.from_packet(spec, phi_p)
    psi = WavefunctionGrid.from_packet(spec, psi_p)
    boundary = max(phi.boundary_max(), psi.boundary_max())
    if boundary > tol["boundary"]:
        raise CheckFailure(
            f"boundary leak: max |psi| on the outer shells is {boundary:.3g}",
            {"boundary_max": boundary},
        )
    try:
        study = convergence_study(psi_p, spec, args.levels)
        herm = hermiticity_table(phi, psi)
    except BoundaryLeakError as exc:
        raise CheckFailure(str(exc), {"boundary_max": boundary}) from exc
    ratios = study.ratios()
    margin = hermiticity_margin(herm)
    spin = spin_algebra_residual()
    table = []
    for name, res in study.residuals.items():
        for j, h in enumerate(study.h):
            table.append(
                {"family": name, "h": h, "residual": res[j], "ratio": ratios[name][j - 1] if j else float("nan")}
            )
    return {
        "grid": {"n": spec.n, "extent": spec.extent, "mass": spec.mass, "h": spec.h, "levels": args.levels},
        "boundary_max": boundary,
        "commutators": {k: {"residuals": list(v), "ratios": list(ratios[k])} for k, v in study.residuals.items()},
        "hermiticity": {
            f"{'with' if term else 'without'}_term|{measure}": val for (term, measure), val in herm.items()
        },
        "hermiticity_matched": [f"{'with' if t else 'without'}_term|{m}" for t, m in MATCHED],
        "hermiticity_crossed": [f"{'with' if t else 'without'}_term|{m}" for t, m in CROSSED],
        "hermiticity_margin": margin,
        "spin_algebra_residual": spin,
        "checks": {
            "order": study.within(tol["order_low"], tol["order_high"]),
            "hermiticity": margin >= tol["hermiticity_margin"],
            "spin_algebra": spin <= tol["spin_algebra"],
        },
        "_table": table,
    }


COMMANDS = {
    "wigner": cmd_wigner,
    "bell-transform": cmd_bell_transform,
    "entropy-demo": cmd_entropy_demo,
    "invariance-sweep": cmd_invariance_sweep,
    "generators-check": cmd_generators_check,
}


# ---------------------------------------------------------------- plumbing


def _parse_tolerances(items: Sequence[str]) -> dict[str, float]:
    tol = dict(TOLERANCES)
    for item in items or []:
        name, sep, value = item.partition("=")
        name = name.strip()
        if not sep or name not in TOLERANCES:
            raise UsageError(f"--tol: unknown tolerance {name!r}; known: {', '.join(sorted(TOLERANCES))}")
        try:
            v = float(value)
        except ValueError:
            raise UsageError(f"--tol {name}: {value!r} is not a number") from None
        if not np.isfinite(v) or v < 0:
            raise UsageError(f"--tol {name}: must be a nonnegative finite number")
        tol[name] = v
    return tol


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE")

    lam = argparse.ArgumentParser(add_help=False)
    lam.add_argument("--rotate", action=_LambdaAction, metavar="PSI,NX,NY,NZ")
    lam.add_argument("--boost", action=_LambdaAction, metavar="ALPHA,NX,NY,NZ")

    parser = argparse.ArgumentParser(prog="wignerbell", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("wigner", parents=[common, lam], help="Wigner rotation for one momentum")
    p.add_argument("--momentum", default="0,0,0", metavar="PX,PY,PZ")
    p.add_argument("--mass", type=float, default=1.0)

    p = sub.add_parser("bell-transform", parents=[common, lam], help="transform a Bell superposition")
    p.add_argument("--p1", required=True, metavar="PX,PY,PZ")
    p.add_argument("--p2", required=True, metavar="PX,PY,PZ")
    p.add_argument("--m1", type=float, default=1.0)
    p.add_argument("--m2", type=float, default=1.0)
    p.add_argument("--species1", type=int, default=0)
    p.add_argument("--species2", type=int, default=0)
    p.add_argument("--amplitudes", default="1,0,0,0", metavar="C0,C1,C2,C3")

    sub.add_parser("entropy-demo", parents=[common], help="worked entropy examples")

    p = sub.add_parser("invariance-sweep", parents=[common], help="entropy invariance over random boosts")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--max-rapidity", type=float, default=3.0)

    p = sub.add_parser("generators-check", parents=[common], help="Lie algebra and Hermiticity on a grid")
    p.add_argument("--n", type=int, default=33)
    p.add_argument("--extent", type=float, default=None)
    p.add_argument("--mass", type=float, default=1.0)
    p.add_argument("--levels", type=int, default=2)
    return parser


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items() if not k.startswith("_")}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else None
    return obj


def _flatten(prefix: str, obj, out: list) -> None:
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else k, v, out)
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, out)
    else:
        out.append((prefix, obj))


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(_jsonable(report), indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    meta = {"version": report["version"], "seed": report["seed"], "passed": report["passed"]}
    table = report.get("_table")
    if table:
        cols = list(table[0])
        w.writerow(cols + list(meta))
        for row in table:
            w.writerow([_csv_cell(row[c]) for c in cols] + [_csv_cell(v) for v in meta.values()])
        return buf.getvalue()
    rows: list = []
    _flatten("", _jsonable(report), rows)
    w.writerow(["key", "value"])
    for k, v in rows:
        w.writerow([k, _csv_cell(v)])
    return buf.getvalue()


def _csv_cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return "" if v is None else str(v)


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        tol = _parse_tolerances(args.tol)
    except UsageError as exc:
        parser.error(str(exc))
    header = {"tool": "wignerbell", "version": __version__, "command": args.command, "seed": args.seed, "tolerances": tol}
    try:
        body = COMMANDS[args.command](args, tol)
    except (UsageError, WignerBellError, ValueError) as exc:
        print(f"wignerbell {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except CheckFailure as exc:
        print(f"wignerbell {args.command}: check failed: {exc}", file=sys.stderr)
        report = {**header, **exc.report, "checks": {"completed": False}, "passed": False, "error": str(exc)}
        _emit(render(report, "json" if args.format == "json" else "csv"), args.output)
        return 1
    checks = body.get("checks", {})
    report = {**header, **body, "passed": all(checks.values())}
    _emit(render(report, args.format), args.output)
    return 0 if report["passed"] else 1


if __name__ == "__main__":
    raise SystemExit(main())
