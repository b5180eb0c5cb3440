"""Command-line front end: synthesis, splitting, completion, analysis, verify.

All outputs are plain CSV/JSON written with repr-precision floats, so a rerun
with the same inputs and seeds is byte-identical.  Exit codes: 0 success,
1 usage error, 2 infeasible geometry or singular system, 3 verification
failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import bounds, picard, split_l1, split_ls, synth
from .farfield import (
    FarField,
    field_from_csv,
    field_from_json,
    field_to_csv,
    field_to_json,
    translate,
    translate_via_coefficients,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_VERIFY = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="farsplit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="synthesize a scene's far field")
    p_synth.add_argument("scene", help="scene JSON file")
    p_synth.add_argument("--out", default=".", help="output directory")
    p_synth.add_argument("--format", choices=["csv", "json"], default="csv")

    for name in ("split", "complete"):
        p = sub.add_parser(name, help=f"{name} a far field")
        p.add_argument("--method", choices=["ls", "l1"], default="ls")
        p.add_argument("--scene", required=True, help="scene JSON file")
        p.add_argument("--gamma", required=True, help="observed far field (csv/json)")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--mu", type=float, default=1e-3)
        p.add_argument("--iters", type=int, default=1000)
        p.add_argument("--tol", type=float, default=1e-10)
        p.add_argument("--weights", default="uniform",
                       help="auto | uniform | comma-separated list")

    p_an = sub.add_parser("analyze", help="spectral and bound tables")
    an_sub = p_an.add_subparsers(dest="what", required=True)
    p_svd = an_sub.add_parser("svd", help="squared singular value table")
    p_svd.add_argument("--R", type=float, required=True)
    p_svd.add_argument("--n-max", type=int, default=None)
    p_svd.add_argument("--out", default=None, help="CSV path (default stdout)")
    p_bounds = an_sub.add_parser("bounds", help="stability constants table")
    p_bounds.add_argument("--geometry", required=True, help="geometry JSON file")
    p_bounds.add_argument("--out", default=None, help="CSV path (default stdout)")

    p_verify = sub.add_parser("verify", help="run the property suites")
    p_verify.add_argument("--trials", type=int, default=1000)
    p_verify.add_argument("--seed", type=int, default=7)
    return parser


def _load_field(path: str) -> FarField:
    if path.endswith(".json"):
        return field_from_json(path)
    return field_from_csv(path)


def _geometry_from_scene(scene: synth.Scene, with_orders: bool) -> split_ls.SplitGeometry:
    orders = (
        tuple(c.effective_order(scene.k) for c in scene.components)
        if with_orders else None
    )
    return split_ls.SplitGeometry(
        centers=tuple(c.center for c in scene.components),
        orders=orders,
        grid=scene.grid,
        k=scene.k,
        omega=scene.omega,
    )


def _solution_json(solution: split_ls.SplitSolution) -> dict:
    diag = solution.diagnostics
    return {
        "method": diag.method,
        "residual": solution.residual,
        "condition_number": diag.condition_number,
        "iterations": diag.iterations,
        "objective": diag.objective,
        "alphas": [
            {
                "order": w.order,
                "re": [float(v) for v in w.values.real],
                "im": [float(v) for v in w.values.imag],
            }
            for w in solution.alphas
        ],
    }


def _write_solution(solution: split_ls.SplitSolution, scene: synth.Scene,
                    gamma: FarField, out: Path, completed: bool) -> None:
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "solution.json", "w") as fh:
        json.dump(_solution_json(solution), fh, indent=1)
        fh.write("\n")
    field_to_csv(solution.beta, out / "beta.csv")
    for i, (window, comp) in enumerate(zip(solution.alphas, scene.components)):
        own = FarField.from_window(scene.grid, window)
        cx, cy = comp.center
        placed = translate(own, (-cx, -cy), scene.k)
        field_to_csv(placed, out / f"component_{i:02d}.csv")
    if solution.diagnostics.trace is not None:
        with open(out / "objective_trace.csv", "w") as fh:
            fh.write("iter,objective,residual\n")
            for it, obj, res in solution.diagnostics.trace:
                fh.write(f"{it},{obj!r},{res!r}\n")
    if completed:
        merged = split_ls.completed_farfield(solution, gamma, scene.omega)
        field_to_csv(merged, out / "completed.csv")


def _cmd_synth(args) -> int:
    scene = synth.load_scene(args.scene)
    data = synth.scene_farfield(scene)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.format == "csv":
        field_to_csv(data.gamma, out / "gamma.csv")
        field_to_csv(data.beta_truth, out / "beta_truth.csv")
    else:
        field_to_json(data.gamma, out / "gamma.json", k=scene.k)
        field_to_json(data.beta_truth, out / "beta_truth.json", k=scene.k)
    truth_doc = [
        {
            "order": w.order,
            "re": [float(v) for v in w.values.real],
            "im": [float(v) for v in w.values.imag],
        }
        for w in data.truth
    ]
    with open(out / "truth.json", "w") as fh:
        json.dump(truth_doc, fh, indent=1)
        fh.write("\n")
    return EXIT_OK


def _parse_weights(spec: str):
    if spec in ("auto", "uniform"):
        return spec
    try:
        return [float(v) for v in spec.split(",")]
    except ValueError as exc:
        raise _UsageError(f"bad weights {spec!r}") from exc


def _cmd_split(args, completed: bool) -> int:
    scene = synth.load_scene(args.scene)
    gamma = _load_field(args.gamma)
    if gamma.grid != scene.grid:
        raise _UsageError("gamma grid does not match the scene grid")
    if completed and scene.omega is None:
        raise _UsageError("complete requires a scene with a missing-data arc")
    out = Path(args.out)
    if args.method == "ls":
        geometry = _geometry_from_scene(scene, with_orders=True)
        system = split_ls.assemble(geometry)
        solution = split_ls.solve(system, gamma)
    else:
        geometry = _geometry_from_scene(scene, with_orders=False)
        config = split_l1.L1Config(
            mu=args.mu,
            max_iters=args.iters,
            tol=args.tol,
            weights=_parse_weights(args.weights),
        )
        solution = split_l1.fista_split(gamma, geometry, config)
    _write_solution(solution, scene, gamma, out, completed)
    return EXIT_OK


def _cmd_analyze_svd(args) -> int:
    spec = picard.spectrum(args.R, args.n_max)
    lines = ["n,s_n_squared,asymptote_2sqrt(R^2-n^2)"]
    for n, value in enumerate(spec.values):
        asym = 2.0 * math.sqrt(args.R**2 - n * n) if n <= args.R else 0.0
        lines.append(f"{n},{float(value)!r},{asym!r}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_analyze_bounds(args) -> int:
    with open(args.geometry) as fh:
        doc = json.load(fh)
    geometry = bounds.BoundGeometry(
        k=float(doc.get("k", 1.0)),
        centers=tuple(tuple(c) for c in doc.get("centers", [])),
        orders=tuple(doc["orders"]) if doc.get("orders") is not None else None,
        sparsities=(
            tuple(doc["sparsities"]) if doc.get("sparsities") is not None else None
        ),
        omega_measure=doc.get("omega_measure"),
    )
    data = bounds.BoundData(
        delta=doc.get("delta"),
        gamma_diff=doc.get("gamma_diff"),
        tau=doc.get("tau"),
    )
    reports = bounds.evaluate_all(
        geometry,
        data,
        weight_variant=doc.get("weight_variant", "pairwise"),
        conservative=bool(doc.get("conservative", False)),
    )
    lines = ["theorem,feasible,constant"]
    for rep in reports:
        lines.append(f"{rep.theorem.value},{rep.hypotheses_ok},{rep.constant!r}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify: numerical property suites, exits nonzero on any violation
# ---------------------------------------------------------------------------

def _suite_uncertainty(theorem: bounds.TheoremId, trials: int, seed: int):
    stats = bounds.verify_uncertainty(theorem, trials, seed)
    ok = stats.violations == 0
    return (
        f"uncertainty {theorem.value}",
        ok,
        f"max ratio {stats.max_ratio:.6f}, violations {stats.violations}/{stats.trials}",
    )


def _suite_krasikov(_trials: int, _seed: int):
    r = np.arange(6.01, 100.0, 0.01)
    worst = bounds.krasikov_check(1, 1, r)
    for m_ord, n_ord in ((2, 3), (5, 5)):
        floor = 2 * (m_ord + n_ord + 1)
        worst = max(
            worst,
            bounds.krasikov_check(m_ord, n_ord, np.arange(floor + 0.01, 200.0, 0.05)),
        )
    from .bessel import KRASIKOV_BOUND

    return (
        "bessel amplitude bound",
        worst <= KRASIKOV_BOUND,
        f"max r*J^2 = {worst:.6f} (limit {KRASIKOV_BOUND})",
    )


def _suite_spectral_sum(_trials: int, _seed: int):
    worst = 0.0
    for radius in (1.0, 10.0, 100.0):
        total = picard.spectrum(radius).partial_sum()
        worst = max(worst, abs(total - math.pi * radius**2) / (math.pi * radius**2))
    return ("spectral sum identity", worst <= 1e-8, f"max rel err {worst:.3e}")


def _suite_monotonicity(_trials: int, _seed: int):
    from .bessel import bessel_j

    worst = 0.0
    neg = 0
    for radius in (3.0, 10.0, 25.0):
        spec = picard.spectrum(radius, n_max=int(3 * radius) + 60)
        for n in range(1, int(2 * radius) + 20):
            lhs = spec.values[n - 1] - spec.values[n + 1]
            rhs = 4.0 * math.pi * n * bessel_j(n, radius) ** 2
            if lhs < -1e-10:
                neg += 1
            scale = max(abs(rhs), 1e-300)
            worst = max(worst, abs(lhs - rhs) / max(scale, 1e-12))
    ok = worst <= 1e-6 and neg == 0
    return ("even/odd monotonicity identity", ok, f"max rel err {worst:.3e}")


def _suite_decay(_trials: int, _seed: int):
    bad = 0
    for radius in (2.0, 7.5, 20.0):
        for n in range(math.ceil(radius), math.ceil(radius) + 40):
            if picard.decay_bound(n, radius) < picard.squared_singular_value(n, radius):
                bad += 1
    return ("spectral decay bound dominates", bad == 0, f"violations {bad}")


def _suite_translation(trials: int, seed: int):
    rng = np.random.default_rng(seed)
    from .farfield import AngularGrid

    grid = AngularGrid(512)
    worst = 0.0
    for _ in range(min(trials, 50)):
        coeffs = np.zeros(512, complex)
        band = 20
        idx = np.arange(-band, band + 1) % 512
        coeffs[idx] = rng.standard_normal(2 * band + 1) + 1j * rng.standard_normal(
            2 * band + 1
        )
        alpha = FarField.from_coeffs(grid, coeffs)
        c = (rng.uniform(-30, 30), rng.uniform(-30, 30))
        k = rng.uniform(0.5, 2.0)
        direct = translate(alpha, c, k)
        oracle = translate_via_coefficients(alpha, c, k)
        err = (direct - oracle).norm() / max(alpha.norm(), 1e-300)
        worst = max(worst, err)
    return ("translation oracle equivalence", worst <= 1e-8, f"max rel err {worst:.3e}")


def _cmd_verify(args) -> int:
    jobs = [
        lambda: _suite_uncertainty(bounds.TheoremId.U_L0, args.trials, args.seed),
        lambda: _suite_uncertainty(bounds.TheoremId.U_BAND, args.trials, args.seed + 1),
        lambda: _suite_uncertainty(bounds.TheoremId.U_MIXED, args.trials, args.seed + 2),
        lambda: _suite_krasikov(args.trials, args.seed),
        lambda: _suite_spectral_sum(args.trials, args.seed),
        lambda: _suite_monotonicity(args.trials, args.seed),
        lambda: _suite_decay(args.trials, args.seed),
        lambda: _suite_translation(args.trials, args.seed),
    ]
    workers = int(os.environ.get("FARSPLIT_THREADS", "1"))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda job: job(), jobs))
    else:
        results = [job() for job in jobs]
    failed = 0
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        if not ok:
            failed += 1
    return EXIT_OK if failed == 0 else EXIT_VERIFY


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "synth":
            return _cmd_synth(args)
        if args.command == "split":
            return _cmd_split(args, completed=False)
        if args.command == "complete":
            return _cmd_split(args, completed=True)
        if args.command == "analyze":
            if args.what == "svd":
                return _cmd_analyze_svd(args)
            return _cmd_analyze_bounds(args)
        if args.command == "verify":
            return _cmd_verify(args)
        raise _UsageError(f"unknown command {args.command!r}")
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (split_ls.SingularSystemError, ValueError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
