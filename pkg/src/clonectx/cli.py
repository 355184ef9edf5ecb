"""Command-line front end.

Subcommands expose the closed-form bounds, the clone optimizer, the noisy
quantum experiment, violation-region and critical-noise root finding,
figure-data emission, and the two verification suites (ontological model
and quantum simulation).  Reports go to standard output as plain text, or
as a single JSON document with ``--json``; elapsed wall time goes to
standard error so that identical invocations produce byte-identical
reports.  Exit status: 0 when every verdict passes, 1 when any fails,
2 for argument errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import bounds, ontic, quantum, scan

ACCEPT_EXACT = 1e-12
CLONE_TOL = 1e-7


@dataclass
class RunReport:
    command: str
    inputs: dict
    outputs: dict = field(default_factory=dict)
    verdicts: list = field(default_factory=list)
    wall_time_s: float = 0.0

    def add_verdict(self, name: str, ok: bool | None, detail: str = "") -> None:
        status = "skipped" if ok is None else ("pass" if ok else "fail")
        self.verdicts.append({"name": name, "status": status, "detail": detail})

    @property
    def failed(self) -> bool:
        return any(v["status"] == "fail" for v in self.verdicts)

    def render_text(self) -> str:
        lines = [f"command: {self.command}"]
        if self.inputs:
            lines.append("inputs:")
            lines += [f"  {k} = {v}" for k, v in self.inputs.items()]
        if self.outputs:
            lines.append("outputs:")
            lines += [f"  {k} = {v}" for k, v in self.outputs.items()]
        if self.verdicts:
            lines.append("verdicts:")
            for v in self.verdicts:
                tag = {"pass": "PASS", "fail": "FAIL", "skipped": "SKIP"}[v["status"]]
                detail = f"  ({v['detail']})" if v["detail"] else ""
                lines.append(f"  [{tag}] {v['name']}{detail}")
            lines.append(f"result: {'FAIL' if self.failed else 'PASS'}")
        return "\n".join(lines)

    def render_json(self) -> str:
        doc = {
            "command": self.command,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "verdicts": self.verdicts,
            "result": "fail" if self.failed else "pass",
        }
        return json.dumps(doc, indent=1)


def _probability(text: str) -> float:
    try:
        x = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc
    if not 0.0 <= x <= 1.0:
        raise argparse.ArgumentTypeError(f"value {x} outside [0, 1]")
    return x


def _positive_int(text: str) -> int:
    try:
        x = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from exc
    if x <= 0:
        raise argparse.ArgumentTypeError(f"value {x} must be positive")
    return x


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clonectx",
        description="Cloning-fidelity bounds, noisy-experiment simulation and noncontextuality verification.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit the report as JSON")
    modes = argparse.ArgumentParser(add_help=False)
    modes.add_argument("--err-mode", choices=scan.ERR_MODES, default="thm2-direct")
    modes.add_argument("--c-mode", choices=scan.C_MODES, default="observed-confusability")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", parents=[common], help="closed-form fidelity bounds at a given overlap")
    p.add_argument("--c", type=_probability, required=True, help="input confusability in [0, 1]")
    p.add_argument("--v", type=_probability, default=None, help="depolarizing noise level in [0, 1]")

    p = sub.add_parser("clones", parents=[common], help="optimize the clone outputs and cross-check the closed form")
    p.add_argument("--c", type=_probability, required=True)

    p = sub.add_parser("noise", parents=[common], help="simulate the depolarized experiment")
    p.add_argument("--v", type=_probability, required=True)
    p.add_argument("--c", type=_probability, required=True)

    p = sub.add_parser("region", parents=[common, modes], help="confusability interval with a quantum advantage")
    p.add_argument("--v", type=_probability, required=True)

    p = sub.add_parser("critical-noise", parents=[common, modes], help="largest noise level keeping the advantage")
    p.add_argument("--c", type=_probability, required=True)

    p = sub.add_parser("curves", parents=[common], help="write figure data (fidelity tradeoff, noise resistance)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--points", type=_positive_int, default=500)
    p.add_argument("--c-mode", choices=scan.C_MODES, default="observed-confusability")

    p = sub.add_parser("verify-ontic", parents=[common], help="build the saturating model and run every check")
    p.add_argument("--c", type=_probability, required=True)
    p.add_argument("--resolution", type=_positive_int, default=200)

    p = sub.add_parser("verify-quantum", parents=[common], help="verify the noisy experiment against closed forms")
    p.add_argument("--v", type=_probability, required=True)
    p.add_argument("--c", type=_probability, required=True)

    return parser


def _cmd_bounds(args: argparse.Namespace) -> RunReport:
    c = args.c
    report = RunReport("bounds", inputs={"c": c, "v": args.v})
    report.outputs["quantum_optimal_fidelity"] = bounds.quantum_optimal_fidelity(c)
    report.outputs["nc_bound_ideal"] = bounds.nc_bound_ideal(c, c * c)
    report.outputs["nc_discrimination_bound"] = bounds.nc_discrimination_bound(c)
    if args.v is not None:
        v = args.v
        eb = bounds.depolarizing_epsilons(v)
        terms = bounds.err_terms(v)
        noisy = bounds.nc_bound_noisy(bounds.OverlapParams.symmetric(c), eb)
        symm = bounds.nc_bound_noisy_symmetric(bounds.OverlapParams.symmetric(c), eb)
        report.outputs.update(
            {
                "eps_single_copy": eb.eps_a,
                "eps_two_copy": eb.eps_aa,
                "err_thm2": terms.err_thm2,
                "err_appendix": terms.err_appendix,
                "err_prime": terms.err_prime,
                "eps_effective": terms.eps_effective,
                "nc_bound_noisy": noisy.value,
                "nc_bound_noisy_clamped": noisy.clamped,
                "nc_bound_noisy_symmetric": symm.value,
                "quantum_noisy_fidelity": bounds.quantum_noisy_fidelity(v, c),
            }
        )
    return report


def _cmd_clones(args: argparse.Namespace) -> RunReport:
    c = args.c
    report = RunReport("clones", inputs={"c": c})
    result = quantum.construct_optimal_clones(c)
    formula = bounds.quantum_optimal_fidelity(c)
    delta = abs(result.fidelity - formula)
    report.outputs.update(
        {
            "optimizer_fidelity": result.fidelity,
            "closed_form_fidelity": formula,
            "delta": delta,
            "overlap_error": result.overlap_error,
            "grid_fidelity": result.grid_fidelity,
        }
    )
    report.add_verdict("optimizer-matches-closed-form", delta <= CLONE_TOL, f"|delta| = {delta:.3e} <= {CLONE_TOL}")
    report.add_verdict("overlap-constraint", result.overlap_error <= 1e-9, f"residual = {result.overlap_error:.3e}")
    return report


def _record_outputs(report: RunReport, rec: quantum.ExperimentRecord) -> None:
    report.outputs.update(
        {
            "c_ab_observed": rec.overlaps.c_ab,
            "c_ba_observed": rec.overlaps.c_ba,
            "c_aabb_observed": rec.overlaps.c_aabb,
            "c_bbaa_observed": rec.overlaps.c_bbaa,
            "eps_a": rec.budget.eps_a,
            "eps_b": rec.budget.eps_b,
            "eps_alpha": rec.budget.eps_alpha,
            "eps_beta": rec.budget.eps_beta,
            "eps_aa": rec.budget.eps_aa,
            "eps_bb": rec.budget.eps_bb,
            "f_global": rec.f_global,
            "o2_residual": rec.o2_residual,
        }
    )


def _quantum_verdicts(report: RunReport, rec: quantum.ExperimentRecord, v: float, c: float, degenerate: bool) -> None:
    eb = bounds.depolarizing_epsilons(v)
    worst_eps = max(
        abs(rec.budget.eps_a - eb.eps_a),
        abs(rec.budget.eps_b - eb.eps_b),
        abs(rec.budget.eps_alpha - eb.eps_alpha),
        abs(rec.budget.eps_beta - eb.eps_beta),
        abs(rec.budget.eps_aa - eb.eps_aa),
        abs(rec.budget.eps_bb - eb.eps_bb),
    )
    report.add_verdict("epsilons-match-closed-forms", worst_eps <= ACCEPT_EXACT, f"max |delta| = {worst_eps:.3e}")

    d_cab = abs(rec.overlaps.c_ab - quantum.observed_confusability(v, c))
    d_caabb = abs(rec.overlaps.c_aabb - quantum.observed_target_confusability(v, c))
    report.add_verdict(
        "observed-confusabilities-match-closed-forms",
        max(d_cab, d_caabb) <= ACCEPT_EXACT,
        f"max |delta| = {max(d_cab, d_caabb):.3e}",
    )

    d_fg = abs(rec.f_global - bounds.quantum_noisy_fidelity(v, c))
    report.add_verdict("global-fidelity-matches-closed-form", d_fg <= ACCEPT_EXACT, f"|delta| = {d_fg:.3e}")

    if degenerate:
        report.add_verdict("mixing-equivalences", None, "collapsed span; complements taken in the ambient space")
    else:
        report.add_verdict(
            "mixing-equivalences",
            rec.o2_residual <= ACCEPT_EXACT,
            f"max residual = {rec.o2_residual:.3e}",
        )


def _cmd_noise(args: argparse.Namespace) -> RunReport:
    report = RunReport("noise", inputs={"v": args.v, "c": args.c})
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        rec = quantum.simulate_confusabilities(args.v, args.c)
    _record_outputs(report, rec)
    _quantum_verdicts(report, rec, args.v, args.c, degenerate=args.c in (0.0, 1.0))
    return report


def _cmd_verify_quantum(args: argparse.Namespace) -> RunReport:
    report = RunReport("verify-quantum", inputs={"v": args.v, "c": args.c})
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        ens = quantum.noisy_ensemble(args.v, args.c)
        rec = quantum.simulate_confusabilities(args.v, args.c)
    _record_outputs(report, rec)
    for pair, resid in ens.equivalence_residuals().items():
        report.outputs[f"equivalence_residual[{pair}]"] = resid
    _quantum_verdicts(report, rec, args.v, args.c, degenerate=args.c in (0.0, 1.0))
    return report


def _cmd_region(args: argparse.Namespace) -> RunReport:
    spec = scan.SweepSpec(err_mode=args.err_mode, c_mode=args.c_mode)
    region = scan.violation_interval(args.v, spec)
    report = RunReport(
        "region",
        inputs={"v": args.v, "err_mode": args.err_mode, "c_mode": args.c_mode},
        outputs={
            "empty": region.is_empty,
            "c_lo": region.c_lo,
            "c_hi": region.c_hi,
            "anomalous_roots": list(region.anomalies),
        },
    )
    return report


def _cmd_critical_noise(args: argparse.Namespace) -> RunReport:
    spec = scan.SweepSpec(err_mode=args.err_mode, c_mode=args.c_mode)
    vstar = scan.critical_noise(args.c, spec)
    return RunReport(
        "critical-noise",
        inputs={"c": args.c, "err_mode": args.err_mode, "c_mode": args.c_mode},
        outputs={"v_max": vstar},
    )


def _cmd_curves(args: argparse.Namespace) -> RunReport:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    n = args.points
    c_grid = [i / (n - 1) for i in range(n)]
    q_series, nc_series = scan.fidelity_curves(c_grid)

    # The published error term is ambiguous, so both defensible noise
    #-resistance curves are emitted side by side.
    interior = [c for c in c_grid if 0.0 < c < 1.0]
    resistance = {
        mode: scan.noise_resistance_curve(interior, scan.SweepSpec(err_mode=mode, c_mode=args.c_mode))
        for mode in ("thm2-direct", "err-prime")
    }

    written = []
    ext = args.format
    emit = scan.write_series_csv if ext == "csv" else scan.write_series_json
    for name, series in [
        ("fidelity_quantum", q_series),
        ("fidelity_noncontextual", nc_series),
        ("noise_resistance_thm2-direct", resistance["thm2-direct"]),
        ("noise_resistance_err-prime", resistance["err-prime"]),
    ]:
        path = out / f"{name}.{ext}"
        emit(series, path)
        written.append(str(path))

    return RunReport(
        "curves",
        inputs={"out": str(out), "format": ext, "points": n, "c_mode": args.c_mode},
        outputs={"files": written},
    )


def _cmd_verify_ontic(args: argparse.Namespace) -> RunReport:
    report = RunReport("verify-ontic", inputs={"c": args.c, "resolution": args.resolution})
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        model = ontic.build_saturating_model(args.c, args.resolution)
    for w in caught:
        report.outputs.setdefault("warnings", []).append(str(w.message))

    c = model.c_ab
    h = model.grid_in.h
    report.outputs["c_snapped"] = c

    o1 = ontic.check_O1(model)
    report.add_verdict("perfect-correlations", o1.passed, f"max residual = {o1.max_residual:.3e} <= {o1.tol}")
    o2 = ontic.check_O2(model)
    report.add_verdict("mixing-equivalences", o2.passed, f"max residual = {o2.max_residual:.3e} <= {o2.tol}")

    f_g = ontic.global_fidelity(model)
    target = bounds.nc_bound_ideal(c, c * c)
    report.outputs["f_global"] = f_g
    report.outputs["nc_bound_ideal"] = target
    report.add_verdict(
        "fidelity-saturates-nc-bound",
        abs(f_g - target) <= 4.0 * h,
        f"|delta| = {abs(f_g - target):.3e} <= {4.0 * h}",
    )

    for pair in model.pairs + (("aa", "bb"),):
        rep = ontic.verify_sandwich_ideal(model, pair)
        report.add_verdict(
            f"distance-confusability-identity[{pair[0]}~{pair[1]}]",
            rep.passed,
            f"residual = {rep.residual:.3e} <= {rep.tol}",
        )

    product = model.states["b"].density[:, None] * model.states["b"].density[None, :]
    beta_resid = float(abs(model.states["beta"].density - product.ravel()).max())
    report.add_verdict("clone-of-b-is-product-density", beta_resid <= 1e-9, f"max residual = {beta_resid:.3e}")

    c_model = ontic.confusability(model.states["a"], model.responses["b"])
    report.add_verdict(
        "maximal-overlap-of-inputs",
        abs(c_model - c) <= 2.0 * h,
        f"|{c_model:.6f} - {c}| <= {2.0 * h}",
    )
    return report


_HANDLERS = {
    "bounds": _cmd_bounds,
    "clones": _cmd_clones,
    "noise": _cmd_noise,
    "region": _cmd_region,
    "critical-noise": _cmd_critical_noise,
    "curves": _cmd_curves,
    "verify-ontic": _cmd_verify_ontic,
    "verify-quantum": _cmd_verify_quantum,
}


def run(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    start = time.perf_counter()
    report = _HANDLERS[args.command](args)
    report.wall_time_s = time.perf_counter() - start
    print(report.render_json() if args.json else report.render_text())
    print(f"elapsed: {report.wall_time_s:.3f} s", file=sys.stderr)
    return 1 if report.failed else 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
