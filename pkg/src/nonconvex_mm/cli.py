"""Command-line front end: solve, bench, and diagnose.

Flags mirror the math: --lambda, --theta, --gamma, --epsilon, --rho.
Exit codes: 0 converged / 1 usage or input error / 2 iteration budget
exhausted / 3 a diagnostic inequality failed.  NONCONVEX_MM_THREADS
caps how many solver runs ``bench`` executes concurrently.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .data_io import SyntheticSpec, read_libsvm, synth_generate, write_trace
from .diagnostics import finite_length, kkt_residual, rate_fit
from .losses import make_loss
from .mm import IterateTrace, MmConfig, ProblemInstance, run_mm
from .penalties import (
    CappedL1Penalty,
    LogEpsilonPenalty,
    LogPenalty,
    McpPenalty,
    ScadPenalty,
)

__all__ = ["main", "build_parser"]

_PENALTY_CHOICES = ("log", "log-eps", "scad", "mcp", "capped-l1")


class _Parser(argparse.ArgumentParser):
    """argparse that exits with code 1 on usage errors (not the default 2)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _add_common(sub: argparse.ArgumentParser) -> None:
    data = sub.add_argument_group("data")
    data.add_argument("--data", metavar="PATH", help="libsvm text file")
    data.add_argument("--n", type=int, default=200, help="synthetic sample count")
    data.add_argument("--p", type=int, default=50, help="synthetic dimension")
    data.add_argument("--sparsity", type=int, default=5, help="true nonzeros (synthetic)")
    data.add_argument("--noise-sd", type=float, default=0.1, help="synthetic noise level")
    data.add_argument("--seed", type=int, default=0, help="generator seed")

    model = sub.add_argument_group("model")
    model.add_argument("--loss", choices=("ls", "logistic"), default="logistic")
    model.add_argument("--penalty", choices=_PENALTY_CHOICES, default="log-eps")
    model.add_argument("--lambda", dest="lam", type=float, default=0.1,
                       help="penalty weight")
    model.add_argument("--theta", type=float, default=None,
                       help="shape for log / scad / capped-l1")
    model.add_argument("--gamma", type=float, default=3.0, help="mcp shape")
    model.add_argument("--epsilon", type=float, default=0.5, help="log-eps offset")

    solver = sub.add_argument_group("solver")
    solver.add_argument("--scheme", choices=("a", "b"), default="b")
    solver.add_argument("--rho", type=float, default=1.01,
                        help="surrogate weight factor: mu = rho * L_f")
    solver.add_argument("--mu", type=float, default=None, help="override mu directly")
    solver.add_argument("--tol", type=float, default=1e-8,
                        help="stop when the step's infinity norm drops below this")
    solver.add_argument("--max-iter", type=int, default=5000)

    out = sub.add_argument_group("output")
    out.add_argument("--out", metavar="PATH", help="trace output file")
    out.add_argument("--format", choices=("csv", "json"), default="csv")
    out.add_argument("--weights-out", metavar="PATH",
                     help="write final w, one value per line (defaults to "
                          "<out>.weights for csv traces; json embeds it)")
    out.add_argument("--no-timing", action="store_true",
                     help="zero the elapsed_sec column for byte-reproducible output")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nonconvex-mm",
                     description="MM solvers for nonconvex-penalized smooth losses")
    subs = parser.add_subparsers(dest="command", required=True)
    for name, descr in (
        ("solve", "run one MM solve and write its trace"),
        ("bench", "run schemes a and b on the same problem and compare"),
        ("diagnose", "run a solve and verify the convergence-theory inequalities"),
    ):
        _add_common(subs.add_parser(name, help=descr, description=descr))
    return parser


def _default_theta(kind: str) -> float:
    return {"log": 1.0, "scad": 3.7, "capped-l1": 1.0}.get(kind, 1.0)


def _build_penalty(args):
    theta = args.theta if args.theta is not None else _default_theta(args.penalty)
    if args.penalty == "log":
        return LogPenalty(lam=args.lam, theta=theta)
    if args.penalty == "log-eps":
        return LogEpsilonPenalty(lam=args.lam, eps=args.epsilon)
    if args.penalty == "scad":
        return ScadPenalty(lam=args.lam, theta=theta)
    if args.penalty == "mcp":
        return McpPenalty(lam=args.lam, gamma=args.gamma)
    return CappedL1Penalty(lam=args.lam, theta=theta)


def _build_problem(args) -> ProblemInstance:
    task = "regression" if args.loss == "ls" else "classification"
    if args.data:
        data = read_libsvm(args.data, task=task)
    else:
        spec = SyntheticSpec(n=args.n, p=args.p, sparsity=args.sparsity,
                             noise_sd=args.noise_sd, seed=args.seed, task=task)
        data, _ = synth_generate(spec)
    return ProblemInstance(loss=make_loss(args.loss, data), penalty=_build_penalty(args))


def _mm_config(args, scheme: str | None = None) -> MmConfig:
    return MmConfig(scheme=scheme or args.scheme, rho=args.rho, mu_override=args.mu,
                    max_iter=args.max_iter, tol=args.tol)


def _finalize_trace(trace: IterateTrace, args) -> None:
    trace.meta["seed"] = args.seed
    if args.no_timing:
        trace.elapsed_sec = [0.0] * len(trace.elapsed_sec)


def _write_outputs(trace: IterateTrace, args) -> None:
    if args.out:
        write_trace(trace, args.format, args.out)
    weights_path = args.weights_out
    if weights_path is None and args.out and args.format == "csv":
        # JSON traces embed final_w; CSV traces get a sidecar file
        weights_path = args.out + ".weights"
    if weights_path:
        with open(weights_path, "w", encoding="utf-8") as fh:
            for v in trace.final_w:
                fh.write(repr(float(v)) + "\n")


def _cmd_solve(args) -> int:
    prob = _build_problem(args)
    trace = run_mm(prob, _mm_config(args))
    _finalize_trace(trace, args)
    _write_outputs(trace, args)
    final_kkt = kkt_residual(trace.final_w, prob)
    print(f"scheme         : {args.scheme}")
    print(f"iterations     : {trace.num_steps()}")
    print(f"final objective: {trace.final_objective:.12g}")
    print(f"kkt residual   : {final_kkt:.6g}")
    print(f"converged      : {trace.converged}")
    nnz = int(np.count_nonzero(trace.final_w))
    print(f"nonzeros       : {nnz} / {len(trace.final_w)}")
    return 0 if trace.converged else 2


def _pad(seq, length, fill):
    return list(seq) + [fill] * (length - len(seq))


def _cmd_bench(args) -> int:
    prob = _build_problem(args)
    schemes = ["a"]
    note = None
    if prob.penalty.supports_linearization:
        schemes.append("b")
    else:
        note = f"scheme b unsupported for {prob.penalty.kind}; running scheme a only"

    try:
        threads = max(1, int(os.environ.get("NONCONVEX_MM_THREADS", "2")))
    except ValueError:
        threads = 2
    if threads > 1 and len(schemes) > 1:
        with ThreadPoolExecutor(max_workers=min(threads, len(schemes))) as pool:
            traces = list(pool.map(lambda s: run_mm(prob, _mm_config(args, s)), schemes))
    else:
        traces = [run_mm(prob, _mm_config(args, s)) for s in schemes]
    for t in traces:
        _finalize_trace(t, args)

    by = dict(zip(schemes, traces))
    ta = by["a"]
    tb = by.get("b")
    rows = max(len(t.iters) for t in traces)
    obj_a = _pad(ta.objective, rows, ta.final_objective)
    ela_a = _pad(ta.elapsed_sec, rows, ta.elapsed_sec[-1])
    if tb is not None:
        obj_b = _pad(tb.objective, rows, tb.final_objective)
        ela_b = _pad(tb.elapsed_sec, rows, tb.elapsed_sec[-1])
    else:
        obj_b = [None] * rows
        ela_b = [0.0] * rows

    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("iter,elapsed_sec,objective_a,objective_b\n")
            for k in range(rows):
                elapsed = max(ela_a[k], ela_b[k])
                b_cell = "" if obj_b[k] is None else repr(float(obj_b[k]))
                fh.write(f"{k},{elapsed!r},{float(obj_a[k])!r},{b_cell}\n")

    if note:
        print(note)
    if tb is not None:
        gap = abs(ta.final_objective - tb.final_objective)
        # reference optimum for error-vs-time plots: best of the two schemes
        ref = min(ta.final_objective, tb.final_objective)
        per_a = ta.elapsed_sec[-1] / max(ta.num_steps(), 1)
        per_b = tb.elapsed_sec[-1] / max(tb.num_steps(), 1)
        ratio = per_b / per_a if per_a > 0 else float("nan")
        print(f"reference F* (best run): {ref:.12g}")
        print(f"|F_a - F_b|            : {gap:.6g}")
        print(f"time per iteration (a) : {per_a:.3e} s")
        print(f"time per iteration (b) : {per_b:.3e} s")
        print(f"per-iteration ratio b/a: {ratio:.3f}")
    else:
        print(f"final objective (a): {ta.final_objective:.12g}")
    return 0 if all(t.converged for t in traces) else 2


def _cmd_diagnose(args) -> int:
    prob = _build_problem(args)
    trace = run_mm(prob, _mm_config(args))
    _finalize_trace(trace, args)

    mu = trace.meta["mu"]
    lf = trace.meta["lipschitz"]
    gamma = mu - lf
    failures = []

    if gamma <= 0:
        failures.append(f"majorization: mu={mu:.6g} <= L_f={lf:.6g} (gamma <= 0)")

    worst_descent = np.inf
    worst_bound = np.inf
    lz = prob.penalty.deriv_lipschitz() if args.scheme == "b" else 0.0
    for k in range(trace.num_steps()):
        drop = trace.objective[k] - trace.objective[k + 1]
        step = trace.step_norm[k + 1]
        worst_descent = min(worst_descent, drop - 0.5 * gamma * step**2)
        bound = (mu + lf + lz) * step
        worst_bound = min(worst_bound, bound - trace.residual[k + 1])
    if trace.num_steps() == 0:
        worst_descent = worst_bound = 0.0
    if worst_descent < -1e-9:
        failures.append(f"descent: worst margin {worst_descent:.3e} < -1e-9")
    if worst_bound < -1e-8:
        failures.append(f"subgradient bound: worst margin {worst_bound:.3e} < -1e-8")

    final_kkt = kkt_residual(trace.final_w, prob)
    if trace.num_steps() > 0 and final_kkt > trace.residual[-1] + 1e-8:
        failures.append(
            f"kkt residual {final_kkt:.3e} exceeds certificate {trace.residual[-1]:.3e}"
        )

    total, tail = finite_length(trace)
    fit = rate_fit(trace)
    trace.meta["rate_fit"] = {
        "regime": fit.regime,
        "rate_constant": None if np.isnan(fit.rate_constant) else fit.rate_constant,
        "fit_quality": fit.fit_quality,
    }
    _write_outputs(trace, args)

    print(f"gamma (mu - L_f)           : {gamma:.6g}")
    print(f"worst descent margin       : {worst_descent:.6g}")
    print(f"worst residual-bound margin: {worst_bound:.6g}")
    print(f"trajectory length          : total {total:.6g}, second-half tail {tail:.6g}")
    print(f"rate regime                : {fit.regime} "
          f"(constant {fit.rate_constant:.6g}, fit quality {fit.fit_quality:.3f})")
    print(f"final kkt residual         : {final_kkt:.6g}")
    if failures:
        print("FAILED checks:")
        for f in failures:
            print(f"  - {f}")
        return 3
    print("all inequality checks passed")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "bench":
            return _cmd_bench(args)
        return _cmd_diagnose(args)
    except (OSError, ValueError, FloatingPointError) as exc:
        print(f"nonconvex-mm: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
