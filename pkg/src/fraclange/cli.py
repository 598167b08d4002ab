"""
Command-line front end.

::

    fraclange ml --alpha 0.5 --mu 1 --z -1
    fraclange ml --alpha 0.5 --mu 1 --z-from -10 --z-to 0 --steps 11
    fraclange solve-scalar --config scalar.json --out run/ --verify
    fraclange solve --config modes.json --out run/ [--verify] [--force]
    fraclange verify [--config modes.json]

Data goes to CSV files (or stdout for ``ml`` without ``--out``), the report
goes to stdout and ``report.txt``, diagnostics go to stderr.

Exit codes: 0 success, 2 invalid input, 3 failed verification,
4 data regularity verdict "growing" (``solve`` without ``--force``).
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
import tempfile
import warnings
from pathlib import Path
from typing import Sequence

import numpy as np

from .checks import (
    CheckResult,
    decay_bound_check,
    interpolation_bound_check,
    eigen_derivative_check,
    derivative_shift_check,
    oracle_triangle,
)
from .config import RunConfig, load_config, parse_config
from .exceptions import FracLangeError, VerificationError
from .fracops import GridFunction
from .scalar import dalpha_closed_form, residual, solve_closed_form
from .special import INTERPOLATION_CONSTANTS, MLQuery, ml
from .spectral import (
    assemble,
    check_regularity,
    choose_truncation,
    lemma6_check,
    residual_report,
    resolve_threads,
)

__all__ = ["DEFAULT_CONFIG", "main"]

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_VERIFY = 3
EXIT_GROWING = 4

#: configuration used by ``verify`` when no ``--config`` is given
DEFAULT_CONFIG = {
    "alpha": 0.5,
    "beta": 0.5,
    "T": 1.0,
    "lam": 1.0,
    "phi": 1.0,
    "psi": 0.5,
    "forcing": [[1.0, 1.0]],
    "time_N": 1024,
}

log = logging.getLogger("fraclange")


# {{{ output


def _clean(a) -> np.ndarray:
    # + 0.0 turns -0.0 into 0.0, so equal values print identically
    return np.asarray(a, dtype=float) + 0.0


def _fmt(v: float) -> str:
    return "%.17g" % (float(v) + 0.0)


def _num(v: float) -> str:
    """Shortest round-trip form, for report text."""
    return repr(float(v) + 0.0)


def write_atomic(path: Path, text: str) -> None:
    """Write *text* to *path* through a temporary file and a rename."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _csv(header: str, columns: Sequence[np.ndarray]) -> str:
    cols = [_clean(c).ravel() for c in columns]
    lines = [header]
    lines.extend(",".join(_fmt(v) for v in row) for row in zip(*cols))
    return "\n".join(lines) + "\n"


class Report:
    def __init__(self) -> None:
        self.lines: list[str] = []

    def __call__(self, line: str = "") -> None:
        self.lines.append(line)

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"

    def emit(self, out: Path | None) -> None:
        text = self.text()
        sys.stdout.write(text)
        sys.stdout.flush()
        if out is not None:
            write_atomic(out / "report.txt", text)


def _out_dir(args, cfg: RunConfig | None, default: Path | None = None) -> Path | None:
    if args.out is not None:
        return Path(args.out)
    if cfg is not None and cfg.out is not None:
        return Path(cfg.out)
    return default


# }}}


# {{{ subcommands


def cmd_ml(args) -> int:
    if args.z is not None:
        if args.z_from is not None or args.z_to is not None or args.steps is not None:
            log.error("use either --z or --z-from/--z-to/--steps")
            return EXIT_INVALID
        zs = np.array([args.z])
    else:
        if args.z_from is None or args.z_to is None or args.steps is None:
            log.error("a sweep needs --z-from, --z-to and --steps")
            return EXIT_INVALID
        if args.steps < 1:
            log.error("--steps must be >= 1")
            return EXIT_INVALID
        zs = np.linspace(args.z_from, args.z_to, args.steps)

    rows = []
    for z in zs:
        r = ml(MLQuery(args.alpha, args.mu, float(z)))
        rows.append(",".join((
            _fmt(args.alpha), _fmt(args.mu), _fmt(z), _fmt(r.value),
            r.regime.value, _fmt(r.est_abs_error),
        )))
    text = "alpha,mu,z,value,regime,est_err\n" + "\n".join(rows) + "\n"

    if args.out is None:
        sys.stdout.write(text)
    else:
        write_atomic(Path(args.out) / "ml.csv", text)
    return EXIT_OK


def _triangle_lines(p, tol: float, Ns) -> list[CheckResult]:
    results = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        tri = oracle_triangle(p, Ns)
    for w in caught:
        log.warning(str(w.message))

    label = f"lambda={_num(p.lam)}"
    if tri.picard_skipped:
        reason = str(caught[-1].message) if caught else "skipped"
        results.append(CheckResult(
            f"Picard agreement {label}", True, math.nan, tol, reason, skipped=True,
        ))
    else:
        results.append(CheckResult(
            f"Picard agreement {label}", tol > 0 and tri.picard_ok(tol),
            tri.picard_gap, tol + tri.allowance,
            f"(tol {tol:.1e} + discretization allowance {tri.allowance:.3e}, "
            f"m={tri.iterations})",
        ))
    results.append(CheckResult(
        f"residual order {label}", tri.residual_ok(),
        min(tri.orders), 0.3,
        "residuals " + ", ".join(f"{r:.3e}" for r in tri.residuals),
    ))
    return results


def cmd_solve_scalar(args) -> int:
    cfg = load_config(args.config)
    if cfg.scalar is None:
        log.error("solve-scalar needs a scalar configuration (lam/phi/psi/forcing)")
        return EXIT_INVALID
    p = cfg.scalar
    out = _out_dir(args, cfg, Path("."))
    tol = cfg.tolerance if args.tol is None else args.tol

    grid = cfg.time_grid()
    t = grid.nodes
    y = np.asarray(solve_closed_form(p, t))
    dy = np.asarray(dalpha_closed_form(p, t))

    report = Report()
    report("solve-scalar")
    report(f"alpha={_num(p.alpha)} beta={_num(p.beta)} T={_num(p.T)} lambda={_num(p.lam)}")
    report(f"grid: {grid.kind} N={grid.N} r={_num(grid.exponent)}")
    report(f"residual (max over [T/4, T]): {residual(p, GridFunction(grid, y)):.6e}")

    failed = False
    if args.verify:
        N = grid.N
        checks = _triangle_lines(p, tol, (max(4, N // 4), max(4, N // 2), N))
        for c in checks:
            report(c.line())
        failed = not all(c.passed for c in checks)

    if out is not None:
        write_atomic(out / "scalar.csv", _csv("t,y,dalpha_y", (t, y, dy)))
    report.emit(out)
    return EXIT_VERIFY if failed else EXIT_OK


def cmd_solve(args) -> int:
    cfg = load_config(args.config)
    if cfg.spectral is None:
        log.error("solve needs a 'modes' list")
        return EXIT_INVALID
    p = cfg.spectral
    out = _out_dir(args, cfg, Path("."))
    tol = cfg.tolerance if args.tol is None else args.tol
    threads = resolve_threads()

    report = Report()
    report("solve")
    report(
        f"alpha={_num(p.orders.alpha)} beta={_num(p.orders.beta)} T={_num(p.T)} "
        f"operator={p.operator.kind} L={_num(p.operator.L)} N_max={p.N_max} "
        f"epsilon={_num(p.epsilon)}"
    )

    reg = check_regularity(p)
    for name, seq in (("phi in D(A)", reg.phi), ("f in D(A^eps)", reg.forcing)):
        slope = "n/a" if seq.slope is None else f"{seq.slope:.3f}"
        report(f"regularity {name}: {seq.verdict} (partial sum {seq.value:.6e}, slope {slope})")
    if reg.verdict == "growing":
        if not args.force:
            report("regularity verdict: growing; rerun with --force to solve anyway")
            report.emit(out)
            log.error("data regularity verdict is 'growing'")
            return EXIT_GROWING
        log.warning("regularity verdict 'growing' overridden by --force")

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        trunc = choose_truncation(p, tol)
    for w in caught:
        log.warning(str(w.message))
    report(
        f"truncation: N={trunc.N} tail proxy={trunc.tail:.6e} tol^2={tol**2:.6e} "
        f"achieved={'yes' if trunc.achieved else 'no'}"
    )

    grid = cfg.time_grid()
    x = cfg.space_grid()
    sol = assemble(p, grid, x, trunc.N, threads=threads)
    report(f"grid: {grid.kind} N={grid.N} r={_num(grid.exponent)}; space M={x.size - 1}")
    report(f"tail bound on |u|: {sol.tail_bound:.6e}")

    res = residual_report(p, sol)
    report(f"residual worst mode: {res.worst:.6e}  l2 over modes: {res.l2:.6e}")
    report(f"initial value error max: {float(np.max(res.initial_value)):.6e}")
    report(
        f"D^alpha initial error max at t={res.delta:.0e}: "
        f"{float(np.max(res.initial_derivative)):.6e}"
    )

    failed = False
    if args.verify:
        checks = _solve_checks(p, cfg, sol, res, threads)
        for c in checks:
            report(c.line())
        failed = not all(c.passed for c in checks)

    if out is not None:
        t = sol.t
        nt, nx = sol.u.shape
        write_atomic(out / "field.csv", _csv(
            "t,x,u", (np.repeat(t, nx), np.tile(x, nt), sol.u.ravel())
        ))
        ks = np.array(sol.ks, dtype=float)
        write_atomic(out / "modes.csv", _csv(
            "t,k,T_k", (np.repeat(t, ks.size), np.tile(ks, nt), sol.coefficients.T.ravel())
        ))
    report.emit(out)
    return EXIT_VERIFY if failed else EXIT_OK


def _solve_checks(p, cfg: RunConfig, sol, res, threads: int) -> list[CheckResult]:
    checks = []

    coarse = assemble(p, cfg.time_grid(max(4, cfg.time_N // 2)), sol.x, sol.N, threads=threads)
    res_coarse = residual_report(p, coarse)
    ratio = float(np.max(res.per_mode / np.maximum(res_coarse.per_mode, 1e-300)))
    checks.append(CheckResult(
        "per-mode residual decreases under refinement", ratio < 1.0, ratio, 1.0,
        "(largest fine/coarse ratio)",
    ))

    # Parseval on a fine trapezoid grid: the field is band-limited to k <= N
    xf = np.linspace(0.0, p.operator.L, 4097)
    i = np.array([0, sol.t.size // 2, sol.t.size - 1])
    fine = assemble(p, sol.grid, xf, sol.N, threads=threads).u[i]
    energy_x = np.trapezoid(fine**2, xf, axis=1)
    energy_k = np.sum(sol.coefficients[:, i] ** 2, axis=0)
    rel = float(np.max(np.abs(energy_x - energy_k) / np.maximum(energy_k, 1e-300)))
    checks.append(CheckResult("Parseval identity", rel <= 1e-6, rel, 1e-6))

    if any(not m.forcing_k.is_zero for m in p.modes):
        try:
            r6 = lemma6_check(p)
            checks.append(CheckResult(
                "convolution estimate", True, r6.lhs, r6.rhs_proxy,
            ))
        except VerificationError as exc:
            checks.append(CheckResult("convolution estimate", False, math.nan, math.nan, str(exc)))
    return checks


def cmd_verify(args) -> int:
    cfg = parse_config(DEFAULT_CONFIG) if args.config is None else load_config(args.config)
    tol = cfg.tolerance if args.tol is None else args.tol
    a, b = cfg.orders.alpha, cfg.orders.beta
    problems = cfg.scalar_problems()

    report = Report()
    report("verify")
    checks = [CheckResult("tolerance is positive", tol > 0, tol, 0.0)]
    checks.append(decay_bound_check())
    checks.extend(interpolation_bound_check(eps) for eps in sorted(INTERPOLATION_CONSTANTS))
    lam = next((q.lam for q in problems if q.lam > 0), 1.0)
    checks.append(eigen_derivative_check(a, lam))
    checks.append(derivative_shift_check(a, b, lam))

    N = cfg.time_N
    Ns = (max(4, N // 4), max(4, N // 2), N)
    for q in problems[:8]:
        checks.extend(_triangle_lines(q, tol, Ns))
    if len(problems) > 8:
        log.warning("oracle triangle run on the first 8 of %d modes", len(problems))

    p = cfg.spectral
    if p is not None and any(not m.forcing_k.is_zero for m in p.modes):
        if check_regularity(p).forcing.verdict == "growing":
            log.warning("forcing regularity is 'growing': convolution estimate skipped")
        else:
            try:
                r6 = lemma6_check(p)
                checks.append(CheckResult("convolution estimate", True, r6.lhs, r6.rhs_proxy))
            except VerificationError as exc:
                checks.append(CheckResult("convolution estimate", False, math.nan, math.nan,
                                          str(exc)))

    for c in checks:
        report(c.line())
    ok = all(c.passed for c in checks)
    report(f"overall: {'PASS' if ok else 'FAIL'}")
    report.emit(_out_dir(args, cfg))
    return EXIT_OK if ok else EXIT_VERIFY


# }}}


# {{{ entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fraclange",
        description="Mittag-Leffler eigenfunction-expansion solver for "
        "D^b(D^a u) + D^b(Au) = f.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_ml = sub.add_parser("ml", help="evaluate E_{alpha,mu}(z) for z <= 0")
    p_ml.add_argument("--alpha", type=float, required=True)
    p_ml.add_argument("--mu", type=float, required=True)
    p_ml.add_argument("--z", type=float)
    p_ml.add_argument("--z-from", type=float)
    p_ml.add_argument("--z-to", type=float)
    p_ml.add_argument("--steps", type=int)
    p_ml.add_argument("--out", help="write ml.csv into this directory")
    p_ml.set_defaults(func=cmd_ml)

    for name, func, helptext in (
        ("solve-scalar", cmd_solve_scalar, "closed-form scalar solution"),
        ("solve", cmd_solve, "eigenfunction-expansion solution"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", required=True)
        p.add_argument("--out")
        p.add_argument("--verify", action="store_true")
        p.add_argument("--tol", type=float)
        if name == "solve":
            p.add_argument("--force", action="store_true",
                           help="solve even when the regularity verdict is 'growing'")
        p.set_defaults(func=func)

    p_v = sub.add_parser("verify", help="run the identity and estimate checks")
    p_v.add_argument("--config")
    p_v.add_argument("--out")
    p_v.add_argument("--tol", type=float)
    p_v.set_defaults(func=cmd_verify)
    return parser


class _StderrHandler(logging.StreamHandler):
    """Writes to whatever ``sys.stderr`` is at emit time."""

    @property
    def stream(self):
        return sys.stderr

    @stream.setter
    def stream(self, value) -> None:
        pass


def _setup_logging() -> None:
    if not log.handlers:
        handler = _StderrHandler()
        handler.setFormatter(logging.Formatter("fraclange: %(levelname)s: %(message)s"))
        log.addHandler(handler)
        log.propagate = False
    log.setLevel(logging.INFO)


def main(argv: Sequence[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors, matching the exit contract
        return int(exc.code or 0)

    try:
        return args.func(args)
    except FracLangeError as exc:
        log.error(str(exc))
        return EXIT_INVALID
    except OSError as exc:
        log.error(f"I/O error: {exc}")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())


# }}}
