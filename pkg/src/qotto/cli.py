"""Command-line front end.

    qotto --config run.cfg --out results/ [--threads N] [--strict-audit]

Each run writes one or more CSV tables and ``<command>.meta.json`` with the
resolved configuration, library versions and audit outcomes.

Exit status: 0 success, 1 invalid configuration, 2 solver or accuracy
failure, 3 audit violation under ``--strict-audit``.
"""
from __future__ import annotations

import argparse
import concurrent.futures
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .config import RunConfig
from .cycle import carnot_audit, run_otto, tls_summary
from .errors import (
    AccuracyError,
    AuditError,
    ConfigError,
    DomainError,
    DomainTooSmallError,
    SolverError,
    TruncationError,
)
from .explore import (
    DEFAULT_A_SI,
    OBJECTIVES,
    SweepTable,
    TcPolicy,
    fig2_temperatures,
    fmt,
    optimize_g,
    random_machines,
    sweep_fig2,
    sweep_fig3,
)
from .limits import DEFAULT_SCHEDULE, classical_limit_series, thermal_spectra
from .spectrum import solve

log = logging.getLogger("qotto")

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_AUDIT = 0, 1, 2, 3


class Run:
    """Outputs and audit outcomes collected while a command executes."""

    def __init__(self, out: Path, strict: bool, executor):
        self.out = out
        self.strict = strict
        self.executor = executor
        self.files = []
        self.audit = {"checked": 0, "violations": []}
        self.extra = {}

    def table(self, name, header, rows):
        lines = [",".join(header)] + [",".join(fmt(v) for v in row) for row in rows]
        self._write(name, "\n".join(lines) + "\n")

    def sweep(self, name, table: SweepTable):
        self._write(name, table.to_csv())
        self.extra[name] = table.metadata

    def _write(self, name, text):
        path = self.out / name
        with open(path, "w", newline="") as fh:
            fh.write(text)
        self.files.append(name)

    def check(self, label, result):
        """Re-check conservation, entropy production and the Carnot audit."""
        self.audit["checked"] += 1
        problems = []
        if result.conservation_residual > 1e-12:
            problems.append(f"energy not conserved (rel. residual {result.conservation_residual:.3g})")
        if result.entropy_production < -1e-12:
            problems.append(f"negative entropy production {result.entropy_production:.3g}")
        problems += list(carnot_audit(result).violations)
        for p in problems:
            self.audit["violations"].append(f"{label}: {p}")
            log.warning("audit: %s: %s", label, p)
        return not problems


def _solver_kw(cfg):
    kw = {}
    if cfg.has("solver.rel_tol"):
        kw["rel_tol"] = cfg.number("solver.rel_tol", positive=True)
    if cfg.has("solver.max_points"):
        kw["max_points"] = cfg.integer("solver.max_points")
    return kw


def _cycle_row(res):
    return [res.W, res.Q_h, res.Q_c, str(res.mode), res.eta, res.eta_over_carnot,
            res.entropy_production, res.n_levels]


CYCLE_HEADER = ["W", "Q_h", "Q_c", "mode", "eta", "eta_over_carnot", "entropy_production",
                "n_levels"]


# Each command validates its configuration completely and returns a closure
# that does the computing, so bad input never starts a long run.


def prep_spectrum(cfg):
    pot = cfg.potential("potential")
    n = cfg.integer("spectrum.n_levels", 10)
    kw = _solver_kw(cfg)

    def go(run):
        s = solve(pot, n_levels=n, **kw)
        par = s.parities or [""] * len(s)
        run.table("spectrum.csv", ["n", "energy", "parity"],
                  [(k + 1, float(e), par[k]) for k, e in enumerate(s.energies)])
        run.extra["solver"] = {"solver": s.solver, "est_error": s.est_error,
                               **{k: v for k, v in s.meta.items() if k != "refinement"}}
    return go


def prep_cycle(cfg):
    ph, pc = cfg.potential("potential_h"), cfg.potential("potential_c")
    T_h, T_c = cfg.temperatures()
    kw = _solver_kw(cfg)

    def go(run):
        res = run_otto(*thermal_spectra(ph, pc, T_h, T_c, **kw), T_h, T_c)
        run.check("cycle", res)
        run.table("cycle.csv", CYCLE_HEADER, [_cycle_row(res)])
        run.table("cycle_levels.csv", ["n", "E_h", "E_c", "P_h", "P_c", "W_n", "Q_h_n", "Q_c_n"],
                  [(n + 1, *(float(getattr(res.levels, f)[n])
                             for f in ("E_h", "E_c", "P_h", "P_c", "W", "Q_h", "Q_c")))
                   for n in range(res.n_levels)])
    return go


def prep_tls(cfg):
    ph, pc = cfg.potential("potential_h"), cfg.potential("potential_c")
    T_h, T_c = cfg.temperatures()
    r = cfg.number("tls.r", positive=True) if cfg.has("tls.r") else None

    def go(run):
        sh, sc = solve(ph, n_levels=3), solve(pc, n_levels=3)
        t = tls_summary(sh, sc, T_h, T_c, r)
        res = run_otto(*thermal_spectra(ph, pc, T_h, T_c), T_h, T_c)
        run.check("tls", res)
        names = ["delta_h", "delta_c", "delta_c_box", "gap_shift", "extraction_condition_met",
                 "eta_tls", "third_level_population", "two_level_regime", "identity_residual"]
        run.table("tls.csv", names + ["mode", "eta_engine"],
                  [[getattr(t, k) for k in names] + [str(res.mode), res.eta_engine]])
    return go


def prep_classical_limit(cfg):
    ph, pc = cfg.potential("potential_h"), cfg.potential("potential_c")
    T_h, T_c = cfg.temperatures()
    xs = cfg.numbers("limits.xi_schedule", DEFAULT_SCHEDULE)
    tol = cfg.number("limits.rel_tol", 1e-3, positive=True)
    path = cfg.text("limits.path", "potential", ("potential", "hbar"))
    kw = _solver_kw(cfg)

    def go(run):
        s = classical_limit_series(ph, pc, T_h, T_c, xs, tol, path, executor=run.executor, **kw)
        for xi, res in zip(s.xi_values, s.results):
            run.check(f"xi={xi:g}", res)
        run.table("classical_limit.csv", ["xi", "inv_xi"] + CYCLE_HEADER,
                  [[xi, 1.0 / xi] + _cycle_row(res) for xi, res in zip(s.xi_values, s.results)])
        run.extra["series"] = {"converged": s.converged, "converged_at": s.converged_at,
                               "classical_W": s.classical_W, "rel_tol": tol,
                               "rel_changes": list(s.rel_changes)}
    return go


def _policy(cfg):
    kind = cfg.text("temperature.policy", "hot_tls", ("hot_tls", "box_gap", "fixed"))
    default = {"hot_tls": 1e-6, "box_gap": 0.2}.get(kind)
    value = cfg.number("temperature.value", default, positive=True)
    try:
        return TcPolicy(kind, value)
    except DomainError as exc:
        raise ConfigError(f"temperature: {exc}") from exc


def prep_sweep_fig2(cfg):
    r_grid = cfg.numbers("sweep.r_grid")
    g_grid = cfg.numbers("sweep.g_grid")
    if any(r <= 0 for r in r_grid):
        raise ConfigError("sweep.r_grid: compression ratios must be positive")
    ratio = cfg.number("temperature.T_ratio", 12.0, positive=True)
    if not ratio > 1:
        raise ConfigError("temperature.T_ratio must exceed 1")
    gamma = cfg.number("sweep.gamma", 3.0)
    if not gamma > 1:
        raise ConfigError("sweep.gamma must exceed 1")
    policy = _policy(cfg)

    def go(run):
        c, q = sweep_fig2(r_grid, g_grid, ratio, gamma, policy, executor=run.executor)
        for i, cell in enumerate(q.cells):
            if cell.get("audit_passed") is False:
                run.audit["violations"].append(f"fig2 quantum cell {i}: Carnot audit failed")
        run.audit["checked"] += len(q.cells)
        run.sweep("fig2_classical.csv", c)
        run.sweep("fig2_quantum.csv", q)
    return go


def prep_sweep_fig3(cfg):
    k_grid = cfg.numbers("sweep.kappa_c_grid")
    w_grid = cfg.numbers("sweep.omega_ratio_grid")
    if any(k < 0 for k in k_grid) or any(w <= 0 for w in w_grid):
        raise ConfigError("sweep grids: kappa_c must be >= 0 and omega ratios > 0")
    a = cfg.number("ion.a", DEFAULT_A_SI, notice=True, positive=True)
    omega_ref = cfg.text("ion.omega_ref", "lattice", ("lattice", "trap"), notice=True)
    kw = dict(kappa_h=cfg.number("ion.kappa_h", 1.0),
              T_ratio=cfg.number("temperature.T_ratio", 41.6, positive=True),
              nbar_c=cfg.number("ion.nbar_c", 0.033, positive=True), a=a,
              mass_amu=cfg.number("ion.mass_amu", 174.0, positive=True),
              omega_h_si=cfg.number("ion.omega_h", 2 * math.pi * 1e6, positive=True),
              omega_ref=omega_ref,
              classical_schedule=cfg.numbers("limits.xi_schedule", (1, 2, 3, 4)),
              classical_rel_tol=cfg.number("limits.rel_tol", 1e-3, positive=True))
    if not kw["T_ratio"] > 1:
        raise ConfigError("temperature.T_ratio must exceed 1")

    def go(run):
        c, q = sweep_fig3(k_grid, w_grid, executor=run.executor, **kw)
        for i, cell in enumerate(q.cells):
            if cell.get("audit_passed") is False:
                run.audit["violations"].append(f"fig3 quantum cell {i}: Carnot audit failed")
        run.audit["checked"] += len(q.cells)
        run.sweep("fig3_classical.csv", c)
        run.sweep("fig3_quantum.csv", q)
    return go


def prep_optimize_g(cfg):
    r = cfg.number("optimize.r", positive=True)
    objective = cfg.text("optimize.objective", "max_efficiency", OBJECTIVES)
    bounds = cfg.numbers("optimize.g_bounds", (-10.0, 10.0))
    if len(bounds) != 2 or not bounds[1] > bounds[0]:
        raise ConfigError("optimize.g_bounds: expected 'low, high' with low < high")
    n_grid = cfg.integer("optimize.n_grid", 64)
    if n_grid < 3:
        raise ConfigError("optimize.n_grid must be >= 3")
    if cfg.has("bath.T_h") or cfg.has("bath.T_c"):
        T_h, T_c = cfg.temperatures()
    else:
        T_h, T_c = fig2_temperatures(r, cfg.number("temperature.T_ratio", 12.0, positive=True),
                                     _policy(cfg))

    def go(run):
        o = optimize_g(r, T_h, T_c, objective, bounds, n_grid)
        run.table("optimize_g.csv", ["g_over_gcri", "objective", "is_best"],
                  [(g, v, g == o.argmax) for g, v in o.trace])
        run.extra["optimum"] = {"argmax": o.argmax, "objective_value": o.objective_value,
                                "objective_kind": o.objective_kind, "feasible": o.feasible,
                                **o.metadata}
        if not o.feasible:
            raise SolverError(o.metadata["infeasible"])
    return go


def prep_audit(cfg):
    n = cfg.integer("audit.n_trials", 1000)
    seed = cfg.integer("audit.seed", 0)
    n_levels = cfg.integer("audit.n_levels", 5)
    e_max = cfg.number("audit.e_max", 5.0, positive=True)
    if n < 1 or n_levels < 2:
        raise ConfigError("audit: need n_trials >= 1 and n_levels >= 2")

    def go(run):
        rows = []
        for i, (sh, sc, T_h, T_c) in enumerate(random_machines(n, seed, n_levels, e_max)):
            res = run_otto(sh, sc, T_h, T_c)
            ok = run.check(f"trial {i}", res)
            rows.append([i, T_h, T_c] + _cycle_row(res)[:-1] + [ok])
        run.table("audit.csv", ["trial", "T_h", "T_c"] + CYCLE_HEADER[:-1] + ["audit_passed"],
                  rows)
    return go


COMMANDS = {
    "spectrum": prep_spectrum,
    "cycle": prep_cycle,
    "tls": prep_tls,
    "classical-limit": prep_classical_limit,
    "sweep-fig2": prep_sweep_fig2,
    "sweep-fig3": prep_sweep_fig3,
    "optimize-g": prep_optimize_g,
    "audit": prep_audit,
}


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, float)):
        return float(v) if math.isfinite(v) else str(float(v))
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    return v


def run(cfg: RunConfig, out: Path, threads: int = 1, strict_audit: bool = False) -> int:
    """Validate, compute and write outputs. Returns the exit status."""
    go = COMMANDS[cfg.command](cfg)
    unknown = cfg.unused()
    if unknown:
        raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")
    out.mkdir(parents=True, exist_ok=True)
    workers = (os.cpu_count() or 1) if threads == 0 else threads
    executor = concurrent.futures.ThreadPoolExecutor(workers) if workers > 1 else None
    r = Run(out, strict_audit, executor)
    try:
        go(r)
    finally:
        if executor is not None:
            executor.shutdown()
    meta = {"command": cfg.command, "config": cfg.resolved(), "outputs": r.files,
            "versions": {"qotto": __version__, "numpy": np.__version__,
                         "scipy": scipy.__version__},
            "audit": r.audit, "strict_audit": strict_audit, **r.extra}
    with open(out / f"{cfg.command}.meta.json", "w") as fh:
        json.dump(_jsonable(meta), fh, indent=2, sort_keys=True)
        fh.write("\n")
    if r.audit["violations"] and strict_audit:
        log.error("%d audit violation(s)", len(r.audit["violations"]))
        return EXIT_AUDIT
    return EXIT_OK


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="qotto", description=__doc__.split("\n\n")[0])
    ap.add_argument("--config", required=True, help="run configuration (key = value)")
    ap.add_argument("--out", default=".", help="output directory")
    ap.add_argument("--threads", type=int, default=1, help="worker threads, 0 = all cores")
    ap.add_argument("--strict-audit", action="store_true",
                    help="exit with status 3 on any audit violation")
    ap.add_argument("-v", "--verbose", action="store_true")
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads < 0:
        print("error: --threads must be >= 0", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = RunConfig.from_file(args.config)
        return run(cfg, Path(args.out), args.threads, args.strict_audit)
    except (DomainTooSmallError, SolverError, AccuracyError, TruncationError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except AuditError as exc:
        print(f"audit error: {exc}", file=sys.stderr)
        return EXIT_AUDIT
    except (ConfigError, DomainError, ValueError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
