"""Classical limit by xi-scaling.

Lowering the effective Planck constant to ``hbar/xi`` is equivalent to
multiplying the potential and the temperatures by ``xi**2`` and dividing all
resulting energies by ``xi**2``. Both routes are implemented so they can be
checked against each other.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .cycle import CycleResult, Mode, run_otto
from .errors import AuditError, DomainError
from .potentials import Potential, scale
from .spectrum import Spectrum, solve
from .thermo import thermal_window, thermalize

log = logging.getLogger(__name__)

DEFAULT_SCHEDULE = (1, 2, 4, 8, 16, 32, 64, 128)
DEFAULT_REL_TOL = 1e-3


def thermal_spectra(potential_h: Potential, potential_c: Potential, T_h: float, T_c: float,
                    **solver_kw) -> tuple[Spectrum, Spectrum]:
    """Spectra of both strokes, each long enough for either bath.

    The cycle pairs levels by index, so both spectra are extended to the
    larger of the two thermal truncation counts. A ``temperature`` keyword
    can only widen the box tail beyond the hotter bath.
    """
    t_max = max(T_h, T_c, solver_kw.pop("temperature", 0.0))
    spec_h = solve(potential_h, e_window=thermal_window(T_h), temperature=t_max, **solver_kw)
    spec_c = solve(potential_c, e_window=thermal_window(T_c), temperature=t_max, **solver_kw)
    n = max(thermalize(spec_h, T_h).n_kept, thermalize(spec_c, T_c).n_kept)
    if len(spec_h) < n:
        spec_h = solve(potential_h, n_levels=n, temperature=t_max, **solver_kw)
    if len(spec_c) < n:
        spec_c = solve(potential_c, n_levels=n, temperature=t_max, **solver_kw)
    return spec_h, spec_c


def potential_cycle(potential_h: Potential, potential_c: Potential, T_h: float, T_c: float,
                    **solver_kw) -> CycleResult:
    """Solve both potentials and run the Otto cycle between them."""
    spec_h, spec_c = thermal_spectra(potential_h, potential_c, T_h, T_c, **solver_kw)
    return run_otto(spec_h, spec_c, T_h, T_c)


def scaled_cycle(potential_h: Potential, potential_c: Potential, T_h: float, T_c: float,
                 xi: float, path: str = "potential", **solver_kw) -> CycleResult:
    """Cycle at ``hbar_eff = hbar/xi``, in the original energy units.

    ``path="potential"`` multiplies potentials and temperatures by ``xi**2``
    and rescales the result by ``1/xi**2``; ``path="hbar"`` solves with the
    reduced Planck constant directly.
    """
    if not xi >= 1:
        raise DomainError(f"xi must be >= 1, got {xi}")
    if path == "potential":
        x2 = float(xi) ** 2
        res = potential_cycle(scale(potential_h, xi), scale(potential_c, xi),
                              x2 * T_h, x2 * T_c, **solver_kw)
        return res.rescaled(1.0 / x2) if xi != 1 else res
    if path == "hbar":
        ph = potential_h.with_units(potential_h.units.with_hbar(potential_h.units.hbar / xi))
        pc = potential_c.with_units(potential_c.units.with_hbar(potential_c.units.hbar / xi))
        return potential_cycle(ph, pc, T_h, T_c, **solver_kw)
    raise ValueError(f"unknown path {path!r}")


@dataclass(frozen=True)
class ScalingSeries:
    """Cycle totals along an increasing xi schedule.

    ``converged_at`` is the smallest xi from which every consecutive change
    of ``W/xi**2`` stays below ``rel_tol``.
    """

    xi_values: tuple
    work_per_xi2: tuple
    eta_per_xi: tuple
    modes: tuple
    n_kept: tuple
    rel_tol: float
    converged: bool
    converged_at: float | None
    classical_W: float | None
    rel_changes: tuple
    results: tuple = field(repr=False, compare=False, default=())

    def trend(self) -> str:
        return ", ".join(f"xi={x:g}: W={w:.6g}" for x, w in zip(self.xi_values, self.work_per_xi2))


def _rel_change(a, b):
    big = max(abs(a), abs(b))
    return 0.0 if big == 0 else abs(a - b) / big


def classical_limit_series(potential_h: Potential, potential_c: Potential, T_h: float,
                           T_c: float, xi_schedule=DEFAULT_SCHEDULE,
                           rel_tol: float = DEFAULT_REL_TOL, path: str = "potential",
                           executor=None, **solver_kw) -> ScalingSeries:
    """Run :func:`scaled_cycle` along ``xi_schedule`` and detect convergence.

    ``executor`` (a ``concurrent.futures`` executor) evaluates the entries
    concurrently; the output order always follows the schedule.
    """
    xs = tuple(float(x) for x in xi_schedule)
    if not xs or any(b <= a for a, b in zip(xs[:-1], xs[1:])) or xs[0] < 1:
        raise DomainError(f"xi schedule must be increasing and start at >= 1, got {xs}")

    def one(xi):
        return scaled_cycle(potential_h, potential_c, T_h, T_c, xi, path=path, **solver_kw)

    results = list(executor.map(one, xs)) if executor is not None else [one(x) for x in xs]
    W = tuple(r.W for r in results)
    eta = tuple(r.eta_engine if r.mode is Mode.ENGINE else math.nan for r in results)
    changes = tuple(_rel_change(a, b) for a, b in zip(W[:-1], W[1:]))
    conv_at = None
    for k in range(len(changes) - 1, -1, -1):
        if changes[k] >= rel_tol:
            break
        conv_at = xs[k + 1]
    converged = bool(changes) and changes[-1] < rel_tol
    if not converged:
        log.info("xi series not converged at rel_tol=%g: %s", rel_tol,
                 ", ".join(f"{x:g}:{w:.6g}" for x, w in zip(xs, W)))
    return ScalingSeries(xs, W, eta, tuple(r.mode for r in results),
                         tuple(r.n_levels for r in results), rel_tol, converged, conv_at,
                         W[-1] if converged else None, changes, tuple(results))


def extrapolate_classical(series: ScalingSeries, n_points: int = 3) -> float:
    """Polynomial extrapolation of ``W/xi**2`` to ``1/xi -> 0``.

    Fits the last ``n_points`` entries exactly with a polynomial in ``1/xi``
    (leading quantum corrections are powers of ``hbar_eff``). NaN for a
    single-entry series.
    """
    k = min(n_points, len(series.xi_values))
    if k < 2:
        return math.nan
    h = 1.0 / np.asarray(series.xi_values[-k:])
    coef = np.polyfit(h, np.asarray(series.work_per_xi2[-k:]), k - 1)
    return float(coef[-1])


@dataclass(frozen=True)
class ScalingReport:
    xi_values: tuple
    n_levels: int
    max_rel_error: tuple
    tol: float

    @property
    def passed(self) -> bool:
        return all(e <= self.tol for e in self.max_rel_error)

    def raise_if_failed(self):
        if not self.passed:
            raise AuditError(f"scaling relation violated: {self}", report=self)


def verify_scaling_relation(potential: Potential, xi_list, n_levels: int = 10,
                            tol: float = 1e-8, **solver_kw) -> ScalingReport:
    """Compare ``E_n(hbar/xi, V)`` with ``E_n(hbar, xi**2 V) / xi**2`` level by level."""
    errs = []
    for xi in xi_list:
        p_a = potential.with_units(potential.units.with_hbar(potential.units.hbar / xi))
        e_a = solve(p_a, n_levels=n_levels, **solver_kw).energies[:n_levels]
        e_b = solve(scale(potential, xi), n_levels=n_levels, **solver_kw).energies[:n_levels] / xi**2
        # levels near E = 0 are compared on the scale of the level spread
        ref = np.maximum(np.abs(e_b), e_b[-1] - e_b[0])
        errs.append(float(np.max(np.abs(e_a - e_b) / ref)))
    return ScalingReport(tuple(float(x) for x in xi_list), n_levels, tuple(errs), tol)
