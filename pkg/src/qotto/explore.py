"""Parameter sweeps and one-dimensional optimization over the barrier strength.

Two machines are covered:

* square well of length ``L_h = 2`` at the hot bath against a well of length
  ``L_c = 2 r`` with a central delta barrier ``g`` at the cold bath
  (``hbar = m = 1``; ``g`` is quoted in units of ``g_cri = 2 hbar^2 / (m L_c)``);
* an ion in a Paul trap with an optical lattice, in trap units
  ``hbar = m = omega_h = 1``, with SI values kept as metadata.
"""
from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .cycle import Mode, carnot_audit, classical_otto, run_otto
from .errors import DomainError, QottoError
from .limits import classical_limit_series, extrapolate_classical, thermal_spectra
from .potentials import AMU_SI, HBAR_SI, KB_SI, IonTrap, SquareWell, SquareWellDelta, UnitSystem
from .spectrum import box_level

log = logging.getLogger(__name__)

CELL_FIELDS = ("W", "Q_h", "Q_c", "mode", "eta", "eta_over_carnot")
FIG2_L_H = 2.0
DEFAULT_A_SI = 185e-9
DEFAULT_OMEGA_H_SI = 2 * np.pi * 1e6
DEFAULT_MASS_AMU = 174.0
FIG3_CLASSICAL_SCHEDULE = (1, 2, 3, 4)


def fmt(value) -> str:
    """Round-trippable text for a CSV cell."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return "%.17g" % value
    if value is None:
        return ""
    return str(value)


@dataclass
class SweepTable:
    """Cells on the cross product of one or two parameter axes, row-major."""

    axes: list
    cells: list
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        n = math.prod(len(v) for _, v in self.axes)
        if n != len(self.cells):
            raise ValueError(f"{len(self.cells)} cells for axes of total size {n}")

    @property
    def shape(self):
        return tuple(len(v) for _, v in self.axes)

    @property
    def columns(self) -> list:
        extra = []
        for c in self.cells:
            for k in c:
                if k not in CELL_FIELDS and k not in extra:
                    extra.append(k)
        return [name for name, _ in self.axes] + list(CELL_FIELDS) + extra

    def rows(self):
        cols = self.columns
        grids = np.meshgrid(*[np.asarray(v, dtype=float) for _, v in self.axes], indexing="ij")
        coords = [g.ravel() for g in grids]
        for i, cell in enumerate(self.cells):
            rec = {name: coords[k][i] for k, (name, _) in enumerate(self.axes)}
            rec.update(cell)
            yield [rec.get(c) for c in cols]

    def column(self, name: str) -> np.ndarray:
        """Cell values of ``name`` reshaped onto the axes grid."""
        return np.array([c.get(name) for c in self.cells], dtype=object).reshape(self.shape)

    def values(self, name: str) -> np.ndarray:
        return self.column(name).astype(float)

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows():
            w.writerow([fmt(v) for v in row])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


def _map(fn, items, executor):
    return list(executor.map(fn, items)) if executor is not None else [fn(x) for x in items]


# ---------------------------------------------------------------------------
# square well with a delta barrier


def g_cri(r: float, L_h: float = FIG2_L_H, units: UnitSystem = UnitSystem()) -> float:
    """Barrier unit ``2 hbar^2 / (m L_c)`` with ``L_c = r L_h``."""
    return 2 * units.hbar**2 / (units.mass * r * L_h)


@dataclass(frozen=True)
class TcPolicy:
    """How bath temperatures are fixed across the r-g plane.

    ``kind="hot_tls"``: ``T_h`` puts a population ``value`` on levels above the
    second at the hot bath (bare well ``L_h``), ``T_c = T_h / T_ratio``; both
    baths are then in the two-level regime for moderate ``r``.
    ``kind="box_gap"``: ``T_c = value * D_c,box`` with ``D_c,box`` the bare gap
    at ``L_c = r L_h``. ``kind="fixed"``: ``T_c = value``.
    """

    kind: str = "hot_tls"
    value: float = 1e-6

    def __post_init__(self):
        if self.kind not in ("hot_tls", "box_gap", "fixed"):
            raise DomainError(f"unknown temperature policy {self.kind!r}")
        if not self.value > 0 or (self.kind == "hot_tls" and not self.value < 1):
            raise DomainError(f"bad temperature policy value {self.value}")

    def temperatures(self, r: float, T_ratio: float = 12.0,
                     L_h: float = FIG2_L_H) -> tuple[float, float]:
        if self.kind == "fixed":
            return T_ratio * self.value, self.value
        if self.kind == "box_gap":
            L_c = r * L_h
            T_c = self.value * float(box_level(2, L_c) - box_level(1, L_c))
            return T_ratio * T_c, T_c
        e = box_level(np.arange(1, 40), L_h)
        T_h = _temperature_for_excess(e, self.value)
        return T_h, T_h / T_ratio


def _temperature_for_excess(e, p):
    """Temperature at which levels 3, 4, ... carry total population ``p``."""
    from scipy.optimize import brentq

    def excess(T):
        w = np.exp(-(e - e[0]) / T)
        return w[2:].sum() / w.sum() - p
    hi = e[2] - e[0]
    while excess(hi) < 0:
        hi *= 2
    return brentq(excess, 1e-3 * (e[1] - e[0]) / -math.log(p), hi, rtol=1e-14)


DEFAULT_TC_POLICY = TcPolicy()


def fig2_temperatures(r: float, T_ratio: float = 12.0,
                      policy: TcPolicy = DEFAULT_TC_POLICY) -> tuple[float, float]:
    """``(T_h, T_c)`` for one column of the r-g plane."""
    return policy.temperatures(r, T_ratio)


def delta_well_cycle(r: float, g: float, T_h: float, T_c: float, L_h: float = FIG2_L_H):
    """Otto cycle: bare well ``L_h`` (hot) against delta well ``r L_h`` with ``g`` (cold)."""
    if not r > 0:
        raise DomainError(f"r must be positive, got {r}")
    spec_h, spec_c = thermal_spectra(SquareWell(L_h), SquareWellDelta(r * L_h, g), T_h, T_c)
    return run_otto(spec_h, spec_c, T_h, T_c)


def _audited_row(res):
    row = res.row()
    audit = carnot_audit(res)
    row["audit_passed"] = audit.passed
    row["entropy_production"] = res.entropy_production
    return row


def sweep_fig2(r_grid, g_grid, T_ratio: float = 12.0, gamma: float = 3.0,
               policy: TcPolicy = DEFAULT_TC_POLICY, executor=None) -> tuple[SweepTable, SweepTable]:
    """Classical and quantum tables over compression ratio and barrier strength.

    ``g_grid`` is in units of ``g_cri`` of each column. The classical table is
    the ideal-gas Otto cycle, independent of ``g``.
    """
    r_grid = [float(r) for r in r_grid]
    g_grid = [float(g) for g in g_grid]
    if not r_grid or not g_grid:
        raise DomainError("sweep grids must be nonempty")
    points = [(r, g) for r in r_grid for g in g_grid]

    def quantum(pt):
        r, g = pt
        T_h, T_c_ = fig2_temperatures(r, T_ratio, policy)
        try:
            row = _audited_row(delta_well_cycle(r, g * g_cri(r), T_h, T_c_))
        except QottoError as exc:
            row = {k: math.nan for k in CELL_FIELDS} | {"mode": "", "error": str(exc)}
        return row | {"T_h": T_h, "T_c": T_c_}

    def classical(pt):
        r, _ = pt
        T_h, T_c_ = fig2_temperatures(r, T_ratio, policy)
        return classical_otto(r, gamma, T_h, T_c_).row() | {"T_h": T_h, "T_c": T_c_}

    axes = [("r", r_grid), ("g_over_gcri", g_grid)]
    meta = {"machine": "square well L_h=2 vs delta well L_c=2r", "units": "hbar=m=1, k_B=1",
            "L_h": FIG2_L_H, "T_ratio": T_ratio, "gamma": gamma,
            "temperature_policy": policy.kind, "temperature_policy_value": policy.value,
            "g_unit": "g_cri = 2 hbar^2/(m L_c)", "version": __version__}
    q = SweepTable(axes, _map(quantum, points, executor), dict(meta, table="quantum"))
    c = SweepTable(axes, _map(classical, points, executor), dict(meta, table="classical"))
    return c, q


@dataclass
class OptimizationResult:
    argmax: float | None
    objective_value: float
    objective_kind: str
    trace: list
    feasible: bool
    metadata: dict = field(default_factory=dict)


OBJECTIVES = ("max_efficiency", "max_extracted_work", "max_cooling",
              "max_refrigeration_efficiency")


def _objective(kind, W_floor):
    def f(res):
        if kind == "max_efficiency":
            ok = res.mode is Mode.ENGINE and abs(res.W) >= W_floor
            return res.eta_engine if ok else -math.inf
        if kind == "max_extracted_work":
            return -res.W if res.mode is Mode.ENGINE else -math.inf
        if kind == "max_cooling":
            return res.Q_c if res.mode is Mode.REFRIGERATOR else -math.inf
        ok = res.mode is Mode.REFRIGERATOR and abs(res.W) >= W_floor
        return res.eta_refrigerator if ok else -math.inf
    if kind not in OBJECTIVES:
        raise DomainError(f"unknown objective {kind!r}; choose from {OBJECTIVES}")
    return f


def golden_section_max(f, a, b, xtol):
    """Maximize ``f`` on ``[a, b]``; returns every evaluated ``(x, f(x))``."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    trace = []

    def ev(x):
        y = f(x)
        trace.append((x, y))
        return y

    x1 = b - inv_phi * (b - a)
    x2 = a + inv_phi * (b - a)
    f1, f2 = ev(x1), ev(x2)
    while b - a > xtol:
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - inv_phi * (b - a)
            f1 = ev(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + inv_phi * (b - a)
            f2 = ev(x2)
    return trace


def optimize_g(r: float, T_h: float, T_c: float, objective: str = "max_efficiency",
               g_bounds=(-10.0, 10.0), n_grid: int = 64, rel_tol: float = 1e-6,
               W_floor_factor: float = 1e-6, L_h: float = FIG2_L_H) -> OptimizationResult:
    """Best barrier strength (in units of ``g_cri``) for one compression ratio.

    A 64-point scan locates the best feasible grid point; golden-section
    search then refines ``g`` on the neighbouring interval to ``rel_tol``.
    Efficiency objectives only accept cycles with ``|W| >= W_floor``,
    ``W_floor = W_floor_factor * T_h``, since efficiency approaches its
    supremum as the work vanishes.
    """
    lo, hi = (float(v) for v in g_bounds)
    if not (np.isfinite(lo) and np.isfinite(hi) and hi > lo):
        raise DomainError(f"g_bounds must be finite and increasing, got {g_bounds}")
    W_floor = W_floor_factor * T_h
    score = _objective(objective, W_floor)
    unit = g_cri(r, L_h)
    cache = {}

    def f(g):
        if g not in cache:
            try:
                cache[g] = score(delta_well_cycle(r, g * unit, T_h, T_c, L_h))
            except QottoError as exc:
                log.warning("cycle failed at g=%g: %s", g, exc)
                cache[g] = -math.inf
        return cache[g]

    grid = np.linspace(lo, hi, n_grid)
    vals = [f(float(g)) for g in grid]
    trace = list(zip(map(float, grid), vals))
    k = int(np.argmax(vals))
    meta = {"r": r, "T_h": T_h, "T_c": T_c, "g_bounds": [lo, hi], "g_unit": unit,
            "n_grid": n_grid, "rel_tol": rel_tol, "W_floor": W_floor,
            "W_floor_applies": objective in ("max_efficiency", "max_refrigeration_efficiency")}
    if not np.isfinite(vals[k]):
        meta["infeasible"] = f"no {objective} point in g/g_cri in [{lo}, {hi}]"
        return OptimizationResult(None, -math.inf, objective, trace, False, meta)

    a = float(grid[max(k - 1, 0)])
    b = float(grid[min(k + 1, n_grid - 1)])
    xtol = rel_tol * max(abs(a), abs(b), (hi - lo) / n_grid)
    trace += golden_section_max(f, a, b, xtol)
    finite = [(g, v) for g, v in trace if np.isfinite(v)]
    g_best, v_best = max(finite, key=lambda t: (t[1], -t[0]))
    # the floor binds when a neighbour just past the optimum failed only on |W|
    meta["W_floor_binding"] = bool(meta["W_floor_applies"] and _floor_binds(
        r, g_best, unit, T_h, T_c, L_h, W_floor, xtol, objective))
    return OptimizationResult(g_best, v_best, objective, trace, True, meta)


def _floor_binds(r, g, unit, T_h, T_c, L_h, W_floor, step, objective):
    want = Mode.ENGINE if objective == "max_efficiency" else Mode.REFRIGERATOR
    for dg in (-step, step):
        try:
            res = delta_well_cycle(r, (g + dg) * unit, T_h, T_c, L_h)
        except QottoError:
            continue
        if res.mode is not want or abs(res.W) < W_floor:
            return True
    return False


def random_machines(n_trials: int, seed: int, n_levels: int = 5, e_max: float = 5.0,
                    T_c_range=(0.1, 3.0), ratio_range=(1.01, 10.0)):
    """Random finite-level machines: sorted uniform energies in ``[0, e_max)``.

    Yields ``(spec_h, spec_c, T_h, T_c)`` with ``T_c`` uniform in
    ``T_c_range`` and ``T_h/T_c`` uniform in ``ratio_range``.
    """
    from .spectrum import Spectrum

    rng = np.random.default_rng(seed)
    for _ in range(n_trials):
        e_h = np.sort(rng.uniform(0.0, e_max, n_levels))
        e_c = np.sort(rng.uniform(0.0, e_max, n_levels))
        T_c = rng.uniform(*T_c_range)
        T_h = T_c * rng.uniform(*ratio_range)
        yield Spectrum.from_levels(e_h), Spectrum.from_levels(e_c), T_h, T_c


# ---------------------------------------------------------------------------
# ion trap


def nbar_temperature(nbar: float, omega: float, hbar: float = 1.0) -> float:
    """Temperature at which a mode of frequency ``omega`` has mean occupation ``nbar``."""
    if not nbar > 0:
        raise DomainError(f"nbar must be positive, got {nbar}")
    return hbar * omega / math.log1p(1.0 / nbar)


@dataclass(frozen=True)
class TrapUnits:
    """Conversion between SI and trap units ``hbar = m = omega_h = 1``."""

    omega_h_si: float = DEFAULT_OMEGA_H_SI
    mass_amu: float = DEFAULT_MASS_AMU

    @property
    def length(self) -> float:
        return math.sqrt(HBAR_SI / (self.mass_amu * AMU_SI * self.omega_h_si))

    @property
    def energy(self) -> float:
        return HBAR_SI * self.omega_h_si

    @property
    def kelvin(self) -> float:
        return self.energy / KB_SI


def fig3_temperatures(kappa_c, omega_c, T_ratio=41.6, nbar_c=0.033, omega_ref="lattice"):
    """``(T_h, T_c)`` in trap units from the cold-bath occupation ``nbar_c``.

    ``omega_ref="lattice"`` uses the lattice-site frequency
    ``omega_c sqrt(kappa_c)``; ``"trap"`` uses ``omega_c``.
    """
    if omega_ref == "lattice":
        w = omega_c * math.sqrt(kappa_c)
    elif omega_ref == "trap":
        w = omega_c
    else:
        raise DomainError(f"omega_ref must be 'lattice' or 'trap', got {omega_ref!r}")
    T_c = nbar_temperature(nbar_c, w)
    return T_ratio * T_c, T_c


def ion_trap_pair(kappa_c, omega_ratio, kappa_h=1.0, a=DEFAULT_A_SI,
                  trap: TrapUnits = TrapUnits()):
    """Hot and cold trap potentials in trap units for lattice constant ``a`` (metres)."""
    a_t = a / trap.length
    return IonTrap(1.0, kappa_h, a_t), IonTrap(float(omega_ratio), kappa_c, a_t)


def sweep_fig3(kappa_c_grid, omega_ratio_grid, kappa_h: float = 1.0, T_ratio: float = 41.6,
               nbar_c: float = 0.033, a: float = DEFAULT_A_SI,
               mass_amu: float = DEFAULT_MASS_AMU, omega_h_si: float = DEFAULT_OMEGA_H_SI,
               omega_ref: str = "lattice", classical_schedule=FIG3_CLASSICAL_SCHEDULE,
               classical_rel_tol: float = 1e-3, executor=None) -> tuple[SweepTable, SweepTable]:
    """Classical and quantum tables over ``kappa_c`` and ``omega_c/omega_h``.

    Quantum cells come from DVR spectra at ``xi = 1``; classical cells from the
    xi-series along ``classical_schedule`` (the last entry and a polynomial
    extrapolation to ``1/xi -> 0`` are both exported). A cell whose solve
    fails records the error and NaNs instead of aborting the sweep.
    """
    trap = TrapUnits(omega_h_si, mass_amu)
    k_grid = [float(k) for k in kappa_c_grid]
    w_grid = [float(w) for w in omega_ratio_grid]
    if not k_grid or not w_grid:
        raise DomainError("sweep grids must be nonempty")
    points = [(k, w) for k in k_grid for w in w_grid]

    def setup(pt):
        k, w = pt
        T_h, T_c = fig3_temperatures(k, w, T_ratio, nbar_c, omega_ref)
        hot, cold = ion_trap_pair(k, w, kappa_h, a, trap)
        return hot, cold, T_h, T_c

    def failed(exc, T_h, T_c):
        return {"W": math.nan, "Q_h": math.nan, "Q_c": math.nan, "mode": "",
                "eta": math.nan, "eta_over_carnot": math.nan, "T_h": T_h, "T_c": T_c,
                "error": f"{type(exc).__name__}: {exc}"}

    def quantum(pt):
        hot, cold, T_h, T_c = setup(pt)
        try:
            spec_h, spec_c = thermal_spectra(hot, cold, T_h, T_c)
            res = run_otto(spec_h, spec_c, T_h, T_c)
            return _audited_row(res) | {"T_h": T_h, "T_c": T_c, "n_levels": res.n_levels}
        except QottoError as exc:
            return failed(exc, T_h, T_c)

    def classical(pt):
        hot, cold, T_h, T_c = setup(pt)
        try:
            s = classical_limit_series(hot, cold, T_h, T_c, classical_schedule,
                                       classical_rel_tol)
        except QottoError as exc:
            return failed(exc, T_h, T_c)
        row = s.results[-1].row()
        row |= {"T_h": T_h, "T_c": T_c, "xi_max": s.xi_values[-1], "converged": s.converged,
                "W_extrapolated": extrapolate_classical(s)}
        return row

    axes = [("kappa_c", k_grid), ("omega_c_over_omega_h", w_grid)]
    meta = {"machine": "ion trap + lattice, hot kappa_h vs cold kappa_c",
            "units": "trap units hbar=m=omega_h=1, k_B=1", "kappa_h": kappa_h,
            "T_ratio": T_ratio, "nbar_c": nbar_c, "omega_ref": omega_ref,
            "a_m": a, "a_trap_units": a / trap.length, "mass_amu": mass_amu,
            "omega_h_rad_per_s": omega_h_si, "length_unit_m": trap.length,
            "energy_unit_J": trap.energy, "temperature_unit_K": trap.kelvin,
            "classical_schedule": list(classical_schedule),
            "classical_rel_tol": classical_rel_tol, "version": __version__}
    q = SweepTable(axes, _map(quantum, points, executor), dict(meta, table="quantum"))
    c = SweepTable(axes, _map(classical, points, executor), dict(meta, table="classical"))
    return c, q
