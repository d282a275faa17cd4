"""Four-stroke Otto cycle between two spectra, operation modes, two-level
closed forms, the classical ideal-gas baseline and a Carnot audit.

Sign convention: positive work or heat is energy flowing into the working
medium. Levels of the hot and cold Hamiltonians are paired by sorted index.
"""
from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import AccuracyError, AuditError, DomainError, TruncationError
from .potentials import SquareWell, SquareWellDelta
from .spectrum import Spectrum, box_level
from .thermo import heat_capacity, thermalize

#: relative size below which a total counts as zero when classifying modes
ZERO_TOL = 1e-12


class Mode(str, enum.Enum):
    ENGINE = "Engine"
    REFRIGERATOR = "Refrigerator"
    BROKEN = "Broken"
    DISSIPATOR = "Dissipator"

    def __str__(self):
        return self.value


def classify_mode(W: float, Q_h: float, Q_c: float) -> Mode:
    """Operation mode from the signs of the cycle totals.

    Values within ``ZERO_TOL`` of the largest magnitude count as zero, so a
    boundary case never reports Engine. An all-zero cycle is Broken.
    """
    tol = ZERO_TOL * max(abs(W), abs(Q_h), abs(Q_c))
    w = 0.0 if abs(W) <= tol else W
    qh = 0.0 if abs(Q_h) <= tol else Q_h
    qc = 0.0 if abs(Q_c) <= tol else Q_c
    if w < 0 and qh > 0:
        return Mode.ENGINE
    if w > 0 and qc > 0:
        return Mode.REFRIGERATOR
    if w >= 0 and qh > 0:
        return Mode.BROKEN
    if w > 0 and qh <= 0:
        return Mode.DISSIPATOR
    if w == 0 and qh == 0 and qc == 0:
        return Mode.BROKEN
    raise AuditError(f"sign pattern W={W:.17g}, Q_h={Q_h:.17g}, Q_c={Q_c:.17g} "
                     "converts cold-bath heat into work")


@dataclass(frozen=True)
class LevelContributions:
    """Per-level energies, populations and energy exchanges (arrays over n)."""

    E_h: np.ndarray
    E_c: np.ndarray
    P_h: np.ndarray
    P_c: np.ndarray
    W: np.ndarray
    Q_h: np.ndarray
    Q_c: np.ndarray

    def __len__(self):
        return self.E_h.size

    def scaled(self, factor: float) -> "LevelContributions":
        """Energies multiplied by ``factor``; populations unchanged."""
        return LevelContributions(self.E_h * factor, self.E_c * factor, self.P_h, self.P_c,
                                  self.W * factor, self.Q_h * factor, self.Q_c * factor)


@dataclass(frozen=True)
class CycleResult:
    W: float
    Q_h: float
    Q_c: float
    mode: Mode
    T_h: float
    T_c: float
    levels: LevelContributions

    @property
    def eta_engine(self) -> float | None:
        return -self.W / self.Q_h if self.mode is Mode.ENGINE else None

    @property
    def eta_refrigerator(self) -> float | None:
        return self.Q_c / self.W if self.mode is Mode.REFRIGERATOR else None

    @property
    def eta_carnot(self) -> float:
        return 1.0 - self.T_c / self.T_h

    @property
    def eta(self) -> float:
        """Engine efficiency or refrigerator COP for those modes, NaN otherwise."""
        if self.mode is Mode.ENGINE:
            return self.eta_engine
        if self.mode is Mode.REFRIGERATOR:
            return self.eta_refrigerator
        return math.nan

    @property
    def eta_over_carnot(self) -> float:
        if self.mode is Mode.ENGINE:
            return self.eta_engine / self.eta_carnot
        if self.mode is Mode.REFRIGERATOR:
            return self.eta_refrigerator / (self.T_c / (self.T_h - self.T_c))
        return math.nan

    @property
    def entropy_production(self) -> float:
        return -self.Q_h / self.T_h - self.Q_c / self.T_c

    @property
    def per_level(self) -> list:
        lv = self.levels
        return [(n + 1, float(lv.W[n]), float(lv.Q_h[n]), float(lv.Q_c[n]))
                for n in range(len(lv))]

    @property
    def n_levels(self) -> int:
        return len(self.levels)

    @property
    def conservation_residual(self) -> float:
        """``|W + Q_h + Q_c|`` relative to the largest of the three."""
        big = max(abs(self.W), abs(self.Q_h), abs(self.Q_c))
        return abs(self.W + self.Q_h + self.Q_c) / big if big else 0.0

    def rescaled(self, factor: float) -> "CycleResult":
        """Every energy and temperature multiplied by ``factor``."""
        return dataclasses.replace(self, W=self.W * factor, Q_h=self.Q_h * factor,
                                   Q_c=self.Q_c * factor, T_h=self.T_h * factor,
                                   T_c=self.T_c * factor, levels=self.levels.scaled(factor))

    def row(self) -> dict:
        return {"W": self.W, "Q_h": self.Q_h, "Q_c": self.Q_c, "mode": str(self.mode),
                "eta": self.eta, "eta_over_carnot": self.eta_over_carnot}


def _check_temperatures(T_h, T_c):
    if not (np.isfinite(T_h) and np.isfinite(T_c) and T_c > 0):
        raise DomainError(f"temperatures must be positive and finite, got T_h={T_h}, T_c={T_c}")
    if not T_h > T_c:
        raise DomainError(f"need T_h > T_c, got T_h={T_h}, T_c={T_c}")


def run_otto(spec_h: Spectrum, spec_c: Spectrum, T_h: float, T_c: float,
             n_levels: int | None = None) -> CycleResult:
    """Quantum Otto cycle with hot-contact spectrum ``spec_h`` and cold ``spec_c``.

    Both Gibbs states are evaluated on a common set of levels: the larger of
    the two truncation counts (or ``n_levels``). Per level

    ``W_n = (E_c - E_h)(P_h - P_c)``, ``Q_h,n = E_h (P_h - P_c)``,
    ``Q_c,n = E_c (P_c - P_h)``.

    Raises
    ------
    TruncationError
        One of the spectra has fewer levels than the common count.
    """
    _check_temperatures(T_h, T_c)
    if n_levels is None:
        if spec_h.complete and spec_c.complete:
            if len(spec_h) != len(spec_c):
                raise TruncationError("complete spectra must have the same number of levels")
            n = len(spec_h)
        else:
            n = max(thermalize(spec_h, T_h).n_kept, thermalize(spec_c, T_c).n_kept)
    else:
        n = n_levels
    for s in (spec_h, spec_c):
        if len(s) < n:
            raise TruncationError(f"spectrum has {len(s)} levels, the cycle needs {n}",
                                  needed_levels=n)
    ens_h = thermalize(spec_h, T_h, n_levels=n)
    ens_c = thermalize(spec_c, T_c, n_levels=n)
    e_h, e_c = ens_h.energies, ens_c.energies
    dp = ens_h.populations - ens_c.populations
    w_n = (e_c - e_h) * dp
    qh_n = e_h * dp
    qc_n = -e_c * dp
    W = math.fsum(w_n)
    Q_h = math.fsum(qh_n)
    Q_c = math.fsum(qc_n)
    levels = LevelContributions(e_h, e_c, ens_h.populations, ens_c.populations, w_n, qh_n, qc_n)
    return CycleResult(W, Q_h, Q_c, classify_mode(W, Q_h, Q_c), float(T_h), float(T_c), levels)


# ---------------------------------------------------------------------------
# two-level regime


@dataclass(frozen=True)
class TlsSummary:
    delta_h: float
    delta_c: float
    delta_c_box: float | None
    gap_shift: float | None
    extraction_condition_met: bool
    eta_tls: float | None
    third_level_population: float
    two_level_regime: bool
    identity_residual: float | None


def tls_summary(spec_h: Spectrum, spec_c: Spectrum, T_h: float, T_c: float,
                r: float | None = None, regime_tol: float = 1e-3) -> TlsSummary:
    """Gap-based description of the cycle when only two levels are populated.

    Work is extracted iff ``T_h/T_c >= D_h/D_c > 1`` with efficiency
    ``1 - D_c/D_h``. When the hot spectrum is a bare well and the cold one a
    delta well, the gap shift ``dE = D_c - D_c,box`` is reported and the
    identity ``D_c/D_h = r**-2 / (1 - dE/D_c)`` is checked
    (``identity_residual`` is its relative mismatch).
    """
    _check_temperatures(T_h, T_c)
    d_h = spec_h.gap
    d_c = spec_c.gap
    ratio = d_h / d_c
    met = bool(T_h / T_c >= ratio > 1.0)
    p3 = 0.0
    for s, T in ((spec_h, T_h), (spec_c, T_c)):
        if len(s) >= 3:
            e = s.energies
            w = np.exp(-(e - e[0]) / T)
            p3 = max(p3, float(w[2:].sum() / w.sum()))

    box_c = shift = resid = None
    src_h, src_c = spec_h.source, spec_c.source
    if isinstance(src_c, (SquareWellDelta, SquareWell)):
        box_c = float(np.diff(box_level([1, 2], src_c.L, spec_c.units))[0])
        shift = d_c - box_c
        if isinstance(src_h, SquareWell):
            r = src_c.L / src_h.L if r is None else r
            rhs = (1.0 / r**2) / (1.0 - shift / d_c)
            resid = abs(d_c / d_h - rhs) / abs(d_c / d_h)
    return TlsSummary(d_h, d_c, box_c, shift, met, 1.0 - d_c / d_h if met else None,
                      p3, p3 < regime_tol, resid)


# ---------------------------------------------------------------------------
# classical ideal-gas baseline and the homogeneous-scaling oracle


@dataclass(frozen=True)
class ClassicalOtto:
    """Single classical particle (ideal gas, ``C_v = 1/(gamma-1)``) Otto cycle."""

    r: float
    gamma: float
    T_h: float
    T_c: float
    W: float
    Q_h: float
    Q_c: float
    mode: Mode

    @property
    def r_carnot(self) -> float:
        return (self.T_h / self.T_c) ** (1.0 / (self.gamma - 1.0))

    @property
    def eta_formula(self) -> float:
        """``1 - r**(1 - gamma)``, the textbook Otto efficiency."""
        return 1.0 - self.r ** (1.0 - self.gamma)

    @property
    def eta_carnot(self) -> float:
        return 1.0 - self.T_c / self.T_h

    @property
    def eta(self) -> float:
        if self.mode is Mode.ENGINE:
            return -self.W / self.Q_h
        if self.mode is Mode.REFRIGERATOR:
            return self.Q_c / self.W
        return 0.0 if self.mode is Mode.BROKEN else math.nan

    @property
    def eta_engine(self):
        return self.eta if self.mode is Mode.ENGINE else None

    @property
    def eta_over_carnot(self) -> float:
        if self.mode is Mode.ENGINE:
            return self.eta / self.eta_carnot
        if self.mode is Mode.REFRIGERATOR:
            return self.eta / (self.T_c / (self.T_h - self.T_c))
        return 0.0 if self.mode is Mode.BROKEN else math.nan

    @property
    def entropy_production(self) -> float:
        return -self.Q_h / self.T_h - self.Q_c / self.T_c

    def row(self) -> dict:
        return {"W": self.W, "Q_h": self.Q_h, "Q_c": self.Q_c, "mode": str(self.mode),
                "eta": self.eta, "eta_over_carnot": self.eta_over_carnot}


def classical_otto(r: float, gamma: float, T_h: float, T_c: float) -> ClassicalOtto:
    """Ideal-gas Otto cycle with compression ratio ``r = L_c/L_h``.

    The adiabats multiply temperature by ``q = r**(gamma-1)``, so
    ``Q_h = C_v (T_h - q T_c)``, ``Q_c = -Q_h/q`` and ``W = (1-q)/q * Q_h``.
    Broken for ``r <= 1``, Engine below ``r_Car = (T_h/T_c)**(1/(gamma-1))``,
    Refrigerator above.
    """
    if not r > 0:
        raise DomainError(f"r must be positive, got {r}")
    if not gamma > 1:
        raise DomainError(f"gamma must exceed 1, got {gamma}")
    _check_temperatures(T_h, T_c)
    q = r ** (gamma - 1.0)
    c_v = 1.0 / (gamma - 1.0)
    Q_h = c_v * (T_h - q * T_c)
    Q_c = -Q_h / q
    W = (1.0 - q) / q * Q_h
    return ClassicalOtto(float(r), float(gamma), float(T_h), float(T_c), W, Q_h, Q_c,
                         classify_mode(W, Q_h, Q_c))


@dataclass(frozen=True)
class HomogeneousWork:
    W: float
    Q_h: float
    Q_c: float


def homogeneous_work_oracle(spec_h: Spectrum, q: float, T_h: float, T_c: float,
                            rel_tol: float = 1e-12) -> HomogeneousWork:
    """Cycle totals for ``E_h = q E_c`` from the heat capacity of ``spec_h``.

    With a level-independent ratio the cold Gibbs state equals the hot one at
    ``q T_c``, so ``Q_h = int_{q T_c}^{T_h} C(T) dT``, ``Q_c = -Q_h/q`` and
    ``W = (1-q)/q * Q_h``.
    """
    if not q > 0:
        raise DomainError(f"q must be positive, got {q}")
    _check_temperatures(T_h, T_c)
    lo, hi = q * T_c, T_h
    val, err, info = integrate.quad(lambda T: heat_capacity(spec_h, T), min(lo, hi), max(lo, hi),
                                    epsabs=0.0, epsrel=rel_tol, limit=200, full_output=True)[:3]
    if err > 1e3 * rel_tol * abs(val) and err > 1e-300:
        raise AccuracyError(f"heat-capacity quadrature error {err:.3g} on {val:.6g}")
    Q_h = val if hi >= lo else -val
    return HomogeneousWork((1.0 - q) / q * Q_h, Q_h, -Q_h / q)


# ---------------------------------------------------------------------------
# Carnot audit


@dataclass(frozen=True)
class AuditReport:
    passed: bool
    eta: float | None
    eta_carnot: float
    best_single_level_eta: float | None
    violations: tuple
    warnings: tuple

    def raise_if_failed(self):
        if not self.passed:
            raise AuditError("; ".join(self.violations), report=self)


def carnot_audit(result: CycleResult, T_h: float | None = None, T_c: float | None = None,
                 tol: float = 1e-12) -> AuditReport:
    """Check a cycle against the Carnot bound, globally and level by level.

    Hard checks: (a) an engine's efficiency is at most ``1 - T_c/T_h + tol``;
    (b) in an engine, every work-extracting level (``W_n < 0``) has
    ``E_h,n/T_h < E_c,n/T_c``, i.e. single-level efficiency
    ``1 - E_c,n/E_h,n`` below Carnot. The comparison of the total efficiency
    with the best single-level efficiency is reported as a warning only.
    """
    T_h = result.T_h if T_h is None else T_h
    T_c = result.T_c if T_c is None else T_c
    eta_car = 1.0 - T_c / T_h
    viol, warn = [], []
    eta = result.eta_engine
    if eta is not None and eta > eta_car + tol:
        viol.append(f"engine efficiency {eta:.17g} exceeds Carnot {eta_car:.17g}")
    if result.entropy_production < -tol:
        viol.append(f"negative entropy production {result.entropy_production:.3g}")

    lv = result.levels
    scale = max(abs(result.W), abs(result.Q_h), abs(result.Q_c))
    # the level-by-level argument concerns work extraction, i.e. engines
    if result.mode is Mode.ENGINE:
        extracting = np.nonzero(lv.W < -tol * scale)[0]
    else:
        extracting = np.array([], dtype=int)
    singles = []
    for n in extracting:
        e_h, e_c = float(lv.E_h[n]), float(lv.E_c[n])
        single = 1.0 - e_c / e_h if e_h != 0 else math.inf
        singles.append(single)
        if not (e_h / T_h < e_c / T_c and single <= eta_car + tol):
            viol.append(f"level {n + 1}: E_h={e_h:.17g}, E_c={e_c:.17g} gives single-level "
                        f"efficiency {single:.17g} above Carnot {eta_car:.17g}")
    best = max(singles) if singles else None
    if eta is not None and best is not None and eta > best + tol:
        warn.append(f"efficiency {eta:.17g} above best single-level value {best:.17g}")
    return AuditReport(not viol, eta, eta_car, best, tuple(viol), tuple(warn))
