"""Canonical (Gibbs) ensembles on a discrete spectrum, plus the classical
mean energy of a 1D particle in an external potential."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DomainError, TruncationError
from .potentials import Potential, evaluate
from .spectrum import Spectrum

#: Largest tolerated Boltzmann weight (relative to the ground level) of the
#: first dropped level, scaled by N_SAFETY to cover the tail beyond it.
TAIL_TOL = 1e-10
N_SAFETY = 100


def thermal_window(T: float) -> float:
    """Excitation energy above which levels are dropped at temperature ``T``."""
    if not T > 0:
        raise DomainError(f"temperature must be positive, got {T}")
    return T * math.log(N_SAFETY / TAIL_TOL)


@dataclass(frozen=True)
class ThermalEnsemble:
    """Gibbs populations of the kept levels of a spectrum.

    ``Z`` is the partition sum with energies measured from the ground level;
    ``tail_bound`` majorizes the probability carried by dropped levels.
    """

    energies: np.ndarray
    populations: np.ndarray
    T: float
    n_kept: int
    spectrum: Spectrum
    Z: float
    tail_bound: float

    @property
    def mean_energy(self) -> float:
        return math.fsum(self.energies * self.populations)

    @property
    def heat_capacity(self) -> float:
        e0 = self.energies - self.mean_energy
        return math.fsum(self.populations * e0**2) / self.T**2


def _n_kept(e, T):
    """Index past the first level whose scaled weight falls below TAIL_TOL."""
    w = N_SAFETY * np.exp(-(e - e[0]) / T)
    small = np.nonzero(w < TAIL_TOL)[0]
    return None if not small.size else int(small[0]) + 1


def thermalize(spectrum: Spectrum, T: float, n_levels: int | None = None) -> ThermalEnsemble:
    """Gibbs state of ``spectrum`` at temperature ``T``.

    The ensemble keeps levels up to and including the first one whose weight
    times ``N_SAFETY`` drops below ``TAIL_TOL``. Complete (finite) spectra
    are kept whole. ``n_levels`` forces a fixed count instead.

    Raises
    ------
    TruncationError
        An incomplete spectrum ends before the tail criterion is met.
    """
    if not (T > 0 and np.isfinite(T)):
        raise DomainError(f"temperature must be positive and finite, got {T}")
    e = spectrum.energies
    if n_levels is not None:
        if n_levels > e.size:
            raise TruncationError(f"asked for {n_levels} levels, spectrum has {e.size}",
                                  needed_levels=n_levels)
        k = n_levels
    elif spectrum.complete:
        k = e.size
    else:
        k = _n_kept(e, T)
        if k is None:
            raise TruncationError(
                f"spectrum tops out at E-E1={e[-1] - e[0]:.6g}, needs {thermal_window(T):.6g} "
                f"at T={T:.6g}", needed_energy=e[0] + thermal_window(T))
    e = e[:k]
    w = np.exp(-(e - e[0]) / T)
    z = math.fsum(w)
    p = w / z
    full = k == spectrum.energies.size and spectrum.complete
    tail = 0.0 if full else N_SAFETY * float(w[-1]) / z
    return ThermalEnsemble(e, p, float(T), k, spectrum, z, tail)


def populations(energies, T: float) -> np.ndarray:
    """Gibbs populations of an explicit (complete) level set."""
    return thermalize(Spectrum.from_levels(energies), T).populations


def mean_energy(state, T: float | None = None) -> float:
    """``sum_n P_n E_n`` of an ensemble, or of ``spectrum`` thermalized at ``T``."""
    if isinstance(state, ThermalEnsemble):
        return state.mean_energy
    return thermalize(state, T).mean_energy


def heat_capacity(spectrum: Spectrum, T: float) -> float:
    """``C = Var(E) / T**2`` of the Gibbs state."""
    return thermalize(spectrum, T).heat_capacity


def classical_mean_energy(potential: Potential, T: float, cutoff: float | None = None) -> float:
    """Classical ``<H> = T/2 + <V>`` for a particle in ``potential`` at ``T``.

    ``<V>`` is a ratio of Boltzmann integrals over the accessible region,
    split at the kinks of the potential. ``cutoff`` bounds the integration for
    open potentials (default: where ``V - V_min`` exceeds ``60 T``).
    """
    if not (T > 0 and np.isfinite(T)):
        raise DomainError(f"temperature must be positive and finite, got {T}")
    hw = potential.half_width
    if hw is not None:
        lo, hi = -hw, hw
    else:
        hi = cutoff or _open_cutoff(potential, T)
        lo = -hi
    # a delta barrier is a single point and drops out of the classical density;
    # quadrature nodes never sit on the breakpoints
    pts = sorted({p for p in potential.kinks() if lo < p < hi} | {lo, hi})
    x = np.linspace(lo, hi, 4001)
    x = x[x != 0.0]
    v_min = float(np.min(evaluate(potential, x)))

    def vv(t):
        t = 1e-300 if t == 0.0 else t
        return float(evaluate(potential, t)) - v_min

    def weight(t):
        return math.exp(-vv(t) / T)

    z = 0.0
    zv = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        z += integrate.quad(weight, a, b, epsabs=0, epsrel=1e-13, limit=500)[0]
        zv += integrate.quad(lambda t: vv(t) * weight(t), a, b, epsabs=0, epsrel=1e-13,
                             limit=500)[0]
    return 0.5 * T + v_min + zv / z


def _open_cutoff(potential, T):
    x = 1.0
    v0 = float(evaluate(potential, 0.0))
    while float(evaluate(potential, x)) - v0 < 60.0 * T or float(evaluate(potential, -x)) - v0 < 60.0 * T:
        x *= 1.5
    return x


def classical_heat_capacity(potential: Potential, T: float, rel_step: float = 1e-4) -> float:
    """Centred finite difference of :func:`classical_mean_energy`."""
    h = rel_step * T
    return (classical_mean_energy(potential, T + h) - classical_mean_energy(potential, T - h)) / (2 * h)
