"""Confining 1D potentials: square wells (bare, delta barrier, finite barrier),
the harmonic trap and the Paul-trap + optical-lattice potential.

All shapes are even in ``x``. Square-well walls are a hard domain boundary:
``evaluate`` returns ``numpy.inf`` outside ``|x| <= L/2``.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

#: CODATA 2018 values used for SI runs.
HBAR_SI = 1.054571817e-34
AMU_SI = 1.66053906660e-27
KB_SI = 1.380649e-23


@dataclass(frozen=True)
class UnitSystem:
    """Values of hbar and the particle mass. Temperatures are energies (k_B = 1)."""

    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if not (self.hbar > 0 and self.mass > 0):
            raise DomainError(f"hbar and mass must be positive, got {self}")

    @property
    def k_B(self) -> float:
        return 1.0

    @classmethod
    def natural(cls) -> "UnitSystem":
        return cls(1.0, 1.0)

    @classmethod
    def si(cls, mass_amu: float = 174.0) -> "UnitSystem":
        return cls(HBAR_SI, mass_amu * AMU_SI)

    def with_hbar(self, hbar: float) -> "UnitSystem":
        return dataclasses.replace(self, hbar=hbar)


NATURAL = UnitSystem()


@dataclass(frozen=True)
class Potential:
    """Base class; concrete shapes add their parameters."""

    units: UnitSystem = field(default=NATURAL, kw_only=True)

    # hard-wall half width, None for unbounded shapes
    @property
    def half_width(self):
        return None

    @property
    def length_scale(self) -> float:
        """Characteristic size, used to start domain searches."""
        return self.half_width or 1.0

    def kinks(self):
        """Points where the potential is not smooth (used to split quadratures)."""
        return ()

    def _values(self, x):
        raise NotImplementedError

    def __call__(self, x):
        return evaluate(self, x)

    def scaled(self, xi):
        raise NotImplementedError

    def with_units(self, units: UnitSystem):
        return dataclasses.replace(self, units=units)


@dataclass(frozen=True)
class SquareWell(Potential):
    L: float

    def __post_init__(self):
        if not self.L > 0:
            raise DomainError(f"well length must be positive, got L={self.L}")

    @property
    def half_width(self):
        return 0.5 * self.L

    def kinks(self):
        return (-0.5 * self.L, 0.5 * self.L)

    def _values(self, x):
        return np.zeros_like(x)

    def scaled(self, xi):
        return self


@dataclass(frozen=True)
class SquareWellDelta(Potential):
    """Square well with a ``g * delta(x)`` barrier (g > 0) or well (g < 0) at the centre."""

    L: float
    g: float

    def __post_init__(self):
        if not self.L > 0:
            raise DomainError(f"well length must be positive, got L={self.L}")
        if not np.isfinite(self.g):
            raise DomainError(f"barrier strength must be finite, got g={self.g}")

    @property
    def half_width(self):
        return 0.5 * self.L

    def kinks(self):
        return (-0.5 * self.L, 0.0, 0.5 * self.L)

    def _values(self, x):
        if np.any(x == 0.0):
            raise DomainError("the delta barrier cannot be evaluated at x = 0")
        return np.zeros_like(x)

    def scaled(self, xi):
        return dataclasses.replace(self, g=xi**2 * self.g)


@dataclass(frozen=True)
class SquareWellFiniteBarrier(Potential):
    """Square well with a central barrier of height V0 and width eps."""

    L: float
    V0: float
    eps: float

    def __post_init__(self):
        if not self.L > 0:
            raise DomainError(f"well length must be positive, got L={self.L}")
        if not 0 < self.eps < self.L:
            raise DomainError(f"barrier width must lie in (0, L), got eps={self.eps}")
        if not self.V0 >= 0:
            raise DomainError(f"barrier height must be non-negative, got V0={self.V0}")

    @property
    def half_width(self):
        return 0.5 * self.L

    def kinks(self):
        return (-0.5 * self.L, -0.5 * self.eps, 0.5 * self.eps, 0.5 * self.L)

    def _values(self, x):
        return np.where(np.abs(x) <= 0.5 * self.eps, self.V0, 0.0)

    def scaled(self, xi):
        return dataclasses.replace(self, V0=xi**2 * self.V0)


@dataclass(frozen=True)
class Harmonic(Potential):
    omega: float

    def __post_init__(self):
        if not self.omega > 0:
            raise DomainError(f"omega must be positive, got {self.omega}")

    @property
    def length_scale(self):
        return float(np.sqrt(self.units.hbar / (self.units.mass * self.omega)))

    def _values(self, x):
        return 0.5 * self.units.mass * self.omega**2 * x**2

    def scaled(self, xi):
        return dataclasses.replace(self, omega=xi * self.omega)


@dataclass(frozen=True)
class IonTrap(Potential):
    """Harmonic Paul trap plus a standing-wave lattice of period ``a``.

    ``V(x) = m w^2 a^2 (x^2 / 2a^2 + kappa / 4 pi^2 (1 + cos(2 pi x / a)))``.
    ``kappa = 1`` cancels the curvature at the origin (flat bottom);
    ``kappa > 1`` produces a central barrier (double well).
    """

    omega: float
    kappa: float
    a: float

    def __post_init__(self):
        if not self.omega > 0:
            raise DomainError(f"omega must be positive, got {self.omega}")
        if not self.kappa >= 0:
            raise DomainError(f"kappa must be non-negative, got {self.kappa}")
        if not self.a > 0:
            raise DomainError(f"lattice constant must be positive, got a={self.a}")

    @property
    def length_scale(self):
        return self.a

    @property
    def energy_scale(self):
        return self.units.mass * self.omega**2 * self.a**2

    def _values(self, x):
        u = x / self.a
        return self.energy_scale * (
            0.5 * u**2 + self.kappa / (4 * np.pi**2) * (1.0 + np.cos(2 * np.pi * u))
        )

    def scaled(self, xi):
        return dataclasses.replace(self, omega=xi * self.omega)


def evaluate(potential: Potential, x):
    """Potential energy at ``x`` (scalar or array).

    Hard walls give ``numpy.inf`` for ``|x| > L/2``. Raises :class:`DomainError`
    for non-finite ``x`` and for the delta barrier sampled at ``x = 0``.
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("x must be finite")
    v = np.asarray(potential._values(arr), dtype=float)
    hw = potential.half_width
    if hw is not None:
        v = np.where(np.abs(arr) > hw, np.inf, v)
    return v if v.ndim else float(v)


def scale(potential: Potential, xi: float) -> Potential:
    """Return the potential multiplied pointwise by ``xi**2``; geometry is unchanged."""
    if not xi > 0:
        raise DomainError(f"xi must be positive, got {xi}")
    return potential.scaled(xi)


def is_box(potential: Potential) -> bool:
    return potential.half_width is not None
