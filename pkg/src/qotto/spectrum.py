"""Bound-state spectra of 1D potentials.

Square wells and the harmonic trap are solved in closed form, the delta-barrier
well by bracketed root finding on its parity-resolved quantization conditions,
and everything else by a hard-wall sinc (sine) DVR on a finite interval.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize
from scipy.linalg import eigvalsh

from .errors import AccuracyError, DomainError, DomainTooSmallError, SolverError
from .potentials import (
    NATURAL,
    Harmonic,
    Potential,
    SquareWell,
    SquareWellDelta,
    UnitSystem,
    evaluate,
    is_box,
)

log = logging.getLogger(__name__)

EVEN, ODD = "even", "odd"

# decay exponent of the WKB tail required between the last turning point and the box edge
WKB_TAIL = 20.0
# margin of the DVR momentum cutoff over the largest classical momentum
MOMENTUM_MARGIN = 1.2
MOMENTUM_PAD = 10.0


@dataclass(frozen=True)
class Spectrum:
    """Sorted eigenenergies with parity labels and solver provenance.

    ``complete`` marks a finite-dimensional level set (nothing to truncate).
    """

    energies: np.ndarray
    parities: tuple | None
    solver: str
    est_error: float
    units: UnitSystem = NATURAL
    source: Potential | None = None
    complete: bool = False
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=float)
        if e.ndim != 1 or e.size == 0:
            raise ValueError("a spectrum needs at least one level")
        if np.any(np.diff(e) < 0):
            raise ValueError("energies must be sorted")
        e.setflags(write=False)
        object.__setattr__(self, "energies", e)
        if self.parities is not None and len(self.parities) != e.size:
            raise ValueError("one parity label per level")

    def __len__(self):
        return self.energies.size

    @property
    def gap(self) -> float:
        """First excitation energy ``E_2 - E_1``."""
        return float(self.energies[1] - self.energies[0])

    def head(self, n: int) -> "Spectrum":
        if n > len(self):
            raise ValueError(f"spectrum has only {len(self)} levels, asked for {n}")
        par = None if self.parities is None else self.parities[:n]
        return Spectrum(self.energies[:n], par, self.solver, self.est_error,
                        self.units, self.source, self.complete and n == len(self),
                        dict(self.meta))

    @classmethod
    def from_levels(cls, energies, units=NATURAL) -> "Spectrum":
        """Finite level scheme given explicitly (complete, no truncation)."""
        e = np.sort(np.asarray(energies, dtype=float))
        return cls(e, None, "explicit", 0.0, units, None, complete=True)


def _alternating(n):
    return tuple(EVEN if k % 2 == 0 else ODD for k in range(n))


def box_level(n, L, units=NATURAL):
    """``n**2 pi**2 hbar**2 / (2 m L**2)`` for integer or array ``n``."""
    return np.asarray(n, dtype=float) ** 2 * np.pi**2 * units.hbar**2 / (2 * units.mass * L**2)


def solve_square_well(L: float, n_levels: int, units: UnitSystem = NATURAL) -> Spectrum:
    if not L > 0 or n_levels < 1:
        raise DomainError("need L > 0 and n_levels >= 1")
    e = box_level(np.arange(1, n_levels + 1), L, units)
    return Spectrum(e, _alternating(n_levels), "analytic", 0.0, units,
                    SquareWell(L, units=units))


def solve_harmonic(omega: float, n_levels: int, units: UnitSystem = NATURAL) -> Spectrum:
    if not omega > 0 or n_levels < 1:
        raise DomainError("need omega > 0 and n_levels >= 1")
    e = units.hbar * omega * (np.arange(n_levels) + 0.5)
    return Spectrum(e, _alternating(n_levels), "analytic", 0.0, units,
                    Harmonic(omega, units=units))


def _brent(f, lo, hi, what):
    try:
        root, res = optimize.brentq(f, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps,
                                    maxiter=500, full_output=True, disp=False)
    except ValueError as exc:  # no sign change
        raise SolverError(f"{what}: {exc}", bracket=(lo, hi)) from exc
    if not res.converged:
        raise SolverError(f"{what}: root finder did not converge", bracket=(lo, hi),
                          residual=f(root))
    return root


def _delta_even_thetas(g, c, count):
    """Half phases ``theta = k L / 2`` of the lowest ``count`` even states.

    Even states obey ``g sin(theta)/theta + c cos(theta) = 0`` with
    ``c = 2 hbar^2 / (m L)``. A negative entry ``-phi`` encodes the bound state
    ``tanh(phi)/phi = -c/g`` (negative energy), present only for ``g < -c``.
    """
    def f(theta):
        return g * np.sinc(theta / np.pi) + c * np.cos(theta)

    out = []
    for j in range(count):
        if g == 0.0:
            out.append((j + 0.5) * np.pi)
        elif g > 0:
            out.append(_brent(f, (j + 0.5) * np.pi, (j + 1.0) * np.pi, f"even level {j}"))
        elif j > 0:
            out.append(_brent(f, j * np.pi, (j + 0.5) * np.pi, f"even level {j}"))
        elif g > -c:
            out.append(_brent(f, 0.0, 0.5 * np.pi, "even ground level"))
        elif g == -c:
            out.append(0.0)
        else:
            def h(phi):
                return g * (np.tanh(phi) / phi if phi > 0 else 1.0) + c
            out.append(-_brent(h, 0.0, -g / c, "bound even level"))
    return np.array(out)


def solve_delta_well(L: float, g: float, n_levels: int, units: UnitSystem = NATURAL) -> Spectrum:
    """Square well of width ``L`` with a ``g delta(x)`` at its centre.

    Odd states do not feel the delta and keep the bare energies
    ``(2k)^2 pi^2 hbar^2 / 2 m L^2``. Even states solve
    ``tan(kL/2) = -hbar^2 k / (m g)`` (or the ``tanh`` form for the single
    negative-energy state of a strong attractive well).
    """
    if not L > 0 or n_levels < 1:
        raise DomainError("need L > 0 and n_levels >= 1")
    if not np.isfinite(g):
        raise DomainError("g must be finite")
    c = 2 * units.hbar**2 / (units.mass * L)
    n_even = (n_levels + 1) // 2
    n_odd = n_levels // 2
    theta = _delta_even_thetas(float(g), c, n_even)
    e_even = np.sign(theta) * c * theta**2 / L
    e_odd = box_level(2 * np.arange(1, n_odd + 1), L, units)
    e = np.empty(n_levels)
    e[0::2] = e_even
    e[1::2] = e_odd
    # near-degenerate pairs (g -> inf) may round out of order by an ulp
    e = np.maximum.accumulate(e)
    return Spectrum(e, _alternating(n_levels), "transcendental", 0.0, units,
                    SquareWellDelta(L, g, units=units))


# ---------------------------------------------------------------------------
# sinc DVR on a finite interval


def sine_dvr_kinetic(n_points: int, length: float, units: UnitSystem = NATURAL) -> np.ndarray:
    """Kinetic matrix of the Colbert-Miller DVR for a finite interval.

    Grid points ``x_i = x_min + i * length / (n_points + 1)``, ``i = 1..n_points``,
    with the wavefunction vanishing at both ends.
    """
    i = np.arange(1, n_points + 1)
    return _kinetic_elements(i[:, None], i[None, :], n_points + 1, length, units)


def _kinetic_elements(i, j, n_int, length, units):
    pref = units.hbar**2 / (2 * units.mass) * np.pi**2 / (2 * length**2)
    d = i - j
    s = i + j
    sign = np.where(d % 2 == 0, 1.0, -1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = sign * (1.0 / np.sin(np.pi * d / (2 * n_int)) ** 2
                    - 1.0 / np.sin(np.pi * s / (2 * n_int)) ** 2)
        diag = (2.0 * n_int**2 + 1) / 3 - 1.0 / np.sin(np.pi * i / n_int) ** 2
    t = np.where(d == 0, diag * np.ones_like(t), t)
    return pref * t


def _grid(domain, n_points):
    x_min, x_max = domain
    dx = (x_max - x_min) / (n_points + 1)
    return x_min + dx * np.arange(1, n_points + 1)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


def _grid_potential(potential):
    """``V(x, dx)`` on grid points; cells straddling an interior kink get the cell average.

    Point sampling of a step potential converges only linearly in ``dx``
    because the step position is rounded to the grid; the cell average
    restores second-order convergence.
    """
    hw = potential.half_width
    kinks = np.array([k for k in potential.kinks() if hw is None or abs(k) < hw])

    def vgrid(x, dx):
        v = np.asarray(evaluate(potential, x), dtype=float)
        if not kinks.size:
            return v
        for k in kinks:
            for idx in np.nonzero(np.abs(x - k) < 0.5 * dx)[0]:
                a, b = x[idx] - 0.5 * dx, x[idx] + 0.5 * dx
                total = 0.0
                for lo, hi in ((a, k), (k, b)):
                    t = 0.5 * (hi - lo) * _GL_NODES + 0.5 * (hi + lo)
                    total += 0.5 * (hi - lo) * float(_GL_WEIGHTS @ evaluate(potential, t))
                v[idx] = total / dx
        return v
    return vgrid


def _dvr_eigenvalues(vgrid, domain, n_points, units, symmetric):
    """All DVR eigenvalues, split by parity when the box is symmetric about 0."""
    x_min, x_max = domain
    length = x_max - x_min
    n_int = n_points + 1
    dx = length / n_int
    if not symmetric:
        x = _grid(domain, n_points)
        h = sine_dvr_kinetic(n_points, length, units)
        h[np.diag_indices(n_points)] += vgrid(x, dx)
        return eigvalsh(h, overwrite_a=True, check_finite=False), None

    half = n_points // 2
    i = np.arange(1, half + 1)
    x = x_min + dx * i
    v = vgrid(x, dx)
    direct = _kinetic_elements(i[:, None], i[None, :], n_int, length, units)
    mirror = _kinetic_elements(i[:, None], (n_int - i)[None, :], n_int, length, units)

    h_odd = direct - mirror
    h_odd[np.diag_indices(half)] += v
    e_odd = eigvalsh(h_odd, overwrite_a=True, check_finite=False)

    if n_points % 2:
        mid = half + 1
        h_even = np.empty((half + 1, half + 1))
        h_even[:half, :half] = direct + mirror
        h_even[:half, :half][np.diag_indices(half)] += v
        col = np.sqrt(2.0) * _kinetic_elements(i, mid, n_int, length, units)
        h_even[:half, half] = col
        h_even[half, :half] = col
        h_even[half, half] = _kinetic_elements(mid, mid, n_int, length, units) + vgrid(np.array([0.0]), dx)[0]
    else:
        h_even = direct + mirror
        h_even[np.diag_indices(half)] += v
    e_even = eigvalsh(h_even, overwrite_a=True, check_finite=False)
    return e_even, e_odd


def _interleave(e_even, e_odd, n):
    n_even, n_odd = (n + 1) // 2, n // 2
    if n_even > e_even.size or n_odd > e_odd.size:
        return None
    e = np.empty(n)
    e[0::2] = e_even[:n_even]
    e[1::2] = e_odd[:n_odd]
    # tunnelling doublets can be split below machine precision
    return np.maximum.accumulate(e)


def _extent(vfun, energy, x0):
    """Half width of a symmetric interval whose ends sit above ``energy``."""
    x = x0
    for _ in range(200):
        if min(vfun(np.array([-x, x]))) >= energy:
            return x
        x *= 1.5
    raise DomainTooSmallError(f"potential does not confine energy {energy:.6g}")


def _phase_count(vfun, energy, lo, hi, units):
    """Semiclassical number of states below ``energy``: int p dx / (pi hbar)."""
    x = np.linspace(lo, hi, 20001)
    p = np.sqrt(2 * units.mass * np.clip(energy - vfun(x), 0.0, None))
    return float(integrate.trapezoid(p, x)) / (np.pi * units.hbar)


def _symmetric_bounds(vfun, x0):
    def bounds(e):
        h = 3.0 * x0 if e is None else _extent(vfun, e, x0)
        return (-h, h)
    return bounds


def _semiclassical_top(vfun, units, n_levels, e_window, bounds):
    """Rough energy of the highest level a request needs, and the potential minimum.

    ``bounds(E)`` returns the interval to integrate over for energy ``E``.
    Uses the quantization rule ``int p dx = pi hbar (n - 1/2)``.
    """
    lo, hi = bounds(None)
    x = np.linspace(lo, hi, 20001)
    v_min = float(np.min(vfun(x)))

    def energy_of(count):
        f = lambda e: _phase_count(vfun, e, *bounds(e), units) - (count - 0.5)  # noqa: E731
        span = 1.0
        while f(v_min + span) < 0:
            span *= 2.0
        while f(v_min + span / 2.0) > 0 and span > 1e-300:
            span /= 2.0
        return optimize.brentq(f, v_min, v_min + span, rtol=1e-6)

    e_top = energy_of(n_levels or 1)
    if e_window is not None:
        e_top = max(e_top, energy_of(1) + e_window)
    return e_top, v_min


def _outer_edge(vfun, e_top, tail, units, start):
    """Smallest x_b > 0 with V(x_b) >= e_top + tail and a WKB decay >= WKB_TAIL."""
    x_hi = max(start, 1e-300)
    while vfun(np.array([x_hi]))[0] < e_top + tail:
        x_hi *= 2.0
    for _ in range(60):
        x = np.linspace(0.0, x_hi, 8193)
        v = vfun(x)
        inside = np.nonzero(v < e_top)[0]
        turn = inside[-1] if inside.size else 0
        kappa = np.sqrt(2 * units.mass * np.clip(v - e_top, 0, None)) / units.hbar
        decay = np.concatenate([[0.0], np.cumsum(0.5 * (kappa[1:] + kappa[:-1]) * np.diff(x))])
        decay -= decay[turn]
        ok = (np.arange(x.size) > turn) & (decay >= WKB_TAIL) & (v >= e_top + tail)
        if ok.any():
            return float(x[np.argmax(ok)])
        x_hi *= 1.5
    raise DomainTooSmallError("could not bracket the classically forbidden region")


def _points_for(length, e_top, v_min, units):
    p = math.sqrt(2 * units.mass * max(e_top - v_min, 0.0)) / units.hbar
    k_max = MOMENTUM_MARGIN * p + MOMENTUM_PAD / length
    n = int(math.ceil(k_max * length / np.pi))
    return max(16, n + (n % 2 == 0))  # odd: keeps a grid point at the centre


def solve_dvr(potential: Potential, domain=None, n_points=None, n_levels=None,
              units: UnitSystem | None = None, *, e_window=None, temperature=0.0,
              rel_tol=1e-9, max_points=2**14) -> Spectrum:
    """Lowest levels of ``potential`` from a hard-wall sinc DVR.

    Parameters
    ----------
    potential : Potential
        Any shape except :class:`SquareWellDelta` (a delta cannot live on a grid).
    domain : (float, float), optional
        Box ``[x_min, x_max]``. Defaults to the walls of a square well, or a
        symmetric box for open potentials sized so that
        ``V(x_b) >= E_top + 25 T`` and the WKB tail of the top level decays by
        ``exp(-20)``.
    n_points : int, optional
        Initial grid size. Chosen from the largest classical momentum when omitted.
    n_levels : int, optional
        Number of levels to return.
    e_window : float, optional
        Return every level up to and including the first one with
        ``E - E_1 >= e_window``. Combined with ``n_levels`` the larger demand wins.
    temperature : float
        Bath temperature used to size the box tail.
    rel_tol : float
        The grid is doubled until every returned level changes by less than
        ``rel_tol`` relative to ``max(|E|, E_top - E_1)``.

    Raises
    ------
    DomainTooSmallError
        An explicit box is too narrow for the requested levels.
    AccuracyError
        The grid would have to exceed ``max_points``.
    """
    if isinstance(potential, SquareWellDelta):
        raise DomainError("a delta barrier cannot be represented on a DVR grid; "
                          "use solve_delta_well")
    if n_levels is None and e_window is None:
        raise ValueError("give n_levels and/or e_window")
    if n_levels is not None and n_levels < 1:
        raise ValueError("n_levels must be >= 1")
    if units is not None:
        potential = potential.with_units(units)
    units = potential.units

    def vfun(x):
        return evaluate(potential, x)
    vgrid = _grid_potential(potential)

    def demanded(e):
        n = n_levels or 1
        if e_window is not None:
            above = np.nonzero(e - e[0] >= e_window)[0]
            if not above.size:
                return None
            n = max(n, above[0] + 1)
        return n if n <= e.size else None

    box = is_box(potential)
    auto_domain = domain is None
    if box:
        hw = potential.half_width
        if domain is None:
            domain = (-hw, hw)
        elif domain[0] < -hw or domain[1] > hw:
            raise DomainError("DVR box extends beyond the hard walls")
    if domain is not None and not domain[1] > domain[0]:
        raise DomainError(f"empty DVR domain {domain}")
    if n_points is not None and n_levels is not None and n_points < 4 * n_levels:
        raise DomainError(f"n_points={n_points} < 4 * n_levels={4 * n_levels}")
    explicit_grid = n_points is not None
    tail = 25.0 * temperature

    if domain is not None:
        fixed = tuple(domain)
        bounds = lambda e: fixed  # noqa: E731
    else:
        bounds = _symmetric_bounds(vfun, potential.length_scale)
    e_est, v_min = _semiclassical_top(vfun, units, n_levels, e_window, bounds)

    n = n_points
    for _ in range(30):
        if not box:
            edge = _outer_edge(vfun, e_est, tail, units, potential.length_scale)
            if auto_domain:
                domain = (-edge, edge)
            elif edge > min(-domain[0], domain[1]) * (1 + 1e-12):
                raise DomainTooSmallError(
                    f"box {domain} clips the tail of levels up to E={e_est:.6g}; "
                    f"need |x| >= {edge:.6g}")
        length = domain[1] - domain[0]
        if not explicit_grid:
            n = _points_for(length, e_est, v_min, units)
        if n > max_points:
            raise AccuracyError(f"DVR grid would need {n} > {max_points} points")
        symmetric = math.isclose(domain[0], -domain[1], rel_tol=0, abs_tol=1e-14 * length)
        e_even, e_odd = _dvr_eigenvalues(vgrid, domain, n, units, symmetric)
        e_all = np.sort(np.concatenate([e_even, e_odd])) if symmetric else e_even
        need = demanded(e_all)
        if need is None or need > 0.8 * e_all.size:
            if explicit_grid:
                raise AccuracyError(f"{n} grid points cannot resolve the requested levels")
            e_est = v_min + 1.5 * (e_est - v_min)
            continue
        e_top = float(e_all[need - 1])
        if e_top > e_est:
            e_est = v_min + 1.1 * (e_top - v_min)
            continue
        break
    else:
        raise AccuracyError("DVR box/grid selection did not settle")

    def pick(e_even, e_odd, count):
        if symmetric:
            return _interleave(e_even, e_odd, count)
        return e_even[:count] if count <= e_even.size else None

    prev = (e_even, e_odd)
    n = 2 * n + 1
    history = []
    while True:
        if n > max_points:
            raise AccuracyError(
                f"DVR not converged to rel_tol={rel_tol:g} below {max_points} points; "
                f"history={history}")
        e_even, e_odd = _dvr_eigenvalues(vgrid, domain, n, units, symmetric)
        e_all = np.sort(np.concatenate([e_even, e_odd])) if symmetric else e_even
        count = demanded(e_all)
        if count is not None:
            cur = pick(e_even, e_odd, count)
            old = pick(*prev, count)
            if cur is not None and old is not None:
                scale_ = np.maximum(np.abs(cur), cur[-1] - cur[0])
                change = np.abs(cur - old)
                history.append((n, float(np.max(change / scale_))))
                if np.all(change <= rel_tol * scale_):
                    break
        prev = (e_even, e_odd)
        n = 2 * n + 1

    est_error = float(np.max(change))
    parities = _alternating(count) if symmetric else None
    log.debug("dvr %s: %d levels, %d points, box %s, err %.3g", type(potential).__name__,
              count, n, domain, est_error)
    return Spectrum(cur, parities, "dvr", est_error, units, potential,
                    meta={"n_points": n, "domain": tuple(domain), "rel_tol": rel_tol,
                          "refinement": history})


# ---------------------------------------------------------------------------


def _grow(solver, n0, e_window):
    n = max(n0, 2)
    while True:
        spec = solver(n)
        if spec.energies[-1] - spec.energies[0] >= e_window:
            return spec
        n *= 2


def solve(potential: Potential, n_levels=None, e_window=None, temperature=0.0, **dvr_kw) -> Spectrum:
    """Dispatch to the closed-form, transcendental or DVR solver for ``potential``.

    ``e_window`` asks for every level up to ``E_1 + e_window`` plus the first
    level beyond it; ``n_levels`` is a lower bound on the count.
    """
    if n_levels is None and e_window is None:
        raise ValueError("give n_levels and/or e_window")
    u = potential.units
    if isinstance(potential, SquareWell):
        fn = lambda n: solve_square_well(potential.L, n, u)  # noqa: E731
    elif isinstance(potential, Harmonic):
        fn = lambda n: solve_harmonic(potential.omega, n, u)  # noqa: E731
    elif isinstance(potential, SquareWellDelta):
        fn = lambda n: solve_delta_well(potential.L, potential.g, n, u)  # noqa: E731
    else:
        return solve_dvr(potential, n_levels=n_levels, e_window=e_window,
                         temperature=temperature, **dvr_kw)
    if e_window is None:
        return fn(n_levels)
    spec = _grow(fn, n_levels or 16, e_window)
    e = spec.energies
    k = int(np.nonzero(e - e[0] >= e_window)[0][0]) + 1
    return spec.head(max(k, n_levels or 1))
