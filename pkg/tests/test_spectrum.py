import dataclasses

import numpy as np
import pytest
from scipy.linalg import eigh_tridiagonal

from qotto.errors import DomainError, DomainTooSmallError, SolverError
from qotto.potentials import (
    Harmonic,
    IonTrap,
    Potential,
    SquareWell,
    SquareWellDelta,
    SquareWellFiniteBarrier,
    UnitSystem,
)
from qotto.spectrum import (
    Spectrum,
    box_level,
    sine_dvr_kinetic,
    solve,
    solve_delta_well,
    solve_dvr,
    solve_harmonic,
    solve_square_well,
)

# even-parity levels for L = 2, hbar = m = 1 from tests/oracles/delta_well_roots.py
# (40-digit roots of the tangent form of the matching condition)
DELTA_EVEN = {
    1.0: (2.0579291828472614187, 12.069671015222778394, 31.829553275219343317),
    -1.0: (0.0, 10.095364278213314987, 29.83975797205470944),
    10.0: (4.0977334439142576163, 16.592013848048854661, 37.917364888511877694),
    -5.0: (-12.497728146116596802, 7.1828928384547390261, 26.283050257377940509),
    1e6: (4.9347923309550826394, 19.739169323820330947, 44.413130978595746092),
}


@pytest.mark.parametrize("g", sorted(DELTA_EVEN))
def test_delta_well_against_high_precision_roots(g):
    e = solve_delta_well(2.0, g, 6).energies[0::2]
    ref = np.array(DELTA_EVEN[g])
    assert np.all(np.abs(e - ref) <= 1e-13 * np.maximum(np.abs(ref), 1.0))


def test_delta_well_zero_strength_is_box():
    assert np.allclose(solve_delta_well(3.0, 0.0, 12).energies,
                       solve_square_well(3.0, 12).energies, rtol=1e-14, atol=0)


@dataclasses.dataclass(frozen=True)
class _SmearedDelta(Potential):
    """Normalized Gaussian of area g and width w centred in a box of length L."""

    L: float
    g: float
    w: float

    @property
    def half_width(self):
        return 0.5 * self.L

    def kinks(self):
        return (-0.5 * self.L, 0.5 * self.L)

    def _values(self, x):
        return self.g * np.exp(-0.5 * (x / self.w) ** 2) / (np.sqrt(2 * np.pi) * self.w)

    def scaled(self, xi):
        return dataclasses.replace(self, g=xi**2 * self.g)


def test_delta_well_against_smeared_barrier_dvr():
    widths = np.array([0.04, 0.02, 0.01])
    e0 = []
    for w in widths:
        n = int(16.0 / w) | 1
        e0.append(solve_dvr(_SmearedDelta(2.0, 1.0, w), n_points=n, n_levels=2,
                            rel_tol=1e-9).energies[0])
    limit = np.polyfit(widths, e0, 2)[-1]
    exact = solve_delta_well(2.0, 1.0, 2).energies[0]
    assert abs(limit - exact) < 1e-4 * exact


def test_bound_state_for_strong_attraction():
    spec = solve_delta_well(2.0, -5.0, 4)
    assert spec.energies[0] < 0 < spec.energies[1]


def test_box_levels_and_units():
    u = UnitSystem(2.0, 3.0)
    e = solve_square_well(1.5, 5, u).energies
    n = np.arange(1, 6)
    assert np.allclose(e, (n * np.pi * 2.0 / 1.5) ** 2 / (2 * 3.0), rtol=1e-15)
    assert box_level(2, 1.5, u) == pytest.approx(e[1], rel=1e-15)


def test_harmonic_analytic():
    e = solve_harmonic(2.0, 4).energies
    assert np.allclose(e, [1.0, 3.0, 5.0, 7.0], rtol=1e-15)


def test_dvr_harmonic_matches_analytic():
    spec = solve_dvr(Harmonic(1.0), n_levels=40)
    ref = np.arange(40) + 0.5
    assert np.max(np.abs(spec.energies[:40] - ref) / ref) < 1e-9


def test_dvr_box_matches_analytic():
    spec = solve_dvr(SquareWell(2.0), n_levels=10, rel_tol=1e-11)
    ref = solve_square_well(2.0, 10).energies
    assert np.max(np.abs(spec.energies - ref) / ref) < 1e-8


def test_zero_barrier_is_box():
    a = solve(SquareWellFiniteBarrier(2.0, 0.0, 0.2), n_levels=6).energies
    b = solve_square_well(2.0, 6).energies
    assert np.allclose(a, b, rtol=1e-8)


def _finite_difference_levels(potential, half, n_points, k):
    x = np.linspace(-half, half, n_points + 2)[1:-1]
    h = x[1] - x[0]
    d = 1.0 / h**2 + potential(x)
    off = np.full(n_points - 1, -0.5 / h**2)
    return eigh_tridiagonal(d, off, select="i", select_range=(0, k - 1))[0]


def test_dvr_ion_trap_against_finite_differences():
    trap = IonTrap(1.0, 1.7, 24.27)
    dvr = solve_dvr(trap, n_levels=6, rel_tol=1e-11).energies[:6]
    half = 70.0
    coarse = _finite_difference_levels(trap, half, 40000, 6)
    fine = _finite_difference_levels(trap, half, 80001, 6)
    richardson = (4 * fine - coarse) / 3
    assert np.max(np.abs(dvr - richardson) / dvr) < 1e-7


def test_ion_trap_double_well_near_degenerate():
    e = solve(IonTrap(1.0, 1.7, 24.27), n_levels=4).energies
    assert e[1] - e[0] < 1e-2 * (e[2] - e[1])


def test_sine_dvr_kinetic_reproduces_box():
    t = sine_dvr_kinetic(255, 2.0)
    assert np.allclose(t, t.T)
    ev = np.linalg.eigvalsh(t)[:8]
    assert np.allclose(ev, solve_square_well(2.0, 8).energies, rtol=1e-12)


def test_e_window_returns_first_level_past_window():
    spec = solve(Harmonic(1.0), e_window=7.5)
    e = spec.energies
    assert e[-1] - e[0] >= 7.5 and e[-2] - e[0] < 7.5


def test_dvr_rejects_delta_and_small_inputs():
    with pytest.raises(DomainError):
        solve_dvr(SquareWellDelta(2.0, 1.0), n_levels=3)
    with pytest.raises(DomainError):
        solve_dvr(Harmonic(1.0), n_points=10, n_levels=5)
    with pytest.raises(DomainTooSmallError):
        solve_dvr(Harmonic(1.0), domain=(-2.0, 2.0), n_levels=10)


def test_spectrum_validation():
    with pytest.raises(ValueError):
        Spectrum(np.array([1.0, 0.5]), None, "explicit", 0.0)
    assert np.all(Spectrum.from_levels([1.0, 0.5]).energies == [0.5, 1.0])
    s = Spectrum.from_levels([0.0, 1.0, 3.0])
    assert s.complete and s.gap == 1.0 and len(s.head(2)) == 2
    with pytest.raises(ValueError):
        s.energies[0] = 5.0


def test_solver_error_carries_bracket():
    err = SolverError("x", bracket=(1.0, 2.0), residual=0.1)
    assert err.bracket == (1.0, 2.0)


def test_scaled_paths_agree_for_dvr():
    trap = IonTrap(1.0, 1.7, 24.27)
    xi = 3.0
    a = solve(trap.with_units(UnitSystem(1.0 / xi, 1.0)), n_levels=8).energies
    b = solve(trap.scaled(xi), n_levels=8).energies / xi**2
    assert np.max(np.abs(a - b) / np.abs(b)) < 1e-8
