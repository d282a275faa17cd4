"""
Trapped ion with an optical lattice
===================================

A harmonic trap (hot contact, kappa = 1, flat bottom) is deformed into a
double well by the lattice (cold contact, kappa = 1.7). Temperatures follow
from a cold-bath occupation of 0.033 and a bath ratio of 41.6. The quantum
cycle runs as an engine; the xi-series shows how the work per xi^2 moves as
the motion becomes classical. Where that series lands depends on the lattice
constant, so two values are compared. The run takes a few minutes.
"""

from qotto.explore import (
    FIG3_CLASSICAL_SCHEDULE,
    TrapUnits,
    fig3_temperatures,
    ion_trap_pair,
)
from qotto.limits import classical_limit_series, potential_cycle

units = TrapUnits()
T_h, T_c = fig3_temperatures(1.7, 1.0)
print(f"trap length unit {units.length * 1e9:.3f} nm, T_c={T_c:.5f}, T_h={T_h:.4f}")
print(f"in kelvin: T_c={T_c * units.kelvin:.3e} K, T_h={T_h * units.kelvin:.3e} K")

for a in (185e-9, 285e-9):
    hot, cold = ion_trap_pair(1.7, 1.0, a=a)
    res = potential_cycle(hot, cold, T_h, T_c)
    print(f"\na = {a * 1e9:.0f} nm (a/x0 = {a / units.length:.2f})")
    print(f"  quantum: {res.mode}, W={res.W:.6f}, levels={res.n_levels}")
    s = classical_limit_series(hot, cold, T_h, T_c, FIG3_CLASSICAL_SCHEDULE)
    print("  xi-series:", s.trend())
    print("  modes:    ", ", ".join(str(m) for m in s.modes))
