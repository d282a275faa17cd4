"""
Classical limit by shrinking Planck's constant
==============================================

Multiplying potentials and temperatures by xi^2 is the same as solving with
hbar/xi. The work per xi^2 of the r = 2 box machine drifts toward the
ideal-gas value as xi grows, and both routes to the scaled spectrum agree.
"""

from qotto import IonTrap, SquareWell, classical_otto, scaled_cycle, verify_scaling_relation
from qotto.limits import classical_limit_series, extrapolate_classical

T_h, T_c = 60.0, 5.0
s = classical_limit_series(SquareWell(2.0), SquareWell(4.0), T_h, T_c)
for xi, w, n, ch in zip(s.xi_values, s.work_per_xi2, s.n_kept, (None,) + s.rel_changes):
    step = "" if ch is None else f"  change {ch:.2e}"
    print(f"xi={xi:5.0f}  W/xi^2={w: .9f}  levels={n:5d}{step}")
print("converged from xi =", s.converged_at)
print("extrapolated to 1/xi -> 0:", extrapolate_classical(s))
print("ideal gas (C_v = 1/2):    ", classical_otto(2.0, 3.0, T_h, T_c).W)

# the two scaling routes
a = scaled_cycle(SquareWell(2.0), SquareWell(3.0), 4.0, 1.0, 5.0, path="potential")
b = scaled_cycle(SquareWell(2.0), SquareWell(3.0), 4.0, 1.0, 5.0, path="hbar")
print(f"xi=5 via potential: W={a.W:.15f}   via hbar: W={b.W:.15f}")

rep = verify_scaling_relation(IonTrap(1.0, 1.7, 24.27), (2, 10, 100))
print("ion trap level-by-level mismatch:", rep.max_rel_error)
