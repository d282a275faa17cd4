"""
Homogeneous scaling: quantum and classical Otto efficiencies coincide
=====================================================================

When every level of the hot Hamiltonian is the same multiple of the
corresponding cold level, the Otto efficiency depends only on that ratio.
A harmonic trap with a halved frequency and a box with doubled length are
the two textbook cases.
"""

import numpy as np

from qotto import Harmonic, SquareWell, classical_otto, homogeneous_work_oracle, potential_cycle
from qotto.limits import thermal_spectra

# harmonic trap, omega_h / omega_c = 2: efficiency 1 - 1/2 at every temperature pair
for T_h, T_c in [(4.0, 1.0), (10.0, 0.5), (0.9, 0.3)]:
    res = potential_cycle(Harmonic(2.0), Harmonic(1.0), T_h, T_c)
    print(f"harmonic T_h={T_h:5.2f} T_c={T_c:4.2f}  {res.mode}  eta={res.eta_engine:.15f}")

# box L_c / L_h = 2: levels scale by 1/4, same as an ideal gas with gamma = 3
res = potential_cycle(SquareWell(2.0), SquareWell(4.0), 60.0, 5.0)
gas = classical_otto(2.0, 3.0, 60.0, 5.0)
print(f"box     eta={res.eta_engine:.15f}   ideal gas eta={gas.eta:.15f}")

# the work itself differs: the quantum heat capacity is not constant.
# An integral of C(T) over [q T_c, T_h] gives the same totals by a second route.
spec_h, spec_c = thermal_spectra(SquareWell(2.0), SquareWell(4.0), 60.0, 5.0)
oracle = homogeneous_work_oracle(spec_h, 4.0, 60.0, 5.0)
print(f"level sums W={res.W:.12f}  heat-capacity integral W={oracle.W:.12f}")
print(f"classical W={gas.W:.12f}  relative gap {abs(res.W - gas.W) / abs(gas.W):.3e}")

# ratio of work to the classical value approaches 1 as temperatures rise
for T_c in (0.5, 5.0, 50.0):
    q = potential_cycle(SquareWell(2.0), SquareWell(4.0), 12 * T_c, T_c)
    c = classical_otto(2.0, 3.0, 12 * T_c, T_c)
    print(f"T_c={T_c:5.1f}  W_quantum/W_classical = {q.W / c.W:.6f}")

print("levels kept at T_h=60:", np.size(spec_h.energies))
