"""
A delta barrier changes what the machine does
=============================================

Hot contact: bare box of length 2. Cold contact: box of length 2r with a
delta barrier of strength g at the centre. With both baths in the two-level
regime the machine is governed by the ratio of the two gaps, and the barrier
moves that ratio freely. The ideal-gas cycle at the same r is shown beside it.
"""

import numpy as np

from qotto.cycle import classical_otto
from qotto.explore import fig2_temperatures, optimize_g, sweep_fig2

r_grid = [0.8, 1.0, 2.0, 3.0, 3.5, 4.0]
g_grid = [-2.0, -1.0, 0.0, 1.0, 10.0]            # units of g_cri = 2/(L_c)
classical, quantum = sweep_fig2(r_grid, g_grid)

T_h, T_c = fig2_temperatures(1.0)
print(f"baths: T_h={T_h:.6f}  T_c={T_c:.6f}  (T_h/T_c = 12)")
modes = quantum.column("mode")
eta = quantum.values("eta_over_carnot")
print("r     classical     " + "  ".join(f"g={g:+5.1f}" for g in g_grid))
for i, r in enumerate(r_grid):
    cls = classical.column("mode")[i, 0]
    cells = "  ".join(f"{m[:3]} {e:4.2f}" if np.isfinite(e) else f"{m[:3]}  -- "
                      for m, e in zip(modes[i], eta[i]))
    print(f"{r:4.1f}  {cls:<12}  {cells}")

# the broken ideal-gas machine at r = 1 runs as an engine with a repulsive barrier,
# and above r = sqrt(12) an attractive one turns the refrigerator back into an engine
print("\nclassical r=1:", classical_otto(1.0, 3.0, T_h, T_c).mode)
print("classical r=4:", classical_otto(4.0, 3.0, T_h, T_c).mode)

# best barrier per column
for r in (0.8, 2.0, 4.0):
    opt = optimize_g(r, *fig2_temperatures(r))
    print(f"r={r}: g*/g_cri={opt.argmax:+.4f}  eta={opt.objective_value:.6f}  "
          f"W-floor binding: {opt.metadata['W_floor_binding']}")
