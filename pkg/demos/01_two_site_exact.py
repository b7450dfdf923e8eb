"""Warm-up: a two-site domain wall, where everything is known in closed form.

|up, down> under the XX coupling oscillates with <Z_1(t)> = cos(4Jt) and a
bond current Q(t) = 4J sin(4Jt).  The TEBD engine, the exact Krylov oracle,
and the analytic formulas all have to agree.
"""

import numpy as np

from spinbattery import (
    EvolutionConfig,
    IsolatedChainSpec,
    evolve,
    exact_evolve,
    dense_from_bits,
    from_product_state,
    trotter_schedule,
)

spec = IsolatedChainSpec(2, J=1.0, Jz=0.0)
dt = 0.05

rec = evolve(from_product_state([1, 0]), trotter_schedule(spec, dt),
             EvolutionConfig(dt=dt, t_max=2.0, max_D=4))
oracle = exact_evolve(spec, dense_from_bits([1, 0]), rec.times)

t = rec.times
print(" t      <Z_1> TEBD   <Z_1> exact  cos(4Jt)     Q TEBD      4J sin(4Jt)")
for k in range(0, len(t), 8):
    print(f"{t[k]:5.2f}  {rec.z_profile[k, 0]:+.8f}  {oracle.z_profile[k, 0]:+.8f}"
          f"  {np.cos(4 * t[k]):+.8f}  {rec.junction_current[k]:+.8f}  {4 * np.sin(4 * t[k]):+.8f}")

print()
print("max |TEBD - exact| over the grid:",
      float(np.max(np.abs(rec.z_profile - oracle.z_profile))))
print("max |TEBD - analytic cos(4Jt)|:",
      float(np.max(np.abs(rec.z_profile[:, 0] - np.cos(4 * t)))))
