"""Ground states of the isolated XXZ chain by two-site DMRG.

For N = 2 the answer is pencil-and-paper: the singlet at E = -2J - Jz.
For larger chains we compare against exact diagonalization and watch the
variance <H^2> - <H>^2, the convergence witness.
"""

from spinbattery import IsolatedChainSpec, dmrg_ground_state, exact_ground_state

print("N=2 analytic check: E = -2J - Jz")
for jz in (0.0, 0.5, 1.0, 1.5):
    res = dmrg_ground_state(IsolatedChainSpec(2, 1.0, jz))
    print(f"  Jz={jz:3.1f}: E_dmrg = {res.energy:+.12f}   E_exact = {-2 - jz:+.12f}")

print()
print("DMRG vs exact diagonalization:")
print(" N   Jz    E_dmrg            E_exact           |gap|      variance   sweeps")
for n in (4, 6, 8, 10):
    for jz in (0.5, 1.0, 1.5):
        spec = IsolatedChainSpec(n, 1.0, jz)
        res = dmrg_ground_state(spec)
        _, e_exact = exact_ground_state(spec)
        print(f"{n:2d}  {jz:3.1f}  {res.energy:+.12f}  {e_exact:+.12f}"
              f"  {abs(res.energy - e_exact):.1e}  {abs(res.variance):.1e}  {res.sweeps_used}")
