"""Size scaling of the quasi-steady current across the three regimes.

Below the isotropic point the current saturates with N (ballistic); at the
point it decays algebraically; above it the decay is exponential.  Desk
sizes are small, so exponents are rough, but the model-selection residuals
already separate the regimes the way the full-scale study does.

This takes a few minutes: it is 9 quench evolutions.
"""

from spinbattery import (
    AnalysisWindow,
    ChainSpec,
    EvolutionConfig,
    SystemPrep,
    classify_regime,
    evolve,
    fit_exponential,
    fit_power_law,
    initial_state,
    quasi_steady_current,
    trotter_schedule,
)

sizes = (8, 12, 16)
for jz in (0.5, 1.0, 1.5):
    currents = []
    for n in sizes:
        spec = ChainSpec(N=n, N_b=n, J=1.0, Jz=jz)
        psi = initial_state(spec, SystemPrep.GROUND)
        cfg = EvolutionConfig(dt=0.1, t_max=0.5 * n, max_D=96)
        rec = evolve(psi, trotter_schedule(spec, cfg.dt), cfg)
        qbar = quasi_steady_current(rec, AnalysisWindow.fit_window(n))
        currents.append(qbar)
        print(f"Jz={jz:3.1f}  N={n:2d}: qbar = {qbar:.6f}  (max D reached {rec.max_bond_dim.max()})")
    power = fit_power_law(sizes, currents)
    expo = fit_exponential(sizes, currents)
    label = classify_regime(power, expo)
    print(f"  power law:   alpha = {power.exponent:+.3f}, log-residual {power.residual:.2e}")
    print(f"  exponential: beta  = {expo.exponent:+.3f}, log-residual {expo.residual:.2e}")
    print(f"  regime label: {label.value}\n")
