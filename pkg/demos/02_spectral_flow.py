"""Switch the coupling on and watch levels cross the gap.

For a deep square well (V0 = 4) levels enter at +m, fall through the gap
and the lowest even one dives into the negative continuum at -m. The sweep
records every crossing; the counts satisfy mu_plus - n_e = mu_minus and
nu_plus - n_o = nu_minus.
"""

from dirac_levinson.model import ModelParams, PotentialSpec
from dirac_levinson.spectral_flow import count_crossings, level_histories, sweep_coupling
from dirac_levinson.squarewell_oracle import oracle_critical_couplings

params = ModelParams()
well = PotentialSpec.square(4.0)
trace = sweep_coupling(well, params, lam_steps=100)

for ev in trace.events:
    print(f"lambda* = {ev.lam:.10f}  {ev.parity:4s} level {ev.index} crosses {ev.edge} ({ev.direction})")
print("closed-form even -m crossing:", oracle_critical_couplings(4.0, "even", "-m", 1))

print(count_crossings(trace))
for (parity, j), hist in sorted(level_histories(trace).items()):
    lam, E, nodes = hist[-1]
    print(f"{parity} level {j}: {len(hist)} grid points, nodes = {nodes}, E(lambda={lam:g}) = {E:+.6f}")

# trace.to_csv() gives lambda, parity, nodes, energy rows for plotting E_n(lambda)
