"""Half-bound states at the edges.

At special couplings a solution sits exactly at E = +m or -m without being
normalisable. There the threshold law tan D ~ xi^p flips the sign of p, and
the strong theorem picks up an extra half-integer.
"""

from dirac_levinson.dirac_core import classify_edge_state, edge_residual, threshold_fit
from dirac_levinson.model import ModelParams, PotentialSpec
from dirac_levinson.squarewell_oracle import oracle_critical_couplings

params = ModelParams()
for parity, edge in (("even", "+m"), ("odd", "+m"), ("even", "-m")):
    generic = threshold_fit(PotentialSpec.square(4.0, lam=0.37), params, parity, edge)
    print(f"{parity} at {edge}: generic slope {generic.exponent:+.4f}")
    for lam in oracle_critical_couplings(4.0, parity, edge, 3):
        s = PotentialSpec.square(4.0, lam=lam)
        fit = threshold_fit(s, params, parity, edge)
        print(f"   lambda* = {lam:.10f}: edge residual {edge_residual(s, params, parity, edge):+.1e}, "
              f"slope {fit.exponent:+.4f}, {classify_edge_state(s, params, parity, edge)}")
