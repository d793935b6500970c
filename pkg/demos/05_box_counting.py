"""Counting levels in a periodic box.

In (-L, L) the continuum momenta solve k L + D(k) = n pi. The threshold
phase shift forbids the lowest integers: the first admitted n is exactly
the number of levels that have left the continuum at +m.
"""

from dirac_levinson.box_spectrum import audit_level_shift, free_levels, quantized_levels
from dirac_levinson.model import ModelParams, PotentialSpec
from dirac_levinson.spectral_flow import winding_counts

params = ModelParams()
for v0 in (0.5, 2.6):
    well = PotentialSpec.square(v0)
    counts = winding_counts(well, params)
    for parity in ("even", "odd"):
        levels = quantized_levels(well, params, parity, L=200.0, count=20)
        verdict = audit_level_shift(free_levels(params, parity, L=200.0, count=20),
                                    levels, counts, parity, well, params)
        print(f"V0={v0} {parity:4s}: n = {[lv.n for lv in levels[:5]]} ...  "
              f"max residual {max(lv.residual for lv in levels):.1e}  {verdict}")
