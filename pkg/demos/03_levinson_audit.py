"""Full audit of three square wells.

Threshold phase shifts are extrapolated from xi = ka in [1e-4, 1e-2] and
compared with the strong theorem. The weak theorem and the sin^2 relation
follow from the same four numbers.
"""

import math

from dirac_levinson.model import ModelParams, PotentialSpec
from dirac_levinson.levinson_audit import audit_well

params = ModelParams()
for v0 in (0.5, 2.6, 4.0):
    rep = audit_well(PotentialSpec.square(v0), params).to_dict()
    print(f"\nV0 = {v0}: counts {rep['counts']}  pass = {rep['pass']}")
    for i in rep["identities"]:
        print(f"  {i['parity']:4s} {i['edge']}  D/pi = {i['delta'] / math.pi:+.8f}  "
              f"predicted/pi = {i['predicted'] / math.pi:+.3f}  {i['regime']}")
    for w in rep["weak"]:
        print(f"  weak theorem ({w['parity']}): residual {w['residual']:.2e}")
