"""A smooth parabolic well given as a sample table.

Tables are interpolated with a monotone cubic and integrated with an
adaptive Runge-Kutta scheme, so this is much slower than the square-well
transfer matrices (roughly half a minute here).
"""

import numpy as np

from dirac_levinson.levinson_audit import audit_well
from dirac_levinson.model import ModelParams, PotentialSpec, integral, validate

x = np.linspace(-1, 1, 81)
well = PotentialSpec.table(x, -3.0 * (1 - x * x))
print(validate(well), "int V dx =", integral(well))

rep = audit_well(well, ModelParams(), lam_steps=40).to_dict()
print("counts:", rep["counts"])
for i in rep["identities"]:
    print(f"  {i['parity']:4s} {i['edge']}  residual {i['residual']:.2e}  pass = {i['pass']}")
