"""Numerical defaults shared by the library and the command line.

=====================  ==========  ==============================================
name                   value       meaning
=====================  ==========  ==============================================
m                      1.0         mass (energy unit)
a                      1.0         length unit used in xi = k a
e_max                  100.0       top of the phase-curve grid, in units of m
xi_min, xi_max         1e-4, 1e-2  window used for threshold fits/extrapolation
n_threshold_samples    8           samples in that window
extrapolation_order    3           polynomial order in xi
lattice_snap           0.05        max distance from a lattice point
identity_tol           1e-3        tolerance on every Levinson identity
sin2_tol               1e-6        tolerance on the sin^2 relation
slope_tol              0.05        max distance of a fitted slope from odd int
lam_steps              200         coupling grid for the sweep
n_grid                 2000        bound-state scan points
box_L                  200.0       box half-length, in units of a
box_count              20          box levels per parity/branch
monotonic_slack        1e-8        slack on the sign of d Delta / d lambda
weak_sign              e:+1 o:-1   sign in the sin^2 term of the weak theorem
=====================  ==========  ==============================================
"""

DEFAULTS = {
    "m": 1.0,
    "a": 1.0,
    "e_max": 100.0,
    "xi_min": 1e-4,
    "xi_max": 1e-2,
    "n_threshold_samples": 8,
    "extrapolation_order": 3,
    "lattice_snap": 0.05,
    "identity_tol": 1e-3,
    "sin2_tol": 1e-6,
    "slope_tol": 0.05,
    "lam_steps": 200,
    "n_grid": 2000,
    "box_L": 200.0,
    "box_count": 20,
    "monotonic_slack": 1e-8,
}

# Weak theorem: D(+m) + D(-m) + s (pi/2) [sin^2 D(+m) - sin^2 D(-m)] = n pi.
# The sign s per parity was fixed by running calibrate_weak_sign() against the
# square-well oracle.
WEAK_SIGN = {"even": +1, "odd": -1}
