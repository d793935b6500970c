"""Spinor integration, phase shifts, bound states and threshold fits.

The Dirac system in one dimension with an electrostatic well ``V(x)`` is

    f' = -(E - V + m) g
    g' =  (E - V - m) f

Parity lets us integrate on ``[0, a]`` only: even states start from
``(f, g) = (1, 0)`` and odd states from ``(0, 1)``. Outside the well the
solutions are the free forms, so everything is decided by ``(f, g)`` at
``x = a``.

Two phase-shift routes are provided. :func:`phase_shift` returns the value
modulo pi from the matching condition; :func:`phase_curve` promotes a grid of
such values to a continuous branch anchored at high energy. Independently,
:func:`winding_phase_shift` follows the rotation of the spinor from the origin
outward, which is the branch obtained by switching the coupling on from zero.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .model import integral, require_valid

PARITIES = ("even", "odd")
EDGES = ("+m", "-m")
BRANCHES = ("positive", "negative")

RTOL = 1e-12
ATOL = 1e-14
WINDING_RTOL = 1e-10

# sign of the log-log slope of tan(Delta) near threshold when no critical
# state sits at the edge
NONCRITICAL_SLOPE_SIGN = {
    ("+m", "even"): -1,
    ("+m", "odd"): +1,
    ("-m", "even"): +1,
    ("-m", "odd"): -1,
}


class IntegrationError(RuntimeError):
    pass


class DomainError(ValueError):
    pass


class GridTooCoarseError(ValueError):
    pass


class DegenerateFitError(ValueError):
    pass


class InconclusiveClassificationError(RuntimeError):
    pass


def _check_parity(parity):
    if parity not in PARITIES:
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")


def _edge_energy(params, edge):
    if edge not in EDGES:
        raise ValueError(f"edge must be '+m' or '-m', got {edge!r}")
    return params.m if edge == "+m" else -params.m


def _branch_sign(branch):
    if branch not in BRANCHES:
        raise ValueError(f"branch must be 'positive' or 'negative', got {branch!r}")
    return 1.0 if branch == "positive" else -1.0


@dataclass(frozen=True)
class SpinorBoundary:
    f_a: float
    g_a: float
    E: float
    parity: str
    lam: float


@dataclass
class PhaseShiftSample:
    E: float
    k: float
    xi: float
    parity: str
    delta_mod_pi: float
    delta_unwrapped: float | None = None


@dataclass
class PhaseCurve:
    parity: str
    branch: str
    samples: list
    anchor: float = 0.0

    @property
    def E(self):
        return np.array([s.E for s in self.samples])

    @property
    def xi(self):
        return np.array([s.xi for s in self.samples])

    @property
    def delta(self):
        return np.array([s.delta_unwrapped for s in self.samples])


@dataclass(frozen=True)
class BoundState:
    E_b: float
    kappa: float
    parity: str
    nodes: int
    index: int
    lam: float
    residual: float = 0.0


@dataclass
class ThresholdFit:
    edge: str
    parity: str
    exponent: float
    nearest_odd_integer: int
    regime: str
    fit_residual: float
    accepted: bool
    xi: np.ndarray = field(repr=False, default=None)
    tan_delta: np.ndarray = field(repr=False, default=None)


# ---------------------------------------------------------------------------
# integration

def _cs(eps, m, w):
    """cos-like and sin-like propagators for a constant potential layer.

    With q^2 = eps^2 - m^2 the layer transfer matrix is
    [[C, -(eps+m) S], [(eps-m) S, C]], C = cos(qw), S = sin(qw)/q, and the
    hyperbolic forms when q^2 < 0.
    """
    q2 = eps * eps - m * m
    w = np.broadcast_to(w, q2.shape)
    z = q2 * w * w
    C = np.empty_like(q2)
    S = np.empty_like(q2)
    osc = z > 1e-8
    eva = z < -1e-8
    mid = ~(osc | eva)
    q = np.sqrt(q2[osc])
    C[osc] = np.cos(q * w[osc])
    S[osc] = np.sin(q * w[osc]) / q
    p = np.sqrt(-q2[eva])
    C[eva] = np.cosh(p * w[eva])
    S[eva] = np.sinh(p * w[eva]) / p
    zm = z[mid]
    C[mid] = 1 - zm / 2 + zm * zm / 24
    S[mid] = w[mid] * (1 - zm / 6 + zm * zm / 120)
    return C, S


def _initial(parity, n):
    _check_parity(parity)
    if parity == "even":
        return np.ones(n), np.zeros(n)
    return np.zeros(n), np.ones(n)


def _propagate_exact(spec, m, E, f, g, x_stop=None):
    for x0, x1, d in spec.layers():
        if x_stop is not None and x0 >= x_stop:
            break
        w = x1 - x0 if x_stop is None else min(x1, x_stop) - x0
        eps = E + spec.lam * d
        C, S = _cs(eps, m, w)
        f, g = C * f - (eps + m) * S * g, (eps - m) * S * f + C * g
    return f, g


def _rhs_factory(spec, m, E):
    def rhs(x, y):
        n = E.size
        V = -spec.lam * float(spec.depth(x))
        f, g = y[:n], y[n:]
        return np.concatenate((-(E - V + m) * g, (E - V - m) * f))
    return rhs


def _propagate_ode(spec, m, E, f, g, x_stop=None, dense=False):
    """Adaptive DOP853 integration, restarted at every breakpoint of V."""
    pts = spec.breakpoints()
    stop = spec.a if x_stop is None else x_stop
    rhs = _rhs_factory(spec, m, E)
    y = np.concatenate((f, g))
    sols = []
    for x0, x1 in zip(pts[:-1], pts[1:]):
        if x0 >= stop:
            break
        x1 = min(x1, stop)
        if x1 <= x0:
            continue
        sol = solve_ivp(rhs, (x0, x1), y, method="DOP853", rtol=RTOL, atol=ATOL,
                        dense_output=dense)
        if not sol.success or not np.all(np.isfinite(sol.y[:, -1])):
            raise IntegrationError(f"integration failed near x={sol.t[-1]:.6g}: {sol.message}")
        y = sol.y[:, -1]
        sols.append(sol)
    n = E.size
    if dense:
        return y[:n], y[n:], sols
    return y[:n], y[n:]


def _method(spec, method):
    if method == "auto":
        return "exact" if spec.is_piecewise_constant() else "ode"
    if method not in ("exact", "ode"):
        raise ValueError(f"unknown method {method!r}")
    if method == "exact" and not spec.is_piecewise_constant():
        raise ValueError("exact propagation needs a piecewise-constant family")
    return method


def boundary_values(spec, params, E, parity, method="auto"):
    """``(f(a), g(a))`` for an array of energies."""
    E = np.atleast_1d(np.asarray(E, float))
    f, g = _initial(parity, E.size)
    if _method(spec, method) == "exact":
        return _propagate_exact(spec, params.m, E, f, g)
    return _propagate_ode(spec, params.m, E, f, g)


def integrate_parity(spec, params, E, parity, method="auto"):
    """Solve from the origin to the well edge and return the boundary spinor."""
    require_valid(spec)
    f, g = boundary_values(spec, params, E, parity, method)
    if not (np.isfinite(f[0]) and np.isfinite(g[0])):
        raise IntegrationError(f"non-finite spinor at x={spec.a}")
    return SpinorBoundary(float(f[0]), float(g[0]), float(E), parity, spec.lam)


def spinor_profile(spec, params, E, parity, x, method="auto"):
    """``f, g`` sampled at positions ``0 <= x <= a`` for one energy."""
    x = np.asarray(x, float)
    E1 = np.array([float(E)])
    if _method(spec, method) == "exact":
        f, g = _initial(parity, x.size)
        for x0, x1, d in spec.layers():
            w = np.clip(x - x0, 0.0, x1 - x0)
            eps = np.full(x.size, float(E) + spec.lam * d)
            C, S = _cs(eps, params.m, w)
            f, g = C * f - (eps + params.m) * S * g, (eps - params.m) * S * f + C * g
        return f, g
    f, g = _initial(parity, 1)
    _, _, sols = _propagate_ode(spec, params.m, E1, f, g, dense=True)
    fs, gs = np.empty_like(x), np.empty_like(x)
    for i, xi in enumerate(x):
        for sol in sols:
            if sol.t[0] <= xi <= sol.t[-1]:
                y = sol.sol(xi)
                fs[i], gs[i] = y[0], y[1]
                break
        else:
            fs[i], gs[i] = (1.0, 0.0) if parity == "even" else (0.0, 1.0)
    return fs, gs


def prufer_angle(spec, params, E, parity):
    """Continuous angle of ``(f, g)`` at ``x = a`` counted from the origin.

    ``theta = atan2(g, f)`` obeys ``theta' = E - V - m cos(2 theta)``, a
    bounded scalar equation, so its winding is unambiguous. It increases
    with both ``E`` and ``lam``.
    """
    E = np.atleast_1d(np.asarray(E, float))
    m = params.m
    th = np.full(E.size, 0.0 if parity == "even" else math.pi / 2)
    _check_parity(parity)

    def rhs(x, t):
        V = -spec.lam * float(spec.depth(x))
        return E - V - m * np.cos(2 * t)

    pts = spec.breakpoints()
    for x0, x1 in zip(pts[:-1], pts[1:]):
        sol = solve_ivp(rhs, (x0, x1), th, method="DOP853", rtol=WINDING_RTOL, atol=1e-12)
        if not sol.success:
            raise IntegrationError(f"angle integration failed near x={sol.t[-1]:.6g}")
        th = sol.y[:, -1]
    return th


# ---------------------------------------------------------------------------
# phase shifts

def _kinematics(params, E):
    E = np.asarray(E, float)
    k = np.sqrt(np.maximum(E * E - params.m ** 2, 0.0))
    return k


def _matching_angle(params, E, f, g, parity):
    """Angle ``k a_match + Delta`` read off the exterior free form (mod 2 pi)."""
    k = _kinematics(params, E)
    s = (E + params.m) / k
    if parity == "even":
        return np.arctan2(s * g, f)
    return np.arctan2(-f, s * g)


def _mod_pi(x):
    return np.mod(x, np.pi)


def phase_shift(spec, params, E, parity, method="auto"):
    """Scattering phase shift modulo pi at one energy ``|E| > m``."""
    E = float(E)
    if abs(E) <= params.m:
        raise DomainError(f"not a scattering energy: |E|={abs(E)} <= m={params.m}")
    return phase_shifts(spec, params, np.array([E]), parity, method)[0]


def phase_shifts(spec, params, E, parity, method="auto"):
    """Vectorised :func:`phase_shift` returning a list of samples."""
    require_valid(spec)
    E = np.asarray(E, float)
    if np.any(np.abs(E) <= params.m):
        raise DomainError("not a scattering energy: every |E| must exceed m")
    f, g = boundary_values(spec, params, E, parity, method)
    k = _kinematics(params, E)
    ang = _matching_angle(params, E, f, g, parity)
    delta = _mod_pi(ang - k * spec.a)
    return [PhaseShiftSample(float(e), float(kk), float(kk * params.a), parity, float(d))
            for e, kk, d in zip(E, k, delta)]


def winding_phase_shift(spec, params, E, parity, method="auto"):
    """Phase shift on the branch continuous in the coupling from ``lam = 0``.

    The exterior-scaled spinor ``(f, s g)`` with ``s = (E + m)/k`` stays in the
    same quadrant as ``(f, g)`` when ``s > 0`` and in the mirrored one when
    ``s < 0``, so the continuous Pruefer angle fixes the integer part of the
    matching angle. At ``lam = 0`` the result is identically zero.
    """
    E = np.atleast_1d(np.asarray(E, float))
    if np.any(np.abs(E) <= params.m):
        raise DomainError("not a scattering energy: every |E| must exceed m")
    f, g = boundary_values(spec, params, E, parity, method)
    theta = prufer_angle(spec, params, E, parity)
    k = _kinematics(params, E)
    s = (E + params.m) / k
    sigma = np.sign(s)
    psi = np.arctan2(s * g, f)
    ref = sigma * theta
    psi = psi + 2 * np.pi * np.round((ref - psi) / (2 * np.pi))
    theta0 = 0.0 if parity == "even" else np.pi / 2
    return psi - sigma * theta0 - k * spec.a


def high_energy_anchor(spec, params, branch):
    """Per-parity asymptote of the phase shift as ``|E| -> infinity``.

    Each parity carries half of the full-line value ``-int V dx``; on the
    negative-energy branch the sign is reversed.
    """
    return -0.5 * _branch_sign(branch) * integral(spec, params)


def default_energy_grid(params, e_max=100.0, xi_min=1e-4, n_threshold=48, n_bulk=400):
    """Increasing ``|E|`` values: geometric in ``xi`` near threshold, then linear."""
    m, a = params.m, params.a
    xi = np.geomspace(xi_min, 1.0, n_threshold)
    near = np.sqrt(m * m + (xi / a) ** 2)
    bulk = np.linspace(near[-1], e_max * m, n_bulk)[1:]
    return np.concatenate((near, bulk))


def phase_curve(spec, params, parity, branch, energy_grid, method="auto",
                max_jump=np.pi / 4, refine=False, max_depth=12):
    """Unwrap mod-pi phase shifts on a grid into a continuous curve.

    ``energy_grid`` holds increasing ``|E|`` values. The branch is fixed at
    the largest ``|E|`` by the high-energy asymptote and continued toward
    threshold by nearest-branch steps. Steps larger than ``max_jump`` are
    ambiguous: with ``refine=True`` midpoints are inserted, otherwise a
    :class:`GridTooCoarseError` names the offending interval.
    """
    sign = _branch_sign(branch)
    mags = np.asarray(energy_grid, float)
    if mags.size == 0 or np.any(np.diff(mags) <= 0):
        raise ValueError("energy_grid must be a non-empty increasing list of |E|")
    samples = phase_shifts(spec, params, sign * mags, parity, method)
    for _ in range(max_depth + 1):
        d = np.array([s.delta_mod_pi for s in samples])
        step = np.angle(np.exp(2j * (d[1:] - d[:-1]))) / 2
        bad = np.flatnonzero(np.abs(step) >= max_jump)
        if bad.size == 0:
            break
        if not refine:
            i = bad[0]
            raise GridTooCoarseError(
                f"phase jump {step[i]:.3g} between |E|={abs(samples[i].E):.10g} "
                f"and |E|={abs(samples[i + 1].E):.10g}")
        mids = np.array([(abs(samples[i].E) + abs(samples[i + 1].E)) / 2 for i in bad])
        new = phase_shifts(spec, params, sign * mids, parity, method)
        samples = sorted(samples + new, key=lambda s: abs(s.E))
    else:
        raise GridTooCoarseError("phase curve still ambiguous after refinement")

    anchor = high_energy_anchor(spec, params, branch)
    d = np.array([s.delta_mod_pi for s in samples])
    out = np.empty_like(d)
    out[-1] = d[-1] + np.pi * np.round((anchor - d[-1]) / np.pi)
    for i in range(d.size - 2, -1, -1):
        out[i] = d[i] + np.pi * np.round((out[i + 1] - d[i]) / np.pi)
    samples = [replace(s, delta_unwrapped=float(v)) for s, v in zip(samples, out)]
    return PhaseCurve(parity, branch, samples, anchor)


# ---------------------------------------------------------------------------
# bound states

def matching_residual(spec, params, E, parity, method="auto"):
    """``(E + m) g(a) - kappa f(a)``; vanishes at bound-state energies."""
    E = np.atleast_1d(np.asarray(E, float))
    f, g = boundary_values(spec, params, E, parity, method)
    kappa = np.sqrt(np.maximum(params.m ** 2 - E * E, 0.0))
    return (E + params.m) * g - kappa * f


def _gap_residual(spec, params, E, parity, method="auto"):
    # sqrt(m+E) g - sqrt(m-E) f: the product form divided by sqrt(m+E),
    # finite and non-degenerate at both edges
    m = params.m
    E = np.atleast_1d(np.asarray(E, float))
    f, g = boundary_values(spec, params, E, parity, method)
    r = np.hypot(f, g)
    return (np.sqrt(np.maximum(m + E, 0.0)) * g - np.sqrt(np.maximum(m - E, 0.0)) * f) / r


def edge_residual(spec, params, parity, edge, method="auto"):
    """Normalised gap residual at ``E = +m`` (``g(a)``) or ``E = -m`` (``-f(a)``).

    A zero means a critical (half-bound) state sits at the edge.
    """
    E = _edge_energy(params, edge)
    return float(_gap_residual(spec, params, E, parity, method)[0]) / math.sqrt(2 * params.m)


def edge_windings(spec, params, parity):
    """``(lower, upper)`` = ``(theta(a; -m) - pi/2, theta(a; +m))``.

    Bound-state labels are the integers ``j`` with ``lower < j pi < upper``.
    """
    th = prufer_angle(spec, params, [-params.m, params.m], parity)
    return float(th[0] - np.pi / 2), float(th[1])


def _labels(lower, upper):
    lo = math.floor(lower / math.pi) + 1
    hi = math.ceil(upper / math.pi) - 1
    return list(range(lo, hi + 1))


def count_bound(spec, params, parity):
    """Number of bound states of one parity, from the edge windings alone."""
    return len(_labels(*edge_windings(spec, params, parity)))


def _scan_grid(m, n_grid):
    eps = 1e-9 * m
    uni = np.linspace(-m + eps, m - eps, n_grid)
    near = m - np.geomspace(1e-3 * m, 1e-15 * m, 40)
    return np.unique(np.concatenate((-near, uni, near)))


def _count_nodes(spec, params, E, parity, method, n=400):
    x = np.linspace(0, spec.a, n + 1)[1:-1]
    f, _ = spinor_profile(spec, params, E, parity, x, method)
    s = np.sign(f)
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def _roots_on_grid(fun, grid, xtol):
    vals = fun(grid)
    roots = []
    for i in np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0):
        lo, hi = grid[i], grid[i + 1]
        roots.append(brentq(lambda e: fun(np.array([e]))[0], lo, hi, xtol=xtol, rtol=1e-15))
    for i in np.flatnonzero(vals == 0):
        roots.append(grid[i])
    return sorted(roots)


def bound_states(spec, params, lam=None, n_grid=2000, method="auto", nodes=True,
                 xtol=1e-13):
    """All bound states of both parities, ordered by descending energy.

    Roots of the matching residual are bracketed by a sign-change scan and
    polished with Brent's method. The scan is refined up to three times
    (x10 each) if it finds fewer roots than the edge windings predict.
    """
    if lam is not None:
        spec = spec.with_lambda(lam)
    require_valid(spec)
    m = params.m
    out = []
    if spec.lam == 0.0 or integral(spec, params) == 0.0:
        return out
    for parity in PARITIES:
        labels = _labels(*edge_windings(spec, params, parity))
        def fun(e, parity=parity):
            return _gap_residual(spec, params, e, parity, method)
        n = n_grid
        for _ in range(4):
            roots = _roots_on_grid(fun, _scan_grid(m, n), xtol)
            if len(roots) >= len(labels):
                break
            n *= 10
        if len(roots) != len(labels):
            warnings.warn(f"{parity}: found {len(roots)} roots, windings predict {len(labels)}")
            top = labels[-1] if labels else math.ceil(edge_windings(spec, params, parity)[1] / math.pi) - 1
            labels = list(range(top - len(roots) + 1, top + 1))
        for E_b, j in zip(roots, labels):
            kappa = math.sqrt(max(m * m - E_b * E_b, 0.0))
            res = float(matching_residual(spec, params, E_b, parity, method)[0])
            nd = _count_nodes(spec, params, E_b, parity, method) if nodes else -1
            out.append(BoundState(float(E_b), kappa, parity, nd, j, spec.lam, res))
    out.sort(key=lambda b: -b.E_b)
    return out


# ---------------------------------------------------------------------------
# threshold behaviour

def _threshold_energies(params, edge, xi):
    k = np.asarray(xi, float) / params.a
    E = np.sqrt(params.m ** 2 + k * k)
    return E if edge == "+m" else -E


def threshold_fit(spec, params, parity, edge, xi_min=1e-4, xi_max=1e-2, n=9,
                  method="auto", tol=0.05):
    """Fit the power law ``tan Delta ~ xi^p`` at one threshold.

    The sign of ``p`` relative to :data:`NONCRITICAL_SLOPE_SIGN` decides
    whether a critical state sits at the edge.
    """
    _check_parity(parity)
    _edge_energy(params, edge)
    xi = np.geomspace(xi_max, xi_min, n)
    E = _threshold_energies(params, edge, xi)
    f, g = boundary_values(spec, params, E, parity, method)
    k = _kinematics(params, E)
    delta = _mod_pi(_matching_angle(params, E, f, g, parity) - k * spec.a)
    t = np.tan(delta)
    if np.max(np.abs(t)) < 1e-10 or np.min(np.abs(t)) == 0 or not np.all(np.isfinite(t)):
        raise DegenerateFitError("tan(Delta) vanishes at threshold; no power law to fit")
    lx, lt = np.log(xi), np.log(np.abs(t))
    coef, res, *_ = np.polyfit(lx, lt, 1, full=True)
    p = float(coef[0])
    odd = int(2 * round((p - 1) / 2) + 1)
    rms = float(np.sqrt(res[0] / n)) if res.size else 0.0
    regime = "non-critical" if np.sign(p) == NONCRITICAL_SLOPE_SIGN[(edge, parity)] else "critical"
    return ThresholdFit(edge, parity, p, odd, regime, rms, abs(p - odd) <= tol, xi, t)


def classify_edge_state(spec, params, parity, edge, dlam=1e-6, method="auto"):
    """``"critical"`` or ``"non-critical"`` at one edge for one parity.

    The power-law fit is cross-checked by perturbing the coupling by
    ``+-dlam``: a critical state changes sign of the edge residual (it turns
    bound on one side and unbound on the other). Disagreement raises.
    """
    lo = spec.with_lambda(max(spec.lam - dlam, 0.0))
    hi = spec.with_lambda(spec.lam + dlam)
    r_lo = edge_residual(lo, params, parity, edge, method)
    r_hi = edge_residual(hi, params, parity, edge, method)
    perturbed = "critical" if r_lo * r_hi <= 0 else "non-critical"
    try:
        fit = threshold_fit(spec, params, parity, edge, method=method)
    except DegenerateFitError:
        r0 = edge_residual(spec, params, parity, edge, method)
        return "critical" if abs(r0) < 1e-9 else "non-critical"
    if not fit.accepted:
        raise InconclusiveClassificationError(
            f"{parity} at {edge}: slope {fit.exponent:.4f} is not near an odd integer")
    if fit.regime != perturbed:
        raise InconclusiveClassificationError(
            f"{parity} at {edge}: fit says {fit.regime}, perturbation says {perturbed}")
    return fit.regime
