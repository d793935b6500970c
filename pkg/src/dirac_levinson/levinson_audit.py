"""Threshold phase shifts and the Levinson identities they satisfy.

Strong form, no critical state at the edge::

    D_e(+m) = (mu_plus - 1/2) pi        D_o(+m) = nu_plus pi
    D_e(-m) = -mu_minus pi              D_o(-m) = -(nu_minus + 1/2) pi

With a critical state sitting at the edge::

    D_e(+m) = mu_plus pi                D_o(+m) = (nu_plus + 1/2) pi
    D_e(-m) = -(mu_minus + 1/2) pi      D_o(-m) = -(nu_minus + 1) pi

The weak form only constrains ``D(+m) + D(-m)`` through the bound-state count.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .defaults import DEFAULTS, WEAK_SIGN
from .dirac_core import (
    EDGES,
    PARITIES,
    InconclusiveClassificationError,
    bound_states,
    classify_edge_state,
    default_energy_grid,
    phase_curve,
    phase_shifts,
    winding_phase_shift,
)
from .model import integral, spec_to_dict
from .serialize import config_hash
from .spectral_flow import count_crossings, sweep_coupling, winding_counts

PI = math.pi


class NoConvergenceError(ValueError):
    """The threshold extrapolant is not near any admissible lattice value."""


# which lattice the threshold value lives on: "half" = odd multiples of pi/2,
# "integer" = multiples of pi
LATTICE = {
    ("even", "+m", "non-critical"): "half",
    ("odd", "+m", "non-critical"): "integer",
    ("even", "-m", "non-critical"): "integer",
    ("odd", "-m", "non-critical"): "half",
    ("even", "+m", "critical"): "integer",
    ("odd", "+m", "critical"): "half",
    ("even", "-m", "critical"): "half",
    ("odd", "-m", "critical"): "integer",
}


@dataclass
class ThresholdValue:
    raw: float
    snapped: float
    distance: float
    lattice: str | None


@dataclass
class IdentityVerdict:
    parity: str
    edge: str
    delta: float
    regime: str
    predicted: float | None
    residual: float | None
    passed: bool | None

    def to_dict(self):
        return {"parity": self.parity, "edge": self.edge, "delta": self.delta,
                "regime": self.regime, "predicted": self.predicted,
                "residual": self.residual, "pass": self.passed}


@dataclass
class WeakResult:
    parity: str
    residual: float
    simplified_residual: float
    simplified_applicable: bool
    sign: int


@dataclass
class HighEnergyResult:
    energies: list
    residuals: list
    passed: bool


@dataclass
class MonotonicityVerdict:
    E: float
    parity: str
    lam_pair: tuple
    difference: float
    passed: bool


def _snap(value, lattice):
    if lattice == "half":
        return (round(value / PI - 0.5) + 0.5) * PI
    if lattice == "integer":
        return round(value / PI) * PI
    return round(2 * value / PI) * PI / 2


def extrapolate_threshold(curve, lattice=None, xi_min=DEFAULTS["xi_min"],
                          xi_max=DEFAULTS["xi_max"], n=DEFAULTS["n_threshold_samples"],
                          order=DEFAULTS["extrapolation_order"], snap=DEFAULTS["lattice_snap"]):
    """Limit of the unwrapped phase as ``xi -> 0`` by polynomial extrapolation.

    Uses ``n`` log-spaced samples of ``curve`` in ``[xi_min, xi_max]`` and a
    degree-``order`` fit in ``xi``. The raw limit is snapped to the nearest
    lattice point (odd multiples of pi/2, multiples of pi, or either when
    ``lattice`` is None).
    """
    xi, d = curve.xi, curve.delta
    sel = np.flatnonzero((xi >= xi_min * (1 - 1e-9)) & (xi <= xi_max * (1 + 1e-9)))
    if sel.size < n:
        raise ValueError(f"need {n} samples with xi in [{xi_min}, {xi_max}], have {sel.size}")
    targets = np.geomspace(xi_min, xi_max, n)
    pick = sorted({int(sel[np.argmin(np.abs(np.log(xi[sel]) - np.log(t)))]) for t in targets})
    if len(pick) < n:
        pick = list(sel[np.linspace(0, sel.size - 1, n).astype(int)])
    coef = np.polyfit(xi[pick], d[pick], order)
    raw = float(coef[-1])
    snapped = _snap(raw, lattice)
    dist = abs(raw - snapped)
    if dist > snap:
        raise NoConvergenceError(f"threshold limit {raw:.6f} is {dist:.3g} from the lattice")
    return ThresholdValue(raw, snapped, dist, lattice)


def threshold_curve(spec, params, parity, edge, e_max=DEFAULTS["e_max"]):
    """Continuous phase curve from ``xi = 1e-4`` up to ``|E| = e_max``."""
    branch = "positive" if edge == "+m" else "negative"
    grid = default_energy_grid(params, e_max=e_max, xi_min=DEFAULTS["xi_min"])
    return phase_curve(spec, params, parity, branch, grid, refine=True)


def predicted_threshold(parity, edge, regime, counts):
    """Threshold phase predicted by the strong theorem."""
    mu_p, nu_p, mu_m, nu_m = counts.mu_plus, counts.nu_plus, counts.mu_minus, counts.nu_minus
    crit = regime == "critical"
    if (parity, edge) == ("even", "+m"):
        return (mu_p if crit else mu_p - 0.5) * PI
    if (parity, edge) == ("odd", "+m"):
        return (nu_p + 0.5 if crit else nu_p) * PI
    if (parity, edge) == ("even", "-m"):
        return -(mu_m + 0.5 if crit else mu_m) * PI
    return -(nu_m + 1 if crit else nu_m + 0.5) * PI


def audit_strong(deltas, counts, regimes, tol=DEFAULTS["identity_tol"]):
    """Check the four strong identities.

    ``deltas`` and ``regimes`` are keyed by ``(parity, edge)``. An
    ``"inconclusive"`` regime yields a verdict with ``passed = None``.
    """
    out = []
    for parity in PARITIES:
        for edge in EDGES:
            key = (parity, edge)
            if key not in deltas:
                continue
            delta, regime = float(deltas[key]), regimes.get(key, "inconclusive")
            if regime not in ("critical", "non-critical"):
                out.append(IdentityVerdict(parity, edge, delta, "inconclusive", None, None, None))
                continue
            pred = predicted_threshold(parity, edge, regime, counts)
            res = abs(delta - pred)
            out.append(IdentityVerdict(parity, edge, delta, regime, pred, res, res <= tol))
    return out


def audit_sin2(d_plus, d_minus, tol=DEFAULTS["sin2_tol"]):
    """``sin^2 D(+m) - sin^2 D(-m)`` and whether it is +-1 within ``tol``."""
    v = math.sin(d_plus) ** 2 - math.sin(d_minus) ** 2
    return v, abs(abs(v) - 1.0) <= tol


def audit_weak(d_plus, d_minus, parity, n, sign=None, regimes=None):
    """Residuals of the weak theorem, general and non-critical forms.

    The simplified form ``D(+m) + D(-m) + pi/2 = n pi`` assumes both edges
    are non-critical; ``simplified_applicable`` records whether that holds
    (from ``regimes`` when given, otherwise from the sin^2 relation).
    """
    s = WEAK_SIGN[parity] if sign is None else sign
    v = math.sin(d_plus) ** 2 - math.sin(d_minus) ** 2
    full = abs(d_plus + d_minus + s * PI / 2 * v - n * PI)
    simple = abs(d_plus + d_minus + PI / 2 - n * PI)
    if regimes is not None:
        applicable = all(r == "non-critical" for r in regimes)
    else:
        applicable = abs(abs(v) - 1) <= 1e-3
    return WeakResult(parity, full, simple, applicable, s)


def calibrate_weak_sign(cases=((0.5, 1.0), (4.0, 1.0), (2.6, 1.0), (4.8, 0.5))):
    """Fix the sin^2-term sign per parity from square-well oracle thresholds.

    For each ``(V0, a)`` the oracle phase shifts are evaluated just above each
    threshold and snapped; bound-state counts come from the oracle too. The
    sign that zeroes the residual in every case is returned.
    """
    from .squarewell_oracle import OracleInputs, oracle_bound_energies, oracle_phase_shift

    votes = {}
    for parity in PARITIES:
        good = {+1: True, -1: True}
        for v0, a in cases:
            inp = OracleInputs(v0, a=a)
            E = math.sqrt(1 + (1e-7 / a) ** 2)
            dp = round(2 * oracle_phase_shift(inp, E, parity)[1] / PI) * PI / 2
            dm = round(2 * oracle_phase_shift(inp, -E, parity)[1] / PI) * PI / 2
            n = sum(p == parity for _, p in oracle_bound_energies(inp, n_scan=800))
            for s in (+1, -1):
                if audit_weak(dp, dm, parity, n, sign=s).residual > 1e-9:
                    good[s] = False
        ok = [s for s, g in good.items() if g]
        if len(ok) != 1:
            raise RuntimeError(f"sign for {parity} parity not determined: {ok}")
        votes[parity] = ok[0]
    return votes


def curve_value_at(curve, spec, params, E):
    """Phase at ``E`` on the branch of ``curve`` (fresh solve, branch snapped)."""
    E = np.atleast_1d(np.asarray(E, float))
    mags = np.abs(curve.E)
    ref = np.interp(np.abs(E), mags, curve.delta)
    mod = np.array([s.delta_mod_pi for s in phase_shifts(spec, params, E, curve.parity)])
    return mod + PI * np.round((ref - mod) / PI)


def audit_high_energy(curves, spec, params, energies=(50.0, 100.0)):
    """Residuals ``|D(E) - D(inf)|`` at the top of the positive branch.

    With both parities the summed phase is compared with ``-int V dx``; a
    single parity is compared with half of it. Passing needs each residual
    to fall at least like ``1/E`` (doubling E at least halves it) and to stay
    below ``0.5 m / E``.
    """
    iv = integral(spec, params)
    total = sum(curve_value_at(c, spec, params, np.array(energies) * params.m) for c in curves)
    target = -iv if len(curves) == 2 else -0.5 * iv
    res = [float(r) for r in np.abs(total - target)]
    ok = all(r2 <= r1 * e1 / e2 for r1, r2, e1, e2 in zip(res, res[1:], energies, energies[1:]))
    ok = ok and all(r <= 0.5 / e for r, e in zip(res, energies))
    return HighEnergyResult(list(energies), res, bool(ok))


def audit_monotonicity(spec, params, E, parity, lam_pair, slack=DEFAULTS["monotonic_slack"]):
    """Sign of the finite-difference ``d D / d lambda`` at fixed energy.

    It must be non-negative for ``E > 0`` and non-positive for ``E < 0``.
    """
    l1, l2 = map(float, lam_pair)
    if l1 == l2:
        return MonotonicityVerdict(float(E), parity, (l1, l2), 0.0, True)
    d1 = winding_phase_shift(spec.with_lambda(l1), params, E, parity)[0]
    d2 = winding_phase_shift(spec.with_lambda(l2), params, E, parity)[0]
    diff = (d2 - d1) * np.sign(l2 - l1)
    ok = diff >= -slack if E > 0 else diff <= slack
    return MonotonicityVerdict(float(E), parity, (l1, l2), float(diff), bool(ok))


# ---------------------------------------------------------------------------
# full report

@dataclass
class LevinsonReport:
    potential: dict
    counts: dict
    winding_counts: dict
    thresholds: dict
    identities: list
    weak: list
    sin2: dict
    high_energy: dict
    branch_check: dict
    weak_sign: dict
    extra: dict = field(default_factory=dict)

    @property
    def passed(self):
        ok = all(v.passed is not False for v in self.identities)
        ok = ok and all(w.residual <= DEFAULTS["identity_tol"] for w in self.weak)
        ok = ok and all(
            w.simplified_residual <= DEFAULTS["identity_tol"] for w in self.weak
            if w.simplified_applicable)
        ok = ok and all(v["pass"] for v in self.sin2.values() if v["applicable"])
        ok = ok and self.high_energy["pass"]
        ok = ok and self.counts == self.winding_counts
        return bool(ok)

    def to_dict(self):
        return {
            "potential": self.potential,
            "counts": self.counts,
            "winding_counts": self.winding_counts,
            "thresholds": self.thresholds,
            "identities": [v.to_dict() for v in self.identities],
            "weak": [asdict(w) for w in self.weak],
            "sin2": self.sin2,
            "high_energy": self.high_energy,
            "branch_check": self.branch_check,
            "weak_sign": self.weak_sign,
            "pass": self.passed,
            **self.extra,
        }


def audit_well(spec, params, lam_steps=DEFAULTS["lam_steps"], e_max=DEFAULTS["e_max"],
               n_grid=DEFAULTS["n_grid"]):
    """Run every audit for one well and collect a :class:`LevinsonReport`."""
    trace = sweep_coupling(spec, params, lam_steps=lam_steps, n_grid=n_grid)
    final = bound_states(spec, params, n_grid=n_grid, nodes=False)
    counts = count_crossings(trace, final)
    wcounts = winding_counts(spec, params)

    curves, deltas, regimes, thresholds, branch = {}, {}, {}, {}, {}
    for parity in PARITIES:
        for edge in EDGES:
            key = (parity, edge)
            curve = threshold_curve(spec, params, parity, edge, e_max)
            curves[key] = curve
            try:
                regime = classify_edge_state(spec, params, parity, edge)
            except InconclusiveClassificationError:
                regime = "inconclusive"
            regimes[key] = regime
            lattice = LATTICE.get((parity, edge, regime))
            tv = extrapolate_threshold(curve, lattice)
            deltas[key] = tv.raw
            thresholds[f"{parity} {edge}"] = {"raw": tv.raw, "snapped": tv.snapped,
                                              "regime": regime}
            # the E-continued branch must agree with the coupling-continued one
            w = winding_phase_shift(spec, params, curve.E[0], parity)[0]
            branch[f"{parity} {edge}"] = abs(float(w) - float(curve.delta[0]))

    identities = audit_strong(deltas, counts, regimes)
    weak, sin2 = [], {}
    for parity in PARITIES:
        dp, dm = deltas[(parity, "+m")], deltas[(parity, "-m")]
        n = counts.n_e if parity == "even" else counts.n_o
        regs = (regimes[(parity, "+m")], regimes[(parity, "-m")])
        weak.append(audit_weak(dp, dm, parity, n, regimes=regs))
        v, ok = audit_sin2(dp, dm)
        sin2[parity] = {"value": v, "pass": ok,
                        "applicable": all(r == "non-critical" for r in regs)}
    he = audit_high_energy([curves[("even", "+m")], curves[("odd", "+m")]], spec, params)
    return LevinsonReport(
        potential=spec_to_dict(spec),
        counts=asdict(counts),
        winding_counts=asdict(wcounts),
        thresholds=thresholds,
        identities=identities,
        weak=weak,
        sin2=sin2,
        high_energy={"energies": he.energies, "residuals": he.residuals, "pass": he.passed},
        branch_check=branch,
        weak_sign=dict(WEAK_SIGN),
        extra={"version": __version__,
               "config_hash": config_hash(
                   {"potential": spec_to_dict(spec), "m": params.m, "a": params.a,
                    "lam_steps": lam_steps, "e_max": e_max, "n_grid": n_grid})},
    )
