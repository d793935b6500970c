"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Tolerances are pinned here rather than read from the defaults table so that
a change to a default cannot silently loosen a criterion. Run directly with
``python3 tests/test_acceptance.py`` for the summary lines alone.
"""

import math
import sys
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dirac_levinson.box_spectrum import audit_level_shift, free_levels, quantized_levels
from dirac_levinson.dirac_core import (
    NONCRITICAL_SLOPE_SIGN,
    bound_states,
    classify_edge_state,
    phase_shifts,
    threshold_fit,
    winding_phase_shift,
)
from dirac_levinson.levinson_audit import audit_monotonicity, audit_well
from dirac_levinson.model import ModelParams, PotentialSpec
from dirac_levinson.spectral_flow import FlowCounts
from dirac_levinson.squarewell_oracle import (
    OracleInputs,
    oracle_bound_energies,
    oracle_critical_couplings,
    oracle_phase_shift,
)

PI = math.pi
P = ModelParams()

# pinned tolerances
FREE_TOL = 1e-10
ORACLE_PHASE_TOL = 1e-8
ORACLE_BOUND_TOL = 1e-10
IDENTITY_TOL = 1e-3
SIN2_TOL = 1e-6
SLOPE_TOL = 0.05
QUANT_TOL = 1e-6
MONO_SLACK = 1e-8

# non-critical wells (V0, a) covering 0..3 bound states of each parity
WEAK_FAMILY = [(0.5, 1.0), (2.6, 1.0), (1.7, 3.0), (4.8, 0.5), (2.4, 3.0)]

RESULTS = []


def report(n, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n:2d}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


@lru_cache(maxsize=None)
def audited(v0, a=1.0, lam=1.0):
    return audit_well(PotentialSpec.square(v0, a=a, lam=lam), P).to_dict()


def mod_pi_dist(x, y):
    d = np.mod(np.asarray(x) - np.asarray(y), PI)
    return np.minimum(d, PI - d)


def identity(rep, parity, edge):
    return next(i for i in rep["identities"] if i["parity"] == parity and i["edge"] == edge)


def test_01_free_null():
    s = PotentialSpec.free()
    E = np.linspace(1.0 + 1e-6, 100.0, 100)
    worst = 0.0
    for parity in ("even", "odd"):
        for sign in (1, -1):
            mod = [p.delta_mod_pi for p in phase_shifts(s, P, sign * E, parity)]
            worst = max(worst, float(np.max(mod_pi_dist(mod, 0.0))),
                        float(np.max(np.abs(winding_phase_shift(s, P, sign * E, parity)))))
    empty = bound_states(s, P) == []
    report(1, worst <= FREE_TOL and empty,
           f"V=0 max |D| = {worst:.2e} over 4 x 100 energies, bound states empty = {empty}")


def test_02_oracle_equivalence():
    worst_phase = worst_bound = 0.0
    counts_ok = True
    E = np.linspace(1.0005, 30.0, 50)
    for v0 in (0.3, 1.5, 3.0):
        s = PotentialSpec.square(v0)
        inp = OracleInputs(v0)
        for parity in ("even", "odd"):
            for sign in (1, -1):
                num = [p.delta_mod_pi for p in phase_shifts(s, P, sign * E, parity)]
                ref = [oracle_phase_shift(inp, e, parity)[0] for e in sign * E]
                worst_phase = max(worst_phase, float(np.max(mod_pi_dist(num, ref))))
        ref = oracle_bound_energies(inp)
        got = bound_states(s, P, nodes=False)
        counts_ok &= [p for _, p in ref] == [b.parity for b in got]
        for b, (e, _) in zip(got, ref):
            worst_bound = max(worst_bound, abs(b.E_b - e))
    ok = worst_phase <= ORACLE_PHASE_TOL and worst_bound <= ORACLE_BOUND_TOL and counts_ok
    report(2, ok, f"phase mod-pi distance {worst_phase:.2e}, bound energies {worst_bound:.2e}, "
                  f"same levels = {counts_ok}")


def test_03_weak_well():
    rep = audited(0.5)
    de, do = identity(rep, "even", "+m"), identity(rep, "odd", "+m")
    one_even = rep["counts"]["n_e"] == 1 and rep["counts"]["n_o"] == 0
    ok = (one_even and de["regime"] == do["regime"] == "non-critical"
          and abs(de["delta"] - PI / 2) <= IDENTITY_TOL and abs(do["delta"]) <= IDENTITY_TOL)
    report(3, ok, f"V0=0.5: De(+m) - pi/2 = {de['delta'] - PI / 2:.2e}, "
                  f"Do(+m) = {do['delta']:.2e}, one even bound state = {one_even}")


def test_04_two_even_states():
    rep = audited(2.6)
    de = identity(rep, "even", "+m")
    two = rep["counts"]["n_e"] == 2
    ok = two and de["regime"] == "non-critical" and abs(de["delta"] - 1.5 * PI) <= IDENTITY_TOL
    report(4, ok, f"V0=2.6: n_e = {rep['counts']['n_e']}, De(+m) - 3pi/2 = {de['delta'] - 1.5 * PI:.2e}")


def test_05_supercritical():
    lam_star = oracle_critical_couplings(4.0, "even", "-m", 1)
    rep = audited(4.0)
    c = rep["counts"]
    dm = identity(rep, "even", "-m")
    ok = (len(lam_star) == 1 and lam_star[0] < 1.0 and abs(dm["delta"] + PI) <= IDENTITY_TOL
          and c["mu_minus"] == 1 and c["n_e"] == c["mu_plus"] - 1)
    report(5, ok, f"V0=4: first -m crossing at lambda*={lam_star[0]:.6f}, "
                  f"De(-m) + pi = {dm['delta'] + PI:.2e}, mu_minus = {c['mu_minus']}, "
                  f"n_e = {c['n_e']}, mu_plus = {c['mu_plus']}")


def test_06_weak_theorem():
    worst, seen = 0.0, {"even": set(), "odd": set()}
    all_noncrit = True
    for v0, a in WEAK_FAMILY:
        rep = audited(v0, a)
        for w in rep["weak"]:
            all_noncrit &= w["simplified_applicable"]
            worst = max(worst, w["simplified_residual"])
            seen[w["parity"]].add(rep["counts"]["n_e" if w["parity"] == "even" else "n_o"])
    spans = seen["even"] == seen["odd"] == {0, 1, 2, 3}
    ok = worst <= IDENTITY_TOL and spans and all_noncrit
    report(6, ok, f"max |D(+m)+D(-m)+pi/2-n pi| = {worst:.2e} over {len(WEAK_FAMILY)} wells, "
                  f"n_e in {sorted(seen['even'])}, n_o in {sorted(seen['odd'])}")


def test_07_sin2():
    worst, checked = 0.0, 0
    for v0, a in WEAK_FAMILY + [(4.0, 1.0)]:
        rep = audited(v0, a)
        for parity, v in rep["sin2"].items():
            if v["applicable"]:
                worst = max(worst, abs(abs(v["value"]) - 1.0))
                checked += 1
    report(7, worst <= SIN2_TOL and checked >= 12,
           f"max ||sin^2 D(+m) - sin^2 D(-m)| - 1| = {worst:.2e} over {checked} cases")


def test_08_threshold_exponents():
    worst, signs_ok, flips = 0.0, True, 0
    for v0, a in WEAK_FAMILY:
        s = PotentialSpec.square(v0, a=a)
        for parity in ("even", "odd"):
            for edge in ("+m", "-m"):
                fit = threshold_fit(s, P, parity, edge)
                worst = max(worst, abs(fit.exponent - fit.nearest_odd_integer))
                signs_ok &= fit.nearest_odd_integer == NONCRITICAL_SLOPE_SIGN[(edge, parity)]
    for parity in ("even", "odd"):
        for edge in ("+m", "-m"):
            for lam in oracle_critical_couplings(4.0, parity, edge, 5):
                s = PotentialSpec.square(4.0, lam=lam)
                fit = threshold_fit(s, P, parity, edge)
                worst = max(worst, abs(fit.exponent - fit.nearest_odd_integer))
                flipped = fit.nearest_odd_integer == -NONCRITICAL_SLOPE_SIGN[(edge, parity)]
                signs_ok &= flipped and classify_edge_state(s, P, parity, edge) == "critical"
                flips += 1
    ok = worst <= SLOPE_TOL and signs_ok and flips >= 4
    report(8, ok, f"max slope distance from odd integer {worst:.2e}; non-critical signs and "
                  f"{flips} critical flips correct = {signs_ok}")


def test_09_high_energy():
    rep = audited(0.5)
    r50, r100 = rep["high_energy"]["residuals"]
    ratios = [audited(v0, a)["high_energy"]["residuals"] for v0, a in WEAK_FAMILY[1:]]
    halves = all(b <= 0.5 * a for a, b in ratios)
    ok = r100 <= 0.5 * r50 and r100 <= 0.01 and halves
    report(9, ok, f"V0=0.5: |D(E) + int V| = {r50:.2e} at 50m, {r100:.2e} at 100m; "
                  f"halves on the rest of the family = {halves}")


def test_10_box_counting():
    lines, ok = [], True
    for v0 in (0.0, 0.5, 2.6):
        s = PotentialSpec.square(v0) if v0 else PotentialSpec.free()
        c = audited(v0)["counts"] if v0 else {"mu_plus": 0, "nu_plus": 0}
        counts = FlowCounts(c["mu_plus"], c["nu_plus"])
        lows = []
        for parity in ("even", "odd"):
            lv = quantized_levels(s, P, parity, L=200.0, count=20)
            ok &= len(lv) == 20 and max(l.residual for l in lv) <= QUANT_TOL
            want = counts.mu_plus if parity == "even" else counts.nu_plus
            ok &= lv[0].n == want
            audit_level_shift(free_levels(P, parity, L=200.0, count=20), lv, counts, parity)
            lows.append(lv[0].n)
        lines.append(f"mu+={counts.mu_plus}: lowest n (e,o) = {tuple(lows)}")
    report(10, ok, "L=200a, 20 levels, residual <= 1e-6; " + "; ".join(lines))


def test_11_flow_identities():
    bad = []
    wells = WEAK_FAMILY + [(4.0, 1.0), (6.0, 1.0)]
    for v0, a in wells:
        c = audited(v0, a)["counts"]
        if c["mu_plus"] - c["n_e"] != c["mu_minus"] or c["nu_plus"] - c["n_o"] != c["nu_minus"]:
            bad.append((v0, a))
        if c != audited(v0, a)["winding_counts"]:
            bad.append((v0, a))
    report(11, not bad, f"mu+ - n_e = mu- and nu+ - n_o = nu- on {len(wells)} sweeps; "
                        f"violations: {bad or 'none'}")


def test_12_monotonicity():
    s = PotentialSpec.square(3.0)
    energies = (-6.0, -1.3, 1.05, 2.0, 8.0)
    lams = ((0.1, 0.2), (0.3, 0.45), (0.6, 0.7), (0.85, 1.0))
    n, worst = 0, math.inf
    for E in energies:
        for pair in lams:
            for parity in ("even", "odd"):
                v = audit_monotonicity(s, P, E, parity, pair, slack=MONO_SLACK)
                worst = min(worst, v.difference * np.sign(E))
                n += v.passed
    total = len(energies) * len(lams) * 2
    report(12, n == total, f"{n}/{total} (E, lambda) points with sign(dD/dlambda) = sign(E); "
                           f"smallest signed difference {worst:.2e}")


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    failed = 0
    for t in tests:
        try:
            t()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
