"""Closed-form reference results for the square well.

Inside a square well of depth ``lam*V0`` the shifted energy
``eps = E + lam*V0`` is constant, so the spinor is trigonometric with
``q = sqrt(eps^2 - m^2)`` (hyperbolic when ``|eps| < m``). Everything here is
written directly from those closed forms in :mod:`mpmath`, with no shared code
with the numerical solver, so it can serve as an independent check.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import mpmath as mp

GOLDEN_DPS = 50


@dataclass(frozen=True)
class OracleInputs:
    V0: float
    a: float = 1.0
    m: float = 1.0
    lam: float = 1.0


def _relative_angle(ratio, T, oscillatory):
    # continuous angle swept by (cos t, ratio sin t) for t in [0, T], or by
    # (cosh, ratio sinh) when the interior is evanescent
    if not oscillatory:
        return mp.atan(ratio * mp.tanh(T))
    N = mp.floor(T / mp.pi + mp.mpf(1) / 2)
    c = mp.cos(T)
    if c == 0:
        inner = mp.sign(ratio) * mp.pi / 2
    else:
        inner = mp.atan(ratio * mp.tan(T))
    return mp.sign(ratio) * N * mp.pi + inner


def oracle_phase_shift(inp, E, parity, dps=30):
    """``(delta mod pi, continuous delta)`` for the square well at ``|E| > m``.

    Even: ``tan(ka + D) = r tan(qa)``, odd: ``tan(ka + D) = tan(qa) / r`` with
    ``r = (E+m) q / (k (eps+m))``. The continuous value is the winding of the
    scaled spinor from the origin, which vanishes at ``lam = 0``.
    """
    with mp.workdps(dps):
        m, a = mp.mpf(inp.m), mp.mpf(inp.a)
        E = mp.mpf(E)
        if abs(E) <= m:
            raise ValueError("not a scattering energy")
        eps = E + mp.mpf(inp.lam) * mp.mpf(inp.V0)
        k = mp.sqrt(E * E - m * m)
        s = (E + m) / k
        q2 = eps * eps - m * m
        if q2 > 0:
            q = mp.sqrt(q2)
            r = (E + m) * q / (k * (eps + m))
            ratio = r if parity == "even" else 1 / r
            ang = _relative_angle(ratio, q * a, True)
        elif q2 < 0:
            p = mp.sqrt(-q2)
            ratio = s * (eps - m) / p if parity == "even" else (eps + m) / (p * s)
            ang = _relative_angle(ratio, p * a, False)
        else:
            ang = mp.atan(s * (eps - m) * a if parity == "even" else (eps + m) * a / s)
        delta = ang - k * a
        return float(delta % mp.pi), float(delta)


def _interior(inp, E):
    """Closed-form ``(f(a), g(a))`` for even and odd starts."""
    m, a = mp.mpf(inp.m), mp.mpf(inp.a)
    eps = E + mp.mpf(inp.lam) * mp.mpf(inp.V0)
    q2 = eps * eps - m * m
    if q2 > 0:
        q = mp.sqrt(q2)
        C, S = mp.cos(q * a), mp.sin(q * a) / q
    elif q2 < 0:
        p = mp.sqrt(-q2)
        C, S = mp.cosh(p * a), mp.sinh(p * a) / p
    else:
        C, S = mp.mpf(1), a
    even = (C, (eps - m) * S)
    odd = (-(eps + m) * S, C)
    return even, odd


def _gap_function(inp, t, parity):
    # E = -m cos t maps (0, pi) onto the gap; the residual
    # sin(t/2) g - cos(t/2) f is (E+m) g - kappa f divided by sqrt(2m(m+E))
    E = -mp.mpf(inp.m) * mp.cos(t)
    even, odd = _interior(inp, E)
    f, g = even if parity == "even" else odd
    return (mp.sin(t / 2) * g - mp.cos(t / 2) * f) / mp.sqrt(f * f + g * g)


def oracle_bound_energies(inp, n_scan=4000, tol=1e-13, dps=30):
    """Bound-state energies ``[(E_b, parity), ...]`` in descending energy."""
    if inp.lam == 0 or inp.V0 == 0:
        return []
    out = []
    with mp.workdps(dps):
        m = mp.mpf(inp.m)
        ts = [mp.pi * i / n_scan for i in range(1, n_scan)]
        edge = [mp.mpf(10) ** (-e) for e in range(4, 9)]
        ts = sorted(set(edge + ts + [mp.pi - d for d in edge]))
        for parity in ("even", "odd"):
            vals = [_gap_function(inp, t, parity) for t in ts]
            for i in range(len(ts) - 1):
                if vals[i] == 0:
                    out.append((float(-m * mp.cos(ts[i])), parity))
                    continue
                if vals[i] * vals[i + 1] > 0:
                    continue
                lo, hi, flo = ts[i], ts[i + 1], vals[i]
                # bisection until the energy bracket is below tol
                while m * abs(mp.cos(lo) - mp.cos(hi)) > tol / 4:
                    mid = (lo + hi) / 2
                    fm = _gap_function(inp, mid, parity)
                    if fm * flo > 0:
                        lo, flo = mid, fm
                    else:
                        hi = mid
                out.append((float(-m * mp.cos((lo + hi) / 2)), parity))
    out.sort(key=lambda p: -p[0])
    return out


def oracle_critical_couplings(V0, parity, edge, count, a=1.0, m=1.0):
    """Increasing couplings ``lam* <= 1`` at which a state sits at the edge.

    At ``E = +m`` the edge condition is ``g(a) = 0``; at ``E = -m`` it is
    ``f(a) = 0``. With ``q a = z`` this gives ``sin z = 0`` (even, +m),
    ``cos z = 0`` (odd, +m), ``cos z = 0`` (even, -m) and ``sin z = 0``
    (odd, -m), where ``q^2 = t (t + 2m)`` at +m and ``t (t - 2m)`` at -m for
    depth ``t = lam V0``. Only solutions with ``t > 2m`` exist at -m.
    """
    out = []
    n = 1
    while len(out) < count:
        half = parity == "even" and edge == "-m" or parity == "odd" and edge == "+m"
        z = (n - 0.5) * mp.pi if half else n * mp.pi
        q = z / a
        if edge == "+m":
            t = mp.sqrt(m * m + q * q) - m
        else:
            t = m + mp.sqrt(m * m + q * q)
        lam = t / V0
        if lam > 1:
            break
        out.append(float(lam))
        n += 1
    return out


# ---------------------------------------------------------------------------
# golden fixtures

GOLDEN_CASES = {
    "phase_even_V0_0.5_E1.2": dict(inputs=OracleInputs(0.5), E=1.2, parity="even"),
    "phase_odd_V0_0.5_E1.2": dict(inputs=OracleInputs(0.5), E=1.2, parity="odd"),
    "phase_even_V0_1.5_E-2.5": dict(inputs=OracleInputs(1.5), E=-2.5, parity="even"),
    "phase_odd_V0_3.0_E-1.7": dict(inputs=OracleInputs(3.0), E=-1.7, parity="odd"),
    "high_energy_V0_0.5_E50": dict(inputs=OracleInputs(0.5), E=50.0, parity="total"),
    "high_energy_V0_0.5_E100": dict(inputs=OracleInputs(0.5), E=100.0, parity="total"),
}


def golden_values(dps=GOLDEN_DPS):
    """Golden fixtures evaluated at ``dps`` digits, rounded to binary64."""
    cases = []
    for name, c in GOLDEN_CASES.items():
        inp = c["inputs"]
        if c["parity"] == "total":
            de = oracle_phase_shift(inp, c["E"], "even", dps)[1]
            do = oracle_phase_shift(inp, c["E"], "odd", dps)[1]
            integral = -2 * inp.a * inp.lam * inp.V0
            expected = {"residual": abs(de + do + integral)}
        else:
            mod, cont = oracle_phase_shift(inp, c["E"], c["parity"], dps)
            expected = {"delta_mod_pi": mod, "delta": cont}
        cases.append({"case": name,
                      "inputs": dict(asdict(inp), E=c["E"], parity=c["parity"]),
                      "expected": expected})
    inp = OracleInputs(2.0)
    cases.append({"case": "bound_V0_2",
                  "inputs": asdict(inp),
                  "expected": [[e, p] for e, p in oracle_bound_energies(inp, dps=dps)]})
    for parity in ("even", "odd"):
        for edge in ("+m", "-m"):
            cases.append({"case": f"critical_V0_4_{parity}_{edge}",
                          "inputs": {"V0": 4.0, "a": 1.0, "m": 1.0, "parity": parity, "edge": edge},
                          "expected": oracle_critical_couplings(4.0, parity, edge, 5)})
    return cases


def write_fixtures(path, dps=GOLDEN_DPS):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(golden_values(dps), indent=1) + "\n")
    return path
