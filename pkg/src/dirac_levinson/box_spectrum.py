"""Periodic-box quantization and the level-counting form of the strong theorem.

In a box ``(-L, L)`` with periodic boundary conditions the continuum momenta
obey ``k L + D(k) = n pi``. Because the threshold phase is
``(mu_plus - 1/2) pi`` (even) or ``nu_plus pi`` (odd), the lowest integer
that still has a solution is ``n = mu_plus`` or ``n = nu_plus``.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

from scipy.optimize import brentq

from .defaults import DEFAULTS
from .dirac_core import BRANCHES, _branch_sign, winding_phase_shift
from .levinson_audit import extrapolate_threshold, threshold_curve
from .serialize import rows_to_csv

PI = math.pi


class CountingViolation(AssertionError):
    pass


@dataclass(frozen=True)
class BoxLevel:
    n: int
    k: float
    E: float
    parity: str
    branch: str
    residual: float


class PhaseMemo:
    """Thread-safe cache of ``D(k)`` keyed by ``k`` rounded to 1e-12."""

    def __init__(self, spec, params, parity, branch):
        self.spec, self.params, self.parity = spec, params, parity
        self.sign = _branch_sign(branch)
        self._store = {}
        self._lock = threading.Lock()

    def __call__(self, k):
        key = round(float(k), 12)
        with self._lock:
            if key in self._store:
                return self._store[key]
        E = self.sign * math.sqrt(self.params.m ** 2 + k * k)
        val = float(winding_phase_shift(self.spec, self.params, E, self.parity)[0])
        with self._lock:
            self._store[key] = val
        return val


def threshold_phase(spec, params, parity, branch):
    """Threshold value of the phase shift, snapped to its lattice."""
    edge = "+m" if branch == "positive" else "-m"
    if spec.lam == 0.0:
        return 0.0
    return extrapolate_threshold(threshold_curve(spec, params, parity, edge)).snapped


def quantized_levels(spec, params, parity, branch="positive", L=None, count=None,
                     lam=None, k_floor=1e-6):
    """Lowest box levels solving ``k L + D(k) = n pi``.

    A ``k = 0`` level is listed when the threshold phase is a whole multiple
    of pi (the free particle's ``n = 0`` state and its odd-parity analogues).
    Integers ``n`` with no root are skipped: their states have left the
    continuum.
    """
    if branch not in BRANCHES:
        raise ValueError(f"unknown branch {branch!r}")
    if lam is not None:
        spec = spec.with_lambda(lam)
    L = DEFAULTS["box_L"] * params.a if L is None else float(L)
    count = DEFAULTS["box_count"] if count is None else int(count)
    if L < 50 * spec.a:
        raise ValueError(f"box half-length {L} must be at least 50 a")
    sign = _branch_sign(branch)
    delta = PhaseMemo(spec, params, parity, branch)
    d0 = threshold_phase(spec, params, parity, branch)

    def F(k):
        return k * L + delta(k)

    def energy(k):
        return sign * math.sqrt(params.m ** 2 + k * k)

    levels = []
    n0 = round(d0 / PI)
    if abs(d0 - n0 * PI) < 1e-9:
        levels.append(BoxLevel(int(n0), 0.0, energy(0.0), parity, branch, 0.0))
    k_lo = k_floor / params.a
    n = math.floor(F(k_lo) / PI) + 1
    if levels:
        n = max(n, levels[0].n + 1)
    while len(levels) < count:
        target = n * PI
        # F grows roughly like k L: step out until the target is bracketed
        k_hi = max(k_lo, (target - F(k_lo)) / L + k_lo) + PI / L
        while F(k_hi) < target:
            k_hi += PI / L
        k = brentq(lambda x: F(x) - target, k_lo, k_hi, xtol=1e-15, rtol=1e-15)
        levels.append(BoxLevel(int(n), k, energy(k), parity, branch, abs(F(k) - target)))
        k_lo, n = k, n + 1
    return levels


def free_levels(params, parity, branch="positive", L=None, count=None):
    """Free-particle levels ``k_n = n pi / L`` including ``n = 0``."""
    L = DEFAULTS["box_L"] * params.a if L is None else float(L)
    count = DEFAULTS["box_count"] if count is None else int(count)
    sign = _branch_sign(branch)
    return [BoxLevel(n, n * PI / L, sign * math.sqrt(params.m ** 2 + (n * PI / L) ** 2),
                     parity, branch, 0.0) for n in range(count)]


def audit_level_shift(free, interacting, counts, parity, spec=None, params=None):
    """Check that the lowest admitted ``n`` equals the crossing count.

    Also compares level counts below a momentum cutoff placed midway between
    two free levels: ``#free - #interacting + ceil(1/2 + D(K)/pi) - 1`` must
    equal the same crossing count. The phase at the cutoff is needed for
    that, so ``spec`` and ``params`` must be passed to enable it.
    """
    expected = counts.mu_plus if parity == "even" else counts.nu_plus
    lowest = min(lv.n for lv in interacting)
    if lowest != expected:
        raise CountingViolation(f"{parity}: lowest admitted n = {lowest}, crossings = {expected}")
    result = {"parity": parity, "lowest_n": lowest, "crossings": expected}
    if spec is not None and params is not None:
        k_top = min(free[-1].k, interacting[-1].k)
        L = PI / (free[1].k - free[0].k)
        N = math.floor(k_top * L / PI - 0.5)
        K = (N + 0.5) * PI / L
        n_free = sum(lv.k < K for lv in free)
        n_int = sum(lv.k < K for lv in interacting)
        dK = float(winding_phase_shift(spec, params, math.sqrt(params.m ** 2 + K * K), parity)[0])
        lost = n_free - n_int + math.ceil(0.5 + dK / PI) - 1
        if lost != expected:
            raise CountingViolation(f"{parity}: {lost} levels lost below k={K:.4g}, crossings = {expected}")
        result.update(cutoff=K, lost=lost)
    return result


def levels_to_csv(levels):
    rows = [(lv.n, lv.k, lv.E, lv.parity, lv.branch, lv.residual) for lv in levels]
    return rows_to_csv(["n", "k", "E", "parity", "branch", "residual"], rows)
