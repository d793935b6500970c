"""Follow bound levels as the coupling is switched on and count edge crossings.

Levels enter the gap at ``E = +m`` and, in deep enough wells, leave it at
``E = -m``. The integers

* ``mu_plus`` / ``nu_plus``: even / odd levels that have crossed ``+m``,
* ``mu_minus`` / ``nu_minus``: even / odd levels that have crossed ``-m``,

satisfy ``mu_plus - n_e = mu_minus`` and ``nu_plus - n_o = nu_minus`` where
``n_e, n_o`` count the bound states at the final coupling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dirac_core import (
    EDGES,
    PARITIES,
    bound_states,
    edge_residual,
    edge_windings,
)
from .model import integral, require_valid
from .serialize import rows_to_csv


class TrackingError(RuntimeError):
    """Levels could not be followed between adjacent couplings."""


class BracketError(ValueError):
    pass


class InconsistentCountsError(RuntimeError):
    pass


@dataclass(frozen=True)
class CrossingEvent:
    lam: float
    edge: str
    parity: str
    direction: str
    index: int


@dataclass
class FlowTrace:
    lam_grid: np.ndarray
    levels: list
    events: list = field(default_factory=list)

    def to_csv(self):
        rows = [(float(lam), b.parity, b.nodes, float(b.E_b))
                for lam, states in zip(self.lam_grid, self.levels) for b in states]
        return rows_to_csv(["lambda", "parity", "nodes", "energy"], rows)


@dataclass(frozen=True)
class FlowCounts:
    mu_plus: int = 0
    nu_plus: int = 0
    mu_minus: int = 0
    nu_minus: int = 0
    n_e: int = 0
    n_o: int = 0

    def check(self):
        vals = (self.mu_plus, self.nu_plus, self.mu_minus, self.nu_minus, self.n_e, self.n_o)
        if any(v < 0 for v in vals):
            raise InconsistentCountsError(f"negative count in {self}")
        if self.mu_plus - self.n_e != self.mu_minus:
            raise InconsistentCountsError(
                f"even: mu_plus - n_e = {self.mu_plus - self.n_e} but mu_minus = {self.mu_minus}")
        if self.nu_plus - self.n_o != self.nu_minus:
            raise InconsistentCountsError(
                f"odd: nu_plus - n_o = {self.nu_plus - self.n_o} but nu_minus = {self.nu_minus}")
        return self


def edge_crossing_counts(spec, params, parity):
    """``(plus, minus)`` crossings so far, read off the edge windings.

    ``plus`` counts labels ``j >= j0`` with ``j pi < theta(a; +m)``; ``minus``
    counts labels the lower winding has passed. A level sitting exactly at an
    edge is not counted. ``j0`` is 0 for even and 1 for odd parity, the
    values fixed by the free particle.
    """
    if spec.lam == 0.0 or integral(spec) == 0.0:
        return 0, 0
    lower, upper = edge_windings(spec, params, parity)
    j0 = 0 if parity == "even" else 1
    plus = max(0, math.ceil(upper / math.pi - 1e-12) - j0)
    if parity == "even":
        # any attractive well binds an even level immediately
        plus = max(plus, 1)
    minus = max(0, math.ceil(lower / math.pi - 1e-12) - j0)
    return plus, minus


def winding_counts(spec, params):
    """:class:`FlowCounts` from windings alone, without any sweep."""
    pe, me = edge_crossing_counts(spec, params, "even")
    po, mo = edge_crossing_counts(spec, params, "odd")
    return FlowCounts(pe, po, me, mo, pe - me, po - mo)


def _count_at(spec, params, parity, edge, lam):
    plus, minus = edge_crossing_counts(spec.with_lambda(lam), params, parity)
    return plus if edge == "+m" else minus


def refine_crossing(spec, params, parity, edge, bracket, tol=1e-9):
    """Locate the coupling at which one level crosses ``edge``.

    The bracket must contain exactly one crossing for ``parity``; the root is
    then found by bisection on the sign of the edge residual.
    """
    lo, hi = map(float, bracket)
    n = _count_at(spec, params, parity, edge, hi) - _count_at(spec, params, parity, edge, lo)
    if n != 1:
        raise BracketError(f"bracket [{lo}, {hi}] holds {n} {parity} crossings at {edge}")

    def r(lam):
        return edge_residual(spec.with_lambda(lam), params, parity, edge)

    r_lo = r(lo)
    if r_lo == 0.0:
        return lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        r_mid = r(mid)
        if r_mid == 0.0:
            return mid
        if np.sign(r_mid) == np.sign(r_lo):
            lo, r_lo = mid, r_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _split_events(spec, params, parity, edge, lo, hi, depth=3):
    """Refined couplings of all crossings in ``[lo, hi]``, subdividing x10."""
    n = _count_at(spec, params, parity, edge, hi) - _count_at(spec, params, parity, edge, lo)
    if n <= 0:
        return []
    if n == 1:
        return [refine_crossing(spec, params, parity, edge, (lo, hi))]
    if depth == 0:
        raise TrackingError(f"{n} {parity} crossings at {edge} in [{lo}, {hi}] after refinement")
    out = []
    sub = np.linspace(lo, hi, 11)
    for a, b in zip(sub[:-1], sub[1:]):
        out += _split_events(spec, params, parity, edge, a, b, depth - 1)
    return out


def sweep_coupling(spec, params, lam_steps=200, lam_max=None, n_grid=2000):
    """Solve for bound states on a coupling grid and record edge crossings.

    Levels are identified between grid points by ``(parity, index)``, the
    winding label that stays fixed along a level. Entering labels must come
    in at ``+m`` and leaving labels go out at ``-m``; anything else raises
    :class:`TrackingError`.
    """
    require_valid(spec)
    if lam_steps < 1:
        raise ValueError("lam_steps must be positive")
    lam_max = spec.lam if lam_max is None else float(lam_max)
    if lam_max == 0.0:
        return FlowTrace(np.array([0.0]), [[]], [])
    grid = np.linspace(0.0, lam_max, lam_steps + 1)
    levels = [bound_states(spec, params, lam, n_grid=n_grid) for lam in grid]
    counts = []
    for lam in grid:
        row = {}
        for parity in PARITIES:
            plus, minus = edge_crossing_counts(spec.with_lambda(lam), params, parity)
            row[parity] = {"+m": plus, "-m": minus}
        counts.append(row)
    events = []
    for parity in PARITIES:
        prev = set()
        for i, states in enumerate(levels):
            cur = {b.index for b in states if b.parity == parity}
            if i == 0:
                if cur:
                    raise TrackingError("bound states at zero coupling")
                prev = cur
                continue
            entered, left = cur - prev, prev - cur
            if entered and prev and min(entered) < max(prev):
                raise TrackingError(f"{parity} level appeared inside the gap at lambda={grid[i]}")
            if left and cur and max(left) > min(cur):
                raise TrackingError(f"{parity} level vanished inside the gap at lambda={grid[i]}")
            for edge, labels, direction in (("+m", entered, "into-gap"),
                                            ("-m", left, "into-negative-continuum")):
                if not labels and counts[i][parity][edge] == counts[i - 1][parity][edge]:
                    continue
                lams = _split_events(spec, params, parity, edge, grid[i - 1], grid[i])
                if len(lams) != len(labels):
                    raise TrackingError(
                        f"{parity} at {edge}: {len(labels)} labels changed but "
                        f"{len(lams)} crossings in [{grid[i - 1]}, {grid[i]}]")
                for lam_star, j in zip(sorted(lams), sorted(labels)):
                    events.append(CrossingEvent(float(lam_star), edge, parity, direction, j))
            prev = cur
    events.sort(key=lambda e: (e.lam, e.edge, e.parity))
    return FlowTrace(grid, levels, events)


def count_crossings(trace, final_states=None):
    """Tally crossing events; bound-state counts come from ``final_states``."""
    if final_states is None:
        final_states = trace.levels[-1]
    tally = {(e, p): 0 for e in EDGES for p in PARITIES}
    for ev in trace.events:
        tally[(ev.edge, ev.parity)] += 1
    counts = FlowCounts(
        mu_plus=tally[("+m", "even")],
        nu_plus=tally[("+m", "odd")],
        mu_minus=tally[("-m", "even")],
        nu_minus=tally[("-m", "odd")],
        n_e=sum(b.parity == "even" for b in final_states),
        n_o=sum(b.parity == "odd" for b in final_states),
    )
    return counts.check()


def level_histories(trace):
    """``{(parity, index): [(lam, E_b, nodes), ...]}`` along the sweep."""
    out = {}
    for lam, states in zip(trace.lam_grid, trace.levels):
        for b in states:
            out.setdefault((b.parity, b.index), []).append((float(lam), b.E_b, b.nodes))
    return out
