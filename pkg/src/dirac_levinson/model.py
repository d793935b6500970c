"""Physical parameters and the family of admissible potential wells.

Units are natural (hbar = c = 1). A potential is described by a
:class:`PotentialSpec` holding a positive depth profile; the sign is applied
at evaluation time so that ``V(x) = -lam * depth(x) <= 0``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.interpolate import PchipInterpolator

FAMILIES = ("square", "piecewise", "table")


class SpecError(ValueError):
    """Raised for a potential description that cannot be used."""


@dataclass(frozen=True)
class ModelParams:
    """Mass ``m`` and length unit ``a`` (the well range used for xi = k a)."""

    m: float = 1.0
    a: float = 1.0

    def __post_init__(self):
        if not (self.m > 0 and self.a > 0):
            raise SpecError(f"m and a must be positive, got m={self.m}, a={self.a}")


@dataclass(frozen=True)
class PotentialSpec:
    """A symmetric, non-positive, finite-range well ``V(x) = lam * V0(x)``.

    ``family`` selects how the depth profile is stored:

    * ``square``: constant depth ``v0`` on ``|x| < a``.
    * ``piecewise``: ``segments`` is a tuple of ``(width, depth)`` pairs
      running outward from the origin; ``a`` is the summed width.
    * ``table``: signed samples ``v`` of V0 on abscissae ``x`` (covering
      ``[0, a]`` or ``[-a, a]``), interpolated with a monotone cubic.
    """

    family: str
    a: float
    v0: float = 0.0
    lam: float = 1.0
    segments: tuple = ()
    x: tuple = ()
    v: tuple = ()
    _interp: object = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise SpecError(f"unknown family {self.family!r}")
        if self.family == "table" and len(self.x):
            xs = np.asarray(self.x, float)
            vs = np.asarray(self.v, float)
            keep = xs >= 0
            order = np.argsort(xs[keep])
            xp, vp = xs[keep][order], vs[keep][order]
            if len(xp) >= 2 and np.all(np.diff(xp) > 0):
                object.__setattr__(self, "_interp", PchipInterpolator(xp, vp, extrapolate=False))

    # -- constructors -----------------------------------------------------

    @classmethod
    def square(cls, v0, a=1.0, lam=1.0):
        return cls("square", a=float(a), v0=float(v0), lam=float(lam))

    @classmethod
    def piecewise(cls, segments, lam=1.0):
        segs = tuple((float(w), float(d)) for w, d in segments)
        return cls("piecewise", a=sum(w for w, _ in segs),
                   v0=max((d for _, d in segs), default=0.0), lam=float(lam), segments=segs)

    @classmethod
    def table(cls, x, v, lam=1.0, a=None):
        x = tuple(float(t) for t in x)
        v = tuple(float(t) for t in v)
        if a is None:
            a = max(abs(t) for t in x)
        return cls("table", a=float(a), v0=max((-t for t in v), default=0.0),
                   lam=float(lam), x=x, v=v)

    @classmethod
    def free(cls, a=1.0):
        return cls.square(0.0, a=a, lam=0.0)

    def with_lambda(self, lam):
        return replace(self, lam=float(lam))

    # -- structure ----------------------------------------------------------

    def is_piecewise_constant(self):
        return self.family in ("square", "piecewise")

    def layers(self):
        """Constant-depth layers ``(x0, x1, depth)`` on ``[0, a]`` (unscaled)."""
        if self.family == "square":
            return [(0.0, self.a, self.v0)]
        if self.family == "piecewise":
            out, x0 = [], 0.0
            for w, d in self.segments:
                out.append((x0, x0 + w, d))
                x0 += w
            return out
        raise SpecError("table profiles have no constant layers")

    def breakpoints(self):
        """Abscissae in ``[0, a]`` where V may be non-smooth."""
        if self.family == "table":
            pts = [t for t in self.x if 0 <= t <= self.a]
            return sorted(set([0.0, self.a] + pts))
        return sorted(set([0.0] + [x1 for _, x1, _ in self.layers()]))

    def depth(self, x):
        """Unscaled depth profile ``-V0(|x|) >= 0``; zero outside the well."""
        x = np.abs(np.asarray(x, float))
        out = np.zeros_like(x)
        inside = x <= self.a
        if self.family == "table":
            if self._interp is None:
                raise SpecError("table needs at least two distinct non-negative abscissae")
            vals = self._interp(np.minimum(x[inside], self._interp.x[-1]))
            out[inside] = -np.nan_to_num(vals)
            return out
        for x0, x1, d in self.layers():
            sel = inside & (x >= x0) & (x < x1)
            out[sel] = d
        # the outer edge belongs to the last layer
        if self.layers():
            out[x == self.a] = self.layers()[-1][2]
        return out


def evaluate(spec, params, x):
    """Potential energy ``lam * V0(x)``; exactly zero for ``|x| > a``."""
    scalar = np.ndim(x) == 0
    val = -spec.lam * spec.depth(x)
    val = np.where(np.abs(np.asarray(x, float)) > spec.a, 0.0, val) + 0.0
    return float(val) if scalar else val


@dataclass
class ValidationReport:
    ok: bool
    violations: list

    def __bool__(self):
        return self.ok


def validate(spec, tol=1e-12):
    """Check symmetry, non-positivity and compact support of ``spec``."""
    bad = []
    if not spec.a > 0:
        bad.append("range: a must be positive")
    if not 0.0 <= spec.lam <= 1.0:
        bad.append(f"coupling: lambda={spec.lam} outside [0, 1]")
    if spec.family == "square":
        if spec.v0 < 0:
            bad.append("not a well: negative depth")
    elif spec.family == "piecewise":
        if not spec.segments:
            bad.append("piecewise: no segments")
        for w, d in spec.segments:
            if w <= 0:
                bad.append(f"piecewise: non-positive width {w}")
            if d < 0:
                bad.append(f"not a well: negative depth {d}")
    else:
        xs, vs = np.asarray(spec.x, float), np.asarray(spec.v, float)
        if xs.shape != vs.shape or xs.size < 2:
            bad.append("table: x and v must be equal-length with at least two samples")
        else:
            if np.any(vs > tol):
                bad.append("not a well: positive sample")
            if np.any(np.abs(xs) > spec.a + tol):
                bad.append("support: samples beyond a")
            lookup = dict(zip(np.round(xs, 12), vs))
            for xi, vi in lookup.items():
                if xi > 0 and -xi in lookup and abs(lookup[-xi] - vi) > tol:
                    bad.append(f"asymmetric: V0({xi:g}) != V0({-xi:g})")
                    break
            if spec._interp is None:
                bad.append("table: need two distinct non-negative abscissae")
            elif spec._interp.x[-1] < spec.a - tol:
                bad.append("table: samples do not reach x = a")
    return ValidationReport(not bad, bad)


def require_valid(spec):
    rep = validate(spec)
    if not rep:
        raise SpecError("; ".join(rep.violations))
    return spec


def integral(spec, params=None):
    """``int V(x) dx`` over the real line."""
    if spec.lam == 0.0:
        return 0.0
    if spec.is_piecewise_constant():
        half = sum((x1 - x0) * d for x0, x1, d in spec.layers())
    else:
        # exact integral of the interpolant
        half = -float(spec._interp.integrate(0.0, spec.a))
    return -2.0 * spec.lam * half


# -- JSON ------------------------------------------------------------------

def spec_from_dict(doc):
    try:
        fam = doc["family"]
        lam = float(doc.get("lambda", 1.0))
        if fam == "square":
            return PotentialSpec.square(doc["v0"], a=doc.get("a", 1.0), lam=lam)
        if fam == "piecewise":
            return PotentialSpec.piecewise(doc["segments"], lam=lam)
        if fam == "table":
            return PotentialSpec.table(doc["x"], doc["v"], lam=lam, a=doc.get("a"))
    except (KeyError, TypeError) as exc:
        raise SpecError(f"malformed potential document: {exc}") from exc
    raise SpecError(f"unknown family {fam!r}")


def spec_to_dict(spec):
    doc = {"family": spec.family}
    if spec.family == "square":
        doc.update(v0=spec.v0, a=spec.a)
    elif spec.family == "piecewise":
        doc["segments"] = [list(s) for s in spec.segments]
    else:
        doc.update(x=list(spec.x), v=list(spec.v), a=spec.a)
    doc["lambda"] = spec.lam
    return doc


def load_spec(path):
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecError(f"cannot read potential file {path}: {exc}") from exc
    return spec_from_dict(doc)
