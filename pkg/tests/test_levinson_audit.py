import math

import numpy as np
import pytest

from dirac_levinson.defaults import WEAK_SIGN
from dirac_levinson.levinson_audit import (
    NoConvergenceError,
    audit_high_energy,
    audit_monotonicity,
    audit_sin2,
    audit_strong,
    audit_weak,
    audit_well,
    calibrate_weak_sign,
    extrapolate_threshold,
    predicted_threshold,
    threshold_curve,
)
from dirac_levinson.dirac_core import PhaseCurve, PhaseShiftSample
from dirac_levinson.spectral_flow import FlowCounts

from conftest import square

PI = math.pi


def fake_curve(limit, slope=0.3):
    xi = np.geomspace(1e-4, 1e-2, 20)
    samples = [PhaseShiftSample(1.0, x, x, "even", 0.0, limit + slope * x) for x in xi]
    return PhaseCurve("even", "positive", samples)


def test_extrapolation_snaps():
    tv = extrapolate_threshold(fake_curve(PI / 2 + 1e-5), "half")
    assert tv.snapped == pytest.approx(PI / 2)
    assert tv.distance == pytest.approx(1e-5, rel=1e-3)
    assert extrapolate_threshold(fake_curve(-PI), "integer").snapped == pytest.approx(-PI)


def test_extrapolation_off_lattice():
    with pytest.raises(NoConvergenceError):
        extrapolate_threshold(fake_curve(0.8), "half")


def test_predicted_values():
    c = FlowCounts(2, 2, 1, 0, 1, 2)
    assert predicted_threshold("even", "+m", "non-critical", c) == pytest.approx(1.5 * PI)
    assert predicted_threshold("odd", "+m", "non-critical", c) == pytest.approx(2 * PI)
    assert predicted_threshold("even", "-m", "non-critical", c) == pytest.approx(-PI)
    assert predicted_threshold("odd", "-m", "non-critical", c) == pytest.approx(-0.5 * PI)
    assert predicted_threshold("even", "+m", "critical", c) == pytest.approx(2 * PI)
    assert predicted_threshold("odd", "-m", "critical", c) == pytest.approx(-PI)


def test_inconclusive_verdict():
    out = audit_strong({("even", "+m"): 1.0}, FlowCounts(), {("even", "+m"): "inconclusive"})
    assert out[0].passed is None and out[0].to_dict()["pass"] is None


def test_sin2_and_weak():
    v, ok = audit_sin2(PI / 2, 0.0)
    assert ok and v == pytest.approx(1.0)
    assert not audit_sin2(PI / 4, 0.0)[1]
    w = audit_weak(1.5 * PI, -PI, "even", 1)
    assert w.residual < 1e-12 and w.simplified_residual < 1e-12
    w = audit_weak(2 * PI, -0.5 * PI, "odd", 2)
    assert w.residual < 1e-12 and w.simplified_residual < 1e-12


def test_weak_sign_calibration():
    assert calibrate_weak_sign() == WEAK_SIGN


def test_high_energy_decay(params):
    s = square(0.5)
    curves = [threshold_curve(s, params, p, "+m") for p in ("even", "odd")]
    he = audit_high_energy(curves, s, params)
    assert he.passed
    assert he.residuals[1] <= 0.5 * he.residuals[0]
    assert he.residuals[1] <= 0.01


@pytest.mark.parametrize("E", [-4.0, -1.2, 1.2, 4.0])
@pytest.mark.parametrize("parity", ["even", "odd"])
def test_monotone_in_coupling(params, E, parity):
    v = audit_monotonicity(square(3.0), params, E, parity, (0.4, 0.45))
    assert v.passed
    assert np.sign(v.difference) == np.sign(E)


@pytest.fixture(scope="module")
def weak_report(params):
    return audit_well(square(0.5), params, lam_steps=40)


def test_weak_well_report(weak_report):
    assert weak_report.passed
    d = weak_report.to_dict()
    assert d["counts"] == {"mu_plus": 1, "nu_plus": 0, "mu_minus": 0, "nu_minus": 0,
                           "n_e": 1, "n_o": 0}
    ids = {(i["parity"], i["edge"]): i for i in d["identities"]}
    assert ids[("even", "+m")]["delta"] == pytest.approx(PI / 2, abs=1e-3)
    assert ids[("odd", "+m")]["delta"] == pytest.approx(0.0, abs=1e-3)
    assert set(ids[("even", "+m")]) == {"parity", "edge", "delta", "regime", "predicted",
                                        "residual", "pass"}
    assert len(d["config_hash"]) == 64 and d["version"]
