import json

import numpy as np
import pytest

from dirac_levinson.model import (
    ModelParams,
    PotentialSpec,
    SpecError,
    evaluate,
    integral,
    load_spec,
    require_valid,
    spec_from_dict,
    spec_to_dict,
    validate,
)


def test_square_evaluate_and_support(params):
    s = PotentialSpec.square(2.0, lam=0.5)
    x = np.array([-2.0, -1.0, -0.3, 0.0, 0.7, 1.0, 1.0000001, 3.0])
    v = evaluate(s, params, x)
    assert np.all(v[[0, -2, -1]] == 0.0)
    assert np.allclose(v[1:6], -1.0)
    assert evaluate(s, params, 5.0) == 0.0


def test_integral_exact_for_layers():
    s = PotentialSpec.piecewise([(0.5, 3.0), (0.25, 1.0)], lam=0.5)
    assert s.a == pytest.approx(0.75)
    assert integral(s) == pytest.approx(-2 * 0.5 * (0.5 * 3.0 + 0.25 * 1.0))


def test_table_integral_matches_square():
    x = np.linspace(-1, 1, 41)
    t = PotentialSpec.table(x, -2.0 * np.ones_like(x))
    assert validate(t).ok
    assert integral(t) == pytest.approx(integral(PotentialSpec.square(2.0)), rel=1e-12)


def test_asymmetric_table_rejected():
    x = np.linspace(-1, 1, 11)
    v = -1.0 - 0.1 * x
    rep = validate(PotentialSpec.table(x, v))
    assert not rep.ok
    assert any(msg.startswith("asymmetric") for msg in rep.violations)


def test_positive_sample_rejected():
    x = np.linspace(0, 1, 5)
    rep = validate(PotentialSpec.table(x, [-1, -1, 0.2, -1, -1]))
    assert "not a well: positive sample" in rep.violations
    with pytest.raises(SpecError):
        require_valid(PotentialSpec.table(x, [-1, -1, 0.2, -1, -1]))


@pytest.mark.parametrize("lam", [-0.1, 1.5])
def test_lambda_range(lam):
    assert not validate(PotentialSpec.square(1.0, lam=lam)).ok


def test_bad_params():
    with pytest.raises(SpecError):
        ModelParams(m=0.0)


def test_json_round_trip(tmp_path):
    doc = {"family": "square", "v0": 2.0, "a": 1.0, "lambda": 0.25}
    s = spec_from_dict(doc)
    assert spec_to_dict(s) == doc
    p = tmp_path / "w.json"
    p.write_text(json.dumps(doc))
    assert load_spec(p) == s


@pytest.mark.parametrize("doc", [{"family": "hexagon"}, {"family": "square"}, {}])
def test_bad_documents(doc):
    with pytest.raises(SpecError):
        spec_from_dict(doc)


def test_unreadable_file(tmp_path):
    with pytest.raises(SpecError):
        load_spec(tmp_path / "missing.json")
