import math
import warnings

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ohmic_oscillator.model import ModelParams, ModelValidationError, Regime, classify_regime, validate


def test_valid_params_expose_gamma():
    p = validate({"omega": 1, "eps": 0.1, "cutoff": 100})
    assert p.gamma == pytest.approx(0.005, rel=1e-14)


@pytest.mark.parametrize(
    "raw, code, fld",
    [
        ({"omega": 1, "eps": 1, "cutoff": 0.5}, "CutoffBelowResonance", "cutoff"),
        ({"omega": 1, "lambda_th": 0.7, "mu": 0.71}, "ThermometerUnstable", "mu"),
        ({"omega": -1}, "NonPositiveFrequency", "omega"),
        ({"omega": 1, "eps": -0.1}, "NegativeCoupling", "eps"),
        ({"omega": 1, "mu": 0.1}, "ThermometerUnstable", "lambda_th"),
        ({"omgea": 1}, "UnknownField", "omgea"),
        ({"omega": "fast"}, "TypeMismatch", "omega"),
    ],
)
def test_validation_errors(raw, code, fld):
    with pytest.raises(ModelValidationError) as exc:
        validate(raw)
    assert code in exc.value.codes
    assert fld in exc.value.fields


def test_all_violations_reported_together():
    with pytest.raises(ModelValidationError) as exc:
        ModelParams(omega=-1, eps=-1, cutoff=-1)
    assert {"NonPositiveFrequency", "NegativeCoupling"} <= set(exc.value.codes)


def test_stability_boundary_is_unstable():
    with pytest.raises(ModelValidationError):
        ModelParams(omega=1.0, lambda_th=0.5, mu=0.5)


def test_low_cutoff_warns():
    with pytest.warns(UserWarning, match="cutoff"):
        ModelParams(omega=1.0, eps=2.0, cutoff=20.0)


def test_params_are_immutable():
    p = ModelParams()
    with pytest.raises(Exception):
        p.omega = 2.0


@pytest.mark.parametrize(
    "omega, eps, regime",
    [(1.0, 1.0, Regime.UNDERDAMPED), (1.0, 2.0, Regime.CRITICAL), (0.1, 1.5, Regime.OVERDAMPED)],
)
def test_classify_regime(omega, eps, regime):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assert classify_regime(ModelParams(omega=omega, eps=eps)) is regime


@given(omega=st.floats(0.01, 10), eps=st.floats(0, 5), s=st.sampled_from([0.25, 4.0]))
def test_regime_invariant_under_joint_rescaling(omega, eps, s):
    # s and sqrt(s) are powers of two, so both sides scale exactly
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        p = ModelParams(omega=omega, eps=eps, cutoff=1e6)
        q = ModelParams(omega=s * omega, eps=math.sqrt(s) * eps, cutoff=1e7)
    assert classify_regime(p) is classify_regime(q)


@given(eps=st.one_of(st.just(0.0), st.floats(1e-6, 10)))
def test_gamma_nonnegative_zero_iff_decoupled(eps):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        p = ModelParams(omega=1.0, eps=eps, cutoff=1e6)
    assert p.gamma >= 0
    assert (p.gamma == 0) == (eps == 0)
