import warnings

import pytest
from hypothesis import settings

from ohmic_oscillator.model import ModelParams

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

_ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def record_acceptance():
    """Record one PASS/FAIL line per acceptance criterion for the terminal summary."""

    def record(number: int, passed: bool, detail: str):
        _ACCEPTANCE[number] = (bool(passed), detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def strong():
    return ModelParams(omega=1.0, eps=1.0, cutoff=1000.0)


@pytest.fixture
def thermo():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return ModelParams(omega=1.0, eps=1.0, cutoff=1000.0, lambda_th=0.7, mu=1e-2)
