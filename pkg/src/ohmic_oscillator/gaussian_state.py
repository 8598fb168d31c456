"""Thermal-state diagnostics of a one-mode Gaussian covariance."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectral_moments import Covariance2

__all__ = [
    "ThermalDiagnostics",
    "UnphysicalCovariance",
    "diagnose",
    "effective_temperature",
    "entropy",
    "normal_form",
    "normal_form_frequency",
    "nu_of_thermal",
    "symplectic_invariant",
]

UNCERTAINTY_SLACK = 1e-9
# Below this distance from 1/2 the temperature is reported as exactly zero.
PURE_CLAMP = 1e-12


class UnphysicalCovariance(ValueError):
    pass


@dataclass(frozen=True)
class ThermalDiagnostics:
    nu: float
    lambda_eff: float
    temperature: float
    entropy: float
    purity: float


def symplectic_invariant(c: Covariance2) -> float:
    """``sqrt(<p^2><q^2> - <pq+qp>^2/4)``; equals 1/2 for pure states."""
    if not (c.qq > 0 and c.pp > 0):
        raise UnphysicalCovariance(f"variances must be positive, got qq={c.qq}, pp={c.pp}")
    det = c.det
    if det < 0.25 - UNCERTAINTY_SLACK:
        raise UnphysicalCovariance(f"qq*pp - qp^2 = {det:.12g} violates the uncertainty bound 1/4")
    return math.sqrt(max(det, 0.25))


def normal_form(c: Covariance2) -> tuple[float, np.ndarray]:
    """Return ``(lambda_eff, S)`` with ``S`` symplectic and ``S V S^T = nu * I``.

    A shear ``p -> p - (qp/qq) q`` removes the cross term, then a scaling
    ``q -> sqrt(lambda) q, p -> p / sqrt(lambda)`` equalizes the variances.
    """
    nu = symplectic_invariant(c)
    lam = nu / c.qq
    shear = np.array([[1.0, 0.0], [-c.qp / c.qq, 1.0]])
    scale = np.diag([math.sqrt(lam), 1.0 / math.sqrt(lam)])
    return lam, scale @ shear


def normal_form_frequency(c: Covariance2) -> float:
    return normal_form(c)[0]


def effective_temperature(nu: float, lambda_eff: float) -> float:
    """Invert ``nu = coth(lambda / 2T) / 2``."""
    if nu < 0.5 - UNCERTAINTY_SLACK:
        raise UnphysicalCovariance(f"nu={nu} < 1/2")
    if nu - 0.5 <= PURE_CLAMP:
        return 0.0
    return lambda_eff / (2.0 * math.atanh(0.5 / nu))


def nu_of_thermal(temperature: float, lambda_eff: float) -> float:
    if temperature == 0:
        return 0.5
    return 0.5 / math.tanh(lambda_eff / (2.0 * temperature))


def entropy(nu: float) -> float:
    """Von Neumann entropy (nats) of a one-mode Gaussian state."""
    if nu < 0.5 - UNCERTAINTY_SLACK:
        raise UnphysicalCovariance(f"nu={nu} < 1/2")
    a, b = nu + 0.5, nu - 0.5
    if b <= 0:
        return 0.0
    return a * math.log(a) - b * math.log(b)


def diagnose(c: Covariance2) -> ThermalDiagnostics:
    nu = symplectic_invariant(c)
    lam = normal_form_frequency(c)
    return ThermalDiagnostics(
        nu=nu,
        lambda_eff=lam,
        temperature=effective_temperature(nu, lam),
        entropy=entropy(nu),
        purity=0.5 / nu,
    )
