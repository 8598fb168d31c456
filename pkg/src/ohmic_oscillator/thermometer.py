"""A second oscillator weakly coupled to the first, read out as a thermometer.

Equations of motion: ``z'' + lambda_th^2 z = mu q`` and
``q'' + gamma q' + omega^2 q = eps phi0'(t, 0) + mu z``. Eliminating ``q``
gives ``z(w) = mu eps i w Phi(w) / den(w)`` with
``den(w) = (lambda_th^2 - w^2)(omega^2 - w^2 + i gamma w) - mu^2``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .gaussian_state import ThermalDiagnostics, diagnose
from .model import ModelParams
from .quadrature import Peak, integrate
from .spectral_moments import Covariance2

__all__ = [
    "DegenerateResonance",
    "NonMonotoneSequence",
    "ThermometerResult",
    "exact_poles",
    "extrapolate_mu_to_zero",
    "ground_state_covariance",
    "pole_shift",
    "s_zz",
    "thermometer_moments",
    "thermometer_temperature",
    "zpz_residual",
]

DEFAULT_TOL = 1e-12


class DegenerateResonance(UserWarning):
    pass


class NonMonotoneSequence(UserWarning):
    pass


@dataclass(frozen=True)
class ThermometerResult:
    mu: float
    zz: float
    pzpz: float
    zpz: float
    diagnostics: ThermalDiagnostics
    err_estimate: float = 0.0

    @property
    def covariance(self) -> Covariance2:
        return Covariance2(self.zz, self.zpz, self.pzpz)


def _require_thermometer(p: ModelParams) -> float:
    if p.lambda_th is None:
        raise ValueError("model has no thermometer (lambda_th is unset)")
    return p.lambda_th


def _den2(w, p: ModelParams):
    lam = p.lambda_th
    a = (lam - w) * (lam + w)  # keeps precision next to the pole
    b = (p.omega - w) * (p.omega + w)
    return (a * b - p.mu**2) ** 2 + (a * p.gamma * w) ** 2


def s_zz(omega, p: ModelParams, prefactor: float = 1.0):
    """Spectral density of ``<z^2>`` on ``omega >= 0``.

    ``prefactor`` scales the overall ``mu^2 eps^2 / (2 pi)``; 2.0 gives the
    printed variant.
    """
    _require_thermometer(p)
    w = np.asarray(omega, dtype=float)
    out = prefactor * p.mu**2 * p.eps**2 / (2 * math.pi) * w / _den2(w, p)
    return float(out) if out.ndim == 0 else out


def exact_poles(p: ModelParams) -> np.ndarray:
    """Complex roots of ``den(w)``, sorted by real part."""
    lam = _require_thermometer(p)
    g = p.gamma
    coeffs = [1.0, -1j * g, -(lam**2 + p.omega**2), 1j * g * lam**2, lam**2 * p.omega**2 - p.mu**2]
    roots = np.roots(coeffs)

    def den(w):
        return (lam**2 - w * w) * (p.omega**2 - w * w + 1j * g * w) - p.mu**2

    def dden(w):
        return -2 * w * (p.omega**2 - w * w + 1j * g * w) + (lam**2 - w * w) * (-2 * w + 1j * g)

    polished = []
    for r in roots:
        for _ in range(3):
            d = dden(r)
            if d == 0:
                break
            r = r - den(r) / d
        polished.append(r)
    return np.array(sorted(polished, key=lambda z: (z.real, z.imag)))


def pole_shift(p: ModelParams, form: str = "printed") -> complex:
    """First-order displacement of the thermometer resonance from ``lambda_th``.

    ``form="printed"`` uses ``mu^2 / (2 lam (lam^2 - omega^2 - i eps^2/2))``;
    ``form="rederived"`` carries the damping term as ``i gamma lam``. The sign
    of the imaginary part is chosen so that it is the (positive) half-width.
    """
    lam = _require_thermometer(p)
    if abs(lam - p.omega) < 10 * p.gamma:
        warnings.warn(
            f"|lambda_th - omega| = {abs(lam - p.omega):g} < 10*gamma = {10 * p.gamma:g}; "
            "first-order pole shift is unreliable",
            DegenerateResonance,
            stacklevel=2,
        )
    if p.mu == 0:
        return 0j
    if form == "printed":
        damp = p.eps**2 / 2
    elif form == "rederived":
        damp = p.gamma * lam
    else:
        raise ValueError(f"unknown form {form!r}")
    return p.mu**2 / (2 * lam * (lam**2 - p.omega**2 - 1j * damp))


def _hints(p: ModelParams) -> list[Peak]:
    return [Peak(r.real, abs(r.imag)) for r in exact_poles(p) if r.real > 0 and r.imag != 0]


def ground_state_covariance(p: ModelParams) -> Covariance2:
    """Reduced ``z`` covariance in the joint ground state of the two coupled
    oscillators with the bath removed."""
    lam = _require_thermometer(p)
    k = np.array([[p.omega**2, -p.mu], [-p.mu, lam**2]])
    evals, vecs = np.linalg.eigh(k)
    if evals.min() <= 0:
        raise ValueError("coupled oscillators are unstable")
    w = np.sqrt(evals)
    xx = vecs @ np.diag(0.5 / w) @ vecs.T
    pp = vecs @ np.diag(0.5 * w) @ vecs.T
    return Covariance2(float(xx[1, 1]), 0.0, float(pp[1, 1]))


def thermometer_moments(p: ModelParams, tol: float = DEFAULT_TOL, prefactor: float = 1.0) -> ThermometerResult:
    lam = _require_thermometer(p)
    if p.mu == 0:
        c = Covariance2(0.5 / lam, 0.0, 0.5 * lam)
        return ThermometerResult(0.0, c.qq, c.pp, 0.0, diagnose(c))
    if p.eps == 0:
        c = ground_state_covariance(p)
        return ThermometerResult(p.mu, c.qq, c.pp, 0.0, diagnose(c))
    hints = _hints(p)
    zz = integrate(lambda w: s_zz(w, p, prefactor), 0.0, math.inf, tol, hints)
    pz = integrate(lambda w: w * w * s_zz(w, p, prefactor), 0.0, math.inf, tol, hints)
    c = Covariance2(zz.value, 0.0, pz.value)
    return ThermometerResult(p.mu, zz.value, pz.value, 0.0, diagnose(c), zz.err_estimate + pz.err_estimate)


def zpz_residual(p: ModelParams, tol: float = 1e-14) -> float:
    """Full-line integral of the odd density behind ``<z p_z + p_z z>/2``."""
    hints = _hints(p)
    mirrored = [Peak(-h.center, h.width) for h in hints]

    def odd(w):
        return 0.5 * w * s_zz(abs(w), p)

    neg = integrate(odd, -1e4, 0.0, tol, mirrored, strict=False).value
    pos = integrate(odd, 0.0, 1e4, tol, hints, strict=False).value
    return abs(neg + pos)


def thermometer_temperature(p: ModelParams, tol: float = DEFAULT_TOL) -> ThermalDiagnostics:
    return thermometer_moments(p, tol).diagnostics


def _richardson(mu2: np.ndarray, ys: np.ndarray) -> tuple[float, float]:
    n = len(mu2)
    coef = np.polyfit(mu2, ys, n - 1)
    limit = float(coef[-1])
    if n >= 3:
        lower = float(np.polyfit(mu2, ys, n - 2)[-1])
        resid = abs(limit - lower)
    else:
        resid = abs(limit - ys[np.argmin(mu2)])
    return limit, resid


def extrapolate_mu_to_zero(results: Sequence[ThermometerResult]) -> dict:
    """Polynomial (Richardson) extrapolation in ``mu^2`` to ``mu = 0``.

    Needs at least three distinct couplings. ``residual`` is the change in the
    limit when the highest-order term is dropped.
    """
    if len(results) < 3:
        raise ValueError("need at least 3 results")
    mus = np.array([r.mu for r in results], dtype=float)
    if len(set(mus.tolist())) != len(mus):
        raise ValueError("coupling values must be distinct")
    order = np.argsort(mus)
    mu2 = mus[order] ** 2
    out = {}
    for name in ("zz", "pzpz"):
        ys = np.array([getattr(results[i], name) for i in order])
        diffs = np.diff(ys)
        if not (np.all(diffs >= 0) or np.all(diffs <= 0)):
            warnings.warn(f"{name} is not monotone in mu", NonMonotoneSequence, stacklevel=2)
        out[name], out[f"{name}_residual"] = _richardson(mu2, ys)
    c = Covariance2(out["zz"], 0.0, out["pzpz"])
    out["zpz"] = 0.0
    out["diagnostics"] = diagnose(c)
    return out
