"""Stationary spectra and second moments of the bath-coupled oscillator.

The oscillator obeys ``q'' + gamma q' + omega^2 q = eps * dphi0/dt(t, 0)`` with
``gamma = eps^2 / 2`` and the incoming field in its vacuum. With the response
``chi(w) = 1 / (omega^2 - w^2 + i gamma w)`` the positive-frequency density of
``<q^2>`` is ``eps^2 / (2 pi) * w * |chi(w)|^2``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .model import ModelParams, Regime, classify_regime
from .quadrature import Peak, integrate, integrate_phase

__all__ = [
    "ClosedFormUndefined",
    "Covariance2",
    "SpectralDensity",
    "TailClass",
    "autocorrelation_q",
    "closed_forms_report",
    "covariance",
    "log_coefficient",
    "moment_pp",
    "moment_qp",
    "moment_qp_residual",
    "moment_qq",
    "moment_qq_printed_integrand",
    "qq_closed_form",
    "qq_small_eps",
    "resonance_hints",
    "s_pp",
    "s_qq",
]

DEFAULT_TOL = 1e-10


class ClosedFormUndefined(ValueError):
    pass


class TailClass(enum.Enum):
    INTEGRABLE = "integrable"
    LOG_DIVERGENT = "log_divergent"


@dataclass(frozen=True)
class Covariance2:
    """One-mode second moments: ``qq = <q^2>``, ``qp = <qp+pq>/2``, ``pp = <p^2>``."""

    qq: float
    qp: float
    pp: float

    @property
    def det(self) -> float:
        return self.qq * self.pp - self.qp * self.qp

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.qq, self.qp], [self.qp, self.pp]])

    @classmethod
    def from_matrix(cls, m) -> "Covariance2":
        m = np.asarray(m, dtype=float)
        return cls(float(m[0, 0]), float(0.5 * (m[0, 1] + m[1, 0])), float(m[1, 1]))

    def transformed(self, s) -> "Covariance2":
        """Covariance of ``(q', p') = s @ (q, p)`` for a 2x2 matrix ``s``."""
        s = np.asarray(s, dtype=float)
        return Covariance2.from_matrix(s @ self.as_matrix() @ s.T)


def _abs_chi2(w, p: ModelParams):
    d = (p.omega - w) * (p.omega + w)
    return 1.0 / (d * d + (p.gamma * w) ** 2)


def s_qq(omega, p: ModelParams):
    """Spectral density of ``<q^2>`` on ``omega >= 0``."""
    w = np.asarray(omega, dtype=float)
    out = p.eps**2 / (2 * math.pi) * w * _abs_chi2(w, p)
    return float(out) if out.ndim == 0 else out


def s_pp(omega, p: ModelParams):
    w = np.asarray(omega, dtype=float)
    out = p.eps**2 / (2 * math.pi) * w**3 * _abs_chi2(w, p)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SpectralDensity:
    kind: str
    params: ModelParams

    @property
    def tail_class(self) -> TailClass:
        return TailClass.LOG_DIVERGENT if self.kind == "Spp" else TailClass.INTEGRABLE

    def __call__(self, omega):
        if self.kind == "Sqq":
            return s_qq(omega, self.params)
        if self.kind == "Spp":
            return s_pp(omega, self.params)
        if self.kind == "Szz":
            from .thermometer import s_zz

            return s_zz(omega, self.params)
        raise ValueError(f"unknown spectral density {self.kind!r}")


def resonance_hints(p: ModelParams) -> list[Peak]:
    """Location and half-width of the damped resonance (empty when overdamped)."""
    disc = p.omega**2 - 0.25 * p.gamma**2
    if disc <= 0 or p.gamma == 0:
        return []
    return [Peak(math.sqrt(disc), 0.5 * p.gamma)]


def moment_qq(p: ModelParams, tol: float = DEFAULT_TOL) -> float:
    """Stationary ``<q^2>``; cutoff-free (the tail falls as ``omega^-3``)."""
    if p.eps == 0:
        return 0.5 / p.omega
    return integrate(lambda w: s_qq(w, p), 0.0, math.inf, tol, resonance_hints(p)).value


def moment_qq_result(p: ModelParams, tol: float = DEFAULT_TOL):
    return integrate(lambda w: s_qq(w, p), 0.0, math.inf, tol, resonance_hints(p))


def moment_qq_printed_integrand(p: ModelParams, tol: float = DEFAULT_TOL) -> float:
    """``<q^2>`` with the ``omega^2`` numerator as it appears in print."""
    if p.eps == 0:
        return 0.5 / p.omega

    def f(w):
        return p.eps**2 / (2 * math.pi) * w * w * _abs_chi2(w, p)

    return integrate(f, 0.0, math.inf, tol, resonance_hints(p)).value


def moment_qp(p: ModelParams) -> float:
    # The symmetrized two-time function is even in the time lag, so its
    # derivative at zero lag vanishes.
    return 0.0


def moment_qp_residual(p: ModelParams, tol: float = 1e-13) -> float:
    """Full-line integral of the odd density ``omega * S(omega)`` giving ``<qp+pq>/2``.

    The stationary symmetrized correlator is ``int_R |w| S(|w|) e^{i w tau}`` so
    ``<qp+pq>/2 = int_R i w * (|w| |chi|^2 eps^2/4pi) dw``; returns its magnitude.
    """
    if p.eps == 0:
        return 0.0
    hints = resonance_hints(p)
    mirrored = [Peak(-h.center, h.width) for h in hints]

    def odd(w):
        return 0.5 * w * s_qq(abs(w), p)

    neg = integrate(odd, -p.cutoff, 0.0, tol, mirrored, strict=False).value
    pos = integrate(odd, 0.0, p.cutoff, tol, hints, strict=False).value
    return abs(neg + pos)


def moment_pp(p: ModelParams, tol: float = DEFAULT_TOL, cutoff: float | None = None) -> float:
    """Stationary ``<p^2>`` integrated up to the sharp cutoff."""
    top = p.cutoff if cutoff is None else float(cutoff)
    if p.eps == 0:
        return 0.5 * p.omega
    return integrate(lambda w: s_pp(w, p), 0.0, top, tol, resonance_hints(p)).value


def covariance(p: ModelParams, tol: float = DEFAULT_TOL) -> Covariance2:
    return Covariance2(moment_qq(p, tol), moment_qp(p), moment_pp(p, tol))


def log_coefficient(p: ModelParams, cutoffs=(1e2, 1e3, 1e4), tol: float = DEFAULT_TOL) -> dict:
    """Least-squares fit of ``moment_pp`` against ``ln(cutoff)``.

    ``cutoffs`` are in units of ``omega``. Returns slope, intercept and ``r2``.
    """
    xs = np.log(np.asarray(cutoffs, dtype=float) * p.omega)
    ys = np.array([moment_pp(p, tol, cutoff=math.exp(x)) for x in xs])
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = ys - (slope * xs + intercept)
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return {"slope": float(slope), "intercept": float(intercept), "r2": r2, "values": ys.tolist()}


def autocorrelation_q(p: ModelParams, tau: float, tol: float = DEFAULT_TOL) -> float:
    """Symmetrized two-time function ``<q(t)q(t+tau) + q(t+tau)q(t)>``."""
    k = abs(float(tau))
    if p.eps == 0:
        return math.cos(p.omega * k) / p.omega
    res = integrate_phase(lambda w: 2.0 * s_qq(w, p), k, 0.0, math.inf, tol, resonance_hints(p))
    return float(res.value.real)


# -- closed forms --------------------------------------------------------------


def _quadratic(p: ModelParams):
    # int dy / (y^2 - b y + c) with y = omega^2
    b = 2 * p.omega**2 - p.gamma**2
    c = p.omega**4
    return b, c, 4 * c - b * b


def _inv_quadratic_integral(p: ModelParams, upper: float = math.inf) -> float:
    b, c, disc = _quadratic(p)
    if disc > 0:
        s = math.sqrt(disc)
        top = math.pi / 2 if math.isinf(upper) else math.atan((2 * upper - b) / s)
        return 2.0 / s * (top + math.atan(b / s))
    if disc < 0:
        r = math.sqrt(-disc)
        yp, ym = 0.5 * (b + r), 0.5 * (b - r)
        at_top = 0.0 if math.isinf(upper) else math.log((upper - yp) / (upper - ym))
        return (at_top - math.log(yp / ym)) / (yp - ym)
    raise ClosedFormUndefined("critical damping: closed forms divide by zero")


def qq_closed_form(p: ModelParams) -> float:
    """Exact ``<q^2>`` by partial fractions in ``y = omega^2``."""
    if p.eps == 0:
        return 0.5 / p.omega
    return p.eps**2 / (4 * math.pi) * _inv_quadratic_integral(p)


def pp_closed_form(p: ModelParams, cutoff: float | None = None) -> float:
    """Exact ``<p^2>`` with a sharp cutoff."""
    if p.eps == 0:
        return 0.5 * p.omega
    top = p.cutoff if cutoff is None else cutoff
    b, c, _ = _quadratic(p)
    y = top * top
    qq_cut = p.eps**2 / (4 * math.pi) * _inv_quadratic_integral(p, y)
    return p.eps**2 / (8 * math.pi) * math.log((y * y - b * y + c) / c) + 0.5 * b * qq_cut


def pp_asymptotic(p: ModelParams, qq: float | None = None) -> float:
    """Large-cutoff form ``(omega^2 - eps^4/8) <q^2> + eps^2/(2 pi) ln(cutoff/omega)``."""
    qq = qq_closed_form(p) if qq is None else qq
    return (p.omega**2 - p.eps**4 / 8) * qq + p.eps**2 / (2 * math.pi) * math.log(p.cutoff / p.omega)


def qq_small_eps(p: ModelParams) -> float:
    """Leading weak-coupling terms: ``1/(2 omega) - eps^2/(4 pi omega^2)``.

    The first correction is second order in ``eps``, from the ``-2/b`` part of
    the exact arctangent form.
    """
    return 0.5 / p.omega - p.eps**2 / (4 * math.pi * p.omega**2)


def qq_printed_underdamped(p: ModelParams) -> float:
    e2, om = p.eps**2, p.omega
    root = math.sqrt(e2 * e2 * om * om - e2**4 / 16)
    arg = 2 * e2 * math.sqrt(16 * om * om - e2 * e2) / (8 * om * om - e2 * e2)
    return e2 / (2 * math.pi) / root * (2 * math.pi - 2 * math.atan(arg))


def qq_printed_overdamped(p: ModelParams) -> float:
    """As printed; ``nan`` where the root or logarithm has no real value."""
    e2, om = p.eps**2, p.omega
    pre = e2 / 16 - om * om
    inner = e2 * e2 - 16 * om * om
    if pre <= 0 or inner < 0:
        return math.nan
    s = math.sqrt(inner)
    num, den = inner + 2 * e2 * s, inner - 2 * e2 * s
    if num / den <= 0:
        return math.nan
    return 1 / math.sqrt(pre) * math.log(num / den)


def pp_printed(p: ModelParams, qq: float) -> float:
    return (2 * p.omega**2 - p.eps**4 / 4) * qq + 2 * p.eps**2 / math.pi * math.log(p.cutoff / p.omega)


def closed_forms_report(p: ModelParams, tol: float = DEFAULT_TOL) -> dict:
    """Printed closed forms, exact rederived forms and quadrature, side by side.

    Quadrature is the reference column; the closed forms are never used as
    ground truth elsewhere.
    """
    regime = classify_regime(p)
    if regime is Regime.CRITICAL and p.eps > 0:
        raise ClosedFormUndefined("closed forms are undefined at critical damping (eps^2 == 4 omega)")
    quad_qq = moment_qq(p, tol)
    quad_pp = moment_pp(p, tol)
    if p.eps == 0:
        printed_qq = rederived_qq = 0.5 / p.omega
        printed_pp = rederived_pp = 0.5 * p.omega
        printed_form = "decoupled"
    else:
        if regime is Regime.UNDERDAMPED:
            printed_qq = qq_printed_underdamped(p)
            printed_form = "underdamped atan form"
        else:
            printed_qq = qq_printed_overdamped(p)
            printed_form = "overdamped log form"
        rederived_qq = qq_closed_form(p)
        printed_pp = pp_printed(p, printed_qq) if math.isfinite(printed_qq) else math.nan
        rederived_pp = pp_closed_form(p)
    rows = [
        {"quantity": "qq", "printed": printed_qq, "rederived": rederived_qq, "quadrature": quad_qq},
        {"quantity": "pp", "printed": printed_pp, "rederived": rederived_pp, "quadrature": quad_pp},
        {
            "quantity": "pp_asymptotic",
            "printed": printed_pp,
            "rederived": pp_asymptotic(p) if p.eps > 0 else 0.5 * p.omega,
            "quadrature": quad_pp,
        },
        {"quantity": "small_eps_qq", "printed": 0.5 / p.omega, "rederived": qq_small_eps(p), "quadrature": quad_qq},
    ]
    return {"regime": regime.value, "printed_form": printed_form, "rows": rows}
