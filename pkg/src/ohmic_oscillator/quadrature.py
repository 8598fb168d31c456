"""Adaptive quadrature on finite and semi-infinite frequency ranges.

QUADPACK (via :func:`scipy.integrate.quad`) does the per-panel work. This
module decides the panels: breakpoints are laid geometrically around known
resonances so that Lorentzians much narrower than the range are resolved,
and oscillatory integrands get panels whose count grows with the phase rate.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import integrate as _si

__all__ = [
    "NoConvergence",
    "NonIntegrableTail",
    "Peak",
    "QuadResult",
    "integrate",
    "integrate_phase",
]

# Geometric spacing of the breakpoints around a resonance, in units of its width.
_PEAK_RATIO = 4.0
_PEAK_SPAN = 60
_LIMIT = 200
# Past this multiple of the tail start an omega^-2 integrand contributes < 1e-15 relative.
_SLOW_PHASE_SPAN = 1e15


class NoConvergence(RuntimeError):
    pass


class NonIntegrableTail(ValueError):
    pass


@dataclass(frozen=True)
class Peak:
    center: float
    width: float


@dataclass(frozen=True)
class QuadResult:
    value: float | complex
    err_estimate: float
    panels: int
    converged: bool

    def __float__(self) -> float:
        return float(np.real(self.value))


def _as_peaks(hints) -> list[Peak]:
    peaks = []
    for h in hints or ():
        c, w = (h.center, h.width) if isinstance(h, Peak) else h
        if math.isfinite(c) and w > 0:
            peaks.append(Peak(float(c), float(w)))
    return peaks


def _breakpoints(lo: float, hi: float, peaks: Sequence[Peak]) -> list[float]:
    pts = {lo, hi}
    for pk in peaks:
        if lo < pk.center < hi:
            pts.add(pk.center)
        d = pk.width
        for _ in range(_PEAK_SPAN):
            for x in (pk.center - d, pk.center + d):
                if lo < x < hi:
                    pts.add(x)
            d *= _PEAK_RATIO
            if pk.center - d < lo and pk.center + d > hi:
                break
    return sorted(pts)


def _tail_start(lo: float, peaks: Sequence[Peak]) -> float:
    far = [pk.center + 50.0 * pk.width for pk in peaks]
    start = max([lo + 1.0] + far)
    return start


def _check_tail(f: Callable[[float], float], start: float) -> None:
    # Require omega^1.5 |f| to decrease far out: rules out 1/omega-type tails.
    a, b = max(10.0 * start, 1e4), max(1000.0 * start, 1e6)
    fa, fb = abs(f(a)), abs(f(b))
    if not (np.isfinite(fa) and np.isfinite(fb)):
        raise NonIntegrableTail(f"integrand is not finite at omega={a:g} or {b:g}")
    if fb * b**1.5 > fa * a**1.5 and fb > 0:
        raise NonIntegrableTail("integrand decays slower than omega^-1.5")


def _quad(f, a, b, tol, rtol, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", _si.IntegrationWarning)
        out = _si.quad(f, a, b, epsabs=tol, epsrel=rtol, limit=_LIMIT, full_output=1, **kw)
    value, err, info = out[0], out[1], out[2]
    panels = max(1, int(info.get("last", info.get("lst", 1))))
    return value, err, panels


def integrate(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-10,
    hints: Iterable = (),
    rtol: float = 1e-12,
    strict: bool = True,
) -> QuadResult:
    """Integrate a real ``f`` over ``[lo, hi]``; ``hi`` may be ``math.inf``.

    ``hints`` are ``Peak`` (or ``(center, width)``) resonances around which
    panels are refined. Semi-infinite ranges are split at a finite point past
    the last resonance; the remainder goes through QUADPACK's ``x = a + (1-t)/t``
    map. ``tol`` is the absolute error target for the whole integral.
    """
    if not hi > lo:
        if hi == lo:
            return QuadResult(0.0, 0.0, 0, True)
        r = integrate(f, hi, lo, tol, hints, rtol, strict)
        return QuadResult(-r.value, r.err_estimate, r.panels, r.converged)
    peaks = _as_peaks(hints)
    infinite = math.isinf(hi)
    top = _tail_start(lo, peaks) if infinite else hi
    pts = _breakpoints(lo, top, peaks)
    n = len(pts) - 1 + (1 if infinite else 0)
    atol = tol / max(n, 1)
    total, err, panels = 0.0, 0.0, 0
    for a, b in zip(pts[:-1], pts[1:]):
        v, e, k = _quad(f, a, b, atol, rtol)
        total += v
        err += e
        panels += k
    if infinite:
        _check_tail(f, top)
        v, e, k = _quad(f, top, math.inf, atol, rtol)
        total += v
        err += e
        panels += k
    converged = err <= max(tol, rtol * abs(total))
    if strict and not converged:
        raise NoConvergence(f"error estimate {err:.3g} exceeds tolerance {tol:.3g} after {panels} panels")
    return QuadResult(float(total), float(err), panels, bool(converged))


def integrate_phase(
    f: Callable[[float], complex],
    k: float,
    lo: float,
    hi: float,
    tol: float = 1e-10,
    hints: Iterable = (),
    rtol: float = 1e-12,
    strict: bool = True,
) -> QuadResult:
    """Integrate ``f(omega) * exp(1j * k * omega)`` over ``[lo, hi]``.

    ``f`` may return complex values. With ``k == 0`` this is the plain
    :func:`integrate` path applied to the real and imaginary parts. For
    ``k > 0`` each panel uses QUADPACK's cos/sin-weighted rules; finite ranges
    are cut into at least ``k * (hi - lo) / (2*pi)`` panels (one per phase
    cycle), and a semi-infinite tail uses the Fourier-integral rule.
    """
    if k < 0:
        raise ValueError("phase rate k must be >= 0")

    def fr(w):
        return float(np.real(f(w)))

    def fi(w):
        return float(np.imag(f(w)))

    imag_zero = _is_real_valued(f, lo, hi)
    if k == 0:
        re = integrate(fr, lo, hi, tol, hints, rtol, strict)
        if imag_zero:
            return QuadResult(complex(re.value, 0.0), re.err_estimate, re.panels, re.converged)
        im = integrate(fi, lo, hi, tol, hints, rtol, strict)
        return QuadResult(
            complex(re.value, im.value),
            re.err_estimate + im.err_estimate,
            re.panels + im.panels,
            re.converged and im.converged,
        )

    peaks = _as_peaks(hints)
    infinite = math.isinf(hi)
    top = _tail_start(lo, peaks) if infinite else hi
    pts = set(_breakpoints(lo, top, peaks))
    ncycles = int(math.ceil(k * (top - lo) / (2 * math.pi)))
    pts.update(np.linspace(lo, top, max(ncycles, 1) + 1).tolist())
    pts = sorted(pts)
    pieces = [(fr, "cos", 1.0), (fr, "sin", 1j)]
    if not imag_zero:
        pieces += [(fi, "cos", 1j), (fi, "sin", -1.0)]
    edges = []
    if infinite and k * top < 1.0:
        # Fourier-integral rule needs cycles of length pi/k; below phase 1 the
        # integrand is not oscillatory, so cover [top, 1/k] with plain panels.
        stop = min(1.0 / k, top * _SLOW_PHASE_SPAN)
        edges = np.geomspace(top, stop, max(2, int(math.ceil(math.log10(stop / top))) + 1)).tolist()
    n = (len(pts) - 1 + (1 if infinite else 0)) * len(pieces) + 2 * max(len(edges) - 1, 0)
    atol = tol / max(n, 1)
    total, err, panels = 0j, 0.0, 0
    for a, b in zip(pts[:-1], pts[1:]):
        for g, weight, factor in pieces:
            v, e, m = _quad(g, a, b, atol, rtol, weight=weight, wvar=k)
            total += factor * v
            err += e
            panels += m
    if infinite:
        _check_tail(lambda w: abs(f(w)), top)
        start = top
        if edges:
            slow = [
                lambda w: float((f(w) * np.exp(1j * k * w)).real),
                lambda w: float((f(w) * np.exp(1j * k * w)).imag),
            ]
            for a, b in zip(edges[:-1], edges[1:]):
                for g, factor in zip(slow, (1.0, 1j)):
                    v, e, m = _quad(g, a, b, atol, rtol)
                    total += factor * v
                    err += e
                    panels += m
            start = edges[-1]
        if start < top * _SLOW_PHASE_SPAN:
            for g, weight, factor in pieces:
                # QAWF takes no relative tolerance; epsabs only.
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", _si.IntegrationWarning)
                    out = _si.quad(g, start, math.inf, weight=weight, wvar=k, epsabs=atol, limlst=100, full_output=1)
                v, e = out[0], out[1]
                total += factor * v
                err += e
                panels += int(out[2].get("lst", 1))
    converged = err <= max(tol, rtol * abs(total))
    if strict and not converged:
        raise NoConvergence(f"error estimate {err:.3g} exceeds tolerance {tol:.3g} after {panels} panels")
    return QuadResult(complex(total), float(err), panels, bool(converged))


def _is_real_valued(f, lo, hi) -> bool:
    top = hi if math.isfinite(hi) else lo + 10.0
    probe = np.linspace(lo, top, 7)[1:-1]
    return all(np.imag(f(float(w))) == 0 for w in probe)
