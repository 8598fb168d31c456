"""Physical parameters of the oscillator, bath coupling and thermometer."""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import asdict, dataclass
from typing import Any, Mapping

__all__ = [
    "ModelParams",
    "ModelValidationError",
    "Regime",
    "Violation",
    "classify_regime",
    "validate",
]


class Regime(enum.Enum):
    UNDERDAMPED = "underdamped"
    CRITICAL = "critical"
    OVERDAMPED = "overdamped"


@dataclass(frozen=True)
class Violation:
    code: str
    field: str
    message: str


class ModelValidationError(ValueError):
    """Raised with every violated parameter invariant collected in ``violations``."""

    def __init__(self, violations: list[Violation]):
        self.violations = list(violations)
        lines = "; ".join(f"{v.code}({v.field}): {v.message}" for v in self.violations)
        super().__init__(lines)

    @property
    def codes(self) -> list[str]:
        return [v.code for v in self.violations]

    @property
    def fields(self) -> list[str]:
        return [v.field for v in self.violations]


def _check(omega, eps, cutoff, lambda_th, mu) -> list[Violation]:
    out = []
    if not omega > 0:
        out.append(Violation("NonPositiveFrequency", "omega", f"omega={omega} must be > 0"))
    if lambda_th is not None and not lambda_th > 0:
        out.append(Violation("NonPositiveFrequency", "lambda_th", f"lambda_th={lambda_th} must be > 0"))
    if not cutoff > 0:
        out.append(Violation("NonPositiveFrequency", "cutoff", f"cutoff={cutoff} must be > 0"))
    elif omega > 0 and not cutoff > omega:
        out.append(Violation("CutoffBelowResonance", "cutoff", f"cutoff={cutoff} must exceed omega={omega}"))
    if not eps >= 0:
        out.append(Violation("NegativeCoupling", "eps", f"eps={eps} must be >= 0"))
    if not mu >= 0:
        out.append(Violation("NegativeCoupling", "mu", f"mu={mu} must be >= 0"))
    if lambda_th is not None and lambda_th > 0 and omega > 0 and mu >= 0:
        if mu * mu >= omega * omega * lambda_th * lambda_th:
            out.append(
                Violation(
                    "ThermometerUnstable",
                    "mu",
                    f"mu^2={mu * mu:g} >= omega^2*lambda_th^2={(omega * lambda_th) ** 2:g}",
                )
            )
    if lambda_th is None and mu > 0:
        out.append(Violation("ThermometerUnstable", "lambda_th", "mu > 0 requires a thermometer frequency"))
    return out


@dataclass(frozen=True)
class ModelParams:
    """Oscillator frequency ``omega``, bath coupling ``eps``, sharp UV ``cutoff``,
    and optionally a thermometer of frequency ``lambda_th`` coupled with ``mu``.

    Units: hbar = k_B = 1, unit masses, unit field speed. The Ohmic damping rate
    is ``gamma = eps**2 / 2``.
    """

    omega: float = 1.0
    eps: float = 0.0
    cutoff: float = 1000.0
    lambda_th: float | None = None
    mu: float = 0.0

    def __post_init__(self):
        for name in ("omega", "eps", "cutoff", "mu"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.lambda_th is not None:
            object.__setattr__(self, "lambda_th", float(self.lambda_th))
        violations = _check(self.omega, self.eps, self.cutoff, self.lambda_th, self.mu)
        if violations:
            raise ModelValidationError(violations)
        scale = max(self.omega, self.eps**2)
        if self.cutoff < 10 * scale:
            warnings.warn(
                f"cutoff={self.cutoff:g} is below 10*max(omega, eps^2)={10 * scale:g}; "
                "log-divergent moments are not in their asymptotic regime",
                stacklevel=3,
            )

    @property
    def gamma(self) -> float:
        return 0.5 * self.eps**2

    @property
    def has_thermometer(self) -> bool:
        return self.lambda_th is not None

    def replace(self, **changes) -> "ModelParams":
        data = asdict(self)
        data.update(changes)
        return ModelParams(**data)

    def as_dict(self) -> dict[str, Any]:
        return asdict(self)


FIELDS = ("omega", "eps", "cutoff", "lambda_th", "mu")


def validate(raw: Mapping[str, Any] | ModelParams) -> ModelParams:
    """Build :class:`ModelParams` from a mapping, reporting all violations at once."""
    if isinstance(raw, ModelParams):
        return raw
    unknown = set(raw) - set(FIELDS)
    if unknown:
        raise ModelValidationError(
            [Violation("UnknownField", k, "not a model parameter") for k in sorted(unknown)]
        )
    values = {}
    bad = []
    for k, v in raw.items():
        if k == "lambda_th" and v is None:
            values[k] = None
            continue
        try:
            values[k] = float(v)
        except (TypeError, ValueError):
            bad.append(Violation("TypeMismatch", k, f"{v!r} is not a number"))
            continue
        if not math.isfinite(values[k]):
            bad.append(Violation("TypeMismatch", k, f"{v!r} is not finite"))
    if bad:
        raise ModelValidationError(bad)
    return ModelParams(**values)


def classify_regime(p: ModelParams) -> Regime:
    # exact comparison: the boundary eps^2 == 4*omega is Critical
    lhs, rhs = p.eps**2, 4.0 * p.omega
    if lhs < rhs:
        return Regime.UNDERDAMPED
    if lhs == rhs:
        return Regime.CRITICAL
    return Regime.OVERDAMPED
