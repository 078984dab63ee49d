"""The record every bound check returns."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Any


def _to_float(x) -> float:
    try:
        return float(x)
    except OverflowError:
        return math.inf if x > 0 else -math.inf


def _log(x) -> float:
    if x <= 0:
        return -math.inf
    if isinstance(x, int):
        return math.log(x)
    if isinstance(x, Fraction):
        return math.log(x.numerator) - math.log(x.denominator)
    return math.log(x)


@dataclass(frozen=True)
class BoundReport:
    """One verified inequality ``lhs <= rhs`` (or ``lhs < rhs`` when strict).

    ``holds`` is decided exactly when both sides are rationals, otherwise in
    floating point against ``params["tolerance"]``. Extra measured values ride
    along in ``params``.
    """

    label: str
    lhs: float
    rhs: float
    ratio: float
    holds: bool
    params: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def compare(cls, label: str, lhs, rhs, *, tol: float = 0.0, strict: bool = False,
                **params) -> "BoundReport":
        if isinstance(lhs, Rational) and isinstance(rhs, Rational) and tol == 0:
            lhs_q, rhs_q = Fraction(lhs), Fraction(rhs)
            holds = lhs_q < rhs_q if strict else lhs_q <= rhs_q
            if rhs_q != 0:
                ratio = _to_float(lhs_q / rhs_q)
            else:
                ratio = math.inf if lhs_q > 0 else math.nan
        else:
            lf, rf = _to_float(lhs), _to_float(rhs)
            holds = lf < rf + tol if strict else lf <= rf + tol
            ratio = lf / rf if rf != 0 else (math.inf if lf > 0 else math.nan)
        params = dict(params)
        params.setdefault("tolerance", float(tol))
        params.setdefault("strict", strict)
        return cls(label, _to_float(lhs), _to_float(rhs), ratio, bool(holds), params)

    @classmethod
    def compare_log(cls, label: str, lhs, log_rhs: float, *, strict: bool = False,
                    **params) -> "BoundReport":
        """Compare against a right side known only through its natural log."""
        log_lhs = _log(lhs)
        holds = log_lhs < log_rhs if strict else log_lhs <= log_rhs
        rhs = math.exp(log_rhs) if log_rhs < 709.0 else math.inf
        diff = log_lhs - log_rhs
        ratio = 0.0 if diff < -745.0 else math.exp(min(diff, 709.0))
        params = dict(params)
        params.setdefault("log_rhs", log_rhs)
        params.setdefault("tolerance", 0.0)
        params.setdefault("strict", strict)
        return cls(label, _to_float(lhs), rhs, ratio, bool(holds), params)

    @property
    def err(self) -> float:
        return float(self.params.get("err", 0.0))
