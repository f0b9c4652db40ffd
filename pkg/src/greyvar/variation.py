"""Dyadic and uniform-grid p-variation statistics and regime classification.

The sum V = sum_j |x(t_j) - x(t_{j-1})|^p over consecutive grid points is
the workhorse; on nested dyadic grids its level sequence diagnoses the
three regimes (vanishing, exploding, critical) controlled by the sign of
p*alpha/2 - 1.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

import numpy as np

from .errors import InputError, ParameterError
from .params import GreyParams
from .sampling import DyadicGrid, SamplePath, UniformGrid
from .special import theoretical_variation_limit

__all__ = [
    "VariationRecord",
    "Regime",
    "TrichotomyLabel",
    "p_variation_sum",
    "renormalized_statistic",
    "variation_trichotomy",
    "variation_sequence",
    "hoelder_dominance_bound",
]

# |p*alpha/2 - 1| below this is treated as the exact critical exponent
# (alpha arrives as a float).
CRITICAL_EXPONENT_TOL = 1e-12


@dataclass(frozen=True)
class VariationRecord:
    """One variation sum: grid resolution, exponent, and value."""

    level_or_n: int
    p: float
    value: float

    def __post_init__(self):
        if self.p <= 0.0:
            raise ParameterError("p must be positive")
        if self.value < 0.0:
            raise ParameterError("variation value cannot be negative")


class Regime(enum.Enum):
    ZERO = "zero"
    INFINITE = "infinite"
    CRITICAL_FINITE = "critical-finite"


@dataclass(frozen=True)
class TrichotomyLabel:
    """Limit regime of the dyadic p-variation, with the mean critical
    limit attached in the finite case."""

    regime: Regime
    limit: Optional[float] = None

    def __post_init__(self):
        if self.regime is Regime.CRITICAL_FINITE:
            if self.limit is None or self.limit <= 0.0:
                raise ParameterError("critical regime carries a positive limit")
        elif self.limit is not None:
            raise ParameterError("only the critical regime carries a limit")


def _require_min_points(path: SamplePath) -> None:
    if len(path.values) < 2:
        raise InputError("path needs at least two points")


def p_variation_sum(path: SamplePath, p: float) -> VariationRecord:
    """Sum of |increment|^p over consecutive grid points."""
    if p <= 0.0:
        raise ParameterError(f"p must be positive, got {p}")
    _require_min_points(path)
    inc = np.abs(path.increments())
    value = float(np.sum(inc ** p))
    level_or_n = path.grid.level if isinstance(path.grid, DyadicGrid) else path.grid.n
    return VariationRecord(level_or_n=level_or_n, p=p, value=value)


def renormalized_statistic(path: SamplePath, p: float, alpha: float) -> float:
    """n^(p*alpha/2 - 1) times the p-variation sum on a uniform n-grid.

    The rescaling makes the statistic converge (in law) for every p, with
    mean equal to the corresponding absolute moment at the critical p.
    """
    if not isinstance(path.grid, UniformGrid):
        raise InputError("renormalized statistic is defined on uniform grids")
    if not (0.0 < alpha < 2.0):
        raise ParameterError(f"alpha must lie in (0, 2), got {alpha}")
    record = p_variation_sum(path, p)
    n = path.grid.n
    return float(n ** (p * alpha / 2.0 - 1.0) * record.value)


def variation_trichotomy(alpha: float, beta: float, p: float) -> TrichotomyLabel:
    """Classify the limiting regime of the dyadic p-variation sums.

    Vanishes for p*alpha/2 > 1, diverges for p*alpha/2 < 1, and at the
    critical exponent p = 2/alpha has a finite positive limit whose mean
    is theoretical_variation_limit(alpha, beta).
    """
    params = GreyParams(alpha, beta)
    if p <= 0.0:
        raise ParameterError(f"p must be positive, got {p}")
    gap = p * alpha / 2.0 - 1.0
    if abs(gap) <= CRITICAL_EXPONENT_TOL:
        return TrichotomyLabel(Regime.CRITICAL_FINITE, theoretical_variation_limit(params))
    if gap > 0.0:
        return TrichotomyLabel(Regime.ZERO)
    return TrichotomyLabel(Regime.INFINITE)


def variation_sequence(
    path: SamplePath, p: float, levels: Iterable[int]
) -> List[VariationRecord]:
    """Variation sums of one dyadic path coarsened to each requested level.

    Coarsening subsamples every 2^(N-n)-th point of the level-N path, so
    the records live on the nested dyadic partitions of a single path.
    """
    top = path.dyadic_level
    _require_min_points(path)
    if p <= 0.0:
        raise ParameterError(f"p must be positive, got {p}")
    records = []
    for level in levels:
        if not (0 <= level <= top):
            raise InputError(f"level {level} outside [0, {top}]")
        step = 2 ** (top - level)
        sub = path.values[::step]
        inc = np.abs(np.diff(sub))
        records.append(
            VariationRecord(level_or_n=level, p=p, value=float(np.sum(inc ** p)))
        )
    return records


def hoelder_dominance_bound(
    path: SamplePath, p: float, q: float
) -> Tuple[float, float]:
    """Factor pair (max|increment|^(q-p), p-variation value).

    Their product bounds the q-variation sum at the same resolution, with
    equality when all increments share one magnitude.
    """
    if not (q > p > 0.0):
        raise ParameterError(f"need q > p > 0, got p={p}, q={q}")
    _require_min_points(path)
    inc = np.abs(path.increments())
    sup_factor = float(np.max(inc) ** (q - p))
    p_value = float(np.sum(inc ** p))
    return sup_factor, p_value
