"""Parameter estimation and two-candidate discrimination from one path.

The critical-exponent variation sum is the fingerprint statistic: its
level scaling identifies alpha, and its magnitude feeds a Gamma-function
inversion for beta.  Discrimination compares the observed critical sums
against each candidate's theoretical mean with a relative-distance rule.

Note that for beta < 1 the critical variation of a single path converges
to a nondegenerate random limit (the subordinator multiplies the whole
path), so per-path beta inference carries irreducible dispersion; see
estimate_beta_pooled for the across-path aggregate that concentrates.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq
from scipy.special import gamma as _gamma

from .errors import (
    EstimationError,
    InputError,
    NoSolutionError,
    ParameterError,
    PreconditionError,
)
from .params import GreyParams
from .sampling import SamplePath
from .special import GAMMA_ARGMIN, GAMMA_MIN, normal_abs_moment, theoretical_variation_limit
from .variation import p_variation_sum, variation_sequence

__all__ = [
    "Candidate",
    "DistinguishabilityResult",
    "distinguishability_check",
    "AlphaEstimate",
    "estimate_alpha",
    "BetaRegion",
    "BetaEstimate",
    "estimate_beta",
    "estimate_beta_pooled",
    "region_for",
    "Label",
    "Decision",
    "discriminate",
]

# Relative tolerance for treating two float parameters (or their Gamma
# values) as equal.
PARAM_REL_TOL = 1e-10


@dataclass(frozen=True)
class Candidate:
    """One hypothesized parameter pair with its derived fingerprint."""

    params: GreyParams
    mu: float = field(init=False)
    p_crit: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "mu", theoretical_variation_limit(self.params))
        object.__setattr__(self, "p_crit", self.params.p_critical)


@dataclass(frozen=True)
class DistinguishabilityResult:
    distinguishable: bool
    reason: str
    # whether both Gamma arguments beta/alpha + 1 sit on one side of the
    # Gamma minimum; None when alpha differs (the criterion is not needed)
    same_monotonicity_region: Optional[bool]

    def __bool__(self) -> bool:
        return self.distinguishable


def _isclose(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=PARAM_REL_TOL, abs_tol=0.0)


def distinguishability_check(c1: Candidate, c2: Candidate) -> DistinguishabilityResult:
    """Whether the variation fingerprint separates the two candidates.

    Different alpha always separates; equal alpha separates when the Gamma
    values Gamma(beta/alpha + 1) differ.  Equal-Gamma pairs with different
    beta are reported as not distinguishable by this method (no equivalence
    claim is made).
    """
    a1, b1 = c1.params.alpha, c1.params.beta
    a2, b2 = c2.params.alpha, c2.params.beta
    if not _isclose(a1, a2):
        return DistinguishabilityResult(True, "alpha differs", None)
    x1 = b1 / a1 + 1.0
    x2 = b2 / a2 + 1.0
    same_region = (x1 <= GAMMA_ARGMIN and x2 <= GAMMA_ARGMIN) or (
        x1 >= GAMMA_ARGMIN and x2 >= GAMMA_ARGMIN
    )
    if _isclose(b1, b2):
        return DistinguishabilityResult(False, "identical parameters", same_region)
    g1 = float(_gamma(x1))
    g2 = float(_gamma(x2))
    if _isclose(g1, g2):
        return DistinguishabilityResult(
            False,
            f"equal alpha and Gamma({x1:.6g}) = Gamma({x2:.6g}); "
            "not distinguishable by the variation fingerprint",
            same_region,
        )
    return DistinguishabilityResult(
        True, f"equal alpha, Gamma values differ ({g1:.6g} vs {g2:.6g})", same_region
    )


@dataclass(frozen=True)
class AlphaEstimate:
    alpha_hat: float
    std_error: float
    slope: float
    p: float
    levels: Tuple[int, int]
    boundary: bool


def estimate_alpha(
    path: SamplePath, p: float, level_range: Tuple[int, int]
) -> AlphaEstimate:
    """Scaling estimator: least-squares slope of log2 V_n against level n.

    The level sequence scales like 2^(n(1 - p*alpha/2)), so
    alpha_hat = 2(1 - slope)/p.  The path-global subordinator shifts every
    level equally and cancels from the slope.  Estimates outside (0, 2)
    are flagged, not clamped.
    """
    n_lo, n_hi = level_range
    top = path.dyadic_level
    if n_hi > top:
        raise InputError(f"level range top {n_hi} exceeds path level {top}")
    if n_hi - n_lo < 3:
        raise InputError("level range must span at least 3 octaves")
    if p <= 0.0:
        raise ParameterError(f"p must be positive, got {p}")
    levels = np.arange(n_lo, n_hi + 1)
    records = variation_sequence(path, p, levels)
    values = np.array([r.value for r in records])
    if np.any(values <= 0.0):
        raise EstimationError("variation sums vanish; scaling regression undefined")
    ys = np.log2(values)
    xs = levels.astype(float)
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = ys - (slope * xs + intercept)
    dof = len(xs) - 2
    sxx = float(np.sum((xs - xs.mean()) ** 2))
    se_slope = math.sqrt(float(np.sum(resid ** 2)) / dof / sxx) if dof > 0 else 0.0
    alpha_hat = 2.0 * (1.0 - float(slope)) / p
    return AlphaEstimate(
        alpha_hat=alpha_hat,
        std_error=2.0 * se_slope / p,
        slope=float(slope),
        p=p,
        levels=(n_lo, n_hi),
        boundary=not (0.0 < alpha_hat < 2.0),
    )


class BetaRegion(enum.Enum):
    """Monotonicity region of Gamma used for the beta inversion: LOW keeps
    the argument beta/alpha + 1 left of the Gamma minimum, HIGH right."""

    LOW = "low"
    HIGH = "high"


def region_for(params: GreyParams) -> BetaRegion:
    """Region containing the true beta (needed to invert unambiguously)."""
    return BetaRegion.LOW if params.beta / params.alpha + 1.0 <= GAMMA_ARGMIN else BetaRegion.HIGH


@dataclass(frozen=True)
class BetaEstimate:
    beta_hat: float
    region: BetaRegion
    boundary: bool
    target_gamma: float
    v_value: float


# Targets this far (relatively) below the Gamma minimum cannot come from
# rounding or mild sampling noise around an attainable value; closer misses
# clamp to the argmin with a boundary flag (the inversion is flat there).
_GAMMA_MIN_GRACE = 1e-3


def _beta_from_target(alpha: float, target: float, region: BetaRegion) -> Tuple[float, bool]:
    """Solve Gamma(beta/alpha + 1) = target inside the chosen region."""
    if target < GAMMA_MIN * (1.0 - _GAMMA_MIN_GRACE):
        raise NoSolutionError(
            f"target Gamma value {target:.6g} lies below the Gamma minimum {GAMMA_MIN:.6g}"
        )
    if region is BetaRegion.LOW:
        # Gamma decreases from 1 toward GAMMA_MIN on (1, argmin]
        if target >= 1.0:
            return 0.0, True
        if target <= GAMMA_MIN:
            return alpha * (GAMMA_ARGMIN - 1.0), True
        x = brentq(lambda v: _gamma(v) - target, 1.0 + 1e-12, GAMMA_ARGMIN, xtol=1e-13)
        return alpha * (x - 1.0), False
    x_max = 1.0 / alpha + 1.0
    g_max = float(_gamma(x_max))
    if target >= g_max:
        return 1.0, not _isclose(target, g_max)
    if target <= GAMMA_MIN:
        return alpha * (GAMMA_ARGMIN - 1.0), True
    x = brentq(lambda v: _gamma(v) - target, GAMMA_ARGMIN, x_max, xtol=1e-13)
    return alpha * (x - 1.0), False


def estimate_beta(
    path: SamplePath, alpha: float, region: BetaRegion = BetaRegion.LOW
) -> BetaEstimate:
    """Invert the critical variation magnitude for beta at known alpha.

    Solves Gamma(beta/alpha + 1) = Gamma(1/alpha + 1) E|Z|^(2/alpha) / V
    by bisection within the requested monotonicity region; targets outside
    the region's Gamma range return the nearest admissible beta with a
    boundary flag, and targets below the global Gamma minimum raise.
    """
    if not (0.0 < alpha < 2.0):
        raise ParameterError(f"alpha must lie in (0, 2), got {alpha}")
    v_hat = p_variation_sum(path, 2.0 / alpha).value
    if v_hat <= 0.0:
        raise InputError("critical variation sum must be positive")
    target = float(_gamma(1.0 / alpha + 1.0)) * normal_abs_moment(2.0 / alpha) / v_hat
    beta_hat, boundary = _beta_from_target(alpha, target, region)
    return BetaEstimate(
        beta_hat=beta_hat,
        region=region,
        boundary=boundary,
        target_gamma=target,
        v_value=v_hat,
    )


def estimate_beta_pooled(
    paths: Sequence[SamplePath], alpha: float, region: BetaRegion = BetaRegion.LOW
) -> BetaEstimate:
    """Beta inversion at the across-path mean critical variation.

    The mean of V over independent paths concentrates on the theoretical
    limit, so this aggregate is consistent as the batch grows, unlike the
    dispersed per-path inversion.
    """
    if not paths:
        raise InputError("need at least one path")
    if not (0.0 < alpha < 2.0):
        raise ParameterError(f"alpha must lie in (0, 2), got {alpha}")
    v_mean = float(np.mean([p_variation_sum(p, 2.0 / alpha).value for p in paths]))
    if v_mean <= 0.0:
        raise InputError("mean critical variation must be positive")
    target = float(_gamma(1.0 / alpha + 1.0)) * normal_abs_moment(2.0 / alpha) / v_mean
    beta_hat, boundary = _beta_from_target(alpha, target, region)
    return BetaEstimate(
        beta_hat=beta_hat,
        region=region,
        boundary=boundary,
        target_gamma=target,
        v_value=v_mean,
    )


class Label(enum.Enum):
    FIRST = "first"
    SECOND = "second"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Decision:
    """Outcome of a two-candidate discrimination on one path."""

    label: Label
    v: Tuple[float, float]
    mu: Tuple[float, float]
    distances: Tuple[float, float]
    threshold: float
    drift_ratio: Optional[float] = None
    drift_expected: Optional[str] = None
    drift_consistent: Optional[bool] = None
    drift_levels: Optional[Tuple[int, int]] = None

    def to_dict(self) -> dict:
        return {
            "label": self.label.value,
            "v1": self.v[0],
            "v2": self.v[1],
            "mu1": self.mu[0],
            "mu2": self.mu[1],
            "d1": self.distances[0],
            "d2": self.distances[1],
            "threshold": self.threshold,
            "drift_ratio": self.drift_ratio,
            "drift_expected": self.drift_expected,
            "drift_consistent": self.drift_consistent,
            "drift_levels": list(self.drift_levels) if self.drift_levels else None,
        }


def discriminate(
    path: SamplePath,
    c1: Candidate,
    c2: Candidate,
    threshold: float = 0.5,
) -> Decision:
    """Assign the path to the candidate whose critical-variation mean is
    relatively closest, within the inconclusive threshold.

    When the candidates' alpha differ, the winner must also pass the
    cross-exponent sanity check: at the loser's critical exponent the
    level sequence has to drift toward 0 or infinity in the direction the
    winner's scaling dictates, otherwise the decision is demoted to
    inconclusive.  The drift diagnostics are reported either way.
    """
    check = distinguishability_check(c1, c2)
    if not check:
        raise PreconditionError(f"candidates not distinguishable: {check.reason}")
    top = path.dyadic_level
    if top < 8:
        raise PreconditionError("discrimination needs a dyadic path of level >= 8")
    if threshold <= 0.0:
        raise ParameterError("threshold must be positive")

    v1 = p_variation_sum(path, c1.p_crit).value
    v2 = p_variation_sum(path, c2.p_crit).value
    d1 = abs(v1 - c1.mu) / c1.mu
    d2 = abs(v2 - c2.mu) / c2.mu

    if d1 == d2:
        return Decision(Label.INCONCLUSIVE, (v1, v2), (c1.mu, c2.mu), (d1, d2), threshold)
    winner_first = d1 < d2
    d_win = d1 if winner_first else d2
    label = Label.INCONCLUSIVE
    if d_win < threshold:
        label = Label.FIRST if winner_first else Label.SECOND

    drift_ratio = drift_expected = drift_consistent = drift_levels = None
    if not _isclose(c1.params.alpha, c2.params.alpha):
        winner, loser = (c1, c2) if winner_first else (c2, c1)
        lo = max(1, top - 6)
        records = variation_sequence(path, loser.p_crit, [lo, top])
        first, last = records[0].value, records[-1].value
        drift_levels = (lo, top)
        if first > 0.0:
            drift_ratio = last / first
            drift_expected = (
                "decreasing" if winner.params.alpha > loser.params.alpha else "increasing"
            )
            drift_consistent = (
                drift_ratio < 1.0 if drift_expected == "decreasing" else drift_ratio > 1.0
            )
            if label is not Label.INCONCLUSIVE and not drift_consistent:
                label = Label.INCONCLUSIVE
    return Decision(
        label=label,
        v=(v1, v2),
        mu=(c1.mu, c2.mu),
        distances=(d1, d2),
        threshold=threshold,
        drift_ratio=drift_ratio,
        drift_expected=drift_expected,
        drift_consistent=drift_consistent,
        drift_levels=drift_levels,
    )
