"""Explicit formulas for the nonlocally pulled speed of the third species.

Behind leading fronts at speeds c1 > c2 the trailing species sees a
two-step growth rate, and its spreading speed s_nlp admits a closed form
in three regimes: a linearized slope inherited through the middle zone
(two variants, depending on where the entry slope zeta1 lands relative to
c2), and a locally pulled fallback 2 sqrt(d3 r3 (1 - a32)) otherwise.
The accompanying decay profile is piecewise linear/parabolic and is
reproduced here when the regime admits one.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from .hj import Segment, SpeedFunction, profile_from_segments

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ThmCIntermediates:
    """Ingredients of the explicit speed; None marks an undefined field."""

    zeta1: float
    zeta2: float
    lambda_nlp1: float
    lambda_nlp2: float
    branch: int
    rho_c1: float


def thmC_intermediates(p, c1, c2, lam):
    """Entry slopes, candidate profile slopes, and the branch that fires.

    Square-root domain violations leave the affected field None and route
    the branch selection around it; they never raise.
    """
    if not c1 > c2 > 0:
        raise ValueError("need c1 > c2 > 0")
    d = p.d3
    r3 = p.r3
    a31, a32 = p.a31, p.a32
    if a32 >= 1.0:
        raise ValueError("a32 < 1 required for a positive far-field rate")

    half1 = c1 / (2.0 * d)
    if lam.at_least(half1):
        zeta1 = half1 - math.sqrt(r3 * a31 / d)
    else:
        lv = lam.lam
        zeta1 = (c1 - math.sqrt((c1 - 2.0 * d * lv) ** 2
                                + 4.0 * d * r3 * a31)) / (2.0 * d)

    half2 = c2 / (2.0 * d)
    zeta2 = half2 + math.sqrt(r3 * (a31 - a32) / d) if a31 >= a32 else None
    lambda_nlp1 = half2 - math.sqrt(r3 * (a32 - a31) / d) if a32 >= a31 else None
    disc = (c2 - 2.0 * d * zeta1) ** 2 + 4.0 * d * r3 * (a32 - a31)
    lambda_nlp2 = (c2 - math.sqrt(disc)) / (2.0 * d) if disc >= 0.0 else None

    cap = math.sqrt(r3 * (1.0 - a32) / d)
    branch = 3
    if zeta1 > half2:
        if (a31 < a32 and lambda_nlp1 is not None
                and 0.0 < lambda_nlp1 <= cap):
            branch = 1
    else:
        if lambda_nlp2 is not None and 0.0 < lambda_nlp2 <= cap:
            if a31 < a32:
                branch = 2
            elif zeta2 is not None and zeta1 + zeta2 < c2 / d:
                branch = 2

    residuals = [zeta1 - half2]
    if lambda_nlp1 is not None:
        residuals.append(lambda_nlp1 - cap)
    if lambda_nlp2 is not None:
        residuals.append(lambda_nlp2 - cap)
    if zeta2 is not None:
        residuals.append(zeta1 + zeta2 - c2 / d)
    if any(abs(r) < 1e-9 for r in residuals):
        log.debug("branch conditions nearly active: residuals %s", residuals)

    rho_c1 = zeta1 * c1 - d * zeta1 * zeta1 - r3 * (1.0 - a31)
    return ThmCIntermediates(zeta1, zeta2, lambda_nlp1, lambda_nlp2,
                             branch, rho_c1)


def s_nlp_closed(p, c1, c2, lam):
    """The explicit spreading speed of the trailing species."""
    t = thmC_intermediates(p, c1, c2, lam)
    d, r3, a32 = p.d3, p.r3, p.a32
    if t.branch == 1:
        slope = t.lambda_nlp1
    elif t.branch == 2:
        slope = t.lambda_nlp2
    else:
        return 2.0 * math.sqrt(d * r3 * (1.0 - a32))
    return d * slope + r3 * (1.0 - a32) / slope


def rho_nlp_closed(p, c1, c2, lam, n=2049):
    """Piecewise decay profile on [0, c1] when the regime admits one.

    Returns a segment-backed SpeedFunction, or None when the profile
    conditions fail (the caller then falls back to the grid solver).
    """
    t = thmC_intermediates(p, c1, c2, lam)
    d, r3, a31, a32 = p.d3, p.r3, p.a31, p.a32
    rhs = c2 * math.sqrt(r3 * (1.0 - a32) / d) - 2.0 * r3 * (1.0 - a32)

    segs = None
    if t.branch == 2:
        lhs = t.zeta1 * c2 - d * t.zeta1 ** 2 - r3 * (1.0 - a31)
        if lhs < rhs:
            snlp = d * t.lambda_nlp2 + r3 * (1.0 - a32) / t.lambda_nlp2
            segs = [
                Segment("zero", 0.0, snlp),
                Segment("linear", snlp, c2, slope=t.lambda_nlp2,
                        intercept=-t.lambda_nlp2 * snlp),
                Segment("linear", c2, c1, slope=t.zeta1,
                        intercept=-(d * t.zeta1 ** 2 + r3 * (1.0 - a31))),
            ]
    elif t.branch == 1:
        lhs = c2 * c2 / (4.0 * d) - r3 * (1.0 - a31)
        if lhs < rhs:
            snlp = d * t.lambda_nlp1 + r3 * (1.0 - a32) / t.lambda_nlp1
            knee = 2.0 * d * t.zeta1
            segs = [
                Segment("zero", 0.0, snlp),
                Segment("linear", snlp, c2, slope=t.lambda_nlp1,
                        intercept=-t.lambda_nlp1 * snlp),
                Segment("parabola", c2, min(knee, c1), curvature_d=d,
                        intercept=-r3 * (1.0 - a31)),
            ]
            if knee < c1:
                segs.append(Segment("linear", knee, c1, slope=t.zeta1,
                                    intercept=-(d * t.zeta1 ** 2
                                                + r3 * (1.0 - a31))))
    if segs is None:
        return None
    grid = np.linspace(0.0, c1, n)
    return SpeedFunction(grid, profile_from_segments(segs, grid), tuple(segs))
