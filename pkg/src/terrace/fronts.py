"""Front tracking, speed estimation, and invasion-outcome classification."""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import linregress

_REGIMES = ("TripleCoexist", "U1U3Coexist", "U2U3Coexist", "U3Dominance")


@dataclass
class FrontTrajectory:
    """Level-set positions x(t) of one species at threshold theta.

    Times where the species is everywhere below theta are dropped.
    """

    species: int
    theta: float
    times: np.ndarray
    positions: np.ndarray


@dataclass(frozen=True)
class SpeedEstimate:
    speed: float
    stderr: float
    r_squared: float
    ballistic: bool  # False flags a fit that is not yet linear in t
    n_used: int


@dataclass(frozen=True)
class RegimeClassification:
    regime: str
    u1_extinct: bool
    u2_extinct: bool
    details: dict = field(default_factory=dict)


def track_front(result, species, theta):
    """Rightmost crossing of u_species = theta in each snapshot."""
    if not result.active[species]:
        raise ValueError(f"species {species} is inactive in this run")
    x = result.x
    ts, xs = [], []
    for k in range(len(result.times)):
        u = result.u[k, species]
        above = np.nonzero(u >= theta)[0]
        if above.size == 0:
            continue
        i = int(above[-1])
        if i == len(x) - 1:
            pos = float(x[-1])
        else:
            frac = (u[i] - theta) / (u[i] - u[i + 1])
            pos = float(x[i] + frac * (x[i + 1] - x[i]))
        ts.append(result.times[k])
        xs.append(pos)
    return FrontTrajectory(species, theta, np.asarray(ts), np.asarray(xs))


def estimate_speed(traj, window_fraction=0.5):
    """Least-squares slope of x(t) over the trailing part of the run."""
    if traj.times.size < 2:
        raise ValueError("front trajectory too short to fit")
    t0, t1 = traj.times[0], traj.times[-1]
    cut = t1 - window_fraction * (t1 - t0)
    sel = traj.times >= cut
    if int(sel.sum()) < 10:
        raise ValueError("fewer than 10 samples in the fitting window")
    fit = linregress(traj.times[sel], traj.positions[sel])
    r2 = float(fit.rvalue) ** 2
    return SpeedEstimate(float(fit.slope), float(fit.stderr), r2,
                         r2 >= 0.99, int(sel.sum()))


def measure_speed_pair(result, species=2, theta_low=1e-3,
                       window_fraction=0.5):
    """Upper and lower front speeds of one species.

    The upper speed tracks the leading tail at theta_low; the lower speed
    tracks the half-plateau level, with the plateau read off the last
    snapshot.  Returns (upper, lower) SpeedEstimates.
    """
    plateau = float(result.u[-1, species].max())
    if plateau <= 2.0 * theta_low:
        raise ValueError("species has no developed plateau to track")
    upper = estimate_speed(track_front(result, species, theta_low),
                           window_fraction)
    lower = estimate_speed(track_front(result, species, 0.5 * plateau),
                           window_fraction)
    return upper, lower


def _reduced_level(keep_a3, keep_ai3):
    """Final u3 level when only one competitor remains.

    Solves A = (1 - keep_a3) + keep_a3 keep_ai3 A; divergence means the
    remaining competitor is excluded as well.
    """
    q = keep_a3 * keep_ai3
    if q >= 1.0:
        return math.inf
    return (1.0 - keep_a3) / (1.0 - q)


def final_zone_predict(p):
    """Invasion outcome from the interaction recursion.

    Iterates A_{m+1} = (1 - a31 - a32) + (a31 a13 + a32 a23) A_m from
    A_1 = 1 - a31 - a32; competitor i dies once 1 - a_i3 A_m <= 0, after
    which the recursion restarts with the survivor only.
    """
    A1 = 1.0 - p.a31 - p.a32
    if A1 <= 0:
        raise ValueError("recursion needs a31 + a32 < 1")
    q = p.a31 * p.a13 + p.a32 * p.a23
    A = A1
    u1_dead = u2_dead = False
    for _ in range(10000):
        u1_dead = p.a13 * A >= 1.0
        u2_dead = p.a23 * A >= 1.0
        if u1_dead or u2_dead:
            break
        nxt = A1 + q * A
        if abs(nxt - A) < 1e-13:
            break
        A = nxt
        if A > 1e6:
            raise RuntimeError("interaction recursion does not settle")
    if u1_dead and not u2_dead:
        A = _reduced_level(p.a32, p.a23)
        u2_dead = p.a23 * A >= 1.0
    elif u2_dead and not u1_dead:
        A = _reduced_level(p.a31, p.a13)
        u1_dead = p.a13 * A >= 1.0
    if u1_dead and u2_dead:
        A = 1.0
    regime = _regime_name(u1_dead, u2_dead)
    return RegimeClassification(regime, u1_dead, u2_dead,
                                {"u3_level": A})


def _regime_name(u1_dead, u2_dead):
    if u1_dead and u2_dead:
        return "U3Dominance"
    if u1_dead:
        return "U2U3Coexist"
    if u2_dead:
        return "U1U3Coexist"
    return "TripleCoexist"


def final_zone_classify(result, c_under_est, threshold=0.05):
    """Empirical invasion outcome read off the final snapshot.

    Averages each species over x in [0.1, 0.6] c_under_est T, i.e. well
    behind the slowest front, and calls a species extinct when its mean
    falls below threshold.
    """
    T = float(result.times[-1])
    lo, hi = 0.1 * c_under_est * T, 0.6 * c_under_est * T
    if hi > result.x[-1]:
        raise ValueError("classification window outside the domain")
    mask = (result.x >= lo) & (result.x <= hi)
    if not mask.any():
        raise ValueError("classification window contains no nodes")
    means = [float(result.u[-1, i, mask].mean()) for i in range(3)]
    u1_dead = means[0] < threshold
    u2_dead = means[1] < threshold
    regime = _regime_name(u1_dead, u2_dead)
    return RegimeClassification(regime, u1_dead, u2_dead,
                                {"means": tuple(means)})
