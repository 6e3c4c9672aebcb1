"""Parameter containers and the algebraic speed formulas.

The object of study is the competition-diffusion system

    u1_t = d1 u1_xx + r1 u1 (1 - u1 - a12 u2 - a13 u3),
    u2_t =    u2_xx +    u2 (1 - a21 u1 - u2 - a23 u3),
    u3_t = d3 u3_xx + r3 u3 (1 - a31 u1 - a32 u2 - u3),

posed on the half line, with d2 = r2 = 1 fixed by the nondimensionalization.
Under the hierarchy checked by :func:`validate_hierarchy`, u1 invades fastest,
u2 follows into the u1 wake, and u3 trails both, so the solution organizes
itself into a propagating terrace of three stacked fronts.

Everything in this module is closed-form algebra: the speeds of the two
leading fronts, the decay-limited speed sigma3 of the trailing species, the
linearly determined invasion speed c_LLW of u3 into the u2 monoculture, and
the hypothesis gates under which those formulas are the relevant ones.  The
free-boundary speed s_nlp lives in :mod:`terrace.closed_form` (explicit
formula) and :mod:`terrace.hj` (variational-inequality solvers).
"""

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class ModelParams:
    """Coefficients of the three-species system.

    d2 = r2 = 1 is implicit and never stored.  Diffusion and growth rates
    must be strictly positive, competition coefficients non-negative.
    """

    d1: float
    d3: float
    r1: float
    r3: float
    a12: float
    a13: float
    a21: float
    a23: float
    a31: float
    a32: float

    def __post_init__(self):
        for name in ("d1", "d3", "r1", "r3"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        for name in ("a12", "a13", "a21", "a23", "a31", "a32"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


@dataclass(frozen=True)
class DecayRate:
    """Tail decay of the u3 initial datum.

    ``DecayRate.finite(lam)`` models data behaving like e^{-lam x} for large
    x; ``INFINITE`` (lam=None) models compactly supported data.  Infinite is
    a genuine variant rather than a large float so that every branch test of
    the form "lam >= threshold" holds categorically, with no overflow in
    lam-dependent expressions.
    """

    lam: float | None = None

    def __post_init__(self):
        if self.lam is not None and not (0 < self.lam < math.inf):
            raise ValueError("finite decay rate must lie in (0, inf)")

    @classmethod
    def finite(cls, lam):
        return cls(float(lam))

    @property
    def is_finite(self):
        return self.lam is not None

    def at_least(self, threshold):
        """Whether lam >= threshold; true for the infinite variant."""
        return (not self.is_finite) or self.lam >= threshold

    def __str__(self):
        return f"{self.lam:g}" if self.is_finite else "infinite"


INFINITE = DecayRate(None)


@dataclass(frozen=True)
class HypothesisContext:
    """Speeds of the two leading fronts plus the u3 datum decay.

    c1 is the u1 front speed, c2 the u2 front speed into the u1 wake.
    Admissibility (sigma3 < c2, so that u3 genuinely trails) is established
    by :func:`check_theorem12`; the container itself only enforces the
    ordering c1 > c2 > 0.
    """

    c1: float
    c2: float
    lam: DecayRate

    def __post_init__(self):
        if not (self.c1 > self.c2 > 0):
            raise ValueError("need c1 > c2 > 0")


@dataclass(frozen=True)
class CllwBracket:
    """Bracket [lower, upper] for c_LLW, with the linear value when determined."""

    lower: float
    upper: float
    linear: float | None = None

    @property
    def determinate(self):
        return self.linear is not None


@dataclass
class CheckResult:
    """Outcome of a hypothesis validator.

    ``conditions`` maps a readable statement of each inequality to its truth
    value; ``context`` is filled by check_theorem12 on success and is None
    otherwise.
    """

    ok: bool
    conditions: dict
    context: HypothesisContext | None = None

    @property
    def failures(self):
        return [name for name, good in self.conditions.items() if not good]


@dataclass
class CorollaryCheck:
    """Split report for check_corollary_113.

    ``fixed`` holds the conditions on the frozen coefficients; ``smallness``
    holds the ones evaluated at the given a21.
    """

    fixed: dict
    smallness: dict

    @property
    def fixed_ok(self):
        return all(self.fixed.values())

    @property
    def smallness_ok(self):
        return all(self.smallness.values())

    @property
    def ok(self):
        return self.fixed_ok and self.smallness_ok

    @property
    def failures(self):
        out = [k for k, v in self.fixed.items() if not v]
        out += [k for k, v in self.smallness.items() if not v]
        return out


@dataclass
class SpeedReport:
    """Predicted and measured u3 speeds for one parameter set.

    The algebraic fields are filled from this module and terrace.closed_form
    / terrace.hj; the measured block is filled by terrace.fronts after a
    simulation.  c_llw_linear is None when linear determinacy fails, in
    which case downstream consumers fall back to the [lower, upper] bracket.
    """

    alpha3: float
    sigma3: float
    hat_s_nlp: float
    c_llw_lower: float
    c_llw_upper: float
    c_llw_linear: float | None = None
    s_nlp: float | None = None
    s_nlp_grid: float | None = None
    beta3: float | None = None
    underline_beta3: float | None = None
    measured_c3_bar: float | None = None
    measured_c3_under: float | None = None
    measured_stderr: float | None = None
    measured_r2: float | None = None
    regime_predicted: str | None = None
    regime_observed: str | None = None

    def predicted_dict(self):
        c_llw = self.c_llw_linear
        if c_llw is None:
            c_llw = [self.c_llw_lower, self.c_llw_upper]
        return {
            "sigma3": self.sigma3,
            "hat_s_nlp": self.hat_s_nlp,
            "c_llw": c_llw,
            "s_nlp": self.s_nlp,
            "beta3": self.beta3,
            "underline_beta3": self.underline_beta3,
        }


def alpha3(p):
    """Invasion speed of u3 alone into open space: 2 sqrt(d3 r3)."""
    return 2.0 * math.sqrt(p.d3 * p.r3)


def validate_hierarchy(p):
    """Check the competitive hierarchy, one inequality at a time.

    d3 r3 < 1 < d1 r1 orders the intrinsic front speeds (u1 fastest, u3
    slowest); a21 < 1 < a12 makes u1 dominant over u2; a31 + a32 < 1 lets
    u3 persist under the combined pressure of the other two.
    """
    conds = {
        "d3*r3 < 1 < d1*r1": p.d3 * p.r3 < 1 < p.d1 * p.r1,
        "a21 < 1 < a12": p.a21 < 1 < p.a12,
        "a31 + a32 < 1": p.a31 + p.a32 < 1,
    }
    return CheckResult(all(conds.values()), conds)


def sigma3(p, lam):
    """Decay-limited spreading speed of u3 into open space.

    d3*lam + r3/lam while lam < sqrt(r3/d3); saturates at alpha3 for steeper
    decay, compact support included.  Continuous across the branch point.
    """
    lam_star = math.sqrt(p.r3 / p.d3)
    if lam.is_finite and lam.lam < lam_star:
        return p.d3 * lam.lam + p.r3 / lam.lam
    return alpha3(p)


def hat_s_nlp(p, c1):
    """Speed of u2 invading the wake of a u1 front moving at c1.

    For c1 <= 2 (sqrt(a21) + sqrt(1 - a21)) the invasion is nonlocally
    pulled and the speed is c1/2 - sqrt(a21) + (1 - a21)/(c1/2 - sqrt(a21));
    beyond that the u1 front is too far ahead to matter and the local value
    2 sqrt(1 - a21) is attained.  For c1 >= 2 the result always lies in
    [2 sqrt(1 - a21), 2].
    """
    if not c1 > 0:
        raise ValueError("c1 must be positive")
    if p.a21 >= 1:
        raise ValueError("hat_s_nlp needs a21 < 1")
    root = math.sqrt(p.a21)
    if c1 <= 2.0 * (root + math.sqrt(1.0 - p.a21)):
        h = 0.5 * c1 - root
        if h <= 0:
            # unreachable for c1 >= 2 sqrt(1-a21); reject junk inputs
            raise ValueError("c1 too small for the pulled branch")
        return h + (1.0 - p.a21) / h
    return 2.0 * math.sqrt(1.0 - p.a21)


def c_llw(p):
    """Invasion speed of u3 into the u2 monoculture left by the u1 front.

    Only the bracket [2 sqrt(d3 r3 (1 - a32 (1 - a21))), alpha3] is known in
    general.  When the invasion is linearly determined (d3 >= 1/2,
    a32 (1 - a21) < 1 < a23/(1 - a21), a32 a23 < 1) the lower endpoint is
    the exact speed and is reported as ``linear``.
    """
    if p.a21 == 1:
        raise ValueError("c_llw needs a21 != 1")
    eff = 1.0 - p.a32 * (1.0 - p.a21)
    if eff <= 0:
        raise ValueError("u3 cannot invade u2: a32*(1 - a21) >= 1")
    lower = 2.0 * math.sqrt(p.d3 * p.r3 * eff)
    upper = alpha3(p)
    linear = None
    determinate = (
        p.d3 >= 0.5
        and p.a32 * (1.0 - p.a21) < 1 < p.a23 / (1.0 - p.a21)
        and p.a32 * p.a23 < 1
    )
    if determinate:
        linear = lower
    return CllwBracket(lower, upper, linear)


def check_theorem12(p, lam):
    """Validate the hypotheses under which the three-front terrace forms.

    Conditions: the competitive hierarchy; linear determinacy of the
    (u1, u2) subsystem (d1 = 1, a12 a21 < max{1, 2(1 - a21)}); and the
    trailing condition sigma3(lam) < c2, with c1 = 2 sqrt(d1 r1) and
    c2 = hat_s_nlp(c1).  Strict inequalities are evaluated exactly; callers
    sitting on a boundary should perturb their parameters.

    Returns a CheckResult whose ``context`` carries (c1, c2, lam) when every
    condition holds, and whose ``failures`` list the broken ones otherwise.
    """
    conds = dict(validate_hierarchy(p).conditions)
    conds["d1 = 1"] = p.d1 == 1.0
    conds["a12*a21 < max(1, 2*(1 - a21))"] = (
        p.a12 * p.a21 < max(1.0, 2.0 * (1.0 - p.a21))
    )
    c1 = 2.0 * math.sqrt(p.d1 * p.r1)
    if p.a21 < 1:
        c2 = hat_s_nlp(p, c1)
        conds["sigma3(lam) < c2"] = sigma3(p, lam) < c2
    else:
        c2 = None
        conds["sigma3(lam) < c2"] = False
    ok = all(conds.values())
    ctx = HypothesisContext(c1, c2, lam) if ok else None
    return CheckResult(ok, conds, ctx)


def check_corollary_113(p):
    """Sufficient conditions for the fully explicit speed regime.

    The first block constrains the coefficients that stay fixed while a21
    varies; the second block holds for a21 small and is evaluated at the
    given a21.  All comparisons are exact.
    """
    from .closed_form import s_nlp_closed  # deferred, closed_form imports us

    sd3 = math.sqrt(p.d3)
    sa32 = math.sqrt(p.a32) + math.sqrt(1.0 - p.a32) if p.a32 <= 1 else None
    inv_a32 = 1.0 / p.a32 if p.a32 > 0 else math.inf
    fixed = {
        "d1 = 1": p.d1 == 1.0,
        "a12 > 1": p.a12 > 1,
        "a32 <= 1/2": p.a32 <= 0.5,
        "a31 <= a32/a12": p.a31 <= p.a32 / p.a12,
        "d3 >= 1/2": p.d3 >= 0.5,
        "a13 > 1": p.a13 > 1,
        "1 < a23 < 1/a32": 1 < p.a23 < inv_a32,
        "1/(sqrt(d3)*(sqrt(a32)+sqrt(1-a32))) < sqrt(r3) < 1/sqrt(d3)": (
            sa32 is not None
            and 1.0 / (sd3 * sa32) < math.sqrt(p.r3) < 1.0 / sd3
        ),
        "1 < sqrt(r1) < sqrt(d3*r3)*(sqrt(a32)+sqrt(1-a32))": (
            sa32 is not None
            and 1 < math.sqrt(p.r1) < math.sqrt(p.d3 * p.r3) * sa32
        ),
    }

    smallness = {"a12*a21 < 1": p.a12 * p.a21 < 1}
    if p.a21 < 1:
        om = 1.0 - p.a21
        c1 = 2.0 * math.sqrt(p.d1 * p.r1)
        c2_floor = 2.0 * math.sqrt(om)
        cl = 2.0 * math.sqrt(p.d3 * p.r3 * max(1.0 - p.a32 * om, 0.0))
        if c1 > c2_floor > 0:
            snlp = s_nlp_closed(p, c1, c2_floor, INFINITE)
            smallness["c_llw < s_nlp at c2 = 2*sqrt(1-a21)"] = cl < snlp
        else:
            smallness["c_llw < s_nlp at c2 = 2*sqrt(1-a21)"] = False
        smallness["a32*(1-a21) < 1 < a23/(1-a21)"] = p.a32 * om < 1 < p.a23 / om
        smallness["sqrt(d3*r3) < sqrt(1-a21)"] = math.sqrt(p.d3 * p.r3) < math.sqrt(om)
        smallness["sqrt(a21) + sqrt(1-a21) < sqrt(r1)"] = (
            math.sqrt(p.a21) + math.sqrt(om) < math.sqrt(p.r1)
        )
    else:
        smallness["c_llw < s_nlp at c2 = 2*sqrt(1-a21)"] = False
        smallness["a32*(1-a21) < 1 < a23/(1-a21)"] = False
        smallness["sqrt(d3*r3) < sqrt(1-a21)"] = False
        smallness["sqrt(a21) + sqrt(1-a21) < sqrt(r1)"] = False
    return CorollaryCheck(fixed, smallness)


def lambda_llw(p):
    """Decay rate of the linearly determined u3-into-u2 front.

    The smaller positive root mu of mu c = d3 mu^2 + r3 (1 - a32 (1 - a21))
    at c = c_llw.  For the linear value of c_llw the discriminant vanishes
    identically and the root is c_llw / (2 d3); tiny negative floating-point
    residue is clamped, a genuinely negative discriminant is an error.
    """
    br = c_llw(p)
    if br.linear is None:
        raise ValueError("c_llw is not linearly determined for these parameters")
    c = br.linear
    disc = c * c - 4.0 * p.d3 * p.r3 * (1.0 - p.a32 * (1.0 - p.a21))
    if disc < -1e-9:
        raise ValueError("negative discriminant: inconsistent c_llw value")
    return (c - math.sqrt(max(disc, 0.0))) / (2.0 * p.d3)


def kanon_speed_bound(p, c_hat, mu_hat):
    """Speed ceiling for u3 under an exponential envelope along a ray.

    If u3 is bounded by C e^{-mu_hat (x - c_hat t)} ahead of the ray
    x = c_hat t, its spreading speed cannot exceed the value returned here.
    A steep envelope (mu_hat >= lambda_llw (c_hat - c_llw)) pins the bound
    at c_llw; otherwise the bound interpolates between c_llw and c_hat:

        c_hat - 2 d3 mu_hat / (c_hat - sqrt(c_hat^2 - 4 d3 (mu_hat + r_eff)))

    with r_eff = r3 (1 - a32 (1 - a21)).  The bound tends to c_hat as
    mu_hat -> 0 and is the free boundary of the constant-rate variational
    inequality on [0, c_hat] with boundary value mu_hat (see terrace.hj).
    """
    if not (c_hat > 0 and mu_hat > 0):
        raise ValueError("need c_hat > 0 and mu_hat > 0")
    br = c_llw(p)
    if br.linear is None:
        raise ValueError("c_llw is not linearly determined for these parameters")
    if mu_hat >= lambda_llw(p) * (c_hat - br.linear):
        return br.linear
    r_eff = p.r3 * (1.0 - p.a32 * (1.0 - p.a21))
    rad = c_hat * c_hat - 4.0 * p.d3 * (mu_hat + r_eff)
    if rad < 0:
        raise ValueError("negative radicand: envelope regime violated")
    return c_hat - 2.0 * p.d3 * mu_hat / (c_hat - math.sqrt(rad))
