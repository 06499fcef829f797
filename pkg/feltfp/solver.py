"""
Picard iteration x_0, f x_0, f^2 x_0, ... and fixed point certification.

The fixed point theorem behind this module assumes that the consecutive
distances p(x_{n+1}, x_n) vanish along the orbit (the vanishing hypothesis),
that the space is 0-complete and that f satisfies the band condition (3).
It then yields an x with lim p(x_n, x) = p(x, x) = 0 and fx = x.

Numerically:
    * On finite spaces the orbit stops at the first repeated state. It has
      vanished iff every step on the detected cycle has distance exactly 0.
    * On continuous spaces it has vanished after `window` consecutive steps
      below `tol_zero`, a heuristic stand-in for the limit. With `settle`
      the orbit is then continued while the step distance keeps strictly
      decreasing, so the last iterate is the floating point limit.
    * The last iterate is the fixed point candidate; fx = x is certified
      through p(x, fx) = 0 (within `tol_fixed`) and indiscernibility.

Running out of iterations is a legitimate outcome and yields an uncertified
result, not an error.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from feltfp import config
from feltfp.core import Tolerances
from feltfp.reports import to_json_value

logger = logging.getLogger(__name__)

VANISHED = "vanished"
MAX_ITER = "max_iter"
CYCLE_DETECTED = "cycle_detected"

CERTIFIED = "certified"
HYPOTHESIS_NOT_MET = "hypothesis_not_met"
RESIDUAL_TOO_LARGE = "residual_too_large"


def _tolerances(tol):
    return tol if tol is not None else Tolerances.from_config(config)


@dataclass
class OrbitTrace:
    """
    A recorded Picard orbit.

    ``points[k + 1] = f(points[k])`` and ``consec[k] = p(points[k + 1], points[k])``
    for every recorded k.
    """
    points: list
    consec: list
    stopped_reason: str
    pair_window: list = field(default_factory=list)
    # first step of the final sub-tol_zero window (finite: start of the zero cycle)
    vanish_index: int = None
    # start of the detected cycle on finite spaces
    cycle_start: int = None
    # the orbit reached a state with f x = x exactly
    eventually_constant: bool = False

    def __len__(self):
        return len(self.consec)

    @property
    def last(self):
        return self.points[-1]

    def to_dict(self, space):
        return {
            "length": len(self),
            "stopped_reason": self.stopped_reason,
            "vanish_index": self.vanish_index,
            "cycle_start": self.cycle_start,
            "eventually_constant": self.eventually_constant,
            "final_point": space.point_to_json(self.last),
            "final_consec": self.consec[-1] if self.consec else None,
        }


@dataclass
class FixedPointResult:
    """
    A fixed point candidate and its certification.

    `certified` holds iff residual_fix <= tol_fixed and self_dist <= tol_fixed
    (exactly 0 on finite spaces). `tail_residual` is the last value of
    |p(x_{n+1}, f x*) - p(x*, f x*)| along the orbit.
    """
    x_star: object
    residual_fix: float
    self_dist: float
    certified: bool
    tail_residual: float = None
    trace: OrbitTrace = None
    reason: str = None
    eq4_residuals: list = None
    # p(x*, f x*) = 2 beta > 0 while the orbit steps dropped below beta
    theorem_violation_candidate: bool = False
    beta: float = None

    def eq4_tail(self):
        if self.eq4_residuals is None:
            return []
        return eq4_tail(self.trace, self.eq4_residuals)

    def to_dict(self, space):
        tail = self.eq4_tail()
        doc = {
            "x_star": space.point_to_json(self.x_star),
            "certified": self.certified,
            "reason": self.reason,
            "residual_fix": self.residual_fix,
            "self_dist": self.self_dist,
            "tail_residual": self.tail_residual,
            "eq4_tail_max": max(tail) if tail else None,
            "theorem_violation_candidate": self.theorem_violation_candidate,
            "beta": self.beta,
        }
        if space.is_finite:
            doc["x_star_label"] = space.format_point(self.x_star)
        if self.trace is not None:
            doc["trace"] = self.trace.to_dict(space)
        return to_json_value(doc)


def _pair_window(space, points, window):
    tail = points[-window:]
    return [[space.distance(a, b) for b in tail] for a in tail]


def picard_orbit(space, selfmap, x0, tol=None):
    """
    Iterate f from x0.

    Args:
        space (FeltSpace):
        selfmap (SelfMap):
        x0: start point
        tol (Tolerances):

    Returns:
        OrbitTrace: stopped as `vanished`, `cycle_detected` (finite spaces)
            or `max_iter`.

    Raises:
        DomainError: if x0 is outside the domain or an image escapes it.
    """
    tol = _tolerances(tol)
    selfmap.check_compatible(space)
    x = space.validate_point(x0)
    points, consec = [x], []
    reason = MAX_ITER
    vanish_index = cycle_start = None
    eventually_constant = False

    seen = {x: 0} if space.is_finite else None
    below = 0
    for k in range(tol.max_iter):
        y = selfmap.apply(x)
        step = space.distance(y, x)
        points.append(y)
        consec.append(step)
        if seen is not None:
            if y in seen:
                start = seen[y]
                if all(d == 0 for d in consec[start:]):
                    reason, vanish_index = VANISHED, start
                    eventually_constant = start == k
                else:
                    reason, cycle_start = CYCLE_DETECTED, start
                break
            seen[y] = k + 1
        else:
            below = below + 1 if step < tol.tol_zero else 0
            if below >= tol.window:
                reason, vanish_index = VANISHED, k - tol.window + 1
                break
        x = y

    if reason == VANISHED and not space.is_finite and tol.settle:
        x = points[-1]
        while len(consec) < tol.max_iter and consec[-1] > 0:
            y = selfmap.apply(x)
            step = space.distance(y, x)
            if not step < consec[-1]:
                break
            points.append(y)
            consec.append(step)
            x = y
        eventually_constant = consec[-1] == 0 and np.array_equal(points[-1], points[-2])

    trace = OrbitTrace(points, consec, reason,
                       pair_window=_pair_window(space, points, tol.window),
                       vanish_index=vanish_index, cycle_start=cycle_start,
                       eventually_constant=eventually_constant)
    logger.info("orbit of %s under %s from %s stopped after %d steps: %s",
                space.name, selfmap.name, space.format_point(points[0]), len(trace), reason)
    return trace


def vanishing_hypothesis(trace, tol=None):
    """
    Whether the orbit satisfies lim p(x_{n+1}, x_n) = 0.

    True iff the trace stopped as vanished; cycles with positive steps and
    exhausted iteration budgets do not qualify.
    """
    if len(trace.points) == 0:
        raise ValueError("empty trace")
    return trace.stopped_reason == VANISHED


def verify_fixed_point(space, selfmap, x, tol=None):
    """
    Evaluate the fixed point residuals at x.

    fx = x is not compared pointwise: on a felt metric p(x, fx) = 0 already
    forces it.

    Returns:
        FixedPointResult: with residual_fix = p(x, fx) and self_dist = p(x, x).
    """
    tol = _tolerances(tol)
    selfmap.check_compatible(space)
    x = space.validate_point(x)
    fx = selfmap.apply(x)
    residual_fix = space.distance(x, fx)
    self_dist = space.distance(x, x)
    if space.is_finite:
        certified = residual_fix == 0 and self_dist == 0
    else:
        certified = residual_fix <= tol.tol_fixed and self_dist <= tol.tol_fixed
    return FixedPointResult(x, residual_fix, self_dist, certified,
                            reason=CERTIFIED if certified else RESIDUAL_TOO_LARGE)


def eq4_diagnostic(space, selfmap, trace, x_star):
    """
    The residuals r_n = |p(x_{n+1}, f x*) - p(x*, f x*)| along the orbit.

    They tend to 0 when the orbit 0-converges to x* (felt continuity).

    Returns:
        list of float: one value per recorded step
    """
    if len(trace) == 0:
        return []
    x_star = space.validate_point(x_star)
    fx = selfmap.apply(x_star)
    reference = space.distance(x_star, fx)
    return [abs(space.distance(y, fx) - reference) for y in trace.points[1:]]


def eq4_tail(trace, residuals):
    """The residuals from the start of the vanishing window on (all if the orbit did not vanish)."""
    start = trace.vanish_index if trace.vanish_index is not None else 0
    return residuals[start:]


def solve(space, selfmap, x0, tol=None):
    """
    Locate and certify a fixed point by Picard iteration from x0.

    If the orbit does not vanish the result is uncertified with reason
    `hypothesis_not_met`. Otherwise the last iterate is verified and the
    tail residuals |p(x_{n+1}, f x*) - p(x*, f x*)| are evaluated. With
    p(x*, f x*) = 2 beta > 0 while all steps of the final window are below
    beta the result is flagged as a theorem violation candidate, which
    condition (3) rules out.

    Returns:
        FixedPointResult: carrying the trace.
    """
    tol = _tolerances(tol)
    trace = picard_orbit(space, selfmap, x0, tol)
    if not vanishing_hypothesis(trace, tol):
        result = verify_fixed_point(space, selfmap, trace.last, tol)
        result.certified = False
        result.reason = HYPOTHESIS_NOT_MET
        result.trace = trace
        return result

    result = verify_fixed_point(space, selfmap, trace.last, tol)
    result.trace = trace
    result.eq4_residuals = eq4_diagnostic(space, selfmap, trace, trace.last)
    result.tail_residual = result.eq4_residuals[-1] if result.eq4_residuals else 0.0

    beta = result.residual_fix / 2
    if not result.certified and beta > 0:
        result.beta = beta
        if all(step < beta for step in trace.consec[-tol.window:]):
            result.theorem_violation_candidate = True
            logger.warning("theorem violation candidate on %s under %s: p(x,fx) = %r, steps %r",
                           space.name, selfmap.name, result.residual_fix, trace.consec[-tol.window:])
    logger.info("fixed point of %s under %s: %s (p(x,fx) = %r, p(x,x) = %r)",
                space.name, selfmap.name, result.reason, result.residual_fix, result.self_dist)
    return result
