"""
The band contraction conditions on a self-map f.

    (2)  for each alpha > 0 there is an eps > 0 such that
         alpha - eps < p(y, x) < alpha + eps  yields  p(fy, fx) <= alpha,
    (3)  for each alpha > 0 there is an eps > 0 such that
         alpha <= p(y, x) < alpha + eps       yields  p(fy, fx) <= alpha.

Both imply that f is nonexpansive on pairs of positive distance, and the two
are equivalent (one may assume alpha - eps > 0 in (2)). On a finite space
the band around a distance value can be shrunk until it isolates that value,
so both reduce exactly to: p(fy, fx) <= p(y, x) whenever p(y, x) > 0.

A Banach contraction with factor 0 <= c < 1 satisfies (3) with
eps(alpha) = alpha (1 - c) / c, since c (alpha + eps) <= alpha.

On continuous spaces the conditions are tested on seeded pairs inside the
declared box only, and an image distance may exceed its bound by tol_zero.
"""

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from feltfp import config
from feltfp.core import ConfigurationError, Tolerances
from feltfp.reports import (CheckReport, CLOSED_FORM, EXHAUSTIVE, FAIL, PASS, PASS_SAMPLED,
                            SAMPLED, make_witness)
from feltfp.sampling import Sampler

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModulusLevel:
    alpha: float
    epsilon: float
    scope: str

    def to_dict(self):
        return {"alpha": self.alpha, "epsilon": self.epsilon, "scope": self.scope}


@dataclass
class ModulusProfile:
    """
    A recorded assignment alpha -> eps certifying condition (3) at tested levels.

    Within its scope every sampled pair with alpha <= p(y, x) < alpha + eps
    satisfies p(fy, fx) <= alpha.
    """
    levels: list = field(default_factory=list)

    def add(self, alpha, epsilon, scope):
        if not (alpha > 0 and epsilon > 0):
            raise ValueError("modulus levels need alpha > 0 and epsilon > 0")
        self.levels.append(ModulusLevel(float(alpha), float(epsilon), scope))

    def epsilon_at(self, alpha):
        for level in self.levels:
            if level.alpha == alpha:
                return level.epsilon
        raise KeyError(alpha)

    def to_dict(self):
        return {"levels": [level.to_dict() for level in self.levels]}


@dataclass(frozen=True)
class ContractionFactor:
    """A Banach contraction factor 0 <= c < 1."""
    c: float

    def __post_init__(self):
        if not 0 <= self.c < 1:
            raise ConfigurationError("contraction factor must satisfy 0 <= c < 1, got {}".format(self.c))


def _tolerances(tol):
    return tol if tol is not None else Tolerances.from_config(config)


def _image_matrix(space, selfmap):
    """img[y, x] = p(fy, fx)."""
    selfmap.check_compatible(space)
    m = selfmap.indices
    return space.matrix[np.ix_(m, m)]


def _pair_witness(space, selfmap, y, x, d, d_image, relation):
    return make_witness(space, [y, x], [d, d_image], relation,
                        images=[space.point_to_json(selfmap.apply(y)),
                                space.point_to_json(selfmap.apply(x))])


def _first_pair(mask):
    hits = np.argwhere(mask)
    if len(hits) == 0:
        return None
    return int(hits[0][0]), int(hits[0][1])


def check_condition3_finite(space, selfmap):
    """
    Decide condition (3) exactly on a finite space.

    On pass, the profile lists every positive distance value alpha with
    eps(alpha) the gap to the next larger distance value (1 for the largest).

    Returns:
        CheckReport: with `profile` on pass, the lexicographically smallest
            expanding pair (y, x) as witness on failure.
    """
    mat = space.matrix
    image = _image_matrix(space, selfmap)
    hit = _first_pair((mat > 0) & (image > mat))
    if hit is not None:
        y, x = hit
        return CheckReport("condition3", FAIL,
                           witness=_pair_witness(space, selfmap, y, x, mat[y, x], image[y, x],
                                                 "p(fy,fx) > p(y,x) > 0"))
    profile = ModulusProfile()
    values = [v for v in space.distance_values().tolist() if v > 0]
    for alpha, above in zip(values, values[1:] + [None]):
        profile.add(alpha, above - alpha if above is not None else 1.0, EXHAUSTIVE)
    return CheckReport("condition3", PASS, profile=profile, detail={"pairs": space.size ** 2})


def _band_levels(values):
    """
    The alphas tested by the finite condition (2) search: every positive
    distance value, the midpoints between consecutive values, one level
    below the least positive value and one above the largest.
    """
    positive = [v for v in values if v > 0]
    if not positive:
        return [1.0]
    levels = list(positive)
    levels += [(a + b) / 2 for a, b in zip(values, values[1:]) if (a + b) / 2 > 0]
    levels += [positive[0] / 2, positive[-1] + 1.0]
    return sorted(set(levels))


def check_condition2_finite(space, selfmap):
    """
    Decide condition (2) exactly on a finite space by a direct band search.

    For each tested alpha the open band (alpha - eps, alpha + eps) is
    scanned with eps a quarter of the least gap between distinct distance
    values (and at most alpha / 2), so alpha - eps > 0 and the band edges
    stay well clear of the neighbouring values. Membership is decided on
    the sorted distinct values; a band holding more than one of them is an
    internal error.

    Returns:
        CheckReport: the lexicographically smallest offending pair on failure.
    """
    mat = space.matrix
    image = _image_matrix(space, selfmap)
    values = space.distance_values().tolist()
    gaps = [b - a for a, b in zip(values, values[1:])]
    quarter_gap = min(gaps) / 4 if gaps else 1.0

    offending = np.zeros(mat.shape, dtype=bool)
    levels = _band_levels(values)
    for alpha in levels:
        eps = min(quarter_gap, alpha / 2)
        inside = [v for v in values if alpha - eps < v < alpha + eps]
        if len(inside) > 1:
            raise RuntimeError("band around {} holds the distance values {}".format(alpha, inside))
        if not inside:
            continue
        offending |= (mat == inside[0]) & (image > alpha)
    hit = _first_pair(offending)
    if hit is not None:
        y, x = hit
        return CheckReport("condition2", FAIL,
                           witness=_pair_witness(space, selfmap, y, x, mat[y, x], image[y, x],
                                                 "p(y,x) in (alpha-eps, alpha+eps) but p(fy,fx) > alpha"))
    return CheckReport("condition2", PASS, detail={"alphas": len(levels)})


def check_equivalence_2_3(space, selfmap):
    """
    Run the condition (2) and (3) deciders independently and compare.

    They are equivalent, so a disagreement certifies a bug in this package.

    Returns:
        CheckReport: PASS iff both verdicts agree.
    """
    cond2 = check_condition2_finite(space, selfmap)
    cond3 = check_condition3_finite(space, selfmap)
    detail = {"condition2": cond2.verdict, "condition3": cond3.verdict}
    if cond2.verdict == cond3.verdict:
        return CheckReport("equivalence_2_3", PASS, detail=detail)
    logger.error("conditions (2) and (3) disagree on %s under %s: %s vs %s",
                 space.name, selfmap.name, cond2.verdict, cond3.verdict)
    witness = {"points": [], "values": [], "relation": "condition (2) and (3) verdicts differ",
               "condition2": cond2.witness, "condition3": cond3.witness}
    return CheckReport("equivalence_2_3", FAIL, witness=witness, detail=detail)


def nonexpansive_on_positive(space, selfmap, tol=None):
    """
    Check p(fy, fx) <= p(y, x) for all pairs with p(y, x) > 0.

    Finite spaces are scanned pair by pair, continuous spaces on seeded pairs.

    Returns:
        CheckReport:
    """
    selfmap.check_compatible(space)
    if space.is_finite:
        for y, x in itertools.product(space.points(), repeat=2):
            d = space.distance(y, x)
            d_image = space.distance(selfmap.apply(y), selfmap.apply(x))
            if d > 0 and d_image > d:
                return CheckReport("nonexpansive", FAIL,
                                   witness=_pair_witness(space, selfmap, y, x, d, d_image,
                                                         "p(fy,fx) > p(y,x) > 0"))
        return CheckReport("nonexpansive", PASS, detail={"pairs": space.size ** 2})

    tol = _tolerances(tol)
    ys, xs, d, d_image = _sampled_pairs(space, selfmap, tol)
    hits = np.flatnonzero((d > 0) & (d_image > d + tol.tol_zero))
    if len(hits):
        k = hits[0]
        return CheckReport("nonexpansive", FAIL,
                           witness=_pair_witness(space, selfmap, ys[k], xs[k], d[k], d_image[k],
                                                 "p(fy,fx) > p(y,x) > 0"))
    return CheckReport("nonexpansive", PASS_SAMPLED, detail={"pairs": len(d)})


def _sampled_pairs(space, selfmap, tol):
    selfmap.check_compatible(space)
    ys, xs = Sampler(space.box, tol.seed).pairs(tol.sample_count)
    d = space.distance_batch(ys, xs)
    d_image = space.distance_batch(selfmap.apply_batch(ys), selfmap.apply_batch(xs))
    return ys, xs, d, d_image


def default_alphas(space, tol=None):
    """
    Deciles of the sampled distance distribution, the default alpha levels.

    Returns:
        list of float: distinct positive deciles, ascending
    """
    tol = _tolerances(tol)
    ys, xs = Sampler(space.box, tol.seed).pairs(tol.sample_count)
    d = space.distance_batch(ys, xs)
    deciles = np.percentile(d, np.arange(10, 100, 10))
    return sorted(set(float(a) for a in deciles if a > 0))


def _alpha_levels(space, alphas, tol, include_deciles=True):
    levels = set(default_alphas(space, tol)) if include_deciles else set()
    if alphas is not None:
        levels |= set(float(a) for a in alphas)
    if not levels or any(not a > 0 for a in levels):
        raise ConfigurationError("alphas must be positive")
    return sorted(levels)


def _epsilon_grid(epsilon_grid, alpha):
    """The candidate eps at level alpha, largest first."""
    if epsilon_grid is None:
        epsilon_grid = [alpha * fraction for fraction in config["EPSILON_FRACTIONS"]]
    grid = sorted(set(float(e) for e in epsilon_grid), reverse=True)
    if not grid or any(not e > 0 for e in grid):
        raise ConfigurationError("epsilon grid must be a nonempty list of positive numbers")
    return grid


def _sampled_condition(name, space, selfmap, alphas, epsilon_grid, tol, band_of, include_deciles):
    tol = _tolerances(tol)
    levels = _alpha_levels(space, alphas, tol, include_deciles)
    # reject a bad grid before sampling
    _epsilon_grid(epsilon_grid, 1.0)
    ys, xs, d, d_image = _sampled_pairs(space, selfmap, tol)

    profile = ModulusProfile()
    failed, witnesses = [], []
    for alpha in levels:
        accepted = None
        offending = None
        for eps in _epsilon_grid(epsilon_grid, alpha):
            band = band_of(d, alpha, eps)
            if band is None:
                continue
            hits = np.flatnonzero(band & (d_image > alpha + tol.tol_zero))
            if len(hits) == 0:
                accepted = eps
                break
            offending = hits[0]
        if accepted is not None:
            profile.add(alpha, accepted, SAMPLED)
            continue
        if offending is None:
            # no admissible eps in the grid, fall back to alpha / 2
            eps = alpha / 2
            hits = np.flatnonzero(band_of(d, alpha, eps) & (d_image > alpha + tol.tol_zero))
            if len(hits) == 0:
                profile.add(alpha, eps, SAMPLED)
                continue
            offending = hits[0]
        k = offending
        failed.append(alpha)
        witnesses.append(_pair_witness(space, selfmap, ys[k], xs[k], d[k], d_image[k],
                                       "p(y,x) in band of alpha={} but p(fy,fx) > alpha".format(alpha)))

    detail = {"alphas": levels, "pairs": len(d), "failed_alphas": failed}
    if failed:
        detail["witnesses"] = witnesses
        return CheckReport(name, FAIL, witness=witnesses[0], detail=detail, profile=profile)
    return CheckReport(name, PASS_SAMPLED, detail=detail, profile=profile)


def _band3(d, alpha, eps):
    return (d >= alpha) & (d < alpha + eps)


def _band2(d, alpha, eps):
    if not eps < alpha:
        return None
    return (d > alpha - eps) & (d < alpha + eps)


def check_condition3_sampled(space, selfmap, alphas=None, epsilon_grid=None, tol=None,
                             include_deciles=True):
    """
    Test condition (3) on a continuous space.

    For each alpha (the sampled deciles plus `alphas`) the largest eps of
    `epsilon_grid` is sought for which no sampled pair in the band
    [alpha, alpha + eps) has p(fy, fx) > alpha. If every eps fails the
    offending pair of the smallest eps is reported.

    Args:
        space (ContinuousSpace):
        selfmap (ContinuousMap):
        alphas (list of float): extra alpha levels
        epsilon_grid (list of float): candidate eps, defaults to alpha times
            each of config["EPSILON_FRACTIONS"]
        tol (Tolerances): seed and sample count
        include_deciles (bool): also test the deciles of the sampled distances

    Returns:
        CheckReport: `profile` holds the accepted levels, detail["failed_alphas"]
            the levels without an admissible eps.
    """
    return _sampled_condition("condition3", space, selfmap, alphas, epsilon_grid, tol, _band3,
                              include_deciles)


def check_condition2_sampled(space, selfmap, alphas=None, epsilon_grid=None, tol=None,
                             include_deciles=True):
    """
    Test condition (2) on a continuous space.

    Like `check_condition3_sampled` with the open band (alpha - eps, alpha + eps);
    only eps < alpha are tried (alpha / 2 if the grid has none).
    """
    return _sampled_condition("condition2", space, selfmap, alphas, epsilon_grid, tol, _band2,
                              include_deciles)


def banach_epsilon(c, alpha, epsilon_max=None):
    """
    The largest eps with c (alpha + eps) <= alpha.

    Args:
        c (ContractionFactor or float): contraction factor, 0 <= c < 1
        alpha (float): level, > 0
        epsilon_max (float): returned for c = 0, where every eps works;
            defaults to config["EPSILON_MAX"]

    Returns:
        float: alpha (1 - c) / c

    Raises:
        ConfigurationError: if c is not in [0, 1) or alpha <= 0

    >>> banach_epsilon(0.5, 1.0)
    1.0
    """
    if not isinstance(c, ContractionFactor):
        c = ContractionFactor(float(c))
    if not alpha > 0:
        raise ConfigurationError("alpha must be positive, got {}".format(alpha))
    if c.c == 0:
        return float(epsilon_max if epsilon_max is not None else config["EPSILON_MAX"])
    return alpha * (1 - c.c) / c.c


def banach_profile(c, alphas, epsilon_max=None):
    """ModulusProfile of a Banach contraction at the given levels (scope closed_form)."""
    profile = ModulusProfile()
    for alpha in alphas:
        profile.add(alpha, banach_epsilon(c, alpha, epsilon_max), CLOSED_FORM)
    return profile
