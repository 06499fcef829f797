"""
Checks of the felt metric axioms, 0-completeness and 0-continuity.

A distance p is a felt metric if
    * (indiscernibility)  p(x, y) = 0 yields x = y,
    * (symmetry)          p(x, y) = p(y, x),
    * (felt continuity)   for each eps > 0 there is a delta > 0 such that
                          p(z, y) < delta yields |p(z, x) - p(y, x)| < eps.

On finite spaces all checks are exhaustive and compare tabulated values
exactly. On continuous spaces they scan seeded samples (see
`feltfp.sampling`) and can at best return PASS_SAMPLED.

Failure witnesses are always the lexicographically smallest offending
tuple of the scan, so they do not depend on evaluation order.

The delta of felt continuity is read uniformly over all triples; a delta
depending on the base point x is not checked.
"""

import logging

import numpy as np

from feltfp import config
from feltfp.core import AxiomError, ConfigurationError, Tolerances
from feltfp.reports import (CheckReport, DeltaCertificate, EXHAUSTIVE, FAIL, PASS,
                            PASS_SAMPLED, SAMPLED, make_witness)
from feltfp.sampling import Sampler, griditer

logger = logging.getLogger(__name__)

# grid points per axis at which 0-continuity is tested on continuous spaces
CONTINUITY_GRID_POINTS = 5
# halvings of the step along each sampled 0-convergent sequence
SEQUENCE_LENGTH = 64


def _tolerances(tol):
    return tol if tol is not None else Tolerances.from_config(config)


def _first(mask):
    """Lexicographically smallest index of a True entry, or None."""
    hits = np.argwhere(mask)
    if len(hits) == 0:
        return None
    return tuple(int(i) for i in hits[0])


def check_indiscernibility(space, tol=None):
    """
    Check that p(x, y) = 0 only for x = y.

    Self-distance is not constrained, p(x, x) > 0 passes.

    Args:
        space (FeltSpace):
        tol (Tolerances): sampling parameters and the zero threshold for
            continuous spaces

    Returns:
        CheckReport: witness (x, y) with x != y and p(x, y) = 0 on failure.
    """
    if space.is_finite:
        mat = space.matrix
        hit = _first((mat == 0) & ~np.eye(space.size, dtype=bool))
        if hit is not None:
            i, j = hit
            return CheckReport("indiscernibility", FAIL,
                               witness=make_witness(space, [i, j], [mat[i, j]], "p(x,y) = 0 for x != y"))
        return CheckReport("indiscernibility", PASS, detail={"pairs": space.size ** 2})

    tol = _tolerances(tol)
    xs, ys = Sampler(space.box, tol.seed).pairs(tol.sample_count)
    values = space.distance_batch(xs, ys)
    separation = np.abs(np.subtract(xs, ys))
    if space.box.dim > 1:
        separation = separation.max(axis=-1)
    hit = _first((separation > tol.tol_zero) & (values < tol.tol_zero))
    if hit is not None:
        k = hit[0]
        return CheckReport("indiscernibility", FAIL,
                           witness=make_witness(space, [xs[k], ys[k]], [values[k]],
                                                "p(x,y) < tol_zero for x != y"))
    return CheckReport("indiscernibility", PASS_SAMPLED, detail={"pairs": len(values)})


def check_symmetry(space, tol=None):
    """
    Check that p(x, y) = p(y, x).

    Returns:
        CheckReport: witness (x, y) with values (p(x, y), p(y, x)) on failure.
    """
    if space.is_finite:
        mat = space.matrix
        hit = _first(mat != mat.T)
        if hit is not None:
            i, j = hit
            return CheckReport("symmetry", FAIL,
                               witness=make_witness(space, [i, j], [mat[i, j], mat[j, i]],
                                                    "p(x,y) != p(y,x)"))
        return CheckReport("symmetry", PASS, detail={"pairs": space.size ** 2})

    tol = _tolerances(tol)
    xs, ys = Sampler(space.box, tol.seed).pairs(tol.sample_count)
    forward = space.distance_batch(xs, ys)
    backward = space.distance_batch(ys, xs)
    hit = _first(np.abs(forward - backward) > tol.tol_zero)
    if hit is not None:
        k = hit[0]
        return CheckReport("symmetry", FAIL,
                           witness=make_witness(space, [xs[k], ys[k]], [forward[k], backward[k]],
                                                "|p(x,y) - p(y,x)| > tol_zero"))
    return CheckReport("symmetry", PASS_SAMPLED, detail={"pairs": len(forward)})


def _delta_finite(space, epsilon):
    # indexed [x, y, z]
    mat = space.matrix
    d_zx = mat.T[:, None, :]
    d_yx = mat.T[:, :, None]
    d_zy = mat.T[None, :, :]
    spread = np.abs(d_zx - d_yx)
    violating = spread >= epsilon
    if not np.any(violating):
        return DeltaCertificate(epsilon, max(1.0, float(mat.max())), EXHAUSTIVE)
    d_zy = np.broadcast_to(d_zy, violating.shape)
    delta = float(d_zy[violating].min())
    if delta > 0:
        return DeltaCertificate(epsilon, delta, EXHAUSTIVE)
    x, y, z = _first(violating & (d_zy == 0))
    return CheckReport("felt_continuity", FAIL,
                       witness=make_witness(space, [x, y, z], [mat[z, y], mat[z, x], mat[y, x]],
                                            "p(z,y) = 0 but |p(z,x) - p(y,x)| >= epsilon",
                                            epsilon=epsilon))


def _delta_sampled(space, epsilon, triples, tol):
    xs, ys, zs = triples
    d_zx = space.distance_batch(zs, xs)
    d_yx = space.distance_batch(ys, xs)
    d_zy = space.distance_batch(zs, ys)
    violating = np.abs(d_zx - d_yx) >= epsilon
    if not np.any(violating):
        return DeltaCertificate(epsilon, max(1.0, float(d_zy.max())), SAMPLED)
    delta = float(d_zy[violating].min())
    if delta > tol.tol_zero:
        return DeltaCertificate(epsilon, delta, SAMPLED)
    k = _first(violating & (d_zy <= tol.tol_zero))[0]
    return CheckReport("felt_continuity", FAIL,
                       witness=make_witness(space, [xs[k], ys[k], zs[k]], [d_zy[k], d_zx[k], d_yx[k]],
                                            "p(z,y) <= tol_zero but |p(z,x) - p(y,x)| >= epsilon",
                                            epsilon=epsilon))


def check_felt_continuity(space, epsilons, tol=None):
    """
    Compute a delta for each epsilon of the felt continuity condition.

    On a finite space delta*(eps) is the least p(z, y) over the triples with
    |p(z, x) - p(y, x)| >= eps. If no triple qualifies any delta works and
    max(1, largest distance) is returned, which keeps certificates monotone
    in eps. delta*(eps) = 0 is a violation.

    Args:
        space (FeltSpace):
        epsilons (list of float): positive epsilons to test
        tol (Tolerances): sampling parameters for continuous spaces

    Returns:
        list of tuple: (epsilon, DeltaCertificate or failed CheckReport)

    Raises:
        ConfigurationError: if epsilons is empty or not positive
    """
    epsilons = [float(eps) for eps in epsilons]
    if not epsilons or any(not eps > 0 for eps in epsilons):
        raise ConfigurationError("epsilons must be a nonempty list of positive numbers")
    if space.is_finite:
        return [(eps, _delta_finite(space, eps)) for eps in epsilons]
    tol = _tolerances(tol)
    triples = Sampler(space.box, tol.seed).triples(tol.sample_count)
    return [(eps, _delta_sampled(space, eps, triples, tol)) for eps in epsilons]


def felt_continuity_report(space, epsilons, tol=None):
    """Summarize `check_felt_continuity` as one report (the first failure, if any)."""
    results = check_felt_continuity(space, epsilons, tol)
    for _, outcome in results:
        if isinstance(outcome, CheckReport):
            return outcome
    verdict = PASS if space.is_finite else PASS_SAMPLED
    return CheckReport("felt_continuity", verdict,
                       detail={"certificates": [cert.to_dict() for _, cert in results]})


def check_felt_metric(space, epsilons=None, tol=None):
    """
    Run indiscernibility, symmetry and felt continuity.

    Returns:
        list of CheckReport: in that order
    """
    if epsilons is None:
        epsilons = config["FELT_EPSILONS"]
    return [
        check_indiscernibility(space, tol),
        check_symmetry(space, tol),
        felt_continuity_report(space, epsilons, tol),
    ]


def check_zero_completeness_finite(space, tol=None, trials=None):
    """
    Certify that a finite space is 0-complete.

    If p(x_n, x_m) -> 0 on a finite space, the tail of the sequence has
    p(x_n, x_m) = 0, which by indiscernibility makes it constant at some x
    with p(x, x) = 0, and x is a 0-limit. The argument is structural; in
    addition `trials` seeded candidate sequences are simulated and checked.

    Args:
        space (FiniteSpace):
        tol (Tolerances): `seed` and `window` drive the simulation
        trials (int): number of simulated sequences

    Returns:
        CheckReport: PASS with detail "structural" (FAIL only for a sequence
            without 0-limit, which indiscernibility rules out).

    Raises:
        ConfigurationError: for continuous spaces
        AxiomError: if the space violates indiscernibility
    """
    if not space.is_finite:
        raise ConfigurationError("0-completeness can only be certified on finite spaces")
    if not check_indiscernibility(space).passed:
        raise AxiomError("0-completeness argument needs p(x,y) = 0 => x = y, violated by {}".format(
            space.name))
    tol = _tolerances(tol)
    if trials is None:
        trials = config["COMPLETENESS_TRIALS"]

    mat = space.matrix
    n = space.size
    tail_length = max(tol.window, 4)
    rng = np.random.default_rng(tol.seed)
    hypothesis_met = 0
    for _ in range(trials):
        prefix = rng.integers(0, n, size=tail_length)
        if rng.random() < 0.5:
            tail = np.full(tail_length, rng.integers(0, n))
        else:
            tail = rng.integers(0, n, size=tail_length)
        if np.any(mat[np.ix_(tail, tail)] != 0):
            continue
        hypothesis_met += 1
        limits = [x for x in range(n) if np.all(mat[tail, x] == 0)]
        if not limits:
            sequence = np.concatenate([prefix, tail]).tolist()
            return CheckReport("zero_completeness", FAIL,
                               witness=make_witness(space, sequence, mat[tail, tail].tolist(),
                                                    "p(x_n,x_m) -> 0 without a 0-limit"))
    return CheckReport("zero_completeness", PASS,
                       detail={"argument": "structural", "trials": trials,
                               "hypothesis_met": hypothesis_met})


def _zero_steps(space, x, tol):
    """
    Halving step lengths from half the box width down to the smallest step
    that still moves x: at least tol_zero / 8 and a few ulps of x.
    """
    floor = max(tol.tol_zero / 8, 4 * float(np.spacing(np.max(np.abs(x)))))
    steps = 0.5 * float(np.max(space.box.width())) * 0.5 ** np.arange(SEQUENCE_LENGTH)
    return steps[steps >= floor]


def _zero_sequences(space, x, steps, count, rng):
    """
    Sequences x + h_k u with random unit directions u. A direction leaving
    the box is reversed, the result is clipped to the box.
    """
    box = space.box
    sequences = []
    for _ in range(count):
        if box.dim == 1:
            offsets = steps * rng.choice([-1.0, 1.0])
        else:
            u = rng.normal(size=box.dim)
            offsets = steps[:, None] * (u / np.linalg.norm(u))
        if not np.all(box.contains_batch(x + offsets)):
            offsets = -offsets
        sequences.append(box.clip(x + offsets))
    return sequences


def check_zero_continuity(space, selfmap, x, tol=None):
    """
    Check that f is 0-continuous at x: p(x_n, x) -> 0 yields p(fx_n, fx) -> 0.

    On a finite space a 0-convergent sequence is eventually constant at x, so
    the exact rule is: pass iff p(x, x) > 0 (vacuous, nothing 0-converges to
    x) or p(fx, fx) = 0. On a continuous space seeded sequences with halving
    steps (ending just below tol_zero, never within a few ulps of x) are
    tested on those of their last `window` members that differ from x.

    Returns:
        CheckReport:
    """
    selfmap.check_compatible(space)
    x = space.validate_point(x)
    fx = selfmap.apply(x)

    if space.is_finite:
        mat = space.matrix
        if mat[x, x] > 0:
            return CheckReport("zero_continuity", PASS, detail={"point": x, "vacuous": True})
        if mat[fx, fx] == 0:
            return CheckReport("zero_continuity", PASS, detail={"point": x, "vacuous": False})
        return CheckReport("zero_continuity", FAIL,
                           witness=make_witness(space, [x, fx], [mat[x, x], mat[fx, fx]],
                                                "p(x,x) = 0 but p(fx,fx) > 0"))

    tol = _tolerances(tol)
    point = space.point_to_json(x)
    if space.distance(x, x) > tol.tol_zero:
        return CheckReport("zero_continuity", PASS_SAMPLED, detail={"point": point, "vacuous": True})

    rng = np.random.default_rng(tol.seed)
    steps = _zero_steps(space, x, tol)
    tested = 0
    for sequence in _zero_sequences(space, x, steps, config["ZERO_SEQUENCES"], rng):
        tail = sequence[-tol.window:]
        moved = tail != x if space.box.dim == 1 else np.any(tail != x, axis=-1)
        tail = tail[moved]
        if len(tail) == 0:
            continue
        targets = space.box.as_batch([x] * len(tail))
        if np.any(space.distance_batch(tail, targets) >= tol.tol_zero):
            continue
        tested += 1
        images = selfmap.apply_batch(tail)
        image_targets = space.box.as_batch([fx] * len(tail))
        drift = space.distance_batch(images, image_targets)
        hit = _first(drift >= tol.tol_zero)
        if hit is not None:
            k = hit[0]
            return CheckReport("zero_continuity", FAIL,
                               witness=make_witness(space, [tail[k], x], [drift[k]],
                                                    "p(x_n,x) -> 0 but p(fx_n,fx) >= tol_zero"))
    return CheckReport("zero_continuity", PASS_SAMPLED,
                       detail={"point": point, "vacuous": False, "sequences": tested})


def check_zero_continuity_everywhere(space, selfmap, tol=None):
    """
    Check that f is 0-continuous at each point.

    Finite spaces are scanned exhaustively; continuous spaces are tested at a
    coarse grid of `CONTINUITY_GRID_POINTS` points per axis.

    Returns:
        CheckReport: the first failing point's report, if any.
    """
    if space.is_finite:
        points = list(space.points())
    else:
        points = list(griditer(space.box, CONTINUITY_GRID_POINTS))
    for x in points:
        report = check_zero_continuity(space, selfmap, x, tol)
        logger.debug("0-continuity of %s at %s: %s", selfmap.name, space.format_point(x), report.verdict)
        if not report.passed:
            return report
    verdict = PASS if space.is_finite else PASS_SAMPLED
    return CheckReport("zero_continuity", verdict, detail={"points": len(points)})
