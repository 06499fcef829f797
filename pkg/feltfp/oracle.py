"""
Brute-force ground truth over small finite spaces.

`stress_theorem` enumerates every (space, map) pair of a small size over a
finite alphabet of distance values and checks the fixed point theorem on all
of them; `fuzz_equivalence` draws random pairs and compares the condition (2)
and (3) deciders. Any counterexample is a bug certificate, since both
statements are proved.

Alphabet values are parsed from exact decimal strings, the distance tables
then compare them exactly; there is no floating tolerance inside the oracle.
"""

import itertools
import logging
import time
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from multiprocessing import Pool

import numpy as np

from feltfp import config, default_settings
from feltfp.axioms import check_indiscernibility, check_symmetry
from feltfp.contraction import check_condition2_finite, check_condition3_finite
from feltfp.core import ConfigurationError, FiniteMap, FiniteSpace, Tolerances
from feltfp.solver import VANISHED, solve
from feltfp.spacefile import space_document

logger = logging.getLogger(__name__)

# cases handed to a worker at once
CHUNK_SIZE = 64
# largest space size the oracle enumerates
MAX_ENUMERATION_SIZE = 4


def parse_alphabet(text):
    """
    Parse a comma separated list of nonnegative decimals.

    Returns:
        tuple of Decimal: distinct values, ascending

    Raises:
        ConfigurationError: for empty, malformed or negative values

    >>> parse_alphabet("1, 0.5,0,0.50")
    (Decimal('0'), Decimal('0.5'), Decimal('1'))
    """
    if isinstance(text, str):
        tokens = [t.strip() for t in text.split(",")]
    else:
        tokens = [str(t) for t in text]
    values = {}
    for token in tokens:
        try:
            value = Decimal(token)
        except InvalidOperation:
            raise ConfigurationError("invalid alphabet value {!r}".format(token))
        if not value.is_finite() or value < 0:
            raise ConfigurationError("alphabet values must be finite and nonnegative, got {!r}".format(token))
        values.setdefault(value, value)
    if not values:
        raise ConfigurationError("the alphabet is empty")
    return tuple(sorted(values))


@dataclass
class EnumerationConfig:
    """
    Parameters of the exhaustive and randomized oracle runs.

    Args:
        n (int): points per space, 1..MAX_ENUMERATION_SIZE
        alphabet (str or sequence): distance values
        include_nonzero_diagonal (bool): let self-distances range over the alphabet
            (otherwise they are 0)
        enforce_indiscernibility (bool): draw off-diagonal entries from the
            alphabet without 0, so every space satisfies p(x, y) = 0 => x = y
        seed (int): seed of the randomized mode
        trials (int): random cases of the randomized mode
        workers (int): processes evaluating the case grid
    """
    n: int
    alphabet: object = default_settings.ALPHABET
    include_nonzero_diagonal: bool = True
    enforce_indiscernibility: bool = True
    seed: int = default_settings.SEED
    trials: int = default_settings.TRIALS
    workers: int = default_settings.WORKERS

    def __post_init__(self):
        if not 1 <= self.n <= MAX_ENUMERATION_SIZE:
            raise ConfigurationError("n must be between 1 and {}, got {}".format(MAX_ENUMERATION_SIZE, self.n))
        self.alphabet = parse_alphabet(self.alphabet)
        if self.trials < 0:
            raise ConfigurationError("trials must be nonnegative, got {}".format(self.trials))
        if self.workers < 1:
            raise ConfigurationError("workers must be at least 1, got {}".format(self.workers))
        if self.enforce_indiscernibility and self.n > 1 and not self.off_diagonal_values:
            raise ConfigurationError("the alphabet {} has no nonzero value for the off-diagonal".format(
                ",".join(str(v) for v in self.alphabet)))

    @property
    def off_diagonal_values(self):
        if self.enforce_indiscernibility:
            return tuple(v for v in self.alphabet if v != 0)
        return self.alphabet

    @property
    def diagonal_values(self):
        if self.include_nonzero_diagonal:
            return self.alphabet
        return (Decimal(0),)

    def to_dict(self):
        return {
            "n": self.n,
            "alphabet": [str(v) for v in self.alphabet],
            "include_nonzero_diagonal": self.include_nonzero_diagonal,
            "enforce_indiscernibility": self.enforce_indiscernibility,
            "seed": self.seed,
            "trials": self.trials,
        }


@dataclass
class StressSummary:
    """
    Outcome of an oracle run. `counterexamples` is sorted by case index and
    empty on a correct implementation.
    """
    cases_total: int = 0
    cases_condition_met: int = 0
    cases_hypothesis_met: int = 0
    cases_certified: int = 0
    counterexamples: list = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def passed(self):
        return not self.counterexamples

    def to_dict(self, include_timing=False):
        doc = {
            "cases_total": self.cases_total,
            "cases_condition_met": self.cases_condition_met,
            "cases_hypothesis_met": self.cases_hypothesis_met,
            "cases_certified": self.cases_certified,
            "counterexamples": self.counterexamples,
        }
        if include_timing:
            doc["wall_time"] = self.wall_time
        return doc


def expected_space_count(cfg):
    """
    Closed-form number of spaces `enumerate_spaces` yields.

    >>> expected_space_count(EnumerationConfig(3, "0,0.5,1"))
    216
    """
    pairs = cfg.n * (cfg.n - 1) // 2
    return len(cfg.off_diagonal_values) ** pairs * len(cfg.diagonal_values) ** cfg.n


def _matrix(n, off_diagonal, diagonal):
    mat = [[0.0] * n for _ in range(n)]
    for (i, j), value in zip(itertools.combinations(range(n), 2), off_diagonal):
        mat[i][j] = mat[j][i] = float(value)
    for i, value in enumerate(diagonal):
        mat[i][i] = float(value)
    return mat


def _matrices(cfg):
    pairs = cfg.n * (cfg.n - 1) // 2
    for off_diagonal in itertools.product(cfg.off_diagonal_values, repeat=pairs):
        for diagonal in itertools.product(cfg.diagonal_values, repeat=cfg.n):
            yield _matrix(cfg.n, off_diagonal, diagonal)


def enumerate_spaces(cfg):
    """
    Yield every symmetric distance table over the alphabet.

    The upper off-diagonal entries (row by row) vary slowest, the diagonal
    fastest, both in ascending alphabet order.

    Raises:
        RuntimeError: if the count differs from `expected_space_count`
    """
    count = 0
    for mat in _matrices(cfg):
        yield FiniteSpace(mat, name="enum{}".format(count))
        count += 1
    if count != expected_space_count(cfg):
        raise RuntimeError("enumerated {} spaces, expected {}".format(count, expected_space_count(cfg)))


def enumerate_selfmaps(n):
    """
    Yield all n**n index tables in lexicographic order.

    >>> [m.table for m in enumerate_selfmaps(2)]
    [(0, 0), (0, 1), (1, 0), (1, 1)]
    """
    if not 1 <= n <= MAX_ENUMERATION_SIZE:
        raise ConfigurationError("n must be between 1 and {}, got {}".format(MAX_ENUMERATION_SIZE, n))
    for table in itertools.product(range(n), repeat=n):
        yield FiniteMap(table)


def _counterexample(index, space, selfmap, reason, **extra):
    doc = {"case": index, "reason": reason, "space": space_document(space, selfmap)}
    doc.update(extra)
    return doc


def _theorem_case(index, matrix, table, tol):
    """
    Check the fixed point theorem on one (space, map) pair.

    Returns:
        tuple: (index, condition_met, hypothesis_met, certified, counterexamples)
    """
    space = FiniteSpace(matrix, name="case{}".format(index))
    selfmap = FiniteMap(table)
    if not (check_indiscernibility(space).passed and check_symmetry(space).passed):
        return index, False, 0, 0, []
    if not check_condition3_finite(space, selfmap).passed:
        return index, False, 0, 0, []

    hypothesis_met = certified = 0
    counterexamples = []
    for x0 in space.points():
        result = solve(space, selfmap, x0, tol)
        if result.theorem_violation_candidate:
            counterexamples.append(_counterexample(index, space, selfmap, "theorem_violation_candidate",
                                                   x0=x0, result=result.to_dict(space)))
        if result.trace.stopped_reason != VANISHED:
            continue
        hypothesis_met += 1
        x = result.x_star
        if result.certified and result.residual_fix == 0 and result.self_dist == 0 \
                and selfmap.table[x] == x:
            certified += 1
        else:
            counterexamples.append(_counterexample(index, space, selfmap, "not_certified",
                                                   x0=x0, result=result.to_dict(space)))
    return index, True, hypothesis_met, certified, counterexamples


def _theorem_case_wrapper(args):
    """wrapper function for using the multiprocessing module with multiple arguments"""
    return _theorem_case(*args)


def _equivalence_case(index, matrix, table):
    space = FiniteSpace(matrix, name="case{}".format(index))
    selfmap = FiniteMap(table)
    cond2 = check_condition2_finite(space, selfmap)
    cond3 = check_condition3_finite(space, selfmap)
    if cond2.verdict == cond3.verdict:
        return index, cond3.passed, 0, 0, []
    return index, cond3.passed, 0, 0, [_counterexample(
        index, space, selfmap, "condition2_condition3_disagree",
        condition2=cond2.to_dict(), condition3=cond3.to_dict())]


def _equivalence_case_wrapper(args):
    """wrapper function for using the multiprocessing module with multiple arguments"""
    return _equivalence_case(*args)


def _run(wrapper, cases, workers):
    """Evaluate cases in order, in a process pool for workers > 1."""
    if workers == 1:
        yield from map(wrapper, cases)
        return
    with Pool(workers) as p:
        yield from p.imap(wrapper, cases, chunksize=CHUNK_SIZE)


def _summarize(outcomes):
    summary = StressSummary()
    for index, condition_met, hypothesis_met, certified, counterexamples in outcomes:
        summary.cases_total += 1
        summary.cases_condition_met += int(condition_met)
        summary.cases_hypothesis_met += hypothesis_met
        summary.cases_certified += certified
        summary.counterexamples.extend(counterexamples)
    summary.counterexamples.sort(key=lambda c: c["case"])
    return summary


def stress_theorem(cfg, tol=None):
    """
    Check the fixed point theorem on every (space, map) pair of `cfg`.

    For pairs passing indiscernibility, symmetry and condition (3), every
    start point is solved. Whenever its orbit vanishes the result must be a
    certified fixed point with p(x, x) = p(x, fx) = 0 and m[x] = x, and the
    theorem violation flag must stay down. Finite spaces are 0-complete, so
    the hypotheses of the theorem are met.

    Args:
        cfg (EnumerationConfig):
        tol (Tolerances):

    Returns:
        StressSummary: `cases_hypothesis_met` and `cases_certified` count
            (space, map, start point) runs.
    """
    if tol is None:
        tol = Tolerances.from_config(config)
    start = time.perf_counter()
    tables = [m.table for m in enumerate_selfmaps(cfg.n)]
    cases = ((index, mat, table, tol)
             for index, (mat, table) in enumerate(itertools.product(_matrices(cfg), tables)))
    summary = _summarize(_run(_theorem_case_wrapper, cases, cfg.workers))

    expected = expected_space_count(cfg) * len(tables)
    if summary.cases_total != expected:
        raise RuntimeError("checked {} cases, expected {}".format(summary.cases_total, expected))
    summary.wall_time = time.perf_counter() - start
    logger.info("stress n=%d: %d cases, %d meet condition (3), %d/%d runs certified, "
                "%d counterexamples in %.2fs", cfg.n, summary.cases_total, summary.cases_condition_met,
                summary.cases_certified, summary.cases_hypothesis_met, len(summary.counterexamples),
                summary.wall_time)
    return summary


def random_case(cfg, rng):
    """
    Draw a (distance table, map table) pair with entries uniform over the alphabet.

    The table is symmetric; the diagonal and the off-diagonal follow the
    restrictions of `cfg`.
    """
    n = cfg.n
    off = cfg.off_diagonal_values
    diag = cfg.diagonal_values
    pairs = n * (n - 1) // 2
    off_diagonal = [off[k] for k in rng.integers(0, len(off), size=pairs)] if pairs else []
    diagonal = [diag[k] for k in rng.integers(0, len(diag), size=n)]
    table = tuple(int(i) for i in rng.integers(0, n, size=n))
    return _matrix(n, off_diagonal, diagonal), table


def fuzz_equivalence(cfg):
    """
    Compare the condition (2) and (3) deciders on `cfg.trials` random pairs.

    All cases are drawn up front from ``default_rng(cfg.seed)``, so the
    summary does not depend on the worker count.

    Returns:
        StressSummary: disagreements as counterexamples.
    """
    start = time.perf_counter()
    rng = np.random.default_rng(cfg.seed)
    cases = [(index,) + random_case(cfg, rng) for index in range(cfg.trials)]
    summary = _summarize(_run(_equivalence_case_wrapper, cases, cfg.workers))
    summary.wall_time = time.perf_counter() - start
    logger.info("fuzz n=%d seed=%d: %d cases, %d counterexamples in %.2fs",
                cfg.n, cfg.seed, summary.cases_total, len(summary.counterexamples), summary.wall_time)
    return summary


def equivalence_grid(cfg):
    """Compare the condition (2) and (3) deciders on every (space, map) pair of `cfg`."""
    start = time.perf_counter()
    tables = [m.table for m in enumerate_selfmaps(cfg.n)]
    cases = ((index, mat, table)
             for index, (mat, table) in enumerate(itertools.product(_matrices(cfg), tables)))
    summary = _summarize(_run(_equivalence_case_wrapper, cases, cfg.workers))
    summary.wall_time = time.perf_counter() - start
    return summary


def band_brute_force(space, selfmap):
    """
    Decide condition (3) on a finite space by the literal quantifiers.

    For each alpha of a refinement grid (every positive distance value, the
    midpoints of neighbouring values, half the least positive value and the
    largest value plus 1) some eps of the candidate set (the gaps v - alpha
    to the larger distance values v, and 1) must make every pair with
    alpha <= p(y, x) < alpha + eps satisfy p(fy, fx) <= alpha. Plain loops,
    no vectorization, so it is independent of `check_condition3_finite`.

    Returns:
        tuple: (holds, failing_alpha), failing_alpha None if the condition holds
    """
    selfmap.check_compatible(space)
    points = list(space.points())
    pairs = [(y, x) for y in points for x in points]
    values = sorted(set(space.distance(y, x) for y, x in pairs))
    positive = [v for v in values if v > 0]
    if not positive:
        return True, None

    alphas = set(positive)
    alphas.update((a + b) / 2 for a, b in zip(values, values[1:]) if (a + b) / 2 > 0)
    alphas.add(positive[0] / 2)
    alphas.add(positive[-1] + 1)

    for alpha in sorted(alphas):
        # eps = upper - alpha; the band [alpha, upper) is tested against upper
        # itself, alpha + eps may round past it
        uppers = [v for v in values if v > alpha] + [alpha + 1.0]
        found = False
        for upper in uppers:
            ok = True
            for y, x in pairs:
                d = space.distance(y, x)
                if alpha <= d < upper and space.distance(selfmap.apply(y), selfmap.apply(x)) > alpha:
                    ok = False
                    break
            if ok:
                found = True
                break
        if not found:
            return False, alpha
    return True, None
