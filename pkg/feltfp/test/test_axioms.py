import unittest

import numpy as np
from hypothesis import given, settings, strategies as st

from feltfp.axioms import (check_felt_continuity, check_felt_metric, check_indiscernibility,
                           check_symmetry, check_zero_completeness_finite, check_zero_continuity,
                           check_zero_continuity_everywhere, felt_continuity_report)
from feltfp.builtin import discrete_space, make_map, make_space
from feltfp.contraction import (check_condition2_finite, check_condition3_finite,
                                check_condition3_sampled)
from feltfp.core import (AxiomError, ConfigurationError, ContinuousMap, FiniteMap, FiniteSpace,
                         apply, distance)
from feltfp.oracle import EnumerationConfig, enumerate_spaces
from feltfp.reports import DeltaCertificate, FAIL, PASS, PASS_SAMPLED


@st.composite
def symmetric_tables(draw, values=(0.0, 0.5, 1.0), max_size=4):
    n = draw(st.integers(min_value=1, max_value=max_size))
    mat = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            mat[i, j] = mat[j, i] = draw(st.sampled_from(values))
    return mat


@st.composite
def arbitrary_cases(draw, values=(0.0, 0.5, 1.0), max_size=3):
    """Tables without symmetry or indiscernibility, with a self-map."""
    n = draw(st.integers(min_value=1, max_value=max_size))
    mat = np.array(draw(st.lists(st.sampled_from(values), min_size=n * n, max_size=n * n))).reshape(n, n)
    table = draw(st.lists(st.integers(min_value=0, max_value=n - 1), min_size=n, max_size=n))
    return FiniteSpace(mat), FiniteMap(table)


def step_map(space):
    """0.2 left of 1/2, 0.8 right of it, 1/2 at 1/2."""
    return ContinuousMap(lambda x: np.where(x < 0.5, 0.2, np.where(x > 0.5, 0.8, 0.5)),
                         space.box, name="step")


class IndiscernibilityTestCase(unittest.TestCase):

    def test_discrete(self):
        report = check_indiscernibility(discrete_space(3))
        self.assertEqual(report.verdict, PASS)
        self.assertIsNone(report.witness)

    def test_positive_self_distance_passes(self):
        self.assertEqual(check_indiscernibility(FiniteSpace([[0.5, 1], [1, 0.5]])).verdict, PASS)

    def test_violation(self):
        report = check_indiscernibility(FiniteSpace([[0, 0], [0, 0]]))
        self.assertEqual(report.verdict, FAIL)
        self.assertEqual(report.witness["points"], [0, 1])
        self.assertEqual(report.witness["values"], [0.0])

    def test_maxpm_sampled(self):
        report = check_indiscernibility(make_space("maxpm:0,2"))
        self.assertEqual(report.verdict, PASS_SAMPLED)
        self.assertIsNone(report.witness)


class SymmetryTestCase(unittest.TestCase):

    def test_violation(self):
        report = check_symmetry(FiniteSpace([[0, 1], [0.5, 0]]))
        self.assertEqual(report.verdict, FAIL)
        self.assertEqual(report.witness["points"], [0, 1])
        self.assertEqual(report.witness["values"], [1.0, 0.5])

    def test_continuous(self):
        self.assertEqual(check_symmetry(make_space("euclid:0,1")).verdict, PASS_SAMPLED)
        self.assertEqual(check_symmetry(make_space("maxpm:0,2")).verdict, PASS_SAMPLED)

    @given(symmetric_tables())
    def test_symmetric_tables_pass(self, mat):
        self.assertEqual(check_symmetry(FiniteSpace(mat)).verdict, PASS)


class FeltContinuityTestCase(unittest.TestCase):

    def test_discrete(self):
        """On a metric |p(z,x) - p(y,x)| <= p(z,y), so delta = eps works."""
        results = check_felt_continuity(discrete_space(3), [0.5])
        eps, cert = results[0]
        self.assertIsInstance(cert, DeltaCertificate)
        self.assertGreaterEqual(cert.delta, 0.5)

    def test_zero_distance_violation(self):
        """p(z,y) = 0 between distinct points breaks felt continuity."""
        space = FiniteSpace([[0, 0, 1], [0, 0, 0], [1, 0, 0]])
        report = felt_continuity_report(space, [0.5])
        self.assertEqual(report.verdict, FAIL)
        self.assertEqual(len(report.witness["points"]), 3)
        self.assertEqual(report.witness["values"][0], 0.0)

    def test_continuous_spaces(self):
        for spec in ("euclid:0,1", "maxpm:0,2"):
            report = felt_continuity_report(make_space(spec), [1.0, 0.1])
            self.assertEqual(report.verdict, PASS_SAMPLED, spec)

    def test_invalid_epsilons(self):
        with self.assertRaises(ConfigurationError):
            check_felt_continuity(discrete_space(2), [])
        with self.assertRaises(ConfigurationError):
            check_felt_continuity(discrete_space(2), [0.0])

    def test_delta_monotone_on_enumerated_spaces(self):
        """Smaller epsilons never get larger deltas."""
        epsilons = [1.0, 0.5, 0.25, 0.1]
        for n, alphabet in ((1, "0,0.5,1"), (2, "0,0.5,1"), (3, "0,0.5,1"), (4, "0.5,1")):
            for space in enumerate_spaces(EnumerationConfig(n, alphabet)):
                results = check_felt_continuity(space, epsilons)
                deltas = [cert.delta for _, cert in results]
                for delta in deltas:
                    self.assertGreater(delta, 0)
                self.assertEqual(deltas, sorted(deltas, reverse=True))

    def test_unconstrained_delta(self):
        """With no triple spreading by epsilon the delta is max(1, largest distance)."""
        self.assertEqual(check_felt_continuity(discrete_space(2), [5.0])[0][1].delta, 1.0)
        self.assertEqual(check_felt_continuity(FiniteSpace([[0, 2], [2, 0]]), [5.0])[0][1].delta, 2.0)

    def test_check_felt_metric_order(self):
        reports = check_felt_metric(make_space("maxpm:0,2"))
        self.assertEqual([r.check_name for r in reports],
                         ["indiscernibility", "symmetry", "felt_continuity"])
        self.assertTrue(all(r.verdict == PASS_SAMPLED for r in reports))


class ZeroCompletenessTestCase(unittest.TestCase):

    def test_finite_structural(self):
        report = check_zero_completeness_finite(FiniteSpace([[0.5, 1], [1, 0]]))
        self.assertEqual(report.verdict, PASS)
        self.assertEqual(report.detail["argument"], "structural")
        self.assertGreater(report.detail["hypothesis_met"], 0)

    def test_all_positive_diagonal(self):
        """No sequence 0-converges, the space is vacuously 0-complete."""
        report = check_zero_completeness_finite(FiniteSpace([[1, 1], [1, 1]]))
        self.assertEqual(report.verdict, PASS)
        self.assertEqual(report.detail["hypothesis_met"], 0)

    def test_needs_indiscernibility(self):
        with self.assertRaises(AxiomError):
            check_zero_completeness_finite(FiniteSpace([[0, 0], [0, 0]]))

    def test_continuous_rejected(self):
        with self.assertRaises(ConfigurationError):
            check_zero_completeness_finite(make_space("euclid:0,1"))

    def test_enumerated_spaces(self):
        for n in (1, 2, 3):
            for space in enumerate_spaces(EnumerationConfig(n, "0,0.5,1")):
                self.assertEqual(check_zero_completeness_finite(space, trials=50).verdict, PASS)


class ZeroContinuityTestCase(unittest.TestCase):

    def setUp(self):
        # p(0,0) = 0, p(1,1) = 1, p(2,2) = 0
        self.space = FiniteSpace([[0, 1, 1], [1, 1, 1], [1, 1, 0]])

    def test_vacuous(self):
        report = check_zero_continuity(self.space, FiniteMap([0, 1, 2]), 1)
        self.assertEqual(report.verdict, PASS)
        self.assertTrue(report.detail["vacuous"])

    def test_zero_self_distance_preserved(self):
        report = check_zero_continuity(self.space, FiniteMap([2, 1, 0]), 0)
        self.assertEqual(report.verdict, PASS)
        self.assertFalse(report.detail["vacuous"])

    def test_violation(self):
        """p(0,0) = 0 while p(f0,f0) = p(1,1) = 1."""
        report = check_zero_continuity(self.space, FiniteMap([1, 1, 2]), 0)
        self.assertEqual(report.verdict, FAIL)
        self.assertEqual(report.witness["points"], [0, 1])

    def test_everywhere(self):
        self.assertEqual(check_zero_continuity_everywhere(self.space, FiniteMap([2, 1, 0])).verdict, PASS)
        report = check_zero_continuity_everywhere(self.space, FiniteMap([0, 1, 1]))
        self.assertEqual(report.verdict, FAIL)
        self.assertEqual(report.witness["points"], [2, 1])

    def test_continuous_maps(self):
        for space_spec, map_spec in [("euclid:0,1", "cos"), ("maxpm:0,2", "half"),
                                     ("euclid:0,1", "affine:0.5,0.3")]:
            space = make_space(space_spec)
            report = check_zero_continuity_everywhere(space, make_map(map_spec, space))
            self.assertEqual(report.verdict, PASS_SAMPLED, map_spec)

    def test_maxpm_origin(self):
        space = make_space("maxpm:0,2")
        report = check_zero_continuity(space, make_map("half", space), 0.0)
        self.assertEqual(report.verdict, PASS_SAMPLED)
        self.assertFalse(report.detail["vacuous"])
        self.assertGreater(report.detail["sequences"], 0)
        self.assertTrue(check_zero_continuity(space, make_map("half", space), 1.0).detail["vacuous"])

    def test_discontinuous_at_zero(self):
        """const:1 moves the only 0-limit point to a point with positive self-distance."""
        space = make_space("maxpm:0,2")
        report = check_zero_continuity(space, make_map("const:1", space), 0.0)
        self.assertEqual(report.verdict, FAIL)

    def test_interior_jump(self):
        space = make_space("euclid:0,1")
        report = check_zero_continuity(space, step_map(space), 0.5)
        self.assertEqual(report.verdict, FAIL)
        self.assertAlmostEqual(report.witness["values"][0], 0.3)
        self.assertEqual(check_zero_continuity_everywhere(space, step_map(space)).verdict, FAIL)

    def test_interior_sequences_move(self):
        """Every sequence reaches below tol_zero without collapsing onto x."""
        space = make_space("euclid:0,1")
        for x in (0.25, 0.5, 0.75):
            report = check_zero_continuity(space, make_map("cos", space), x)
            self.assertEqual(report.verdict, PASS_SAMPLED)
            self.assertEqual(report.detail["sequences"], 16)
        self.assertEqual(check_zero_continuity(space, step_map(space), 0.25).verdict, PASS_SAMPLED)


class WitnessTestCase(unittest.TestCase):
    """Failure witnesses reproduce their violation through core.distance."""

    def assertFiniteWitness(self, space, f, report):
        points, values = report.witness["points"], report.witness["values"]
        if report.check_name == "indiscernibility":
            i, j = points
            self.assertNotEqual(i, j)
            self.assertEqual(distance(space, i, j), values[0])
            self.assertEqual(values[0], 0)
        elif report.check_name == "symmetry":
            i, j = points
            self.assertEqual([distance(space, i, j), distance(space, j, i)], values)
            self.assertNotEqual(values[0], values[1])
        elif report.check_name == "felt_continuity":
            x, y, z = points
            self.assertEqual([distance(space, z, y), distance(space, z, x), distance(space, y, x)], values)
            self.assertEqual(values[0], 0)
            self.assertGreaterEqual(abs(values[1] - values[2]), report.witness["epsilon"])
        elif report.check_name == "zero_continuity":
            x, fx = points
            self.assertEqual(apply(f, x), fx)
            self.assertEqual([distance(space, x, x), distance(space, fx, fx)], values)
            self.assertEqual(values[0], 0)
            self.assertGreater(values[1], 0)
        else:
            y, x = points
            self.assertEqual(report.witness["images"], [apply(f, y), apply(f, x)])
            self.assertEqual(distance(space, y, x), values[0])
            self.assertEqual(distance(space, apply(f, y), apply(f, x)), values[1])
            self.assertGreater(values[0], 0)
            self.assertGreater(values[1], values[0])

    @settings(max_examples=300)
    @given(arbitrary_cases())
    def test_finite_witnesses(self, case):
        space, f = case
        reports = [check_indiscernibility(space), check_symmetry(space),
                   felt_continuity_report(space, [1.0, 0.5, 0.25]),
                   check_zero_continuity_everywhere(space, f),
                   check_condition2_finite(space, f), check_condition3_finite(space, f)]
        for report in reports:
            if report.verdict == FAIL:
                self.assertFiniteWitness(space, f, report)

    def test_enumerated_witnesses(self):
        for space in enumerate_spaces(EnumerationConfig(3, "0,0.5,1", enforce_indiscernibility=False)):
            for f in (FiniteMap([1, 2, 2]), FiniteMap([2, 0, 1])):
                for report in (check_indiscernibility(space), felt_continuity_report(space, [0.5]),
                               check_zero_continuity_everywhere(space, f), check_condition3_finite(space, f)):
                    if report.verdict == FAIL:
                        self.assertFiniteWitness(space, f, report)

    def test_sampled_witnesses(self):
        space = make_space("euclid:0,1")
        report = check_condition3_sampled(space, make_map("ident", space), alphas=[0.25])
        self.assertEqual(report.verdict, FAIL)
        y, x = report.witness["points"]
        self.assertAlmostEqual(distance(space, y, x), report.witness["values"][0], delta=1e-12)
        self.assertGreater(report.witness["values"][1], 0.25)

        f = step_map(space)
        report = check_zero_continuity(space, f, 0.5)
        x_n, x = report.witness["points"]
        self.assertLess(distance(space, x_n, x), 1e-12)
        self.assertAlmostEqual(distance(space, apply(f, x_n), apply(f, x)), report.witness["values"][0])


if __name__ == '__main__':
    unittest.main()
