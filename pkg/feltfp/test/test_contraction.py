import unittest

import numpy as np
from hypothesis import given, settings, strategies as st

from feltfp.builtin import discrete_space, make_map, make_space
from feltfp.contraction import (ContractionFactor, banach_epsilon, banach_profile,
                                check_condition2_finite, check_condition2_sampled,
                                check_condition3_finite, check_condition3_sampled,
                                check_equivalence_2_3, default_alphas, nonexpansive_on_positive)
from feltfp.core import ConfigurationError, FiniteMap, FiniteSpace, Tolerances
from feltfp.oracle import (EnumerationConfig, band_brute_force, enumerate_selfmaps,
                           enumerate_spaces)
from feltfp.reports import CLOSED_FORM, EXHAUSTIVE, FAIL, PASS, PASS_SAMPLED


def enumerated_cases(n, alphabet="0,0.5,1", **kwargs):
    cfg = EnumerationConfig(n, alphabet, **kwargs)
    maps = list(enumerate_selfmaps(n))
    for space in enumerate_spaces(cfg):
        for f in maps:
            yield space, f


@st.composite
def finite_cases(draw, values=(0.0, 0.25, 0.5, 1.0), max_size=4):
    n = draw(st.integers(min_value=1, max_value=max_size))
    mat = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            mat[i, j] = mat[j, i] = draw(st.sampled_from(values))
    table = draw(st.lists(st.integers(min_value=0, max_value=n - 1), min_size=n, max_size=n))
    return FiniteSpace(mat), FiniteMap(table)


class Condition3FiniteTestCase(unittest.TestCase):

    def test_identity_passes(self):
        space = discrete_space(3)
        report = check_condition3_finite(space, make_map("ident", space))
        self.assertEqual(report.verdict, PASS)
        self.assertEqual(report.profile.epsilon_at(1.0), 1.0)

    def test_constant_passes(self):
        space = FiniteSpace([[0, 1, 0.5], [1, 0.5, 1], [0.5, 1, 0]])
        report = check_condition3_finite(space, make_map("const:2", space))
        self.assertEqual(report.verdict, PASS)
        levels = report.profile.to_dict()["levels"]
        self.assertEqual([level["alpha"] for level in levels], [0.5, 1.0])
        self.assertEqual(levels[0]["epsilon"], 0.5)
        self.assertTrue(all(level["scope"] == EXHAUSTIVE for level in levels))

    def test_expanding_pair(self):
        """p(0,1) = 1/2 is mapped to p(1,2) = 1."""
        space = FiniteSpace([[0, 0.5, 1], [0.5, 0, 1], [1, 1, 0]])
        report = check_condition3_finite(space, FiniteMap([1, 2, 2]))
        self.assertEqual(report.verdict, FAIL)
        self.assertEqual(report.witness["points"], [0, 1])
        self.assertEqual(report.witness["values"], [0.5, 1.0])
        self.assertEqual(report.witness["images"], [1, 2])

    def test_zero_distance_pairs_unconstrained(self):
        """Pairs with p(y,x) = 0 impose nothing, even if their images are far apart."""
        space = FiniteSpace([[0, 1], [1, 1]])
        self.assertEqual(check_condition3_finite(space, FiniteMap([1, 1])).verdict, PASS)

    def test_identity_on_enumerated_spaces(self):
        """The finite reduction is exactly nonexpansiveness, which the identity satisfies."""
        for n in (1, 2, 3):
            for space in enumerate_spaces(EnumerationConfig(n, "0,0.5,1")):
                ident = FiniteMap(range(n))
                self.assertEqual(check_condition3_finite(space, ident).verdict, PASS)

    def test_matches_band_brute_force(self):
        """The vectorized decision agrees with the literal quantifier check."""
        for n in (1, 2, 3):
            for space, f in enumerated_cases(n):
                holds, alpha = band_brute_force(space, f)
                report = check_condition3_finite(space, f)
                self.assertEqual(report.passed, holds, (space.matrix.tolist(), f.table))
                if not holds:
                    self.assertEqual(report.witness["values"][0], alpha)

    @settings(max_examples=200)
    @given(finite_cases())
    def test_matches_band_brute_force_random(self, case):
        space, f = case
        self.assertEqual(check_condition3_finite(space, f).passed, band_brute_force(space, f)[0])


class Condition2FiniteTestCase(unittest.TestCase):

    def test_expanding_pair(self):
        space = FiniteSpace([[0, 0.5, 1], [0.5, 0, 1], [1, 1, 0]])
        report = check_condition2_finite(space, FiniteMap([1, 2, 2]))
        self.assertEqual(report.verdict, FAIL)
        self.assertEqual(report.witness["points"], [0, 1])

    def test_equivalence_on_full_grid(self):
        """Conditions (2) and (3) agree on every 3-point table over {0, 1/2, 1} and every map."""
        count = 0
        for space, f in enumerated_cases(3, enforce_indiscernibility=False):
            self.assertEqual(check_condition2_finite(space, f).verdict,
                             check_condition3_finite(space, f).verdict,
                             (space.matrix.tolist(), f.table))
            count += 1
        self.assertEqual(count, 19683)

    @settings(max_examples=300)
    @given(finite_cases())
    def test_equivalence_report(self, case):
        space, f = case
        report = check_equivalence_2_3(space, f)
        self.assertEqual(report.verdict, PASS)
        self.assertEqual(report.detail["condition2"], report.detail["condition3"])

    @settings(max_examples=300)
    @given(finite_cases())
    def test_nonexpansive_equivalence(self, case):
        space, f = case
        self.assertEqual(nonexpansive_on_positive(space, f).passed,
                         check_condition3_finite(space, f).passed)

    def test_identity_non_dyadic_distances(self):
        """Band edges between 0.94 and 1.3 are not representable exactly."""
        space = FiniteSpace([[0, 0.94, 1.3], [0.94, 0, 1.3], [1.3, 1.3, 0]])
        ident = FiniteMap([0, 1, 2])
        self.assertEqual(check_condition2_finite(space, ident).verdict, PASS)
        self.assertEqual(check_condition3_finite(space, ident).verdict, PASS)
        self.assertEqual(check_equivalence_2_3(space, ident).verdict, PASS)
        self.assertEqual(band_brute_force(space, ident), (True, None))

    @settings(max_examples=300)
    @given(finite_cases(values=tuple(k / 100 for k in range(151)), max_size=3))
    def test_equivalence_two_decimal_tables(self, case):
        space, f = case
        self.assertEqual(check_condition2_finite(space, f).verdict,
                         check_condition3_finite(space, f).verdict,
                         (space.matrix.tolist(), f.table))
        self.assertEqual(check_condition3_finite(space, f).passed, band_brute_force(space, f)[0])

    @settings(max_examples=300)
    @given(finite_cases(values=tuple(k / 100 for k in range(151)), max_size=3))
    def test_identity_two_decimal_tables(self, case):
        space, _ = case
        ident = FiniteMap(range(space.size))
        self.assertEqual(check_condition2_finite(space, ident).verdict, PASS)
        self.assertEqual(band_brute_force(space, ident), (True, None))


class NonexpansiveTestCase(unittest.TestCase):

    def test_finite(self):
        space = FiniteSpace([[0, 0.5, 1], [0.5, 0, 1], [1, 1, 0]])
        report = nonexpansive_on_positive(space, FiniteMap([1, 2, 2]))
        self.assertEqual(report.verdict, FAIL)
        self.assertEqual(report.witness["points"], [0, 1])

    def test_continuous(self):
        space = make_space("euclid:0,1")
        self.assertEqual(nonexpansive_on_positive(space, make_map("cos", space)).verdict, PASS_SAMPLED)
        self.assertEqual(nonexpansive_on_positive(space, make_map("ident", space)).verdict, PASS_SAMPLED)

    def test_dominated_maps(self):
        """
        Composing two maps satisfying condition (3) keeps it when self-distances
        are 0 (then p(fy,fx) = 0 forces fy = fx).
        """
        maps = list(enumerate_selfmaps(3))
        for space, f in enumerated_cases(3, include_nonzero_diagonal=False):
            if not check_condition3_finite(space, f).passed:
                continue
            for g in maps:
                if check_condition3_finite(space, g).passed:
                    h = FiniteMap([g.table[image] for image in f.table])
                    self.assertEqual(check_condition3_finite(space, h).verdict, PASS)

    def test_pointwise_dominated_maps(self):
        """If p(gy,gx) <= p(fy,fx) on every pair and f satisfies condition (3), so does g."""
        maps = list(enumerate_selfmaps(3))
        for space in enumerate_spaces(EnumerationConfig(3, "0,0.5,1", enforce_indiscernibility=False)):
            mat = space.matrix
            images = {g.table: mat[np.ix_(g.indices, g.indices)] for g in maps}
            for f in maps:
                if not check_condition3_finite(space, f).passed:
                    continue
                for g in maps:
                    if np.all(images[g.table] <= images[f.table]):
                        self.assertEqual(check_condition3_finite(space, g).verdict, PASS,
                                         (mat.tolist(), f.table, g.table))

    @settings(max_examples=200)
    @given(finite_cases(values=(0.0, 0.3, 0.7, 1.1)), st.data())
    def test_dominated_random_maps(self, case, data):
        space, f = case
        if not check_condition3_finite(space, f).passed:
            return
        mat = space.matrix
        bound = mat[np.ix_(f.indices, f.indices)]
        table = data.draw(st.lists(st.integers(min_value=0, max_value=space.size - 1),
                                   min_size=space.size, max_size=space.size))
        g = FiniteMap(table)
        if np.all(mat[np.ix_(g.indices, g.indices)] <= bound):
            self.assertEqual(check_condition3_finite(space, g).verdict, PASS)


class Condition3SampledTestCase(unittest.TestCase):

    def setUp(self):
        self.space = make_space("euclid:0,1")

    def test_banach_bridge(self):
        """A contraction with factor 1/2 satisfies the band at eps = banach_epsilon."""
        f = make_map("affine:0.5,0.3", self.space)
        for alpha in (0.1, 0.25, 0.5):
            eps = banach_epsilon(0.5, alpha)
            self.assertEqual(eps, alpha)
            report = check_condition3_sampled(self.space, f, alphas=[alpha], epsilon_grid=[eps],
                                              include_deciles=False)
            self.assertEqual(report.verdict, PASS_SAMPLED)
            self.assertEqual(report.detail["failed_alphas"], [])
            self.assertEqual(report.detail["pairs"], 21 * 21 + 2000)
            self.assertEqual(report.profile.epsilon_at(alpha), eps)

    def test_identity_fails_everywhere(self):
        """The identity is nonexpansive but violates the band at every level."""
        f = make_map("ident", self.space)
        report = check_condition3_sampled(self.space, f, alphas=[0.1, 0.25, 0.5])
        self.assertEqual(report.verdict, FAIL)
        self.assertEqual(report.detail["failed_alphas"], report.detail["alphas"])
        self.assertGreater(report.witness["values"][0], 0)

    def test_condition2_identity_fails(self):
        report = check_condition2_sampled(self.space, make_map("ident", self.space),
                                          alphas=[0.25], include_deciles=False)
        self.assertEqual(report.verdict, FAIL)

    def test_half_on_maxpm(self):
        space = make_space("maxpm:0,2")
        f = make_map("half", space)
        self.assertEqual(check_condition3_sampled(space, f).verdict, PASS_SAMPLED)
        self.assertEqual(check_condition2_sampled(space, f).verdict, PASS_SAMPLED)

    def test_cos_passes(self):
        """cos contracts with factor sin 1 < 16/17, the band widths scale with alpha."""
        f = make_map("cos", self.space)
        report = check_condition3_sampled(self.space, f)
        self.assertEqual(report.verdict, PASS_SAMPLED)
        self.assertEqual(report.detail["failed_alphas"], [])
        self.assertEqual(check_condition2_sampled(self.space, f).verdict, PASS_SAMPLED)

    def test_witness_points_are_floats(self):
        report = check_condition3_sampled(self.space, make_map("ident", self.space), alphas=[0.25])
        self.assertEqual(report.verdict, FAIL)
        self.assertTrue(all(type(p) is float for p in report.witness["points"]))
        self.assertNotIn("np.", str(report))

    def test_deterministic(self):
        f = make_map("cos", self.space)
        first = check_condition3_sampled(self.space, f, tol=Tolerances(seed=5)).to_dict()
        second = check_condition3_sampled(self.space, f, tol=Tolerances(seed=5)).to_dict()
        self.assertEqual(first, second)

    def test_invalid_alphas(self):
        with self.assertRaises(ConfigurationError):
            check_condition3_sampled(self.space, make_map("cos", self.space), alphas=[-1.0])

    def test_default_alphas(self):
        alphas = default_alphas(self.space)
        self.assertEqual(alphas, sorted(alphas))
        self.assertTrue(0 < len(alphas) <= 9)
        self.assertTrue(all(0 < a <= 1 for a in alphas))


class BanachTestCase(unittest.TestCase):

    def test_banach_epsilon(self):
        self.assertEqual(banach_epsilon(0.5, 1.0), 1.0)
        self.assertAlmostEqual(banach_epsilon(0.9, 0.9), 0.1)
        self.assertEqual(banach_epsilon(0.0, 0.3), 1e9)
        self.assertEqual(banach_epsilon(0.0, 0.3, epsilon_max=5.0), 5.0)
        self.assertAlmostEqual(banach_epsilon(0.9, 2.0), 2 / 9)

    def test_maximal_on_grid(self):
        """The largest grid epsilon with c (alpha + eps) <= alpha lies within one step below."""
        step = 1e-4
        grid = np.arange(0, 10, step)
        for c in (0.3, 0.5, 0.75, 0.9):
            for alpha in (0.5, 1.0, 2.0):
                eps = banach_epsilon(c, alpha)
                largest = grid[c * (alpha + grid) <= alpha].max()
                self.assertLessEqual(largest, eps + 1e-9, (c, alpha))
                self.assertLess(eps - largest, step + 1e-12, (c, alpha))
                self.assertGreater(c * (alpha + eps + step), alpha)

    def test_invalid(self):
        with self.assertRaises(ConfigurationError):
            banach_epsilon(1.0, 0.5)
        with self.assertRaises(ConfigurationError):
            banach_epsilon(-0.1, 0.5)
        with self.assertRaises(ConfigurationError):
            banach_epsilon(0.5, 0.0)
        with self.assertRaises(ConfigurationError):
            ContractionFactor(1.5)

    @given(st.floats(min_value=0.01, max_value=0.99), st.floats(min_value=1e-3, max_value=10))
    def test_band_bound(self, c, alpha):
        """c (alpha + eps) <= alpha, up to rounding."""
        eps = banach_epsilon(c, alpha)
        self.assertLessEqual(c * (alpha + eps), alpha * (1 + 1e-12))

    def test_profile(self):
        profile = banach_profile(0.5, [0.1, 0.2])
        self.assertEqual([level.scope for level in profile.levels], [CLOSED_FORM] * 2)
        self.assertEqual(profile.epsilon_at(0.2), 0.2)


if __name__ == '__main__':
    unittest.main()
