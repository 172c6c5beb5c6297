import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special
from scipy import stats as sps

from helpers import wilcoxon_enum_p
from misusemine.errors import AllZeroDifferences, DegenerateTable, LengthMismatch
from misusemine.stats import (ALPHA, ConfusionCounts, PairedSamples, chi2_sf, chi_square, chi_square_yates,
                              cohens_kappa, precision_recall, regularized_gamma_q, signed_ranks,
                              wilcoxon_signed_rank)


def paired(diffs):
    return PairedSamples(tuple(diffs), tuple(0 for _ in diffs))


class TestWilcoxon:
    def test_all_equal_raises(self):
        with pytest.raises(AllZeroDifferences):
            wilcoxon_signed_rank(PairedSamples((1, 2, 3), (1, 2, 3)))

    def test_one_sided_sequence(self):
        r = wilcoxon_signed_rank(paired([1, 2, 3, 4, 5, 6]))
        assert r.statistic == 0
        assert r.p_value == pytest.approx(2 / 64, abs=1e-15)
        assert r.method == "exact"

    def test_symmetric_differences(self):
        assert wilcoxon_signed_rank(paired([-1, 1, -2, 2])).p_value == 1.0

    def test_zero_differences_are_dropped(self):
        with_zeros = wilcoxon_signed_rank(paired([0, 0, 1, 2, 3, -4]))
        without = wilcoxon_signed_rank(paired([1, 2, 3, -4]))
        assert with_zeros == without

    def test_signed_ranks_ties_share_average(self):
        assert signed_ranks([1, -1, 2, 3, -3]) == [1.5, -1.5, 3.0, 4.5, -4.5]

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            PairedSamples((1, 2), (1,))
        with pytest.raises(LengthMismatch):
            PairedSamples((), ())

    @pytest.mark.parametrize("seed", range(40))
    def test_exact_matches_enumeration(self, seed):
        rng = random.Random(seed)
        n = rng.randint(1, 10)
        diffs = [rng.choice([-1, 1]) * rng.randint(1, 6) for _ in range(n)]
        assert wilcoxon_signed_rank(paired(diffs)).p_value == pytest.approx(wilcoxon_enum_p(diffs), abs=1e-12)

    @pytest.mark.parametrize("seed", range(10))
    def test_exact_matches_scipy_without_ties(self, seed):
        rng = random.Random(100 + seed)
        n = rng.randint(3, 12)
        mags = rng.sample(range(1, 40), n)
        diffs = [rng.choice([-1, 1]) * m for m in mags]
        ours = wilcoxon_signed_rank(paired(diffs))
        ref = sps.wilcoxon(diffs, method="exact")
        assert ours.statistic == ref.statistic
        assert ours.p_value == pytest.approx(ref.pvalue, abs=1e-12)

    @pytest.mark.parametrize("seed", range(10))
    def test_normal_approximation_matches_scipy(self, seed):
        rng = random.Random(200 + seed)
        n = rng.randint(13, 60)
        diffs = [rng.choice([-1, 1]) * rng.randint(1, 8) for _ in range(n)]  # ties on purpose
        ours = wilcoxon_signed_rank(paired(diffs))
        ref = sps.wilcoxon(diffs, method="approx", correction=False)
        assert ours.method == "normal"
        assert ours.statistic == ref.statistic
        assert ours.p_value == pytest.approx(ref.pvalue, rel=1e-9, abs=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.integers(-5, 5), min_size=1, max_size=9))
    def test_p_in_unit_interval(self, diffs):
        if all(d == 0 for d in diffs):
            return
        r = wilcoxon_signed_rank(paired(diffs))
        assert 0 <= r.p_value <= 1


class TestChiSquare:
    def test_independent_table(self):
        r = chi_square_yates([[10, 10], [10, 10]])
        assert r.statistic == 0
        assert r.p_value == pytest.approx(1.0)

    def test_hand_computed(self):
        # E = 12.5 in every cell, (|20 - 12.5| - 0.5)^2 / 12.5 = 3.92, four cells
        r = chi_square_yates([[20, 5], [5, 20]])
        assert r.statistic == pytest.approx(15.68, abs=1e-2)

    def test_degenerate(self):
        with pytest.raises(DegenerateTable):
            chi_square_yates([[0, 0], [3, 4]])
        with pytest.raises(DegenerateTable):
            chi_square_yates([[1, 0], [3, 0]])

    def test_confusion_counts_input(self):
        c = ConfusionCounts(tp=20, fp=5, tn=20, fn=5)
        assert chi_square_yates(c).statistic == pytest.approx(chi_square_yates([[20, 5], [5, 20]]).statistic)

    @pytest.mark.parametrize("seed", range(25))
    def test_matches_scipy(self, seed):
        rng = random.Random(seed)
        table = [[rng.randint(1, 40), rng.randint(1, 40)], [rng.randint(1, 40), rng.randint(1, 40)]]
        stat, p, _, _ = sps.chi2_contingency(table, correction=True)
        ours = chi_square_yates(table)
        assert ours.statistic == pytest.approx(stat, abs=1e-9)
        assert ours.p_value == pytest.approx(p, abs=1e-10)

    @pytest.mark.parametrize("seed", range(25))
    def test_yates_never_exceeds_plain(self, seed):
        rng = random.Random(seed)
        table = [[rng.randint(1, 30) for _ in range(2)] for _ in range(2)]
        assert chi_square_yates(table).statistic <= chi_square(table).statistic + 1e-12

    @pytest.mark.parametrize("a,x", [(0.5, 0.1), (0.5, 3.84), (1.0, 2.0), (2.5, 7.0), (10.0, 3.0), (3.0, 30.0)])
    def test_incomplete_gamma(self, a, x):
        assert regularized_gamma_q(a, x) == pytest.approx(special.gammaincc(a, x), abs=1e-10)

    def test_chi2_sf(self):
        assert chi2_sf(3.841458820694124) == pytest.approx(0.05, abs=1e-10)


class TestKappa:
    def test_identity(self):
        assert cohens_kappa(["Misuse", "Correct", "Misuse"], ["Misuse", "Correct", "Misuse"]) == 1.0
        assert cohens_kappa(["Misuse"] * 4, ["Misuse"] * 4) == 1.0

    def test_chance_agreement(self):
        # p_o = 1/2 and both raters split evenly, so p_e = 1/2
        a = ["y", "y", "n", "n"]
        b = ["y", "n", "y", "n"]
        assert cohens_kappa(a, b) == 0.0

    def test_total_disagreement(self):
        assert cohens_kappa(["yes", "no"], ["no", "yes"]) == -1.0

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            cohens_kappa(["a"], ["a", "b"])

    @settings(max_examples=80, deadline=None)
    @given(st.lists(st.tuples(st.sampled_from("abc"), st.sampled_from("abc")), min_size=1, max_size=30))
    def test_bounded(self, pairs):
        a, b = zip(*pairs)
        k = cohens_kappa(a, b)
        assert -1 - 1e-12 <= k <= 1 + 1e-12


class TestPrecisionRecall:
    def test_percent_examples(self):
        assert 100 * precision_recall(ConfusionCounts(tp=8, fp=16)).precision == pytest.approx(33.33, abs=0.01)
        assert 100 * precision_recall(ConfusionCounts(tp=13, fn=102)).recall == pytest.approx(11.30, abs=0.01)

    def test_undefined_is_flagged(self):
        pr = precision_recall(ConfusionCounts())
        assert pr.precision == 0 and not pr.precision_defined
        assert pr.recall == 0 and not pr.recall_defined

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 50), st.integers(0, 50), st.integers(0, 50), st.integers(0, 50), st.integers(0, 50))
    def test_invariant_to_tn(self, tp, fp, fn, tn1, tn2):
        assert precision_recall(ConfusionCounts(tp, fp, tn1, fn)) == precision_recall(ConfusionCounts(tp, fp, tn2, fn))

    def test_negative_counts_rejected(self):
        with pytest.raises(ValueError):
            ConfusionCounts(tp=-1)


def test_alpha_constant():
    assert ALPHA == 0.05
