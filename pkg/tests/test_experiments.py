"""Census, valuation-model Monte Carlo, capture rates, neighbor probes,
and the reference-instance dump.  The census shortcuts (per-prime order
tables, matched-valuation test for trivial square roots) are checked
differentially against the brute-force order walk and direct modular
powers.
"""

import math

import numpy as np
import pytest

from shorsim.errors import DomainError
from shorsim.experiments import (
    _prime_order_table,
    capture_rate_empirical,
    census_aggregate,
    census_sweep,
    failure_census,
    figure1_data,
    neighbor_state_check,
    semiprimes_below,
    valuation_model_mc,
)
from shorsim.number_theory import mod_pow, multiplicative_order
from shorsim.pipeline import Classification, extract_factors

SEMIPRIMES = [15, 21, 33, 35, 39, 51, 55, 57]


def brute_classification(n, x):
    r = multiplicative_order(x, n)
    if r % 2 == 1:
        return "odd"
    if mod_pow(x, r // 2, n) == n - 1:
        return "trivial"
    return "good"


class TestSemiprimeEnumeration:
    def test_list_below_100(self):
        assert [t[0] for t in semiprimes_below(100)] == [
            15, 21, 33, 35, 39, 51, 55, 57, 65, 69, 77, 85, 87, 91, 93, 95,
        ]

    def test_factors_are_correct(self):
        for n, p, q in semiprimes_below(2000):
            assert p < q and p * q == n and n % 2 == 1

    def test_excludes_squares_and_prime_powers(self):
        values = {t[0] for t in semiprimes_below(200)}
        assert {9, 25, 27, 45, 49, 63, 75, 99, 105, 121, 125, 135, 147, 165, 169, 175, 189, 195} & values == set()


class TestOrderTables:
    @pytest.mark.parametrize("p", [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 97, 101])
    def test_table_matches_brute_force_walk(self, p):
        table = _prime_order_table(p)
        for x in range(1, p):
            assert int(table[x]) == multiplicative_order(x, p), (p, x)


class TestFailureCensus:
    def test_fig_modulus_counts(self):
        c = failure_census(21)
        assert (c.n, c.p1, c.p2) == (21, 3, 7)
        assert c.num_x == 11  # 1 < x < 21 coprime to 21
        assert c.odd_r == 2  # x in {4, 16}, order 3
        assert c.trivial_sqrt == 3  # x in {5, 17, 20}
        assert c.good == 6
        assert c.fraction_bad == pytest.approx(5 / 11)

    def test_counts_partition_tested_bases(self):
        for n in SEMIPRIMES:
            c = failure_census(n)
            assert c.odd_r + c.trivial_sqrt + c.good == c.num_x
            assert c.num_x + c.common_factor_skipped == n - 2

    def test_common_factor_count_is_totient_complement(self):
        for n, p, q in semiprimes_below(200):
            c = failure_census(n)
            phi = (p - 1) * (q - 1)
            assert c.num_x == phi - 1  # x = 1 excluded
            assert c.common_factor_skipped == (n - 2) - (phi - 1)

    @pytest.mark.parametrize("n", SEMIPRIMES)
    def test_matches_brute_force_classification(self, n):
        expected = {"odd": 0, "trivial": 0, "good": 0}
        for x in range(2, n):
            if math.gcd(x, n) != 1:
                continue
            expected[brute_classification(n, x)] += 1
        c = failure_census(n)
        assert (c.odd_r, c.trivial_sqrt, c.good) == (
            expected["odd"], expected["trivial"], expected["good"],
        )

    def test_matches_direct_power_on_sampled_larger_moduli(self):
        import random

        rnd = random.Random(606)
        rows = semiprimes_below(10_000)
        for n, p, q in rnd.sample(rows, 25):
            tp, tq = _prime_order_table(p), _prime_order_table(q)
            xs = [x for x in rnd.sample(range(2, n), min(60, n - 2))
                  if x % p != 0 and x % q != 0]
            for x in xs:
                r1, r2 = int(tp[x % p]), int(tq[x % q])
                r = r1 * r2 // math.gcd(r1, r2)
                v1, v2 = (r1 & -r1).bit_length() - 1, (r2 & -r2).bit_length() - 1
                assert mod_pow(x, r, n) == 1
                if r % 2 == 0:
                    assert (mod_pow(x, r // 2, n) == n - 1) == (v1 == v2 >= 1), (n, x)
                else:
                    assert v1 == v2 == 0

    def test_classification_consistent_with_factor_extraction(self):
        for n in SEMIPRIMES:
            for x in range(2, n):
                if math.gcd(x, n) != 1:
                    continue
                kind, factors = extract_factors(n, x, multiplicative_order(x, n))
                expected = {
                    Classification.ODD_ORDER: "odd",
                    Classification.TRIVIAL_SQUARE_ROOT: "trivial",
                    Classification.SUCCESS: "good",
                }[kind]
                assert expected == brute_classification(n, x)
                if kind is Classification.SUCCESS:
                    assert factors[0] * factors[1] == n

    def test_non_semiprime_rejected(self):
        for n in (9, 10, 17, 25, 105):
            with pytest.raises(DomainError):
                failure_census(n)

    def test_half_bound_over_moderate_sweep(self):
        rows = census_sweep(1500)
        assert rows and all(r.fraction_bad <= 0.5 for r in rows)

    def test_aggregate_fields(self):
        rows = census_sweep(300)
        agg = census_aggregate(rows)
        assert agg.count == len(rows)
        assert agg.total_x == sum(r.num_x for r in rows)
        assert 0 < agg.aggregate_bad_fraction < 0.5
        assert agg.bound_ok


class TestValuationModel:
    def test_estimates_match_analytic_values(self):
        res = valuation_model_mc(1_000_000, seed=0)
        assert res.p_a == pytest.approx(0.25, abs=0.005)
        assert res.estimate == pytest.approx(1 / 12, abs=0.005)
        assert res.p_fail == pytest.approx(1 / 3, abs=0.01)

    def test_estimate_is_matched_over_trials(self):
        res = valuation_model_mc(10_000, seed=5)
        assert res.estimate == res.matched_valuations / res.trials
        assert res.p_fail == (res.both_odd + res.matched_valuations) / res.trials

    def test_deterministic_per_seed(self):
        assert valuation_model_mc(50_000, seed=9) == valuation_model_mc(50_000, seed=9)

    def test_disjoint_seeds_agree_within_five_sigma(self):
        trials = 200_000
        a = valuation_model_mc(trials, seed=1)
        b = valuation_model_mc(trials, seed=2)
        p = 1 / 12
        sigma = math.sqrt(2 * p * (1 - p) / trials)
        assert abs(a.estimate - b.estimate) <= 5 * sigma

    def test_valuation_distribution_matches_model(self):
        # P(k = j) = 2^-(j+1): check the first few bins at 10 sigma
        from shorsim.experiments import _two_adic_draws
        from shorsim.rng import SplitMix64

        draws = _two_adic_draws(SplitMix64(3), 400_000)
        for j in range(6):
            p = 2.0 ** -(j + 1)
            freq = float((draws == j).sum()) / len(draws)
            sigma = math.sqrt(p * (1 - p) / len(draws))
            assert abs(freq - p) <= 10 * sigma, j

    def test_rejects_empty_run(self):
        with pytest.raises(DomainError):
            valuation_model_mc(0)


class TestCaptureRate:
    def test_spread_displacements_approach_average(self):
        # instances whose peak displacements cover the unit interval evenly
        reports = [
            capture_rate_empirical(21, 10, 9, samples=20_000, seed=3),
            capture_rate_empirical(35, 11, 11, samples=20_000, seed=3),
            capture_rate_empirical(55, 16, 12, samples=20_000, seed=3),
        ]
        mean_exact = sum(r.exact_value for r in reports) / len(reports)
        assert mean_exact == pytest.approx(0.902, abs=0.02)

    def test_integer_peaks_capture_everything(self):
        rep = capture_rate_empirical(15, 2, 8, samples=5_000, seed=0)
        assert rep.exact_value == pytest.approx(1.0, abs=1e-9)
        assert rep.sampled_fraction == 1.0

    def test_sampled_tracks_exact_within_binomial_bounds(self):
        rep = capture_rate_empirical(21, 10, 9, samples=50_000, seed=11)
        sigma = math.sqrt(rep.exact_value * (1 - rep.exact_value) / rep.samples)
        assert abs(rep.sampled_fraction - rep.exact_value) <= 4 * sigma

    def test_exact_value_is_sampling_free(self):
        a = capture_rate_empirical(21, 10, 9, samples=100, seed=1)
        b = capture_rate_empirical(21, 10, 9, samples=9_999, seed=77)
        assert a.exact_value == b.exact_value

    def test_undersized_register_rejected(self):
        with pytest.raises(DomainError):
            capture_rate_empirical(21, 10, 8, samples=10, seed=0)


class TestNeighborCheck:
    def test_no_neighbor_changes_on_guaranteed_instance(self):
        rep = neighbor_state_check(21, 10, 9)
        assert rep.r == 6
        assert {p.nu for p in rep.probes} == {1, 5}  # coprime peak indices
        assert rep.changed_within_guarantee == 0
        for probe in rep.probes:
            results = dict(probe.results)
            assert results[0] == results[1] == (6, probe.nu)

    @pytest.mark.parametrize("n,x,q_A", [(15, 7, 8), (35, 11, 11), (57, 5, 12), (55, 21, 12)])
    def test_guaranteed_cells_always_agree(self, n, x, q_A):
        rep = neighbor_state_check(n, x, q_A)
        for probe in rep.probes:
            results = dict(probe.results)
            assert results[0] == results[1] == (rep.r, probe.nu)
        assert rep.changed_within_guarantee == 0

    def test_far_from_peak_fails_regardless_of_neighbors(self):
        from shorsim.distribution import ProblemInstance
        from shorsim.pipeline import recover_order

        inst = ProblemInstance.create(21, 10, q_A=9)
        for c in (49, 50, 51):  # mid-gap between the nu = 0 and nu = 1 peaks
            rec = recover_order(c, inst)
            assert not rec.verified

    def test_undersized_register_rejected(self):
        with pytest.raises(DomainError):
            neighbor_state_check(21, 10, 8)


class TestFigureData:
    def test_reference_instance_shape(self):
        inst, dist, pk = figure1_data()
        assert (inst.n, inst.x, inst.q_A, inst.N) == (21, 10, 8, 256)
        assert len(dist.probabilities) == 256
        assert len(pk) == 6
        assert abs(dist.total - 1.0) < 1e-9

    def test_heaviest_states_are_annotated_peak_cells(self):
        _inst, dist, pk = figure1_data()
        top6 = set(np.argsort(dist.probabilities)[-6:].tolist())
        # the heavier of floor/ceiling per peak: ceiling iff delta > 1/2
        expected = {p.c_nu + (1 if p.delta_nu > 0.5 else 0) for p in pk}
        assert top6 == expected == {0, 43, 85, 128, 171, 213}
