import math
from fractions import Fraction

import pytest

from model.errors import GeneratorError, ValidationError
from model.margins import Margins
from process.asymptotics import (mu_stat, condition1_stat, poisson_acceptance, large_profile, split_diagnostics,
                                 empirical_split_rates, default_grid, check_grid, classify_ratio, oscillates,
                                 log_slope, classify_index, evaluate_family)
from process.families import BUILTIN_FAMILIES, family_from_dict
from tests.helpers import random_binary_margins

GRID = default_grid(7, 10 ** 3, 10 ** 6)


def test_mu_and_condition1(square, staircase):
    assert mu_stat(square, exact=True) == Fraction(2, 3)
    assert mu_stat(square) == pytest.approx(2 / 3)
    assert condition1_stat(square) == 1.0
    assert mu_stat(staircase, exact=True) == Fraction(8, 21)
    assert condition1_stat(staircase) == pytest.approx(32 / 49)
    assert poisson_acceptance(square) == pytest.approx(math.exp(-2 / 3))
    assert mu_stat(Margins.from_vectors([1], [1])) == 0.0


def test_split_of_the_square(square):
    coarse = split_diagnostics(square, 0.9)
    assert coarse.large_profile == []
    assert coarse.gamma == 0.0
    assert coarse.lambda_ == 0.5
    assert coarse.mu == pytest.approx(2 / 3)
    fine = split_diagnostics(square, 0.1)
    assert fine.large_set == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert fine.gamma == 4.0
    assert fine.lambda_ == 0.0
    assert fine.exp_neg_gamma == pytest.approx(math.exp(-4))


def test_epsilon_must_be_positive(square):
    with pytest.raises(ValidationError):
        split_diagnostics(square, 0)


def test_large_set_is_the_brute_force_set(instance_rng):
    for _ in range(100):
        margins = random_binary_margins(instance_rng, max_m=7, max_n=7, max_total=30, min_total=2)
        for epsilon in (0.05, 0.1, 0.3):
            threshold = epsilon * margins.N
            expected = [(i, j) for i, a in enumerate(margins.r.tolist()) for j, b in enumerate(margins.c.tolist())
                        if (a - 1) * (b - 1) >= threshold]
            diag = split_diagnostics(margins, epsilon)
            assert diag.large_set == expected
            assert diag.large_set_size == len(expected)
            assert diag.gamma >= len(expected) * epsilon - 1e-12


def test_mu_splits_into_large_and_small_parts(instance_rng):
    for _ in range(50):
        margins = random_binary_margins(instance_rng, max_m=6, max_n=6, max_total=25, min_total=2)
        diag = split_diagnostics(margins, 0.2)
        N = margins.N
        assert diag.mu == pytest.approx(diag.large_mu_part + diag.lambda_ * N / (N - 1), abs=1e-12)


def test_profile_is_a_staircase():
    margins = Margins.from_vectors([40, 30, 20, 5, 5], [35, 25, 20, 10, 5, 5])
    assert large_profile(margins, 0.5) == [6, 6, 6, 3, 3]
    assert large_profile(margins, 5.0) == [3, 3, 1]
    assert large_profile(margins, 10.0) == [1]


def test_empirical_split_rates(square):
    coarse = empirical_split_rates(square, 0.9, samples=20000, seed=3)
    assert coarse.no_large_rate == 1.0
    assert coarse.mean_large_nonbinary == 0.0
    assert abs(coarse.small_binary_rate - 2 / 3) < 0.02
    fine = empirical_split_rates(square, 0.1, samples=2000, seed=3)
    assert fine.no_large_rate == 0.0
    assert fine.small_binary_rate == 1.0
    assert fine.mean_small_nonbinary == 0.0


def test_grid_checks():
    assert check_grid([10 ** 5, 10 ** 3, 10 ** 4, 10 ** 6, 10 ** 4]) == [10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6]
    with pytest.raises(ValidationError):
        check_grid([10 ** 3, 10 ** 4, 10 ** 5])
    with pytest.raises(ValidationError):
        check_grid([1000, 2000, 3000, 4000])
    assert len(default_grid()) == 9


def test_classify_ratio():
    xs = [10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6]
    assert classify_ratio(xs, [1 / x for x in xs], 0.01, 0.1) == 'vanishing'
    assert classify_ratio(xs, [0.5] * 4, 0.01, 0.1) == 'positive'
    assert classify_ratio(xs, [0.001] * 4, 0.01, 0.1) == 'positive'
    assert classify_ratio(xs, [0.5, 0.1, 0.3, 0.0], 0.01, 0.1) == 'vanishing'
    assert classify_ratio(xs, [0.5, 0.0, 0.5, 0.5], 0.01, 0.1) == 'inconclusive'
    assert log_slope(xs, [1 / x for x in xs]) == pytest.approx(-1.0)
    assert log_slope(xs, [0, 0, 0, 1]) is None


def test_oscillates():
    assert oscillates([6, 2, 6])
    assert not oscillates([1, 2, 3, 4])
    assert not oscillates([5, 5])
    assert not oscillates([10, 9, 10])


def test_dominant_row_violates_condition2():
    report = evaluate_family(BUILTIN_FAMILIES['dominant-row'], GRID)
    assert report.cond1_verdict == 'bounded'
    assert report.kappa_estimate == 2
    assert report.c1_limit == 2
    assert report.tail_class == 'vanishing'
    assert report.cond2_verdict == 'violated'
    assert report.overall == 'not-optimal'
    assert not report.swapped


def test_halving_rows_are_optimal():
    report = evaluate_family(BUILTIN_FAMILIES['halving-rows'], GRID)
    assert report.index_classes[:6] == ['positive'] * 6
    assert report.kappa_estimate is None
    assert report.kappa_capped
    assert report.cond1_verdict == 'bounded'
    assert report.cond2_verdict == 'holds'
    assert report.overall == 'optimal'


@pytest.mark.parametrize('cap', [32, 64])
def test_halving_rows_have_no_vanishing_index_below_the_cap(cap):
    report = evaluate_family(BUILTIN_FAMILIES['halving-rows'], GRID, cap=cap)
    assert len(report.index_classes) == cap
    assert 'vanishing' not in report.index_classes
    assert report.index_classes[:17] == ['positive'] * 17


def test_padding_units_sit_out_the_fit():
    xs = [10 ** 4, 10 ** 5, 10 ** 6]
    assert classify_index(xs, [1, 6, 61], 0.01, 0.1, expanding=True) == 'positive'
    assert classify_index(xs, [1, 6, 61], 0.01, 0.1) == 'vanishing'
    assert classify_index(xs, [1, 1, 3], 0.01, 0.1, expanding=True) == 'inconclusive'
    assert classify_index(xs, [1, 1, 1], 0.01, 0.1) == 'vanishing'
    assert classify_index(xs, [3, 3, 3], 0.01, 0.1, expanding=True) == 'vanishing'


def test_unit_margins_use_the_small_row_case():
    report = evaluate_family(BUILTIN_FAMILIES['unit-margins'], GRID)
    assert report.sublinear_r1
    assert report.cond1_values == [0.0] * len(GRID)
    assert report.overall == 'optimal'


def test_power_blocks_diverge():
    report = evaluate_family(BUILTIN_FAMILIES['power-blocks'], GRID)
    assert report.cond1_verdict == 'diverging'
    assert 1.2 < report.cond1_exponent < 1.5
    assert not report.sublinear_r1
    assert report.overall == 'not-optimal'


def test_constant_degree_is_optimal():
    report = evaluate_family(BUILTIN_FAMILIES['constant-degree'], GRID)
    assert report.cond1_verdict == 'bounded'
    assert report.cond2_verdict == 'holds'
    assert report.overall == 'optimal'


def test_wide_family_is_transposed():
    family = family_from_dict({'name': 'wide', 'monotone': True, 'rows': ['2'], 'cols': ['N - floor(sqrt(N))']})
    report = evaluate_family(family, GRID)
    assert report.swapped
    assert report.cond2_verdict == 'violated'


def test_oscillating_column_head_is_inconclusive():
    family = family_from_dict({'name': 'flip', 'rows': ['N - floor(sqrt(N))'],
                               'cols': ['2 + 4 * (floor(log2(N)) % 2)']})
    report = evaluate_family(family, [10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6])
    assert report.c1_values == [6, 6, 2, 6]
    assert report.oscillating
    assert report.cond2_verdict == 'inconclusive'
    assert report.overall == 'inconclusive'


def test_kappa_does_not_grow_with_theta():
    kappas = []
    for theta in (0.001, 0.01, 0.05, 0.2):
        kappa = evaluate_family(BUILTIN_FAMILIES['halving-rows'], GRID, theta=theta).kappa_estimate
        kappas.append(math.inf if kappa is None else kappa)
    assert kappas == sorted(kappas, reverse=True)


def test_family_failure_surfaces():
    family = family_from_dict({'name': 'huge', 'rows': ['pow(10, 400)']})
    with pytest.raises(GeneratorError):
        evaluate_family(family, GRID)


def test_same_report_with_threads():
    family = BUILTIN_FAMILIES['dominant-row']
    assert evaluate_family(family, GRID, threads=1).to_json_dict() == evaluate_family(family, GRID, threads=3) \
        .to_json_dict()
