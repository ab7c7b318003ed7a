import numpy as np
import pytest

from model.errors import InfeasibleMarginsError, RejectionExhaustedError
from model.margins import Margins
from model.tables import TokenPairing, ContingencyTable
from process.ext.utils import make_rng
from process.sampler import (sample_pairing, table_from_pairing, count_nonbinary, count_double_edges,
                             sample_binary_rejection, draw_batch, iter_batches, sample_binary_batch, perm_dtype)
from tests.helpers import random_binary_margins, random_margins


def test_single_token_pairing():
    margins = Margins.from_vectors([1], [1])
    pairing = sample_pairing(margins, make_rng(0))
    assert pairing.perm.tolist() == [0]
    table = table_from_pairing(pairing)
    assert table.dense().tolist() == [[1]]


def test_pairing_is_a_permutation(staircase):
    perm = sample_pairing(staircase, make_rng(1)).perm
    assert sorted(perm.tolist()) == list(range(staircase.N))


def test_pairing_uses_32_bit_indices(staircase):
    assert sample_pairing(staircase, make_rng(1)).perm.dtype == np.int32
    assert perm_dtype(2 ** 31 - 1) == np.int32
    assert perm_dtype(2 ** 31) == np.int64


def test_pairing_replays_for_fixed_seed(staircase):
    first = sample_pairing(staircase, make_rng(42)).perm
    second = sample_pairing(staircase, make_rng(42)).perm
    assert np.array_equal(first, second)


def test_all_24_pairings_equally_likely(square):
    rng = make_rng(5)
    draws = 48000
    counts = {}
    for _ in range(draws):
        key = tuple(sample_pairing(square, rng).perm.tolist())
        counts[key] = counts.get(key, 0) + 1
    assert len(counts) == 24
    assert max(abs(v - draws / 24) for v in counts.values()) < 6 * np.sqrt(draws / 24)


def test_forced_double_entries(square):
    table = table_from_pairing(TokenPairing(margins=square, perm=np.arange(4)))
    assert table.entries == {(0, 0): 2, (1, 1): 2}
    assert count_nonbinary(table) == 2
    assert count_double_edges(table) == 2
    assert not table.is_binary


def test_all_ones_table(square):
    table = table_from_pairing(TokenPairing(margins=square, perm=np.array([0, 2, 1, 3])))
    assert table.dense().tolist() == [[1, 1], [1, 1]]
    assert count_nonbinary(table) == 0
    assert count_double_edges(table) == 0
    assert table.encode() == '1x4'


def test_triple_entry_counts_three_double_edges():
    table = table_from_pairing(TokenPairing(margins=Margins.from_vectors([3], [3]), perm=np.arange(3)))
    assert count_double_edges(table) == 3
    assert count_nonbinary(table) == 1


def test_margin_conservation(instance_rng):
    for seed in range(200):
        margins = random_margins(instance_rng, max_m=6, max_n=6, max_total=30)
        table = table_from_pairing(sample_pairing(margins, make_rng(seed)))
        assert np.array_equal(table.row_sums(), margins.r)
        assert np.array_equal(table.col_sums(), margins.c)
        assert np.all(table.counts >= 1)


def test_early_exit_keeps_the_accept_reject_outcome(instance_rng):
    for seed in range(200):
        margins = random_margins(instance_rng, max_m=6, max_n=6, max_total=30)
        pairing = sample_pairing(margins, make_rng(seed))
        full = table_from_pairing(pairing)
        early = table_from_pairing(pairing, early_exit=True)
        assert (early is None) == (not full.is_binary)


def test_unit_column_sums_accept_first_attempt():
    margins = Margins.from_vectors([1, 1, 1], [1, 1, 1])
    for seed in range(20):
        table, attempts = sample_binary_rejection(margins, make_rng(seed))
        assert attempts == 1
        assert table.is_binary


def test_rejection_returns_binary_tables(staircase):
    rng = make_rng(11)
    for _ in range(50):
        table, attempts = sample_binary_rejection(staircase, rng)
        assert table.is_binary
        assert attempts >= 1
        assert np.array_equal(table.row_sums(), staircase.r)


def test_rejection_infeasible():
    with pytest.raises(InfeasibleMarginsError) as exc:
        sample_binary_rejection(Margins.from_vectors([3, 1], [2, 2]), make_rng(0))
    assert exc.value.exit_code == 3


def test_rejection_exhausted_reports_attempts():
    # the all-ones 5x5 table is the only one; acceptance is about 4e-5
    margins = Margins.from_vectors([5] * 5, [5] * 5)
    with pytest.raises(RejectionExhaustedError) as exc:
        sample_binary_rejection(margins, make_rng(3), max_attempts=3)
    assert exc.value.attempts == 3
    assert exc.value.exit_code == 4


def test_acceptance_frequency_square(square):
    draws = 100000
    accepted = sum(int(b.binary.sum()) for b in iter_batches(square, make_rng(2024), draws))
    assert abs(accepted / draws - 2 / 3) < 0.01


def test_draw_batch_matches_single_tables(instance_rng):
    for seed in range(20):
        margins = random_margins(instance_rng, max_m=5, max_n=5, max_total=20)
        drawn = draw_batch(margins, make_rng(seed), 50)
        assert drawn.size == 50
        for b in range(drawn.size):
            single = ContingencyTable.from_keys(margins, drawn.keys[b])
            table = drawn.table(b)
            assert np.array_equal(table.keys, single.keys)
            assert np.array_equal(table.counts, single.counts)
            assert drawn.binary[b] == single.is_binary
            assert drawn.nonbinary[b] == count_nonbinary(single)
            assert drawn.double_edges[b] == count_double_edges(single)


def test_iter_batches_covers_exact_sample_count(staircase):
    sizes = [b.size for b in iter_batches(staircase, make_rng(0), 1000, batch=300)]
    assert sizes == [300, 300, 300, 100]


def test_sample_binary_batch(staircase):
    tables = list(sample_binary_batch(staircase, make_rng(8), 25))
    assert len(tables) == 25
    assert all(t.is_binary for t in tables)
    assert all(np.array_equal(t.col_sums(), staircase.c) for t in tables)


def test_sample_binary_batch_gives_up():
    margins = Margins.from_vectors([5] * 5, [5] * 5)
    with pytest.raises(RejectionExhaustedError):
        list(sample_binary_batch(margins, make_rng(0), 1, max_attempts=10))


def test_table_output_in_input_order():
    margins = Margins.from_vectors([1, 2], [2, 1])
    table, _ = sample_binary_rejection(margins, make_rng(4))
    dense = table.in_input_order()
    assert dense.sum(axis=1).tolist() == [1, 2]
    assert dense.sum(axis=0).tolist() == [2, 1]
    edges = list(table.edges(input_order=True))
    assert sorted(edges) == edges
    assert sum(v for _, _, v in edges) == margins.N
    assert table.to_json_dict()['binary'] is True


def test_binary_rates_of_feasible_instances(instance_rng):
    margins = random_binary_margins(instance_rng, max_total=8)
    drawn = draw_batch(margins, make_rng(0), 1000)
    assert drawn.binary.dtype == bool
    assert np.all(drawn.nonbinary[drawn.binary] == 0)


def test_rows_with_equal_sums_are_exchangeable(staircase):
    # rows 2 and 3 both sum to 1, so swapping them maps the uniform law onto itself
    assert staircase.r[2] == staircase.r[3] == 1
    dense = np.array([t.dense() for t in sample_binary_batch(staircase, make_rng(31), 20000)])
    third, fourth = dense[:, 2, :], dense[:, 3, :]
    for j in range(staircase.n):
        difference = int(third[:, j].sum()) - int(fourth[:, j].sum())
        disagreements = int(np.count_nonzero(third[:, j] != fourth[:, j]))
        assert abs(difference) <= 3 * np.sqrt(disagreements), j


def test_swapped_tables_are_equally_frequent(staircase):
    tally = {}
    for table in sample_binary_batch(staircase, make_rng(32), 40000):
        key = table.dense().tobytes()
        tally[key] = tally.get(key, 0) + 1
    z = []
    for key, seen in tally.items():
        dense = np.frombuffer(key, dtype=np.int64).reshape(staircase.m, staircase.n)
        partner = dense[[0, 1, 3, 2]].tobytes()
        if partner > key:
            other = tally.get(partner, 0)
            z.append((seen - other) / np.sqrt(seen + other))
    assert len(z) > 10
    assert max(abs(v) for v in z) <= 4
    assert abs(np.mean(z)) <= 3 / np.sqrt(len(z))
