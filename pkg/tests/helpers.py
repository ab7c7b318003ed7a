import numpy as np

from model.margins import Margins

STAIRCASE_R = [3, 2, 1, 1]
STAIRCASE_C = [2, 2, 1, 1, 1]
STAIRCASE_COUNT = 68


def margins_of_matrix(matrix):
    matrix = np.asarray(matrix)
    return Margins.from_vectors(matrix.sum(axis=1), matrix.sum(axis=0), trim_zeros=True)


def random_binary_margins(rng, max_m=4, max_n=4, max_total=12, min_total=1):
    """Margins of a random 0/1 matrix, so always feasible."""
    while True:
        m, n = rng.integers(1, max_m + 1), rng.integers(1, max_n + 1)
        matrix = rng.random((m, n)) < rng.uniform(0.2, 0.8)
        if min_total <= matrix.sum() <= max_total:
            return margins_of_matrix(matrix)


def random_margins(rng, max_m=4, max_n=4, max_total=12):
    """Random positive vectors with equal totals; often infeasible."""
    m, n = int(rng.integers(1, max_m + 1)), int(rng.integers(1, max_n + 1))
    total = int(rng.integers(max(m, n), max_total + 1))
    r = 1 + rng.multinomial(total - m, np.full(m, 1 / m))
    c = 1 + rng.multinomial(total - n, np.full(n, 1 / n))
    return Margins.from_vectors(r, c)
