"""
Exact ground truth for small instances.

exact_count runs a column-by-column dynamic program over the multiset of residual row sums;
naive_count and enumerate_matchings are deliberately simple brute-force cross-checks.
"""
import os
import math
import logging
import itertools
from collections import defaultdict
from fractions import Fraction

from model.errors import BudgetExceededError, InstanceTooLargeError, EnumerationTooLargeError
from model.margins import gale_ryser_feasible
from model.results import ExactCount

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = int(os.environ.get('BCT_DP_BUDGET', 10 ** 7))
MATCHING_MAX_N = 9
NAIVE_MAX_PATTERNS = 10 ** 6
TABLE_LIMIT = 10 ** 5


def _column_choices(residual, cj):
    """
    Ways to put the 1s of a column of sum cj into rows with the given residual sums.

    Rows sharing a residual value are interchangeable, so a choice is a count per value
    group, weighted by the product of binomials. Yields (next residual, multiplicity).
    """
    groups = [(value, len(list(run))) for value, run in itertools.groupby(residual)]
    tail_capacity = list(itertools.accumulate(size for _, size in reversed(groups)))[::-1] + [0]

    def walk(g, left):
        if left == 0:
            yield ()
            return
        if g == len(groups) or tail_capacity[g] < left:
            return
        size = groups[g][1]
        for k in range(min(size, left), -1, -1):
            for rest in walk(g + 1, left - k):
                yield (k,) + rest

    for picks in walk(0, cj):
        nxt = []
        weight = 1
        for (value, size), k in itertools.zip_longest(groups, picks, fillvalue=0):
            weight *= math.comb(size, k)
            nxt.extend([value - 1] * k)
            nxt.extend([value] * (size - k))
        yield tuple(sorted((v for v in nxt if v > 0), reverse=True)), weight


def exact_count(margins, budget=None):
    """
    |Omega_{r,c}| by dynamic programming over columns.

    The state after j columns is the sorted tuple of residual row sums; states whose largest
    residual exceeds the number of remaining columns are dropped. Raises BudgetExceededError
    once more than `budget` states have been stored.
    """
    budget = budget or DEFAULT_BUDGET
    r, c = margins.r.tolist(), margins.c.tolist()
    factor = math.prod(math.factorial(v) for v in r) * math.prod(math.factorial(v) for v in c)
    if not gale_ryser_feasible(margins):
        return ExactCount(count=0, acceptance=Fraction(0), dp_states=0)

    states = {tuple(r): 1}
    dp_states = 1
    for idx, cj in enumerate(c):
        columns_left = len(c) - idx - 1
        nxt = defaultdict(int)
        for residual, ways in states.items():
            for following, weight in _column_choices(residual, cj):
                if following and following[0] > columns_left:
                    continue
                nxt[following] += ways * weight
        states = nxt
        dp_states += len(states)
        if dp_states > budget:
            raise BudgetExceededError(f'dynamic program passed {budget} states at column {idx + 1}',
                                      budget=budget, column=idx + 1)
        logger.debug('Column %d/%d: %d states', idx + 1, len(c), len(states))
    count = states.get((), 0)
    return ExactCount(count=count, acceptance=Fraction(count * factor, math.factorial(margins.N)),
                      dp_states=dp_states)


def exact_acceptance_probability(margins, budget=None):
    """Pr[T binary] = |Omega| * prod r_i! * prod c_j! / N!, as a reduced fraction."""
    return exact_count(margins, budget).acceptance


def enumerate_matchings(margins):
    """Fraction of all N! pairings whose table is binary, by brute force."""
    N = margins.N
    if N > MATCHING_MAX_N:
        raise InstanceTooLargeError(f'N={N} is above the {MATCHING_MAX_N} limit for matching enumeration', N=N)
    n = margins.n
    row_key = [i * n for i in margins.row_of.tolist()]
    col_of = margins.col_of.tolist()
    binary = 0
    for perm in itertools.permutations(col_of):
        if len({rk + j for rk, j in zip(row_key, perm)}) == N:
            binary += 1
    return Fraction(binary, math.factorial(N))


def naive_count(margins):
    """Count 0/1 tables by trying every combination of row patterns."""
    r, c = margins.r.tolist(), margins.c.tolist()
    n = len(c)
    patterns = math.prod(math.comb(n, ri) for ri in r)
    if patterns > NAIVE_MAX_PATTERNS:
        raise InstanceTooLargeError(f'{patterns} row-pattern combinations is above {NAIVE_MAX_PATTERNS}',
                                    patterns=patterns)
    options = [list(itertools.combinations(range(n), ri)) for ri in r]
    total = 0
    for rows in itertools.product(*options):
        col_sums = [0] * n
        for row in rows:
            for j in row:
                col_sums[j] += 1
        if col_sums == c:
            total += 1
    return total


def enumerate_tables(margins, limit=None):
    """
    List every binary table (as a tuple of 0/1 row tuples, in sorted-margin order).

    Rows are filled top to bottom; a column may only be used while it has residual capacity
    and no column may keep more residual than there are rows left.
    """
    limit = limit or TABLE_LIMIT
    r, c = margins.r.tolist(), margins.c.tolist()
    m, n = len(r), len(c)
    found = []

    def fill(i, residual, rows):
        if i == m:
            found.append(tuple(rows))
            if len(found) > limit:
                raise EnumerationTooLargeError(f'more than {limit} tables', limit=limit)
            return
        open_cols = [j for j in range(n) if residual[j] > 0]
        for chosen in itertools.combinations(open_cols, r[i]):
            nxt = list(residual)
            for j in chosen:
                nxt[j] -= 1
            if max(nxt) > m - i - 1:
                continue
            picked = set(chosen)
            fill(i + 1, nxt, rows + [tuple(1 if j in picked else 0 for j in range(n))])

    if gale_ryser_feasible(margins):
        fill(0, list(c), [])
    return found
