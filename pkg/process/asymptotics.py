"""
Diagnostic statistics of a single instance (mu, lambda, the I_L / I_S split) and the
evaluation of the two optimality conditions on a family of margins indexed by N.
"""
import math
import logging
from fractions import Fraction

import numpy as np

from model.errors import ValidationError
from model.margins import falling_factorial
from model.results import SplitDiagnostics, SplitSampling, GridPoint, ConditionReport
from process.ext.utils import make_rng, plan_tasks, run_tasks, resolve_seed
from process.sampler import iter_batches

logger = logging.getLogger(__name__)

DEFAULT_THETA = 0.01
DEFAULT_TOLERANCE = 0.1
DEFAULT_EPSILON = 0.1
KAPPA_CAP = 64
OSCILLATION = 0.5

VANISHING, POSITIVE, INCONCLUSIVE = 'vanishing', 'positive', 'inconclusive'


def _pair_sums(margins):
    r = margins.r
    c = margins.c
    return int(np.sum(r * (r - 1))), int(np.sum(c * (c - 1)))


def mu_stat(margins, exact=False):
    """
    mu(N) = sum over entries of r_i(r_i-1) c_j(c_j-1) / (2 N(N-1)), the expected number of
    double edges of a configuration draw. The double sum factorizes into two integer sums,
    so the float result is correctly rounded; exact=True returns the Fraction.
    """
    N = margins.N
    if N < 2:
        return Fraction(0) if exact else 0.0
    rr, cc = _pair_sums(margins)
    value = Fraction(rr * cc, 2 * falling_factorial(N, 2))
    return value if exact else float(value)


def condition1_stat(margins):
    """[sum r_i(r_i-1)] * [sum c_j(c_j-1)] / N^2."""
    rr, cc = _pair_sums(margins)
    return float(Fraction(rr * cc, margins.N ** 2))


def poisson_acceptance(margins):
    """exp(-mu): reference value for Pr[T binary] when r_1 = o(N)."""
    return math.exp(-mu_stat(margins))


def large_profile(margins, epsilon):
    """
    Per-row width of I_L = {(i, j): (r_i - 1)(c_j - 1) >= epsilon * N}.

    Both margins are sorted, so row i owns columns 0..width_i - 1 and the widths never
    increase. Rows are scanned until the first empty one.
    """
    threshold = epsilon * margins.N
    a = (margins.r - 1).tolist()
    b = margins.c - 1
    neg_b = -b
    profile = []
    for ai in a:
        if ai <= 0 or ai * int(b[0]) < threshold:
            break
        width = int(np.searchsorted(neg_b, -threshold / ai, side='right'))
        while width < b.size and ai * int(b[width]) >= threshold:
            width += 1
        while width > 0 and ai * int(b[width - 1]) < threshold:
            width -= 1
        if width == 0:
            break
        profile.append(width)
    assert all(x >= y for x, y in zip(profile, profile[1:])), 'I_L is not a staircase'
    return profile


def split_diagnostics(margins, epsilon=DEFAULT_EPSILON):
    if not epsilon > 0:
        raise ValidationError('epsilon must be positive', epsilon=epsilon)
    N = margins.N
    profile = large_profile(margins, epsilon)
    r, c = margins.r, margins.c
    rr, cc = r * (r - 1), c * (c - 1)
    c_prefix = np.concatenate(([0], np.cumsum(c)))
    cc_prefix = np.concatenate(([0], np.cumsum(cc)))
    widths = np.array(profile, dtype=np.int64)
    rows = np.arange(widths.size)
    gamma_num = sum(a * b for a, b in zip(r[rows].tolist(), c_prefix[widths].tolist()))
    large_num = sum(a * b for a, b in zip(rr[rows].tolist(), cc_prefix[widths].tolist()))
    total = int(rr.sum()) * int(cc.sum())
    falling = 2 * falling_factorial(N, 2)
    return SplitDiagnostics(
        epsilon=epsilon,
        large_profile=profile,
        large_set_size=int(widths.sum()),
        large_rows=rows.tolist(),
        large_cols=list(range(profile[0])) if profile else [],
        gamma=gamma_num / N,
        lambda_=float(Fraction(total - large_num, 2 * N * N)),
        mu=float(Fraction(total, falling)) if N > 1 else 0.0,
        large_mu_part=float(Fraction(large_num, falling)) if N > 1 else 0.0,
    )


def _split_tally(margins, profile, rng, samples):
    widths = np.zeros(margins.m, dtype=np.int64)
    widths[:len(profile)] = profile
    n = margins.n
    no_large, small_binary, small_nonbinary, large_nonbinary = 0, 0, 0, 0
    for drawn in iter_batches(margins, rng, samples):
        slot_large = (drawn.keys % n) < widths[drawn.keys // n]
        no_large += int(np.count_nonzero(~slot_large.any(axis=1)))
        entry_large = (drawn.entry_key % n) < widths[drawn.entry_key // n]
        repeated = drawn.entry_count >= 2
        z_small = np.bincount(drawn.entry_draw[repeated & ~entry_large], minlength=drawn.size)
        small_binary += int(np.count_nonzero(z_small == 0))
        small_nonbinary += int(z_small.sum())
        large_nonbinary += int(np.count_nonzero(repeated & entry_large))
    return no_large, small_binary, small_nonbinary, large_nonbinary


def empirical_split_rates(margins, epsilon=DEFAULT_EPSILON, samples=10 ** 4, seed=None, threads=None):
    """
    Monte Carlo rates of W_L = 0 (no token pair lands in I_L) and Z_S = 0, and the mean
    numbers of entries >= 2 inside I_S and I_L, next to exp(-gamma) and lambda.
    """
    seed = resolve_seed(seed)
    diag = split_diagnostics(margins, epsilon)
    sizes = plan_tasks(samples)
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    parts = run_tasks(lambda child, size: _split_tally(margins, diag.large_profile, make_rng(child), size),
                      list(zip(children, sizes)), threads)
    no_large, small_binary, small_nonbinary, large_nonbinary = (sum(col) for col in zip(*parts))
    return SplitSampling(
        epsilon=epsilon, samples=samples, seed=seed,
        no_large_rate=no_large / samples, exp_neg_gamma=diag.exp_neg_gamma,
        mean_small_nonbinary=small_nonbinary / samples, lambda_=diag.lambda_,
        mean_large_nonbinary=large_nonbinary / samples,
        small_binary_rate=small_binary / samples, exp_neg_lambda=diag.exp_neg_lambda,
    )


def default_grid(points=9, low=10 ** 3, high=10 ** 7):
    return sorted({int(round(x)) for x in np.geomspace(low, high, points)})


def check_grid(grid):
    grid = sorted({int(N) for N in grid})
    if len(grid) < 4:
        raise ValidationError('the grid needs at least 4 distinct N values', grid=grid)
    if grid[0] < 1 or grid[-1] < 100 * grid[0]:
        raise ValidationError('the grid must span at least two decades', grid=grid)
    return grid


def _grid_point(N, margins, cap):
    r, c = margins.r, margins.c
    head = min(cap, margins.m)
    row_heads = np.zeros(cap, dtype=np.int64)
    row_heads[:head] = r[:head]
    col_heads = np.zeros(cap, dtype=np.int64)
    col_heads[:min(cap, margins.n)] = c[:cap]
    suffix = np.zeros(cap + 1)
    tail = N - np.concatenate(([0], np.cumsum(r[:cap])))
    suffix[:tail.size] = tail / N
    return GridPoint(N=N, m=margins.m, n=margins.n, r1=int(r[0]), c1=int(c[0]),
                     condition1=condition1_stat(margins), mu=mu_stat(margins),
                     head_rows=int(np.count_nonzero(r > 1)), row_ratios=(row_heads / N).tolist(),
                     row_heads=row_heads.tolist(), col_heads=col_heads.tolist(), suffix_mass=suffix.tolist())


def log_slope(xs, values):
    """Least-squares slope of log(value) against log(N) over the positive values, or None."""
    xs = np.asarray(xs, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    keep = values > 0
    if np.count_nonzero(keep) < 2:
        return None
    return float(np.polyfit(np.log(xs[keep]), np.log(values[keep]), 1)[0])


def classify_ratio(xs, values, theta, tolerance):
    """Classify a ratio sequence as tending to zero, bounded below, or neither."""
    values = np.asarray(values, dtype=np.float64)
    last = float(values[-1])
    if last == 0.0:
        return VANISHING
    slope = log_slope(xs, values)
    if last < theta and (slope is None or slope < -tolerance):
        return VANISHING
    if values.min() >= theta:
        return POSITIVE
    if np.all(values > 0) and slope is not None and slope >= -tolerance:
        return POSITIVE
    return INCONCLUSIVE


def classify_index(xs, heads, theta, tolerance, expanding=False):
    """
    Class of r_i(N) / N given the raw r_i(N) at each N. When the family's run of non-unit rows
    keeps growing, unit entries at index i are padding not yet reached by that run; those
    points are left out, and fewer than two remaining points leave the index inconclusive.
    """
    xs = np.asarray(xs, dtype=np.float64)
    heads = np.asarray(heads, dtype=np.float64)
    if expanding:
        keep = heads > 1
        if np.count_nonzero(keep) < 2:
            return INCONCLUSIVE
        xs, heads = xs[keep], heads[keep]
    return classify_ratio(xs, heads / xs, theta, tolerance)


def oscillates(values):
    """Sign change between consecutive relative steps that both exceed OSCILLATION."""
    values = np.asarray(values, dtype=np.float64)
    if values.size < 3:
        return False
    base = np.maximum(np.abs(values[:-1]), 1e-12)
    steps = np.diff(values) / base
    big = np.abs(steps) > OSCILLATION
    flips = np.sign(steps[1:]) != np.sign(steps[:-1])
    return bool(np.any(big[1:] & big[:-1] & flips))


def _condition1_verdict(xs, values, tolerance):
    values = np.asarray(values, dtype=np.float64)
    if np.all(values == 0):
        return 0.0, 'bounded'
    slope = log_slope(xs, values)
    if slope is None:
        return math.nan, INCONCLUSIVE
    if slope <= tolerance:
        return slope, 'bounded'
    if values[-1] > values[0]:
        return slope, 'diverging'
    return slope, INCONCLUSIVE


def _upper_half(count):
    return max(0, min(count // 2, count - 3))


def evaluate_family(family, grid=None, theta=DEFAULT_THETA, tolerance=DEFAULT_TOLERANCE, cap=KAPPA_CAP,
                    threads=None):
    """
    Evaluate both optimality conditions on `family` over the grid of N values.

    Limits are read off the upper half of the grid. Index i counts as o(N) when r_i(N)/N
    ends below theta with a log-log slope under -tolerance; kappa is the first such index.
    While the number of rows above 1 keeps growing, unit rows are padding and sit out the fit.
    Condition 2 holds when r_1 = o(N), when the row mass from kappa on stays positive, or
    when lim c_1 < kappa; it fails when that mass vanishes and lim c_1 >= kappa.
    """
    grid = check_grid(grid or default_grid())
    all_margins = run_tasks(lambda N: family.margins(N), [(N,) for N in grid], threads)
    _, swapped = all_margins[-1].oriented()
    if swapped:
        all_margins = [m.transpose() for m in all_margins]
    points = []
    for N, margins in zip(grid, all_margins):
        points.append(_grid_point(N, margins, cap))
        logger.info('%s at N=%d: m=%d n=%d r1=%d c1=%d', family.name, N, margins.m, margins.n,
                    points[-1].r1, points[-1].c1)

    lo = _upper_half(len(grid))
    xs = grid[lo:]
    upper = points[lo:]
    cond1_values = [p.condition1 for p in points]
    cond1_exponent, cond1_verdict = _condition1_verdict(xs, cond1_values[lo:], tolerance)

    expanding = upper[-1].head_rows > upper[0].head_rows
    classes = [classify_index(xs, [p.row_heads[i] for p in upper], theta, tolerance, expanding) for i in range(cap)]
    kappa = next((i + 1 for i, cls in enumerate(classes) if cls == VANISHING), None)
    kappa_low = next((i + 1 for i, cls in enumerate(classes) if cls != POSITIVE), None)
    col_max = np.max([p.col_heads for p in upper], axis=0)
    kappa_prime = next((j + 1 for j, v in enumerate(col_max.tolist()) if v <= 1), None)

    c1_values = [p.c1 for p in points]
    c1_upper = c1_values[lo:]
    c1_limit = c1_upper[-1] if family.monotone else max(c1_upper)
    tail_mass = [p.suffix_mass[kappa - 1] if kappa else 0.0 for p in points]
    tail_class = classify_ratio(xs, tail_mass[lo:], theta, tolerance) if kappa else VANISHING
    oscillating = not family.monotone and (oscillates(c1_upper) or oscillates(tail_mass[lo:]))

    sublinear_r1 = classes[0] == VANISHING
    if sublinear_r1 or kappa_low is None or c1_limit < kappa_low:
        cond2 = 'holds'
    elif kappa != kappa_low:
        cond2 = INCONCLUSIVE
    elif tail_class == POSITIVE:
        cond2 = 'holds'
    elif tail_class == VANISHING:
        cond2 = 'violated'
    else:
        cond2 = INCONCLUSIVE
    if oscillating and not sublinear_r1:
        cond2 = INCONCLUSIVE

    if cond1_verdict == 'bounded' and cond2 == 'holds':
        overall = 'optimal'
    elif cond1_verdict == 'diverging' or cond2 == 'violated':
        overall = 'not-optimal'
    else:
        overall = INCONCLUSIVE
    logger.info('%s: condition 1 %s, condition 2 %s, kappa=%s', family.name, cond1_verdict, cond2, kappa)

    return ConditionReport(
        family=family.name, grid=grid, swapped=bool(swapped), theta=theta, tolerance=tolerance,
        cond1_values=cond1_values, cond1_exponent=cond1_exponent, cond1_verdict=cond1_verdict,
        index_classes=classes, kappa_estimate=kappa, kappa_capped=kappa is None,
        kappa_prime=kappa_prime, tail_mass=tail_mass, tail_class=tail_class,
        c1_values=c1_values, c1_limit=int(c1_limit), sublinear_r1=sublinear_r1, oscillating=oscillating,
        cond2_verdict=cond2, overall=overall, points=points,
    )
