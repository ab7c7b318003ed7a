"""
Monte Carlo estimation of the acceptance probability and of |Omega_{r,c}|.

Since |Omega| * prod r_i! * prod c_j! = Pr[T binary] * N!, an estimate of the acceptance rate
is an estimate of the count. estimate_count samples in doubling batches until the number of
accepted draws reaches ceil(3 ln(2/delta) / epsilon^2); by the multiplicative Chernoff bound
Pr[|X - np| >= eps * np] <= 2 exp(-eps^2 np / 3), that many successes puts the relative
error below epsilon with probability at least 1 - delta.
"""
import os
import math
import logging
from fractions import Fraction

import numpy as np
from scipy import stats

from model.errors import AcceptanceTooLowError
from model.results import CountEstimate, DoubleEdgeMean
from process.asymptotics import mu_stat, condition1_stat
from process.ext.utils import make_rng, plan_tasks, run_tasks, resolve_seed
from process.sampler import ensure_feasible, iter_batches

logger = logging.getLogger(__name__)

MAX_SAMPLES = int(os.environ.get('BCT_MAX_SAMPLES', 10 ** 7))
EXACT_RECONSTRUCT_MAX_N = 20
LN2 = math.log(2.0)


def wilson_interval(successes, trials, delta):
    """Wilson score interval at level 1 - delta, clipped to [0, 1]."""
    if trials <= 0:
        return 0.0, 1.0
    z = float(stats.norm.ppf(1.0 - delta / 2.0))
    p = successes / trials
    denom = 1.0 + z ** 2 / trials
    center = (p + z ** 2 / (2.0 * trials)) / denom
    margin = z * math.sqrt(p * (1.0 - p) / trials + z ** 2 / (4.0 * trials ** 2)) / denom
    return max(0.0, min(p, center - margin)), min(1.0, max(p, center + margin))


def log2_configurations_per_table(margins):
    """log2(N! / (prod r_i! * prod c_j!)): the factor turning acceptance into a count."""
    r = margins.r.astype(np.float64)
    c = margins.c.astype(np.float64)
    ln = math.lgamma(margins.N + 1) - math.fsum(np.vectorize(math.lgamma)(r + 1)) \
        - math.fsum(np.vectorize(math.lgamma)(c + 1))
    return ln / LN2


def _configurations_per_table(margins):
    r, c = margins.r.tolist(), margins.c.tolist()
    return Fraction(math.factorial(margins.N),
                    math.prod(math.factorial(v) for v in r) * math.prod(math.factorial(v) for v in c))


def _tally(margins, rng, samples):
    accepted, double_edges, double_edges_sq = 0, 0, 0
    for drawn in iter_batches(margins, rng, samples):
        accepted += int(np.count_nonzero(drawn.binary))
        double_edges += int(drawn.double_edges.sum())
        double_edges_sq += int(np.sum(drawn.double_edges * drawn.double_edges))
    return samples, accepted, double_edges, double_edges_sq


def _run_samples(margins, seed_sequence, samples, threads):
    sizes = plan_tasks(samples)
    children = seed_sequence.spawn(len(sizes))
    results = run_tasks(lambda child, size: _tally(margins, make_rng(child), size),
                        list(zip(children, sizes)), threads)
    return tuple(sum(col) for col in zip(*results))


def _build_estimate(margins, accepted, samples, seed, delta, epsilon=None, target=None, batches=1):
    low, high = wilson_interval(accepted, samples, delta)
    p_hat = accepted / samples
    count_log2 = math.log2(p_hat) + log2_configurations_per_table(margins) if accepted else None
    count_estimate = None
    if accepted and margins.N <= EXACT_RECONSTRUCT_MAX_N:
        count_estimate = round(Fraction(accepted, samples) * _configurations_per_table(margins))
    return CountEstimate(p_hat=p_hat, ci_low=low, ci_high=high, accepted=accepted, samples_used=samples,
                         count_log2=count_log2, count_estimate=count_estimate, epsilon=epsilon, delta=delta,
                         seed=seed, target_accepted=target, batches=batches)


def estimate_acceptance(margins, samples, seed=None, delta=0.05, threads=None):
    """Fraction of `samples` configuration draws that are binary, with a Wilson interval."""
    seed = resolve_seed(seed)
    samples = max(1, int(samples))
    _, accepted, _, _ = _run_samples(margins, np.random.SeedSequence(seed), samples, threads)
    logger.info('Accepted %d of %d draws', accepted, samples)
    return _build_estimate(margins, accepted, samples, seed, delta)


def required_accepted(epsilon, delta):
    return math.ceil(3.0 * math.log(2.0 / delta) / epsilon ** 2)


def estimate_count(margins, epsilon, delta, seed=None, threads=None, max_samples=None):
    """
    (epsilon, delta) estimate of |Omega_{r,c}| by sequential doubling.

    Batch k draws target * 2^k configurations; sampling stops once the accepted total reaches
    the target. Raises AcceptanceTooLowError with the partial estimate when max_samples
    draws are spent first.
    """
    ensure_feasible(margins)
    seed = resolve_seed(seed)
    max_samples = max_samples or MAX_SAMPLES
    target = required_accepted(epsilon, delta)
    root = np.random.SeedSequence(seed)
    accepted, samples, batch, batches = 0, 0, target, 0
    while accepted < target:
        if samples >= max_samples:
            partial = _build_estimate(margins, accepted, samples, seed, delta, epsilon, target, batches)
            raise AcceptanceTooLowError(f'{accepted} of {samples} draws accepted, {target} needed',
                                        estimate=partial, p_upper=partial.ci_high, mu=mu_stat(margins),
                                        condition1=condition1_stat(margins))
        size = min(batch, max_samples - samples)
        _, got, _, _ = _run_samples(margins, root.spawn(1)[0], size, threads)
        accepted += got
        samples += size
        batches += 1
        batch *= 2
        logger.info('Batch %d: %d draws, %d/%d accepted so far', batches, size, accepted, target)
    return _build_estimate(margins, accepted, samples, seed, delta, epsilon, target, batches)


def double_edge_tally(margins, samples, seed=None, threads=None):
    """Mean number of matched double edges F over independent draws, with its standard error."""
    seed = resolve_seed(seed)
    samples = max(1, int(samples))
    _, _, total, total_sq = _run_samples(margins, np.random.SeedSequence(seed), samples, threads)
    mean = total / samples
    variance = max(0.0, total_sq / samples - mean * mean) * samples / max(1, samples - 1)
    return DoubleEdgeMean(mean=mean, std_error=math.sqrt(variance / samples), samples=samples, seed=seed)


def empirical_double_edge_mean(margins, samples, seed=None, threads=None):
    return double_edge_tally(margins, samples, seed, threads).mean
