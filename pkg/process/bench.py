import time
import logging

import numpy as np

from model.results import BenchPoint
from process.ext.utils import make_rng, resolve_seed
from process.sampler import sample_pairing

logger = logging.getLogger(__name__)

MIN_REPEAT = 5


def time_sampling(margins, rng, repeat=MIN_REPEAT):
    """Wall time of sample_pairing, one warm-up call excluded."""
    sample_pairing(margins, rng)
    timings = []
    for _ in range(max(MIN_REPEAT, repeat)):
        start = time.perf_counter()
        sample_pairing(margins, rng)
        timings.append(time.perf_counter() - start)
    return timings


def bench_family(family, grid, repeat=MIN_REPEAT, seed=None):
    seed = resolve_seed(seed)
    rng = make_rng(seed)
    points = []
    for N in sorted(int(x) for x in grid):
        margins = family.margins(N)
        timings = time_sampling(margins, rng, repeat)
        median = float(np.median(timings))
        points.append(BenchPoint(N=N, repeat=len(timings), median_seconds=median,
                                 ns_per_token=median * 1e9 / N, timings=tuple(timings)))
        logger.info('N=%d: median %.6fs (%.1f ns/token)', N, median, points[-1].ns_per_token)
    return points
