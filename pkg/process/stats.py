"""
Statistical checks of the sampler: a chi-square test of the accepted tables against the
uniform law on the enumerated set, and the comparison of a graph property's frequency
under the configuration model and under the uniform law on binary tables.
"""
import math
import logging

import networkx as nx
import numpy as np
from scipy import stats

from model.errors import AcceptanceTooLowError, ValidationError
from model.results import UniformityResult, TransferResult
from model.tables import encode_dense
from process.ext.utils import make_rng, plan_tasks, run_tasks, resolve_seed
from process.oracle import enumerate_tables
from process.sampler import ensure_feasible, iter_batches, sample_binary_batch

logger = logging.getLogger(__name__)

MIN_SAMPLES_PER_TABLE = 10
DEFAULT_SAMPLES_PER_TABLE = 100
PROPERTIES = ('connected', 'has-giant-component', 'max-degree-≤-k')
ALIASES = {'max-degree': 'max-degree-≤-k', 'max-degree-le-k': 'max-degree-≤-k'}


def _tally_tables(margins, index, sampler, rng, count):
    observed = np.zeros(len(index), dtype=np.int64)
    for table in sampler(margins, rng, count):
        code = table.encode()
        if code not in index:
            raise ValidationError('sampler returned a table outside Omega', table=code)
        observed[index[code]] += 1
    return observed


def uniformity_test(margins, samples=None, seed=None, sampler=None, threads=None):
    """
    Chi-square goodness of fit of accepted tables against the uniform law on Omega.

    `sampler(margins, rng, count)` must yield `count` tables; the default is the batched
    rejection sampler and `samples` defaults to 100 per table. With a single table there is
    nothing to test: dof = 0, p = 1.
    """
    ensure_feasible(margins)
    seed = resolve_seed(seed)
    sampler = sampler or sample_binary_batch
    tables = enumerate_tables(margins)
    index = {encode_dense(t): k for k, t in enumerate(tables)}
    samples = int(samples or DEFAULT_SAMPLES_PER_TABLE * len(tables))
    if samples < MIN_SAMPLES_PER_TABLE * len(tables):
        raise ValidationError(f'{samples} samples is fewer than {MIN_SAMPLES_PER_TABLE} per table '
                              f'({len(tables)} tables)', samples=samples, table_count=len(tables))
    sizes = plan_tasks(samples)
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    parts = run_tasks(lambda child, size: _tally_tables(margins, index, sampler, make_rng(child), size),
                      list(zip(children, sizes)), threads)
    observed = np.sum(parts, axis=0)
    if len(tables) == 1:
        chi2, p_value = 0.0, 1.0
    else:
        chi2, p_value = stats.chisquare(observed)
    logger.info('Uniformity over %d tables: chi2=%.3f p=%.4g', len(tables), chi2, p_value)
    return UniformityResult(table_count=len(tables), observed=observed.tolist(), chi2=float(chi2),
                            dof=len(tables) - 1, p_value=float(p_value), samples=int(samples), seed=seed)


def draw_graph(margins, entry_keys, entry_counts=None):
    """
    Bipartite multigraph on rows 0..m-1 and columns m..m+n-1 with `count` parallel edges per
    nonzero entry, so every vertex degree equals its margin.
    """
    n = margins.n
    entry_keys = np.asarray(entry_keys, dtype=np.int64)
    counts = np.ones(entry_keys.size, dtype=np.int64) if entry_counts is None else np.asarray(entry_counts)
    rows = np.repeat(entry_keys // n, counts).tolist()
    cols = np.repeat(margins.m + entry_keys % n, counts).tolist()
    graph = nx.MultiGraph()
    graph.add_nodes_from(range(margins.m + n))
    graph.add_edges_from(zip(rows, cols))
    return graph


def canonical_property(prop):
    prop = ALIASES.get(prop, prop)
    if prop not in PROPERTIES:
        raise ValidationError(f'unknown property `{prop}`; choose one of {", ".join(PROPERTIES)}', prop=prop)
    return prop


def property_check(prop, k=None):
    prop = canonical_property(prop)
    if prop == 'connected':
        return nx.is_connected
    if prop == 'has-giant-component':
        return lambda g: 2 * max(len(part) for part in nx.connected_components(g)) >= g.number_of_nodes()
    if k is None:
        raise ValidationError(f'{prop} needs a bound k')
    return lambda g: max(d for _, d in g.degree()) <= k


def _transfer_tally(margins, check, rng, samples):
    holds_all, holds_binary, accepted = 0, 0, 0
    for drawn in iter_batches(margins, rng, samples):
        bounds = np.searchsorted(drawn.entry_draw, np.arange(drawn.size + 1))
        for b in range(drawn.size):
            lo, hi = bounds[b], bounds[b + 1]
            ok = check(draw_graph(margins, drawn.entry_key[lo:hi], drawn.entry_count[lo:hi]))
            holds_all += ok
            if drawn.binary[b]:
                accepted += 1
                holds_binary += ok
    return holds_all, holds_binary, accepted


def property_transfer(margins, prop, samples, seed=None, k=None, threads=None):
    """
    Frequency of a graph property on the multigraphs of raw configuration draws (p') and
    among the binary ones (p), checked against p >= 1 - (1 - p') / rho within three standard
    errors, rho being the acceptance rate of the same draws.
    """
    ensure_feasible(margins)
    prop = canonical_property(prop)
    check = property_check(prop, margins.N if k is None else k)
    seed = resolve_seed(seed)
    samples = max(1, int(samples))
    sizes = plan_tasks(samples)
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    parts = run_tasks(lambda child, size: _transfer_tally(margins, check, make_rng(child), size),
                      list(zip(children, sizes)), threads)
    holds_all, holds_binary, accepted = (sum(col) for col in zip(*parts))
    if accepted == 0:
        raise AcceptanceTooLowError(f'none of {samples} draws was binary', samples=samples)
    p_config = holds_all / samples
    p_uniform = holds_binary / accepted
    rho = accepted / samples
    bound = 1.0 - (1.0 - p_config) / rho
    var_bound = (p_config * (1 - p_config) / samples) / rho ** 2 \
        + (1 - p_config) ** 2 * (rho * (1 - rho) / samples) / rho ** 4
    std_error = math.sqrt(p_uniform * (1 - p_uniform) / accepted + var_bound)
    logger.info('%s: p_config=%.4f p_uniform=%.4f rho=%.4f', prop, p_config, p_uniform, rho)
    return TransferResult(prop=prop, samples=samples, accepted=accepted, p_config=p_config, p_uniform=p_uniform,
                          rho_hat=rho, bound=bound, std_error=std_error,
                          bound_check=p_uniform >= bound - 3 * std_error, seed=seed)
