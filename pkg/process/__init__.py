import click

from model.errors import InconclusiveVerdict, RejectionExhaustedError
from model.margins import Margins, load_margins, parse_vector
from process.asymptotics import (DEFAULT_EPSILON, DEFAULT_THETA, DEFAULT_TOLERANCE, KAPPA_CAP, condition1_stat,
                                 default_grid, empirical_split_rates, evaluate_family, mu_stat, poisson_acceptance,
                                 split_diagnostics)
from process.bench import MIN_REPEAT, bench_family
from process.estimator import double_edge_tally, estimate_acceptance, estimate_count
from process.ext.utils import make_rng, resolve_seed
from process.families import get_family
from process.oracle import exact_count
from process.sampler import sample_binary_rejection
from process.stats import ALIASES, PROPERTIES, property_transfer, uniformity_test
from report.formats import dense_csv, dump_json, edges_csv, records_csv

GRID_COLUMNS = ['N', 'm', 'n', 'r1', 'c1', 'condition1', 'mu']
BENCH_COLUMNS = ['N', 'repeat', 'median_seconds', 'ns_per_token']


def margins_options(fn):
    fn = click.option('--c', 'c_text', help='Column sums, e.g. "2 2 1 1 1"')(fn)
    fn = click.option('--r', 'r_text', help='Row sums, e.g. "3 2 1 1"')(fn)
    fn = click.option('--margins', 'margins_path', type=click.Path(exists=True, dir_okay=False),
                      help='Margin file (`r: ...` / `c: ...` lines, or JSON with "r" and "c")')(fn)
    return fn


def seed_option(fn):
    return click.option('--seed', type=int, envvar='BCT_SEED',
                        help='Root seed (falls back to BCT_SEED, then to fresh entropy)')(fn)


def output_options(fn):
    fn = click.option('--pretty', is_flag=True, help='Indented JSON with human-readable labels')(fn)
    return fn


def threads_option(fn):
    return click.option('--threads', type=click.IntRange(min=1), envvar='BCT_THREADS',
                        help='Worker threads, default 1')(fn)


def resolve_margins(ctx, margins_path, r_text, c_text):
    if margins_path:
        if r_text or c_text:
            raise click.UsageError('give either --margins or --r/--c, not both')
        ctx.obj.setdefault('inputs', []).append(margins_path)
        return load_margins(margins_path)
    if r_text is None or c_text is None:
        raise click.UsageError('margins are required: --margins FILE or both --r and --c')
    return Margins.from_vectors(parse_vector(r_text, 'r'), parse_vector(c_text, 'c'))


def remember_seed(ctx, seed):
    seed = resolve_seed(seed)
    ctx.obj['seed'] = seed
    return seed


def parse_grid(first, rest):
    values = []
    for text in ([first] if first else []) + list(rest):
        for token in text.replace(',', ' ').split():
            try:
                values.append(int(float(token)))
            except ValueError:
                raise click.BadParameter(f'`{token}` is not a number', param_hint='--grid')
    return values


def instance_summary(margins):
    return {
        'N': margins.N,
        'm': margins.m,
        'n': margins.n,
        'mu': mu_stat(margins),
        'condition1': condition1_stat(margins),
        'poisson_acceptance': poisson_acceptance(margins),
    }


@click.group()
def process_group():
    """
       Binary contingency table sampling, counting and diagnostics
    """


@click.command(help='Draw uniform binary tables by configuration-model rejection')
@margins_options
@seed_option
@click.option('--count', type=click.IntRange(min=1), default=1, show_default=True, help='Tables to draw')
@click.option('--max-attempts', type=click.IntRange(min=1), help='Attempts per table, default BCT_MAX_ATTEMPTS')
@click.option('--format', 'fmt', type=click.Choice(['json', 'csv', 'edges']), default='json', show_default=True)
@output_options
@click.pass_context
def sample(ctx, margins_path, r_text, c_text, seed, count, max_attempts, fmt, pretty):
    margins = resolve_margins(ctx, margins_path, r_text, c_text)
    rng = make_rng(remember_seed(ctx, seed))
    drawn = []
    for _ in range(count):
        try:
            drawn.append(sample_binary_rejection(margins, rng, max_attempts))
        except RejectionExhaustedError as exc:
            exc.payload.update(instance_summary(margins))
            raise
    if fmt == 'json':
        click.echo(dump_json([{'attempts': attempts, **table.to_json_dict()} for table, attempts in drawn], pretty))
        return
    render = dense_csv if fmt == 'csv' else edges_csv
    for k, (table, attempts) in enumerate(drawn):
        if count > 1:
            click.echo(f'# table {k + 1}, attempts {attempts}')
        click.echo(render(table), nl=False)


@click.command(help='Exact number of binary tables by dynamic programming')
@margins_options
@click.option('--budget', type=click.IntRange(min=1), help='DP state limit, default BCT_DP_BUDGET')
@output_options
@click.pass_context
def count_exact(ctx, margins_path, r_text, c_text, budget, pretty):
    margins = resolve_margins(ctx, margins_path, r_text, c_text)
    click.echo(dump_json(exact_count(margins, budget), pretty))


@click.command(help='Monte Carlo estimate of the acceptance rate and of the number of binary tables')
@margins_options
@seed_option
@click.option('--epsilon', type=click.FloatRange(min=0, min_open=True), default=0.1, show_default=True)
@click.option('--delta', type=click.FloatRange(0, 1, min_open=True, max_open=True), default=0.05,
              show_default=True)
@click.option('--samples', type=click.IntRange(min=1),
              help='Fixed number of draws instead of the adaptive (epsilon, delta) rule')
@click.option('--max-samples', type=click.IntRange(min=1), help='Give-up cap, default BCT_MAX_SAMPLES')
@threads_option
@output_options
@click.pass_context
def estimate(ctx, margins_path, r_text, c_text, seed, epsilon, delta, samples, max_samples, threads, pretty):
    margins = resolve_margins(ctx, margins_path, r_text, c_text)
    seed = remember_seed(ctx, seed)
    if samples:
        result = estimate_acceptance(margins, samples, seed, delta, threads)
    else:
        result = estimate_count(margins, epsilon, delta, seed, threads, max_samples)
    click.echo(dump_json(result, pretty))


@click.command(help='Single-instance statistics: mu, condition 1 and the I_L / I_S split')
@margins_options
@seed_option
@click.option('--epsilon', type=click.FloatRange(min=0, min_open=True), default=DEFAULT_EPSILON,
              show_default=True, help='Split threshold: (r_i - 1)(c_j - 1) >= epsilon * N')
@click.option('--samples', type=click.IntRange(min=0), default=0, show_default=True,
              help='Also measure split rates and the double-edge mean on this many draws')
@threads_option
@output_options
@click.pass_context
def diagnose(ctx, margins_path, r_text, c_text, seed, epsilon, samples, threads, pretty):
    margins = resolve_margins(ctx, margins_path, r_text, c_text)
    report = {**instance_summary(margins), 'split': split_diagnostics(margins, epsilon)}
    if samples:
        seed = remember_seed(ctx, seed)
        report['sampling'] = empirical_split_rates(margins, epsilon, samples, seed, threads)
        report['double_edges'] = double_edge_tally(margins, samples, seed, threads)
    click.echo(dump_json(report, pretty))


@click.command(help='Evaluate both optimality conditions on a margin family over a grid of N')
@click.option('--family', required=True, help='Built-in family name or family definition file')
@click.option('--grid', 'grid_first', help='N values, e.g. --grid 1e3 1e4 1e5 1e6')
@click.argument('grid_rest', nargs=-1)
@click.option('--theta', type=click.FloatRange(min=0, min_open=True), default=DEFAULT_THETA, show_default=True)
@click.option('--tolerance', type=click.FloatRange(min=0), default=DEFAULT_TOLERANCE, show_default=True)
@click.option('--cap', type=click.IntRange(min=1), default=KAPPA_CAP, show_default=True,
              help='Largest row index classified')
@click.option('--format', 'fmt', type=click.Choice(['json', 'csv']), default='json', show_default=True)
@click.option('--strict', is_flag=True, help='Exit 5 when the verdict is inconclusive')
@threads_option
@output_options
@click.pass_context
def check_conditions(ctx, family, grid_first, grid_rest, theta, tolerance, cap, fmt, strict, threads, pretty):
    grid = parse_grid(grid_first, grid_rest) or default_grid()
    sequence = get_family(family)
    ctx.obj.setdefault('inputs', []).append(family)
    report = evaluate_family(sequence, grid, theta, tolerance, cap, threads)
    if fmt == 'csv':
        rows = [{**point.to_json_dict(), 'tail_mass': mass} for point, mass in zip(report.points, report.tail_mass)]
        click.echo(records_csv(rows, GRID_COLUMNS + ['tail_mass']), nl=False)
    else:
        click.echo(dump_json(report, pretty))
    if strict and report.overall == 'inconclusive':
        raise InconclusiveVerdict(f'{report.family}: verdict is inconclusive', cond1=report.cond1_verdict,
                                  cond2=report.cond2_verdict)


@click.command(help='Chi-square test of sampled tables against the uniform law on all binary tables')
@margins_options
@seed_option
@click.option('--samples', type=click.IntRange(min=1), help='Accepted tables to draw, default 100 per table')
@threads_option
@output_options
@click.pass_context
def uniformity_command(ctx, margins_path, r_text, c_text, seed, samples, threads, pretty):
    margins = resolve_margins(ctx, margins_path, r_text, c_text)
    click.echo(dump_json(uniformity_test(margins, samples, remember_seed(ctx, seed), threads=threads), pretty))


@click.command(help='Compare a graph property under the configuration model and the uniform law')
@margins_options
@seed_option
@click.option('--property', 'prop', type=click.Choice(PROPERTIES + tuple(ALIASES)), default='connected',
              show_default=True)
@click.option('--k', type=click.IntRange(min=0), help='Degree bound for max-degree-≤-k, default N')
@click.option('--samples', type=click.IntRange(min=1), default=10000, show_default=True)
@threads_option
@output_options
@click.pass_context
def property_transfer_command(ctx, margins_path, r_text, c_text, seed, prop, k, samples, threads, pretty):
    margins = resolve_margins(ctx, margins_path, r_text, c_text)
    result = property_transfer(margins, prop, samples, remember_seed(ctx, seed), k, threads)
    click.echo(dump_json(result, pretty))


@click.command(help='Median wall time of one configuration draw per N')
@click.option('--family', default='unit-margins', show_default=True,
              help='Built-in family name or family definition file')
@click.option('--grid', 'grid_first', help='N values, e.g. --grid 1e6 1e7')
@click.argument('grid_rest', nargs=-1)
@click.option('--repeat', type=click.IntRange(min=MIN_REPEAT), default=MIN_REPEAT, show_default=True)
@click.option('--format', 'fmt', type=click.Choice(['json', 'csv']), default='json', show_default=True)
@output_options
@click.pass_context
def bench(ctx, family, grid_first, grid_rest, repeat, fmt, pretty):
    grid = parse_grid(grid_first, grid_rest) or [10 ** 6, 10 ** 7]
    points = bench_family(get_family(family), grid, repeat, remember_seed(ctx, None))
    if fmt == 'csv':
        click.echo(records_csv(points, BENCH_COLUMNS), nl=False)
    else:
        click.echo(dump_json(points, pretty))


process_group.add_command(sample)
process_group.add_command(count_exact, 'count-exact')
process_group.add_command(estimate)
process_group.add_command(diagnose)
process_group.add_command(check_conditions, 'check-conditions')
process_group.add_command(uniformity_command, 'test-uniformity')
process_group.add_command(property_transfer_command, 'property-transfer')
process_group.add_command(bench)
