result_labels_to_key = {
    'N': 'Total (N)',
    'm': 'Rows (m)',
    'n': 'Columns (n)',
    'count': 'Binary tables |Omega|',
    'acceptance_num': 'Acceptance numerator',
    'acceptance_den': 'Acceptance denominator',
    'acceptance_float': 'Acceptance probability',
    'dp_states': 'DP states stored',
    'p_hat': 'Acceptance rate',
    'ci_low': 'Confidence interval low',
    'ci_high': 'Confidence interval high',
    'accepted': 'Accepted draws',
    'samples_used': 'Draws used',
    'count_log2': 'log2 |Omega| estimate',
    'count_estimate': '|Omega| estimate',
    'target_accepted': 'Accepted draws needed',
    'batches': 'Sampling batches',
    'epsilon': 'Epsilon',
    'delta': 'Delta',
    'seed': 'Seed',
    'mu': 'Expected double edges (mu)',
    'condition1': 'Condition 1 statistic',
    'poisson_acceptance': 'exp(-mu)',
    'large_profile': 'I_L row widths',
    'large_set': 'I_L entries',
    'large_set_size': '|I_L|',
    'large_rows': 'Rows touching I_L',
    'large_cols': 'Columns touching I_L',
    'large_mu_part': 'mu contribution of I_L',
    'gamma': 'Gamma',
    'lambda_': 'Lambda',
    'exp_neg_gamma': 'exp(-gamma)',
    'exp_neg_lambda': 'exp(-lambda)',
    'no_large_rate': 'Rate of W_L = 0',
    'mean_small_nonbinary': 'Mean Z_S',
    'mean_large_nonbinary': 'Mean Z_L',
    'small_binary_rate': 'Rate of Z_S = 0',
    'mean': 'Mean',
    'std_error': 'Standard error',
    'samples': 'Samples',
    'attempts': 'Attempts',
    'edges': 'Nonzero entries (row, column, count)',
    'binary': 'Binary',
    'family': 'Family',
    'grid': 'Grid of N',
    'swapped': 'Rows and columns swapped',
    'theta': 'Theta',
    'tolerance': 'Exponent tolerance',
    'cond1_values': 'Condition 1 statistic per N',
    'cond1_exponent': 'Condition 1 growth exponent',
    'cond1_verdict': 'Condition 1',
    'index_classes': 'Limit class of r_i / N',
    'kappa_estimate': 'Kappa',
    'kappa_capped': 'Kappa above cap',
    'kappa_prime': "Kappa'",
    'tail_mass': 'Row mass from kappa on, per N',
    'tail_class': 'Tail mass limit',
    'c1_values': 'c_1 per N',
    'c1_limit': 'Limit of c_1',
    'sublinear_r1': 'r_1 = o(N) shortcut',
    'oscillating': 'Oscillating',
    'cond2_verdict': 'Condition 2',
    'overall': 'Verdict',
    'table_count': 'Tables enumerated',
    'observed': 'Observed frequencies',
    'chi2': 'Chi-square',
    'dof': 'Degrees of freedom',
    'p_value': 'p-value',
    'passes_0_001': 'Passes at 0.001',
    'prop': 'Property',
    'p_config': 'Rate under configuration model',
    'p_uniform': 'Rate among binary tables',
    'rho_hat': 'Acceptance rate',
    'bound': 'Lower bound for uniform rate',
    'bound_check': 'Bound holds',
    'repeat': 'Repetitions',
    'median_seconds': 'Median seconds',
    'ns_per_token': 'Nanoseconds per token',
    'timings': 'Timings (s)',
}


def relabel(data):
    """Replace field names with their human labels, recursively."""
    if isinstance(data, dict):
        return {result_labels_to_key.get(k, k): relabel(v) for k, v in data.items()}
    if isinstance(data, list):
        return [relabel(v) for v in data]
    return data
