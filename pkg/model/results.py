import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

from model.json_mixin import JSONOutputMixin


@dataclass(frozen=True)
class ExactCount(JSONOutputMixin):
    count: int
    acceptance: Fraction
    dp_states: int

    EXCLUDE_FIELDS = ('acceptance',)
    EXECUTABLE_FIELDS = {
        'acceptance_num': lambda x: x.acceptance.numerator,
        'acceptance_den': lambda x: x.acceptance.denominator,
        'acceptance_float': lambda x: float(x.acceptance),
    }


@dataclass(frozen=True)
class CountEstimate(JSONOutputMixin):
    p_hat: float
    ci_low: float
    ci_high: float
    accepted: int
    samples_used: int
    count_log2: Optional[float]
    count_estimate: Optional[int]
    epsilon: Optional[float]
    delta: float
    seed: int
    target_accepted: Optional[int] = None
    batches: int = 1


@dataclass(frozen=True)
class DoubleEdgeMean(JSONOutputMixin):
    mean: float
    std_error: float
    samples: int
    seed: int


@dataclass(frozen=True)
class SplitDiagnostics(JSONOutputMixin):
    epsilon: float
    large_profile: List[int]
    large_set_size: int
    large_rows: List[int]
    large_cols: List[int]
    gamma: float
    lambda_: float
    mu: float
    large_mu_part: float

    EXECUTABLE_FIELDS = {
        'large_set': lambda x: [list(p) for p in x.large_set],
        'exp_neg_gamma': lambda x: x.exp_neg_gamma,
        'exp_neg_lambda': lambda x: x.exp_neg_lambda,
    }

    @property
    def large_set(self):
        """Entries (i, j) of I_L; row i owns the first large_profile[i] columns."""
        return [(i, j) for i, width in enumerate(self.large_profile) for j in range(width)]

    @property
    def exp_neg_gamma(self):
        return math.exp(-self.gamma)

    @property
    def exp_neg_lambda(self):
        return math.exp(-self.lambda_)


@dataclass(frozen=True)
class SplitSampling(JSONOutputMixin):
    epsilon: float
    samples: int
    seed: int
    no_large_rate: float
    exp_neg_gamma: float
    mean_small_nonbinary: float
    lambda_: float
    mean_large_nonbinary: float
    small_binary_rate: float
    exp_neg_lambda: float


@dataclass(frozen=True)
class GridPoint(JSONOutputMixin):
    N: int
    m: int
    n: int
    r1: int
    c1: int
    condition1: float
    mu: float
    head_rows: int
    row_ratios: List[float]
    row_heads: List[int]
    col_heads: List[int]
    suffix_mass: List[float]

    EXCLUDE_FIELDS = ('row_ratios', 'row_heads', 'col_heads', 'suffix_mass')


@dataclass(frozen=True)
class ConditionReport(JSONOutputMixin):
    family: str
    grid: List[int]
    swapped: bool
    theta: float
    tolerance: float
    cond1_values: List[float]
    cond1_exponent: float
    cond1_verdict: str
    index_classes: List[str]
    kappa_estimate: Optional[int]
    kappa_capped: bool
    kappa_prime: Optional[int]
    tail_mass: List[float]
    tail_class: str
    c1_values: List[int]
    c1_limit: int
    sublinear_r1: bool
    oscillating: bool
    cond2_verdict: str
    overall: str
    points: List[GridPoint] = field(default_factory=list)

    EXCLUDE_FIELDS = ('points',)


@dataclass(frozen=True)
class UniformityResult(JSONOutputMixin):
    table_count: int
    observed: List[int]
    chi2: float
    dof: int
    p_value: float
    samples: int
    seed: int

    EXECUTABLE_FIELDS = {
        'passes_0_001': lambda x: x.p_value > 0.001,
    }


@dataclass(frozen=True)
class TransferResult(JSONOutputMixin):
    prop: str
    samples: int
    accepted: int
    p_config: float
    p_uniform: float
    rho_hat: float
    bound: float
    std_error: float
    bound_check: bool
    seed: int


@dataclass(frozen=True)
class BenchPoint(JSONOutputMixin):
    N: int
    repeat: int
    median_seconds: float
    ns_per_token: float
    timings: Tuple[float, ...]
