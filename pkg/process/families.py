"""
Margin families N -> (r(N), c(N)): the built-in ones and families read from a definition file.

A family file is JSON (or YAML) of the form

    {"name": "halving", "monotone": true, "pad": "unit",
     "rows": [{"expr": "floor(N / pow(2, i))", "range": [1, "floor(log2(N))"]}],
     "cols": [{"expr": "2", "range": [1, 2]}]}

Each rule contributes one entry per index in its inclusive range (bounds may be expressions
of N); rows use the variable `i`, columns `j`. Both vectors are padded with unit entries up
to total N, and zero entries are dropped.
"""
import ast
import json
import math
import logging
import operator
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
import yaml

from model.errors import GeneratorError, ParseError, ValidationError
from model.margins import Margins

logger = logging.getLogger(__name__)

FUNCTIONS = {
    'floor': np.floor,
    'ceil': np.ceil,
    'sqrt': np.sqrt,
    'log2': np.log2,
    'pow': np.power,
    'min': np.minimum,
    'max': np.maximum,
}
BINARY_OPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.FloorDiv: operator.floordiv,
    ast.Mod: operator.mod,
    ast.Pow: operator.pow,
}
UNARY_OPS = {
    ast.USub: operator.neg,
    ast.UAdd: operator.pos,
}
MAX_ENTRIES = 10 ** 8


class Expression:
    """Arithmetic expression over i, j, N and FUNCTIONS, evaluated elementwise with numpy."""

    def __init__(self, text, variables=('i', 'j', 'N')):
        self.text = str(text)
        self.variables = variables
        try:
            tree = ast.parse(self.text, mode='eval')
        except SyntaxError as exc:
            raise ParseError(f'cannot parse expression `{self.text}`', expr=self.text) from exc
        self._check(tree.body)
        self.tree = tree.body

    def _check(self, node):
        if isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
                raise ParseError(f'unsupported constant in `{self.text}`', expr=self.text)
        elif isinstance(node, ast.Name):
            if node.id not in self.variables:
                raise ParseError(f'unknown name `{node.id}` in `{self.text}`', expr=self.text)
        elif isinstance(node, ast.BinOp):
            if type(node.op) not in BINARY_OPS:
                raise ParseError(f'unsupported operator in `{self.text}`', expr=self.text)
            self._check(node.left)
            self._check(node.right)
        elif isinstance(node, ast.UnaryOp):
            if type(node.op) not in UNARY_OPS:
                raise ParseError(f'unsupported operator in `{self.text}`', expr=self.text)
            self._check(node.operand)
        elif isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in FUNCTIONS or node.keywords:
                raise ParseError(f'unsupported call in `{self.text}`', expr=self.text)
            for arg in node.args:
                self._check(arg)
        else:
            raise ParseError(f'unsupported syntax in `{self.text}`', expr=self.text)

    def _eval(self, node, env):
        if isinstance(node, ast.Constant):
            return np.float64(node.value)
        if isinstance(node, ast.Name):
            if node.id not in env:
                raise GeneratorError(f'`{node.id}` is not defined here ({self.text})', expr=self.text)
            return env[node.id]
        if isinstance(node, ast.BinOp):
            return BINARY_OPS[type(node.op)](self._eval(node.left, env), self._eval(node.right, env))
        if isinstance(node, ast.UnaryOp):
            return UNARY_OPS[type(node.op)](self._eval(node.operand, env))
        return FUNCTIONS[node.func.id](*[self._eval(arg, env) for arg in node.args])

    def evaluate(self, **env):
        """Evaluate to an int64 array (or scalar); non-integral or non-finite results raise GeneratorError."""
        env = {k: np.asarray(v, dtype=np.float64) for k, v in env.items()}
        try:
            with np.errstate(all='raise'):
                value = np.asarray(self._eval(self.tree, env), dtype=np.float64)
        except (FloatingPointError, ZeroDivisionError, ValueError, TypeError) as exc:
            raise GeneratorError(f'cannot evaluate `{self.text}`: {exc}', expr=self.text) from exc
        if not np.all(np.isfinite(value)):
            raise GeneratorError(f'`{self.text}` is not finite', expr=self.text)
        rounded = np.round(value)
        if not np.all(np.abs(value - rounded) <= 1e-9 * np.maximum(1.0, np.abs(value))):
            raise GeneratorError(f'`{self.text}` is not an integer; wrap it in floor() or ceil()', expr=self.text)
        return rounded.astype(np.int64)

    def __repr__(self):
        return f'Expression({self.text!r})'


@dataclass(frozen=True)
class Rule:
    expr: Expression
    low: Expression
    high: Expression

    def entries(self, variable, N):
        lo, hi = int(self.low.evaluate(N=N)), int(self.high.evaluate(N=N))
        if hi < lo:
            return np.zeros(0, dtype=np.int64)
        if hi - lo + 1 > MAX_ENTRIES:
            raise GeneratorError(f'rule `{self.expr.text}` spans {hi - lo + 1} entries', expr=self.expr.text)
        index = np.arange(lo, hi + 1, dtype=np.int64)
        return np.broadcast_to(self.expr.evaluate(**{variable: index, 'N': N}), index.shape)


def pad_to_total(head, N, name):
    """Drop zero entries of `head` and append unit entries up to total N."""
    head = np.asarray(head, dtype=np.int64)
    if np.any(head < 0):
        raise GeneratorError(f'`{name}` has negative entries at N={N}', N=N)
    head = head[head > 0]
    total = int(head.sum())
    if total > N:
        raise GeneratorError(f'`{name}` sums to {total} > N={N}', N=N, total=total)
    return np.concatenate((head, np.ones(N - total, dtype=np.int64)))


@dataclass(frozen=True)
class SequenceFamily:
    """
    name: identifier; generator: N -> (row head, column head) before unit padding;
    monotone: every r_i(N), c_j(N) is non-decreasing in N.
    """
    name: str
    generator: Callable
    monotone: bool = False
    description: str = field(default='', compare=False)

    def margins(self, N):
        N = int(N)
        if N < 1:
            raise GeneratorError(f'{self.name} is undefined at N={N}', N=N)
        try:
            r_head, c_head = self.generator(N)
        except GeneratorError:
            raise
        except Exception as exc:
            raise GeneratorError(f'{self.name} failed at N={N}: {exc}', N=N) from exc
        r = pad_to_total(r_head, N, 'r')
        c = pad_to_total(c_head, N, 'c')
        try:
            return Margins.from_vectors(r, c)
        except ValidationError as exc:
            raise GeneratorError(f'{self.name} at N={N}: {exc.message}', N=N) from exc


def _unit_margins(N):
    return [], []


def _dominant_row(N):
    return [N - math.isqrt(N)], [2] if N >= 2 else []


def _halving_rows(N):
    return [N >> i for i in range(1, N.bit_length())], [2, 2] if N >= 4 else []


def _block_size(N):
    k = int(round(N ** (2.0 / 3.0)))
    while k ** 3 > N * N:
        k -= 1
    while (k + 1) ** 3 <= N * N:
        k += 1
    return max(1, k)


def _power_blocks(N):
    k = _block_size(N)
    blocks = [k] * (N // k)
    return blocks, blocks


def _constant_degree(N, d=3):
    blocks = [d] * (N // d)
    return blocks, blocks


BUILTIN_FAMILIES = {
    family.name: family for family in (
        SequenceFamily('unit-margins', _unit_margins, monotone=True,
                       description='r = c = (1, ..., 1)'),
        SequenceFamily('dominant-row', _dominant_row, monotone=True,
                       description='r_1 = N - floor(sqrt N), c = (2, 1, ..., 1)'),
        SequenceFamily('halving-rows', _halving_rows, monotone=True,
                       description='r_i = floor(N / 2^i), c = (2, 2, 1, ..., 1)'),
        SequenceFamily('power-blocks', _power_blocks, monotone=False,
                       description='floor(N / k) rows and columns of sum k = floor(N^(2/3))'),
        SequenceFamily('constant-degree', _constant_degree, monotone=True,
                       description='floor(N / 3) rows and columns of sum 3'),
    )
}


def _parse_rules(items, variable):
    if items is None:
        return []
    if not isinstance(items, list):
        raise ParseError(f'`{variable}` rules must be a list')
    rules = []
    for item in items:
        if isinstance(item, (int, str)):
            item = {'expr': item}
        if not isinstance(item, dict) or 'expr' not in item:
            raise ParseError('every rule needs an `expr`', rule=str(item))
        bounds = item.get('range', [1, 1])
        if not isinstance(bounds, list) or len(bounds) != 2:
            raise ParseError('`range` must be a pair [low, high]', rule=str(item))
        variables = (variable, 'N')
        rules.append(Rule(expr=Expression(item['expr'], variables),
                          low=Expression(bounds[0], ('N',)), high=Expression(bounds[1], ('N',))))
    return rules


def family_from_dict(data):
    if not isinstance(data, dict):
        raise ParseError('a family definition must be a mapping')
    unknown = set(data) - {'name', 'rows', 'cols', 'pad', 'monotone', 'description'}
    if unknown:
        raise ParseError(f'unknown keys in family definition: {sorted(unknown)}')
    if data.get('pad', 'unit') != 'unit':
        raise ParseError('only `pad: unit` is supported', pad=data.get('pad'))
    row_rules = _parse_rules(data.get('rows'), 'i')
    col_rules = _parse_rules(data.get('cols'), 'j')

    def generate(N):
        rows = [rule.entries('i', N) for rule in row_rules]
        cols = [rule.entries('j', N) for rule in col_rules]
        empty = np.zeros(0, dtype=np.int64)
        return np.concatenate([empty] + rows), np.concatenate([empty] + cols)

    return SequenceFamily(name=str(data.get('name', 'custom')), generator=generate,
                          monotone=bool(data.get('monotone', False)),
                          description=str(data.get('description', '')))


def load_family(path):
    """Read a family definition; `.json` files and text opening with `{` are JSON, the rest YAML."""
    try:
        text = Path(path).read_text(encoding='utf-8')
    except OSError as exc:
        raise ParseError(f'cannot read family file {path}: {exc}', path=str(path)) from exc
    if Path(path).suffix.lower() == '.json' or text.lstrip().startswith('{'):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f'{path}: {exc}', path=str(path)) from exc
    else:
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ParseError(f'{path}: {exc}', path=str(path)) from exc
    return family_from_dict(data)


def get_family(name_or_path):
    """A built-in family by name, else a definition file."""
    if name_or_path in BUILTIN_FAMILIES:
        return BUILTIN_FAMILIES[name_or_path]
    if Path(name_or_path).is_file():
        return load_family(name_or_path)
    raise ValidationError(f'`{name_or_path}` is neither a built-in family ({", ".join(BUILTIN_FAMILIES)}) '
                          f'nor a family file', family=name_or_path)
