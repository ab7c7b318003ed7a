import json

import numpy as np
import pytest

from model.errors import GeneratorError, ParseError, ValidationError
from process.families import BUILTIN_FAMILIES, Expression, family_from_dict, get_family, load_family

HALVING = {
    'name': 'halving', 'monotone': True, 'pad': 'unit',
    'rows': [{'expr': 'floor(N / pow(2, i))', 'range': [1, 'floor(log2(N))']}],
    'cols': [{'expr': '2', 'range': [1, 2]}],
}


@pytest.mark.parametrize('name', sorted(BUILTIN_FAMILIES))
@pytest.mark.parametrize('N', [1, 2, 7, 1000, 12345])
def test_builtin_totals(name, N):
    margins = BUILTIN_FAMILIES[name].margins(N)
    assert margins.N == N
    assert int(margins.c.sum()) == N


def test_builtin_shapes():
    dominant = BUILTIN_FAMILIES['dominant-row'].margins(100)
    assert (dominant.r[0], dominant.m, dominant.n) == (90, 11, 99)
    halving = BUILTIN_FAMILIES['halving-rows'].margins(1000)
    assert halving.r[:3].tolist() == [500, 250, 125]
    assert halving.m == 15
    blocks = BUILTIN_FAMILIES['power-blocks'].margins(1000)
    assert blocks.m == 10 and blocks.r[0] == 100
    assert BUILTIN_FAMILIES['power-blocks'].margins(10 ** 6).r[0] == 10 ** 4


def test_expression_values():
    expr = Expression('floor(N / pow(2, i))', ('i', 'N'))
    assert expr.evaluate(i=np.arange(1, 4), N=1000).tolist() == [500, 250, 125]
    assert int(Expression('max(3, min(N, 2)) + N % 4').evaluate(N=10)) == 5
    assert int(Expression('-ceil(sqrt(N))').evaluate(N=10)) == -4


@pytest.mark.parametrize('text', ['i + 0.5', '1 / 0', 'sqrt(0 - N)', 'pow(10, 400)'])
def test_expression_failures(text):
    with pytest.raises(GeneratorError):
        Expression(text).evaluate(i=1, N=5)


@pytest.mark.parametrize('text', ['__import__("os")', 'N.real', 'x + 1', '1 +', '"a"', 'N if N else 1',
                                  'floor(N, key=1)', 'N < 2'])
def test_expression_rejects_unsupported_syntax(text):
    with pytest.raises(ParseError):
        Expression(text)


def test_family_file_matches_builtin(tmp_path):
    path = tmp_path / 'halving.json'
    path.write_text(json.dumps(HALVING))
    family = load_family(path)
    assert family.monotone
    for N in (100, 1000, 1024, 12345):
        assert family.margins(N) == BUILTIN_FAMILIES['halving-rows'].margins(N)
    assert get_family(str(path)).name == 'halving'


def test_tab_indented_json_family(tmp_path):
    path = tmp_path / 'halving.json'
    path.write_text(json.dumps(HALVING, indent='\t'))
    assert '\t' in path.read_text()
    assert load_family(path).margins(1000) == BUILTIN_FAMILIES['halving-rows'].margins(1000)


def test_family_from_yaml(tmp_path):
    path = tmp_path / 'dominant.yaml'
    path.write_text('name: dominant\nmonotone: true\nrows: ["N - floor(sqrt(N))"]\ncols: [2]\n')
    assert load_family(path).margins(100) == BUILTIN_FAMILIES['dominant-row'].margins(100)


def test_unknown_family():
    with pytest.raises(ValidationError):
        get_family('no-such-family')


@pytest.mark.parametrize('data', [
    {**HALVING, 'pad': 'zero'},
    {**HALVING, 'colour': 'blue'},
    {'rows': 'N'},
    {'rows': [{'range': [1, 2]}]},
    {'rows': [{'expr': '1', 'range': [1]}]},
    ['N'],
])
def test_bad_definitions(data):
    with pytest.raises(ParseError):
        family_from_dict(data)


def test_malformed_family_file(tmp_path):
    path = tmp_path / 'broken.json'
    path.write_text('{"name": "broken", "rows": [')
    with pytest.raises(ParseError):
        load_family(path)


@pytest.mark.parametrize('rows', [['-1'], ['N', '1']])
def test_generator_errors(rows):
    with pytest.raises(GeneratorError):
        family_from_dict({'rows': rows}).margins(10)


def test_family_needs_positive_N():
    with pytest.raises(GeneratorError):
        BUILTIN_FAMILIES['unit-margins'].margins(0)
