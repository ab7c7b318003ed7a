import re
import json
import math
import logging
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from model.errors import ParseError, ValidationError
from model.json_mixin import JSONOutputMixin

logger = logging.getLogger(__name__)

line_pattern = re.compile(r'^\s*([rc])\s*:\s*(.*)$')
separator_pattern = re.compile(r'[\s,]+')


def _frozen(values):
    arr = np.array(values, dtype=np.int64)
    arr.setflags(write=False)
    return arr


def _as_int_vector(values, name):
    try:
        arr = values if isinstance(values, np.ndarray) else np.asarray(list(values))
    except TypeError as exc:
        raise ValidationError(f'`{name}` must be a sequence of integers', vector=name) from exc
    if arr.size == 0:
        raise ValidationError(f'`{name}` is empty', vector=name)
    if arr.dtype.kind == 'f':
        if not np.all(np.isfinite(arr)) or not np.all(arr == np.floor(arr)):
            raise ValidationError(f'`{name}` holds non-integer entries', vector=name)
    elif arr.dtype.kind not in 'iu':
        raise ValidationError(f'`{name}` holds non-integer entries', vector=name)
    return arr.astype(np.int64)


@dataclass(frozen=True, eq=False)
class Margins(JSONOutputMixin):
    """
    Row and column sums of a binary contingency table.

    Both vectors are stored sorted non-increasing with zeros trimmed; `row_labels[i]` and
    `col_labels[j]` keep the input position of the i-th largest row and j-th largest column.
    Instances are immutable (the arrays are read-only).
    """
    r: np.ndarray
    c: np.ndarray
    row_labels: np.ndarray
    col_labels: np.ndarray

    EXCLUDE_FIELDS = ('row_labels', 'col_labels')
    EXECUTABLE_FIELDS = {
        'N': lambda x: x.N,
        'm': lambda x: x.m,
        'n': lambda x: x.n,
    }

    @classmethod
    def from_vectors(cls, r, c, trim_zeros=False):
        r = _as_int_vector(r, 'r')
        c = _as_int_vector(c, 'c')
        row_pos = np.arange(r.size)
        col_pos = np.arange(c.size)
        for name, vec in (('r', r), ('c', c)):
            if np.any(vec < 0):
                raise ValidationError(f'`{name}` holds negative entries', vector=name)
            if not trim_zeros and np.any(vec == 0):
                raise ValidationError(f'`{name}` holds zero entries; omit empty rows and columns', vector=name)
        if trim_zeros:
            row_pos, col_pos = row_pos[r > 0], col_pos[c > 0]
            r, c = r[r > 0], c[c > 0]
            if r.size == 0 or c.size == 0:
                raise ValidationError('margins are empty after dropping zero entries')
        r_total, c_total = int(r.sum()), int(c.sum())
        if r_total != c_total:
            raise ValidationError(f'row sums total {r_total} but column sums total {c_total}',
                                  r_total=r_total, c_total=c_total)
        row_order = np.argsort(-r, kind='stable')
        col_order = np.argsort(-c, kind='stable')
        return cls(r=_frozen(r[row_order]), c=_frozen(c[col_order]),
                   row_labels=_frozen(row_pos[row_order]), col_labels=_frozen(col_pos[col_order]))

    @cached_property
    def N(self):
        return int(self.r.sum())

    @property
    def m(self):
        return int(self.r.size)

    @property
    def n(self):
        return int(self.c.size)

    @cached_property
    def row_of(self):
        """Row index of every type-1 token slot."""
        arr = np.repeat(np.arange(self.m, dtype=np.int64), self.r)
        arr.setflags(write=False)
        return arr

    @cached_property
    def col_of(self):
        """Column index of every type-2 token slot."""
        arr = np.repeat(np.arange(self.n, dtype=np.int64), self.c)
        arr.setflags(write=False)
        return arr

    def transpose(self):
        return Margins(r=self.c, c=self.r, row_labels=self.col_labels, col_labels=self.row_labels)

    def oriented(self):
        """(margins, swapped) with r_1 >= c_1; swapped tells whether rows and columns traded places."""
        if self.r[0] >= self.c[0]:
            return self, False
        return self.transpose(), True

    def input_rows(self):
        out = np.empty_like(self.r)
        out[self.row_labels] = self.r
        return out.tolist()

    def input_cols(self):
        out = np.empty_like(self.c)
        out[self.col_labels] = self.c
        return out.tolist()

    def __eq__(self, other):
        if not isinstance(other, Margins):
            return NotImplemented
        return np.array_equal(self.r, other.r) and np.array_equal(self.c, other.c)

    def __hash__(self):
        return hash((self.r.tobytes(), self.c.tobytes()))

    def __repr__(self):
        def short(arr):
            head = ' '.join(str(v) for v in arr[:12].tolist())
            return head + (' ...' if arr.size > 12 else '')
        return f'Margins(r=[{short(self.r)}], c=[{short(self.c)}], N={self.N})'


def parse_vector(text, name='vector'):
    tokens = [t for t in separator_pattern.split(text.strip()) if t]
    try:
        return [int(t) for t in tokens]
    except ValueError as exc:
        raise ParseError(f'malformed `{name}` vector: {text!r}', vector=name) from exc


def parse_margins(text):
    """
    Parse margin-file content into validated Margins.

    Two formats are accepted: the line format (`r: 3 2 1 1` / `c: 2 2 1 1 1`, `#` starts a
    comment line) and a JSON object with integer arrays under "r" and "c".
    """
    if text.lstrip().startswith('{'):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f'malformed JSON margins: {exc}') from exc
        if not isinstance(obj, dict) or 'r' not in obj or 'c' not in obj:
            raise ParseError('JSON margins need the keys "r" and "c"')
        if not isinstance(obj['r'], list) or not isinstance(obj['c'], list):
            raise ParseError('"r" and "c" must be integer arrays')
        return Margins.from_vectors(obj['r'], obj['c'])

    vectors = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith('#'):
            continue
        match = line_pattern.match(stripped)
        if not match:
            raise ParseError(f'line {lineno}: expected `r: <ints>` or `c: <ints>`', line=lineno)
        key = match.group(1)
        if key in vectors:
            raise ParseError(f'line {lineno}: `{key}` given twice', line=lineno)
        vectors[key] = parse_vector(match.group(2), key)
    for key in ('r', 'c'):
        if key not in vectors:
            raise ParseError(f'missing `{key}:` line')
    return Margins.from_vectors(vectors['r'], vectors['c'])


def load_margins(path):
    try:
        text = Path(path).read_text(encoding='utf-8')
    except OSError as exc:
        raise ParseError(f'cannot read margins file {path}: {exc}') from exc
    margins = parse_margins(text)
    logger.debug('Loaded %r from %s', margins, path)
    return margins


def gale_ryser_feasible(margins):
    """True iff some 0/1 table has these margins: sum_{i<=k} r_i <= sum_j min(c_j, k) for all k."""
    r, c = margins.r, margins.c
    if int(r.sum()) != int(c.sum()):
        return False
    k_max = r.size
    counts = np.bincount(c, minlength=k_max + 2)
    at_least = np.cumsum(counts[::-1])[::-1]
    capacity = np.cumsum(at_least[1:k_max + 1])
    return bool(np.all(np.cumsum(r) <= capacity))


def falling_factorial(x, k):
    if x < 0 or k < 0:
        raise ValidationError('falling factorial needs x >= 0 and k >= 0', x=x, k=k)
    if k > x:
        return 0
    return math.perm(x, k)
