import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from model.errors import InstanceTooLargeError
from model.json_mixin import JSONOutputMixin

logger = logging.getLogger(__name__)

DENSE_CELL_LIMIT = 10 ** 7


@dataclass(frozen=True, eq=False)
class TokenPairing:
    """
    One configuration-model draw: type-1 slot k is matched to type-2 slot perm[k].

    Slots are laid out row by row (resp. column by column), so the slot-to-row map is the
    prefix-sum layout of r and the slot-to-column map is that of c.
    """
    margins: object
    perm: np.ndarray

    @property
    def row_of(self):
        return self.margins.row_of

    @property
    def col_of(self):
        return self.margins.col_of

    def entry_keys(self):
        """Flat row-major entry index (i * n + j) of every matched token pair, in slot order."""
        return self.row_of * self.margins.n + self.col_of[self.perm]


@dataclass(frozen=True, eq=False)
class ContingencyTable(JSONOutputMixin):
    """
    Sparse table: `keys` are the sorted flat indices (i * n + j) of the nonzero entries and
    `counts` their values. Absent keys are zero.
    """
    margins: object
    keys: np.ndarray
    counts: np.ndarray

    EXCLUDE_FIELDS = ('margins', 'keys', 'counts')
    EXECUTABLE_FIELDS = {
        'edges': lambda x: [list(e) for e in x.edges(input_order=True)],
        'binary': lambda x: x.is_binary,
    }

    @classmethod
    def from_keys(cls, margins, keys):
        uniq, counts = np.unique(np.asarray(keys, dtype=np.int64), return_counts=True)
        return cls(margins=margins, keys=uniq, counts=counts.astype(np.int64))

    @cached_property
    def entries(self):
        n = self.margins.n
        return {(int(k // n), int(k % n)): int(v) for k, v in zip(self.keys.tolist(), self.counts.tolist())}

    @property
    def is_binary(self):
        return bool(self.counts.size == 0 or self.counts.max() <= 1)

    def rows(self):
        return self.keys // self.margins.n

    def cols(self):
        return self.keys % self.margins.n

    def row_sums(self):
        return np.bincount(self.rows(), weights=self.counts, minlength=self.margins.m).astype(np.int64)

    def col_sums(self):
        return np.bincount(self.cols(), weights=self.counts, minlength=self.margins.n).astype(np.int64)

    def dense(self, input_order=False):
        m, n = self.margins.m, self.margins.n
        if m * n > DENSE_CELL_LIMIT:
            raise InstanceTooLargeError(f'dense {m}x{n} table exceeds {DENSE_CELL_LIMIT} cells', m=m, n=n)
        out = np.zeros((m, n), dtype=np.int64)
        rows, cols = self.rows(), self.cols()
        if input_order:
            rows, cols = self.margins.row_labels[rows], self.margins.col_labels[cols]
        out[rows, cols] = self.counts
        return out

    def in_input_order(self):
        """Dense table with rows and columns back in input position."""
        return self.dense(input_order=True)

    def edges(self, input_order=False):
        """Yield (row, column, count) for every nonzero entry."""
        rows, cols = self.rows(), self.cols()
        if input_order:
            rows, cols = self.margins.row_labels[rows], self.margins.col_labels[cols]
            order = np.lexsort((cols, rows))
            rows, cols, counts = rows[order], cols[order], self.counts[order]
        else:
            counts = self.counts
        for i, j, v in zip(rows.tolist(), cols.tolist(), counts.tolist()):
            yield i, j, v

    def encode(self):
        """Row-major run-length encoding of the dense table, e.g. `1x3,0x2,1x1`."""
        dense = self.dense().ravel()
        change = np.flatnonzero(np.diff(dense)) + 1
        starts = np.concatenate(([0], change))
        lengths = np.diff(np.concatenate((starts, [dense.size])))
        return ','.join(f'{dense[s]}x{length}' for s, length in zip(starts.tolist(), lengths.tolist()))


def encode_dense(rows):
    """Run-length encoding of a dense 0/1 table given as a sequence of rows."""
    flat = [v for row in rows for v in row]
    parts = []
    run_value, run_length = flat[0], 0
    for v in flat:
        if v == run_value:
            run_length += 1
        else:
            parts.append(f'{run_value}x{run_length}')
            run_value, run_length = v, 1
    parts.append(f'{run_value}x{run_length}')
    return ','.join(parts)
