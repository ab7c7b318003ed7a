"""
Configuration-model sampling of binary contingency tables.

A draw lays the N type-1 tokens out row by row, permutes the N type-2 tokens uniformly
(Fisher-Yates on a PCG64 stream, unbiased bounded integers) and matches slot k with slot
perm[k]. Conditioned on the induced table being binary, the table is uniform on the set
of binary tables with the given margins, so rejection gives an exact uniform sampler.
"""
import os
import logging
from dataclasses import dataclass

import numpy as np

from model.errors import InfeasibleMarginsError, RejectionExhaustedError
from model.margins import gale_ryser_feasible
from model.tables import TokenPairing, ContingencyTable
from process.ext.utils import batch_size_for

logger = logging.getLogger(__name__)

DEFAULT_MAX_ATTEMPTS = int(os.environ.get('BCT_MAX_ATTEMPTS', 1000))
EARLY_EXIT_CHUNK = 4096


def perm_dtype(N):
    return np.int32 if N < 2 ** 31 else np.int64


def sample_pairing(margins, rng):
    """Uniform pairing; the permutation is shuffled in place as 32-bit indices whenever N fits."""
    perm = np.arange(margins.N, dtype=perm_dtype(margins.N))
    rng.shuffle(perm)
    return TokenPairing(margins=margins, perm=perm)


def _row_chunks(margins):
    """Slot boundaries that never split a row, each chunk holding about EARLY_EXIT_CHUNK tokens."""
    ends = np.cumsum(margins.r)
    marks = np.arange(EARLY_EXIT_CHUNK, margins.N, EARLY_EXIT_CHUNK)
    cut_rows = np.unique(np.searchsorted(ends, marks, side='left'))
    bounds = np.concatenate(([0], ends[cut_rows], [margins.N]))
    return np.unique(bounds)


def table_from_pairing(pairing, early_exit=False):
    """
    Build the table induced by a pairing.

    With early_exit the pass stops at the first chunk of rows holding an entry >= 2 and
    returns None; the accept/reject outcome is the same as checking the finished table.
    """
    keys = pairing.entry_keys()
    if early_exit:
        bounds = _row_chunks(pairing.margins)
        for lo, hi in zip(bounds[:-1].tolist(), bounds[1:].tolist()):
            chunk = np.sort(keys[lo:hi])
            if chunk.size > 1 and np.any(chunk[1:] == chunk[:-1]):
                return None
    return ContingencyTable.from_keys(pairing.margins, keys)


def count_nonbinary(table):
    return int(np.count_nonzero(table.counts >= 2))


def count_double_edges(table):
    counts = table.counts
    return int(np.sum(counts * (counts - 1) // 2))


def ensure_feasible(margins):
    if not gale_ryser_feasible(margins):
        raise InfeasibleMarginsError('no binary table has these margins (Gale-Ryser fails)',
                                     r=margins.input_rows(), c=margins.input_cols())


def sample_binary_rejection(margins, rng, max_attempts=None):
    """
    Draw configurations until one is binary.

    :return: (table, attempts); raises RejectionExhaustedError carrying the attempt count
    """
    max_attempts = max_attempts or DEFAULT_MAX_ATTEMPTS
    ensure_feasible(margins)
    for attempt in range(1, max_attempts + 1):
        table = table_from_pairing(sample_pairing(margins, rng), early_exit=True)
        if table is not None:
            return table, attempt
    logger.warning('No binary table in %d attempts for %r', max_attempts, margins)
    raise RejectionExhaustedError(f'no binary table after {max_attempts} attempts', attempts=max_attempts)


@dataclass
class DrawBatch:
    """
    A batch of independent configuration draws.

    keys[b] are the entry keys of draw b in slot order; entry_draw/entry_key/entry_count list
    every nonzero entry of every draw.
    """
    margins: object
    keys: np.ndarray
    entry_draw: np.ndarray
    entry_key: np.ndarray
    entry_count: np.ndarray
    binary: np.ndarray
    nonbinary: np.ndarray
    double_edges: np.ndarray

    @property
    def size(self):
        return int(self.keys.shape[0])

    def table(self, b):
        lo, hi = np.searchsorted(self.entry_draw, [b, b + 1])
        return ContingencyTable(margins=self.margins, keys=self.entry_key[lo:hi], counts=self.entry_count[lo:hi])


def draw_batch(margins, rng, size):
    N, cells = margins.N, margins.m * margins.n
    slots = np.broadcast_to(np.arange(N, dtype=np.int64), (size, N))
    perms = rng.permuted(slots, axis=1)
    keys = margins.row_of[None, :] * margins.n + margins.col_of[perms]
    offsets = np.arange(size, dtype=np.int64)[:, None] * cells
    uniq, counts = np.unique((keys + offsets).ravel(), return_counts=True)
    entry_draw = uniq // cells
    nonbinary = np.bincount(entry_draw, weights=(counts >= 2).astype(np.float64), minlength=size).astype(np.int64)
    double_edges = np.bincount(entry_draw, weights=counts * (counts - 1) // 2, minlength=size).astype(np.int64)
    return DrawBatch(margins=margins, keys=keys, entry_draw=entry_draw, entry_key=uniq - entry_draw * cells,
                     entry_count=counts.astype(np.int64), binary=nonbinary == 0, nonbinary=nonbinary,
                     double_edges=double_edges)


def iter_batches(margins, rng, samples, batch=None):
    """Yield DrawBatch objects covering exactly `samples` draws."""
    batch = batch or batch_size_for(margins.N)
    left = int(samples)
    while left > 0:
        size = min(batch, left)
        yield draw_batch(margins, rng, size)
        left -= size


def sample_binary_batch(margins, rng, count, max_attempts=None):
    """
    Yield `count` accepted tables, drawing configurations in vectorized batches.

    Same law as repeated sample_binary_rejection; gives up after max_attempts draws in total.
    """
    ensure_feasible(margins)
    batch = batch_size_for(margins.N)
    max_attempts = max_attempts or max(DEFAULT_MAX_ATTEMPTS, 1000 * count)
    produced, attempts = 0, 0
    while produced < count:
        if attempts >= max_attempts:
            raise RejectionExhaustedError(f'only {produced} of {count} tables after {attempts} attempts',
                                          attempts=attempts, produced=produced)
        drawn = draw_batch(margins, rng, min(batch, max_attempts - attempts))
        attempts += drawn.size
        for b in np.flatnonzero(drawn.binary).tolist():
            yield drawn.table(b)
            produced += 1
            if produced == count:
                return
