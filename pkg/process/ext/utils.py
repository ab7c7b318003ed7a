import os
import asyncio
import datetime
import logging
import secrets
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import humanize
import numpy as np
import pytz
import uvloop
from fastcrc import crc32

logger = logging.getLogger(__name__)

BATCH_TOKENS = int(os.environ.get('BCT_BATCH_TOKENS', 1 << 20))
TASK_SAMPLES = int(os.environ.get('BCT_TASK_SAMPLES', 1 << 14))
DEFAULT_THREADS = int(os.environ.get('BCT_THREADS', 1))

SEED_MASK = (1 << 64) - 1


def return_checksum(arr: list):
    arr = [str(x) for x in arr]
    return crc32.cksum(bytes('|'.join(arr), 'utf-8'))


def file_checksum(path):
    return crc32.cksum(Path(path).read_bytes())


def resolve_seed(seed=None):
    """Explicit seed, else BCT_SEED, else fresh entropy; always a 64-bit integer."""
    if seed is None and os.environ.get('BCT_SEED'):
        seed = int(os.environ['BCT_SEED'])
    if seed is None:
        seed = secrets.randbits(64)
        logger.info('No seed given, drew %d', seed)
    return int(seed) & SEED_MASK


def make_rng(seed):
    """PCG64 generator fed through SeedSequence; the same seed replays the same stream."""
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


def plan_tasks(samples, task_samples=None):
    """Split a sample count into fixed-size tasks; the plan never depends on thread count."""
    task_samples = task_samples or TASK_SAMPLES
    full, rest = divmod(int(samples), task_samples)
    sizes = [task_samples] * full
    if rest:
        sizes.append(rest)
    return sizes


def batch_size_for(tokens):
    return max(1, BATCH_TOKENS // max(1, int(tokens)))


async def _gather_tasks(fn, tasks, threads):
    loop = asyncio.get_running_loop()
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return await asyncio.gather(*[loop.run_in_executor(executor, fn, *task) for task in tasks])


def run_tasks(fn, tasks, threads=None):
    """Run fn(*task) for every task; results come back in task order whatever the scheduling."""
    threads = threads or DEFAULT_THREADS
    tasks = list(tasks)
    if threads <= 1 or len(tasks) <= 1:
        return [fn(*task) for task in tasks]
    logger.debug('Running %d tasks on %d threads', len(tasks), threads)
    return uvloop.run(_gather_tasks(fn, tasks, threads))


def utc_now():
    return datetime.datetime.now(tz=pytz.utc)


def time_info(start):
    now = utc_now()
    delta = now - start
    return {
        'started': start.isoformat(),
        'finished': now.isoformat(),
        'seconds': delta.total_seconds(),
        'human': humanize.precisedelta(delta, minimum_unit='milliseconds'),
    }
