"""
Replication runner shared by calibration and the simulation study.

Replication j draws from its own generator derived from (seed, j), so results do not
depend on the number of workers or on scheduling.
"""
import logging
import sys
from multiprocessing import Pool
from typing import Callable, Iterator, List, TypeVar

import numpy as np
from tqdm import tqdm

from src.config.settings import settings


logger = logging.getLogger(__name__)

T = TypeVar("T")


def rep_rng(seed: int, rep: int) -> np.random.Generator:
    """
    Generator of replication ``rep``: the ``rep``-th child stream of ``seed``

    Args:
        seed (int): Experiment seed
        rep (int): Replication index, >= 0

    Returns:
        np.random.Generator: Independent PCG64 stream
    """
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(rep,)))


def iter_reps(worker: Callable[[int], T],
              n_rep: int,
              workers: int | None = None,
              desc: str = "replications",
              quiet: bool = False) -> Iterator[T]:
    """
    Evaluate ``worker(j)`` for j = 0..n_rep-1, yielding the results in index order

    Args:
        worker (Callable[[int], T]): Picklable function of the replication index
        n_rep (int): Number of replications
        workers (int | None): Process count; 1 runs in-process. Defaults to settings.workers.
        desc (str): Progress bar label
        quiet (bool): Disable the progress bar

    Yields:
        T: Result of replication j, for j = 0, 1, ...
    """
    workers = settings.workers if workers is None else workers
    workers = max(1, min(workers, n_rep))
    disable = quiet or not sys.stderr.isatty()
    logger.debug("%s: %d replications on %d worker(s)", desc, n_rep, workers)
    if workers == 1:
        yield from tqdm(map(worker, range(n_rep)), total=n_rep, desc=desc, disable=disable)
        return
    chunksize = max(1, n_rep // (workers * 8))
    with Pool(processes=workers) as pool:
        # imap keeps submission order
        yield from tqdm(pool.imap(worker, range(n_rep), chunksize=chunksize),
                        total=n_rep, desc=desc, disable=disable)


def run_reps(worker: Callable[[int], T],
             n_rep: int,
             workers: int | None = None,
             desc: str = "replications",
             quiet: bool = False) -> List[T]:
    """Results of iter_reps gathered into a list"""
    return list(iter_reps(worker, n_rep, workers, desc, quiet))
